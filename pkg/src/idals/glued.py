"""Quasi-coherent modules on two-chart schemes as gluing triples.

Two flavours of scheme:

* Affine: two affine charts glued along principal localizations, with the
  transition given by an explicit ring isomorphism both ways.  Overlap data
  of a glued module is a ModuleMap over the chart-1 overlap ring U1, mapping
  the base-changed chart-2 piece to the base-changed chart-1 piece (so a
  Serre twist O(n) on the projective line has tau = multiplication by t^n).
* SelfGlue: one ring glued to itself along the locus of an idal J; overlap
  data is a morphism element at a finite Deligne stage, from the chart-1
  piece to the chart-2 piece, with a supplied inverse element.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    AlgebraError,
    RingMismatchError,
    StabilizationError,
    TauNotInvertibleError,
    TauNotWellDefinedError,
    UngradedError,
    WellDefinednessError,
)
from . import linalg
from .fpmod import (
    ModuleMap,
    PresentedModule,
    _column_vec,
    column_degree,
    cokernel,
    direct_sum,
    free_module,
    graded_dim,
    hom_module,
    is_iso,
    invert_iso,
    kernel,
    pullback,
    tensor,
    tensor_map,
    tensor_power,
    unit_module,
    zero_module,
)
from .idal import Idal, cover_check, idal_product
from .localize import (
    HomChain,
    _canonical_stage_map,
    base_change_map,
    base_change_module,
    localized_ring,
    reflect,
)
from .polyring import Poly, PolyRing, QQ, RingHom, SubmoduleLifter, monomials_of_degree


def _rebind(m: ModuleMap, source: PresentedModule, target: PresentedModule) -> ModuleMap:
    """Reinterpret a matrix between equal-generator presentations; used where
    strict associativity/flattening makes presentations agree up to relation
    order."""
    if len(m.matrix) != target.gens or (m.matrix and len(m.matrix[0]) != source.gens):
        raise AlgebraError("rebind shape mismatch")
    return ModuleMap(source, target, m.matrix, check=False)


# ---------------------------------------------------------------------------
# schemes


class AffineOverlap:
    """Principal overlap data: U1 = A1[f1^-1], U2 = A2[f2^-1] and the ring
    isomorphism between them, given by variable images both ways."""

    def __init__(self, chart1: PolyRing, chart2: PolyRing, f1, f2,
                 inv1: str, inv2: str, to2_images: dict, to1_images: dict):
        self.f1 = chart1.poly(f1)
        self.f2 = chart2.poly(f2)
        self.inv1 = inv1
        self.inv2 = inv2
        self.U1, self.incl1, self.f1_inverse = localized_ring(chart1, self.f1, inv1)
        self.U2, self.incl2, self.f2_inverse = localized_ring(chart2, self.f2, inv2)
        self.to2 = RingHom(self.U1, self.U2, to2_images)
        self.to1 = RingHom(self.U2, self.U1, to1_images)
        for v in self.U1.variables:
            if self.to1.apply(self.to2.apply(self.U1.var(v))) != self.U1.var(v):
                raise AlgebraError(f"transition maps do not compose to the identity at {v}")
        for v in self.U2.variables:
            if self.to2.apply(self.to1.apply(self.U2.var(v))) != self.U2.var(v):
                raise AlgebraError(f"transition maps do not compose to the identity at {v}")
        self.chart2_to_U1 = self.to1.compose(self.incl2)

    @property
    def f2_image_in_U1(self) -> Poly:
        return self.chart2_to_U1.apply(self.f2)

    @property
    def f2_inverse_image_in_U1(self) -> Poly:
        return self.to1.apply(self.f2_inverse)

    @property
    def f1_image_in_U1(self) -> Poly:
        return self.incl1.apply(self.f1)


class TwoChartScheme:
    """Either two affine charts with an affine overlap, or one ring glued to
    itself along an idal."""

    def __init__(self, kind: str, chart1: PolyRing, chart2: PolyRing,
                 overlap: AffineOverlap | None = None, idal: Idal | None = None):
        if kind not in ("affine", "selfglue"):
            raise AlgebraError("scheme kind must be 'affine' or 'selfglue'")
        self.kind = kind
        self.chart1 = chart1
        self.chart2 = chart2
        self.overlap = overlap
        self.idal = idal
        if kind == "affine" and overlap is None:
            raise AlgebraError("affine scheme requires overlap data")
        if kind == "selfglue":
            if idal is None or chart1 != chart2:
                raise AlgebraError("selfglue scheme requires one ring and an idal")

    @staticmethod
    def affine(chart1: PolyRing, chart2: PolyRing, f1, f2, inv1, inv2,
               to2_images, to1_images) -> "TwoChartScheme":
        ov = AffineOverlap(chart1, chart2, f1, f2, inv1, inv2, to2_images, to1_images)
        return TwoChartScheme("affine", chart1, chart2, overlap=ov)

    @staticmethod
    def selfglue(ring: PolyRing, J: Idal) -> "TwoChartScheme":
        return TwoChartScheme("selfglue", ring, ring, idal=J)

    def __eq__(self, other):
        if not isinstance(other, TwoChartScheme) or self.kind != other.kind:
            return False
        if self.kind == "selfglue":
            return (self.chart1 == other.chart1
                    and self.idal.serialize() == other.idal.serialize())
        a, b = self.overlap, other.overlap
        return (self.chart1 == other.chart1 and self.chart2 == other.chart2
                and str(a.f1) == str(b.f1) and str(a.f2) == str(b.f2)
                and a.U1 == b.U1 and a.U2 == b.U2)

    def to_json(self):
        if self.kind == "selfglue":
            return {"kind": "selfglue", "ring": self.chart1.to_json(),
                    "idal": self.idal.serialize()}
        ov = self.overlap
        return {
            "kind": "affine",
            "chart1": self.chart1.to_json(), "chart2": self.chart2.to_json(),
            "f1": str(ov.f1), "f2": str(ov.f2),
            "inv1": ov.inv1, "inv2": ov.inv2,
            "to2": {v: str(ov.to2.images[v]) for v in ov.U1.variables},
            "to1": {v: str(ov.to1.images[v]) for v in ov.U2.variables},
        }


def p1_scheme() -> TwoChartScheme:
    """The projective line over QQ: charts QQ[t], QQ[s], overlap t = 1/s."""
    A1 = PolyRing(QQ, ["t"])
    A2 = PolyRing(QQ, ["s"])
    return TwoChartScheme.affine(
        A1, A2, "t", "s", "ti", "si",
        to2_images={"t": "si", "ti": "s"},
        to1_images={"s": "ti", "si": "t"},
    )


# ---------------------------------------------------------------------------
# glued modules


@dataclass
class SelfGlueTau:
    fwd_stage: int
    fwd: ModuleMap      # J^{(x)fwd_stage} (x) m1 -> m2
    bwd_stage: int
    bwd: ModuleMap      # J^{(x)bwd_stage} (x) m2 -> m1


class GluedModule:
    def __init__(self, scheme: TwoChartScheme, m1: PresentedModule,
                 m2: PresentedModule, tau, tau_inv=None, validate: bool = True):
        self.scheme = scheme
        self.m1 = m1
        self.m2 = m2
        if m1.ring != scheme.chart1 or m2.ring != scheme.chart2:
            raise RingMismatchError("chart pieces must live over the chart rings")
        if scheme.kind == "affine":
            ov = scheme.overlap
            self.m1_overlap = base_change_module(m1, ov.incl1)
            self.m2_overlap = base_change_module(m2, ov.chart2_to_U1)
            self.tau = self._as_overlap_map(tau, self.m2_overlap, self.m1_overlap)
            self.tau_inv = self._as_overlap_map(tau_inv, self.m1_overlap, self.m2_overlap)
            if validate:
                if not self.tau.compose(self.tau_inv).equals(ModuleMap.identity(self.m1_overlap)) \
                        or not self.tau_inv.compose(self.tau).equals(ModuleMap.identity(self.m2_overlap)):
                    raise TauNotInvertibleError("overlap maps are not mutually inverse")
        else:
            if not isinstance(tau, SelfGlueTau):
                raise AlgebraError("selfglue modules take a SelfGlueTau")
            self.tau = tau
            self.tau_inv = None
            if validate:
                self._validate_selfglue()

    def _as_overlap_map(self, data, source, target) -> ModuleMap:
        if data is None:
            raise TauNotInvertibleError("overlap data must include both directions")
        if isinstance(data, ModuleMap):
            data = data.matrix
        if data == [] or data == ():
            # convenient zero overlap for degenerate (zero-module) charts
            data = [[source.ring.zero()] * source.gens for _ in range(target.gens)]
        try:
            return ModuleMap(source, target, data, check=True)
        except WellDefinednessError as exc:
            raise TauNotWellDefinedError(str(exc)) from exc

    def _validate_selfglue(self):
        J = self.scheme.idal
        t = self.tau
        a, b = t.fwd_stage, t.bwd_stage
        # bwd . (J^b (x) fwd) must equal the collapse J^{a+b} (x) m1 -> m1
        left = t.bwd.compose(_rebind(
            tensor_map(ModuleMap.identity(J.carrier_power(b)), t.fwd),
            tensor(J.carrier_power(a + b), self.m1), t.bwd.source))
        collapse1 = _rebind(
            tensor_map(J.power_transition(a + b, 0), ModuleMap.identity(self.m1)),
            left.source, self.m1)
        if not left.equals(collapse1):
            raise TauNotInvertibleError("selfglue overlap elements are not mutually inverse")
        right = t.fwd.compose(_rebind(
            tensor_map(ModuleMap.identity(J.carrier_power(a)), t.bwd),
            tensor(J.carrier_power(a + b), self.m2), t.fwd.source))
        collapse2 = _rebind(
            tensor_map(J.power_transition(a + b, 0), ModuleMap.identity(self.m2)),
            right.source, self.m2)
        if not right.equals(collapse2):
            raise TauNotInvertibleError("selfglue overlap elements are not mutually inverse")

    def serialize(self):
        out = {"m1": self.m1.to_json(), "m2": self.m2.to_json()}
        if self.scheme.kind == "affine":
            out["tau"] = [[str(x) for x in row] for row in self.tau.matrix]
            out["tau_inv"] = [[str(x) for x in row] for row in self.tau_inv.matrix]
        else:
            out["tau"] = {
                "fwd_stage": self.tau.fwd_stage,
                "fwd": [[str(x) for x in row] for row in self.tau.fwd.matrix],
                "bwd_stage": self.tau.bwd_stage,
                "bwd": [[str(x) for x in row] for row in self.tau.bwd.matrix],
            }
        return out


def glue(m1: PresentedModule, m2: PresentedModule, tau_data, scheme: TwoChartScheme,
         tau_inv_data=None) -> GluedModule:
    """Validate overlap data and build the triple; raises
    TauNotWellDefinedError / TauNotInvertibleError on bad data."""
    return GluedModule(scheme, m1, m2, tau_data, tau_inv_data)


def o_glued(scheme: TwoChartScheme) -> GluedModule:
    O1 = unit_module(scheme.chart1)
    O2 = unit_module(scheme.chart2)
    if scheme.kind == "affine":
        one = [["1"]]
        return GluedModule(scheme, O1, O2, one, one)
    J = scheme.idal
    fwd = _rebind(tensor_map(J.power_transition(0, 0), ModuleMap.identity(O1)),
                  tensor(J.carrier_power(0), O1), O2)
    bwd = _rebind(fwd, tensor(J.carrier_power(0), O2), O1)
    return GluedModule(scheme, O1, O2, SelfGlueTau(0, fwd, 0, bwd))


class GluedMap:
    """A pair of chart maps compatible over the overlap."""

    def __init__(self, source: GluedModule, target: GluedModule,
                 c1: ModuleMap, c2: ModuleMap, validate: bool = True):
        if source.scheme != target.scheme:
            raise AlgebraError("glued map between different schemes")
        self.source = source
        self.target = target
        self.c1 = c1
        self.c2 = c2
        if validate and not self.is_compatible():
            raise WellDefinednessError("chart maps are not compatible over the overlap")

    def is_compatible(self) -> bool:
        G, H = self.source, self.target
        if G.scheme.kind == "affine":
            ov = G.scheme.overlap
            c1o = base_change_map(self.c1, ov.incl1, G.m1_overlap, H.m1_overlap)
            c2o = base_change_map(self.c2, ov.chart2_to_U1, G.m2_overlap, H.m2_overlap)
            return H.tau.compose(c2o).equals(c1o.compose(G.tau))
        J = G.scheme.idal
        a, b = G.tau.fwd_stage, H.tau.fwd_stage
        N = max(a, b)
        lhs = self.c2.compose(G.tau.fwd).compose(_rebind(
            tensor_map(J.power_transition(N, a), ModuleMap.identity(G.m1)),
            tensor(J.carrier_power(N), G.m1), G.tau.fwd.source))
        inner = _rebind(tensor_map(ModuleMap.identity(J.carrier_power(b)), self.c1),
                        tensor(J.carrier_power(b), G.m1), H.tau.fwd.source)
        rhs = H.tau.fwd.compose(inner).compose(_rebind(
            tensor_map(J.power_transition(N, b), ModuleMap.identity(G.m1)),
            tensor(J.carrier_power(N), G.m1), inner.source))
        return lhs.equals(rhs)

    def compose(self, other: "GluedMap") -> "GluedMap":
        return GluedMap(other.source, self.target,
                        self.c1.compose(other.c1), self.c2.compose(other.c2),
                        validate=False)

    def equals(self, other: "GluedMap") -> bool:
        return self.c1.equals(other.c1) and self.c2.equals(other.c2)

    @staticmethod
    def identity(G: GluedModule) -> "GluedMap":
        return GluedMap(G, G, ModuleMap.identity(G.m1), ModuleMap.identity(G.m2),
                        validate=False)

    def is_chartwise_surjective(self) -> bool:
        C1, _ = cokernel(self.c1)
        C2, _ = cokernel(self.c2)
        return C1.is_zero_module() and C2.is_zero_module()


def direct_sum_glued(summands):
    """(G, inclusions) of a finite direct sum of glued modules."""
    if not summands:
        raise AlgebraError("empty direct sum")
    scheme = summands[0].scheme
    S1, incls1, _ = direct_sum([g.m1 for g in summands])
    S2, incls2, _ = direct_sum([g.m2 for g in summands])
    if scheme.kind == "affine":
        n1 = sum(g.m1_overlap.gens for g in summands)
        n2 = sum(g.m2_overlap.gens for g in summands)
        U1 = scheme.overlap.U1
        zero = U1.zero()
        tau_rows = [[zero] * n2 for _ in range(n1)]
        tinv_rows = [[zero] * n1 for _ in range(n2)]
        r_off = c_off = 0
        for g in summands:
            for i in range(g.m1_overlap.gens):
                for j in range(g.m2_overlap.gens):
                    tau_rows[r_off + i][c_off + j] = g.tau.matrix[i][j]
                    tinv_rows[c_off + j][r_off + i] = g.tau_inv.matrix[j][i]
            r_off += g.m1_overlap.gens
            c_off += g.m2_overlap.gens
        G = GluedModule(scheme, S1, S2, tau_rows, tinv_rows, validate=False)
    else:
        J = scheme.idal
        a = max(g.tau.fwd_stage for g in summands)
        b = max(g.tau.bwd_stage for g in summands)
        fwd = _blockdiag_selfglue(scheme, [g.m1 for g in summands], [g.m2 for g in summands],
                                  [(g.tau.fwd_stage, g.tau.fwd) for g in summands], a, S1, S2)
        bwd = _blockdiag_selfglue(scheme, [g.m2 for g in summands], [g.m1 for g in summands],
                                  [(g.tau.bwd_stage, g.tau.bwd) for g in summands], b, S2, S1)
        G = GluedModule(scheme, S1, S2, SelfGlueTau(a, fwd, b, bwd), validate=False)
    incls = []
    for k, g in enumerate(summands):
        incls.append(GluedMap(g, G, incls1[k], incls2[k], validate=False))
    return G, incls


def _blockdiag_selfglue(scheme, sources, targets, staged_maps, N, S_src, S_tgt) -> ModuleMap:
    """Block diagonal of Deligne elements, each pushed to the common stage N."""
    J = scheme.idal
    ring = scheme.chart1
    src = tensor(J.carrier_power(N), S_src)
    zero = ring.zero()
    matrix = [[zero] * src.gens for _ in range(S_tgt.gens)]
    gN = J.carrier_power(N).gens
    src_off = 0
    tgt_off = 0
    for (stage, m), piece_src, piece_tgt in zip(staged_maps, sources, targets):
        pushed = m.compose(_rebind(
            tensor_map(J.power_transition(N, stage), ModuleMap.identity(piece_src)),
            tensor(J.carrier_power(N), piece_src), m.source))
        for r in range(piece_tgt.gens):
            for t in range(gN):
                for j in range(piece_src.gens):
                    matrix[tgt_off + r][t * S_src.gens + (src_off + j)] = \
                        pushed.matrix[r][t * piece_src.gens + j]
        src_off += piece_src.gens
        tgt_off += piece_tgt.gens
    return ModuleMap(src, S_tgt, matrix, check=False)


# ---------------------------------------------------------------------------
# tensor and hom of glued modules


def tensor_glued(G: GluedModule, H: GluedModule) -> GluedModule:
    if G.scheme != H.scheme:
        raise AlgebraError("tensor of glued modules on different schemes")
    scheme = G.scheme
    T1 = tensor(G.m1, H.m1)
    T2 = tensor(G.m2, H.m2)
    if scheme.kind == "affine":
        tau = tensor_map(G.tau, H.tau)
        tau_inv = tensor_map(G.tau_inv, H.tau_inv)
        return GluedModule(scheme, T1, T2, tau.matrix, tau_inv.matrix, validate=False)
    J = scheme.idal
    fwd = _selfglue_tensor_element(scheme, G.tau.fwd_stage, G.tau.fwd, G.m1, G.m2,
                                   H.tau.fwd_stage, H.tau.fwd, H.m1, H.m2)
    bwd = _selfglue_tensor_element(scheme, G.tau.bwd_stage, G.tau.bwd, G.m2, G.m1,
                                   H.tau.bwd_stage, H.tau.bwd, H.m2, H.m1)
    return GluedModule(scheme, T1, T2,
                       SelfGlueTau(G.tau.fwd_stage + H.tau.fwd_stage, fwd,
                                   G.tau.bwd_stage + H.tau.bwd_stage, bwd),
                       validate=False)


def _selfglue_tensor_element(scheme, a, fwd_a, Ma, Na, b, fwd_b, Mb, Nb) -> ModuleMap:
    """J^{a+b} (x) (Ma (x) Mb) -> Na (x) Nb from elements at stages a and b."""
    from .fpmod import tensor_permutation

    J = scheme.idal
    factors = [J.carrier] * (a + b) + [Ma, Mb]
    perm = list(range(a)) + [a + b] + list(range(a, a + b)) + [a + b + 1]
    shuffle = tensor_permutation(factors, perm)
    paired = tensor_map(fwd_a, fwd_b)
    src = tensor(J.carrier_power(a + b), tensor(Ma, Mb))
    mid_src = tensor(fwd_a.source, fwd_b.source)
    composite = _rebind(paired, mid_src, tensor(Na, Nb)).compose(
        _rebind(shuffle, src, mid_src))
    return composite


def hom_glued(G: GluedModule, H: GluedModule, n_max: int = 8) -> GluedModule:
    """Chartwise hom modules glued by the conjugation tau_H . (-) . tau_G^{-1}."""
    if G.scheme != H.scheme:
        raise AlgebraError("hom of glued modules on different schemes")
    scheme = G.scheme
    hom1 = hom_module(G.m1, H.m1)
    hom2 = hom_module(G.m2, H.m2)
    if scheme.kind == "affine":
        ov = scheme.overlap
        tau = _hom_overlap_map(G, H, hom2, hom1, ov.chart2_to_U1, ov.incl1,
                               direction_fwd=True)
        tau_inv = _hom_overlap_map(G, H, hom1, hom2, ov.incl1, ov.chart2_to_U1,
                                   direction_fwd=False)
        return GluedModule(scheme, hom1.module, hom2.module, tau, tau_inv)
    return _hom_glued_selfglue(G, H, hom1, hom2, n_max)


def _hom_overlap_map(G, H, hom_src, hom_tgt, hom_src_hom: RingHom, hom_tgt_hom: RingHom,
                     direction_fwd: bool):
    """Matrix of the conjugation between base-changed hom modules over U1."""
    src_mod = base_change_module(hom_src.module, hom_src_hom)
    tgt_mod = base_change_module(hom_tgt.module, hom_tgt_hom)
    if direction_fwd:
        # hom2 @ U1 -> hom1 @ U1 : phi |-> tau_H . phi . tau_G^{-1}
        pre, post = G.tau_inv, H.tau
        src_source, src_target = G.m2_overlap, H.m2_overlap
        tgt_source, tgt_target = G.m1_overlap, H.m1_overlap
        carry = lambda k: base_change_map(hom_src.generator_map(k),
                                          G.scheme.overlap.chart2_to_U1,
                                          src_source, src_target)
    else:
        pre, post = G.tau, H.tau_inv
        src_source, src_target = G.m1_overlap, H.m1_overlap
        tgt_source, tgt_target = G.m2_overlap, H.m2_overlap
        carry = lambda k: base_change_map(hom_src.generator_map(k),
                                          G.scheme.overlap.incl1,
                                          src_source, src_target)
    incl_bc = base_change_map(hom_tgt.incl, hom_tgt_hom, tgt_mod,
                              base_change_module(hom_tgt.ambient, hom_tgt_hom))
    ring = tgt_mod.ring
    cols = [_column_vec(incl_bc.column(k)) for k in range(tgt_mod.gens)]
    cols += [_column_vec(c) for c in incl_bc.target.relations]
    lifter = SubmoduleLifter(ring, cols, incl_bc.target.gens)
    matrix = [[ring.zero()] * src_mod.gens for _ in range(tgt_mod.gens)]
    for k in range(src_mod.gens):
        conj = post.compose(carry(k)).compose(pre)
        flat = tuple(conj.matrix[r][i]
                     for i in range(tgt_source.gens) for r in range(tgt_target.gens))
        cof = lifter.lift(_column_vec(flat))
        if cof is None:
            raise AlgebraError("hom base change failed to lift (overlap hom mismatch)")
        for r in range(tgt_mod.gens):
            matrix[r][k] = Poly(ring, ring.reduce_terms(cof[r]))
    return matrix


def _hom_glued_selfglue(G, H, hom1, hom2, n_max: int) -> GluedModule:
    J = G.scheme.idal
    fwd = _conjugate_hom_element(J, hom1, hom2, G.m2, H.m2,
                                 G.tau.bwd, G.tau.bwd_stage,
                                 H.tau.fwd, H.tau.fwd_stage)
    bwd = _conjugate_hom_element(J, hom2, hom1, G.m1, H.m1,
                                 G.tau.fwd, G.tau.fwd_stage,
                                 H.tau.bwd, H.tau.bwd_stage)
    return GluedModule(G.scheme, hom1.module, hom2.module,
                       SelfGlueTau(G.tau.bwd_stage + H.tau.fwd_stage, fwd,
                                   G.tau.fwd_stage + H.tau.bwd_stage, bwd),
                       validate=False)


def _conjugate_hom_element(J: Idal, hom_src, hom_tgt, A: PresentedModule,
                           D: PresentedModule, pre: ModuleMap, p: int,
                           post: ModuleMap, q: int) -> ModuleMap:
    """J^{(x)(p+q)} (x) Hom(B, C) -> Hom(A, D) sending t (x) h to the slice of
    post . (id (x) (h . pre)) at t, where pre : J^p (x) A -> B and
    post : J^q (x) C -> D."""
    c = p + q
    ring = A.ring
    src = tensor(J.carrier_power(c), hom_src.module)
    zero = ring.zero()
    matrix = [[zero] * src.gens for _ in range(hom_tgt.module.gens)]
    gC = J.carrier_power(c).gens
    for k in range(hom_src.module.gens):
        h = hom_src.generator_map(k)
        step = h.compose(pre)         # J^p (x) A -> C
        inner = tensor_map(ModuleMap.identity(J.carrier_power(q)), step)
        lifted = post.compose(_rebind(inner, inner.source, post.source))
        full = _rebind(lifted, tensor(J.carrier_power(c), A), lifted.target)
        for t in range(gC):
            sub = [[full.matrix[r][t * A.gens + j] for j in range(A.gens)]
                   for r in range(D.gens)]
            phi = ModuleMap(A, D, sub, check=False)
            coords = hom_tgt.express(phi)
            for r in range(hom_tgt.module.gens):
                matrix[r][t * hom_src.module.gens + k] = coords[r]
    return ModuleMap(src, hom_tgt.module, matrix, check=False)


# ---------------------------------------------------------------------------
# global sections


@dataclass
class SectionsResult:
    kind: str                      # "affine" or "selfglue"
    total: int | None              # window dimension (affine)
    by_degree: dict | None         # overlap-degree table when gradings allow
    module: PresentedModule | None # the sections module (selfglue)


def _window_candidates(M: PresentedModule, bound: int):
    """(generator, monomial, degree) triples spanning the window |deg| <= bound."""
    shifts = M.grading if M.grading is not None else (0,) * M.gens
    out = []
    for i in range(M.gens):
        for d in range(-bound, bound + 1):
            for m in monomials_of_degree(M.ring, d - shifts[i]):
                out.append((i, m, d))
    return out


def _coords_rows(module: PresentedModule, columns):
    """Dense NF coordinates of columns modulo the module's relations."""
    reduced = [module.reduce_vec(_column_vec(c)) for c in columns]
    support = sorted({k for r in reduced for k in r})
    field = module.ring.field
    zero = field.zero()
    rows = [[r.get(k, zero) for k in support] for r in reduced]
    return rows, support


def _self_rank(module: PresentedModule, columns) -> int:
    rows, _ = _coords_rows(module, columns)
    return linalg.rank(rows, module.ring.field) if rows and rows[0] else 0


def global_sections(G: GluedModule, degree_bound: int = 6, n_max: int = 8) -> SectionsResult:
    """Sections of a glued module.

    Affine: the equalizer of windowed chart sections inside the overlap,
    by exact linear algebra on monomials of bounded weighted degree.
    SelfGlue: the pullback of the two units over the stabilized reflector
    value (an error if the chain does not stabilize within n_max).
    """
    if G.scheme.kind == "selfglue":
        return _selfglue_sections(G, degree_bound, n_max)
    ov = G.scheme.overlap
    m1, m2 = G.m1, G.m2
    cands1 = _window_candidates(m1, degree_bound)
    cands2 = _window_candidates(m2, degree_bound)
    cols1, cols2 = [], []
    for i, m, _ in cands1:
        p = ov.incl1.apply(m1.ring.monomial(m))
        col = [ov.U1.zero()] * m1.gens
        col[i] = p
        cols1.append(tuple(col))
    for i, m, _ in cands2:
        p = ov.chart2_to_U1.apply(m2.ring.monomial(m))
        col = [ov.U1.zero()] * m2.gens
        col[i] = p
        cols2.append(tuple(G.tau.apply_column(tuple(col))))
    null1 = len(cands1) - _self_rank(m1, [c for c in _module_candidate_columns(m1, cands1)])
    null2 = len(cands2) - _self_rank(m2, [c for c in _module_candidate_columns(m2, cands2)])
    all_cols = cols1 + cols2
    rows, _ = _coords_rows(G.m1_overlap, all_cols)
    ncands = len(all_cols)
    rk = linalg.rank(rows, ov.U1.field) if rows and rows[0] else 0
    total = ncands - rk - null1 - null2
    by_degree = _sections_degree_table(G, cands1, cands2, cols1, cols2, degree_bound)
    return SectionsResult("affine", total, by_degree, None)


def _module_candidate_columns(M: PresentedModule, cands):
    cols = []
    for i, m, _ in cands:
        col = [M.ring.zero()] * M.gens
        col[i] = M.ring.monomial(m)
        cols.append(tuple(col))
    return cols


def _sections_degree_table(G, cands1, cands2, cols1, cols2, bound):
    """Per-overlap-degree dimensions when everything in sight is graded."""
    mov = G.m1_overlap
    if mov.grading is None or G.m1.grading is None or G.m2.grading is None:
        return None
    def col_deg(col):
        return column_degree(mov.ring, col, mov.grading)
    groups: dict = {}
    for (cand, col, side) in [(c, col, 0) for c, col in zip(cands1, cols1)] + \
                             [(c, col, 1) for c, col in zip(cands2, cols2)]:
        d = col_deg(col)
        if d is None:
            return None
        if d == "zero":
            # degenerate candidate: group by its nominal chart degree
            d = cand[2]
        groups.setdefault(d, {0: ([], []), 1: ([], [])})
        groups[d][side][0].append(cand)
        groups[d][side][1].append(col)
    table = {}
    for d in sorted(groups):
        c1, l1 = groups[d][0]
        c2, l2 = groups[d][1]
        n1 = len(c1) - _self_rank(G.m1, _module_candidate_columns(G.m1, c1)) if c1 else 0
        n2 = len(c2) - _self_rank(G.m2, _module_candidate_columns(G.m2, c2)) if c2 else 0
        rows, _ = _coords_rows(mov, l1 + l2)
        rk = linalg.rank(rows, mov.ring.field) if rows and rows[0] else 0
        dim = len(l1) + len(l2) - rk - n1 - n2
        if dim:
            table[d] = dim
    return table


def _push_stage_element(chain: HomChain, vecmap: ModuleMap, idx_from: int,
                        idx_to: int) -> ModuleMap:
    """Push a map M -> stage(idx_from).module to stage idx_to (inverting the
    stabilized transitions when pushing down)."""
    m = vecmap
    idx = idx_from
    while idx < idx_to:
        m = chain.transition(idx).compose(m)
        idx += 1
    if idx > idx_to:
        comp = None
        for k in range(idx_to, idx):
            t = chain.transition(k)
            comp = t if comp is None else t.compose(comp)
        m = invert_iso(comp).compose(m)
    return m


def _selfglue_reflect_value(J: Idal, M: PresentedModule, n_max: int):
    r = reflect(J, M, n_max)
    if r.chain.stabilized_at is None:
        raise StabilizationError(
            "selfglue overlap chain did not stabilize within n_max "
            f"= {n_max}; increase the bound")
    if r.chain.saturated:
        raise StabilizationError(
            "selfglue sections require an unsaturated stabilization")
    return r


def induced_on_reflections(J: Idal, fwd: ModuleMap, stage_a: int,
                           r_src, r_tgt, chain_src: HomChain,
                           chain_tgt: HomChain) -> ModuleMap:
    """The map R(m_src) -> R(m_tgt) induced by a Deligne element
    fwd : J^{(x)a} (x) m_src -> m_tgt (a plain map at stage 0)."""
    n_src = r_src.chain.stabilized_at
    n_tgt = r_tgt.chain.stabilized_at
    hom_src = chain_src.stage(n_src)
    hom_big = chain_tgt.stage(n_src + stage_a)
    ring = J.ring
    cols = []
    for k in range(hom_src.module.gens):
        psi = hom_src.generator_map(k)     # J^{n_src} (x) O -> m_src
        inner = tensor_map(ModuleMap.identity(J.carrier_power(stage_a)), psi)
        step = fwd.compose(_rebind(inner, inner.source, fwd.source))
        chi = _rebind(step, hom_big.source, step.target)
        cols.append(hom_big.express(chi))
    matrix = [[cols[k][r] for k in range(hom_src.module.gens)]
              for r in range(hom_big.module.gens)]
    to_big = ModuleMap(hom_src.module, hom_big.module, matrix, check=False)
    pushed = _push_stage_element(chain_tgt, to_big, n_src + stage_a, n_tgt)
    return ModuleMap(r_src.value, r_tgt.value, pushed.matrix, check=False)


def _selfglue_sections(G: GluedModule, degree_bound: int, n_max: int) -> SectionsResult:
    J = G.scheme.idal
    ra = reflect(J, G.m1, n_max)
    rb = reflect(J, G.m2, n_max)
    if (ra.stabilized and rb.stabilized
            and ra.value.is_zero_module() and rb.value.is_zero_module()):
        # both pieces die on the overlap: sections are the plain direct sum
        S, _, _ = direct_sum([G.m1, G.m2])
        table = None
        if S.grading is not None:
            table = {d: graded_dim(S, d) for d in range(-degree_bound, degree_bound + 1)}
            table = {d: v for d, v in table.items() if v}
        return SectionsResult("selfglue", None, table, S)
    r1 = _selfglue_reflect_value(J, G.m1, n_max)
    r2 = _selfglue_reflect_value(J, G.m2, n_max)
    chain1 = HomChain(J, unit_module(J.ring), G.m1)
    chain2 = HomChain(J, unit_module(J.ring), G.m2)
    tau_hat_inv = induced_on_reflections(J, G.tau.bwd, G.tau.bwd_stage,
                                         r2, r1, chain2, chain1)
    b = tau_hat_inv.compose(r2.unit)
    P, p1, p2 = pullback(r1.unit, b)
    by_degree = None
    if P.grading is not None:
        try:
            by_degree = {d: graded_dim(P, d) for d in range(-degree_bound, degree_bound + 1)}
            by_degree = {d: v for d, v in by_degree.items() if v}
        except UngradedError:
            by_degree = None
    return SectionsResult("selfglue", None, by_degree, P)


# ---------------------------------------------------------------------------
# invertibility and duals


def _free_rank_one_witness(M: PresentedModule):
    """An iso O -> M if the module is visibly free of rank one, else None."""
    ring = M.ring
    O = unit_module(ring)
    if M.gens == 0:
        return None
    if M.gens == 1 and not M.relations:
        return ModuleMap(O, M, [["1"]], check=False)
    candidates = []
    for k in range(M.gens):
        col = [ring.zero()] * M.gens
        col[k] = ring.one()
        candidates.append(col)
    candidates.append([ring.one()] * M.gens)
    for col in candidates:
        m = ModuleMap(O, M, [[c] for c in col], check=False)
        if is_iso(m):
            return m
    return None


def invertible_check(G: GluedModule) -> bool:
    """Chart pieces free of rank 1; when they are, an inverse triple is
    constructed and verified (see inverse_of)."""
    w1 = _free_rank_one_witness(G.m1)
    w2 = _free_rank_one_witness(G.m2)
    if w1 is None or w2 is None:
        return False
    try:
        inverse_of(G)
    except AlgebraError:
        return False
    return True


def _unit_scalar_inverse(ring: PolyRing, u: Poly) -> Poly:
    lifter = SubmoduleLifter(ring, [{(0, e): c for e, c in u.terms.items()}], 1)
    cof = lifter.lift({(0, (0,) * ring.nvars): ring.field.one()})
    if cof is None:
        raise AlgebraError("overlap scalar is not a unit")
    return Poly(ring, ring.reduce_terms(cof[0]))


def inverse_of(G: GluedModule) -> GluedModule:
    """An explicit inverse triple for a line-bundle-like glued module."""
    w1 = _free_rank_one_witness(G.m1)
    w2 = _free_rank_one_witness(G.m2)
    if w1 is None or w2 is None:
        raise AlgebraError("chart pieces are not free of rank 1")
    scheme = G.scheme
    if scheme.kind == "affine":
        ov = scheme.overlap
        w1o = base_change_map(w1, ov.incl1, unit_module(ov.U1), G.m1_overlap)
        w2o = base_change_map(w2, ov.chart2_to_U1, unit_module(ov.U1), G.m2_overlap)
        u = invert_iso(w1o).compose(G.tau).compose(w2o).matrix[0][0]
        uinv = _unit_scalar_inverse(ov.U1, u)
        inv = GluedModule(scheme, unit_module(scheme.chart1), unit_module(scheme.chart2),
                          [[uinv]], [[u]])
        _verify_inverse(G, inv)
        return inv
    raise AlgebraError("inverse construction implemented for affine overlaps")


def _verify_inverse(G: GluedModule, inv: GluedModule):
    T = tensor_glued(G, inv)
    O = o_glued(G.scheme)
    w1 = _free_rank_one_witness(T.m1)
    w2 = _free_rank_one_witness(T.m2)
    if w1 is None or w2 is None:
        raise AlgebraError("tensor with candidate inverse is not rank-1 free")
    iso = GluedMap(O, T, w1, w2)   # validates overlap compatibility
    if not (is_iso(iso.c1) and is_iso(iso.c2)):
        raise AlgebraError("candidate inverse failed verification")


def dualizable_check(G: GluedModule, dual: GluedModule, unit_map: GluedMap,
                     counit_map: GluedMap) -> bool:
    """Verify the two triangle identities chartwise.

    unit_map : O -> G (x) dual, counit_map : dual (x) G -> O.
    """
    for pick in (1, 2):
        g = G.m1 if pick == 1 else G.m2
        d = dual.m1 if pick == 1 else dual.m2
        unit_c = unit_map.c1 if pick == 1 else unit_map.c2
        counit_c = counit_map.c1 if pick == 1 else counit_map.c2
        idg = ModuleMap.identity(g)
        idd = ModuleMap.identity(d)
        # (id_g (x) counit) . (unit (x) id_g) == id_g
        left = tensor_map(unit_c, idg)
        left = _rebind(left, g, left.target)          # O (x) g == g
        mid = tensor_map(idg, counit_c)
        mid = _rebind(mid, left.target, g)            # g (x) O == g
        if not mid.compose(left).equals(idg):
            return False
        # (counit (x) id_d) . (id_d (x) unit) == id_d
        left2 = tensor_map(idd, unit_c)
        left2 = _rebind(left2, d, left2.target)
        mid2 = tensor_map(counit_c, idd)
        mid2 = _rebind(mid2, left2.target, d)
        if not mid2.compose(left2).equals(idd):
            return False
    return True


def symtrivial_check_glued(G: GluedModule) -> bool:
    """Symtriviality tested chartwise, per the locality of the property."""
    from .fpmod import symtrivial_check

    return symtrivial_check(G.m1) and symtrivial_check(G.m2)


def standard_dual_datum(G: GluedModule):
    """(dual, unit, counit) for a glued module with free rank-1 pieces."""
    inv = inverse_of(G)
    O = o_glued(G.scheme)
    T = tensor_glued(G, inv)
    w1 = _free_rank_one_witness(T.m1)
    w2 = _free_rank_one_witness(T.m2)
    unit_map = GluedMap(O, T, w1, w2)
    Tc = tensor_glued(inv, G)
    v1 = invert_iso(_free_rank_one_witness(Tc.m1))
    v2 = invert_iso(_free_rank_one_witness(Tc.m2))
    counit_map = GluedMap(Tc, O, v1, v2)
    return inv, unit_map, counit_map


# ---------------------------------------------------------------------------
# the glue round trip


@dataclass
class RoundtripResult:
    ok: bool
    mode: str            # "exact" or "windowed"
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _rho_matrix(I: Idal, J: Idal, N: int, use_first: bool):
    """(I (x) J)^{(x)N} -> I^{(x)N} (use_first) or -> J^{(x)N}."""
    ring = I.ring
    gI, gJ = I.carrier.gens, J.carrier.gens
    prod = idal_product(I, J)
    src = prod.carrier_power(N)
    tgt = (I if use_first else J).carrier_power(N)
    zero = ring.zero()
    matrix = [[zero] * src.gens for _ in range(max(tgt.gens, 1))]
    import itertools
    for idx in itertools.product(range(gI * gJ), repeat=N):
        col = 0
        for p in idx:
            col = col * (gI * gJ) + p
        coeff = ring.one()
        row = 0
        for p in idx:
            i, j = divmod(p, gJ)
            if use_first:
                coeff = coeff * J.e.matrix[0][j]
                row = row * gI + i
            else:
                coeff = coeff * I.e.matrix[0][i]
                row = row * gJ + j
        matrix[row][col] = matrix[row][col] + coeff
    return ModuleMap(src, tgt, matrix[:tgt.gens] if tgt.gens else [], check=False)


def _saturated_stage(chain: HomChain, n: int, budget: int):
    from .localize import _saturated_kernel

    ker = _saturated_kernel(chain, n, budget)
    if ker is None:
        raise StabilizationError("saturation did not settle at the common stage")
    base = chain.stage(n).module
    if not ker:
        return base
    return PresentedModule(base.ring, base.gens, list(base.relations) + list(ker), None)


def roundtrip_check(A: PolyRing, I: Idal, J: Idal, M: PresentedModule,
                    n_max: int = 8, degree_bound: int = 6) -> RoundtripResult:
    """Whether M -> R_I(M) x_{R_{I(x)J}(M)} R_J(M) is an isomorphism.

    Exact when all three reflectors stabilize; otherwise decided by windowed
    dimension comparison against the principal-localization oracles.
    """
    if not cover_check(I, J):
        raise AlgebraError("cover check fails: the idals do not cover")
    IJ = idal_product(I, J)
    rI = reflect(I, M, n_max)
    rJ = reflect(J, M, n_max)
    rIJ = reflect(IJ, M, n_max)
    if rI.stabilized and rJ.stabilized and rIJ.stabilized:
        return _roundtrip_exact(A, I, J, IJ, M, rI, rJ, rIJ, n_max)
    return _roundtrip_windowed(A, I, J, M, degree_bound)


def _roundtrip_exact(A, I, J, IJ, M, rI, rJ, rIJ, n_max) -> RoundtripResult:
    O = unit_module(A)
    chainI, chainJ, chainIJ = HomChain(I, O, M), HomChain(J, O, M), HomChain(IJ, O, M)
    N = max(rI.chain.stabilized_at, rJ.chain.stabilized_at, rIJ.chain.stabilized_at)
    budget = max(2, n_max - N)
    VI = _saturated_stage(chainI, N, budget)
    VJ = _saturated_stage(chainJ, N, budget)
    VIJ = _saturated_stage(chainIJ, N, budget)

    def unit_to(chain, V, idal_obj):
        hom = chain.stage(N)
        u = _canonical_stage_map(idal_obj, M, hom, N)
        return ModuleMap(M, V, u.matrix, check=False)

    uI, uJ, uIJ = unit_to(chainI, VI, I), unit_to(chainJ, VJ, J), unit_to(chainIJ, VIJ, IJ)

    def comparison(chain_side, V_side, use_first):
        rho = _rho_matrix(I, J, N, use_first)
        hom_side = chain_side.stage(N)
        hom_prod = chainIJ.stage(N)
        cols = []
        for k in range(hom_side.module.gens):
            psi = hom_side.generator_map(k)
            chi = psi.compose(_rebind(
                tensor_map(rho, ModuleMap.identity(O)),
                hom_prod.source, psi.source))
            cols.append(hom_prod.express(chi))
        matrix = [[cols[k][r] for k in range(hom_side.module.gens)]
                  for r in range(hom_prod.module.gens)]
        return ModuleMap(V_side, VIJ, matrix, check=False)

    a = comparison(chainI, VI, True)
    b = comparison(chainJ, VJ, False)
    if not a.compose(uI).equals(uIJ) or not b.compose(uJ).equals(uIJ):
        raise AlgebraError("internal: comparison maps do not commute with units")
    P, p1, p2 = pullback(a, b)
    S, incls, _ = direct_sum([VI, VJ])
    stacked = [[uI.matrix[i][j] for j in range(M.gens)] for i in range(VI.gens)] + \
              [[uJ.matrix[i][j] for j in range(M.gens)] for i in range(VJ.gens)]
    # lift the stacked unit through the pullback inclusion
    incl_cols = []
    for k in range(P.gens):
        col = [A.zero()] * S.gens
        for i in range(VI.gens):
            col[i] = p1.matrix[i][k]
        for i in range(VJ.gens):
            col[VI.gens + i] = p2.matrix[i][k]
        incl_cols.append(tuple(col))
    lifter = SubmoduleLifter(A, [_column_vec(c) for c in incl_cols]
                             + [_column_vec(c) for c in S.relations], S.gens)
    matrix = [[A.zero()] * M.gens for _ in range(P.gens)]
    for j in range(M.gens):
        target_col = tuple(stacked[i][j] for i in range(S.gens))
        cof = lifter.lift(_column_vec(target_col))
        if cof is None:
            return RoundtripResult(False, "exact",
                                   {"reason": "unit does not factor through the pullback"})
        for k in range(P.gens):
            matrix[k][j] = Poly(A, A.reduce_terms(cof[k]))
    phi = ModuleMap(M, P, matrix, check=False)
    ok = is_iso(phi)
    return RoundtripResult(ok, "exact", {"common_stage": N})


def _principal_generator(I: Idal):
    if I.carrier.gens == 1 and not I.carrier.relations:
        return I.e.matrix[0][0]
    return None


def _roundtrip_windowed(A, I, J, M, bound) -> RoundtripResult:
    f = _principal_generator(I)
    g = _principal_generator(J)
    if f is None or g is None:
        raise StabilizationError(
            "windowed roundtrip requires principal idals when reflectors truncate")
    Bf, hf, _ = localized_ring(A, f, "locf")
    Bg, hg, _ = localized_ring(A, g, "locg")
    Bfg, hfg_from_f, _ = localized_ring(Bf, hf.apply(g), "locg")
    Mf = base_change_module(M, hf)
    Mg = base_change_module(M, hg)
    Mfg = base_change_module(Mf, hfg_from_f)
    to_fg_from_f = hfg_from_f
    to_fg_from_g = RingHom(Bg, Bfg, {**{v: v for v in A.variables}, "locg": "locg"})

    candsM = _window_candidates(M, bound)
    candsF = _window_candidates(Mf, bound)
    candsG = _window_candidates(Mg, bound)

    def cand_columns(module, cands):
        return _module_candidate_columns(module, cands)

    colsM = cand_columns(M, candsM)
    colsF = cand_columns(Mf, candsF)
    colsG = cand_columns(Mg, candsG)

    nullM = len(colsM) - _self_rank(M, colsM)
    nullF = len(colsF) - _self_rank(Mf, colsF)
    nullG = len(colsG) - _self_rank(Mg, colsG)

    # dimension of the windowed pullback inside Mf (+) Mg
    fg_cols = [tuple(to_fg_from_f.apply(p) for p in c) for c in colsF] + \
              [tuple(to_fg_from_g.apply(p) for p in c) for c in colsG]
    rows, _ = _coords_rows(Mfg, fg_cols)
    rk = linalg.rank(rows, A.field) if rows and rows[0] else 0
    dimW = len(fg_cols) - rk - nullF - nullG

    # rank and injectivity of the windowed image of M in Mf (+) Mg
    rowsF, _ = _coords_rows(Mf, [tuple(hf.apply(p) for p in c) for c in colsM])
    rowsG, _ = _coords_rows(Mg, [tuple(hg.apply(p) for p in c) for c in colsM])
    joined = [rf + rg for rf, rg in zip(rowsF, rowsG)] if colsM else []
    rk_img = linalg.rank(joined, A.field) if joined and joined[0] else 0
    injective = (len(colsM) - rk_img) == nullM
    ok = injective and (rk_img == dimW)
    return RoundtripResult(ok, "windowed",
                           {"window_dim_pullback": dimW, "window_rank_image": rk_img,
                            "injective_on_window": injective})


# ---------------------------------------------------------------------------
# chart idals and idal generation


def chart_idal(scheme: TwoChartScheme, which: int, power: int = 1):
    """(L, e) with L the glued module of the chart idal (to the given tensor
    power) and e : L -> O_glued its structure map."""
    O = o_glued(scheme)
    if scheme.kind == "affine":
        ov = scheme.overlap
        O1, O2 = unit_module(scheme.chart1), unit_module(scheme.chart2)
        if which == 1:
            h = ov.f2_image_in_U1
            hinv = ov.f2_inverse_image_in_U1
            tau = [[h ** power]]
            tau_inv = [[hinv ** power]]
            L = GluedModule(scheme, O1, O2, tau, tau_inv)
            e = GluedMap(L, O, ModuleMap.identity(O1),
                         ModuleMap(O2, O2, [[ov.f2 ** power]], check=False))
        elif which == 2:
            h = ov.f1_image_in_U1
            hinv = ov.to1.apply(ov.to2.apply(ov.f1_inverse))
            tau = [[hinv ** power]]
            tau_inv = [[h ** power]]
            L = GluedModule(scheme, O1, O2, tau, tau_inv)
            e = GluedMap(L, O, ModuleMap(O1, O1, [[ov.f1 ** power]], check=False),
                         ModuleMap.identity(O2))
        else:
            raise AlgebraError("chart index must be 1 or 2")
        return L, e
    J = scheme.idal
    ring = scheme.chart1
    O1 = unit_module(ring)
    Jc = J.carrier_power(power)
    if which == 1:
        # trivial on chart 1, J^power on chart 2
        fwd = _rebind(ModuleMap.identity(tensor(Jc, O1)),
                      tensor(Jc, O1), Jc)
        bwd = _rebind(tensor_map(J.power_transition(2 * power, 0), ModuleMap.identity(O1)),
                      tensor(Jc, Jc), O1)
        L = GluedModule(scheme, O1, Jc, SelfGlueTau(power, fwd, power, bwd))
        e = GluedMap(L, O, ModuleMap.identity(O1),
                     ModuleMap(Jc, O1, J.power_map(power).matrix, check=False))
    elif which == 2:
        fwd = _rebind(tensor_map(J.power_transition(2 * power, 0), ModuleMap.identity(O1)),
                      tensor(Jc, Jc), O1)
        bwd = _rebind(ModuleMap.identity(tensor(Jc, O1)), tensor(Jc, O1), Jc)
        L = GluedModule(scheme, Jc, O1, SelfGlueTau(power, fwd, power, bwd))
        e = GluedMap(L, O, ModuleMap(Jc, O1, J.power_map(power).matrix, check=False),
                     ModuleMap.identity(O1))
    else:
        raise AlgebraError("chart index must be 1 or 2")
    return L, e


@dataclass
class GenerationBlock:
    chart: int
    power: int
    map: GluedMap


@dataclass
class GenerationResult:
    blocks: list
    source: GluedModule
    map: GluedMap
    verified: bool


def _affine_extension_power(G: GluedModule, gen_index: int, n_max: int):
    """Smallest k such that h^k tau^{-1}(gbar) comes from the chart-2 module,
    together with the chart-2 column; raises when n_max is insufficient."""
    ov = G.scheme.overlap
    gcol = [ov.U1.zero()] * G.m1.gens
    gcol[gen_index] = ov.U1.one()
    base = G.tau_inv.apply_column(tuple(gcol))
    h1 = ov.f2_image_in_U1
    for k in range(n_max + 1):
        scaled = tuple(p * (h1 ** k) for p in base)
        reduced = G.m2_overlap.reduce_vec(_column_vec(scaled))
        cols = [dict() for _ in range(G.m2.gens)]
        for (pos, e), c in reduced.items():
            cols[pos][e] = c
        u2_cols = [Poly(ov.U1, t) for t in cols]
        images = [ov.to2.apply(p) for p in u2_cols]
        inv_index = ov.U2.variables.index(ov.inv2)
        if all(all(e[inv_index] == 0 for e in p.terms) for p in images):
            a2_cols = []
            for p in images:
                terms = {}
                for e, c in p.terms.items():
                    reduced_e = tuple(x for i, x in enumerate(e) if i != inv_index)
                    terms[reduced_e] = c
                a2_cols.append(Poly(G.m2.ring, G.m2.ring.reduce_terms(terms)))
            return k, tuple(a2_cols)
    raise StabilizationError(
        f"extension of chart-1 generator {gen_index} did not clear its "
        f"denominators within n_max = {n_max} (failing chart: 2)")


def _swap_scheme_sides(scheme: TwoChartScheme) -> TwoChartScheme:
    if scheme.kind != "affine":
        raise AlgebraError("side swap only for affine schemes")
    ov = scheme.overlap
    return TwoChartScheme.affine(
        scheme.chart2, scheme.chart1, ov.f2, ov.f1, ov.inv2, ov.inv1,
        {v: str(ov.to1.images[v]) for v in ov.U2.variables},
        {v: str(ov.to2.images[v]) for v in ov.U1.variables})


def _swap_glued(G: GluedModule, swapped_scheme: TwoChartScheme) -> GluedModule:
    # overlap of the swapped scheme is U2; transport tau via to2
    to2 = G.scheme.overlap.to2
    tau_m = [[to2.apply(x) for x in row] for row in G.tau_inv.matrix]
    tinv_m = [[to2.apply(x) for x in row] for row in G.tau.matrix]
    return GluedModule(swapped_scheme, G.m2, G.m1, tau_m, tinv_m)


def idal_generation(G: GluedModule, n_max: int = 8) -> GenerationResult:
    """A verified epimorphism onto G from a direct sum of tensor powers of the
    scheme's chart idals, built by extending chart generators across."""
    scheme = G.scheme
    if scheme.kind == "affine":
        blocks = []
        for gidx in range(G.m1.gens):
            k, col2 = _affine_extension_power(G, gidx, n_max)
            L, _ = chart_idal(scheme, 1, k) if k else (o_glued(scheme), None)
            c1 = ModuleMap(unit_module(scheme.chart1), G.m1,
                           [[scheme.chart1.one() if i == gidx else scheme.chart1.zero()]
                            for i in range(G.m1.gens)], check=False)
            c2 = ModuleMap(unit_module(scheme.chart2), G.m2,
                           [[p] for p in col2], check=False)
            blocks.append(GenerationBlock(1, k, GluedMap(L, G, c1, c2)))
        swapped_scheme = _swap_scheme_sides(scheme)
        Gsw = _swap_glued(G, swapped_scheme)
        for gidx in range(G.m2.gens):
            k, col1 = _affine_extension_power(Gsw, gidx, n_max)
            L, _ = chart_idal(scheme, 2, k) if k else (o_glued(scheme), None)
            c2 = ModuleMap(unit_module(scheme.chart2), G.m2,
                           [[scheme.chart2.one() if i == gidx else scheme.chart2.zero()]
                            for i in range(G.m2.gens)], check=False)
            c1 = ModuleMap(unit_module(scheme.chart1), G.m1,
                           [[p] for p in col1], check=False)
            blocks.append(GenerationBlock(2, k, GluedMap(L, G, c1, c2)))
    elif scheme.kind == "selfglue":
        J = scheme.idal
        blocks = []
        a, b = G.tau.fwd_stage, G.tau.bwd_stage
        for gidx in range(G.m1.gens):
            L, _ = chart_idal(scheme, 1, a) if a else (o_glued(scheme), None)
            gmap = ModuleMap(unit_module(scheme.chart1), G.m1,
                             [[scheme.chart1.one() if i == gidx else scheme.chart1.zero()]
                              for i in range(G.m1.gens)], check=False)
            inner = tensor_map(ModuleMap.identity(J.carrier_power(a)), gmap)
            c2 = G.tau.fwd.compose(_rebind(inner, inner.source, G.tau.fwd.source))
            c2 = _rebind(c2, L.m2, G.m2)
            blocks.append(GenerationBlock(1, a, GluedMap(L, G, gmap, c2)))
        for gidx in range(G.m2.gens):
            L, _ = chart_idal(scheme, 2, b) if b else (o_glued(scheme), None)
            gmap = ModuleMap(unit_module(scheme.chart2), G.m2,
                             [[scheme.chart2.one() if i == gidx else scheme.chart2.zero()]
                              for i in range(G.m2.gens)], check=False)
            inner = tensor_map(ModuleMap.identity(J.carrier_power(b)), gmap)
            c1 = G.tau.bwd.compose(_rebind(inner, inner.source, G.tau.bwd.source))
            c1 = _rebind(c1, L.m1, G.m1)
            blocks.append(GenerationBlock(2, b, GluedMap(L, G, c1, gmap)))
    else:
        raise AlgebraError("unknown scheme kind")
    if not blocks:
        raise AlgebraError("module has no generators to hit")
    D, incls = direct_sum_glued([blk.map.source for blk in blocks])
    c1 = _stack_chart_maps([blk.map.c1 for blk in blocks], G.m1)
    c2 = _stack_chart_maps([blk.map.c2 for blk in blocks], G.m2)
    combined = GluedMap(D, G, c1, c2, validate=False)
    verified = combined.is_chartwise_surjective()
    if not verified:
        raise AlgebraError("constructed map is not surjective (internal)")
    return GenerationResult(blocks, D, combined, True)


def _stack_chart_maps(maps, target: PresentedModule) -> ModuleMap:
    total = sum(m.source.gens for m in maps)
    ring = target.ring
    zero = ring.zero()
    matrix = [[zero] * total for _ in range(target.gens)]
    off = 0
    for m in maps:
        for i in range(target.gens):
            for j in range(m.source.gens):
                matrix[i][off + j] = m.matrix[i][j]
        off += m.source.gens
    from .fpmod import direct_sum as _ds
    S, _, _ = _ds([m.source for m in maps])
    return ModuleMap(S, target, matrix, check=False)


# ---------------------------------------------------------------------------
# the projective line


def p1_standard(n: int, scheme: TwoChartScheme | None = None) -> GluedModule:
    """O(n) on the projective line: tau = multiplication by t^n over U1."""
    scheme = scheme or p1_scheme()
    ov = scheme.overlap
    t = ov.U1.var("t")
    ti = ov.U1.var("ti")
    tau = [[t ** n if n >= 0 else ti ** (-n)]]
    tau_inv = [[ti ** n if n >= 0 else t ** (-n)]]
    O1 = unit_module(scheme.chart1)
    O2 = unit_module(scheme.chart2)
    return GluedModule(scheme, O1, O2, tau, tau_inv)


def p1_sections_oracle(n: int) -> int:
    """Monomial count for sections of O(n): the t^k with 0 <= k <= n."""
    return max(n + 1, 0)


# ---------------------------------------------------------------------------
# classification-datum checkers


@dataclass
class CheckReport:
    clauses: dict

    @property
    def ok(self) -> bool:
        return all(self.clauses.values())


@dataclass
class LineBundleDatum:
    L: GluedModule
    cover_maps: tuple   # two GluedMaps L -> O_glued


def projline_datum_check(datum: LineBundleDatum) -> CheckReport:
    """Both cover maps from the SAME line object, covering chartwise."""
    L = datum.L
    m1_free = _free_rank_one_witness(L.m1) is not None
    m2_free = _free_rank_one_witness(L.m2) is not None
    clauses = {"rank_one_chart1": m1_free, "rank_one_chart2": m2_free}
    e1, e2 = datum.cover_maps
    same = e1.source is L and e2.source is L
    clauses["maps_from_same_object"] = same
    for chart, key in ((1, "cover_chart1"), (2, "cover_chart2")):
        gens = []
        for e in (e1, e2):
            c = e.c1 if chart == 1 else e.c2
            gens.extend(p for row in c.matrix for p in row if not p.is_zero())
        ring = L.scheme.chart1 if chart == 1 else L.scheme.chart2
        clauses[key] = bool(gens) and ring.contains_one(gens)
    return CheckReport(clauses)


def doubleorigin_datum_check(l_map: GluedMap, lstar_map: GluedMap,
                             unit_map: GluedMap, counit_map: GluedMap) -> CheckReport:
    """Cover maps from L and a verified dual L*."""
    L = l_map.source
    Lstar = lstar_map.source
    clauses = {
        "rank_one_L": _free_rank_one_witness(L.m1) is not None
                      and _free_rank_one_witness(L.m2) is not None,
        "dual_verified": dualizable_check(L, Lstar, unit_map, counit_map),
    }
    for chart, key in ((1, "cover_chart1"), (2, "cover_chart2")):
        gens = []
        for e in (l_map, lstar_map):
            c = e.c1 if chart == 1 else e.c2
            gens.extend(p for row in c.matrix for p in row if not p.is_zero())
        ring = L.scheme.chart1 if chart == 1 else L.scheme.chart2
        clauses[key] = bool(gens) and ring.contains_one(gens)
    return CheckReport(clauses)


def doubleorigin2_datum_check(J1: Idal, J2: Idal, p: ModuleMap) -> CheckReport:
    """Cover + exactness: p : O^2 -> J1 (x) J2 is a cokernel of (y; -x) where
    (x, y) is the composite O^2 -> J1 (x) J2 -> O."""
    ring = J1.ring
    clauses = {"cover": cover_check(J1, J2)}
    prod = idal_product(J1, J2)
    if p.source.gens != 2 or p.target != prod.carrier:
        raise AlgebraError("datum must map O^2 to the product carrier")
    comp = prod.e.compose(p)
    x, y = comp.matrix[0][0], comp.matrix[0][1]
    # p surjective
    C, _ = cokernel(p)
    clauses["surjective"] = C.is_zero_module()
    # kernel of p equals the span of (y, -x)
    K, incl = kernel(p)
    target_col = (y, -x)
    in_kernel = prod.carrier.contains_column(p.apply_column(target_col))
    span_ok = True
    lifter = SubmoduleLifter(ring, [_column_vec(target_col)], 2)
    for j in range(K.gens):
        if not lifter.contains(_column_vec(incl.column(j))):
            span_ok = False
            break
    clauses["kernel_generated_by_syzygy"] = bool(in_kernel and span_ok)
    return CheckReport(clauses)
