"""Localization at an idal: believing, the reflector as a stabilizing chain
colimit of hom modules, Deligne morphism spaces, the principal-localization
oracle, the closed-complement quotient, and the comparison search.

Chain stabilization policy (shared by reflect and deligne_hom): stage 0 is
accepted only for literally constant chains; from n = 1 on, the scan first
saturates each stage by the stable kernel of the forward composites (the
chain of saturated stages is injective), then accepts two consecutive
surjective transitions.  Saturation is what detects collapse to zero for
nilpotent idals and for targets killed by the image ideal; with trivial
kernels it degenerates to the plain two-consecutive-isomorphisms rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlgebraError, LiftError, RingMismatchError
from .fpmod import (
    ChainColimitResult,
    HomModule,
    ModuleMap,
    PresentedModule,
    _column_vec,
    _module_gb,
    cokernel,
    hom_module,
    is_iso,
    kernel,
    tensor,
    tensor_map,
    unit_module,
)
from .idal import Idal, idal_product
from .polyring import Poly, PolyRing, RingHom, SubmoduleLifter


# ---------------------------------------------------------------------------
# the canonical map and believing


def _canonical_stage_map(J: Idal, M: PresentedModule, hom: HomModule, n: int) -> ModuleMap:
    """M -> HOM(J^{(x)n} (x) O, M) sending m to (t |-> powermap(t) * m)."""
    ring = M.ring
    power = J.power_map(n)
    src = hom.source  # tensor(J^{(x)n}, O), same generator count as the power
    cols = []
    for k in range(M.gens):
        matrix = [[ring.zero()] * src.gens for _ in range(M.gens)]
        for j in range(src.gens):
            matrix[k][j] = power.matrix[0][j]
        phi = ModuleMap(src, M, matrix, check=False)
        try:
            cols.append(hom.express(phi))
        except LiftError as exc:
            raise LiftError(f"canonical map failed to lift (internal): {exc}") from exc
    matrix = [[cols[k][r] for k in range(M.gens)] for r in range(hom.module.gens)]
    return ModuleMap(M, hom.module, matrix, check=False)


def canonical_to_hom(J: Idal, M: PresentedModule) -> ModuleMap:
    """The canonical M -> HOM(J, M)."""
    if J.ring != M.ring:
        raise RingMismatchError("idal and module over different rings")
    hom = hom_module(tensor(J.carrier, unit_module(J.ring)), M)
    return _canonical_stage_map(J, M, hom, 1)


def believes(J: Idal, M: PresentedModule) -> bool:
    """Whether the canonical M -> HOM(J, M) is an isomorphism."""
    return is_iso(canonical_to_hom(J, M))


# ---------------------------------------------------------------------------
# hom chains


class HomChain:
    """Stages HOM(J^{(x)n} (x) mid, target) with transitions by precomposition
    with the idal power transitions."""

    def __init__(self, J: Idal, mid: PresentedModule, target: PresentedModule):
        if J.ring != mid.ring or J.ring != target.ring:
            raise RingMismatchError("chain data over different rings")
        self.J = J
        self.mid = mid
        self.target = target
        self.ring = J.ring
        self._sources: dict = {}
        self._stages: dict = {}
        self._transitions: dict = {}

    def source_at(self, n: int) -> PresentedModule:
        if n not in self._sources:
            self._sources[n] = tensor(self.J.carrier_power(n), self.mid)
        return self._sources[n]

    def stage(self, n: int) -> HomModule:
        if n not in self._stages:
            self._stages[n] = hom_module(self.source_at(n), self.target)
        return self._stages[n]

    def shrink(self, n: int) -> ModuleMap:
        """tensor(J^{(x)(n+1)}, mid) -> tensor(J^{(x)n}, mid)."""
        t = self.J.power_transition(n + 1, n)
        raw = tensor_map(t, ModuleMap.identity(self.mid))
        return ModuleMap(self.source_at(n + 1), self.source_at(n), raw.matrix, check=False)

    def transition(self, n: int) -> ModuleMap:
        if n not in self._transitions:
            Hs, Ht = self.stage(n), self.stage(n + 1)
            shr = self.shrink(n)
            cols = [Ht.express(Hs.generator_map(k).compose(shr))
                    for k in range(Hs.module.gens)]
            matrix = [[cols[k][r] for k in range(Hs.module.gens)]
                      for r in range(Ht.module.gens)]
            self._transitions[n] = ModuleMap(Hs.module, Ht.module, matrix, check=False)
        return self._transitions[n]


def _submodule_canonical_gb(M: PresentedModule, extra_cols):
    """Canonical reduced GB of (relations of M + extra columns); the reduced
    basis is unique, so equality of spans is equality of these lists."""
    cols = [_column_vec(c) for c in M.relations] + [_column_vec(c) for c in extra_cols]
    return _module_gb(cols, M.ring, M.gens)


def _saturated_kernel(chainlike, n: int, budget: int):
    """Generators of the stable kernel of the forward composites out of
    stage n, or None if the kernel kept growing within the budget."""
    stage_n = chainlike.stage(n).module if isinstance(chainlike, HomChain) else chainlike[0](n)
    comp = None
    prev_gb = None
    prev_cols = []
    for k in range(1, budget + 1):
        t = chainlike.transition(n + k - 1)
        comp = t if comp is None else t.compose(comp)
        K, incl = kernel(comp)
        cols = [incl.column(j) for j in range(K.gens)]
        gb = _submodule_canonical_gb(comp.source, cols)
        if prev_gb is not None and gb == prev_gb:
            return prev_cols
        prev_gb, prev_cols = gb, cols
    return None


@dataclass
class _ScanOutcome:
    result: ChainColimitResult
    value_stage_index: int | None  # stage whose hom module presents the value
    saturated_value: bool


def _scan_hom_chain(chain: HomChain, n_max: int, saturate: bool = True) -> _ScanOutcome:
    if n_max < 1:
        raise AlgebraError("n_max must be >= 1")

    def module_at(n):
        return chain.stage(n).module

    def collect(upto_stage: int, upto_transition: int):
        stages = [module_at(i) for i in range(upto_stage + 1)]
        transitions = [chain.transition(i) for i in range(upto_transition + 1)]
        return stages, transitions

    # stage 0 is accepted only when the idal map itself is invertible (then
    # every transition is an isomorphism); all other chains scan from n = 1
    if is_iso(chain.J.e):
        upto = min(2, n_max)
        stages, transitions = collect(upto, upto - 1)
        res = ChainColimitResult(stages, transitions, module_at(0), 0, False)
        return _ScanOutcome(res, 0, False)

    sat_cache: dict = {}

    def saturated(n):
        if n not in sat_cache:
            sat_cache[n] = _saturated_kernel(chain, n, max(2, n_max - n))
        return sat_cache[n]

    def saturated_module(n, ker_cols):
        base = module_at(n)
        if not ker_cols:
            return base
        return PresentedModule(base.ring, base.gens,
                               list(base.relations) + list(ker_cols),
                               None if base.grading is None else None)

    ker_cache: dict = {}

    def transition_kernel_is_zero(n):
        if n not in ker_cache:
            K, _ = kernel(chain.transition(n))
            ker_cache[n] = K.is_zero_module()
        return ker_cache[n]

    coker_cache: dict = {}

    def transition_is_surjective(n):
        if n not in coker_cache:
            C, _ = cokernel(chain.transition(n))
            coker_cache[n] = C.is_zero_module()
        return coker_cache[n]

    for n in range(1, n_max - 1):
        injective = transition_kernel_is_zero(n) and transition_kernel_is_zero(n + 1)
        if not saturate or injective:
            # plain two-consecutive-isomorphisms rule (kernels already known)
            if saturate and injective:
                if transition_is_surjective(n) and transition_is_surjective(n + 1):
                    stages, transitions = collect(n + 2, n + 1)
                    res = ChainColimitResult(stages, transitions, module_at(n), n, False)
                    return _ScanOutcome(res, n, False)
            elif is_iso(chain.transition(n)) and is_iso(chain.transition(n + 1)):
                stages, transitions = collect(n + 2, n + 1)
                res = ChainColimitResult(stages, transitions, module_at(n), n, False)
                return _ScanOutcome(res, n, False)
            continue
        kn, kn1, kn2 = saturated(n), saturated(n + 1), saturated(n + 2)
        if kn is None or kn1 is None or kn2 is None:
            continue
        Vn = saturated_module(n, kn)
        Vn1 = saturated_module(n + 1, kn1)
        Vn2 = saturated_module(n + 2, kn2)
        tn = ModuleMap(Vn, Vn1, chain.transition(n).matrix, check=False)
        tn1 = ModuleMap(Vn1, Vn2, chain.transition(n + 1).matrix, check=False)
        c1, _ = cokernel(tn)
        c2, _ = cokernel(tn1)
        if c1.is_zero_module() and c2.is_zero_module():
            any_sat = bool(kn or kn1 or kn2)
            stages, transitions = collect(n + 2, n + 1)
            res = ChainColimitResult(stages, transitions, Vn, n, False,
                                     saturated=any_sat,
                                     saturated_transitions=[tn, tn1] if any_sat else [])
            return _ScanOutcome(res, n, any_sat)

    stages, transitions = collect(n_max, n_max - 1)
    res = ChainColimitResult(stages, transitions, module_at(n_max), None, True)
    return _ScanOutcome(res, n_max, False)


# ---------------------------------------------------------------------------
# the reflector


@dataclass
class ReflectorResult:
    input: PresentedModule
    idal: Idal
    chain: ChainColimitResult
    unit: ModuleMap

    @property
    def value(self) -> PresentedModule:
        return self.chain.value

    @property
    def stabilized(self) -> bool:
        return self.chain.stabilized_at is not None


def reflect(J: Idal, M: PresentedModule, n_max: int = 8,
            saturate: bool = True) -> ReflectorResult:
    """The reflection of M into the modules believing J, computed as the
    stabilizing chain colimit of HOM(J^{(x)n}, M)."""
    if J.ring != M.ring:
        raise RingMismatchError("idal and module over different rings")
    chain = HomChain(J, unit_module(J.ring), M)
    outcome = _scan_hom_chain(chain, n_max, saturate)
    idx = outcome.value_stage_index
    hom = chain.stage(idx)
    # the value is the stage hom module or its saturated quotient; either way
    # it has the same generators, so the canonical matrix is the unit
    unit_to_stage = _canonical_stage_map(J, M, hom, idx)
    unit = ModuleMap(M, outcome.result.value, unit_to_stage.matrix, check=False)
    return ReflectorResult(M, J, outcome.result, unit)


# ---------------------------------------------------------------------------
# Deligne morphism spaces


@dataclass
class DeligneHomResult:
    idal: Idal
    source: PresentedModule
    target: PresentedModule
    chain: ChainColimitResult
    stage_homs: list

    @property
    def value(self) -> PresentedModule:
        return self.chain.value

    @property
    def stabilized(self) -> bool:
        return self.chain.stabilized_at is not None

    def interpret(self, coeffs) -> ModuleMap:
        """The map J^{(x)n*} (x) M -> N encoded by an element of the value."""
        if self.chain.stabilized_at is None:
            raise AlgebraError("chain did not stabilize; no interpretation")
        return self.stage_homs[self.chain.stabilized_at].interpret(coeffs)


def deligne_hom(J: Idal, M: PresentedModule, N: PresentedModule, n_max: int = 8,
                saturate: bool = True) -> DeligneHomResult:
    """Stages Hom(J^{(x)n} (x) M, N) with transitions precomposing the idal
    power transitions; the stabilized value presents the morphisms between
    the localizations of M and N."""
    chain = HomChain(J, M, N)
    outcome = _scan_hom_chain(chain, n_max, saturate)
    upto = len(outcome.result.stages)
    stage_homs = [chain.stage(i) for i in range(upto)]
    return DeligneHomResult(J, M, N, outcome.result, stage_homs)


def deligne_window_dims(J: Idal, M: PresentedModule, N: PresentedModule,
                        n: int, degrees) -> dict:
    """Graded dimensions of the stage-n Deligne hom module on a degree window."""
    from .fpmod import graded_dim

    chain = HomChain(J, M, N)
    stage = chain.stage(n).module
    return {d: graded_dim(stage, d) for d in degrees}


# ---------------------------------------------------------------------------
# principal localization oracle


def fresh_variable(ring: PolyRing, stem: str = "inv") -> str:
    if stem not in ring.variables:
        return stem
    k = 0
    while f"{stem}{k}" in ring.variables:
        k += 1
    return f"{stem}{k}"


def localized_ring(ring: PolyRing, f: Poly, inv_name: str | None = None):
    """(B, hom, inv) with B = ring[t]/(t*f - 1) and hom the inclusion."""
    f = ring.poly(f)
    if f.is_zero():
        raise AlgebraError("cannot invert zero")
    name = inv_name or fresh_variable(ring)
    if f.is_constant():
        weight = 0   # the inverse variable is eliminated by c*t - 1
    elif f.is_homogeneous():
        weight = -f.degree()
    else:
        weight = 1
    free = ring.free()
    quotient = [str(Poly(free, dict(q))) for q in ring.quotient_gb]
    B = PolyRing(ring.field, ring.variables + (name,), ring.order,
                 quotient + [f"({f}) * {name} - 1"],
                 ring.weights + (weight,))
    hom = RingHom(ring, B, {v: v for v in ring.variables})
    return B, hom, B.var(name)


def base_change_module(M: PresentedModule, hom: RingHom) -> PresentedModule:
    cols = [tuple(hom.apply(p) for p in col) for col in M.relations]
    try:
        return PresentedModule(hom.dst, M.gens, cols, M.grading)
    except Exception:
        return PresentedModule(hom.dst, M.gens, cols, None)


def base_change_map(phi: ModuleMap, hom: RingHom,
                    source: PresentedModule | None = None,
                    target: PresentedModule | None = None) -> ModuleMap:
    source = source if source is not None else base_change_module(phi.source, hom)
    target = target if target is not None else base_change_module(phi.target, hom)
    return ModuleMap(source, target, hom.apply_matrix(phi.matrix), check=False)


def localization_oracle(f, M: PresentedModule, inv_name: str | None = None) -> PresentedModule:
    """M base-changed along A -> A[t]/(t f - 1); the independent model of the
    reflection at the principal idal (f).  Grading transports when f is
    homogeneous (the inverse variable gets degree -deg f)."""
    ring = M.ring
    f = ring.poly(f)
    B, hom, _ = localized_ring(ring, f, inv_name)
    return base_change_module(M, hom)


# ---------------------------------------------------------------------------
# quotient functor, intersection law, comparison search


def quotient_functor(I, M: PresentedModule) -> PresentedModule:
    """M (x) O/I, the reflection onto modules killed by the idal."""
    e = I.e if isinstance(I, Idal) else I
    C, _ = cokernel(e)
    return tensor(M, C)


def intersection_check(I: Idal, J: Idal, M: PresentedModule) -> bool:
    """Verify believes(I (x) J, M) <=> believes(I, M) and believes(J, M)."""
    both = believes(I, M) and believes(J, M)
    product = believes(idal_product(I, J), M)
    return both == product


def idal_comparison_search(I: Idal, J: Idal, n_max: int = 8):
    """Smallest n <= n_max such that the idal map J^{(x)n} -> O lifts through
    e_I, with the lift as an idal morphism; None if no power lifts."""
    if I.ring != J.ring:
        raise RingMismatchError("comparison of idals over different rings")
    if n_max < 1:
        raise AlgebraError("n_max must be >= 1")
    ring = I.ring
    O = unit_module(ring)
    for n in range(1, n_max + 1):
        Jn = J.power_idal(n)
        source = Jn.carrier
        H_O = hom_module(source, O)
        H_I = hom_module(source, I.carrier)
        try:
            u = H_O.express(Jn.e)
        except LiftError as exc:
            raise LiftError(f"power map not in its own hom module (internal): {exc}")
        post_cols = []
        for k in range(H_I.module.gens):
            post_cols.append(H_O.express(I.e.compose(H_I.generator_map(k))))
        cols = [_column_vec(c) for c in
                [tuple(col[r] for r in range(H_O.module.gens)) for col in post_cols]]
        cols += [_column_vec(c) for c in H_O.module.relations]
        lifter = SubmoduleLifter(ring, cols, H_O.module.gens)
        cof = lifter.lift(_column_vec(tuple(u)))
        if cof is None:
            continue
        coeffs = [Poly(ring, ring.reduce_terms(cof[k])) for k in range(H_I.module.gens)]
        lift_map = H_I.interpret(coeffs)
        from .idal import IdalMorphism
        morphism = IdalMorphism(Jn, I, lift_map)
        return n, morphism
    return None
