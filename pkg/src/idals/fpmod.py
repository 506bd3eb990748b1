"""Finitely presented modules over a PolyRing and the maps between them.

A module is A^gens / (column span of `relations`); a map is a matrix on
generators whose well-definedness (source relations land in target relations)
is checked at construction.  Equality of maps always means equality modulo
the target's relations, never literal matrix equality.

Gradings are by weighted total degree with integer generator shifts.  They
are optional and propagate through the constructions whenever the resulting
relation columns stay homogeneous.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    AlgebraError,
    GradingError,
    LiftError,
    RingMismatchError,
    UngradedError,
    WellDefinednessError,
)
from . import linalg
from .polyring import (
    Poly,
    PolyRing,
    RingHom,
    SubmoduleLifter,
    _module_gb,
    _prepare,
    _syzygy_vecs,
    _vec_reduce,
    monomials_of_degree,
)


def _column_vec(col) -> dict:
    out = {}
    for pos, p in enumerate(col):
        for e, c in p.terms.items():
            out[(pos, e)] = c
    return out


def _vec_column(ring: PolyRing, rank: int, vec: dict):
    cols = [dict() for _ in range(rank)]
    for (pos, e), c in vec.items():
        cols[pos][e] = c
    return tuple(Poly(ring, ring.reduce_terms(t)) for t in cols)


def column_degree(ring: PolyRing, col, gen_degrees):
    """Weighted degree of a homogeneous column; None if inhomogeneous,
    'zero' for the zero column."""
    degs = set()
    for pos, p in enumerate(col):
        if p.is_zero():
            continue
        if not p.is_homogeneous():
            return None
        degs.add(p.degree() + gen_degrees[pos])
    if not degs:
        return "zero"
    if len(degs) > 1:
        return None
    return degs.pop()


class PresentedModule:
    """A^gens modulo the span of the relation columns."""

    def __init__(self, ring: PolyRing, gens: int, relations=(), grading=None):
        self.ring = ring
        self.gens = int(gens)
        cols = []
        for col in relations:
            col = tuple(ring.poly(p) for p in col)
            if len(col) != self.gens:
                raise AlgebraError(
                    f"relation column of length {len(col)} for {self.gens} generators")
            if any(not p.is_zero() for p in col):
                cols.append(col)
        self.relations = tuple(cols)
        if grading is not None:
            grading = tuple(int(d) for d in grading)
            if len(grading) != self.gens:
                raise GradingError("grading length must equal the generator count")
            if not self._homogeneous_for(grading):
                raise GradingError("relation columns are not homogeneous for this grading")
            self.grading = grading
        else:
            zeros = (0,) * self.gens
            self.grading = zeros if self._homogeneous_for(zeros) else None
        self._rel_gb = None
        self._rel_prepared = None

    def _homogeneous_for(self, grading) -> bool:
        return all(column_degree(self.ring, col, grading) is not None
                   for col in self.relations)

    def regrade(self, grading) -> "PresentedModule":
        """Same presentation with an explicitly supplied grading (or None)."""
        return PresentedModule(self.ring, self.gens, self.relations, grading)

    @property
    def is_graded(self) -> bool:
        return self.grading is not None

    def rel_gb(self):
        if self._rel_gb is None:
            self._rel_gb = _module_gb([_column_vec(c) for c in self.relations],
                                      self.ring, self.gens)
            self._rel_prepared = [_prepare(v, self.ring.free()) for v in self._rel_gb]
        return self._rel_gb

    def reduce_vec(self, vec: dict) -> dict:
        self.rel_gb()
        red, _ = _vec_reduce(vec, self._rel_prepared, self.ring.free(), self.gens)
        return red

    def contains_column(self, col) -> bool:
        return not self.reduce_vec(_column_vec(col))

    def is_zero_module(self) -> bool:
        if self.gens == 0:
            return True
        for i in range(self.gens):
            e = [self.ring.zero()] * self.gens
            e[i] = self.ring.one()
            if not self.contains_column(tuple(e)):
                return False
        return True

    def presentation_key(self):
        return (self.ring.signature(), self.gens,
                tuple(tuple(str(p) for p in col) for col in self.relations),
                self.grading)

    def __eq__(self, other):
        return (isinstance(other, PresentedModule)
                and self.presentation_key() == other.presentation_key())

    def __hash__(self):
        return hash(self.presentation_key())

    def __repr__(self):
        g = f", grading={list(self.grading)}" if self.grading else ""
        return f"PresentedModule({self.ring!r}, gens={self.gens}, relations={len(self.relations)}{g})"

    def to_json(self):
        data = {
            "ring": self.ring.to_json(),
            "gens": self.gens,
            "relations": [[str(self.relations[j][i]) for j in range(len(self.relations))]
                          for i in range(self.gens)],
        }
        if self.grading is not None:
            data["grading"] = list(self.grading)
        return data

    @staticmethod
    def from_json(data, ring: PolyRing | None = None) -> "PresentedModule":
        ring = ring if ring is not None else PolyRing.from_json(data["ring"])
        rows = data.get("relations", [])
        gens = int(data["gens"])
        ncols = len(rows[0]) if rows else 0
        cols = [tuple(rows[i][j] for i in range(gens)) for j in range(ncols)]
        return PresentedModule(ring, gens, cols, data.get("grading"))


def free_module(ring: PolyRing, rank: int, degrees=None) -> PresentedModule:
    return PresentedModule(ring, rank, (), degrees if degrees is not None else (0,) * rank)


def unit_module(ring: PolyRing) -> PresentedModule:
    """The ring as rank-1 free module; the tensor unit O."""
    return free_module(ring, 1)


def zero_module(ring: PolyRing) -> PresentedModule:
    return PresentedModule(ring, 0)


class ModuleMap:
    """Map of presented modules given by a (target.gens x source.gens) matrix."""

    def __init__(self, source: PresentedModule, target: PresentedModule, matrix,
                 check: bool = True):
        if source.ring != target.ring:
            raise RingMismatchError("map between modules over different rings")
        self.source = source
        self.target = target
        self.ring = source.ring
        rows = tuple(tuple(self.ring.poly(x) for x in row) for row in matrix)
        if len(rows) != target.gens or any(len(r) != source.gens for r in rows):
            raise AlgebraError(
                f"matrix must be {target.gens} x {source.gens}, got "
                f"{len(rows)} x {len(rows[0]) if rows else 0}")
        self.matrix = rows
        if check:
            for col in source.relations:
                if not target.contains_column(self.apply_column(col)):
                    raise WellDefinednessError(
                        "matrix does not send source relations into target relations")

    # -- evaluation ----------------------------------------------------------

    def apply_column(self, col):
        out = []
        for i in range(self.target.gens):
            acc = self.ring.zero()
            for j in range(self.source.gens):
                m = self.matrix[i][j]
                if not m.is_zero() and not col[j].is_zero():
                    acc = acc + m * col[j]
            out.append(acc)
        return tuple(out)

    def column(self, j):
        return tuple(self.matrix[i][j] for i in range(self.target.gens))

    def columns(self):
        return [self.column(j) for j in range(self.source.gens)]

    # -- algebra ---------------------------------------------------------------

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        if other.target is not self.source and other.target != self.source:
            raise AlgebraError("non-composable maps")
        cols = [self.apply_column(other.column(j)) for j in range(other.source.gens)]
        matrix = [[cols[j][i] for j in range(other.source.gens)]
                  for i in range(self.target.gens)]
        return ModuleMap(other.source, self.target, matrix, check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        matrix = [[a + b for a, b in zip(r1, r2)]
                  for r1, r2 in zip(self.matrix, other.matrix)]
        return ModuleMap(self.source, self.target, matrix, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        matrix = [[a - b for a, b in zip(r1, r2)]
                  for r1, r2 in zip(self.matrix, other.matrix)]
        return ModuleMap(self.source, self.target, matrix, check=False)

    def __neg__(self):
        return ModuleMap(self.source, self.target,
                         [[-a for a in r] for r in self.matrix], check=False)

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         [[a.scale(c) for a in r] for r in self.matrix], check=False)

    # -- predicates ------------------------------------------------------------

    def equals(self, other: "ModuleMap") -> bool:
        """Equality as maps: difference columns lie in the target relations."""
        if self.source.gens != other.source.gens or self.target.gens != other.target.gens:
            return False
        diff = self - other
        return all(self.target.contains_column(diff.column(j))
                   for j in range(self.source.gens))

    def is_zero_map(self) -> bool:
        return all(self.target.contains_column(self.column(j))
                   for j in range(self.source.gens))

    def is_literal_identity(self) -> bool:
        if self.source.presentation_key() != self.target.presentation_key():
            return False
        one, zero = self.ring.one(), self.ring.zero()
        return all(self.matrix[i][j] == (one if i == j else zero)
                   for i in range(self.target.gens) for j in range(self.source.gens))

    def is_homogeneous(self) -> bool:
        """Degree-0 homogeneity with respect to both gradings."""
        if self.source.grading is None or self.target.grading is None:
            return False
        for j in range(self.source.gens):
            d = column_degree(self.ring, self.column(j), self.target.grading)
            if d is None or (d != "zero" and d != self.source.grading[j]):
                return False
        return True

    @staticmethod
    def identity(M: PresentedModule) -> "ModuleMap":
        one, zero = M.ring.one(), M.ring.zero()
        return ModuleMap(M, M, [[one if i == j else zero for j in range(M.gens)]
                                for i in range(M.gens)], check=False)

    @staticmethod
    def zero(source: PresentedModule, target: PresentedModule) -> "ModuleMap":
        z = source.ring.zero()
        return ModuleMap(source, target,
                         [[z] * source.gens for _ in range(target.gens)], check=False)

    def __repr__(self):
        return f"ModuleMap({self.source.gens} -> {self.target.gens} over {self.ring!r})"

    def to_json(self):
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": [[str(x) for x in row] for row in self.matrix],
        }


# ---------------------------------------------------------------------------
# kernel / cokernel / sums


def is_zero(M: PresentedModule) -> bool:
    return M.is_zero_module()


def kernel(phi: ModuleMap):
    """(K, incl) with incl a monomorphism presenting ker(phi)."""
    ring = phi.ring
    src, tgt = phi.source, phi.target
    cols = [_column_vec(phi.column(j)) for j in range(src.gens)]
    cols += [_column_vec(c) for c in tgt.relations]
    syz = _syzygy_vecs(cols, ring, tgt.gens)
    gens_vecs = []
    for s in syz:
        proj = {(p, e): c for (p, e), c in s.items() if p < src.gens}
        col = _vec_column(ring, src.gens, proj)
        col = _vec_column(ring, src.gens, src.reduce_vec(_column_vec(col)))
        if any(not p.is_zero() for p in col):
            gens_vecs.append(col)
    # deduplicate reduced generators, deterministically
    seen = set()
    kernel_cols = []
    for col in gens_vecs:
        key = tuple(str(p) for p in col)
        if key not in seen:
            seen.add(key)
            kernel_cols.append(col)
    k = len(kernel_cols)
    # relations of K: coefficient vectors c with sum c_i * col_i in src relations
    rel_inputs = [_column_vec(c) for c in kernel_cols] + [_column_vec(c) for c in src.relations]
    syz2 = _syzygy_vecs(rel_inputs, ring, src.gens)
    k_rels = []
    for s in syz2:
        proj = {(p, e): c for (p, e), c in s.items() if p < k}
        col = _vec_column(ring, k, proj)
        if any(not p.is_zero() for p in col):
            k_rels.append(col)
    grading = None
    if src.grading is not None:
        degs = [column_degree(ring, col, src.grading) for col in kernel_cols]
        if all(isinstance(d, int) for d in degs):
            grading = tuple(degs)
    K = PresentedModule(ring, k, k_rels, grading)
    matrix = [[kernel_cols[j][i] for j in range(k)] for i in range(src.gens)]
    incl = ModuleMap(K, src, matrix, check=False)
    return K, incl


def cokernel(phi: ModuleMap):
    """(C, proj) with C = target/(image + target relations)."""
    tgt = phi.target
    cols = list(phi.columns()) + list(tgt.relations)
    grading = tgt.grading
    if grading is not None:
        if any(column_degree(phi.ring, c, grading) is None for c in cols):
            grading = None
    C = PresentedModule(phi.ring, tgt.gens, cols, grading)
    proj = ModuleMap(tgt, C, ModuleMap.identity(tgt).matrix, check=False)
    return C, proj


def direct_sum(modules):
    """(S, inclusions, projections)."""
    if not modules:
        raise AlgebraError("empty direct sum")
    ring = modules[0].ring
    for m in modules:
        if m.ring != ring:
            raise RingMismatchError("direct sum over different rings")
    offsets = []
    total = 0
    for m in modules:
        offsets.append(total)
        total += m.gens
    rels = []
    for idx, m in enumerate(modules):
        for col in m.relations:
            full = [ring.zero()] * total
            for i, p in enumerate(col):
                full[offsets[idx] + i] = p
            rels.append(tuple(full))
    grading = None
    if all(m.grading is not None for m in modules):
        grading = tuple(d for m in modules for d in m.grading)
    S = PresentedModule(ring, total, rels, grading)
    incls, projs = [], []
    zero, one = ring.zero(), ring.one()
    for idx, m in enumerate(modules):
        mat_in = [[one if (i == offsets[idx] + j) else zero for j in range(m.gens)]
                  for i in range(total)]
        incls.append(ModuleMap(m, S, mat_in, check=False))
        mat_pr = [[one if (offsets[idx] + i == j) else zero for j in range(total)]
                  for i in range(m.gens)]
        projs.append(ModuleMap(S, m, mat_pr, check=False))
    return S, incls, projs


# ---------------------------------------------------------------------------
# tensor structure


def tensor(M: PresentedModule, N: PresentedModule) -> PresentedModule:
    """M (x) N with generator (i, j) linearized row-major as i*N.gens + j."""
    if M.ring != N.ring:
        raise RingMismatchError("tensor over different rings")
    ring = M.ring
    g = M.gens * N.gens
    rels = []
    for col in M.relations:
        for j in range(N.gens):
            full = [ring.zero()] * g
            for i, p in enumerate(col):
                full[i * N.gens + j] = p
            rels.append(tuple(full))
    for i in range(M.gens):
        for col in N.relations:
            full = [ring.zero()] * g
            for j, p in enumerate(col):
                full[i * N.gens + j] = p
            rels.append(tuple(full))
    grading = None
    if M.grading is not None and N.grading is not None:
        grading = tuple(M.grading[i] + N.grading[j]
                        for i in range(M.gens) for j in range(N.gens))
    return PresentedModule(ring, g, rels, grading)


def tensor_map(phi: ModuleMap, psi: ModuleMap) -> ModuleMap:
    """Kronecker product acting on the row-major tensor generators."""
    src = tensor(phi.source, psi.source)
    tgt = tensor(phi.target, psi.target)
    rows = []
    for i1 in range(phi.target.gens):
        for i2 in range(psi.target.gens):
            row = []
            for j1 in range(phi.source.gens):
                for j2 in range(psi.source.gens):
                    row.append(phi.matrix[i1][j1] * psi.matrix[i2][j2])
            rows.append(row)
    return ModuleMap(src, tgt, rows, check=False)


def tensor_power(M: PresentedModule, n: int) -> PresentedModule:
    if n < 0:
        raise AlgebraError("negative tensor power")
    if n == 0:
        return unit_module(M.ring)
    P = M
    for _ in range(n - 1):
        P = tensor(P, M)
    return P


def symtrivial_check(M: PresentedModule) -> bool:
    """Whether the self-symmetry swap M (x) M -> M (x) M is the identity.

    Line-bundle-like objects are symtrivial; the plane-ideal module is not
    (the swap difference generates the torsion of its tensor square).
    """
    swap = tensor_permutation([M, M], [1, 0])
    return swap.equals(ModuleMap.identity(swap.source))


def tensor_permutation(factors, perm) -> ModuleMap:
    """Iso from factors[0] (x) ... (x) factors[k-1] to the permuted product
    factors[perm[0]] (x) ... ; perm maps new slot -> old slot."""
    ring = factors[0].ring
    src = factors[0]
    for f in factors[1:]:
        src = tensor(src, f)
    permuted = [factors[p] for p in perm]
    tgt = permuted[0]
    for f in permuted[1:]:
        tgt = tensor(tgt, f)
    dims = [f.gens for f in factors]

    def flatten(dims_list, idx):
        out = 0
        for d, i in zip(dims_list, idx):
            out = out * d + i
        return out

    import itertools
    zero, one = ring.zero(), ring.one()
    matrix = [[zero] * src.gens for _ in range(tgt.gens)]
    for idx in itertools.product(*[range(d) for d in dims]):
        s = flatten(dims, idx)
        t = flatten([dims[p] for p in perm], [idx[p] for p in perm])
        matrix[t][s] = one
    return ModuleMap(src, tgt, matrix, check=False)


# ---------------------------------------------------------------------------
# hom modules


class HomModule:
    """HOM(M, N) presented as the kernel of N^{g_M} -> N^{s_M}.

    Ambient coordinates flatten (source generator i, target generator r) to
    i * N.gens + r.  `interpret` turns an element (coefficient column over the
    hom generators) into the ModuleMap it encodes; `express` is its partial
    inverse, lifting a given map to hom coordinates.
    """

    def __init__(self, M: PresentedModule, N: PresentedModule):
        if M.ring != N.ring:
            raise RingMismatchError("hom over different rings")
        self.source = M
        self.target = N
        self.ring = M.ring
        ambient_degrees = None
        if M.grading is not None and N.grading is not None:
            ambient_degrees = tuple(N.grading[r] - M.grading[i]
                                    for i in range(M.gens) for r in range(N.gens))
        copies = [N] * M.gens
        if M.gens:
            amb, _, _ = direct_sum(copies)
            amb = amb.regrade(ambient_degrees) if ambient_degrees is not None else amb
        else:
            amb = zero_module(self.ring)
        self.ambient = amb
        s = len(M.relations)
        if s and M.gens:
            tgt_copies = [N] * s
            tgt_amb, _, _ = direct_sum(tgt_copies)
            rows = []
            for c in range(s):
                for r in range(N.gens):
                    row = []
                    for i in range(M.gens):
                        for r2 in range(N.gens):
                            row.append(M.relations[c][i] if r == r2 else self.ring.zero())
                    rows.append(row)
            tmap = ModuleMap(amb, tgt_amb, rows, check=False)
            K, incl = kernel(tmap)
        else:
            K, incl = amb, ModuleMap.identity(amb)
        self.module = K
        self.incl = incl
        self._lifter = None

    def interpret(self, coeffs) -> ModuleMap:
        """The map M -> N encoded by an element of the hom module."""
        coeffs = tuple(self.ring.poly(c) for c in coeffs)
        if len(coeffs) != self.module.gens:
            raise AlgebraError("hom element length mismatch")
        flat = self.incl.apply_column(coeffs) if self.module.gens else ()
        matrix = [[self.ring.zero()] * self.source.gens for _ in range(self.target.gens)]
        for i in range(self.source.gens):
            for r in range(self.target.gens):
                matrix[r][i] = flat[i * self.target.gens + r]
        return ModuleMap(self.source, self.target, matrix, check=False)

    def generator_map(self, k: int) -> ModuleMap:
        e = [self.ring.zero()] * self.module.gens
        e[k] = self.ring.one()
        return self.interpret(e)

    def _flatten_map(self, phi: ModuleMap):
        return tuple(phi.matrix[r][i]
                     for i in range(self.source.gens) for r in range(self.target.gens))

    def express(self, phi: ModuleMap):
        """Hom coordinates of a map M -> N; raises LiftError if it is not one."""
        if phi.source.gens != self.source.gens or phi.target.gens != self.target.gens:
            raise AlgebraError("map shape does not match hom module")
        flat = self._flatten_map(phi)
        # fast path: the element coincides with a single hom generator
        red = self.ambient.reduce_vec(_column_vec(flat))
        for k in range(self.module.gens):
            gen_flat = self.incl.column(k)
            if self.ambient.reduce_vec(_column_vec(gen_flat)) == red:
                e = [self.ring.zero()] * self.module.gens
                e[k] = self.ring.one()
                return tuple(e)
        if self._lifter is None:
            cols = [_column_vec(self.incl.column(k)) for k in range(self.module.gens)]
            cols += [_column_vec(c) for c in self.ambient.relations]
            self._lifter = SubmoduleLifter(self.ring, cols, self.ambient.gens)
        cof = self._lifter.lift(_column_vec(flat))
        if cof is None:
            raise LiftError("map does not lie in the hom module")
        out = []
        for k in range(self.module.gens):
            out.append(Poly(self.ring, self.ring.reduce_terms(cof[k])))
        return tuple(out)


def hom_module(M: PresentedModule, N: PresentedModule) -> HomModule:
    return HomModule(M, N)


# ---------------------------------------------------------------------------
# pullback / pushout / iso


def pullback(phi: ModuleMap, psi: ModuleMap):
    """(P, p1, p2) for phi : M -> Q, psi : N -> Q with common target Q."""
    if phi.target != psi.target:
        raise AlgebraError("pullback requires a common target")
    S, incls, projs = direct_sum([phi.source, psi.source])
    combined = ModuleMap(
        S, phi.target,
        [list(phi.matrix[i]) + [-x for x in psi.matrix[i]] for i in range(phi.target.gens)],
        check=False)
    K, incl = kernel(combined)
    p1 = projs[0].compose(incl)
    p2 = projs[1].compose(incl)
    return K, p1, p2


def pushout(phi: ModuleMap, psi: ModuleMap):
    """(P, i1, i2) for phi : Q -> M, psi : Q -> N with common source Q."""
    if phi.source != psi.source:
        raise AlgebraError("pushout requires a common source")
    S, incls, projs = direct_sum([phi.target, psi.target])
    stacked = ModuleMap(
        phi.source, S,
        [list(row) for row in phi.matrix] + [[-x for x in row] for row in psi.matrix],
        check=False)
    C, proj = cokernel(stacked)
    i1 = proj.compose(incls[0])
    i2 = proj.compose(incls[1])
    return C, i1, i2


def is_iso(phi: ModuleMap) -> bool:
    C, _ = cokernel(phi)
    if not C.is_zero_module():
        return False
    K, _ = kernel(phi)
    return K.is_zero_module()


def iso_failure_certificate(phi: ModuleMap):
    """A machine-checkable witness when phi is not an isomorphism."""
    C, _ = cokernel(phi)
    if not C.is_zero_module():
        for i in range(C.gens):
            e = [C.ring.zero()] * C.gens
            e[i] = C.ring.one()
            if not C.contains_column(tuple(e)):
                return {"kind": "cokernel_generator", "index": i}
    K, incl = kernel(phi)
    if not K.is_zero_module():
        for j in range(K.gens):
            col = incl.column(j)
            if not phi.source.contains_column(col):
                return {"kind": "kernel_element", "column": [str(p) for p in col]}
    return None


def invert_iso(phi: ModuleMap) -> ModuleMap:
    """Two-sided inverse of an isomorphism (raises LiftError otherwise)."""
    ring = phi.ring
    cols = [_column_vec(phi.column(j)) for j in range(phi.source.gens)]
    cols += [_column_vec(c) for c in phi.target.relations]
    lifter = SubmoduleLifter(ring, cols, phi.target.gens)
    matrix = [[ring.zero()] * phi.target.gens for _ in range(phi.source.gens)]
    for k in range(phi.target.gens):
        e = [ring.zero()] * phi.target.gens
        e[k] = ring.one()
        cof = lifter.lift(_column_vec(tuple(e)))
        if cof is None:
            raise LiftError("map is not surjective; no inverse")
        for j in range(phi.source.gens):
            matrix[j][k] = Poly(ring, ring.reduce_terms(cof[j]))
    psi = ModuleMap(phi.target, phi.source, matrix)
    if not psi.compose(phi).equals(ModuleMap.identity(phi.source)):
        raise LiftError("right inverse is not a left inverse; map is not injective")
    return psi


# ---------------------------------------------------------------------------
# chain colimits


@dataclass
class ChainColimitResult:
    stages: list
    transitions: list
    value: PresentedModule
    stabilized_at: int | None
    truncated: bool
    saturated: bool = False
    saturated_transitions: list = field(default_factory=list)


def chain_colimit(stage, n_max: int) -> ChainColimitResult:
    """Evaluate a chain given by stage(n) -> (module_n, transition_n) where
    transition_n maps stage n to stage n+1.

    Stabilization policy: stage 0 is accepted only when the chain is literally
    constant there (identity transitions on identical presentations); from
    n = 1 on, two consecutive isomorphism transitions stabilize the chain at
    n.  Otherwise the result is truncated at n_max.
    """
    if n_max < 1:
        raise AlgebraError("n_max must be >= 1")
    cache: dict = {}

    def get(n):
        if n not in cache:
            cache[n] = stage(n)
        return cache[n]

    def module_at(n):
        return get(n)[0]

    def transition_at(n):
        t = get(n)[1]
        if t.source != module_at(n):
            raise AlgebraError("transition source does not match its stage")
        return t

    iso_flags: dict = {}

    def iso(n):
        if n not in iso_flags:
            iso_flags[n] = is_iso(transition_at(n))
        return iso_flags[n]

    stages = [module_at(0)]
    transitions = []

    def result(value, stabilized_at, truncated, upto):
        for n in range(upto + 1):
            if n >= len(stages):
                stages.append(module_at(n))
            if n < upto and n >= len(transitions):
                transitions.append(transition_at(n))
        return ChainColimitResult(stages, transitions, value, stabilized_at, truncated)

    if n_max >= 1 and transition_at(0).is_literal_identity():
        if n_max == 1 or transition_at(1).is_literal_identity():
            return result(module_at(0), 0, False, min(2, n_max))
    for n in range(1, n_max - 1):
        if iso(n) and iso(n + 1):
            return result(module_at(n), n, False, n + 2)
    return result(module_at(n_max), None, True, n_max)


# ---------------------------------------------------------------------------
# graded dimensions


def ring_is_graded(ring: PolyRing) -> bool:
    """True when the quotient ideal is homogeneous for the ring's weights."""
    for q in ring.quotient_gb:
        if len({ring.mono_degree(e) for e in q}) > 1:
            return False
    return True


def graded_dim(M: PresentedModule, d: int) -> int:
    """Base-field dimension of the degree-d component."""
    if M.grading is None:
        raise UngradedError("module carries no grading")
    ring = M.ring
    if not ring_is_graded(ring):
        raise UngradedError("ring quotient ideal is not homogeneous")
    basis = []
    index = {}
    for i in range(M.gens):
        for m in monomials_of_degree(ring, d - M.grading[i]):
            index[(i, m)] = len(basis)
            basis.append((i, m))
    if not basis:
        return 0
    rows = []
    zero = ring.field.zero()
    for col in M.relations:
        cd = column_degree(ring, col, M.grading)
        if cd == "zero":
            continue
        for m in monomials_of_degree(ring, d - cd):
            mult = ring.monomial(m)
            row = [zero] * len(basis)
            for i, p in enumerate(col):
                prod = mult * p
                for e, c in prod.terms.items():
                    k = index.get((i, e))
                    if k is None:
                        raise AlgebraError(
                            "internal: homogeneous relation multiple left its degree stratum")
                    row[k] = c
            rows.append(row)
    if not rows:
        return len(basis)
    return len(basis) - linalg.rank(rows, ring.field)
