"""Exact multivariate polynomial arithmetic and the Groebner/syzygy engine.

Coefficients are exact: `fractions.Fraction` over the rationals, machine
integers in [0, p) over a prime field.  Polynomials are stored as
{exponent-tuple: coefficient} maps and are always kept in normal form with
respect to the ring's quotient ideal, so equality of polynomials is equality
in the quotient ring.

The module-level Groebner engine works on "raw vectors": dicts mapping
(position, exponent-tuple) to a coefficient.  Ring elements are rank-1
vectors.  The module order is position-over-term with descending positions
(position 0 is largest).  Quotient rings are handled by appending the
quotient generators, placed in every position, to the divisor sets.
"""

from __future__ import annotations

import heapq
import re
from fractions import Fraction

from .errors import (
    AlgebraError,
    RankMismatchError,
    RingMismatchError,
    VariableMismatchError,
)


# ---------------------------------------------------------------------------
# fields


class BaseField:
    """The rationals (p == 0) or a prime field F_p."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p:
            if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
                raise AlgebraError(f"{p} is not prime")
        self.p = p

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def of(self, value):
        """Coerce an int, Fraction, or coefficient string into the field."""
        if isinstance(value, str):
            return self.parse_coeff(value)
        if self.p:
            if isinstance(value, Fraction):
                if value.denominator % self.p == 0:
                    raise AlgebraError(f"denominator not invertible mod {self.p}")
                return (value.numerator * self.inv(value.denominator % self.p)) % self.p
            return int(value) % self.p
        return Fraction(value)

    def zero(self):
        return 0 if self.p else Fraction(0)

    def one(self):
        return 1 if self.p else Fraction(1)

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if self.p:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of 0")
            return pow(a, self.p - 2, self.p)
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def parse_coeff(self, text):
        text = text.strip()
        m = re.fullmatch(r"\(\s*(-?\d+)\s+mod\s+(\d+)\s*\)", text)
        if m:
            if not self.p or int(m.group(2)) != self.p:
                raise AlgebraError(f"coefficient {text!r} does not match field {self}")
            return int(m.group(1)) % self.p
        if "/" in text:
            num, den = text.split("/")
            return self.of(Fraction(int(num), int(den)))
        return self.of(int(text))

    def coeff_str(self, c) -> str:
        if self.p:
            return f"({int(c) % self.p} mod {self.p})"
        return str(c)

    def __eq__(self, other):
        return isinstance(other, BaseField) and self.p == other.p

    def __hash__(self):
        return hash(("BaseField", self.p))

    def __repr__(self):
        return "QQ" if not self.p else f"GF({self.p})"

    def to_json(self):
        return "QQ" if not self.p else {"p": self.p}

    @staticmethod
    def from_json(data) -> "BaseField":
        if data == "QQ":
            return QQ
        return BaseField(int(data["p"]))


QQ = BaseField(0)


def GF(p: int) -> BaseField:
    return BaseField(p)


# ---------------------------------------------------------------------------
# monomials and orders

ORDERS = ("grevlex", "lex", "grlex")


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    """True if monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a, b):
    """Exponent vector of a / b; caller guarantees divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def make_order_key(order: str):
    """Sort key monotone with the monomial order: bigger key = bigger monomial.

    Orders always use the unweighted total degree; grading weights never enter
    the division order (negative weights would destroy the well-ordering).
    """
    if order not in ORDERS:
        raise AlgebraError(f"unknown monomial order {order!r}")

    if order == "lex":
        return lambda e: e
    if order == "grlex":
        return lambda e: (sum(e), e)

    def grevlex_key(e):
        return (sum(e), tuple(-x for x in reversed(e)))

    return grevlex_key


# ---------------------------------------------------------------------------
# polynomial ring


class PolyRing:
    """Polynomial ring over QQ or F_p, optionally modulo a quotient ideal.

    The quotient ideal is stored as its reduced Groebner basis, computed once
    at construction.  `weights` assigns an integer degree to each variable
    (default 1) and is what graded_dim and homogeneity tests use.
    """

    __slots__ = ("field", "variables", "order", "weights", "quotient_gb",
                 "_key", "_var_index", "_free", "_one_member_cache")

    def __init__(self, field: BaseField, variables, order: str = "grevlex",
                 quotient=(), weights=None):
        self.field = field
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise AlgebraError("duplicate variable names")
        self.order = order
        self.weights = tuple(weights) if weights is not None else (1,) * len(self.variables)
        if len(self.weights) != len(self.variables):
            raise AlgebraError("weights length must match variable count")
        self._key = make_order_key(order)
        self._var_index = {v: i for i, v in enumerate(self.variables)}
        self._one_member_cache = None
        quotient = tuple(quotient)
        if not quotient:
            self.quotient_gb = ()
            self._free = self
        else:
            free = PolyRing(field, self.variables, order, (), self.weights)
            gens = [free.poly(q).terms for q in quotient]
            gb = _buchberger([_poly_to_vec(t) for t in gens if t], free, 1)
            self.quotient_gb = tuple(_vec_to_poly_terms(v) for v in gb)
            self._free = free

    def free(self) -> "PolyRing":
        """The same ring with no quotient ideal."""
        return self._free

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def monomial_key(self, exps):
        return self._key(exps)

    def mono_degree(self, exps) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    # -- element construction ------------------------------------------------

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {(0,) * self.nvars: self.field.one()})

    def constant(self, c) -> "Poly":
        c = self.field.of(c)
        return Poly(self, {} if not c else {(0,) * self.nvars: c})

    def var(self, name: str) -> "Poly":
        if name not in self._var_index:
            raise VariableMismatchError(f"no variable {name!r} in {self.variables}")
        e = [0] * self.nvars
        e[self._var_index[name]] = 1
        return Poly(self, self.reduce_terms({tuple(e): self.field.one()}))

    def monomial(self, exps, coeff=1) -> "Poly":
        c = self.field.of(coeff)
        terms = {tuple(exps): c} if c else {}
        return Poly(self, self.reduce_terms(terms))

    def poly(self, source) -> "Poly":
        """Coerce a string, int, Fraction, or Poly into this ring."""
        if isinstance(source, Poly):
            if source.ring is self:
                return source
            if source.ring.variables != self.variables or source.ring.field != self.field:
                raise RingMismatchError("cannot coerce polynomial between different rings")
            return Poly(self, self.reduce_terms(dict(source.terms)))
        if isinstance(source, (int, Fraction)):
            return self.constant(source)
        if isinstance(source, str):
            return Poly(self, self.reduce_terms(_parse_poly(source, self)))
        raise AlgebraError(f"cannot build polynomial from {source!r}")

    def reduce_terms(self, terms: dict) -> dict:
        """Normal form of a raw term dict modulo the quotient ideal."""
        if not self.quotient_gb or not terms:
            return terms
        vec = _poly_to_vec(terms)
        red, _ = _vec_reduce(vec, self._quotient_divisors(1), self._free, 1)
        return _vec_to_poly_terms(red)

    def _quotient_divisors(self, rank: int):
        """Quotient generators placed in each of `rank` positions, prepared."""
        out = []
        for q in self.quotient_gb:
            for pos in range(rank):
                out.append(_prepare({(pos, e): c for e, c in q.items()}, self._free))
        return out

    def contains_one(self, gens) -> bool:
        """Ideal membership of 1 in <gens> + quotient ideal."""
        gb = groebner(list(gens), self)
        return len(gb) == 1 and gb[0].is_one()

    # -- identity ------------------------------------------------------------

    def signature(self):
        return (self.field.p, self.variables, self.order, self.weights,
                tuple(sorted(str(Poly(self._free, dict(q))) for q in self.quotient_gb)))

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        base = f"{self.field}[{', '.join(self.variables)}]"
        if self.quotient_gb:
            qs = ", ".join(str(Poly(self._free, dict(q))) for q in self.quotient_gb)
            return f"{base}/({qs})"
        return base

    def to_json(self):
        data = {
            "field": self.field.to_json(),
            "variables": list(self.variables),
            "order": self.order,
            "quotient_generators": [str(Poly(self._free, dict(q))) for q in self.quotient_gb],
        }
        if any(w != 1 for w in self.weights):
            data["weights"] = list(self.weights)
        return data

    @staticmethod
    def from_json(data) -> "PolyRing":
        return PolyRing(
            BaseField.from_json(data["field"]),
            data["variables"],
            data.get("order", "grevlex"),
            tuple(data.get("quotient_generators", ())),
            data.get("weights"),
        )


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Immutable polynomial, stored in normal form for its ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.ring.nvars: self.ring.field.one()}

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def _coerced(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatchError("polynomials over different rings")
            return other
        return self.ring.poly(other)

    def __add__(self, other):
        other = self._coerced(other)
        field = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = field.add(out.get(e, field.zero()), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.ring, out)

    def __neg__(self):
        field = self.ring.field
        return Poly(self.ring, {e: field.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerced(other))

    def __mul__(self, other):
        other = self._coerced(other)
        field = self.ring.field
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = mono_mul(e1, e2)
                s = field.add(out.get(e, field.zero()), field.mul(c1, c2))
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Poly(self.ring, self.ring.reduce_terms(out))

    __rmul__ = __mul__
    __radd__ = __add__

    def __rsub__(self, other):
        return self._coerced(other) - self

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative polynomial power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = self.ring.field.of(c)
        if not c:
            return self.ring.zero()
        field = self.ring.field
        return Poly(self.ring, {e: field.mul(v, c) for e, v in self.terms.items()})

    def leading_term(self):
        """(exps, coeff) of the leading term; None for the zero polynomial."""
        if not self.terms:
            return None
        e = max(self.terms, key=self.ring.monomial_key)
        return e, self.terms[e]

    def degree(self):
        """Weighted total degree; None for the zero polynomial."""
        if not self.terms:
            return None
        return max(self.ring.mono_degree(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.mono_degree(e) for e in self.terms}) <= 1

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ring.monomial_key(t[0]), reverse=True)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            try:
                other = self._coerced(other)
            except AlgebraError:
                return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.signature(), tuple(sorted(self.terms.items()))))

    def __str__(self):
        return _poly_str(self)

    def __repr__(self):
        return f"Poly({self})"


def _mono_str(ring: PolyRing, exps) -> str:
    parts = []
    for name, e in zip(ring.variables, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _poly_str(p: Poly) -> str:
    if not p.terms:
        return "0"
    field = p.ring.field
    chunks = []
    for exps, c in p.sorted_terms():
        mono = _mono_str(p.ring, exps)
        if field.is_rational:
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            body = mono if (mag == 1 and mono) else (f"{mag}*{mono}" if mono else f"{mag}")
        else:
            sign = "+"
            body = mono if (c == field.one() and mono) else (
                f"{field.coeff_str(c)}*{mono}" if mono else field.coeff_str(c))
        chunks.append((sign, body))
    first_sign, first_body = chunks[0]
    out = first_body if first_sign == "+" else f"-{first_body}"
    for sign, body in chunks[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z_0-9]*|\*\*|[()+\-*/^])")


def _tokenize(text: str):
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise AlgebraError(f"malformed polynomial near {text[pos:pos + 12]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    tokens.append(None)
    return tokens


def _parse_poly(text: str, ring: PolyRing) -> dict:
    """Recursive-descent parser for +, -, *, ^/** , parentheses, and the
    coefficient forms `num`, `num/den`, `(k mod p)`."""
    tokens = _tokenize(text)
    idx = [0]

    def peek():
        return tokens[idx[0]]

    def advance():
        idx[0] += 1
        return tokens[idx[0] - 1]

    def parse_expr() -> Poly:
        sign = 1
        while peek() in ("+", "-"):
            if advance() == "-":
                sign = -sign
        node = parse_term()
        if sign < 0:
            node = -node
        while peek() in ("+", "-"):
            op = advance()
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term() -> Poly:
        node = parse_factor()
        while True:
            if peek() == "*":
                advance()
                node = node * parse_factor()
            elif peek() == "/":
                advance()
                den = advance()
                if den is None or not den.isdigit():
                    raise AlgebraError("division only by integer literals")
                node = node.scale(ring.field.of(Fraction(1, int(den))) if ring.field.is_rational
                                  else ring.field.inv(int(den) % ring.field.p))
            else:
                return node

    def parse_factor() -> Poly:
        base = parse_atom()
        if peek() in ("^", "**"):
            advance()
            exp = advance()
            if exp is None or not exp.isdigit():
                raise AlgebraError("exponent must be a non-negative integer literal")
            return base ** int(exp)
        return base

    def parse_atom() -> Poly:
        tok = advance()
        if tok == "-":
            return -parse_atom()
        if tok == "(":
            # either a parenthesized expression or the `(k mod p)` form
            if (tokens[idx[0]] is not None and tokens[idx[0]].lstrip("-").isdigit()
                    and tokens[idx[0] + 1] == "mod"):
                k = int(advance())
                advance()
                p = int(advance())
                if advance() != ")":
                    raise AlgebraError("unclosed (k mod p) coefficient")
                if not ring.field.p or ring.field.p != p:
                    raise AlgebraError(f"(k mod {p}) coefficient in ring over {ring.field}")
                return ring.constant(k)
            node = parse_expr()
            if advance() != ")":
                raise AlgebraError("unbalanced parentheses")
            return node
        if tok is None:
            raise AlgebraError("unexpected end of polynomial")
        if tok.isdigit():
            return ring.constant(int(tok))
        if tok in ring._var_index:
            return ring.var(tok)
        raise VariableMismatchError(f"unknown symbol {tok!r} for ring {ring!r}")

    result = parse_expr()
    if peek() is not None:
        raise AlgebraError(f"trailing input after polynomial: {peek()!r}")
    return dict(result.terms)


# ---------------------------------------------------------------------------
# raw vector engine (free ring only; quotients handled by appended divisors)
#
# vec: dict[(pos, exps)] -> coeff.  Module order: position-over-term with
# position 0 largest; ties broken by the ring's monomial order.


def _poly_to_vec(terms: dict, pos: int = 0) -> dict:
    return {(pos, e): c for e, c in terms.items()}


def _vec_to_poly_terms(vec: dict) -> dict:
    return {e: c for (_, e), c in vec.items()}


def _vkey(ring: PolyRing, elim_rank: int | None = None):
    key = ring._key
    if elim_rank is None:
        return lambda t: (-t[0],) + tuple(key(t[1]))
    # elimination key: original positions (< elim_rank) dominate tag positions
    def ekey(t):
        return ((1 if t[0] < elim_rank else 0), -t[0]) + tuple(key(t[1]))
    return ekey


def _vec_lt(vec: dict, keyf):
    return max(vec, key=keyf)


class _Prepared:
    """A divisor with cached leading-term data."""

    __slots__ = ("vec", "lt", "lc", "pos", "exps", "sugar", "track")

    def __init__(self, vec, keyf, ring, track=None):
        self.vec = vec
        self.lt = _vec_lt(vec, keyf)
        self.lc = vec[self.lt]
        self.pos, self.exps = self.lt
        self.sugar = max(sum(e) for (_, e) in vec)
        self.track = track


def _prepare(vec, ring, keyf=None, track=None) -> _Prepared:
    return _Prepared(vec, keyf or _vkey(ring), ring, track)


def _vec_scale_shift(vec: dict, coeff, shift, field) -> dict:
    return {(p, mono_mul(e, shift)): field.mul(c, coeff) for (p, e), c in vec.items()}


def _vec_sub_inplace(target: dict, other: dict, field):
    for k, c in other.items():
        s = field.sub(target.get(k, field.zero()), c)
        if s:
            target[k] = s
        else:
            target.pop(k, None)


def _vec_reduce(vec: dict, divisors: list, ring: PolyRing, rank: int,
                keyf=None, track_len: int = 0):
    """Full normal form of vec by the prepared divisors.

    Returns (remainder, cofactors) where cofactors is a list of term dicts,
    one per divisor, when track_len > 0 (only the first track_len divisors
    are tracked); otherwise cofactors is None.
    """
    field = ring.field
    keyf = keyf or _vkey(ring)
    work = dict(vec)
    remainder: dict = {}
    cof = [dict() for _ in range(track_len)] if track_len else None
    while work:
        t = max(work, key=keyf)
        pos, exps = t
        c = work[t]
        hit = None
        for i, d in enumerate(divisors):
            if d.pos == pos and mono_divides(d.exps, exps):
                hit = (i, d)
                break
        if hit is None:
            remainder[t] = c
            del work[t]
            continue
        i, d = hit
        factor = field.div(c, d.lc)
        shift = mono_div(exps, d.exps)
        _vec_sub_inplace(work, _vec_scale_shift(d.vec, factor, shift, field), field)
        if cof is not None and i < track_len:
            prev = cof[i].get(shift, field.zero())
            s = field.add(prev, factor)
            if s:
                cof[i][shift] = s
            else:
                cof[i].pop(shift, None)
    return remainder, cof


def _track_combine(track_target: dict, track_src: dict, coeff, shift, field):
    for (i, e), c in track_src.items():
        k = (i, mono_mul(e, shift))
        s = field.add(track_target.get(k, field.zero()), field.mul(c, coeff))
        if s:
            track_target[k] = s
        else:
            track_target.pop(k, None)


def _buchberger(vecs: list, ring: PolyRing, rank: int, keyf=None, track: bool = False):
    """Reduced Groebner basis of the submodule generated by vecs.

    With track=True, also returns representations: for each basis element a
    dict {(input_index, exps): coeff} expressing it over the input vectors.
    Selection: sugar strategy; pruning: product criterion (rank-1 leading
    positions only) and the chain criterion.
    """
    field = ring.field
    keyf = keyf or _vkey(ring)

    G: list[_Prepared] = []
    for i, v in enumerate(vecs):
        if not v:
            continue
        t = {(i, (0,) * ring.nvars): field.one()} if track else None
        G.append(_prepare(dict(v), ring, keyf, t))

    def monic(prep: _Prepared) -> _Prepared:
        if prep.lc == field.one():
            return prep
        inv = field.inv(prep.lc)
        v = {k: field.mul(c, inv) for k, c in prep.vec.items()}
        t = None
        if prep.track is not None:
            t = {k: field.mul(c, inv) for k, c in prep.track.items()}
        return _prepare(v, ring, keyf, t)

    G = [monic(g) for g in G]

    pairs: list = []
    done_pairs: set = set()

    def pair_key(i, j):
        gi, gj = G[i], G[j]
        lcm = mono_lcm(gi.exps, gj.exps)
        sugar = max(sum(mono_div(lcm, gi.exps)) + gi.sugar,
                    sum(mono_div(lcm, gj.exps)) + gj.sugar)
        return (sugar, tuple(lcm), i, j)

    def push_pairs_with(j):
        gj = G[j]
        for i in range(j):
            gi = G[i]
            if gi.pos != gj.pos:
                continue
            heapq.heappush(pairs, (*pair_key(i, j), i, j))

    for j in range(len(G)):
        push_pairs_with(j)

    def reduce_full(vec, trackvec):
        work = dict(vec)
        tr = dict(trackvec) if trackvec is not None else None
        remainder: dict = {}
        while work:
            t = max(work, key=keyf)
            pos, exps = t
            c = work[t]
            hit = None
            for d in G:
                if d.pos == pos and mono_divides(d.exps, exps):
                    hit = d
                    break
            if hit is None:
                remainder[t] = c
                del work[t]
                continue
            factor = field.div(c, hit.lc)
            shift = mono_div(exps, hit.exps)
            _vec_sub_inplace(work, _vec_scale_shift(hit.vec, factor, shift, field), field)
            if tr is not None:
                neg = field.neg(factor)
                _track_combine(tr, hit.track, neg, shift, field)
        return remainder, tr

    while pairs:
        *_, i, j = heapq.heappop(pairs)
        if (i, j) in done_pairs:
            continue
        done_pairs.add((i, j))
        gi, gj = G[i], G[j]
        lcm = mono_lcm(gi.exps, gj.exps)
        # product criterion: valid for ring elements (rank-1 leading data)
        if rank == 1 and all(a == 0 or b == 0 for a, b in zip(gi.exps, gj.exps)):
            continue
        # chain criterion
        skip = False
        for k, gk in enumerate(G):
            if k in (i, j) or gk.pos != gi.pos:
                continue
            if mono_divides(gk.exps, lcm):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a in done_pairs and b in done_pairs:
                    skip = True
                    break
        if skip:
            continue
        si, sj = mono_div(lcm, gi.exps), mono_div(lcm, gj.exps)
        spoly = _vec_scale_shift(gi.vec, field.one(), si, field)
        _vec_sub_inplace(spoly, _vec_scale_shift(gj.vec, field.one(), sj, field), field)
        strack = None
        if track:
            strack = {}
            _track_combine(strack, gi.track, field.one(), si, field)
            _track_combine(strack, gj.track, field.neg(field.one()), sj, field)
        red, rtrack = reduce_full(spoly, strack)
        if red:
            G.append(monic(_prepare(red, ring, keyf, rtrack)))
            push_pairs_with(len(G) - 1)

    # minimal basis: drop elements whose leading term is divisible by another's
    keep = []
    for idx, g in enumerate(G):
        lt_divisible = False
        for k in range(len(G)):
            if k == idx:
                continue
            other = G[k]
            if other.pos == g.pos and mono_divides(other.exps, g.exps):
                if other.exps == g.exps and k > idx:
                    continue
                lt_divisible = True
                break
        if not lt_divisible:
            keep.append(idx)

    minimal = [G[k] for k in keep]

    # tail-reduce each element by the others
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        rem, cof = _vec_reduce(g.vec, others, ring, rank, keyf,
                               track_len=len(others) if track else 0)
        tr = None
        if track:
            tr = dict(g.track)
            for d, cterms in zip(others, cof or []):
                for shift, c in cterms.items():
                    _track_combine(tr, d.track, field.neg(c), shift, field)
        if rem:
            reduced.append(monic(_prepare(rem, ring, keyf, tr)))

    reduced.sort(key=lambda g: keyf(g.lt), reverse=True)
    if track:
        return [g.vec for g in reduced], [g.track for g in reduced]
    return [g.vec for g in reduced]


def _module_gb(columns: list, ring: PolyRing, rank: int):
    """Reduced GB of the submodule of ring^rank generated by the columns,
    over the quotient ring (quotient generators appended in each position)."""
    free = ring.free()
    vecs = [dict(c) for c in columns if c]
    for q in ring.quotient_gb:
        for pos in range(rank):
            vecs.append({(pos, e): c for e, c in q.items()})
    return _buchberger(vecs, free, rank)


def _syzygy_vecs(columns: list, ring: PolyRing, rank: int) -> list:
    """Generators of {c : sum c_i * columns_i = 0 in ring^rank} over the
    quotient ring.  Returned vectors live in positions 0..len(columns)-1."""
    free = ring.free()
    n = len(columns)
    work = []
    for i, col in enumerate(columns):
        v = dict(col)
        v[(rank + i, (0,) * ring.nvars)] = ring.field.one()
        work.append(v)
    extra = 0
    for q in ring.quotient_gb:
        for pos in range(rank):
            v = {(pos, e): c for e, c in q.items()}
            v[(rank + n + extra, (0,) * ring.nvars)] = ring.field.one()
            work.append(v)
            extra += 1
    keyf = _vkey(free, elim_rank=rank)
    gb = _buchberger(work, free, rank + n + extra, keyf=keyf)
    out = []
    for g in gb:
        if all(p >= rank for (p, _) in g):
            proj = {(p - rank, e): c for (p, e), c in g.items() if p - rank < n}
            if proj:
                out.append(proj)
    return out


class SubmoduleLifter:
    """Tracked Groebner data for one column set: membership plus explicit
    cofactor lifts.  Cofactors over appended quotient columns are dropped."""

    def __init__(self, ring: PolyRing, columns: list, rank: int):
        self.ring = ring
        self.rank = rank
        self.n = len(columns)
        free = ring.free()
        vecs = [dict(c) for c in columns]
        for q in ring.quotient_gb:
            for pos in range(rank):
                vecs.append({(pos, e): c for e, c in q.items()})
        self._gb, self._reprs = _buchberger(vecs, free, rank, track=True)
        self._prepared = [_prepare(v, free) for v in self._gb]
        self._free = free

    def reduce(self, vec: dict):
        """(remainder, cofactors) with cofactors a list of n term dicts."""
        field = self.ring.field
        rem, cof = _vec_reduce(vec, self._prepared, self._free, self.rank,
                               track_len=len(self._prepared))
        out = [dict() for _ in range(self.n)]
        for gidx, cterms in enumerate(cof):
            rep = self._reprs[gidx]
            for shift, c in cterms.items():
                for (i, e), rc in rep.items():
                    if i >= self.n:
                        continue
                    k = mono_mul(e, shift)
                    s = field.add(out[i].get(k, field.zero()), field.mul(rc, c))
                    if s:
                        out[i][k] = s
                    else:
                        out[i].pop(k, None)
        return rem, out

    def contains(self, vec: dict) -> bool:
        rem, _ = _vec_reduce(vec, self._prepared, self._free, self.rank)
        return not rem

    def lift(self, vec: dict):
        """Cofactor term dicts if vec lies in the submodule, else None."""
        rem, cof = self.reduce(vec)
        if rem:
            return None
        return cof


# ---------------------------------------------------------------------------
# free-module elements and the public operations


class FreeVector:
    """Element of a free module ring^rank, entries indexed by position."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: PolyRing, entries):
        self.ring = ring
        self.entries = tuple(ring.poly(e) for e in entries)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.entries)

    def to_vec(self) -> dict:
        out = {}
        for pos, p in enumerate(self.entries):
            for e, c in p.terms.items():
                out[(pos, e)] = c
        return out

    @staticmethod
    def from_vec(ring: PolyRing, rank: int, vec: dict) -> "FreeVector":
        cols = [dict() for _ in range(rank)]
        for (pos, e), c in vec.items():
            cols[pos][e] = c
        return FreeVector(ring, [Poly(ring, ring.reduce_terms(t)) for t in cols])

    def __eq__(self, other):
        return (isinstance(other, FreeVector) and self.ring == other.ring
                and self.entries == other.entries)

    def __repr__(self):
        return f"FreeVector([{', '.join(str(p) for p in self.entries)}])"


def normal_form(p, ring: PolyRing) -> Poly:
    """Unique remainder of p modulo the ring's quotient ideal."""
    return ring.poly(p)


def groebner(gens: list, ring: PolyRing) -> list:
    """Reduced Groebner basis of <gens> + quotient ideal, as polynomials of
    the free ring, sorted by leading monomial (descending)."""
    if not gens:
        raise AlgebraError("empty generator list")
    free = ring.free()
    vecs = []
    for g in gens:
        terms = ring.poly(g).terms
        if terms:
            vecs.append(_poly_to_vec(dict(terms)))
    for q in ring.quotient_gb:
        vecs.append(_poly_to_vec(dict(q)))
    if not vecs:
        return []
    gb = _buchberger(vecs, free, 1)
    return [Poly(free, _vec_to_poly_terms(v)) for v in gb]


def divide_with_cofactors(v: FreeVector, basis: list):
    """Division of v by the basis as given (not by a Groebner basis).

    Returns (remainder, cofactors) with v = sum cofactor_i * basis_i +
    remainder modulo the quotient ideal, and the remainder irreducible by the
    basis leading terms.
    """
    ring = v.ring
    rank = v.rank
    for b in basis:
        if b.rank != rank:
            raise RankMismatchError("basis element with different ambient rank")
    free = ring.free()
    divisors = [_prepare(b.to_vec(), free) for b in basis if not b.is_zero()]
    index_map = [i for i, b in enumerate(basis) if not b.is_zero()]
    divisors += ring._quotient_divisors(rank)
    rem, cof = _vec_reduce(v.to_vec(), divisors, free, rank, track_len=len(index_map))
    cofactors = [ring.zero()] * len(basis)
    for slot, terms in enumerate(cof):
        cofactors[index_map[slot]] = Poly(ring, ring.reduce_terms(terms))
    return FreeVector.from_vec(ring, rank, rem), cofactors


def syzygies(gens: list, ring: PolyRing) -> list:
    """Generating set of the syzygy module of gens inside ring^rank."""
    if not gens:
        raise AlgebraError("empty generator list")
    rank = gens[0].rank
    for g in gens:
        if g.rank != rank:
            raise RankMismatchError("generators with different ambient ranks")
    raw = _syzygy_vecs([g.to_vec() for g in gens], ring, rank)
    return [FreeVector.from_vec(ring, len(gens), v) for v in raw]


# ---------------------------------------------------------------------------
# ring homomorphisms


class RingHom:
    """Ring homomorphism given by variable images; the base field is fixed."""

    def __init__(self, src: PolyRing, dst: PolyRing, images: dict):
        if src.field != dst.field:
            raise RingMismatchError("ring homomorphisms must fix the base field")
        self.src = src
        self.dst = dst
        self.images = {v: dst.poly(images[v]) for v in src.variables}
        for q in src.quotient_gb:
            img = self._apply_terms(dict(q))
            if not img.is_zero():
                raise AlgebraError(
                    f"ill-defined homomorphism: quotient relation {Poly(src.free(), dict(q))} "
                    f"maps to {img} != 0")

    def _apply_terms(self, terms: dict) -> Poly:
        out = self.dst.zero()
        for exps, c in terms.items():
            m = self.dst.constant(c)
            for name, e in zip(self.src.variables, exps):
                if e:
                    m = m * (self.images[name] ** e)
            out = out + m
        return out

    def apply(self, p) -> Poly:
        return self._apply_terms(self.src.poly(p).terms)

    def apply_matrix(self, rows):
        return tuple(tuple(self.apply(x) for x in row) for row in rows)

    def compose(self, inner: "RingHom") -> "RingHom":
        """self after inner (inner: A -> B, self: B -> C)."""
        if inner.dst != self.src:
            raise RingMismatchError("non-composable ring homomorphisms")
        return RingHom(inner.src, self.dst,
                       {v: self.apply(inner.images[v]) for v in inner.src.variables})

    @staticmethod
    def inclusion(src: PolyRing, dst: PolyRing) -> "RingHom":
        return RingHom(src, dst, {v: dst.var(v) for v in src.variables})

    def __repr__(self):
        ims = ", ".join(f"{v} -> {self.images[v]}" for v in self.src.variables)
        return f"RingHom({self.src!r} -> {self.dst!r}; {ims})"


# ---------------------------------------------------------------------------
# bounded-degree monomial enumeration (for exact graded linear algebra)

def monomials_of_degree(ring: PolyRing, d: int) -> list:
    """All quotient-normal-form monomials of weighted degree d, sorted by the
    ring's order (descending).

    Supported ring shapes (the graded components are finite exactly there):
    all weights positive, or a single positive-weight variable together with
    inverse variables t_j of negative weight whose quotient leading monomials
    have the localization shape t_j * (positive-block monomial).
    """
    n = ring.nvars
    if n == 0:
        return [()] if d == 0 else []
    weights = ring.weights
    lms = [max(q, key=ring.monomial_key) for q in ring.quotient_gb]
    # zero-weight variables are only allowed when eliminated by the quotient
    # (their leading monomial is the bare variable, as for inverted constants)
    for i in range(n):
        if weights[i] == 0:
            unit_vec = tuple(1 if j == i else 0 for j in range(n))
            if not any(mono_divides(lm, unit_vec) and lm == unit_vec for lm in lms):
                raise AlgebraError(
                    "monomial enumeration requires nonzero or eliminated variable weights")

    def irreducible(exps) -> bool:
        return not any(mono_divides(lm, exps) for lm in lms)

    pos = [i for i in range(n) if weights[i] > 0]
    neg = [i for i in range(n) if weights[i] < 0]
    out = []

    def dfs_block(var_list, target, base_exps, collect):
        """Exponent vectors over var_list with weighted sum == target.

        All weights in var_list must have one sign; each variable is bounded
        by the remaining budget since the rest moves the sum the same way.
        """
        exps = list(base_exps)

        def rec(k, cur):
            if k == len(var_list):
                if cur == target:
                    collect(tuple(exps))
                return
            i = var_list[k]
            w = weights[i]
            bound = (target - cur) // w  # negative when the sign cannot work out
            for e in range(max(bound, -1) + 1):
                exps[i] = e
                rec(k + 1, cur + e * w)
                exps[i] = 0

        rec(0, 0)

    if not neg:
        dfs_block(pos, d, [0] * n, lambda m: out.append(m) if irreducible(m) else None)
    else:
        if len(pos) > 1:
            raise AlgebraError(
                "graded components over rings with several positive-weight and "
                "some negative-weight variables are not finite in general")
        # positive-block degree cap for monomials that use an inverse variable:
        # every inverse variable t_j has a leading monomial t_j * m_j, so a
        # positive exponent >= deg(m_j) together with t_j >= 1 is reducible
        cap = 0
        for lm in lms:
            if any(lm[j] for j in neg):
                cap = max(cap, sum(lm[i] for i in pos))
        # pure positive-block monomial
        if pos:
            i = pos[0]
            w = weights[i]
            if d % w == 0 and d // w >= 0:
                e = [0] * n
                e[i] = d // w
                if irreducible(tuple(e)):
                    out.append(tuple(e))
        elif d == 0:
            out.append((0,) * n)
        # monomials with at least one inverse variable
        a_values = range(cap) if pos else [0]
        for a in a_values:
            base = [0] * n
            if pos:
                base[pos[0]] = a
            target = d - (a * weights[pos[0]] if pos else 0)
            if target >= 0:
                # at least one inverse variable is required, so the negative
                # block must contribute <= -1
                continue
            def keep(m, _a=a):
                if any(m[j] for j in neg) and irreducible(m):
                    out.append(m)
            dfs_block(neg, target, base, keep)

    out.sort(key=ring.monomial_key, reverse=True)
    return out
