"""Cross-validation of the Groebner kernel against sympy, when available.

These tests are an extra safety net and skip silently if sympy is not
installed; the package itself never imports it.
"""

import random

import pytest

sp = pytest.importorskip("sympy")

from sympy import QQ as SQQ

from idals import FreeVector, PolyRing, QQ, divide_with_cofactors, groebner, syzygies
from idals.polyring import SubmoduleLifter

from conftest import random_poly

X, Y = sp.symbols("x y")


def _to_mine(ring, sp_poly, syms):
    p = sp.Poly(sp_poly, *syms, domain="QQ")
    out = ring.zero()
    for monom, coeff in p.terms():
        out = out + ring.monomial(tuple(monom), sp.Rational(coeff))
    return out


def _to_sympy(p):
    out = 0
    for e, c in p.terms.items():
        out += sp.Rational(c) * X ** e[0] * Y ** e[1]
    return out


def _rand_sympy(syms, rng, deg=3, terms=4):
    p = 0
    for _ in range(rng.randint(1, terms)):
        m = rng.choice([-3, -2, -1, 1, 2, 3])
        for s in syms:
            m *= s ** rng.randint(0, deg)
        p += m
    return sp.expand(p)


def test_reduced_bases_agree_up_to_monic():
    rng = random.Random(99)
    for trial in range(40):
        nv = 2 if trial % 2 == 0 else 1
        syms = [X, Y][:nv]
        names = ["x", "y"][:nv]
        gens_sp = [_rand_sympy(syms, rng) for _ in range(rng.randint(2, 3))]
        gens_sp = [g for g in gens_sp if g != 0] or [sp.Integer(1)]
        order = "grevlex" if trial % 3 else "lex"
        ring = PolyRing(QQ, names, order)
        mine = {str(p) for p in groebner([_to_mine(ring, g, syms) for g in gens_sp], ring)}
        theirs = set()
        for g in sp.groebner(gens_sp, *syms, order=order).exprs:
            q = _to_mine(ring.free(), g, syms)
            _, lc = q.leading_term()
            theirs.add(str(q.scale(1 / lc)))
        assert mine == theirs


def test_ideal_membership_agrees():
    rng = random.Random(100)
    ring = PolyRing(QQ, ["x", "y"])
    for trial in range(25):
        gens_sp = [_rand_sympy([X, Y], rng) for _ in range(2)]
        gens_sp = [g for g in gens_sp if g != 0] or [sp.Integer(1)]
        probe_sp = sp.expand(_rand_sympy([X, Y], rng) * gens_sp[0]
                             + (_rand_sympy([X, Y], rng) if trial % 2 else 0))
        gb = groebner([_to_mine(ring, g, [X, Y]) for g in gens_sp], ring)
        probe = _to_mine(ring.free(), probe_sp, [X, Y])
        rem, _ = divide_with_cofactors(FreeVector(ring.free(), [probe]),
                                       [FreeVector(ring.free(), [g]) for g in gb])
        theirs = sp.groebner(gens_sp, X, Y, order="grevlex").contains(probe_sp)
        assert rem.is_zero() == theirs


def test_syzygy_modules_agree():
    rng = random.Random(7)
    R = PolyRing(QQ, ["x", "y"])
    for trial in range(15):
        k = rng.randint(2, 3)
        gens = [random_poly(R, rng, deg=2, zero_ok=False) for _ in range(k)]
        mine = syzygies([FreeVector(R, [g]) for g in gens], R)
        mine_vecs = [FreeVector(R, s.entries) for s in mine]
        lifter = SubmoduleLifter(R, [b.to_vec() for b in mine_vecs], k) \
            if mine_vecs else None

        ring_sp = SQQ.old_poly_ring(X, Y)
        sub = ring_sp.free_module(1).submodule(*[[_to_sympy(g)] for g in gens])
        for gen in sub.syzygy_module().gens:
            entries = []
            for comp in gen.data:
                expr = ring_sp.to_sympy(comp)
                p = R.zero()
                if expr != 0:
                    for monom, coeff in sp.Poly(expr, X, Y, domain="QQ").terms():
                        p = p + R.monomial(tuple(monom), sp.Rational(coeff))
                entries.append(p)
            v = FreeVector(R, entries)
            if not v.is_zero():
                assert lifter is not None and lifter.contains(v.to_vec())
