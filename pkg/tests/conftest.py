import random

import pytest

from idals import GF, QQ, PolyRing, PresentedModule, free_module, idal_from_ideal
from idals.fpmod import ModuleMap
from idals.fpmod import unit_module


@pytest.fixture(scope="session")
def R1():
    return PolyRing(QQ, ["x"])


@pytest.fixture(scope="session")
def R2():
    return PolyRing(QQ, ["x", "y"])


@pytest.fixture(scope="session")
def F5():
    return PolyRing(GF(5), ["x"])


def random_poly(ring, rng, deg=2, zero_ok=True, terms=3):
    n = ring.nvars
    out = ring.zero()
    for _ in range(rng.randint(0 if zero_ok else 1, terms)):
        e = [0] * n
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(n)] += 1
        out = out + ring.monomial(e, rng.choice([-2, -1, 1, 2]))
    if not zero_ok and out.is_zero():
        return ring.one()
    return out


def random_map_to_unit(ring, rng, k_max=3, deg=2):
    k = rng.randint(1, k_max)
    row = [random_poly(ring, rng, deg) for _ in range(k)]
    return ModuleMap(free_module(ring, k), unit_module(ring), [row], check=False)


def random_idal(ring, rng, gens_max=2, deg=2):
    k = rng.randint(1, gens_max)
    gens = [random_poly(ring, rng, deg, zero_ok=False) for _ in range(k)]
    return idal_from_ideal(gens, ring)


def random_module(ring, rng, gens_max=2, cols_max=2, deg=2):
    g = rng.randint(1, gens_max)
    cols = [tuple(random_poly(ring, rng, deg) for _ in range(g))
            for _ in range(rng.randint(0, cols_max))]
    return PresentedModule(ring, g, cols)


def random_graded_module_1var(ring, rng, col_deg_max=3):
    """Graded module over a univariate ring: shifts in [0,2], homogeneous
    relation columns of degree <= col_deg_max."""
    g = rng.randint(1, 2)
    shifts = [rng.randint(0, 2) for _ in range(g)]
    x = ring.var(ring.variables[0])
    cols = []
    for _ in range(rng.randint(0, 2)):
        d = rng.randint(max(shifts), col_deg_max)
        col = []
        for a in shifts:
            c = rng.choice([0, 1, -1, 2])
            col.append(ring.constant(c) * x ** (d - a) if c else ring.zero())
        if any(not p.is_zero() for p in col):
            cols.append(tuple(col))
    return PresentedModule(ring, g, cols, grading=shifts)


def random_homogeneous_module(ring, rng, gens_max=2, deg_max=2):
    """Graded module over any positively-weighted ring."""
    from idals.polyring import monomials_of_degree

    g = rng.randint(1, gens_max)
    shifts = [rng.randint(0, 1) for _ in range(g)]
    cols = []
    for _ in range(rng.randint(0, 2)):
        d = rng.randint(max(shifts), deg_max)
        col = []
        for a in shifts:
            monos = monomials_of_degree(ring, d - a)
            p = ring.zero()
            for m in monos:
                c = rng.choice([0, 0, 1, -1])
                if c:
                    p = p + ring.monomial(m, c)
            col.append(p)
        if any(not p.is_zero() for p in col):
            cols.append(tuple(col))
    return PresentedModule(ring, g, cols, grading=shifts)


def random_principal_cover(ring, rng, deg=2):
    """Two principal idals that cover: (f, f + c) with c a nonzero constant."""
    f = random_poly(ring, rng, deg, zero_ok=False)
    c = rng.choice([1, 2, -1])
    g = f + ring.constant(c)
    return idal_from_ideal([f], ring), idal_from_ideal([g], ring)
