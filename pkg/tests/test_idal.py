import random

import pytest

from idals import (
    QQ,
    Idal,
    IdalMorphism,
    ModuleMap,
    PolyRing,
    PresentedModule,
    RingHom,
    cover_check,
    cover_check_pushout,
    free_idal_hom_size,
    free_module,
    idal_base_change,
    idal_check,
    idal_from_ideal,
    idal_power,
    idal_product,
    idal_reflect,
    is_iso,
    nilpotency_check,
    unit_module,
)
from idals.errors import AlgebraError, WellDefinednessError
from idals.idal import idal_check_witness

from conftest import random_idal, random_map_to_unit, random_poly


class TestIdalCheck:
    def test_scalar_endomorphism(self, R1):
        O = unit_module(R1)
        assert idal_check(ModuleMap(O, O, [["x"]]))

    def test_monomorphic_inclusion(self, R2):
        M = PresentedModule(R2, 2, [("y", R2.poly("-x"))], grading=[1, 1])
        assert idal_check(ModuleMap(M, unit_module(R2), [["x", "y"]]))

    def test_projection_fails_with_witness(self):
        Z = PolyRing(QQ, [])
        e = ModuleMap(free_module(Z, 2), unit_module(Z), [["1", "0"]])
        assert not idal_check(e)
        w = idal_check_witness(e)
        assert w is not None and w["difference"] != ["0", "0"]

    def test_requires_rank_one_target(self, R1):
        f = ModuleMap.identity(free_module(R1, 2))
        with pytest.raises(AlgebraError):
            idal_check(f)


class TestReflection:
    def test_existing_idal_reflects_isomorphically(self, R2):
        J = idal_from_ideal(["x", "y"], R2)
        _, pi = idal_reflect(J.e)
        assert is_iso(pi)

    def test_projection_collapses(self):
        Z = PolyRing(QQ, [])
        e = ModuleMap(free_module(Z, 2), unit_module(Z), [["1", "0"]])
        idal, _ = idal_reflect(e)
        from idals import graded_dim

        assert graded_dim(idal.carrier, 0) == 1
        assert is_iso(idal.e)

    def test_plane_ideal_carrier(self, R2):
        f = ModuleMap(free_module(R2, 2, [1, 1]), unit_module(R2), [["x", "y"]])
        idal, pi = idal_reflect(f)
        cols = {tuple(str(p) for p in c) for c in idal.carrier.relations}
        assert cols == {("y", "-x"), ("-y", "x")}
        assert idal.e.compose(pi).equals(f)

    def test_universal_property_randomized(self, R1, R2):
        rng = random.Random(21)
        for ring in (R1, R2):
            for _ in range(6):
                target = random_idal(ring, rng)
                k = rng.randint(1, 2)
                A = free_module(ring, k)
                h = ModuleMap(A, target.carrier,
                              [[random_poly(ring, rng) for _ in range(k)]
                               for _ in range(target.carrier.gens)], check=False)
                f = target.e.compose(h)
                refl, pi = idal_reflect(f)
                # the induced map out of the reflection exists and commutes
                u = ModuleMap(refl.carrier, target.carrier, h.matrix)
                assert u.compose(pi).equals(h)
                assert target.e.compose(u).equals(refl.e)


class TestProductAndPowers:
    def test_unit_law(self, R1):
        I = idal_from_ideal(["x"], R1)
        P = idal_product(I, Idal.identity(R1))
        w = ModuleMap(I.carrier, P.carrier, ModuleMap.identity(I.carrier).matrix)
        assert is_iso(w)
        assert P.e.compose(w).equals(I.e)

    def test_principal_product(self, R2):
        P = idal_product(idal_from_ideal(["x"], R2), idal_from_ideal(["y"], R2))
        assert [str(p) for p in P.image_generators()] == ["x*y"]

    def test_product_law_randomized(self, R1, R2):
        rng = random.Random(22)
        for ring in (R1, R2):
            for _ in range(5):
                P = idal_product(random_idal(ring, rng), random_idal(ring, rng))
                assert idal_check(P.e)

    def test_power_identity_transition(self, R1):
        I = idal_from_ideal(["x"], R1)
        _, t = idal_power(I, 2, 2)
        assert t.is_literal_identity()

    def test_scalar_power_transition(self, R1):
        I = idal_from_ideal(["x"], R1)
        _, t = idal_power(I, 3, 1)
        assert str(t.matrix[0][0]) == "x^2"

    def test_position_independence(self, R2):
        J = idal_from_ideal(["x", "y"], R2)
        tA = J.power_transition(2, 1, positions=[0])
        tB = J.power_transition(2, 1, positions=[1])
        assert tA.equals(tB)
        t3 = [J.power_transition(3, 1, positions=pos) for pos in ([0, 1], [0, 2], [1, 2])]
        assert t3[0].equals(t3[1]) and t3[1].equals(t3[2])

    def test_power_requires_order(self, R1):
        I = idal_from_ideal(["x"], R1)
        with pytest.raises(AlgebraError):
            idal_power(I, 1, 2)


class TestCovers:
    def test_identity_covers_anything(self, R1):
        assert cover_check(Idal.identity(R1), idal_from_ideal(["x^5"], R1))

    def test_partition_of_unity(self, R1):
        assert cover_check(idal_from_ideal(["x"], R1), idal_from_ideal(["x-1"], R1))

    def test_self_cover_fails(self, R1):
        I = idal_from_ideal(["x"], R1)
        assert not cover_check(I, I)

    def test_pushout_form_agrees(self, R1, R2):
        rng = random.Random(23)
        cases = [
            (idal_from_ideal(["x"], R1), idal_from_ideal(["x-1"], R1)),
            (idal_from_ideal(["x"], R1), idal_from_ideal(["x"], R1)),
            (Idal.identity(R2), idal_from_ideal(["x", "y"], R2)),
            (random_idal(R1, rng), random_idal(R1, rng)),
        ]
        for I, J in cases:
            assert cover_check(I, J) == cover_check_pushout(I, J)

    def test_regular_epi_rigidity(self, R1, R2):
        rng = random.Random(24)
        found = 0
        for ring in (R1, R2):
            for _ in range(10):
                I = random_idal(ring, rng)
                if ring.contains_one(I.image_generators()):
                    assert is_iso(I.e)
                    found += 1
        assert found > 0


class TestFromIdeal:
    def test_unit_generator(self, R1):
        I = idal_from_ideal(["1"], R1)
        assert is_iso(I.e)

    def test_plane_ideal(self, R2):
        I = idal_from_ideal(["x", "y"], R2)
        cols = {tuple(str(p) for p in c) for c in I.carrier.relations}
        assert ("y", "-x") in cols

    def test_squared_ideal(self, R2):
        I = idal_from_ideal(["x^2", "x*y", "y^2"], R2)
        assert [str(p) for p in I.image_generators()] == ["x^2", "x*y", "y^2"]
        assert not cover_check(I, I)
        assert idal_check(I.e)

    def test_zero_idal_is_legal(self, R1):
        Z = Idal.from_map(ModuleMap(zero := free_module(R1, 1), unit_module(R1), [["0"]]))
        assert nilpotency_check(Z, 2) == 1


class TestNilpotency:
    def test_zero_map(self, R1):
        O = unit_module(R1)
        e = Idal.from_map(ModuleMap(O, O, [["0"]]))
        assert nilpotency_check(e, 4) == 1

    def test_square_zero(self):
        Q = PolyRing(QQ, ["x"], quotient=["x^2"])
        O = unit_module(Q)
        e = Idal.from_map(ModuleMap(O, O, [["x"]]))
        assert nilpotency_check(e, 5) == 2

    def test_domain_has_none(self, R1):
        O = unit_module(R1)
        e = Idal.from_map(ModuleMap(O, O, [["x"]]))
        assert nilpotency_check(e, 5) is None


class TestFreeHomSizes:
    def test_values(self):
        assert free_idal_hom_size(3, 2) == 2
        assert free_idal_hom_size(0, 0) == 1
        assert free_idal_hom_size(1, 2) == 0
        assert free_idal_hom_size(4, 3) == 6


class TestBaseChange:
    def test_identity(self, R1):
        I = idal_from_ideal(["x"], R1)
        h = RingHom(R1, R1, {"x": "x"})
        out = idal_base_change(h, I)
        assert out.serialize() == I.serialize()

    def test_inverting_makes_iso(self, R1):
        L = PolyRing(QQ, ["x", "t"], quotient=["t*x-1"])
        h = RingHom(R1, L, {"x": "x"})
        out = idal_base_change(h, idal_from_ideal(["x"], R1))
        assert is_iso(out.e)

    def test_modding_out_a_variable(self, R2):
        Qx = PolyRing(QQ, ["x", "y"], quotient=["x"])
        h = RingHom(R2, Qx, {"x": "x", "y": "y"})
        out = idal_base_change(h, idal_from_ideal(["x", "y"], R2))
        gens = [str(p) for p in out.image_generators()]
        assert gens == ["0", "y"]

    def test_morphism_triangle_enforced(self, R1):
        I = idal_from_ideal(["x"], R1)
        J = idal_from_ideal(["x^2"], R1)
        IdalMorphism(J, I, ModuleMap(J.carrier, I.carrier, [["x"]]))
        with pytest.raises(WellDefinednessError):
            IdalMorphism(J, I, ModuleMap(J.carrier, I.carrier, [["1"]]))


class TestProductLocusIdentities:
    def test_square_has_same_covers_as_the_idal(self, R2):
        # the locus of J (x) J equals the locus of J: any test idal covers
        # with one iff it covers with the other
        J = idal_from_ideal(["x", "y"], R2)
        JJ = idal_product(J, J)
        assert JJ.carrier.gens == 4
        probes = [
            Idal.identity(R2),
            idal_from_ideal(["x-1", "y-1"], R2),
            idal_from_ideal(["x-1"], R2),
            idal_from_ideal(["x"], R2),
        ]
        for K in probes:
            assert cover_check(JJ, K) == cover_check(J, K)

    def test_pushout_cross_check_random_corpus(self, R1, R2):
        import random as _random

        from conftest import random_idal

        rng = _random.Random(41)
        for ring in (R1, R2):
            for _ in range(8):
                I = random_idal(ring, rng)
                J = random_idal(ring, rng)
                assert cover_check(I, J) == cover_check_pushout(I, J)
