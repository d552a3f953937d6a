"""Witt vector arithmetic against independent oracles."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wittforge.algebra import RingMismatchError, RingSpec
from wittforge.witt import (
    WittParams,
    WittVector,
    build_structure_polys,
    evaluate_int_poly,
    format_witt,
    ghost_invert,
    ideal_membership,
    parse_poly,
    parse_witt,
    teichmuller,
    witt_from_int,
)

Z = RingSpec(())
ZX = RingSpec(("x",))
ZA = RingSpec(("a",))
F3 = RingSpec((), modulus=3)
F9RING = RingSpec((), modulus=9)

RNG_SEED = 20260822


def scalar_witt(p, n, coords, ring=Z):
    return WittVector(WittParams(p, n), ring, list(coords))


def small_scalar_vectors(p, n):
    coords = st.integers(min_value=-9, max_value=9)
    return st.lists(coords, min_size=n, max_size=n).map(
        lambda cs: scalar_witt(p, n, cs)
    )


class TestStructurePolys:
    def test_sum_poly_level_one(self):
        cache = build_structure_polys(3, 2)
        expected = parse_poly(
            "X1 + Y1 - X0^2*Y0 - X0*Y0^2", cache.ring
        )
        assert cache.sum_polys[1] == expected

    def test_product_poly_level_one(self):
        cache = build_structure_polys(3, 2)
        expected = parse_poly(
            "X0^3*Y1 + X1*Y0^3 + 3*X1*Y1", cache.ring
        )
        assert cache.product_polys[1] == expected

    @pytest.mark.parametrize("p,n", [(3, 4), (5, 3), (7, 2)])
    def test_negation_is_coordinatewise_for_odd_p(self, p, n):
        cache = build_structure_polys(p, n)
        for s, poly in enumerate(cache.negation_polys):
            assert poly == -cache.ring.var(f"X{s}")

    def test_frobenius_poly_level_zero(self):
        cache = build_structure_polys(3, 2)
        expected = parse_poly("X0^3 + 3*X1", cache.ring)
        assert cache.frobenius_polys[0] == expected

    @pytest.mark.parametrize("p,n", [(3, 3), (5, 2), (7, 2)])
    def test_ghost_identities(self, p, n):
        assert build_structure_polys(p, n).verify_ghost_identities() == []


class TestArithmetic:
    def test_teichmuller_difference_exposes_lower_coordinates(self):
        params = WittParams(3, 2)
        x = ZX.var("x")
        diff = teichmuller(params, ZX, 1 + x) - teichmuller(params, ZX, 1)
        assert diff.coords[0] == x
        assert diff.coords[1] == x + x * x

    def test_length_two_matches_z_mod_9(self):
        # (a0, a1) -> a0^3 + 3*a1 is the ring isomorphism W_2(F_3) = Z/9
        def iso(w):
            a0 = w.coords[0].as_int()
            a1 = w.coords[1].as_int()
            return (pow(a0, 3, 9) + 3 * a1) % 9

        elements = [
            scalar_witt(3, 2, (a0, a1), F3) for a0 in range(3) for a1 in range(3)
        ]
        for a in elements:
            for b in elements:
                assert iso(a + b) == (iso(a) + iso(b)) % 9
                assert iso(a * b) == (iso(a) * iso(b)) % 9

    def test_length_three_matches_z_mod_27(self):
        def iso(w):
            return sum(
                3 ** s * pow(w.coords[s].as_int(), 9, 27) for s in range(3)
            ) % 27

        rng = random.Random(RNG_SEED)
        for _ in range(150):
            a = scalar_witt(3, 3, [rng.randrange(3) for _ in range(3)], F3)
            b = scalar_witt(3, 3, [rng.randrange(3) for _ in range(3)], F3)
            assert iso(a + b) == (iso(a) + iso(b)) % 27
            assert iso(a * b) == (iso(a) * iso(b)) % 27

    def test_torsion_free_and_modular_routes_agree(self):
        zx27 = RingSpec(("x",), modulus=27)
        params = WittParams(3, 3)
        rng = random.Random(RNG_SEED)

        def reduce(w):
            return WittVector(
                params, zx27, [c.substitute({}, ring=zx27) for c in w.coords]
            )

        for _ in range(25):
            a = WittVector(
                params, ZX, [ZX.random_element(rng, max_terms=2) for _ in range(3)]
            )
            b = WittVector(
                params, ZX, [ZX.random_element(rng, max_terms=2) for _ in range(3)]
            )
            assert reduce(a + b) == reduce(a) + reduce(b)
            assert reduce(a * b) == reduce(a) * reduce(b)
            assert reduce(-a) == -reduce(a)

    def test_from_int_is_additive_section(self):
        params = WittParams(3, 2)
        assert witt_from_int(params, Z, 5).coords == (Z.poly(5), Z.poly(-40))
        for c, d in [(2, 3), (-4, 7), (9, 9)]:
            assert witt_from_int(params, Z, c) + witt_from_int(
                params, Z, d
            ) == witt_from_int(params, Z, c + d)

    @given(small_scalar_vectors(3, 3))
    @settings(max_examples=40, deadline=None)
    def test_pow_matches_repeated_product(self, w):
        assert w ** 3 == w * w * w

    def test_teichmuller_is_multiplicative(self):
        params = WittParams(5, 3)
        a = ZA.var("a")
        assert teichmuller(params, ZA, a) ** 4 == teichmuller(params, ZA, a ** 4)


class TestOperators:
    @given(small_scalar_vectors(3, 2))
    @settings(max_examples=30, deadline=None)
    def test_frobenius_after_verschiebung_is_p(self, w):
        assert w.verschiebung().frobenius() == 3 * w

    def test_frobenius_on_teichmuller(self):
        params = WittParams(3, 3)
        a = ZA.var("a")
        lift = teichmuller(params, ZA, a)
        assert lift.frobenius() == teichmuller(WittParams(3, 2), ZA, a ** 3)

    @given(small_scalar_vectors(3, 2), small_scalar_vectors(3, 3))
    @settings(max_examples=30, deadline=None)
    def test_projection_formula(self, x, y):
        assert (x * y.frobenius()).verschiebung() == x.verschiebung() * y

    def test_verschiebung_shifts_and_lengthens(self):
        w = scalar_witt(3, 2, (4, 7))
        v = w.verschiebung()
        assert v.params.n == 3
        assert [c.as_int() for c in v.coords] == [0, 4, 7]
        assert v.restrict().restrict() == scalar_witt(3, 1, (0,))

    def test_frobenius_ghost_shift(self):
        params = WittParams(3, 3)
        w = WittVector(params, ZX, [ZX.var("x"), 2, ZX.var("x") + 1])
        assert list(w.frobenius().ghost()) == list(w.ghost())[1:]

    def test_frobenius_agrees_on_modular_ring(self):
        zx27 = RingSpec(("x",), modulus=27)
        params = WittParams(3, 3)
        rng = random.Random(RNG_SEED)
        for _ in range(20):
            coords = [ZX.random_element(rng, max_terms=2) for _ in range(3)]
            over_z = WittVector(params, ZX, coords).frobenius()
            over_mod = WittVector(
                params, zx27, [c.substitute({}, ring=zx27) for c in coords]
            ).frobenius()
            reduced = [c.substitute({}, ring=zx27) for c in over_z.coords]
            assert list(over_mod.coords) == reduced


class TestGhost:
    def test_ghost_is_ring_homomorphism(self):
        params = WittParams(5, 3)
        rng = random.Random(RNG_SEED)
        for _ in range(20):
            a = WittVector(
                params, ZX, [ZX.random_element(rng, max_terms=2) for _ in range(3)]
            )
            b = WittVector(
                params, ZX, [ZX.random_element(rng, max_terms=2) for _ in range(3)]
            )
            for ga, gb, gs, gp in zip(
                a.ghost(), b.ghost(), (a + b).ghost(), (a * b).ghost()
            ):
                assert gs == ga + gb
                assert gp == ga * gb

    def test_ghost_inversion_round_trip(self):
        params = WittParams(3, 3)
        w = WittVector(params, ZX, [ZX.var("x"), 1 - ZX.var("x"), 2])
        assert ghost_invert(params, ZX, list(w.ghost())) == w

    def test_ghost_inversion_requires_torsion_free_ring(self):
        from wittforge.algebra import RingError

        with pytest.raises(RingError):
            ghost_invert(WittParams(3, 2), F9RING, [F9RING.poly(1), F9RING.poly(1)])


class TestPolynomialEvaluation:
    def test_integer_polynomial_at_witt_vector(self):
        f = parse_poly("X^2 - X", RingSpec(("X",)))
        params = WittParams(3, 2)
        w = teichmuller(params, ZA, ZA.var("a"))
        assert evaluate_int_poly(f, w) == w * w - w

    def test_ideal_membership_with_monomial_generators(self):
        params = WittParams(3, 2)
        x = ZX.var("x")
        inside = WittVector(params, ZX, [x * x + 2 * x ** 3, 5 * x * x])
        outside = WittVector(params, ZX, [x * x, x])
        assert ideal_membership(inside, [x * x])
        assert not ideal_membership(outside, [x * x])


class TestTextualForm:
    def test_format_example(self):
        w = WittVector(WittParams(3, 2), ZX, [ZX.var("x"), ZX.var("x") + ZX.var("x") ** 2])
        assert format_witt(w) == "W{p=3,n=2}(x, x + x^2)"

    def test_round_trip(self):
        rng = random.Random(RNG_SEED)
        params = WittParams(5, 3)
        for _ in range(25):
            w = WittVector(
                params, ZX, [ZX.random_element(rng, max_terms=3) for _ in range(3)]
            )
            assert parse_witt(format_witt(w), ZX) == w

    @pytest.mark.parametrize(
        "text",
        [
            "W{p=3,n=2}(x)",
            "W{p=3,n=2}(x, x, x)",
            "W{p=6,n=2}(x, x)",
            "V{p=3,n=2}(x, x)",
            "W{p=3,n=2}(x, )",
        ],
    )
    def test_malformed_input_rejected(self, text):
        with pytest.raises(ValueError):
            parse_witt(text, ZX)


class TestValidation:
    @pytest.mark.parametrize("p", [1, 2, 4, 6, 9])
    def test_p_must_be_odd_prime(self, p):
        with pytest.raises(ValueError):
            WittParams(p, 2)

    def test_length_must_be_positive(self):
        with pytest.raises(ValueError):
            WittParams(3, 0)

    def test_length_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("WITTFORGE_MAX_N", "2")
        with pytest.raises(ValueError):
            WittParams(3, 3)
        monkeypatch.delenv("WITTFORGE_MAX_N")
        assert WittParams(3, 3).n == 3

    def test_coordinate_count_must_match(self):
        with pytest.raises(ValueError):
            WittVector(WittParams(3, 2), Z, [1, 2, 3])

    def test_cross_ring_operations_rejected(self):
        a = scalar_witt(3, 2, (1, 2), Z)
        b = scalar_witt(3, 2, (1, 2), F3)
        with pytest.raises(RingMismatchError):
            a + b
