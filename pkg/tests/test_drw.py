"""Normal-form engine: frozen examples, operator axioms, fuzzed laws."""

import random

import pytest

from wittforge.drw import (
    DV,
    FUNC,
    DrwElement,
    DrwParams,
    DrwParseError,
    check_confluence,
    check_degree_two_vanishing,
    check_theta_criterion,
    check_truncation_compatibility,
    eval_tree,
    format_drw,
    normalize_dv_term,
    normalize_function_term,
    normalize_v_dlog_term,
    parse_drw,
    random_element,
    random_tree,
    replay_trace,
    shuffle_tree,
    theta_product,
)

RNG_SEED = 20260822

P32 = DrwParams(3, 2)
P33 = DrwParams(3, 3)
P52 = DrwParams(5, 2)


def elements(params, count, degrees=(0, 1), seed=RNG_SEED):
    rng = random.Random(seed)
    return [random_element(params, rng, degrees=degrees) for _ in range(count)]


class TestNormalForm:
    def test_verschiebung_of_one_is_p(self):
        assert parse_drw("V^1(1)", P32) == DrwElement.scalar(P32, 3)

    def test_square_of_verschiebung_of_one_vanishes_at_level_two(self):
        v1 = parse_drw("V^1(1)", P32)
        assert (v1 * v1).is_zero
        assert parse_drw("V^1(1) * V^1(1)", P33) == DrwElement.scalar(P33, 9)

    def test_v_absorbs_frobenius_twisted_exponents(self):
        # V(c[t]^{3i}) = V(c F([t]^i)) = (3c)[t]^i
        assert parse_drw("V^1([t]^6)", P32) == DrwElement.monomial(P32, 2, 3)

    def test_v_dlog_product_is_p_times_dv(self):
        assert parse_drw("V^1([t]) * dlogt", P32).is_zero
        expected = DrwElement(P33, forms={(1, 1): 3})
        assert parse_drw("V^1([t]) * dlogt", P33) == expected

    def test_differential_of_monomial(self):
        x = DrwElement.monomial(P32, 4)
        assert x.d() == DrwElement.monomial(P32, 4, 4) * DrwElement.dlog(P32)
        assert DrwElement.scalar(P32, 7).d().is_zero

    def test_slot_moduli(self):
        # level-s slots live mod p^{n-s}
        assert DrwElement(P32, funcs={(1, 1): 3}).is_zero
        assert not DrwElement(P32, funcs={(0, 1): 3}).is_zero
        assert DrwElement(P32, funcs={(0, 1): 9}).is_zero


class TestOperators:
    @pytest.mark.parametrize("params", [P32, P33, P52])
    def test_frobenius_after_verschiebung_is_p(self, params):
        for x in elements(params, 12):
            assert x.verschiebung().frobenius() == params.p * x

    @pytest.mark.parametrize("params", [P32, P33])
    def test_verschiebung_after_differential(self, params):
        for x in elements(params, 12, degrees=(0,)):
            assert x.d().verschiebung() == params.p * x.verschiebung().d()

    @pytest.mark.parametrize("params", [P32, P33])
    def test_frobenius_after_differential_of_verschiebung(self, params):
        for x in elements(params, 12, degrees=(0,)):
            assert x.verschiebung().d().frobenius() == x.d()

    def test_differential_squares_to_zero(self):
        for x in elements(P33, 12, degrees=(0,)):
            assert x.d().d().is_zero

    def test_frobenius_is_multiplicative(self):
        xs = elements(P33, 8)
        ys = elements(P33, 8, seed=RNG_SEED + 1)
        for x, y in zip(xs, ys):
            assert (x * y).frobenius() == x.frobenius() * y.frobenius()

    def test_projection_formula(self):
        xs = elements(P32, 8, degrees=(0,))
        ys = elements(P33, 8, seed=RNG_SEED + 1)
        for x, y in zip(xs, ys):
            assert (x * y.frobenius()).verschiebung() == x.verschiebung() * y

    def test_frobenius_fixes_dlog(self):
        assert DrwElement.dlog(P33).frobenius() == DrwElement.dlog(P32)

    def test_restriction_commutes_with_everything(self):
        xs = elements(P33, 8)
        ys = elements(P33, 8, seed=RNG_SEED + 1)
        for x, y in zip(xs, ys):
            assert (x * y).restrict() == x.restrict() * y.restrict()
            assert x.d().restrict() == x.restrict().d()
            assert x.verschiebung().restrict() == x.restrict().verschiebung()
            assert x.frobenius().restrict() == x.restrict().frobenius()

    def test_ring_laws(self):
        rng = random.Random(RNG_SEED)
        for _ in range(30):
            x = random_element(P33, rng)
            y = random_element(P33, rng)
            z = random_element(P33, rng)
            assert (x * y) * z == x * (y * z)
            assert x * y == y * x
            assert x * (y + z) == x * y + x * z

    def test_operator_level_validation(self):
        with pytest.raises(ValueError):
            DrwElement.scalar(DrwParams(3, 1), 1).frobenius()
        with pytest.raises(ValueError):
            DrwElement.scalar(DrwParams(3, 1), 1).restrict()


class TestTruncation:
    def test_monomials_die_at_the_truncation_order(self):
        params = DrwParams(3, 2, N=3)
        assert DrwElement.monomial(params, 3).is_zero
        assert DrwElement.monomial(params, 1, 3).is_zero
        assert not DrwElement.monomial(params, 1).is_zero
        assert not DrwElement.monomial(params, 2).is_zero

    def test_order_one_keeps_only_scalars_and_dlog(self):
        params = DrwParams(3, 2, N=1)
        assert DrwElement.monomial(params, 1).is_zero
        assert not DrwElement.scalar(params, 1).is_zero
        assert not DrwElement.dlog(params).is_zero

    def test_truncation_is_a_dg_ring_map(self):
        report = check_truncation_compatibility(3, 3, 4, pairs=120)
        assert report.passed

    def test_cannot_coarsen(self):
        params = DrwParams(3, 2, N=2)
        with pytest.raises(ValueError):
            DrwElement.scalar(params, 1).truncate(4)


class TestProducts:
    def test_degree_two_products_vanish(self):
        for p, n in [(3, 2), (3, 3)]:
            assert check_degree_two_vanishing(p, n, pairs=150).passed

    def test_dlog_squares_to_zero(self):
        dlog = DrwElement.dlog(P33)
        assert (dlog * dlog).is_zero

    def test_confluence_of_rewrite_orders(self):
        assert check_confluence(3, 2, trees=200).passed
        assert check_confluence(3, 3, trees=200).passed

    def test_shuffled_trees_evaluate_equal(self):
        rng = random.Random(RNG_SEED)
        for _ in range(60):
            tree = random_tree(rng, 3)
            assert eval_tree(tree, P33) == eval_tree(shuffle_tree(tree, rng), P33)


class TestThetaProduct:
    def test_frozen_slots(self):
        product = theta_product(3, 2, 1, [1, 0], 1)
        assert product == DrwElement(
            DrwParams(3, 2, N=2), forms={(0, 1): 1, (1, 1): 1}
        )

    def test_vanishes_iff_leading_coordinate_vanishes(self):
        for n in (2, 3):
            for e2 in (1, 2):
                for u in (1, 2):
                    assert check_theta_criterion(3, n, e2, u).passed

    def test_verschiebung_coordinates_die_under_truncation(self):
        assert theta_product(3, 2, 1, [0, 1], 1).is_zero
        assert theta_product(3, 3, 2, [0, 2, 1], 2).is_zero


class TestTraces:
    def test_replay_reproduces_normal_form(self):
        rng = random.Random(RNG_SEED)
        for _ in range(40):
            s = rng.randrange(3)
            i = rng.randrange(9)
            c = rng.randrange(1, 27)
            family, normalize = rng.choice(
                [
                    (FUNC, normalize_function_term),
                    (DV, normalize_dv_term),
                ]
            )
            trace = []
            direct = normalize(P33, s, i, c, trace=trace)
            assert replay_trace(P33, (family, s, i, c), trace) == direct

    def test_replay_rejects_forged_steps(self):
        trace = []
        normalize_function_term(P33, 2, 3, 1, trace=trace)
        # claim the absorb applied to a p-free exponent
        forged = [("v-absorb", (FUNC, 2, 2, 1), (FUNC, 1, 1, 3))]
        with pytest.raises(ValueError):
            replay_trace(P33, (FUNC, 2, 2, 1), forged)
        with pytest.raises(ValueError):
            replay_trace(P33, (FUNC, 2, 4, 1), trace)

    def test_dlog_rewrite_traced(self):
        trace = []
        normalize_v_dlog_term(P33, 1, 1, 1, trace=trace)
        rules = [step[0] for step in trace]
        assert rules == ["dlog-to-dv", "emit-form"]


class TestTextualForm:
    def test_inner_levels_shrink_with_operator_depth(self):
        # the argument of V^2 lives at level 1, so its coefficient is mod 3
        assert parse_drw("V^2([t] * 4)", P33) == parse_drw("V^2([t])", P33)

    def test_sum_and_scalar_products(self):
        # dV^1 reads as d applied to V^1 of a level-2 argument
        got = parse_drw("2*[t]^2 + dV^1([t]^2) - [t]^2", P33)
        direct = DrwElement.monomial(DrwParams(3, 2), 2).verschiebung().d()
        assert got == DrwElement.monomial(P33, 2) + direct

    def test_format_of_zero(self):
        assert format_drw(DrwElement.zero(P32)) == "0"

    def test_format_lines_are_sorted(self):
        element = parse_drw("[t] + dlogt + V^1([t]) + dV^1([t])", P33)
        lines = format_drw(element).splitlines()
        assert lines == sorted(lines)
        assert lines[0].startswith("(0; ")

    @pytest.mark.parametrize(
        "text",
        ["V^3([t])", "[t]^", "V^1([t]", "2 ** 3", "[x]", "dV^1([t]))"],
    )
    def test_errors_carry_positions(self, text):
        with pytest.raises(DrwParseError) as err:
            parse_drw(text, P32)
        assert "column" in str(err.value)

    def test_negative_factors(self):
        assert parse_drw("-[t] + [t]", P32).is_zero


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            DrwParams(4, 2)
        with pytest.raises(ValueError):
            DrwParams(3, 0)
        with pytest.raises(ValueError):
            DrwParams(3, 2, N=0)

    def test_truncation_levels(self):
        params = DrwParams(3, 2, N=3)
        assert params.truncation_level(0) > 10
        assert params.truncation_level(1) == 1
        assert params.truncation_level(2) == 1
        assert params.truncation_level(3) == 0
        assert DrwParams(3, 2).truncation_level(5) > 10
