import math
from math import fsum

import numpy as np
import pytest

from kreinshift import (
    DoubledOperator,
    DoubledVector,
    FinSuppVector,
    GeometricWeights,
    OscillatingWeights,
    SpanSign,
    density_witness,
    generator,
    generator_identity_battery,
    hat_apply,
    indefinite_inner,
    j_unitarity_check,
    random_unitarity_samples,
    sign_definiteness_check,
    span_membership,
)

# Frozen: v_0 / (2 v_5) for the c = 2 oscillating family.
DENSITY_COEF_5 = 0.12317667329914044


def inner_oracle(x, y):
    """Independent direct-expansion oracle for the swap form."""
    terms = []
    for n, a in x.plus.coeffs.items():
        terms.append(a * y.minus.coeffs.get(n, 0.0))
    for n, a in x.minus.coeffs.items():
        terms.append(a * y.plus.coeffs.get(n, 0.0))
    return fsum(terms)


@pytest.fixture(scope="module")
def op2():
    return DoubledOperator(OscillatingWeights(c=2.0))


def test_indefinite_inner_examples(op2):
    e_plus = DoubledVector.basis_pair(0, 1.0)
    e_minus = DoubledVector.basis_pair(0, -1.0)
    assert indefinite_inner(e_plus, e_plus) == 2.0
    assert indefinite_inner(e_minus, e_minus) == -2.0

    f = DoubledVector(FinSuppVector({2: 1.5, -1: 0.5}), FinSuppVector())
    g = DoubledVector(FinSuppVector({2: -3.0}), FinSuppVector())
    assert indefinite_inner(f, g) == 0.0


def test_indefinite_inner_is_swap_form(op2, rng):
    for _ in range(20):
        legs = []
        for _ in range(4):
            support = rng.choice(range(-20, 21), size=3, replace=False)
            legs.append(FinSuppVector({int(n): float(rng.normal()) for n in support}))
        x = DoubledVector(legs[0], legs[1])
        y = DoubledVector(legs[2], legs[3])
        assert indefinite_inner(x, y) == pytest.approx(inner_oracle(x, y), rel=1e-14, abs=1e-300)
        # Symmetry and swap invariance.
        assert indefinite_inner(x, y) == pytest.approx(indefinite_inner(y, x), rel=1e-14, abs=1e-300)
        assert indefinite_inner(x.swap(), y.swap()) == pytest.approx(
            indefinite_inner(x, y), rel=1e-14, abs=1e-300
        )


def test_hat_apply_examples(op2):
    x = DoubledVector.basis_pair(0, 1.0)
    out = hat_apply(op2, 1, x)
    ratio = math.exp(math.log(2.0) + 1.0)
    assert out.plus.coeffs[1] == pytest.approx(ratio, rel=1e-14)
    assert out.minus.coeffs[1] == pytest.approx(1.0 / ratio, rel=1e-14)

    assert hat_apply(op2, 0, x).plus.coeffs == x.plus.coeffs

    const_op = DoubledOperator(GeometricWeights(ratio=1.0))
    out = hat_apply(const_op, 3, x)
    assert out.plus.coeffs == {3: 1.0} and out.minus.coeffs == {3: 1.0}


def test_j_unitarity_on_random_pairs(op2, rng):
    report = j_unitarity_check(op2, random_unitarity_samples(rng, 200))
    assert report.samples == 200
    assert report.max_relative_deviation <= 1e-12


def test_j_unitarity_specific_pairs(op2):
    e_plus = DoubledVector.basis_pair(0, 1.0)
    e_minus = DoubledVector.basis_pair(0, -1.0)
    for power in (-17, -1, 0, 3, 12):
        assert indefinite_inner(hat_apply(op2, power, e_plus), hat_apply(op2, power, e_plus)) \
            == pytest.approx(2.0, rel=1e-13)
        assert indefinite_inner(hat_apply(op2, power, e_plus), hat_apply(op2, power, e_minus)) \
            == pytest.approx(0.0, abs=1e-13)


def test_generator_battery(op2):
    report = generator_identity_battery(op2, 20)
    assert report.all_pass
    by_id = {r.identity_id: r.max_abs_deviation for r in report.results}
    assert by_id["plus_plus_offdiag"] == 0.0
    assert by_id["plus_minus_all"] == 0.0
    assert by_id["plus_plus_diag"] <= 1e-12
    assert by_id["minus_minus_diag"] <= 1e-12


def test_generator_battery_geometric():
    report = generator_identity_battery(DoubledOperator(GeometricWeights(3.0)), 10)
    assert report.all_pass


def test_generator_shift_invariance(op2):
    for sign in SpanSign:
        for n in (-5, 0, 7):
            stepped = hat_apply(op2, 1, generator(op2, sign, n))
            direct = generator(op2, sign, n + 1)
            assert stepped.plus.support == direct.plus.support == (n + 1,)
            assert stepped.plus.coeffs[n + 1] == pytest.approx(
                direct.plus.coeffs[n + 1], rel=1e-12
            )
            assert stepped.minus.coeffs[n + 1] == pytest.approx(
                direct.minus.coeffs[n + 1], rel=1e-12
            )


def test_span_membership_generator_itself(op2):
    result = span_membership(op2, SpanSign.PLUS, DoubledVector.basis_pair(0, 1.0))
    assert result.member
    assert result.coefficients == {0: pytest.approx(1.0)}


def test_span_membership_scaled_index(op2):
    w = op2.weights
    for n in (5, 7, -12):
        scale = math.exp(float(2 * (w.log_weight(0) - w.log_weight(n))))
        x = DoubledVector(FinSuppVector.basis(n), FinSuppVector.basis(n, scale))
        assert span_membership(op2, SpanSign.PLUS, x).member
        y = DoubledVector(FinSuppVector.basis(n), FinSuppVector.basis(n, -scale))
        assert span_membership(op2, SpanSign.MINUS, y).member


def test_span_membership_rejects_wrong_sign(op2):
    x = DoubledVector.basis_pair(0, -1.0)
    result = span_membership(op2, SpanSign.PLUS, x)
    assert not result.member
    assert result.residual.plus.is_zero
    assert result.residual.minus.coeffs == {0: pytest.approx(-2.0)}


def test_plus_and_minus_membership_forces_zero(op2, rng):
    # A vector in both spans is zero: nonzero plus-span members always
    # fail the minus test.
    for _ in range(10):
        support = rng.choice(range(-15, 16), size=3, replace=False)
        combo = DoubledVector(FinSuppVector(), FinSuppVector())
        for n in support:
            combo = combo + float(rng.uniform(0.5, 2.0)) * generator(op2, SpanSign.PLUS, int(n))
        assert span_membership(op2, SpanSign.PLUS, combo).member
        assert not span_membership(op2, SpanSign.MINUS, combo).member


def test_nondegeneracy_on_support(op2, rng):
    # Some generator pairs nontrivially with any nonzero vector.
    for _ in range(10):
        support = rng.choice(range(-10, 11), size=2, replace=False)
        x = DoubledVector(
            FinSuppVector({int(support[0]): float(rng.normal()) or 1.0}),
            FinSuppVector({int(support[1]): float(rng.normal()) or 1.0}),
        )
        pairings = []
        for n in set(x.plus.coeffs) | set(x.minus.coeffs):
            pairings.append(abs(indefinite_inner(generator(op2, SpanSign.PLUS, n), x)))
            pairings.append(abs(indefinite_inner(generator(op2, SpanSign.MINUS, n), x)))
        assert max(pairings) > 0.0


def test_density_witness_trivial_and_frozen(op2):
    report = density_witness(op2, 0)
    assert report.numeric and report.passed
    assert report.first_leg.coefficient == pytest.approx(0.5)
    assert report.second_leg.coefficient == pytest.approx(0.5)

    report = density_witness(op2, 5)
    assert report.passed
    assert report.first_leg.coefficient == pytest.approx(DENSITY_COEF_5, rel=1e-12)
    assert report.first_leg.reconstruction_rel_error <= 1e-12
    assert report.second_leg.reconstruction_rel_error <= 1e-12


def test_density_witness_range(op2):
    for n in range(-30, 31):
        assert density_witness(op2, n).passed


def test_density_witness_log_domain_at_huge_index(op2):
    report = density_witness(op2, 2**31 - 1)
    assert not report.numeric
    assert report.passed
    sign, log_value = report.first_leg.coefficient_log
    assert sign == 1 and float(log_value) < -(10**9)


def test_sign_definiteness_examples(op2):
    assert sign_definiteness_check(op2, SpanSign.PLUS, {0: 1.0}) == pytest.approx(2.0)
    assert sign_definiteness_check(op2, SpanSign.PLUS, {0: 3.0, 7: 4.0}) \
        == pytest.approx(50.0, rel=1e-12)
    assert sign_definiteness_check(op2, SpanSign.MINUS, {-2: 1.0, 3: 1.0}) \
        == pytest.approx(-4.0, rel=1e-12)


def test_sign_definiteness_random(op2, rng):
    for _ in range(25):
        size = int(rng.integers(1, 6))
        support = rng.choice(range(-25, 26), size=size, replace=False)
        coeffs = {int(n): float(rng.normal()) for n in support}
        coeffs = {n: a for n, a in coeffs.items() if a != 0.0}
        if not coeffs:
            continue
        expected = 2.0 * fsum(a * a for a in coeffs.values())
        got = sign_definiteness_check(op2, SpanSign.PLUS, coeffs)
        assert got == pytest.approx(expected, rel=1e-12)
        got = sign_definiteness_check(op2, SpanSign.MINUS, coeffs)
        assert got == pytest.approx(-expected, rel=1e-12)


def test_sign_definiteness_rejects_zero(op2):
    with pytest.raises(ValueError):
        sign_definiteness_check(op2, SpanSign.PLUS, {3: 0.0})


def test_battery_json_shape(op2):
    payload = generator_identity_battery(op2, 3).to_json_dict()
    assert payload["all_pass"] is True
    assert payload["range"] == [-3, 3]
    assert {row["identity_id"] for row in payload["identities"]} == {
        "plus_plus_offdiag", "plus_plus_diag",
        "minus_minus_offdiag", "minus_minus_diag", "plus_minus_all",
    }
    for row in payload["identities"]:
        assert row["pass"] is True and row["max_abs_deviation"] <= 1e-12
