"""The doubled space H + H with its indefinite inner product.

The form is the swap form {f + g, f' + g'} = (f, g') + (g, f'), i.e.
(Jx, y) with J exchanging the two legs.  The doubled operator acts as
the shift on the first leg and as the inverse adjoint shift on the
second, which preserves the form exactly: (Vf, V*^-1 g') = (f, g').
The generator families U^N(b_0 + b_0) and U^N(b_0 - b_0) span the
invariant positive and negative subspaces; each generator is supported
on a single basis index, so span membership is an exact componentwise
test rather than a least-squares projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from math import fsum

from mpmath import mp, mpf

from .shift_ops import FinSuppVector, OperatorKind, ShiftOperator, apply_power
from .weights import WeightSequence, _work_bits

_LOG_DOUBLE_MAX = 700.0


class SpanSign(Enum):
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class DoubledVector:
    """f + g in the doubled space, as a pair of finitely supported legs."""

    plus: FinSuppVector
    minus: FinSuppVector

    @classmethod
    def basis_pair(cls, n: int, minus_scale: float = 1.0) -> "DoubledVector":
        return cls(FinSuppVector.basis(n), FinSuppVector.basis(n, minus_scale))

    def __add__(self, other: "DoubledVector") -> "DoubledVector":
        return DoubledVector(self.plus + other.plus, self.minus + other.minus)

    def __sub__(self, other: "DoubledVector") -> "DoubledVector":
        return DoubledVector(self.plus - other.plus, self.minus - other.minus)

    def __mul__(self, scalar: float) -> "DoubledVector":
        return DoubledVector(self.plus * scalar, self.minus * scalar)

    __rmul__ = __mul__

    def swap(self) -> "DoubledVector":
        """J x: exchange the legs."""
        return DoubledVector(self.minus, self.plus)

    def norm(self) -> float:
        return math.sqrt(self.plus.norm() ** 2 + self.minus.norm() ** 2)

    @property
    def is_zero(self) -> bool:
        return self.plus.is_zero and self.minus.is_zero


def _inner_terms(x: DoubledVector, y: DoubledVector) -> list[float]:
    terms = [a * y.minus.coeffs[n] for n, a in x.plus.coeffs.items() if n in y.minus.coeffs]
    terms += [a * y.plus.coeffs[n] for n, a in x.minus.coeffs.items() if n in y.plus.coeffs]
    return terms


def indefinite_inner(x: DoubledVector, y: DoubledVector) -> float:
    """{x, y} = (x_plus, y_minus) + (x_minus, y_plus), the swap form."""
    return fsum(_inner_terms(x, y))


@dataclass(frozen=True)
class DoubledOperator:
    """Acts as the forward shift on the first leg, inverse adjoint on the second."""

    weights: WeightSequence

    def leg_operators(self) -> tuple[ShiftOperator, ShiftOperator]:
        return (
            ShiftOperator(self.weights, OperatorKind.FORWARD),
            ShiftOperator(self.weights, OperatorKind.ADJOINT_INVERSE),
        )


def hat_apply(op: DoubledOperator, power: int, x: DoubledVector) -> DoubledVector:
    fwd, adj_inv = op.leg_operators()
    return DoubledVector(
        apply_power(fwd, power, x.plus),
        apply_power(adj_inv, power, x.minus),
    )


def generator(op: DoubledOperator, sign: SpanSign, power: int) -> DoubledVector:
    """U^power (b_0 + sign * b_0); supported on the single index `power`."""
    return hat_apply(op, power, DoubledVector.basis_pair(0, float(sign.value)))


@dataclass(frozen=True)
class JUnitarityReport:
    max_relative_deviation: float
    samples: int
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.max_relative_deviation <= self.tolerance

    def to_json_dict(self) -> dict:
        return {
            "max_relative_deviation": self.max_relative_deviation,
            "samples": self.samples,
            "pass": self.passed,
        }


def j_unitarity_check(op: DoubledOperator, samples) -> JUnitarityReport:
    """Verify {U^N x, U^N y} = {x, y} over (x, y, N) samples.

    Deviations are scaled by max(|value|, sum of term magnitudes): the
    preserved value can be near zero by cancellation while the identity
    still holds termwise, and the term-magnitude scale is the honest
    residual denominator in that case.
    """
    worst = 0.0
    count = 0
    for x, y, power in samples:
        before_terms = _inner_terms(x, y)
        before = fsum(before_terms)
        xt = hat_apply(op, power, x)
        yt = hat_apply(op, power, y)
        after_terms = _inner_terms(xt, yt)
        after = fsum(after_terms)
        scale = max(
            abs(before),
            fsum(abs(t) for t in before_terms),
            fsum(abs(t) for t in after_terms),
            1e-300,
        )
        worst = max(worst, abs(after - before) / scale)
        count += 1
    return JUnitarityReport(max_relative_deviation=worst, samples=count)


def random_unitarity_samples(rng, count: int, support_radius: int = 50, power_radius: int = 20):
    """Seeded (x, y, N) triples with supports in [-r, r], coefficients in +-[0.5, 1.5]."""
    samples = []
    for _ in range(count):
        vectors = []
        for _ in range(2):
            legs = []
            for _ in range(2):
                size = int(rng.integers(1, 6))
                support = rng.choice(
                    range(-support_radius, support_radius + 1), size=size, replace=False
                )
                coeffs = {
                    int(n): float(rng.uniform(0.5, 1.5) * rng.choice((-1.0, 1.0)))
                    for n in support
                }
                legs.append(FinSuppVector(coeffs))
            vectors.append(DoubledVector(legs[0], legs[1]))
        power = int(rng.integers(-power_radius, power_radius + 1))
        samples.append((vectors[0], vectors[1], power))
    return samples


@dataclass(frozen=True)
class IdentityResult:
    identity_id: str
    max_abs_deviation: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "max_abs_deviation": self.max_abs_deviation,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class BatteryReport:
    range_limit: int
    results: tuple[IdentityResult, ...]
    tolerance: float = 1e-12

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json_dict(self) -> dict:
        return {
            "range": [-self.range_limit, self.range_limit],
            "all_pass": self.all_pass,
            "identities": [r.to_json_dict() for r in self.results],
        }


def generator_identity_battery(
    op: DoubledOperator, range_limit: int, tolerance: float = 1e-12
) -> BatteryReport:
    """The five generator identities over all powers N, M in [-range, range].

    Same-sign generators are J-orthonormal up to the factor 2, opposite
    signs pair to zero identically; these hold for any nonvanishing
    weights, making the battery a regression gate for the form choice.
    """
    r = int(range_limit)
    if r < 0:
        raise ValueError("range must be >= 0")
    powers = range(-r, r + 1)
    gen_p = {n: generator(op, SpanSign.PLUS, n) for n in powers}
    gen_m = {n: generator(op, SpanSign.MINUS, n) for n in powers}

    dev = {key: 0.0 for key in (
        "plus_plus_offdiag", "plus_plus_diag",
        "minus_minus_offdiag", "minus_minus_diag",
        "plus_minus_all",
    )}
    for n in powers:
        for m in powers:
            pp = indefinite_inner(gen_p[n], gen_p[m])
            mm = indefinite_inner(gen_m[n], gen_m[m])
            pm = indefinite_inner(gen_p[n], gen_m[m])
            if n == m:
                dev["plus_plus_diag"] = max(dev["plus_plus_diag"], abs(pp - 2.0))
                dev["minus_minus_diag"] = max(dev["minus_minus_diag"], abs(mm + 2.0))
            else:
                dev["plus_plus_offdiag"] = max(dev["plus_plus_offdiag"], abs(pp))
                dev["minus_minus_offdiag"] = max(dev["minus_minus_offdiag"], abs(mm))
            dev["plus_minus_all"] = max(dev["plus_minus_all"], abs(pm))

    results = tuple(
        IdentityResult(key, value, value <= tolerance) for key, value in dev.items()
    )
    return BatteryReport(range_limit=r, results=results, tolerance=tolerance)


@dataclass(frozen=True)
class SpanMembership:
    member: bool
    coefficients: dict | None = None
    residual: DoubledVector | None = None


def span_membership(
    op: DoubledOperator, sign: SpanSign, x: DoubledVector, log_tol: float = 1e-9
) -> SpanMembership:
    """Exact componentwise membership test against the generator family.

    x lies in the span iff its legs share support and, at each index n,
    minus(n) = sign * (v_0/v_n)^2 * plus(n); the generator coefficient
    at n is then plus(n) * v_0/v_n.
    """
    w = op.weights
    support = set(x.plus.coeffs) | set(x.minus.coeffs)
    lam0 = w.log_weight(0)

    member = set(x.plus.coeffs) == set(x.minus.coeffs)
    coefficients: dict[int, float] = {}
    for n in sorted(support):
        p = x.plus.coeffs.get(n, 0.0)
        m = x.minus.coeffs.get(n, 0.0)
        rel = float(lam0 - w.log_weight(n))
        if p != 0.0:
            coefficients[n] = p * math.exp(rel)
        if p == 0.0 or m == 0.0:
            member = False
            continue
        expected_sign = math.copysign(1.0, p) * sign.value
        if math.copysign(1.0, m) != expected_sign:
            member = False
            continue
        if abs(math.log(abs(m)) - (math.log(abs(p)) + 2.0 * rel)) > log_tol:
            member = False

    if member:
        return SpanMembership(member=True, coefficients=coefficients)
    recon = DoubledVector(FinSuppVector(), FinSuppVector())
    for n, alpha in coefficients.items():
        recon = recon + alpha * generator(op, sign, n)
    return SpanMembership(member=False, residual=x - recon)


@dataclass(frozen=True)
class DensityDecomposition:
    """One target basis vector written over the two generator families."""

    target: str                      # "b_N+0" or "0+b_N"
    coefficient: float | None        # +-coefficient of gen_plus(N), gen_minus(N)
    coefficient_log: tuple[int, mpf] | None
    reconstruction_rel_error: float | None
    verified: bool


@dataclass(frozen=True)
class DensityReport:
    index: int
    numeric: bool
    first_leg: DensityDecomposition
    second_leg: DensityDecomposition

    @property
    def passed(self) -> bool:
        return self.first_leg.verified and self.second_leg.verified

    def to_json_dict(self) -> dict:
        def line(d: DensityDecomposition) -> dict:
            return {
                "target": d.target,
                "coefficient": d.coefficient,
                "coefficient_log": None if d.coefficient_log is None
                else {"sign": d.coefficient_log[0], "log": mp.nstr(d.coefficient_log[1], 17)},
                "reconstruction_rel_error": d.reconstruction_rel_error,
                "verified": d.verified,
            }

        return {
            "index": self.index,
            "numeric": self.numeric,
            "first_leg": line(self.first_leg),
            "second_leg": line(self.second_leg),
            "pass": self.passed,
        }


def density_witness(op: DoubledOperator, index: int, rel_tol: float = 1e-12) -> DensityReport:
    """Explicit decompositions b_N + 0 and 0 + b_N over the generator pair.

    b_N + 0 = (v_0 / 2 v_N) [gen_plus(N) + gen_minus(N)] and
    0 + b_N = (v_N / 2 v_0) [gen_plus(N) - gen_minus(N)].  At huge N the
    coefficients leave the double range; the decomposition is then
    reported and verified in log domain instead of as numeric vectors.
    """
    n = int(index)
    w = op.weights
    bits = _work_bits(0, n, precision_bits=w.precision_bits)
    with mp.workprec(bits):
        ln2 = mp.log(2)
        log_first = w.log_weight(0) - w.log_weight(n) - ln2   # v_0/(2 v_N)
        log_second = w.log_weight(n) - w.log_weight(0) - ln2  # v_N/(2 v_0)

    if max(abs(float(log_first)), abs(float(log_second))) <= _LOG_DOUBLE_MAX:
        c1 = math.exp(float(log_first))
        c2 = math.exp(float(log_second))
        gp = generator(op, SpanSign.PLUS, n)
        gm = generator(op, SpanSign.MINUS, n)
        target1 = DoubledVector(FinSuppVector.basis(n), FinSuppVector())
        target2 = DoubledVector(FinSuppVector(), FinSuppVector.basis(n))
        recon1 = c1 * (gp + gm)
        recon2 = c2 * (gp - gm)
        err1 = (recon1 - target1).norm() / target1.norm()
        err2 = (recon2 - target2).norm() / target2.norm()
        return DensityReport(
            index=n,
            numeric=True,
            first_leg=DensityDecomposition("b_N+0", c1, None, err1, err1 <= rel_tol),
            second_leg=DensityDecomposition("0+b_N", c2, None, err2, err2 <= rel_tol),
        )

    # Log-domain verification: the reconstructed coefficient of the
    # surviving leg is exp(log_coef + generator log) * 2 and must be 1.
    gen_log = w.log_ratio(0, n)  # ln(v_N/v_0)
    with mp.workprec(bits):
        resid1 = abs(float(log_first + gen_log + ln2))
        resid2 = abs(float(log_second - gen_log + ln2))
    return DensityReport(
        index=n,
        numeric=False,
        first_leg=DensityDecomposition(
            "b_N+0", None, (1, log_first), None, resid1 <= 1e-18
        ),
        second_leg=DensityDecomposition(
            "0+b_N", None, (1, log_second), None, resid2 <= 1e-18
        ),
    )


def sign_definiteness_check(op: DoubledOperator, sign: SpanSign, coefficients: dict) -> float:
    """{x, x} for x = sum of alpha_N * generator(sign, N).

    By generator J-orthonormality this equals sign * 2 * sum alpha^2,
    strictly positive on the plus family and negative on the minus.
    """
    items = {int(n): float(a) for n, a in coefficients.items() if float(a) != 0.0}
    if not items:
        raise ValueError("at least one coefficient must be nonzero")
    x = DoubledVector(FinSuppVector(), FinSuppVector())
    for n, alpha in items.items():
        x = x + alpha * generator(op, sign, n)
    return indefinite_inner(x, x)
