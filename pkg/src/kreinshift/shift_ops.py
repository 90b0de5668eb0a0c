"""Lazy bilateral weighted shift operators.

Exact power actions on finitely supported vectors, certified operator
norms (exhaustive window supremum plus an analytic bound on every unit
step beyond the window), spectral radius sandwiches via the Gelfand
sequence, and the flip-conjugation symmetry check.

Operations are pure over immutable values; window scans are plain
numpy max-reductions, so results are deterministic regardless of any
internal parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from math import fsum

import numpy as np
from mpmath import mp, mpf

from .weights import (
    ConstantWeights,
    GeometricWeights,
    OscillatingWeights,
    RuleWeights,
    WeightSequence,
    WitnessKind,
    witness_index,
)

# Absorbs float64 rounding of scanned log-weight values (bounded well
# below 5e-9 for |n| <= 2**21) so scanned suprema stay rigorous.
SCAN_MARGIN = 3e-8

JSON_SCHEMA = "krein-shift/1"


class CoefficientOverflowError(OverflowError):
    """A vector coefficient left the double range; use log-domain diagnostics."""


class OperatorKind(Enum):
    FORWARD = "forward"                  # V:      b_n -> (v_{n+1}/v_n) b_{n+1}
    INVERSE = "inverse"                  # V^-1
    ADJOINT = "adjoint"                  # V*
    ADJOINT_INVERSE = "adjoint-inverse"  # V*^-1:  b_n -> (v_n/v_{n+1}) b_{n+1}


_REVERSED_KINDS = frozenset({OperatorKind.INVERSE, OperatorKind.ADJOINT_INVERSE})


class FinSuppVector:
    """Finitely supported vector over the orthonormal basis {b_n : n in Z}.

    Canonical form: no stored coefficient is exactly zero.  Treat
    instances as immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, float] | None = None):
        self.coeffs = {int(n): float(a) for n, a in (coeffs or {}).items() if float(a) != 0.0}

    @classmethod
    def basis(cls, n: int, scale: float = 1.0) -> "FinSuppVector":
        return cls({n: scale})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def norm(self) -> float:
        return math.sqrt(fsum(a * a for a in self.coeffs.values()))

    def inner(self, other: "FinSuppVector") -> float:
        small, big = sorted((self.coeffs, other.coeffs), key=len)
        return fsum(a * big[n] for n, a in small.items() if n in big)

    def __add__(self, other: "FinSuppVector") -> "FinSuppVector":
        out = dict(self.coeffs)
        for n, a in other.coeffs.items():
            out[n] = out.get(n, 0.0) + a
        return FinSuppVector(out)

    def __sub__(self, other: "FinSuppVector") -> "FinSuppVector":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "FinSuppVector":
        return FinSuppVector({n: a * scalar for n, a in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, FinSuppVector) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        inside = ", ".join(f"{n}: {a:.6g}" for n, a in sorted(self.coeffs.items()))
        return f"FinSuppVector({{{inside}}})"


@dataclass(frozen=True)
class ShiftOperator:
    weights: WeightSequence
    kind: OperatorKind = OperatorKind.FORWARD


def _step_log(weights: WeightSequence, kind: OperatorKind, n: int, power: int) -> tuple[int, mpf]:
    """(support shift, log coefficient) of `kind`**power acting on b_n."""
    if kind is OperatorKind.FORWARD:
        return power, weights.log_ratio(n, power)
    if kind is OperatorKind.INVERSE:
        return -power, weights.log_ratio(n, -power)
    if kind is OperatorKind.ADJOINT:
        return -power, -weights.log_ratio(n, -power)
    return power, -weights.log_ratio(n, power)  # ADJOINT_INVERSE


def apply_power(op: ShiftOperator, power: int, x: FinSuppVector) -> FinSuppVector:
    """Exact coefficient-wise image of x under the operator's `power`-th power."""
    power = int(power)
    out: dict[int, float] = {}
    for n, a in x.coeffs.items():
        shift, log_coef = _step_log(op.weights, op.kind, n, power)
        value = float(log_coef)
        if value > 700.0 or not math.isfinite(value):
            raise CoefficientOverflowError(
                f"coefficient ratio exp({value:.3g}) at n={n} exceeds the double range; "
                "use log-domain diagnostics (growth.orbit_log_norm, norm_power) instead"
            )
        coef = a * math.exp(value)
        if not math.isfinite(coef):
            raise CoefficientOverflowError(
                f"coefficient at n={n} overflowed the double range; "
                "use log-domain diagnostics instead"
            )
        out[n + shift] = coef  # support shift is injective, no collisions
    return FinSuppVector(out)


def orbit_coefficient_log(weights: WeightSequence, kind: OperatorKind, power: int) -> mpf:
    """ln of the single surviving coefficient of (kind)**power applied to b_0."""
    if kind is OperatorKind.FORWARD:
        return weights.log_ratio(0, power)
    if kind is OperatorKind.INVERSE:
        return weights.log_ratio(0, -power)
    if kind is OperatorKind.ADJOINT:
        return -weights.log_ratio(0, -power)
    return -weights.log_ratio(0, power)  # ADJOINT_INVERSE


@dataclass(frozen=True)
class NormCertificate:
    """Certified value of ln ||T^N|| split into scanned and analytic parts.

    certified_log_norm = max(window_sup_log, tail_bound_log) when a tail
    bound exists; None marks an honest lower-bound-only scan result.
    """

    power: int
    window: int
    window_sup_log: float
    tail_bound_log: float | None
    certified_log_norm: float | None

    @property
    def lower_bound_only(self) -> bool:
        return self.certified_log_norm is None

    def to_json_dict(self) -> dict:
        return {
            "power": self.power,
            "window": self.window,
            "window_sup_log": self.window_sup_log,
            "tail_bound_log": self.tail_bound_log,
            "certified_log_norm": self.certified_log_norm,
            "lower_bound_only": self.lower_bound_only,
        }


class _NormScanner:
    """Shared engine computing norm certificates for one weight family.

    The supremum over Z splits three ways: an exhaustive scan over the
    window [-W, W]; for symmetric weights, the near part of the left
    tail, which maps by v_n = v_{-n} onto reverse differences at indices
    [W+1-N, W+N] and is scanned exactly from the same table; and every
    remaining unit step, which lives at |t| >= W+1 and is bounded
    analytically.  The analytic cutoff is therefore independent of the
    power N, which keeps the certificate sequence submultiplicative
    along doubling.
    """

    def __init__(self, weights: WeightSequence, window: int, max_power: int = 1):
        window = int(window)
        max_power = int(max_power)
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        if max_power < 1:
            raise ValueError(f"max_power must be >= 1, got {max_power}")
        self.weights = weights
        self.window = window
        self.max_power = max_power
        self.step_range = weights.unit_step_log_range(window + 1)
        self.linear_slope = None
        if isinstance(weights, GeometricWeights):
            self.linear_slope = math.log(weights.ratio)
        elif isinstance(weights, ConstantWeights):
            self.linear_slope = 0.0
        if self.step_range is not None and self.linear_slope is None and window < max_power:
            raise ValueError(
                f"window ({window}) must be at least the largest power ({max_power}) "
                "for a certified tail bound"
            )
        self._lam_abs: np.ndarray | None = None
        self._lam_full: np.ndarray | None = None
        self._memo: dict[tuple[int, bool], NormCertificate] = {}

    def _abs_table(self) -> np.ndarray:
        # ln v_x for x in [0, window + max_power]; valid for symmetric weights.
        if self._lam_abs is None:
            idx = np.arange(0, self.window + self.max_power + 1, dtype=np.int64)
            table = self.weights.log_weight_f64(idx)
            if table is None:
                table = np.array([float(self.weights.log_weight(int(i))) for i in idx])
            self._lam_abs = table
        return self._lam_abs

    def _full_table(self) -> np.ndarray:
        # ln v_n for n in [-(window+max_power), window+max_power]; asymmetric rules.
        if self._lam_full is None:
            span = self.window + self.max_power
            idx = np.arange(-span, span + 1, dtype=np.int64)
            table = self.weights.log_weight_f64(idx)
            if table is None:
                table = np.array([float(self.weights.log_weight(int(i))) for i in idx])
            self._lam_full = table
        return self._lam_full

    def _scanned_sup(self, power: int, reverse: bool) -> float:
        if self.weights.is_symmetric:
            lam = self._abs_table()
            n = np.arange(-self.window, self.window + 1, dtype=np.int64)
            ahead = lam[np.abs(n + power)]
            here = lam[np.abs(n)]
            window_part = float((here - ahead).max() if reverse else (ahead - here).max())
            if self.step_range is not None:
                # Near part of the left tail, mapped by v_n = v_{-n} onto
                # reverse differences just beyond the window (power <= window
                # here, so q - power stays nonnegative).
                q = np.arange(self.window + 1, self.window + power + 1, dtype=np.int64)
                back = lam[q - power]
                at = lam[q]
                edge_part = float((at - back).max() if reverse else (back - at).max())
                window_part = max(window_part, edge_part)
            return window_part + SCAN_MARGIN
        lam = self._full_table()
        span = self.window + self.max_power
        n = np.arange(-self.window, self.window + 1, dtype=np.int64)
        ahead = lam[n + power + span]
        here = lam[n + span]
        window_part = float((here - ahead).max() if reverse else (ahead - here).max())
        return window_part + SCAN_MARGIN

    def certificate(self, power: int, reverse: bool = False) -> NormCertificate:
        power = int(power)
        if power < 1:
            raise ValueError(f"power must be >= 1, got {power}")
        if power > self.max_power:
            raise ValueError(f"power {power} exceeds scanner max_power {self.max_power}")
        key = (power, reverse)
        if key not in self._memo:
            if self.linear_slope is not None:
                # Every ratio is identical: the certificate is exact.
                value = power * (-self.linear_slope if reverse else self.linear_slope)
                cert = NormCertificate(power, self.window, value, value, value)
            else:
                window_sup = self._scanned_sup(power, reverse)
                if self.step_range is None:
                    cert = NormCertificate(power, self.window, window_sup, None, None)
                else:
                    lo, hi = self.step_range
                    per_step = -lo if reverse else hi
                    tail = power * per_step
                    cert = NormCertificate(
                        power, self.window, window_sup, tail, max(window_sup, tail)
                    )
            self._memo[key] = cert
        return self._memo[key]


def norm_power(op: ShiftOperator, power: int, window: int) -> NormCertificate:
    """Certified ln ||T^power|| for the operator's kind; see _NormScanner."""
    scanner = _NormScanner(op.weights, window, max_power=power)
    return scanner.certificate(power, reverse=op.kind in _REVERSED_KINDS)


def norm_power_sweep(op: ShiftOperator, powers: list[int], window: int) -> list[NormCertificate]:
    """Certificates for several powers sharing one scan table."""
    powers = [int(p) for p in powers]
    scanner = _NormScanner(op.weights, window, max_power=max(powers))
    reverse = op.kind in _REVERSED_KINDS
    return [scanner.certificate(p, reverse=reverse) for p in powers]


def _witness_kind_for(kind: OperatorKind) -> WitnessKind:
    # Forward/inverse orbits blow up where the weight peaks; adjoint
    # variants where it troughs (the reciprocal peaks).
    if kind in (OperatorKind.FORWARD, OperatorKind.INVERSE):
        return WitnessKind.PEAK
    return WitnessKind.TROUGH


@dataclass(frozen=True)
class SpectralRadiusBounds:
    """Sandwich for the spectral radius from the Gelfand sequence.

    upper_log is the least certified ln||T^N||/N over the sampled
    doubling powers (a rigorous upper bound of ln r).  lower_log is an
    asymptotic indicator: the largest single-coefficient ratio
    ln|v-ratio|/N over the largest power and the witness indices, whose
    limit superior cannot exceed ln r.
    """

    lower_log: float
    upper_log: float | None
    powers_used: tuple[int, ...]
    certificates: tuple[NormCertificate, ...]

    @property
    def certified(self) -> bool:
        return self.upper_log is not None

    def to_json_dict(self) -> dict:
        return {
            "lower_log": self.lower_log,
            "upper_log": self.upper_log,
            "lower": math.exp(self.lower_log),
            "upper": math.exp(self.upper_log) if self.upper_log is not None else None,
            "powers_used": list(self.powers_used),
            "certificates": [c.to_json_dict() for c in self.certificates],
        }


def specrad_bounds(
    op: ShiftOperator,
    max_power_exponent: int,
    window: int,
    witness_k_max: int = 2,
) -> SpectralRadiusBounds:
    """[lower, upper] log-bounds for the spectral radius of the operator."""
    if max_power_exponent < 0:
        raise ValueError("max_power_exponent must be >= 0")
    powers = [2 ** j for j in range(max_power_exponent + 1)]
    scanner = _NormScanner(op.weights, window, max_power=powers[-1])
    reverse = op.kind in _REVERSED_KINDS
    certs = [scanner.certificate(p, reverse=reverse) for p in powers]

    uppers = [c.certified_log_norm / c.power for c in certs if c.certified_log_norm is not None]
    upper_log = min(uppers) if len(uppers) == len(certs) else None

    candidates = [orbit_coefficient_log(op.weights, op.kind, powers[-1]) / powers[-1]]
    if isinstance(op.weights, OscillatingWeights):
        wkind = _witness_kind_for(op.kind)
        for k in range(1, max(1, witness_k_max) + 1):
            idx = witness_index(wkind, k).index
            candidates.append(orbit_coefficient_log(op.weights, op.kind, idx) / idx)
    lower_log = float(max(candidates))

    return SpectralRadiusBounds(
        lower_log=lower_log,
        upper_log=upper_log,
        powers_used=tuple(powers),
        certificates=tuple(certs),
    )


@dataclass(frozen=True)
class FlipConjugationReport:
    """Deviation of R V R from V^{-1} (R b_n = b_{-n}) in log domain."""

    max_abs_deviation: float
    checked: int

    @property
    def passed(self) -> bool:
        return self.max_abs_deviation <= 1e-14

    def to_json_dict(self) -> dict:
        return {
            "max_abs_deviation": self.max_abs_deviation,
            "checked": self.checked,
            "pass": self.passed,
        }


def flip_conjugate_check(weights: WeightSequence, sample) -> FlipConjugationReport:
    """Verify R^-1 V R b_n = V^-1 b_n coefficient-wise over the sample.

    Requires a symmetric weight sequence (v_n = v_{-n}); the flip R maps
    b_n to b_{-n}, so the composed coefficient is ln(v_{-n+1}/v_{-n}),
    compared against ln(v_{n-1}/v_n) in log domain.
    """
    sample = [int(n) for n in sample]
    symmetric = weights.is_symmetric
    if symmetric is False:
        raise ValueError("flip conjugation requires symmetric weights (v_n = v_{-n})")
    if symmetric is None:
        probe = set(sample) | {n + 1 for n in sample} | {0, 1}
        for n in probe:
            if abs(weights.log_weight(n) - weights.log_weight(-n)) > mpf("1e-12"):
                raise ValueError("flip conjugation requires symmetric weights (v_n = v_{-n})")
    worst = 0.0
    for n in sample:
        lhs = weights.log_ratio(-n, 1)   # R then V then R, landing on b_{n-1}
        rhs = weights.log_ratio(n, -1)   # V^-1 directly
        worst = max(worst, abs(float(lhs - rhs)))
    return FlipConjugationReport(max_abs_deviation=worst, checked=len(sample))
