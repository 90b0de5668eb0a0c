"""Log-domain weight sequences for bilateral weighted shifts.

All weight arithmetic happens on ln|v_n| rather than v_n itself: the
oscillating family reaches magnitudes like c**(2**511) where any fixed
width float is useless.  Working precision adapts to the bit length of
the index, and indices where the oscillation argument collapses to an
exact multiple of pi/2 are evaluated from the integer exponents alone,
so the headline identities (v_{n_k} = c**n_k * e**sqrt(n_k), symmetry
v_n = v_{-n}) hold exactly.

Everything here is an immutable value and every function is pure, so
unrestricted concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from mpmath import mp, mpf

DEFAULT_PRECISION_BITS = 80
_GUARD_BITS = 16

# Slope constant pi / (2 ln(2)^2) of the nested-log2 oscillation chain.
CHAIN_SLOPE = math.pi / (2.0 * math.log(2.0) ** 2)


def _index_bits(x) -> int:
    if isinstance(x, (int, np.integer)):
        return int(abs(int(x))).bit_length()
    if isinstance(x, float):
        if x == 0.0 or not math.isfinite(x):
            return 0
        return max(0, math.frexp(abs(x))[1])
    if isinstance(x, mpf):
        return max(0, int(mp.mag(x)))
    raise TypeError(f"index must be int or float, got {type(x).__name__}")


def _work_bits(*xs, precision_bits: int = DEFAULT_PRECISION_BITS) -> int:
    return max(precision_bits, 64) + max(_index_bits(x) for x in xs) + _GUARD_BITS


def _check_nonnegative(x) -> None:
    if x < 0:
        raise ValueError(f"argument must be nonnegative, got {x!r}")


@lru_cache(maxsize=256)
def _cached_ln(value: float, bits: int) -> mpf:
    with mp.workprec(bits):
        return mp.log(value)


def _chain_sine(x, bits: int, allow_exact: bool = True) -> mpf:
    """sin((pi/2) * log2(1 + log2(1 + x))) for x >= 0.

    When 1+x is an exact power of two the inner log2 is read off the
    integer exponent; when on top of that 1+log2(1+x) is a power of two
    the sine is exactly 0 or +-1.  The generic path never takes a float
    log of a huge number: mpmath evaluates at `bits` working precision.
    """
    if allow_exact and isinstance(x, (int, np.integer)):
        m = int(x) + 1
        if m & (m - 1) == 0:
            j = m.bit_length() - 1  # log2(1+x), exact
            jp = j + 1
            if jp & (jp - 1) == 0:  # angle is (pi/2) * i with i integer
                i = jp.bit_length() - 1
                return mpf((0, 1, 0, -1)[i % 4])
            with mp.workprec(bits):
                inner = mp.log(jp) / mp.log(2)
                return mp.sin(mp.pi * inner / 2)
    with mp.workprec(bits):
        t = mp.log(mpf(x) + 1) / mp.log(2)
        inner = mp.log(t + 1) / mp.log(2)
        return mp.sin(mp.pi * inner / 2)


def phi(x, precision_bits: int = DEFAULT_PRECISION_BITS) -> mpf:
    """x * sin((pi/2) log2(1 + log2(1 + x))), the linear oscillating exponent."""
    _check_nonnegative(x)
    bits = _work_bits(x, precision_bits=precision_bits)
    with mp.workprec(bits):
        return mpf(x) * _chain_sine(x, bits)


def psi(x, precision_bits: int = DEFAULT_PRECISION_BITS) -> mpf:
    """sqrt(x) * sin((pi/2) log2(1 + log2(1 + x))), the square-root sibling of phi."""
    _check_nonnegative(x)
    bits = _work_bits(x, precision_bits=precision_bits)
    with mp.workprec(bits):
        return mp.sqrt(mpf(x)) * _chain_sine(x, bits)


class WitnessKind(Enum):
    """Index schedules where the oscillation attains +1 (PEAK) or -1 (TROUGH)."""

    PEAK = "peak"      # indices 2**(2**(1+4k) - 1) - 1: weight maximal, c**n * e**sqrt(n)
    TROUGH = "trough"  # indices 2**(2**(3+4k) - 1) - 1: weight minimal, c**-m * e**-sqrt(m)


@dataclass(frozen=True)
class WitnessSchedule:
    kind: WitnessKind
    k: int
    index: int


def witness_index(kind: WitnessKind, k: int) -> WitnessSchedule:
    """k-th witness index of the given kind; doubly exponential in k."""
    if k < 1:
        raise ValueError(f"witness schedule starts at k = 1, got {k}")
    offset = 1 if kind is WitnessKind.PEAK else 3
    index = (1 << ((1 << (offset + 4 * k)) - 1)) - 1
    return WitnessSchedule(kind=kind, k=k, index=index)


@dataclass(frozen=True)
class LogWeight:
    """ln|v_n| together with the sign of v_n (always +1 for these families)."""

    log_value: mpf
    sign: int = 1

    def __post_init__(self):
        if not mp.isfinite(self.log_value):
            raise ValueError("log weight must be finite (weights never vanish)")


class WeightSequence:
    """A nonvanishing bilateral weight rule, evaluated as ln|v_n|.

    Subclasses implement `_log_weight_at`; indices are plain Python ints
    of any size.  Instances are frozen dataclasses: hashable, safe to
    cache against, safe to share across threads.
    """

    precision_bits: int = DEFAULT_PRECISION_BITS

    def log_weight(self, n: int) -> mpf:
        return _cached_log_weight(self, int(n))

    def _log_weight_at(self, n: int) -> mpf:
        raise NotImplementedError

    def log_ratio(self, n: int, step: int = 1) -> mpf:
        """ln|v_{n+step}| - ln|v_n| as one cancellation-aware difference.

        Both terms may exceed 1e9 while differing by O(1); the working
        precision covers the full bit length of the endpoints so the
        difference keeps at least the configured number of good bits.
        """
        n = int(n)
        step = int(step)
        bits = _work_bits(n, n + step, precision_bits=self.precision_bits)
        with mp.workprec(bits):
            return self.log_weight(n + step) - self.log_weight(n)

    def log_ratio_unit_sum(self, n: int, step: int) -> mpf:
        """Cross-check mode: the same ratio telescoped as unit steps."""
        n = int(n)
        step = int(step)
        sign = 1 if step >= 0 else -1
        bits = _work_bits(n, n + step, precision_bits=self.precision_bits)
        with mp.workprec(bits):
            total = mpf(0)
            for j in range(abs(step)):
                total += self.log_ratio(n + sign * j, sign)
            return total

    @property
    def is_symmetric(self) -> bool | None:
        """True/False when known structurally, None when rule-dependent."""
        return None

    def unit_step_log_range(self, x_min) -> tuple[float, float] | None:
        """(lo, hi) bounding ln|v_{t+1}/v_t| for every |t| >= x_min, or None."""
        return None

    def log_weight_f64(self, indices: np.ndarray) -> np.ndarray | None:
        """Vectorized float64 ln|v_n| for window scans, or None if unsupported."""
        return None

    @property
    def spec_string(self) -> str:
        raise NotImplementedError


@lru_cache(maxsize=1 << 16)
def _cached_log_weight(w: WeightSequence, n: int) -> mpf:
    return w._log_weight_at(n)


@dataclass(frozen=True)
class ConstantWeights(WeightSequence):
    """v_n = 1 for all n: the plain bilateral shift."""

    precision_bits: int = DEFAULT_PRECISION_BITS

    def _log_weight_at(self, n: int) -> mpf:
        return mpf(0)

    @property
    def is_symmetric(self) -> bool:
        return True

    def unit_step_log_range(self, x_min) -> tuple[float, float]:
        return (0.0, 0.0)

    def log_weight_f64(self, indices: np.ndarray) -> np.ndarray:
        return np.zeros(len(indices), dtype=np.float64)

    @property
    def spec_string(self) -> str:
        return "const"


@dataclass(frozen=True)
class GeometricWeights(WeightSequence):
    """v_n = ratio**n: every shift coefficient equals `ratio` exactly."""

    ratio: float = 2.0
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if not (self.ratio > 0.0 and math.isfinite(self.ratio)):
            raise ValueError(f"ratio must be a positive finite real, got {self.ratio!r}")

    def _log_weight_at(self, n: int) -> mpf:
        bits = _work_bits(n, precision_bits=self.precision_bits)
        with mp.workprec(bits):
            return mpf(n) * _cached_ln(self.ratio, bits)

    @property
    def is_symmetric(self) -> bool:
        return self.ratio == 1.0

    def unit_step_log_range(self, x_min) -> tuple[float, float]:
        step = math.log(self.ratio)
        return (step, step)

    def log_weight_f64(self, indices: np.ndarray) -> np.ndarray:
        return indices.astype(np.float64) * math.log(self.ratio)

    @property
    def spec_string(self) -> str:
        return f"geom:r={self.ratio!r}"


@dataclass(frozen=True)
class OscillatingWeights(WeightSequence):
    """v_n = c**phi(|n|) * e**psi(|n|) with c >= 1.

    The exponent oscillates between +|n| and -|n| on doubly exponential
    index scales, which makes the associated shift have spectral radius
    exactly c while no nonzero vector has a c-power-bounded orbit.
    """

    c: float = 2.0
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if not (self.c >= 1.0 and math.isfinite(self.c)):
            raise ValueError(f"growth base c must satisfy c >= 1, got {self.c!r}")

    def _log_weight_at(self, n: int) -> mpf:
        x = abs(int(n))
        bits = _work_bits(x, precision_bits=self.precision_bits)
        with mp.workprec(bits):
            s = _chain_sine(x, bits)
            # ln v_n = phi(x) ln c + psi(x) = s * (x ln c + sqrt(x))
            return s * (mpf(x) * _cached_ln(self.c, bits) + mp.sqrt(x))

    @property
    def is_symmetric(self) -> bool:
        return True

    def unit_step_log_range(self, x_min) -> tuple[float, float]:
        bound = tail_derivative_bound(self, x_min).log_ratio_bound(math.log(self.c))
        return (-bound, bound)

    def log_weight_f64(self, indices: np.ndarray) -> np.ndarray:
        # Scan-grade double precision; indices stay far below 2**53.
        x = np.abs(indices).astype(np.float64)
        t = np.log2(1.0 + x)
        s = np.log2(1.0 + t)
        osc = np.sin((np.pi / 2.0) * s)
        return osc * (x * math.log(self.c) + np.sqrt(x))

    @property
    def spec_string(self) -> str:
        return f"paper:c={self.c!r}"


@dataclass(frozen=True)
class RuleWeights(WeightSequence):
    """User-supplied rule n -> ln|v_n|; must return finite floats."""

    rule: Callable[[int], float] = None  # type: ignore[assignment]
    description: str = "user:log=<rule>"
    symmetric: bool | None = None
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if self.rule is None:
            raise ValueError("RuleWeights needs a rule")

    def _log_weight_at(self, n: int) -> mpf:
        value = float(self.rule(n))
        if not math.isfinite(value):
            raise ValueError(
                f"weight rule returned non-finite log weight {value!r} at n={n}; "
                "weights must never vanish"
            )
        return mpf(value)

    @property
    def is_symmetric(self) -> bool | None:
        return self.symmetric

    @property
    def spec_string(self) -> str:
        return self.description


def eval_log_weight(w: WeightSequence, n: int) -> LogWeight:
    """ln v_n as a LogWeight record (paper-family weights are positive)."""
    return LogWeight(log_value=w.log_weight(n), sign=1)


def log_ratio(w: WeightSequence, n: int, step: int = 1) -> mpf:
    """ln|v_{n+step}| - ln|v_n|, cancellation-aware."""
    return w.log_ratio(n, step)


@dataclass(frozen=True)
class DerivativeTailBound:
    """Uniform bounds on unit steps of the weight exponent beyond a cutoff.

    phi_step_bound -> 1 and psi_step_bound -> 0 as the cutoff grows, and
    |ln v_{t+1} - ln v_t| <= phi_step_bound * ln c + psi_step_bound for
    every |t| >= n_min (mean value theorem over unit steps).
    """

    n_min: float
    phi_step_bound: float
    psi_step_bound: float

    def log_ratio_bound(self, log_c: float) -> float:
        return self.phi_step_bound * log_c + self.psi_step_bound


def tail_derivative_bound(w: WeightSequence, n_min) -> DerivativeTailBound:
    """Rigorous sup bounds for |phi'| and |psi'| on [n_min, infinity).

    phi'(x) = sin z + g(x) cos z with g(x) = K x / ((1+x)(1+log2(1+x))),
    K = pi/(2 ln(2)^2), so |phi'| <= sqrt(1 + g_sup^2); g is increasing
    then decreasing with its maximum below x = 2, and provably decreasing
    on [2, inf) (x >= ln 2 + ln(1+x) there).  The psi' terms carry an
    extra 1/sqrt(x) each.
    """
    if not isinstance(w, OscillatingWeights):
        raise TypeError(
            "analytic derivative bounds exist only for the oscillating family; "
            f"got {type(w).__name__}"
        )
    if n_min < 1:
        raise ValueError(f"n_min must be >= 1, got {n_min!r}")
    with mp.workprec(96):
        k = mp.pi / (2 * mp.log(2) ** 2)
        xm = mpf(int(n_min)) if isinstance(n_min, (int, np.integer)) else mpf(n_min)
        big_l = 1 + mp.log(1 + xm, 2)
        if xm >= 2:
            g_sup = k * (xm / (1 + xm)) / big_l
        else:
            g_at_2 = k * mpf(2) / (3 * (1 + mp.log(3, 2)))
            g_sup = max(k * mpf(2) / (3 * big_l), g_at_2)
        phi_bound = mp.sqrt(1 + g_sup * g_sup)
        psi_bound = mp.sqrt(mpf(1) / 4 + g_sup * g_sup) / mp.sqrt(xm)
        # Nudge outward so double rounding can never tip the bound below the sup.
        pad = mpf(1) + mpf(1e-12)
        return DerivativeTailBound(
            n_min=float(xm),
            phi_step_bound=float(phi_bound * pad),
            psi_step_bound=float(psi_bound * pad),
        )


def _parse_real(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return float.fromhex(text)


_RULE_NAMESPACE = {
    "abs": abs,
    "min": min,
    "max": max,
    "log": math.log,
    "log2": math.log2,
    "sqrt": math.sqrt,
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "pi": math.pi,
    "e": math.e,
}


def parse_weight_spec(spec: str, precision_bits: int = DEFAULT_PRECISION_BITS) -> WeightSequence:
    """Parse a weight-family config string.

    Grammar: `const` | `geom:r=<real>` | `paper:c=<real>` | `user:log=<expr>`
    where <real> is decimal or hex-float and <expr> gives ln|v_n| in
    terms of `n` (math functions available).
    """
    text = spec.strip()
    if text == "const":
        return ConstantWeights(precision_bits=precision_bits)
    head, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"unrecognized weight spec {spec!r}")
    key, eq, value = rest.partition("=")
    if head == "geom" and key == "r" and eq:
        return GeometricWeights(ratio=_parse_real(value), precision_bits=precision_bits)
    if head == "paper" and key == "c" and eq:
        return OscillatingWeights(c=_parse_real(value), precision_bits=precision_bits)
    if head == "user" and key == "log" and eq:
        code = compile(value, "<weight-rule>", "eval")
        def rule(n: int, _code=code) -> float:
            return float(eval(_code, {"__builtins__": {}}, dict(_RULE_NAMESPACE, n=n)))
        return RuleWeights(rule=rule, description=text, precision_bits=precision_bits)
    raise ValueError(f"unrecognized weight spec {spec!r}")
