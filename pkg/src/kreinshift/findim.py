"""Finite-dimensional brute-force oracle for power-bounded subspaces.

For a dense matrix T (dimension <= 12) the vectors with orbit growth
bounded by M * c**N form the sum of the generalized eigenspaces with
|lambda| < c plus, at |lambda| = c, the genuine eigenvectors only
(Jordan blocks on the boundary grow polynomially).  Eigenvalue moduli
too close to the threshold are decided by an explicit orbit scan and a
ThresholdAmbiguityError is raised when the scan is inconclusive.

This module validates the direct-sum splitting of the subspace and the
invariant-subspace growth bound on small instances; it is an oracle for
those statements, not an approximation of the infinite shift (truncated
shifts are nilpotent-like and misrepresent its spectral radius).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

MAX_DIM = 12
GROWTH_CAP = 1e6
SCAN_POWERS = 200
_BOUNDED_RATIO = 1.1
_GROWING_RATIO = 1.5


class ThresholdAmbiguityError(RuntimeError):
    """Eigenvalue modulus sits at the threshold and the orbit scan is inconclusive."""


def _as_operator(T) -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"operator must be square, got shape {T.shape}")
    if T.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {T.shape[0]} exceeds the oracle cap {MAX_DIM}")
    if not np.all(np.isfinite(T)):
        raise ValueError("operator entries must be finite")
    return T


def spectral_radius_matrix(T) -> float:
    T = _as_operator(T)
    if T.shape[0] == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvals(T)).max())


def orbit_scan(T: np.ndarray, x: np.ndarray, c: float, n_max: int = SCAN_POWERS) -> np.ndarray:
    """||T^N x|| / c^N for N = 0..n_max, iterated as y <- (T/c) y for stability."""
    scaled = T / c
    y = x.astype(complex)
    ratios = [float(np.linalg.norm(y))]
    for _ in range(n_max):
        y = scaled @ y
        ratios.append(float(np.linalg.norm(y)))
    return np.array(ratios)


def _scan_verdict(T: np.ndarray, x: np.ndarray, c: float) -> str:
    """'bounded' / 'growing' / 'ambiguous' for the orbit of x at rate c."""
    ratios = orbit_scan(T, x, c)
    if ratios.max() > GROWTH_CAP * max(ratios[0], 1e-30):
        return "growing"
    half = ratios[SCAN_POWERS // 2]
    full = ratios[SCAN_POWERS]
    if half <= 0.0:
        return "bounded"
    growth = full / half
    if growth <= _BOUNDED_RATIO:
        return "bounded"
    if growth >= _GROWING_RATIO:
        return "growing"
    return "ambiguous"


def _orthonormal_columns(columns: list[np.ndarray], dim: int) -> np.ndarray:
    if not columns:
        return np.zeros((dim, 0), dtype=complex)
    stack = np.column_stack(columns)
    q, r = np.linalg.qr(stack)
    keep = np.abs(np.diag(r)) > 1e-10 * max(1.0, np.abs(r).max())
    return q[:, : int(keep.sum())]


def _eig_clusters(T: np.ndarray, cluster_tol: float = 1e-7):
    evals = np.linalg.eigvals(T)
    order = np.argsort(evals.real * 1e6 + evals.imag)  # deterministic grouping order
    clusters: list[list[complex]] = []
    for lam in evals[order]:
        for group in clusters:
            if abs(lam - group[0]) <= cluster_tol * max(1.0, abs(group[0])):
                group.append(lam)
                break
        else:
            clusters.append([lam])
    return [(np.mean(group), len(group)) for group in clusters]


def power_bounded_subspace(T, c: float, boundary_tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of {x : sup_N ||T^N x|| / c^N < infinity}.

    Interior clusters (|lambda| clearly below c) contribute their whole
    generalized eigenspace; boundary clusters contribute eigenvectors
    only, with every boundary direction double-checked by the orbit
    scan.  Scan results that contradict the eigenstructure, or that fall
    in the no-man's land between bounded and growing, raise
    ThresholdAmbiguityError.
    """
    T = _as_operator(T)
    if c <= 0:
        raise ValueError(f"rate c must be positive, got {c!r}")
    dim = T.shape[0]
    if dim == 0:
        return np.zeros((0, 0), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    tol = boundary_tol * max(1.0, c)
    columns: list[np.ndarray] = []
    for lam, mult in _eig_clusters(T):
        modulus = abs(lam)
        if modulus >= c + tol:
            continue
        gen_space = scipy.linalg.null_space(
            np.linalg.matrix_power(T - lam * eye, mult), rcond=1e-9
        )
        if modulus <= c - tol:
            columns.extend(gen_space.T)
            continue
        # Boundary cluster: eigenvectors stay, nilpotent directions go.
        eig_space = scipy.linalg.null_space(T - lam * eye, rcond=1e-9)
        for vec in eig_space.T:
            if _scan_verdict(T, vec, c) != "bounded":
                raise ThresholdAmbiguityError(
                    f"eigenvector orbit at |lambda|={modulus:.12g} ~ c={c:.12g} "
                    "does not scan as bounded"
                )
            columns.append(vec)
        if gen_space.shape[1] > eig_space.shape[1]:
            # Representatives of the nilpotent complement must scan as growing.
            proj = eig_space @ eig_space.conj().T
            for vec in gen_space.T:
                rest = vec - proj @ vec
                nrm = np.linalg.norm(rest)
                if nrm < 1e-8:
                    continue
                verdict = _scan_verdict(T, rest / nrm, c)
                if verdict != "growing":
                    raise ThresholdAmbiguityError(
                        f"generalized direction at |lambda|={modulus:.12g} ~ c={c:.12g} "
                        f"scans as {verdict}; threshold degeneracy"
                    )
    return _orthonormal_columns(columns, dim)


def _containment_residual(inner: np.ndarray, outer: np.ndarray) -> float:
    """max over columns of inner of the distance to span(outer)."""
    if inner.shape[1] == 0:
        return 0.0
    proj = outer @ outer.conj().T if outer.shape[1] else np.zeros((inner.shape[0],) * 2)
    return float(np.linalg.norm(inner - proj @ inner, axis=0).max())


def invariance_residual(T, basis: np.ndarray) -> float:
    """||(I - P) T P|| for the orthogonal projection P onto span(basis)."""
    T = _as_operator(T)
    if basis.shape[1] == 0:
        return 0.0
    proj = basis @ basis.conj().T
    eye = np.eye(T.shape[0], dtype=complex)
    return float(np.linalg.norm((eye - proj) @ T @ proj, 2))


@dataclass(frozen=True)
class SplitReport:
    """Does the power-bounded subspace of T1 (+) T2 split as the direct sum?"""

    dim_joint: int
    dim_split: int
    left_in_right: float
    right_in_left: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.dim_joint == self.dim_split
            and self.left_in_right <= self.tolerance
            and self.right_in_left <= self.tolerance
        )

    def to_json_dict(self) -> dict:
        return {
            "dim_joint": self.dim_joint,
            "dim_split": self.dim_split,
            "left_in_right": self.left_in_right,
            "right_in_left": self.right_in_left,
            "pass": self.passed,
        }


def check_direct_sum_split(T1, T2, c: float, tolerance: float = 1e-9) -> SplitReport:
    """Verify the subspace of the block-diagonal sum equals the sum of subspaces."""
    T1 = _as_operator(T1)
    T2 = _as_operator(T2)
    joint = power_bounded_subspace(scipy.linalg.block_diag(T1, T2), c)
    s1 = power_bounded_subspace(T1, c)
    s2 = power_bounded_subspace(T2, c)
    n1, n2 = T1.shape[0], T2.shape[0]
    embedded = []
    for col in s1.T:
        embedded.append(np.concatenate([col, np.zeros(n2, dtype=complex)]))
    for col in s2.T:
        embedded.append(np.concatenate([np.zeros(n1, dtype=complex), col]))
    split = _orthonormal_columns(embedded, n1 + n2)
    return SplitReport(
        dim_joint=joint.shape[1],
        dim_split=split.shape[1],
        left_in_right=_containment_residual(joint, split),
        right_in_left=_containment_residual(split, joint),
        tolerance=tolerance,
    )


@dataclass(frozen=True)
class InvariantBoundReport:
    """Columns of an invariant subspace with r(T|L) <= c lie in the (c+eps)-subspace."""

    restricted_radius: float
    applicable: bool
    max_containment_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (not self.applicable) or self.max_containment_residual <= self.tolerance

    def to_json_dict(self) -> dict:
        return {
            "restricted_radius": self.restricted_radius,
            "applicable": self.applicable,
            "max_containment_residual": self.max_containment_residual,
            "pass": self.passed,
        }


def check_invariant_subspace_bound(
    T, basis: np.ndarray, c: float, eps: float, tolerance: float = 1e-9
) -> InvariantBoundReport:
    """Restricted spectral radius at most c forces containment at rate c + eps."""
    T = _as_operator(T)
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2 or basis.shape[0] != T.shape[0]:
        raise ValueError("basis must be a (dim x k) column matrix over the same space")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if basis.shape[1] == 0:
        return InvariantBoundReport(0.0, True, 0.0, tolerance)
    q, _ = np.linalg.qr(basis)
    q = q[:, : basis.shape[1]]
    if invariance_residual(T, q) > 1e-10:
        raise ValueError("subspace is not T-invariant to 1e-10")
    restricted = q.conj().T @ T @ q
    radius = float(np.abs(np.linalg.eigvals(restricted)).max())
    if radius > c:
        return InvariantBoundReport(radius, False, 0.0, tolerance)
    target = power_bounded_subspace(T, c + eps)
    residual = _containment_residual(q, target)
    return InvariantBoundReport(radius, True, residual, tolerance)


def sample_operator_with_gap(dim: int, c: float, rng, gap: float = 0.05) -> np.ndarray:
    """Random real operator with every eigenvalue modulus outside [c-gap, c+gap].

    Built as an orthogonally rotated block-triangular real Schur-like
    form with 1x1 and 2x2 rotation-scaled blocks, so moduli are exactly
    the sampled values.
    """
    blocks = []
    remaining = dim
    while remaining > 0:
        make_pair = remaining >= 2 and rng.random() < 0.4
        while True:
            modulus = float(rng.uniform(0.05, min(2.5, 2.0 * c + 1.0)))
            if abs(modulus - c) >= gap:
                break
        if make_pair:
            angle = float(rng.uniform(0.2, math.pi - 0.2))
            rot = modulus * np.array(
                [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
            )
            blocks.append(rot)
            remaining -= 2
        else:
            sign = float(rng.choice((-1.0, 1.0)))
            blocks.append(np.array([[sign * modulus]]))
            remaining -= 1
    upper = scipy.linalg.block_diag(*blocks)
    n = upper.shape[0]
    strict = np.triu(rng.normal(scale=0.5, size=(n, n)), k=1)
    # Couplings only outside the 2x2 blocks, keeping the sampled moduli exact.
    upper = upper + strict * (np.triu(np.ones((n, n)), k=1) - _block_mask(blocks, n))
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return q @ upper @ q.T


def _block_mask(blocks: list[np.ndarray], n: int) -> np.ndarray:
    mask = np.zeros((n, n))
    at = 0
    for b in blocks:
        k = b.shape[0]
        mask[at : at + k, at : at + k] = np.triu(np.ones((k, k)), k=1)
        at += k
    return mask


def triangular_with_invariant_leading_block(dim: int, lead: int, rng, c: float, gap: float = 0.05):
    """(T, basis) where T is a rotated triangular matrix whose leading block
    has all eigenvalue moduli <= c - gap; basis spans the corresponding
    invariant subspace."""
    diag = []
    for i in range(dim):
        sign = float(rng.choice((-1.0, 1.0)))
        if i < lead:
            diag.append(sign * float(rng.uniform(0.05, max(0.06, c - gap))))
        else:
            diag.append(sign * float(rng.uniform(c + gap, 2.0 * c + 1.0)))
    upper = np.diag(diag) + np.triu(rng.normal(scale=0.5, size=(dim, dim)), k=1)
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    T = q @ upper @ q.T
    basis = q[:, :lead]
    return T, basis
