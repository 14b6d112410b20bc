"""Dense spectral analysis of gossip matrices.

Everything here exists for verification and tuning: eigendecompositions,
spectral gaps, discrete spectral measures, and the estimators built on them
(spectral dimension, lazy-walk return probability). Iterative methods never
need any of it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, EstimationError
from .graphgen import GossipMatrix

__all__ = [
    "DENSE_LIMIT",
    "SpectralSummary",
    "DiscreteMeasure",
    "eigendecompose",
    "spectral_measure_at_vertex",
    "spectral_measure_of_signal",
    "spectral_dimension_estimate",
    "return_probability",
]

DENSE_LIMIT = 4096

_AGGREGATION_TOL = 1e-9


@dataclass
class SpectralSummary:
    """Eigenvalues (descending) and orthonormal eigenvectors of a gossip matrix.

    eigenvectors[:, i] corresponds to eigenvalues[i]. Eigenvalues are clamped
    to [-1, 1] so that downstream log/power computations stay well defined.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def gap(self) -> float:
        """Spectral gap 1 - lambda_2 (0.0 for a single vertex)."""
        if self.n < 2:
            return 0.0
        return float(1.0 - self.eigenvalues[1])

    @property
    def absolute_gap(self) -> float:
        """min(1 - lambda_2, lambda_n + 1): gap between the two largest moduli."""
        if self.n < 2:
            return 0.0
        return float(min(1.0 - self.eigenvalues[1], self.eigenvalues[-1] + 1.0))


@dataclass
class DiscreteMeasure:
    """Finitely supported nonnegative measure on [-1, 1]."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def mass_above(self, threshold: float) -> float:
        """Mass of [threshold, 1]."""
        return float(self.weights[self.points >= threshold].sum())

    def aggregated(self, tol: float = _AGGREGATION_TOL) -> "DiscreteMeasure":
        """Merge support points that agree within tol (weighted-mean location)."""
        if len(self.points) == 0:
            return DiscreteMeasure(self.points.copy(), self.weights.copy())
        order = np.argsort(self.points)
        pts, wts = self.points[order], self.weights[order]
        out_p, out_w = [], []
        group_p, group_w = [pts[0]], [wts[0]]
        for p, w in zip(pts[1:], wts[1:]):
            if p - group_p[-1] <= tol:
                group_p.append(p)
                group_w.append(w)
            else:
                tot = float(np.sum(group_w))
                loc = float(np.average(group_p, weights=group_w)) if tot > 0 else float(group_p[0])
                out_p.append(loc)
                out_w.append(tot)
                group_p, group_w = [p], [w]
        tot = float(np.sum(group_w))
        loc = float(np.average(group_p, weights=group_w)) if tot > 0 else float(group_p[0])
        out_p.append(loc)
        out_w.append(tot)
        return DiscreteMeasure(np.array(out_p), np.array(out_w))


def eigendecompose(W: GossipMatrix, dense_limit: int = DENSE_LIMIT) -> SpectralSummary:
    """Full symmetric eigendecomposition, eigenvalues descending.

    Dense only; sizes beyond dense_limit are refused so that callers fall back
    to iteration-only workflows.
    """
    if W.n > dense_limit:
        raise CapabilityError(
            f"n={W.n} exceeds the dense eigendecomposition limit {dense_limit}; "
            "run iterations without spectral verification instead"
        )
    vals, vecs = np.linalg.eigh(W.to_dense())
    vals = np.clip(vals[::-1], -1.0, 1.0)
    vecs = vecs[:, ::-1]
    return SpectralSummary(eigenvalues=vals, eigenvectors=vecs)


def spectral_measure_at_vertex(s: SpectralSummary, v: int) -> DiscreteMeasure:
    """Measure with weight (u^i_v)^2 at each eigenvalue; total mass 1."""
    weights = s.eigenvectors[v, :] ** 2
    return DiscreteMeasure(s.eigenvalues.copy(), weights).aggregated()


def spectral_measure_of_signal(s: SpectralSummary, xi: np.ndarray) -> DiscreteMeasure:
    """Error-mass measure of a signal: weight <xi, u^i>^2 at lambda_i, i >= 2.

    The top eigendirection (the consensus direction on a connected graph) is
    excluded, so the total mass equals ||xi - mean(xi) * 1||^2.
    """
    if len(xi) != s.n:
        raise ValueError("signal length does not match matrix size")
    coeffs = s.eigenvectors.T @ np.asarray(xi, dtype=float)
    return DiscreteMeasure(s.eigenvalues[1:].copy(), coeffs[1:] ** 2).aggregated()


def spectral_dimension_estimate(
    m: DiscreteMeasure, e_range: tuple[float, float], num_points: int = 12
) -> float:
    """Spectral dimension from the decay of sigma([1-E, 1]).

    Samples E on a geometric grid over e_range and returns twice the
    least-squares slope of ln sigma([1-E, 1]) vs ln E. The caller chooses a
    range with gap << E << 1; no canonical default exists on finite graphs.
    """
    lo, hi = e_range
    if not (0 < lo < hi):
        raise EstimationError("E range must satisfy 0 < lo < hi")
    es = np.geomspace(lo, hi, num_points)
    masses = np.array([m.mass_above(1.0 - e) for e in es])
    usable = masses > 0
    if usable.sum() < 3:
        raise EstimationError("fewer than 3 E samples with positive mass")
    slope = np.polyfit(np.log(es[usable]), np.log(masses[usable]), 1)[0]
    return float(2.0 * slope)


def return_probability(m: DiscreteMeasure, t: int) -> float:
    """Lazy-random-walk return probability: integral of ((1+lambda)/2)^t."""
    if t < 0:
        raise ValueError("t must be >= 0")
    base = np.clip((1.0 + m.points) / 2.0, 0.0, 1.0)
    return float(np.sum(m.weights * base**t))
