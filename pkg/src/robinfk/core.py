"""Shared problem definitions and small numerical primitives.

The eigenvalue problem throughout the package is the first Robin eigenvalue
of the p-Laplacian on a bounded domain: minimize

    ( int |grad u|^p dx + beta * int_boundary |u|^p ds ) / int |u|^p dx

over nonzero fields u.  This module holds the parameter containers, the
pointwise convexity gap of t -> |t|^p used by the variational arguments,
weighted L^p norms, and the quadrature tables shared by the mesh-based
modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProblemParams",
    "Tolerances",
    "MeshError",
    "SolverError",
    "VolumeMismatchError",
    "RADIAL_LEVEL_REL_TOL",
    "unit_ball_volume",
    "ball_volume",
    "ball_radius_for_volume",
    "lindqvist_gap",
    "lindqvist_gap_many",
    "lindqvist_constant_estimate",
    "lp_norm",
    "TRI_QP",
    "TRI_QW",
    "EDGE_QP",
    "EDGE_QW",
]


class MeshError(ValueError):
    """Raised when a mesh is malformed or cannot be built to quality."""


class SolverError(RuntimeError):
    """Raised when an eigenvalue solver cannot produce a result."""


class VolumeMismatchError(ValueError):
    """Raised when two domains that must share a volume do not."""


# Relative tolerance for H-constancy checks evaluated on radial profiles.
# Mesh-based checks use Tolerances.level_rel_tol instead; radial quadrature
# is far more accurate than P1 slicing, so the two scales differ.
RADIAL_LEVEL_REL_TOL = 1.0e-6


@dataclass(frozen=True)
class ProblemParams:
    """Exponent p, Robin parameter beta, and ambient dimension.

    p must exceed 1 (the problem degenerates at p = 1), beta is the
    boundary weight (0 gives the Neumann problem with eigenvalue 0),
    and dim is the ambient dimension N >= 2.
    """

    p: float
    beta: float
    dim: int = 2

    def __post_init__(self) -> None:
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p)):
            raise ValueError(f"p must be a finite number, got {self.p!r}")
        if self.p <= 1.0:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if not (isinstance(self.beta, (int, float)) and math.isfinite(self.beta)):
            raise ValueError(f"beta must be a finite number, got {self.beta!r}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not isinstance(self.dim, int) or isinstance(self.dim, bool):
            raise ValueError(f"dim must be an integer, got {self.dim!r}")
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")

    @property
    def conjugate(self) -> float:
        """Holder conjugate p / (p - 1)."""
        return self.p / (self.p - 1.0)

    @property
    def g_cap(self) -> float:
        """beta^(1/(p-1)), the boundary value and global cap of |psi'|/psi on a ball."""
        return self.beta ** (1.0 / (self.p - 1.0))

    def to_dict(self) -> dict:
        return {"p": self.p, "beta": self.beta, "dim": self.dim}

    @staticmethod
    def from_dict(d: dict) -> "ProblemParams":
        return ProblemParams(p=float(d["p"]), beta=float(d["beta"]), dim=int(d["dim"]))


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs shared across the solvers.

    ode_step        radial grid spacing as a fraction of the ball radius
    eig_bisect_tol  bisection width target for eigenvalues, scaled by max(1, lambda)
    descent_rel_tol relative Rayleigh-quotient change that stops the descent
    level_rel_tol   relative tolerance for H-constancy and cross-solver checks
                    on meshes (radial checks use RADIAL_LEVEL_REL_TOL)
    """

    ode_step: float = 1.0 / 4096.0
    eig_bisect_tol: float = 1.0e-10
    descent_rel_tol: float = 1.0e-10
    level_rel_tol: float = 2.0e-2

    def __post_init__(self) -> None:
        for name in ("ode_step", "eig_bisect_tol", "descent_rel_tol", "level_rel_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        if self.ode_step > 0.25:
            raise ValueError(f"ode_step is a fraction of the radius; {self.ode_step} is too coarse")


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit ball in R^dim."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def ball_volume(radius: float, dim: int) -> float:
    return unit_ball_volume(dim) * radius**dim


def ball_radius_for_volume(volume: float, dim: int) -> float:
    """Radius of the ball in R^dim with the given volume."""
    if volume <= 0.0:
        raise ValueError(f"volume must be positive, got {volume}")
    return (volume / unit_ball_volume(dim)) ** (1.0 / dim)


def lindqvist_gap(xi1, xi2, p: float) -> float:
    """Convexity gap |xi2|^p - |xi1|^p - p |xi1|^(p-2) xi1 . (xi2 - xi1).

    Nonnegative for every pair of vectors and every p > 1, by convexity of
    t -> |t|^p.  The middle factor is taken as 0 when xi1 = 0 (its limit for
    p > 1), so the gap at xi1 = 0 is just |xi2|^p.  For p = 2 the gap equals
    |xi2 - xi1|^2 exactly.
    """
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    a = np.atleast_1d(np.asarray(xi1, dtype=float))
    b = np.atleast_1d(np.asarray(xi2, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    n1 = float(np.linalg.norm(a))
    n2 = float(np.linalg.norm(b))
    if n1 == 0.0:
        return n2**p
    cross = float(np.dot(a, b - a))
    return n2**p - n1**p - p * n1 ** (p - 2.0) * cross


def lindqvist_gap_many(xi1: np.ndarray, xi2: np.ndarray, p: float) -> np.ndarray:
    """Vectorized lindqvist_gap over rows of two (n, d) arrays."""
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    a = np.asarray(xi1, dtype=float)
    b = np.asarray(xi2, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"expected matching (n, d) arrays, got {a.shape} and {b.shape}")
    n1 = np.linalg.norm(a, axis=1)
    n2 = np.linalg.norm(b, axis=1)
    cross = np.einsum("ij,ij->i", a, b - a)
    # |xi1|^(p-2) * xi1 . (xi2 - xi1), with the xi1 = 0 rows forced to 0.
    safe = np.where(n1 > 0.0, n1, 1.0)
    middle = np.where(n1 > 0.0, safe ** (p - 2.0) * cross, 0.0)
    return n2**p - n1**p - p * middle


def lindqvist_constant_estimate(
    p: float, dim: int = 2, n_samples: int = 100_000, seed: int = 0
) -> float:
    """Empirical infimum of the normalized convexity gap over random pairs.

    For p >= 2 the gap is conjectured bounded below by C(p) |xi2 - xi1|^p;
    for 1 < p < 2 by C(p) |xi2 - xi1|^2 / (|xi1| + |xi2|)^(2-p).  This probes
    the constant by sampling; it is a diagnostic, not a certified bound.
    """
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n_samples, dim)) * rng.lognormal(0.0, 1.0, (n_samples, 1))
    b = rng.standard_normal((n_samples, dim)) * rng.lognormal(0.0, 1.0, (n_samples, 1))
    gap = lindqvist_gap_many(a, b, p)
    diff = np.linalg.norm(b - a, axis=1)
    keep = diff > 1.0e-12
    if p >= 2.0:
        ratio = gap[keep] / diff[keep] ** p
    else:
        denom = (np.linalg.norm(a, axis=1) + np.linalg.norm(b, axis=1)) ** (2.0 - p)
        keep &= denom > 0.0
        ratio = gap[keep] * denom[keep] / diff[keep] ** 2
    return float(np.min(ratio))


def lp_norm(values, weights, p: float) -> float:
    """Weighted L^p norm ( sum_i w_i |v_i|^p )^(1/p).

    Weights must be strictly positive (quadrature weights or cell measures)
    and p > 1.
    """
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.shape != w.shape:
        raise ValueError(f"shape mismatch: values {v.shape} vs weights {w.shape}")
    if v.size == 0:
        raise ValueError("empty value array")
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be positive and finite")
    return float(np.sum(w * np.abs(v) ** p) ** (1.0 / p))


# Degree-2 quadrature on the reference triangle: three interior points with
# equal weight.  Rows are barycentric coordinates; weights sum to 1 and are
# applied against the triangle area.
TRI_QP = np.array(
    [
        [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ]
)
TRI_QW = np.array([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])

# Three-point Gauss-Legendre rule on [0, 1]; weights sum to 1 and are applied
# against the edge length.
_GL = math.sqrt(3.0 / 5.0) / 2.0
EDGE_QP = np.array([0.5 - _GL, 0.5, 0.5 + _GL])
EDGE_QW = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
