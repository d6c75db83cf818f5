"""Independent oracles for the p = 2 radial problem.

For p = 2 on the unit disk the radial profile is J0(k r) and the Robin
condition at r = 1 reads k J1(k) = beta J0(k), so lambda1 = k^2 for the
first positive root k.  The Bessel functions here are evaluated from their
power series directly, so none of the solver's machinery (the ODE
integrator in particular) is involved.  For p = 2 in three dimensions the
Dirichlet-limit profile is sin(pi r) / r with eigenvalue pi^2.
"""

from __future__ import annotations

import math


def j0_series(x: float) -> float:
    """J0 via its power series; accurate for moderate |x| (here |x| < 10)."""
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    for m in range(1, 200):
        term *= q / (m * m)
        total += term
        if abs(term) < 1.0e-18 * max(1.0, abs(total)):
            break
    return total


def j1_series(x: float) -> float:
    """J1 via its power series; accurate for moderate |x|."""
    q = -0.25 * x * x
    term = 0.5 * x
    total = term
    for m in range(1, 200):
        term *= q / (m * (m + 1))
        total += term
        if abs(term) < 1.0e-18 * max(1.0, abs(total)):
            break
    return total


def robin_residual_p2_disk(lam: float, beta: float) -> float:
    """Boundary residual -k J1(k) + beta J0(k) at k = sqrt(lam), unit disk."""
    k = math.sqrt(lam)
    return -k * j1_series(k) + beta * j0_series(k)


def lambda1_p2_disk(beta: float, tol: float = 1.0e-13) -> float:
    """First Robin eigenvalue on the unit disk for p = 2 via bisection.

    Solves k J1(k) = beta J0(k) on (0, j01) where j01 is the first zero of
    J0; the residual beta J0(k) - k J1(k) is positive at 0+ and negative at
    j01, and the first sign change is the eigenvalue.
    """
    if beta == 0.0:
        return 0.0
    f = lambda k: beta * j0_series(k) - k * j1_series(k)
    lo, hi = 1.0e-9, None
    k = 1.0e-9
    while k < 10.0:
        step = 0.01
        if f(k + step) < 0.0:
            lo, hi = k, k + step
            break
        k += step
    if hi is None:
        raise RuntimeError(f"no sign change found for beta={beta}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            hi = mid
        else:
            lo = mid
    k = 0.5 * (lo + hi)
    return k * k


def dirichlet_lambda1_ball_n3() -> float:
    """Dirichlet limit for p = 2, N = 3, R = 1: profile sin(pi r)/r, eigenvalue pi^2."""
    return math.pi**2
