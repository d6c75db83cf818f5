"""Optional figure rendering for the CLI's report paths.

Every function writes one PNG next to the delimited output and closes its
figure; nothing here is imported unless a --plot flag asks for it.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fk import FkReport
from .radial import RadialSolution
from .variational import EigenSolution

__all__ = [
    "plot_radial",
    "plot_solution",
    "plot_scan",
    "plot_transplant",
    "plot_fk",
    "plot_sweep",
]


def plot_radial(sol: RadialSolution, path) -> None:
    """Profile, slope ratio, and the boundary cap on one sheet."""
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    axes[0].plot(sol.grid, sol.psi)
    axes[0].set_xlabel("r")
    axes[0].set_ylabel(r"$\psi$")
    axes[0].set_title(rf"$\lambda_1$ = {sol.lambda1:.6g}")
    axes[1].plot(sol.grid, sol.g)
    cap = sol.params.g_cap
    axes[1].axhline(cap, color="tab:red", lw=0.8, ls="--", label=r"$\beta^{1/(p-1)}$")
    axes[1].set_xlabel("r")
    axes[1].set_ylabel(r"$g = |\psi'|/\psi$")
    axes[1].legend()
    axes[2].semilogy(sol.grid, np.maximum(sol.psi, 1e-300))
    axes[2].set_xlabel("r")
    axes[2].set_ylabel(r"$\psi$ (log)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_solution(sol: EigenSolution, path) -> None:
    """Filled triangulation of the eigenfunction."""
    mesh = sol.mesh
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    tpc = ax.tripcolor(
        mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.triangles, sol.psi, shading="gouraud"
    )
    fig.colorbar(tpc, ax=ax, label=r"$\psi$")
    ax.set_aspect("equal")
    ax.set_title(rf"$\lambda_1$ = {sol.lambda1:.6g} (p={sol.params.p}, $\beta$={sol.params.beta})")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_scan(slices, lambda1: float, path) -> None:
    """H across thresholds against the eigenvalue line."""
    ts = [s.t for s in slices]
    hs = [s.h_value for s in slices]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ts, hs, "o-", ms=3, label="H")
    ax.axhline(lambda1, color="tab:red", lw=0.8, ls="--", label=r"$\lambda_1$")
    ax.set_xlabel("t")
    ax.set_ylabel("H")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_transplant(rows, path) -> None:
    """Domain-side and ball-side H across the comparison grid."""
    ts = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ts, [r[1] for r in rows], "o-", ms=3, label=r"$H_\Omega$")
    ax.plot(ts, [r[2] for r in rows], "s-", ms=3, label=r"$H_B$")
    ax.set_xlabel("t")
    ax.set_ylabel("H")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_fk(report: FkReport, path) -> None:
    """The two eigenvalues side by side with the gap annotated."""
    fig, ax = plt.subplots(figsize=(4.4, 4.0))
    ax.bar(["ball", report.omega_descriptor], [report.lambda_ball, report.lambda_omega])
    ax.set_ylabel(r"$\lambda_1$")
    ax.set_title(f"gap = {report.gap:+.4g} ({'pass' if report.passed else 'FAIL'})")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_sweep(rows, path) -> None:
    """Per-job gaps; failed jobs show as hatched zero bars."""
    labels = [f"{r['domain']}\np={r['p']} b={r['beta']}" for r in rows]
    gaps = [float(r["gap"]) if r["gap"] != "" else 0.0 for r in rows]
    ok = [r["passed"] == "true" for r in rows]
    fig, ax = plt.subplots(figsize=(max(5.0, 0.9 * len(rows)), 4.2))
    bars = ax.bar(range(len(rows)), gaps)
    for bar, good in zip(bars, ok):
        bar.set_color("tab:blue" if good else "tab:red")
        if not good:
            bar.set_hatch("//")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=6, rotation=45, ha="right")
    ax.set_ylabel(r"$\lambda_1(\Omega) - \lambda_1(B)$")
    ax.axhline(0.0, color="k", lw=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
