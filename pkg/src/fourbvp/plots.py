"""Report figures rendered next to the CSV output."""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .driver import evaluate


def solution_figure(sol, title, path, npoints=2000):
    a, b = sol.interval
    x = np.linspace(a, b, npoints)
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(x, evaluate(sol, x, 0), lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel("phi(x)")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def convergence_figure(report, path):
    rows = [r for r in report.rows if not r.failed]
    if not rows:
        return
    ms = [r.m for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for j in range(5):
        ax.loglog(ms, [max(r.errors[j], 1e-18) for r in rows],
                  marker="o", ms=3, lw=1.0, label=f"R(phi^({j}))")
    ax.set_xlabel("subintervals m")
    ax.set_ylabel("relative error R")
    ax.set_title(f"{report.problem_id}: convergence")
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def residual_figure(report, path):
    rows = [r for r in report.rows if not r.failed and r.residuals]
    if not rows:
        return
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for row in rows:
        its = np.arange(1, len(row.residuals) + 1)
        ax.semilogy(its, np.maximum(row.residuals, 1e-18),
                    marker="o", ms=3, lw=1.0, label=f"m = {row.m}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative residual")
    ax.set_title(f"{report.problem_id}: deferred corrections")
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(report, solutions, problem, reference, output_dir):
    """Solution, convergence, and residual-decay figures for one report."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = report.problem_id
    if solutions:
        m = max(solutions)
        solution_figure(solutions[m], f"{base} (m = {m})",
                        out / f"{base}_solution.png")
    convergence_figure(report, out / f"{base}_convergence.png")
    residual_figure(report, out / f"{base}_residuals.png")
