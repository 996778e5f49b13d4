"""Matplotlib figures written next to CLI reports.

Figures are auxiliary: they never enter the report body or its hash.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import grassmann_mc as gm  # noqa: E402


def crofton_law_figure(result: dict, path: Path) -> Path:
    """``A_s`` estimates on log-log axes against ``(s+1)^-k`` and ``(s+2)^-k`` fits."""
    runs = result["estimates"]
    s = np.array([r["s"] for r in runs], dtype=float)
    y = np.array([r["estimate"]["mean"] for r in runs])
    se = np.array([r["estimate"]["std_error"] for r in runs])
    kp = result["kappa"]
    grid = np.linspace(s.min(), s.max(), 100)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar(s + 1, y, yerr=3 * se, fmt="o", label="estimate ± 3 SE")
    ax.plot(grid + 1, result["fit_amplitude"] * (grid + 1) ** (-kp), label=f"a (s+1)^-{kp}")
    ax.plot(grid + 1, result["shifted_fit"]["amplitude"] * (grid + 2) ** (-kp), "--",
            label=f"a (s+2)^-{kp}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("s + 1")
    ax.set_ylabel("A_s")
    ax.set_title(f"Crofton integrand, (n,k)=({result['n']},{result['k']})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def cosine_histogram_figure(n: int, k: int, seed: int, path: Path, N: int = 50_000) -> Path:
    """Histogram of the largest Kähler cosine against the uniform-simplex marginal."""
    lam = gm.chunked(gm._cosine_sampler(n, k), N, seed, (9, n, k))
    kp = lam.shape[1]
    t = np.linspace(0, 1, 200)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.hist(lam[:, 0], bins=60, density=True, alpha=0.6, label="sampled")
    ax.plot(t, kp * t ** (kp - 1), label="uniform simplex")
    if kp == 1:
        ax.plot(t, np.gradient(gm.two_plane_cosine_cdf(t, n), t), "--", label="exact two-plane law")
    ax.set_xlabel("largest Kähler cosine")
    ax.set_ylabel("density")
    ax.set_title(f"(n,k)=({n},{k})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def moment_figure(result: dict, path: Path) -> Path:
    """Moment estimates with error bars against both candidate laws."""
    recs = result["records"]
    s = np.array([r["s"] for r in recs], dtype=float)
    y = np.array([r["estimate"]["mean"] for r in recs])
    se = np.array([r["estimate"]["std_error"] for r in recs])
    grid = np.linspace(0, s.max(), 100)
    n, k = result["n"], result["k"]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar(s, y, yerr=3 * se, fmt="o", label="estimate ± 3 SE")
    for name in ("kappa-factorial", "mass-normalized"):
        ax.plot(grid, [gm.moment_candidates(n, k, g)[name] for g in grid], label=name)
    ax.set_xlabel("s")
    ax.set_ylabel("E |sigma_omega|^s")
    ax.set_title(f"(n,k)=({n},{k})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
