"""Figures for CLI reports, written to files with the Agg backend."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def series_figure(coeffs: np.ndarray, title: str, path) -> Path:
    """Coefficients aₙ and the normalized partial sums A(x)/x."""
    n = np.arange(len(coeffs))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 3.6))
    nz = np.nonzero(coeffs)[0]
    nz = nz[nz >= 1]
    ax1.vlines(nz, 0, coeffs[nz], lw=0.6)
    ax1.set_xlabel("n")
    ax1.set_ylabel("a_n")
    ax1.set_title(title)
    x = n[1:]
    ax2.plot(x, np.cumsum(coeffs[1:]) / x, lw=0.8)
    ax2.set_xscale("log")
    ax2.set_xlabel("x")
    ax2.set_ylabel("A(x)/x")
    ax2.set_title("residue estimate")
    return _finish(fig, path)


def census_figure(per_class: list[dict], title: str, path) -> Path:
    labels = [str(c["class"]) for c in per_class]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 3.6))
    ax1.bar(labels, [c["components"] for c in per_class])
    ax1.set_xlabel("class")
    ax1.set_ylabel("minimal components")
    ax1.set_title(title)
    ax2.bar(labels, [c["residue_estimate"] for c in per_class], color="tab:orange")
    ax2.set_xlabel("class")
    ax2.set_ylabel("A(X)/X")
    ax2.set_title("per-class residue estimates")
    for ax in (ax1, ax2):
        ax.tick_params(axis="x", rotation=45)
    return _finish(fig, path)


def orbit_figure(sizes: list[int], title: str, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    vals, counts = np.unique(np.asarray(sizes, dtype=int), return_counts=True)
    ax.bar([str(v) for v in vals], counts)
    ax.set_xlabel("orbit size")
    ax.set_ylabel("number of orbits")
    ax.set_title(title)
    return _finish(fig, path)


def fixed_point_figure(points: list[list[float]], title: str, path) -> Path:
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    pts = np.asarray(points, dtype=float).reshape(len(points), -1)
    if pts.shape[1] == 1:
        pts = np.column_stack([pts[:, 0], np.zeros(len(pts))])
    ax.scatter(pts[:, 0], pts[:, 1], s=30)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_title(title)
    return _finish(fig, path)


def partition_figure(curves: dict[str, tuple[list[float], list[float]]], title: str, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    for label, (betas, vals) in curves.items():
        ax.plot(betas, vals, label=label)
    ax.set_yscale("log")
    ax.set_xlabel("β")
    ax.set_ylabel("Z(β)")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _finish(fig, path)


def residual_figure(rows: list[dict], title: str, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    idx = np.arange(len(rows))
    floor = 1e-20
    ax.semilogy(idx, [max(r["route_difference"], floor) for r in rows], "o", ms=3, label="|formula − trace|")
    ax.semilogy(idx, [max(r["kms_residual"], floor) for r in rows], "s", ms=3, label="KMS residual")
    ax.semilogy(idx, [r["tail_bound"] for r in rows], "-", lw=0.8, label="tail bound")
    ax.set_xlabel("monomial")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _finish(fig, path)


def prime_set_figure(primes: list[int], bound: int, title: str, path) -> Path:
    """Cumulative count of the set against all primes below the bound."""
    from .ideals import primes_up_to
    allp = primes_up_to(bound)
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.step(allp, np.arange(1, len(allp) + 1), where="post", label="all primes")
    ps = sorted(primes)
    if ps:
        ax.step(ps, np.arange(1, len(ps) + 1), where="post", label="set")
    ax.set_xlabel("x")
    ax.set_ylabel("count ≤ x")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _finish(fig, path)
