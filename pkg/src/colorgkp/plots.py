"""Figure rendering for sweep outputs (written next to the CSV files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .montecarlo import PointResult, ThresholdEstimate  # noqa: E402

__all__ = ["plot_threshold", "plot_delta"]


def plot_threshold(results: list[PointResult],
                   estimate: ThresholdEstimate | None, path,
                   noise_label: str = "noise") -> None:
    """Logical rate vs noise, one curve per distance, crossing marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for d in sorted({r.d for r in results}):
        rows = sorted((r for r in results if r.d == d), key=lambda r: r.noise)
        xs = [r.noise for r in rows]
        ys = []
        lo = []
        hi = []
        for r in rows:
            rate, l, h = r.interval()
            ys.append(rate)
            lo.append(max(rate - l, 0.0))
            hi.append(max(h - rate, 0.0))
        ax.errorbar(xs, ys, yerr=[lo, hi], marker="o", capsize=2,
                    label=f"d = {d}")
    if estimate is not None:
        ax.axvline(estimate.value, color="k", ls="--", lw=1,
                   label=f"crossing {estimate.value:.3g} "
                         f"± {estimate.uncertainty:.2g}")
    ax.set_yscale("log")
    ax.set_xlabel(noise_label)
    ax.set_ylabel("logical error rate")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_delta(rows: list[dict], path) -> None:
    """Distance-to-perfect-correction curves.

    Accepts the delta-sweep rows; alpha-scan rows are grouped by sigma1 and
    plotted against alpha, scheme rows are grouped by scheme and plotted
    against sigma.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    alpha_rows = [r for r in rows if r["mode"] == "alpha"]
    scheme_rows = [r for r in rows if r["mode"] == "scheme"]
    if alpha_rows:
        for s1 in sorted({r["sigma1"] for r in alpha_rows}):
            grp = sorted((r for r in alpha_rows if r["sigma1"] == s1),
                         key=lambda r: r["alpha"])
            ax.errorbar([r["alpha"] for r in grp],
                        [r["delta"] for r in grp],
                        yerr=[r["stderr"] for r in grp],
                        marker=".", label=f"sigma1 = {s1:g}")
        ax.set_xlabel("correction multiplier")
    else:
        for scheme in sorted({r["scheme"] for r in scheme_rows}):
            grp = sorted((r for r in scheme_rows if r["scheme"] == scheme),
                         key=lambda r: r["sigma1"])
            ax.errorbar([r["sigma1"] for r in grp],
                        [r["delta"] for r in grp],
                        yerr=[r["stderr"] for r in grp],
                        marker=".", label=scheme)
        ax.set_xlabel("sigma")
    ax.set_ylabel("distance to perfect correction")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
