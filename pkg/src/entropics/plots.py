"""Figure rendering for the report-producing commands.

Each renderer takes the already-computed rows of a CSV report and writes a
PNG next to it. The CSV stays the canonical machine-readable payload; the
figures are a convenience view of the same numbers.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_truncation_sweep(rows, path: str) -> None:
    """chi per truncation level against the full value.

    ``rows`` are (n, lam, chi_n, hhat_n, bound_ok) tuples.
    """
    ns = [r[0] for r in rows]
    lams = [r[1] for r in rows]
    chis = [r[2] for r in rows]
    weighted = [r[1] * r[2] for r in rows]
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax.plot(ns, chis, "o-", label="chi of truncation")
    ax.plot(ns, weighted, "s--", label="mass-weighted")
    ax.axhline(chis[-1], color="gray", lw=0.8, label="full value")
    ax.set_xlabel("truncation level n")
    ax.set_ylabel("chi (nats)")
    ax.legend(fontsize=8)
    ax2.plot(ns, lams, "o-", color="tab:green")
    ax2.set_xlabel("truncation level n")
    ax2.set_ylabel("truncated mass")
    ax2.set_ylim(0.0, 1.05)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_tracking(rows, path: str) -> None:
    """Certificate tracking across truncation levels.

    ``rows`` are (n, lam, atoms, avg_distance, achieved_vs_full, chi_n,
    trend_ok) tuples.
    """
    ns = [r[0] for r in rows]
    dist = [r[3] for r in rows]
    achieved = [r[4] for r in rows]
    chis = [r[5] for r in rows]
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax.semilogy([n for n, d in zip(ns, dist) if d > 0],
                [d for d in dist if d > 0], "o-")
    ax.set_xlabel("truncation level n")
    ax.set_ylabel("lifted average distance to full state")
    ax2.plot(ns, achieved, "o-", label="achieved vs full state")
    ax2.plot(ns, chis, "s--", label="chi of truncation")
    ax2.set_xlabel("truncation level n")
    ax2.set_ylabel("value (nats)")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_suite(report, path: str) -> None:
    """Bar chart of worst breach per property case against its tolerance."""
    names = [r.name for r in report.results]
    ratio = []
    for r in report.results:
        scale = r.tolerance if r.tolerance > 0 else 1.0
        ratio.append(max(r.worst_breach, 0.0) / scale)
    colors = ["tab:red" if r.status == "fail" else
              "tab:orange" if r.status == "warn" else "tab:blue"
              for r in report.results]
    fig, ax = plt.subplots(figsize=(7.5, 0.4 * len(names) + 1.5))
    ax.barh(range(len(names)), ratio, color=colors)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.axvline(1.0, color="black", lw=0.8)
    ax.axvline(2.0, color="black", lw=0.8, ls="--")
    ax.set_xlabel("worst breach / tolerance (1 = warn band, 2 = fail band)")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
