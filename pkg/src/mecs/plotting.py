"""Figure rendering for the CLI report path.

Each function takes the rows of the corresponding sweep table and writes a
figure file next to the delimited output. Uses the Agg backend so it works
headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "plot_coefficients",
    "plot_entropy_sweep",
    "plot_backends_check",
    "plot_teleport",
]


def plot_coefficients(table, path: str) -> None:
    """Max closed-vs-DFT residual per M, log scale."""
    per_m: dict[int, float] = {}
    for row in table.rows:
        m, _q, _re, _im, resid = row
        per_m[m] = max(per_m.get(m, 0.0), resid)
    ms = sorted(per_m)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ms, [max(per_m[m], 1e-18) for m in ms], "o-")
    ax.axhline(1e-12, color="grey", ls="--", lw=1, label="tolerance 1e-12")
    ax.set_xlabel("M")
    ax.set_ylabel("max |f_closed - f_dft|")
    ax.set_title("Revival coefficients: closed form vs DFT inversion")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_entropy_sweep(table, path: str) -> None:
    """Entanglement vs tau/pi = 1/M, one marker series per |alpha|^2."""
    series: dict[float, list[tuple[float, float]]] = {}
    refs: list[tuple[float, float]] = []
    cols = table.columns
    for row in table.rows:
        rec = dict(zip(cols, row))
        series.setdefault(rec["alpha_sq"], []).append((rec["tau_over_pi"], rec["entropy_ebits"]))
        refs.append((rec["tau_over_pi"], rec["log2M_reference"]))
    fig, ax = plt.subplots(figsize=(6, 4))
    markers = ["o", "x", "s", "^", "d"]
    for i, (a2, pts) in enumerate(sorted(series.items())):
        pts.sort()
        ax.plot(*zip(*pts), markers[i % len(markers)], ls="none", label=f"$|\\alpha|^2$ = {a2:g}")
    refs = sorted(set(refs))
    ax.plot(*zip(*refs), "-", color="grey", lw=1, label="$\\log_2(\\pi/\\tau)$")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\tau/\pi = 1/M$")
    ax.set_ylabel("entanglement (ebits)")
    ax.set_title("Entanglement of the M-branch state at revival times")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_backends_check(table, path: str) -> None:
    """Cross-backend infidelity and conservation error per (beta, M)."""
    cols = table.columns
    labels, infid, linf = [], [], []
    for row in table.rows:
        rec = dict(zip(cols, row))
        labels.append(f"|b|={rec['beta_abs']:.3g}\nM={rec['M']}")
        infid.append(max(1.0 - rec["fidelity"], 1e-18))
        linf.append(max(rec["distribution_linf"], 1e-18))
    x = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(labels)), 4))
    ax.semilogy(x, infid, "o", label="1 - fidelity")
    ax.semilogy(x, linf, "x", label="photon distribution L-inf drift")
    ax.set_xticks(list(x), labels, fontsize=7)
    ax.axhline(1e-8, color="grey", ls="--", lw=1)
    ax.set_ylabel("error")
    ax.set_title("Coherent-branch backend vs number-basis oracle")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_teleport(table, path: str) -> None:
    """Success probability and conditional fidelities across the alpha grid."""
    cols = table.columns
    recs = [dict(zip(cols, row)) for row in table.rows]
    recs.sort(key=lambda r: (r["M"], r["alpha_abs"]))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    for m in sorted({r["M"] for r in recs}):
        sub = [r for r in recs if r["M"] == m]
        a = [r["alpha_abs"] for r in sub]
        ax1.errorbar(
            a,
            [r["mc_success_rate"] for r in sub],
            yerr=[4 * r["mc_success_stderr"] for r in sub],
            fmt="o",
            label=f"M={m} (Monte-Carlo)",
        )
        exact = [(r["alpha_abs"], r["exact_success"]) for r in sub if r["exact_success"] == r["exact_success"]]
        if exact:
            ax1.plot(*zip(*exact), "-", label=f"M={m} (exact)")
        ax2.plot(a, [r["mean_fidelity_residual"] for r in sub], "o-", label=f"M={m} vs residual")
        ax2.plot(a, [r["mean_fidelity_ideal"] for r in sub], "x--", label=f"M={m} vs ideal")
    ax1.set_xlabel(r"$|\alpha|$")
    ax1.set_ylabel("success probability")
    ax1.legend(fontsize=8)
    ax2.set_xlabel(r"$|\alpha|$")
    ax2.set_ylabel("mean conditional fidelity")
    ax2.legend(fontsize=8)
    fig.suptitle("Probabilistic teleportation")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
