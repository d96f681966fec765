"""Command-line experiment runner.

Subcommands: coefficients, entropy-sweep, backends-check, teleport. Each
produces a deterministic CSV or JSON table (and optionally a rendered
figure). Exit codes: 0 success, 2 usage error, 3 numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import __version__, entanglement, fock, teleport
from .css import fq_closed, fq_dft
from .tables import SweepTable

__all__ = [
    "main",
    "cmd_coefficients",
    "cmd_entropy_sweep",
    "cmd_backends_check",
    "cmd_teleport",
    "pipeline_fidelity",
]

BACKEND_FIDELITY_TOL = 1e-8
CONSERVATION_TOL = 1e-10

_CONFIG_TYPES = {
    "seed": int,
    "trials": int,
    "m_max": int,
    "n_cap": int,
    "h_only": lambda s: s.strip().lower() in {"1", "true", "yes", "on"},
}


def parse_values(spec: str, cast=float) -> list:
    """Parse comma lists and start:stop:step ranges (inclusive start and,
    when the step lands on it, stop)."""
    out = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token and cast is not complex:
            parts = token.split(":")
            if len(parts) != 3:
                raise ValueError(f"bad range {token!r}; expected start:stop:step")
            start, stop, step = (float(p) for p in parts)
            if step <= 0:
                raise ValueError("range step must be positive")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(start + k * step for k in range(max(n, 0)))
        else:
            out.append(token)
    if cast is int:
        return [int(round(float(v))) if not isinstance(v, float) else int(round(v)) for v in out]
    return [cast(v) for v in out]


def input_preset(name: str, M: int) -> np.ndarray:
    """Named coefficient vectors for the state to teleport."""
    match = re.fullmatch(r"basis(\d+)", name)
    if match:
        q0 = int(match.group(1))
        if q0 >= M:
            raise ValueError(f"basis index {q0} out of range for M={M}")
        vec = np.zeros(M, dtype=np.complex128)
        vec[q0] = 1.0
        return vec
    if name == "uniform":
        return np.ones(M, dtype=np.complex128) / math.sqrt(M)
    if name == "plusi":
        vec = np.zeros(M, dtype=np.complex128)
        vec[0] = 1.0 / math.sqrt(2.0)
        vec[1] = 1.0j / math.sqrt(2.0)
        return vec
    raise ValueError(f"unknown input preset {name!r} (use uniform, plusi, or basis<k>)")


def pipeline_fidelity(beta: complex, M: int) -> tuple[float, float]:
    """Compare the two backends on the Kerr-plus-beamsplitter pipeline.

    Returns (fidelity between the number-basis and coherent-branch pipeline
    states, L-inf drift of the total photon-number distribution).
    """
    cutoff = fock.default_cutoff(beta)
    initial = fock.FockMat(
        np.outer(
            fock.coherent_fock(beta, cutoff).amps,
            fock.coherent_fock(0.0, cutoff).amps,
        )
    )
    evolved = fock.split_with_vacuum(fock.kerr_evolve(fock.coherent_fock(beta, cutoff), math.pi / M))
    css_arr = entanglement.generate_ecs(M, beta).to_fock((cutoff, cutoff))
    overlap = np.vdot(evolved.amps, css_arr)
    fid = abs(overlap) ** 2 / (evolved.norm_sq * float(np.sum(np.abs(css_arr) ** 2)))
    dist_before = fock.total_number_distribution(initial)
    dist_after = fock.total_number_distribution(evolved)
    linf = float(np.max(np.abs(dist_before - dist_after)))
    return fid, linf


# -- subcommand implementations ---------------------------------------------


def cmd_coefficients(m_max: int, metadata: dict) -> SweepTable:
    if m_max < 2:
        raise ValueError("m-max must be >= 2")
    rows = []
    for m in range(2, m_max + 1):
        closed = fq_closed(m).f
        oracle = fq_dft(m).f
        for q in range(m):
            rows.append(
                (m, q, float(closed[q].real), float(closed[q].imag), float(abs(closed[q] - oracle[q])))
            )
    return SweepTable(["M", "q", "re_f", "im_f", "closed_minus_dft_abs"], rows, metadata)


def cmd_entropy_sweep(alpha_sq_list, m_values, metadata: dict) -> SweepTable:
    rows = entanglement.entropy_sweep(alpha_sq_list, m_values)
    cols = ["alpha_sq", "M", "tau_over_pi", "entropy_ebits", "log2M_reference"]
    return SweepTable(cols, [tuple(r[c] for c in cols) for r in rows], metadata)


def cmd_backends_check(betas, m_values, metadata: dict) -> tuple[SweepTable, bool]:
    rows = []
    ok = True
    for beta in betas:
        if abs(beta) ** 2 > 10.0 + 1e-12:
            raise ValueError("backends-check limited to |beta|^2 <= 10")
        for m in m_values:
            fid, linf = pipeline_fidelity(beta, int(m))
            ok = ok and fid >= 1.0 - BACKEND_FIDELITY_TOL and linf < CONSERVATION_TOL
            rows.append((float(abs(beta)), float(beta.real), float(beta.imag), int(m), fid, linf))
    cols = ["beta_abs", "beta_re", "beta_im", "M", "fidelity", "distribution_linf"]
    return SweepTable(cols, rows, metadata), ok


def cmd_teleport(
    m_values, alphas, trials: int, seed: int, input_name: str, h_only: bool, n_cap, metadata: dict
) -> SweepTable:
    rows = []
    for m in m_values:
        m = int(m)
        if m % 2 or m < 2:
            raise ValueError(f"teleportation requires even M >= 2, got {m}")
        for alpha in alphas:
            cfg = teleport.TeleportConfig(
                M=m,
                alpha=alpha,
                Q=input_preset(input_name, m),
                seed=seed,
                trials=trials,
                n_cap=n_cap,
                h_only=h_only,
            )
            stats = teleport.run_trials(cfg)
            rows.append(
                (
                    m,
                    float(abs(alpha)),
                    float(alpha.real),
                    float(alpha.imag),
                    input_name,
                    trials,
                    stats.successes,
                    stats.g_successes,
                    stats.h_successes,
                    stats.success_probability,
                    stats.success_stderr,
                    stats.mean_fidelity_vs_ideal,
                    stats.mean_fidelity_vs_residual_target,
                    stats.exact_success_probability if stats.exact_success_probability is not None else float("nan"),
                    (
                        stats.exact_success_probability_h_only
                        if stats.exact_success_probability_h_only is not None
                        else float("nan")
                    ),
                )
            )
    cols = [
        "M",
        "alpha_abs",
        "alpha_re",
        "alpha_im",
        "input",
        "trials",
        "successes",
        "g_successes",
        "h_successes",
        "mc_success_rate",
        "mc_success_stderr",
        "mean_fidelity_ideal",
        "mean_fidelity_residual",
        "exact_success",
        "exact_success_h_only",
    ]
    return SweepTable(cols, rows, metadata)


# -- argument handling --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mecs",
        description=(
            "Multi-dimensional entangled coherent states: revival coefficients, "
            "entanglement sweeps, backend cross-checks, and probabilistic "
            "teleportation. Numeric grids accept comma lists and inclusive "
            "start:stop:step ranges."
        ),
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--config", default=None, help="key=value file; command line overrides it")
    parser.add_argument("--plot", default=None, help="also render a figure to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coefficients", help="revival coefficients and closed-vs-DFT residuals")
    p.add_argument("--m-max", dest="m_max", type=int, default=16)

    p = sub.add_parser("entropy-sweep", help="entanglement vs M at the revival times")
    p.add_argument("--alpha-sq", dest="alpha_sq", default="1,10", help="grid of |alpha|^2 values")
    p.add_argument("--m", default="2:40:1", help="grid of M values (integers >= 2)")

    p = sub.add_parser("backends-check", help="coherent-branch backend vs number-basis oracle")
    p.add_argument("--beta", default="1", help="comma list of complex amplitudes, |beta|^2 <= 10")
    p.add_argument("--m", default="2,3,4,5,8", help="grid of M values")

    p = sub.add_parser("teleport", help="probabilistic teleportation statistics (even M)")
    p.add_argument("--m", default="2", help="comma list of even M values")
    p.add_argument("--alpha", default="3", help="comma list of complex amplitudes")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--input", default="uniform", help="uniform, plusi, or basis<k>")
    p.add_argument("--h-only", dest="h_only", action="store_true", help="count only dark H-modes as success")
    p.add_argument("--n-cap", dest="n_cap", type=int, default=None, help="per-mode photon cutoff override")
    return parser


def load_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            values[key] = _CONFIG_TYPES.get(key, str)(value)
    return values


def _resolve_args(argv) -> argparse.Namespace:
    parser = build_parser()
    # first pass only to locate --config; file values become defaults so that
    # anything given on the command line still wins
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config:
        values = load_config_file(known.config)
        parser.set_defaults(**values)
        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    sub.set_defaults(**values)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _resolve_args(argv)
    except (ValueError, OSError) as exc:
        print(f"mecs: {exc}", file=sys.stderr)
        return 2

    metadata = {
        "tool": "mecs",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "rng": teleport.RNG_SCHEME,
        "config": " ".join(
            f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in {"out", "plot", "config"}
        ),
    }
    status = 0
    try:
        if args.command == "coefficients":
            table = cmd_coefficients(args.m_max, metadata)
            plotter = "plot_coefficients"
        elif args.command == "entropy-sweep":
            table = cmd_entropy_sweep(
                parse_values(args.alpha_sq, float), parse_values(args.m, int), metadata
            )
            plotter = "plot_entropy_sweep"
        elif args.command == "backends-check":
            table, ok = cmd_backends_check(
                parse_values(args.beta, complex), parse_values(args.m, int), metadata
            )
            plotter = "plot_backends_check"
            if not ok:
                status = 3
        else:
            table = cmd_teleport(
                parse_values(args.m, int),
                parse_values(args.alpha, complex),
                args.trials,
                args.seed,
                args.input,
                args.h_only,
                args.n_cap,
                metadata,
            )
            plotter = "plot_teleport"
    except ValueError as exc:
        print(f"mecs: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"mecs: {exc}", file=sys.stderr)
        return 3

    text = table.dump(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        from . import plotting

        getattr(plotting, plotter)(table, args.plot)
    return status


if __name__ == "__main__":
    sys.exit(main())
