"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .coherence import cut_coherence, monogamy
from .errors import QRGError
from .linalg import partial_trace
from .models import DM, MODELS, block_ground_state, iterate_flow, uncorrected_q
from .verify import DEFAULT_SEED, run_all

EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULTS = {
    "sweep": {"param": "0:2:201", "steps": "0"},
    "flow": {"start": "0.5", "steps": "10"},
    "scaling": {"steps": "2:8", "window": "0.8:1.2"},
    "monogamy": {"param": "0.05:4:200", "steps": "0"},
    "verify": {},
}
CONFIG_KEYS = ("model", "param", "steps", "window", "start", "out", "summary", "seed")


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """Six significant digits; frozen couplings come out as ``inf`` / ``0``."""
    return f"{x:.6g}"


def parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, points = text.split(":")
        lo, hi, points = float(lo), float(hi), int(points)
    except ValueError:
        raise UsageError(f"grid must look like MIN:MAX:POINTS, got {text!r}") from None
    if points == 1 and lo == hi:
        return np.array([lo])
    if not lo < hi or points < 2:
        raise UsageError(f"grid needs MIN < MAX and POINTS >= 2 (or MIN == MAX with POINTS == 1), got {text!r}")
    if lo < 0:
        raise UsageError("couplings must be >= 0")
    return np.linspace(lo, hi, points)


def parse_steps(text: str) -> list[int]:
    try:
        if ":" in text:
            a, b = (int(v) for v in text.split(":"))
            if a > b:
                raise ValueError
            steps = list(range(a, b + 1))
        else:
            steps = [int(text)]
    except ValueError:
        raise UsageError(f"steps must be N or A:B with A <= B, got {text!r}") from None
    if steps[0] < 0:
        raise UsageError("steps must be >= 0")
    return steps


def parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"window must look like LO:HI, got {text!r}") from None
    if not 0 <= lo < hi:
        raise UsageError(f"window needs 0 <= LO < HI, got {text!r}")
    return lo, hi


def read_config(path: str) -> dict[str, str]:
    """Plain ``key=value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    config = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: expected one of {', '.join(CONFIG_KEYS)} as key=value")
        config[key] = value.strip()
    return config


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then from per-command defaults."""
    config = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        if getattr(args, key, None) is None and key in config:
            setattr(args, key, config[key])
    for key, value in DEFAULTS[args.command].items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    if args.model is None:
        args.model = DM if args.command == "monogamy" else "itf"
    if args.model not in MODELS:
        raise UsageError(f"--model must be one of {', '.join(MODELS)}")
    if args.seed is not None:
        try:
            args.seed = int(args.seed)
        except ValueError:
            raise UsageError(f"--seed must be an integer, got {args.seed!r}") from None
    return args


def write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def to_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    grid = parse_grid(args.param)
    rows = []
    for n in parse_steps(args.steps):
        for r in analysis.sweep(args.model, grid, n):
            rows.append([fmt(r.param), str(n), fmt(r.effective_param), fmt(r.total), fmt(r.local), fmt(r.collective)])
    header = ["param", "n_steps", "effective_param", "C_total", "C_local", "C_collective"]
    write_text(args.out, to_csv(header, rows))
    return 0


def cmd_flow(args) -> int:
    try:
        start = float(args.start)
    except ValueError:
        raise UsageError(f"--start must be a number, got {args.start!r}") from None
    steps = parse_steps(args.steps)
    if len(steps) != 1:
        raise UsageError("flow takes a single depth, --steps N")
    traj = iterate_flow(args.model, start, steps[0])
    last = traj.depth if traj.frozen_at is None else traj.frozen_at
    rows = [[str(k), fmt(traj.couplings[k]), fmt(traj.strengths[k])] for k in range(last + 1)]
    write_text(args.out, to_csv(["n", "coupling", "strength_ratio"], rows))
    return 0


def cmd_scaling(args) -> int:
    depths = parse_steps(args.steps)
    if len(depths) < 3:
        raise UsageError("scaling needs at least three depths, e.g. --steps 2:8")
    window = parse_window(args.window)
    fits = analysis.scaling_fits(args.model, depths, window)
    coll, loc = fits[analysis.COLLECTIVE], fits[analysis.LOCAL]
    rows = [
        [str(n), fmt(ln_n), fmt(ln_c), fmt(ln_l), fmt(x_star)]
        for n, (ln_n, ln_c), (_, ln_l), x_star in zip(depths, coll.points, loc.points, coll.x_stars)
    ]
    write_text(args.out, to_csv(["n", "lnN", "ln_abs_dCc", "ln_abs_dCl", "x_star"], rows))
    summary = {
        "model": args.model,
        "theta_c": coll.theta,
        "theta_l": loc.theta,
        "nu_c": coll.nu,
        "nu_l": loc.nu,
        "r2_c": coll.r_squared,
        "r2_l": loc.r_squared,
        "depths": list(depths),
        "window": list(window),
        "x_star_c": list(coll.x_stars),
        "x_star_l": list(loc.x_stars),
    }
    summary_path = args.summary
    if summary_path is None and args.out is not None:
        summary_path = str(Path(args.out).with_suffix(".json"))
    write_text(summary_path, json.dumps(summary, indent=2) + "\n")
    return 0


def cmd_monogamy(args) -> int:
    if args.model != DM:
        raise UsageError("monogamy is defined for the three-site dm block only")
    grid = parse_grid(args.param)
    steps = parse_steps(args.steps)
    if len(steps) != 1:
        raise UsageError("monogamy takes a single depth, --steps N")
    rows = []
    for D in grid:
        traj = iterate_flow(DM, float(D), steps[0])
        rho = block_ground_state(DM, traj.final).density_matrix().matrix
        report = monogamy(rho)
        c23 = float(cut_coherence(partial_trace(rho, [1, 2]), [[0], [1]]))
        c12, c13 = report.pairwise["1:2"], report.pairwise["1:3"]
        rows.append([fmt(D), fmt(c12), fmt(c13), fmt(c23), fmt(report.headcut), fmt(report.M)])
    write_text(args.out, to_csv(["D", "C_12", "C_13", "C_23", "C_1_23", "M"], rows))
    return 0


def cmd_verify(args) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    report = run_all(seed, q_of=uncorrected_q) if args.uncorrected_q else run_all(seed)
    write_text(args.out, json.dumps(report, indent=2) + "\n")
    return 0 if report["passed"] else EXIT_VERIFY


COMMANDS = {
    "sweep": cmd_sweep,
    "flow": cmd_flow,
    "scaling": cmd_scaling,
    "monogamy": cmd_monogamy,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrg-coherence",
        description="Coherence of renormalized Ising block ground states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="itf or dm")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", help="random seed")
    common.add_argument("--config", help="key=value file; command-line flags take precedence")

    p = sub.add_parser("sweep", parents=[common], help="coherence vs bare coupling at given depths")
    p.add_argument("--param", help="MIN:MAX:POINTS")
    p.add_argument("--steps", help="N or A:B")

    p = sub.add_parser("flow", parents=[common], help="iterate the coupling flow")
    p.add_argument("--start", help="starting coupling")
    p.add_argument("--steps", help="depth N")

    p = sub.add_parser("scaling", parents=[common], help="finite-size scaling of derivative peaks")
    p.add_argument("--steps", help="depth range A:B (at least three depths)")
    p.add_argument("--window", help="LO:HI search window")
    p.add_argument("--summary", help="JSON summary path (default: --out with .json suffix, else stdout)")

    p = sub.add_parser("monogamy", parents=[common], help="bipartite cuts and monogamy of the dm block")
    p.add_argument("--param", help="MIN:MAX:POINTS over D")
    p.add_argument("--steps", help="depth N")

    p = sub.add_parser("verify", parents=[common], help="run the self-check suites")
    p.add_argument("--uncorrected-q", action="store_true",
                   help="use q = 1/sqrt(1+8D^2) in the dm flow (negative control, must fail)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key in CONFIG_KEYS:
        if not hasattr(args, key):
            setattr(args, key, None)
    try:
        resolve(args)
        return COMMANDS[args.command](args)
    except (UsageError, QRGError) as exc:
        print(f"qrg-coherence {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qrg-coherence {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
