"""Command-line entry point: ``spiderweb {sweep,phi,limits,oracle}``.

Exit codes: 0 success, 2 usage error, 3 numeric-regime refusal, 4 oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import asymptotics, genfun, limits, moments, oracles
from .errors import RegimeError, ThresholdError
from .netgraph import NetworkParams
from .simulate import estimate_Q

log = logging.getLogger("spiderweb")

EXIT_OK, EXIT_USAGE, EXIT_REGIME, EXIT_ORACLE = 0, 2, 3, 4

SWEEP_COLUMNS = (
    "b", "k", "l", "q", "samples", "seed", "q_hat", "ci_low", "ci_high", "q_limit",
    "ex_x", "ex_x2_exact", "ex_x2_asym", "markov_upper", "chebyshev_lower", "q_c",
)  # fmt: skip


class UsageError(Exception):
    pass


def fmt_float(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class SweepConfig:
    b: int
    c: float
    k_list: list[int]
    q_grid: tuple[float, float, float]
    samples: int
    seed: int
    out: str | None = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self) -> None:
        start, stop, step = self.q_grid
        if not self.k_list:
            raise UsageError("k list is empty")
        if any(k < 1 for k in self.k_list):
            raise UsageError("every k must be >= 1")
        if self.b < 2 or not self.c > 1:
            raise UsageError("need b >= 2 and c > 1")
        if step <= 0 or not 0 < start <= stop < 1:
            raise UsageError(f"q grid {start}:{stop}:{step} must satisfy 0 < start <= stop < 1, step > 0")
        if self.samples < 1:
            raise UsageError("samples must be >= 1")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")

    def q_values(self) -> list[float]:
        start, stop, step = self.q_grid
        n = int(math.floor((stop - start) / step + 1e-9))
        return [round(start + i * step, 12) for i in range(n + 1)]


def parse_q_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            q = float(parts[0])
            return q, q, 1.0
        if len(parts) == 3:
            start, stop, step = (float(p) for p in parts)
            return start, stop, step
    except ValueError:
        pass
    raise UsageError(f"--q expects start:stop:step or a single value, got {text!r}")


def parse_k_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--k expects a comma-separated list of integers, got {text!r}") from None


def depth_for(c: float, k: int) -> int:
    l = round(c * k)
    if not math.isclose(c * k, l, abs_tol=1e-9):
        log.warning("c*k = %g is not an integer; using l = %d", c * k, l)
    return l


def sweep_rows(cfg: SweepConfig) -> list[dict]:
    rows = []
    q_c = limits.critical_vacancy(cfg.b, cfg.c)
    for k in cfg.k_list:
        l = depth_for(cfg.c, k)
        params = NetworkParams(cfg.b, k, l)
        for q in cfg.q_values():
            est = estimate_Q(params, q, cfg.samples, cfg.seed, workers=cfg.workers)
            try:
                q_limit = limits.limiting_Q(cfg.b, q, cfg.c)
            except ThresholdError:
                q_limit = math.nan
            rep = moments.moment_report(cfg.b, k, l, q)
            rows.append(
                {
                    "b": cfg.b, "k": k, "l": l, "q": q, "samples": cfg.samples, "seed": cfg.seed,
                    "q_hat": est.p_hat, "ci_low": est.ci_low, "ci_high": est.ci_high,
                    "q_limit": q_limit, "ex_x": rep.ex_x, "ex_x2_exact": rep.ex_x2_exact,
                    "ex_x2_asym": rep.ex_x2_asymptotic, "markov_upper": rep.markov_upper,
                    "chebyshev_lower": rep.chebyshev_lower, "q_c": q_c,
                }  # fmt: skip
            )
    return rows


def render_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(fmt_float(row[c]) if isinstance(row[c], float) else row[c] for c in SWEEP_COLUMNS)
    return buf.getvalue()


def cmd_sweep(cfg: SweepConfig) -> int:
    text = render_rows(sweep_rows(cfg), cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_phi(b: int, k: int, l: int, mode: str, q: float | None, fmt: str = "text") -> int:
    if mode == "poly":
        poly = genfun.phi_poly(b, k, l)
        if fmt == "json":
            print(json.dumps({"b": b, "k": k, "l": l, "coeffs": poly.to_json()}))
        else:
            print(poly)
        return EXIT_OK
    if mode not in ("eval", "residue", "asym"):
        raise UsageError(f"unknown phi mode {mode!r}")
    if q is None:
        raise UsageError(f"mode {mode} needs --q")
    exact = genfun.phi_eval(b, k, l, q)
    out = {"b": b, "k": k, "l": l, "q": q, "eval": exact}
    if mode == "residue":
        out["residue"] = asymptotics.residue_phi(b, k, l, q)
        out["rel_dev_residue"] = abs(out["residue"] - exact) / exact
    elif mode == "asym":
        out["asym"] = asymptotics.phi_asymptotic(b, k, l, q)
        out["rel_dev_asym"] = abs(out["asym"] - exact) / exact
    if fmt == "json":
        print(json.dumps(out))
    else:
        for key, val in out.items():
            print(f"{key}: {val:.15g}" if isinstance(val, float) else f"{key}: {val}")
    return EXIT_OK


def cmd_limits(b: int, q: float, c: float, fmt: str = "text") -> int:
    if not 0 < q < 1:
        raise UsageError("q must lie in (0, 1)")
    try:
        report = limits.threshold_report(b, q, c)
    except ThresholdError:
        print(f"threshold: limit not defined at q = q_c = {limits.critical_vacancy(b, c):.15g}")
        return EXIT_REGIME
    data = report.to_dict()
    data["one_minus_xi_sq"] = None if report.xi is None else (1 - report.xi) ** 2
    if fmt == "json":
        print(json.dumps(data))
        return EXIT_OK
    labels = [
        ("q_c", "q_c"), ("xi", "xi"), ("one_minus_xi_sq", "(1-xi)^2"),
        ("q_limit", "Q_inf"), ("eta", "eta"), ("alpha", "alpha"), ("q_star", "q_star"),
    ]  # fmt: skip
    for key, label in labels:
        val = data[key]
        if key == "q_star" and not c > 2:
            continue
        print(f"{label}: {'unavailable' if val is None else f'{val:.15g}'}")
    return EXIT_OK


def cmd_oracle(suite: str, samples: int, seed: int) -> int:
    results = oracles.run_suite(suite, samples=samples, seed=seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} passed")
    return EXIT_ORACLE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", default=None, help="csv|json for sweep, text|json otherwise")
    common.add_argument("--config", help="JSON file whose keys override command-line flags")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="spiderweb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="Monte-Carlo and moment table over (k, q)")
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--k", default="2,4,6")
    p.add_argument("--q", default="0.6:0.9:0.05")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--out")

    p = sub.add_parser("phi", parents=[common], help="phi_l(y) exactly or at y = q")
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--mode", default="poly")
    p.add_argument("--q", type=float)

    p = sub.add_parser("limits", parents=[common], help="threshold and limit quantities")
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--c", type=float, default=2.0)

    p = sub.add_parser("oracle", parents=[common], help="brute-force cross-check suites")
    p.add_argument("suite", choices=[*oracles.SUITES, "all"])
    p.add_argument("--samples", type=int, default=200_000)
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    for key, val in data.items():
        if key == "command":
            continue
        if not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r}")
        setattr(args, key, val)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.command == "sweep":
            q_grid = args.q if isinstance(args.q, (list, tuple)) else parse_q_grid(str(args.q))
            k_list = args.k if isinstance(args.k, list) else parse_k_list(str(args.k))
            cfg = SweepConfig(
                b=args.b, c=args.c, k_list=k_list, q_grid=tuple(q_grid), samples=args.samples,
                seed=args.seed, out=args.out, format=args.format or "csv", workers=args.workers,
            )  # fmt: skip
            return cmd_sweep(cfg)
        if args.command == "phi":
            return cmd_phi(args.b, args.k, args.l, args.mode, args.q, args.format or "text")
        if args.command == "limits":
            return cmd_limits(args.b, args.q, args.c, args.format or "text")
        return cmd_oracle(args.suite, args.samples, args.seed)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RegimeError as exc:
        print(f"regime: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
