"""``chernflow`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 internal tolerance breach.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .analysis import (
    DEFAULT_SEED,
    classify_lambda,
    classify_time,
    threshold_bisect,
)
from .chern import curvature_numeric
from .errors import ChernFlowError, ConvergenceFailure, SymmetryViolation
from .flow import FlowTrace, flow_trace
from .hopf import HopfFamily, LambdaMetric, hopf_curvature, hopf_metric_field, lambda_of_t
from .report import Report, RunConfig, complex_pairs, parse_complex_vector, to_csv
from .verify import run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2, 3

TENSOR_TOL = 1e-5

# Per-subcommand defaults for flags left unset on the command line.
_DEFAULTS = {
    "tensor": {"format": "json"},
    "min-bisec": {"format": "json", "samples": 8, "starts": 32},
    "flow": {"format": "csv", "samples": 8, "starts": 32, "steps": 8, "T0": 0.0},
    "threshold": {"format": "json", "samples": 4, "starts": 16, "T0": 0.0},
    "scan-lambda": {"format": "csv", "samples": 8, "starts": 32, "steps": 11,
                    "lambda_min": -2.0, "lambda_max": 0.99},
    "verify": {"format": "text"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="complex dimension")
    common.add_argument("--T0", type=float, help="initial-metric parameter T0 >= 0")
    common.add_argument("--lambda", dest="lam", type=float, help="metric parameter lambda < 1")
    common.add_argument("--t", type=float, help="flow time (with --T0)")
    common.add_argument("--t-end", dest="t_end", type=float, help="last flow time")
    common.add_argument("--steps", type=int, help="grid size")
    common.add_argument("--z", help='point, e.g. "1, 0.5-2i"')
    common.add_argument("--starts", type=int, help="minimizer starts per point")
    common.add_argument("--samples", type=int, help="random z samples")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"))
    common.add_argument("--quantity", choices=("hsc", "hbc"), default="hsc")
    common.add_argument("--resolution", type=float, default=1e-4)
    common.add_argument("--lambda-min", dest="lambda_min", type=float)
    common.add_argument("--lambda-max", dest="lambda_max", type=float)
    common.add_argument("--allow-near-tmax", dest="allow_near_tmax", action="store_true")

    parser = _Parser(prog="chernflow", description="Chern-Ricci flow on Hopf manifolds.")
    parser.add_argument("--version", action="version", version=f"chernflow {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    helps = {
        "tensor": "closed-form curvature tensor with oracle deviation",
        "min-bisec": "minimum holomorphic bisectional curvature",
        "flow": "curvature-sign trace along the exact flow",
        "threshold": "bisect for the time the curvature minimum turns negative",
        "scan-lambda": "curvature minima over a lambda grid",
        "verify": "run the verification suite",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def config_from_args(args) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None}
    for key, value in _DEFAULTS[args.subcommand].items():
        values.setdefault(key, value)
    return RunConfig.from_dict(values)


def _require(cfg: RunConfig, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise ValueError(f"{cfg.subcommand} needs {', '.join(missing)}")


def _lambda(cfg: RunConfig) -> float:
    if cfg.lam is not None:
        return cfg.lam
    if cfg.t is not None:
        return lambda_of_t(HopfFamily(cfg.n, cfg.T0 or 0.0), cfg.t)
    raise ValueError(f"{cfg.subcommand} needs --lambda or --t")


def _point(cfg: RunConfig):
    if cfg.z is None:
        return None
    z = parse_complex_vector(cfg.z)
    if z.size != cfg.n:
        raise ValueError(f"--z has {z.size} entries, expected n={cfg.n}")
    return z


def cmd_tensor(cfg: RunConfig):
    _require(cfg, "n")
    lam = _lambda(cfg)
    metric = LambdaMetric(cfg.n, lam)
    z = _point(cfg)
    if z is None:
        z = np.eye(cfg.n, dtype=complex)[0]
    closed = hopf_curvature(metric, z).components
    numeric = curvature_numeric(hopf_metric_field(metric), z).components
    deviation = float(np.max(np.abs(numeric - closed)) / max(np.max(np.abs(closed)), 1e-300))
    n = cfg.n
    rows = [
        (k + 1, j + 1, i + 1, q + 1, closed[k, j, i, q])
        for k in range(n) for j in range(n) for i in range(n) for q in range(n)
    ]
    if cfg.format == "csv":
        text = to_csv(["k", "j", "i", "q", "re", "im"],
                      [(k, j, i, q, float(v.real), float(v.imag)) for k, j, i, q, v in rows])
    else:
        results = {
            "lambda": lam,
            "z": complex_pairs(z),
            "components": [
                {"k": k, "j": j, "i": i, "q": q, "value": [float(v.real), float(v.imag)]}
                for k, j, i, q, v in rows
            ],
            "max_deviation": deviation,
        }
        text = Report(cfg, results, {"oracle_relative": TENSOR_TOL}).to_json()
    return text, EXIT_OK if deviation <= TENSOR_TOL else EXIT_TOLERANCE


def cmd_min_bisec(cfg: RunConfig):
    _require(cfg, "n")
    z = _point(cfg)
    if cfg.t is not None:
        _require(cfg, "T0")
        rep = classify_time(HopfFamily(cfg.n, cfg.T0), cfg.t, cfg.samples, cfg.starts, cfg.seed, points=z)
    else:
        rep = classify_lambda(cfg.n, _lambda(cfg), cfg.samples, cfg.starts, cfg.seed, points=z)
    return Report(cfg, rep.to_dict(), {"negative_below": -1e-9}).to_json(), EXIT_OK


def _table(cfg: RunConfig, columns, records) -> str:
    if cfg.format == "csv":
        return to_csv(columns, records)
    rows = [[float(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in records]
    return Report(cfg, {"columns": list(columns), "rows": rows}, {"negative_below": -1e-9}).to_json()


def cmd_flow(cfg: RunConfig):
    _require(cfg, "n")
    fam = HopfFamily(cfg.n, cfg.T0)
    t_end = cfg.t_end if cfg.t_end is not None else 0.9 * fam.t_max
    if cfg.steps < 1:
        raise ValueError("--steps must be >= 1")
    times = np.linspace(0.0, t_end, cfg.steps) if cfg.steps > 1 else [t_end]
    trace = flow_trace(fam, times, cfg.samples, cfg.starts, cfg.seed, cfg.allow_near_tmax)
    return _table(cfg, FlowTrace.COLUMNS, trace.records()), EXIT_OK


def cmd_threshold(cfg: RunConfig):
    _require(cfg, "n")
    res = threshold_bisect(HopfFamily(cfg.n, cfg.T0), cfg.quantity, cfg.resolution,
                           cfg.samples, cfg.starts, cfg.seed)
    text = Report(cfg, res.to_dict(), {"negative_below": -1e-9, "resolution": cfg.resolution}).to_json()
    return text, EXIT_OK


def cmd_scan_lambda(cfg: RunConfig):
    _require(cfg, "n")
    if not cfg.lambda_min < cfg.lambda_max:
        raise ValueError("need --lambda-min < --lambda-max")
    if cfg.steps < 2:
        raise ValueError("--steps must be >= 2")
    records = []
    for lam in np.linspace(cfg.lambda_min, cfg.lambda_max, cfg.steps):
        rep = classify_lambda(cfg.n, float(lam), cfg.samples, cfg.starts, cfg.seed)
        records.append((float(lam), rep.min_hsc, rep.min_value, rep.verdict))
    return _table(cfg, ("lambda", "min_hsc", "min_hbc", "verdict"), records), EXIT_OK


def cmd_verify(cfg: RunConfig):
    lines, passed, total = [f"chernflow {__version__} verify --seed {cfg.seed}"], 0, 0
    for check in run_all(cfg.seed):
        lines.append(check.line())
        passed += check.passed
        total += 1
    lines.append(f"SUMMARY {passed}/{total} passed")
    return "\n".join(lines) + "\n", EXIT_OK if passed == total else EXIT_FAIL


COMMANDS = {
    "tensor": cmd_tensor,
    "min-bisec": cmd_min_bisec,
    "flow": cmd_flow,
    "threshold": cmd_threshold,
    "scan-lambda": cmd_scan_lambda,
    "verify": cmd_verify,
}


def _bind_z(argv):
    # A literal such as "-1+2i,0" would otherwise be read as an option.
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--z":
            out.append("--z=" + next(it, ""))
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_bind_z(argv))
    try:
        cfg = config_from_args(args)
        text, code = COMMANDS[cfg.subcommand](cfg)
    except (ConvergenceFailure, SymmetryViolation) as exc:
        print(f"chernflow: tolerance breach: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ChernFlowError, ValueError) as exc:
        print(f"chernflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
