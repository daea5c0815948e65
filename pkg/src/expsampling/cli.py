"""Command-line runner with reproducible CSV/JSON/Markdown artifacts.

Exit codes: 0 success, 1 at least one hypothesis-met check violated,
2 usage error, 3 hypotheses of the requested experiment not met.
Identical invocations (including --seed) produce byte-identical artifacts;
every output embeds the fully resolved run configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from typing import Optional

from . import analysis
from .errors import (
    ConfigurationError,
    DivergentMomentError,
    ExpSamplingError,
    HypothesisNotMetError,
)
from .kernels import KERNELS, check_kernel_conditions, discrete_absolute_moment_estimate, get_kernel
from .operators import OPERATOR_TAGS, SamplingConfig, evaluate_on_grid
from .spaces import FUNCTIONS, LogGrid, get_function

__all__ = ["RunConfig", "run", "list_registries", "main", "build_parser"]

_OUTDIR_ENV = "EXPSAMPLING_OUTDIR"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved invocation; identical configs yield identical artifacts."""

    command: str
    kernel: Optional[str] = None
    kernels: tuple = ()
    function: Optional[str] = None
    w_list: tuple = ()
    interval: Optional[tuple] = None
    window: Optional[int] = None
    grid: Optional[str] = None
    output: Optional[str] = None
    fmt: str = "json"
    seed: int = 0
    mu: float = 2.0
    r: int = 1
    nu_list: tuple = ()
    op: str = "S"
    c: float = 0.0
    quadrature_points: int = 8
    allow_varying_moments: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(d.items())}


def _parse_grid(spec: str) -> LogGrid:
    try:
        lo, hi, n = spec.split(":")
        return LogGrid(float(lo), float(hi), int(n))
    except (ValueError, ConfigurationError) as exc:
        raise ConfigurationError(f"bad grid spec {spec!r}; expected logmin:logmax:points") from exc


def _parse_floats(text: str) -> tuple:
    return tuple(float(t) for t in text.split(",") if t != "")


def _f17(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _resolve_output(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    base = os.environ.get(_OUTDIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write_atomic(path: str, data: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".expsampling-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(config: RunConfig, text: str) -> None:
    out = _resolve_output(config.output)
    if out is None:
        sys.stdout.write(text)
    else:
        _write_atomic(out, text)
        print(f"wrote {out}")


def _json_payload(config: RunConfig, results) -> str:
    return json.dumps({"config": config.to_dict(), "results": results}, indent=2, sort_keys=True) + "\n"


def _csv_payload(config: RunConfig, header: list, rows: list) -> str:
    lines = [f"# config: {json.dumps(config.to_dict(), sort_keys=True)}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_f17(v) for v in row))
    return "\n".join(lines) + "\n"


def _md_payload(config: RunConfig, body: str) -> str:
    return f"<!-- config: {json.dumps(config.to_dict(), sort_keys=True)} -->\n\n{body}"


def list_registries() -> str:
    """Names and one-line descriptions of the built-in kernels and functions."""
    lines = ["kernels:"]
    for name in sorted(KERNELS):
        lines.append(f"  {name:12s} {KERNELS[name].description}")
    lines.append("functions:")
    for name in sorted(FUNCTIONS):
        lines.append(f"  {name:16s} {FUNCTIONS[name].description}")
    return "\n".join(lines) + "\n"


def _sampling_config(config: RunConfig, w: float) -> SamplingConfig:
    return SamplingConfig(
        w=w,
        interval=config.interval,
        window_half_width=config.window,
        quadrature_points=config.quadrature_points,
    )


def _check_lines(checks) -> None:
    for c in checks:
        if not c.hypothesis_met:
            status = "hypothesis-not-met"
        else:
            status = "ok" if c.holds else "VIOLATED"
        wit = f" witness={c.witness:.6g}" if c.witness is not None else ""
        print(f"[{status}] {c.bound_name}: lhs={c.lhs:.6g} rhs={c.rhs:.6g}{wit}")


def _checks_exit(checks) -> int:
    return 1 if any(c.hypothesis_met and not c.holds for c in checks) else 0


def _emit_checks(config: RunConfig, checks) -> None:
    if config.fmt == "csv":
        header = ["bound_name", "lhs", "rhs", "holds", "slack", "witness", "hypothesis_met"]
        rows = [
            [c.bound_name, c.lhs, c.rhs, c.holds, c.slack, c.witness, c.hypothesis_met]
            for c in checks
        ]
        _emit(config, _csv_payload(config, header, rows))
    elif config.fmt == "md":
        _emit(config, _md_payload(config, analysis.checks_to_markdown(checks)))
    else:
        _emit(config, _json_payload(config, [c.to_dict() for c in checks]))


# --------------------------------------------------------------------------
# command implementations
# --------------------------------------------------------------------------


def _cmd_kernel_check(config: RunConfig) -> int:
    kernel = get_kernel(config.kernel)
    report = check_kernel_conditions(kernel, config.mu, config.r)
    print(
        f"kernel-check {kernel.name}: chi1={'yes' if report.chi1_holds else 'no'} "
        f"chi2={'yes' if report.chi2_holds else 'no'} (eta={report.eta:.6g}) "
        f"chi3={'yes' if report.chi3_holds else 'no'}"
    )
    _emit(config, _json_payload(config, report.to_dict()))
    return 0


def _cmd_moments(config: RunConfig) -> int:
    kernel = get_kernel(config.kernel)
    rows = []
    for nu in config.nu_list or (0.0, 1.0, 2.0):
        try:
            est = discrete_absolute_moment_estimate(kernel, nu)
            rows.append(
                {
                    "nu": nu,
                    "value": est.value,
                    "half_width": est.half_width,
                    "tail_bound": est.tail_bound,
                    "divergent": False,
                }
            )
            print(f"m_{nu:g}({kernel.name}) = {est.value:.12g} (tail bound {est.tail_bound:.3g})")
        except DivergentMomentError as exc:
            rows.append(
                {
                    "nu": nu,
                    "value": None,
                    "divergent": True,
                    "witness_u": exc.witness_u,
                    "witness_k": exc.witness_k,
                }
            )
            print(f"m_{nu:g}({kernel.name}) divergent: witness u={exc.witness_u:.6g} k={exc.witness_k}")
    if config.fmt == "csv":
        header = ["nu", "value", "divergent"]
        _emit(
            config,
            _csv_payload(config, header, [[r["nu"], r.get("value"), r["divergent"]] for r in rows]),
        )
    else:
        _emit(config, _json_payload(config, rows))
    return 0


def _cmd_reconstruct(config: RunConfig) -> int:
    kernel = get_kernel(config.kernel)
    f = get_function(config.function)
    grid = _parse_grid(config.grid)
    w = config.w_list[0] if config.w_list else 8.0
    rows = evaluate_on_grid(config.op, f, kernel, _sampling_config(config, w), grid, c=config.c)
    finite = [r for r in rows if math.isfinite(r.weighted_error)]
    worst = max((r.weighted_error for r in finite), default=math.nan)
    print(
        f"reconstruct {config.op} function={f.name} kernel={kernel.name} w={w:g}: "
        f"{len(rows)} points, max weighted error {worst:.6g}"
    )
    if config.fmt == "json":
        payload = [
            {
                "x": r.x,
                "log_x": r.log_x,
                "value": _jsonable(r.value),
                "error_vs_f": _jsonable(r.error_vs_f),
                "weighted_error": _jsonable(r.weighted_error),
                "note": r.note,
            }
            for r in rows
        ]
        _emit(config, _json_payload(config, payload))
    else:
        header = ["x", "log_x", "value", "error_vs_f", "weighted_error"]
        _emit(
            config,
            _csv_payload(
                config,
                header,
                [[r.x, r.log_x, r.value, r.error_vs_f, r.weighted_error] for r in rows],
            ),
        )
    return 0


def _cmd_converge(config: RunConfig) -> int:
    kernel = get_kernel(config.kernel)
    f = get_function(config.function)
    grid = _parse_grid(config.grid or "-2:2:257")
    base = _sampling_config(config, config.w_list[0] if config.w_list else 4.0)
    table = analysis.convergence_experiment(f, kernel, config.w_list or (4, 8, 16, 32), grid, base)
    for row in table.rows:
        print(
            f"w={row.w:g}: sup error {row.sup_abs_error:.6g}, "
            f"weighted sup error {row.weighted_sup_error:.6g}"
        )
    if table.fitted_order is not None:
        print(f"fitted order: {table.fitted_order:.3f}")
    if config.fmt == "csv":
        header = ["w", "sup_abs_error", "weighted_sup_error", "grid", "fitted_order"]
        rows = [
            [r.w, r.sup_abs_error, r.weighted_sup_error, r.grid, table.fitted_order]
            for r in table.rows
        ]
        _emit(config, _csv_payload(config, header, rows))
    else:
        _emit(config, _json_payload(config, table.to_dict()))
    return 0


def _cmd_rate(config: RunConfig) -> int:
    kernel = get_kernel(config.kernel)
    f = get_function(config.function)
    grid = _parse_grid(config.grid or "-2:2:257")
    checks = analysis.verify_quantitative_rate(f, kernel, config.w_list or (8, 16, 32), grid)
    _check_lines(checks)
    _emit_checks(config, checks)
    return _checks_exit(checks)


def _cmd_voronovskaja(config: RunConfig) -> int:
    kernel = get_kernel(config.kernel)
    f = get_function(config.function)
    grid = _parse_grid(config.grid or "-2:2:257")
    checks = analysis.voronovskaja_check(
        f,
        kernel,
        config.r,
        config.w_list or (8, 16, 32),
        grid,
        require_constant_moments=not config.allow_varying_moments,
    )
    _check_lines(checks)
    _emit_checks(config, checks)
    return _checks_exit(checks)


def _cmd_suite(config: RunConfig) -> int:
    names = config.kernels or ("bspline3", "gauss1")
    result = analysis.run_suite(names, seed=config.seed)
    _check_lines(result.checks)
    for table in result.tables:
        order = f"{table.fitted_order:.3f}" if table.fitted_order is not None else "n/a"
        print(f"convergence {table.function_name}/{table.kernel_name}: fitted order {order}")
    if config.fmt == "md":
        _emit(config, _md_payload(config, analysis.checks_to_markdown(result.checks)))
    elif config.fmt == "csv":
        _emit_checks(config, result.checks)
    else:
        _emit(config, _json_payload(config, result.to_dict()))
    return 1 if result.violations else 0


_COMMANDS = {
    "kernel-check": _cmd_kernel_check,
    "moments": _cmd_moments,
    "reconstruct": _cmd_reconstruct,
    "converge": _cmd_converge,
    "rate": _cmd_rate,
    "voronovskaja": _cmd_voronovskaja,
    "suite": _cmd_suite,
}


def run(config: RunConfig) -> int:
    """Dispatch one resolved command; returns the process exit code."""
    if config.command == "list":
        sys.stdout.write(list_registries())
        return 0
    handler = _COMMANDS.get(config.command)
    if handler is None:
        print(f"unknown command {config.command!r}", file=sys.stderr)
        return 2
    try:
        return handler(config)
    except HypothesisNotMetError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, ValueError, ExpSamplingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expsampling",
        description="Exponential sampling operators: kernel checks, reconstructions and verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kernel=True, function=False, w=False, grid=False):
        if kernel:
            p.add_argument("--kernel", required=True, help="kernel registry name")
        if function:
            p.add_argument("--function", required=True, help="function registry name")
        if w:
            p.add_argument("--w", default=None, help="comma-separated sampling rates")
        if grid:
            p.add_argument("--grid", default=None, help="log-grid spec logmin:logmax:points")
        p.add_argument("--interval", default=None, help="compact domain a,b (interval mode)")
        p.add_argument("--window", type=int, default=None, help="truncation half-width (window mode)")
        p.add_argument("--output", default=None, help="artifact path (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json", "md"), default="json")
        p.add_argument("--seed", type=int, default=0)

    sub.add_parser("list", help="list kernel and function registries")

    p = sub.add_parser("kernel-check", help="run the kernel condition checks")
    common(p)
    p.add_argument("--mu", type=float, default=2.0, help="absolute-moment order for chi1")
    p.add_argument("--r", type=int, default=1, help="highest algebraic-moment order for chi3")

    p = sub.add_parser("moments", help="scan discrete absolute moments")
    common(p)
    p.add_argument("--nu", default="0,1,2", help="comma-separated moment orders")

    p = sub.add_parser("reconstruct", help="evaluate one operator over a grid")
    common(p, function=True, w=True, grid=True)
    p.add_argument("--op", choices=OPERATOR_TAGS, default="S")
    p.add_argument("--c", type=float, default=0.0, help="damping exponent for the classical series")
    p.add_argument("--quad-points", dest="quadrature_points", type=int, default=8)

    p = sub.add_parser("converge", help="error decay of the max-product operator")
    common(p, function=True, w=True, grid=True)

    p = sub.add_parser("rate", help="modulus-of-continuity rate bound")
    common(p, function=True, w=True, grid=True)

    p = sub.add_parser("voronovskaja", help="asymptotic expansion check")
    common(p, function=True, w=True, grid=True)
    p.add_argument("--r", type=int, default=1, help="expansion order")
    p.add_argument(
        "--allow-varying-moments",
        action="store_true",
        help="run even when the kernel's algebraic moments vary across the lattice",
    )

    p = sub.add_parser("suite", help="run the verification suite")
    p.add_argument("--kernels", default="bspline3,gauss1", help="comma-separated kernel names")
    p.add_argument("--output", default=None)
    p.add_argument("--format", dest="fmt", choices=("csv", "json", "md"), default="json")
    p.add_argument("--seed", type=int, default=0)

    return parser


def _to_runconfig(args: argparse.Namespace) -> RunConfig:
    interval = None
    if getattr(args, "interval", None):
        parts = _parse_floats(args.interval)
        if len(parts) != 2:
            raise ConfigurationError(f"interval must be 'a,b', got {args.interval!r}")
        interval = parts
    return RunConfig(
        command=args.command,
        kernel=getattr(args, "kernel", None),
        kernels=tuple(t for t in getattr(args, "kernels", "").split(",") if t),
        function=getattr(args, "function", None),
        w_list=_parse_floats(args.w) if getattr(args, "w", None) else (),
        interval=interval,
        window=getattr(args, "window", None),
        grid=getattr(args, "grid", None),
        output=getattr(args, "output", None),
        fmt=getattr(args, "fmt", "json"),
        seed=getattr(args, "seed", 0),
        mu=getattr(args, "mu", 2.0),
        r=getattr(args, "r", 1),
        nu_list=_parse_floats(args.nu) if getattr(args, "nu", None) else (),
        op=getattr(args, "op", "S"),
        c=getattr(args, "c", 0.0),
        quadrature_points=getattr(args, "quadrature_points", 8),
        allow_varying_moments=getattr(args, "allow_varying_moments", False),
    )


_VALUE_FLAGS = ("--grid", "--interval", "--w", "--nu", "--c")


def _merge_value_flags(argv):
    """Join value-taking flags with their argument so grids like -1:1:101 parse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_merge_value_flags(sys.argv[1:] if argv is None else list(argv)))
    try:
        config = _to_runconfig(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
