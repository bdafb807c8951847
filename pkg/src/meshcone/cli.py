"""Command-line interface.

Subcommands: ``refine``, ``eval``, ``smooth``, ``gen-deformed``, ``bench``.

Option values resolve with precedence: command-line flag > config file
(``--config``: flat ``key=value`` lines, ``#`` comments, keys are the flag
names without leading dashes) > the ``MESHCONE_SEED`` environment variable
(seed options only) > built-in default.

Exit codes: 0 success (for ``refine``: the solver reached optimality);
1 any error, including usage errors; 2 ``refine`` stopped at the
iteration cap.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assemble import RefineConfig, refine
from .baselines import DeformConfig, SmoothConfig, gen_deformed, laplacian_smooth
from .errors import MeshConeError
from .mesh import load_obj, save_obj
from .metrics import ALL_METRICS, compute_report
from .solver import SolverSettings, write_diagnostics


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_bool(raw):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


@dataclass(frozen=True)
class _Opt:
    flag: str
    kind: object  # float/int/str, or bool for switches
    default: object = None
    required: bool = False
    help: str = ""

    @property
    def key(self):
        return self.flag.lstrip("-")

    @property
    def dest(self):
        return self.key.replace("-", "_")


_SEED_HELP = "random seed (falls back to MESHCONE_SEED, then 0)"

OPTIONS = {
    "refine": [
        _Opt("--source", str, required=True, help="deformed input mesh (OBJ)"),
        _Opt("--target", str, required=True, help="target mesh (OBJ)"),
        _Opt("--out", str, required=True, help="output path for the refined mesh"),
        _Opt("--lambda", float, 0.01, help="anchor weight"),
        _Opt("--delta", float, 0.5, help="edge-length bound"),
        _Opt("--eps", float, 1e-5, help="solver tolerance (absolute and relative)"),
        _Opt("--max-iters", int, 1000, help="solver iteration cap"),
        _Opt("--samples", int, 10000, help="target surface samples for the centroid"),
        _Opt("--seed", int, 0, help=_SEED_HELP),
        _Opt("--diag", str, help="write per-iteration diagnostics CSV here"),
        _Opt("--no-normalize", bool, False, help="skip unit-sphere normalization"),
    ],
    "eval": [
        _Opt("--pred", str, required=True, help="predicted mesh (OBJ)"),
        _Opt("--gt", str, required=True, help="ground-truth mesh (OBJ)"),
        _Opt("--samples", int, 5000, help="surface samples per mesh"),
        _Opt("--seed", int, 0, help=_SEED_HELP),
        _Opt("--metrics", str, ",".join(ALL_METRICS), help="comma-separated metric names"),
        _Opt("--json", str, help="also write the report JSON to this path"),
    ],
    "smooth": [
        _Opt("--in", str, required=True, help="input mesh (OBJ)"),
        _Opt("--out", str, required=True, help="output path"),
        _Opt("--step", float, 0.5, help="umbrella step in (0, 1]"),
        _Opt("--iters", int, 10, help="smoothing iterations"),
    ],
    "gen-deformed": [
        _Opt("--target", str, required=True, help="target mesh (OBJ)"),
        _Opt("--out", str, required=True, help="output path for the deformed sphere"),
        _Opt("--iters", int, 15, help="attract/smooth iterations"),
        _Opt("--seed", int, 0, help=_SEED_HELP),
        _Opt("--subdivisions", int, 4, help="icosphere subdivision level"),
    ],
    "bench": [
        _Opt("--pairs", str, required=True,
             help="directory of <name>_deformed.obj / <name>_target.obj pairs"),
        _Opt("--sweep", str, help="sweep one axis, e.g. lambda=0.001,0.01,0.1"),
        _Opt("--json", str, help="also write rows + aggregate as JSON here"),
        _Opt("--lambda", float, 0.01, help="anchor weight (fixed unless swept)"),
        _Opt("--delta", float, 0.5, help="edge-length bound (fixed unless swept)"),
        _Opt("--samples", int, 5000, help="surface samples per metric evaluation"),
        _Opt("--seed", int, 0, help=_SEED_HELP),
    ],
}

_COMMAND_HELP = {
    "refine": "correct a deformed mesh toward a target",
    "eval": "compute metrics between two meshes",
    "smooth": "Laplacian umbrella smoothing baseline",
    "gen-deformed": "make a synthetic deformed input from a target",
    "bench": "run refine+eval over a directory of mesh pairs",
}


def _build_parser():
    parser = _Parser(prog="meshcone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for command, options in OPTIONS.items():
        p = sub.add_parser(command, help=_COMMAND_HELP[command])
        for opt in options:
            if opt.kind is bool:
                p.add_argument(opt.flag, dest=opt.dest, action="store_const",
                               const=True, default=None, help=opt.help)
            else:
                p.add_argument(opt.flag, dest=opt.dest, type=opt.kind,
                               default=None, help=opt.help)
        p.add_argument("--config", type=str, default=None,
                       help="flat key=value config file")
    return parser


def _read_config(path):
    table = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        table[key.strip()] = value.strip()
    return table


def _resolve(command, args, config_table):
    options = OPTIONS[command]
    known = {opt.key for opt in options}
    for key in config_table:
        if key not in known:
            raise ValueError(f"unknown config key {key!r} for {command}")
    values = {}
    for opt in options:
        val = getattr(args, opt.dest)
        if val is None and opt.key in config_table:
            raw = config_table[opt.key]
            try:
                val = _parse_bool(raw) if opt.kind is bool else opt.kind(raw)
            except ValueError:
                raise ValueError(
                    f"config key {opt.key!r}: cannot parse {raw!r} as {opt.kind.__name__}"
                ) from None
        if val is None and opt.key == "seed":
            env = os.environ.get("MESHCONE_SEED")
            if env is not None:
                try:
                    val = int(env)
                except ValueError:
                    raise ValueError(
                        f"MESHCONE_SEED must be an integer, got {env!r}"
                    ) from None
        if val is None:
            if opt.required:
                raise _UsageError(f"{command}: missing required option {opt.flag}")
            val = opt.default
        values[opt.key] = val
    return values


# ------------------------------------------------------------- commands


def _solver_settings(values):
    return SolverSettings(
        eps_abs=values["eps"], eps_rel=values["eps"], max_iters=values["max-iters"]
    )


def cmd_refine(values):
    deformed = load_obj(values["source"])
    target = load_obj(values["target"])
    config = RefineConfig(
        lam=values["lambda"],
        delta=values["delta"],
        sample_count=values["samples"],
        seed=values["seed"],
        normalize=not values["no-normalize"],
        solver=_solver_settings(values),
    )
    outcome = refine(deformed, target, config)
    save_obj(outcome.refined, values["out"])
    result = outcome.solver_result
    if values["diag"]:
        write_diagnostics(result, values["diag"])
    print(json.dumps({
        "status": result.status,
        "iterations": result.iterations,
        "primal_res": result.primal_res,
        "dual_res": result.dual_res,
        "gap": result.gap,
        "objective": result.objective,
        "solve_time_s": result.solve_time,
    }))
    return {"optimal": 0, "max_iters": 2}.get(result.status, 1)


def cmd_eval(values):
    pred = load_obj(values["pred"])
    gt = load_obj(values["gt"])
    metrics = tuple(m.strip() for m in values["metrics"].split(",") if m.strip())
    report = compute_report(
        pred, gt, sample_count=values["samples"], seed=values["seed"], metrics=metrics
    )
    text = report.to_json()
    print(text)
    if values["json"]:
        Path(values["json"]).write_text(text + "\n")
    return 0


def cmd_smooth(values):
    mesh = load_obj(values["in"])
    config = SmoothConfig(step=values["step"], iterations=values["iters"])
    save_obj(laplacian_smooth(mesh, config), values["out"])
    return 0


def cmd_gen_deformed(values):
    target = load_obj(values["target"])
    config = DeformConfig(
        subdivisions=values["subdivisions"],
        iterations=values["iters"],
        seed=values["seed"],
    )
    save_obj(gen_deformed(target, config), values["out"])
    return 0


_BENCH_COLUMNS = (
    "mesh", "lambda", "delta", "iterations", "time_s",
    "cd", "emd", "hd", "nc", "ce", "success",
)
_BENCH_METRICS = ("cd", "emd", "hd", "nc", "ce")


def _parse_sweep(raw):
    if raw is None:
        return None, None
    if "=" not in raw:
        raise ValueError(f"--sweep expects axis=v1,v2,... got {raw!r}")
    axis, _, tail = raw.partition("=")
    axis = axis.strip()
    if axis not in ("lambda", "delta"):
        raise ValueError(f"--sweep axis must be lambda or delta, got {axis!r}")
    try:
        sweep_values = [float(tok) for tok in tail.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"bad sweep values in {raw!r}") from None
    if not sweep_values:
        raise ValueError(f"--sweep needs at least one value, got {raw!r}")
    return axis, sweep_values


def _fmt_cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.6g}"


def cmd_bench(values):
    pairs_dir = Path(values["pairs"])
    if not pairs_dir.is_dir():
        raise ValueError(f"--pairs {pairs_dir} is not a directory")
    pairs = []
    for deformed_path in sorted(pairs_dir.glob("*_deformed.obj")):
        name = deformed_path.name[: -len("_deformed.obj")]
        target_path = pairs_dir / f"{name}_target.obj"
        if target_path.exists():
            pairs.append((name, deformed_path, target_path))
    if not pairs:
        raise ValueError(
            f"no mesh pairs (<name>_deformed.obj + <name>_target.obj) in {pairs_dir}"
        )
    axis, sweep_values = _parse_sweep(values["sweep"])
    combos = [(values["lambda"], values["delta"])]
    if axis == "lambda":
        combos = [(v, values["delta"]) for v in sweep_values]
    elif axis == "delta":
        combos = [(values["lambda"], v) for v in sweep_values]

    rows = []
    for name, deformed_path, target_path in pairs:
        deformed = load_obj(deformed_path)
        target = load_obj(target_path)
        for lam, delta in combos:
            config = RefineConfig(lam=lam, delta=delta, seed=values["seed"])
            outcome = refine(deformed, target, config)
            result = outcome.solver_result
            row = {
                "mesh": name,
                "lambda": lam,
                "delta": delta,
                "iterations": result.iterations,
                "time_s": result.solve_time,
                "success": 1 if result.status == "optimal" else 0,
            }
            try:
                report = compute_report(
                    outcome.refined,
                    target,
                    sample_count=values["samples"],
                    seed=values["seed"],
                    metrics=_BENCH_METRICS,
                )
                for key in _BENCH_METRICS:
                    row[key] = getattr(report, key)
            except (MeshConeError, ValueError):
                for key in _BENCH_METRICS:
                    row[key] = math.nan
            rows.append(row)

    aggregate = {"mesh": "mean"}
    for col in _BENCH_COLUMNS[1:]:
        aggregate[col] = float(np.nanmean([row[col] for row in rows]))
    print(",".join(_BENCH_COLUMNS))
    for row in rows + [aggregate]:
        print(",".join(_fmt_cell(row[col]) for col in _BENCH_COLUMNS))
    if values["json"]:
        Path(values["json"]).write_text(
            json.dumps({"rows": rows, "aggregate": aggregate}, indent=2) + "\n"
        )
    return 0


_HANDLERS = {
    "refine": cmd_refine,
    "eval": cmd_eval,
    "smooth": cmd_smooth,
    "gen-deformed": cmd_gen_deformed,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        config_table = _read_config(args.config) if args.config else {}
        values = _resolve(args.command, args, config_table)
        return _HANDLERS[args.command](values)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (MeshConeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
