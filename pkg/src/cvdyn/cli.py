"""Command-line front end: run, sweep, coeffs and compare.

Every data file is deterministic: floats are written with 12 significant
digits, lines end in ``\\n`` and nothing time-dependent is recorded.
"""

import argparse
import copy
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import jsonschema
import numpy as np

from .dynamics import RunConfig, compare, detect_events, run
from .errors import ConfigurationError, ConvergenceError, CvdynError
from .propagator import TimeGrid
from .reservoir import (
    CouplingParams,
    QuadratureConfig,
    SpectralKind,
    SpectralModel,
    coeff_analytic,
    coeff_quadrature,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3

RUN_HEADER = ["t", "ef_exact", "ef_secular", "nu_min_exact", "nu_min_secular", "gamma_big", "delta_gamma"]
SWEEP_HEADER = [
    "value",
    "classification_exact",
    "classification_secular",
    "first_death_exact",
    "first_death_secular",
    "max_ef_diff",
]
COEFF_HEADER = [
    "t", "delta", "pi", "gamma",
    "delta_q", "pi_q", "gamma_q", "r_q",
    "rel_dev_delta", "rel_dev_pi", "rel_dev_gamma",
]  # fmt: skip

_ZT = {"kind": "zero_t", "lambda": 0.1, "beta": None}
_HT = {"kind": "high_t", "lambda": 0.1, "beta": 200.0}  # beta = 2 k_B T / hbar with k_B T / hbar = 100


def _preset(model, omega0, r, t_max, n_steps):
    return {
        "model": dict(model),
        "alpha": 0.1,
        "omega0": omega0,
        "r": r,
        "t_max": t_max,
        "n_steps": n_steps,
        "eps_death": 1e-9,
        "source": "analytic",
    }


PRESETS = {
    "fig1a": _preset(_ZT, 5.0, 2.0, 50.0, 10000),
    "fig1b": _preset(_ZT, 5.0, 0.2, 50.0, 10000),
    "fig2a": _preset(_HT, 10.0, 2.0, 5.0, 10000),
    "fig2b": _preset(_HT, 10.0, 0.01, 5.0, 10000),
    "fig3a": _preset(_HT, 0.15, 1.0, 20.0, 4000),
    "fig3b": _preset(_HT, 0.15, 0.08, 20.0, 4000),
    "fig4L": _preset(_ZT, 10.0, 0.6, 50.0, 20000),
    "fig4R": _preset(_HT, 10.0, 0.6, 5.0, 10000),
}

_NUM = {"type": "number"}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": [k.value for k in SpectralKind]},
                "lambda": _NUM,
                "beta": {"type": ["number", "null"]},
            },
        },
        "alpha": _NUM,
        "omega0": _NUM,
        "r": _NUM,
        "t_max": _NUM,
        "n_steps": {"type": "integer"},
        "eps_death": _NUM,
        "source": {"enum": ["analytic", "quadrature"]},
    },
}

# flat names accepted by `sweep --axis`
SWEEP_AXES = {
    "alpha": ("alpha",),
    "omega0": ("omega0",),
    "r": ("r",),
    "t_max": ("t_max",),
    "n_steps": ("n_steps",),
    "eps_death": ("eps_death",),
    "lambda": ("model", "lambda"),
    "beta": ("model", "beta"),
}


# ---------------------------------------------------------------------------
# configuration


def merge_config(base, override):
    out = copy.deepcopy(base)
    for key, val in override.items():
        if key == "model" and isinstance(val, dict):
            out.setdefault("model", {}).update(val)
        else:
            out[key] = val
    return out


def validate_document(doc):
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigurationError(f"config {where}: {exc.message}") from None


def to_run_config(doc):
    """Build a validated :class:`RunConfig` from a complete config document."""
    validate_document(doc)
    missing = [k for k in CONFIG_SCHEMA["properties"] if k not in doc]
    missing += [f"model.{k}" for k in ("kind", "lambda") if k not in doc.get("model", {})]
    if missing:
        raise ConfigurationError(f"config is missing {', '.join(missing)}")
    m = doc["model"]
    try:
        model = SpectralModel(SpectralKind(m["kind"]), float(m["lambda"]), m.get("beta"))
        params = CouplingParams(float(doc["alpha"]), float(doc["omega0"]))
        grid = TimeGrid(float(doc["t_max"]), int(doc["n_steps"]))
        return RunConfig(model, params, float(doc["r"]), grid, float(doc["eps_death"]), doc["source"])
    except ConfigurationError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigurationError(str(exc)) from None


def effective_document(args):
    doc = copy.deepcopy(PRESETS[args.preset]) if args.preset else {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        validate_document(loaded)
        doc = merge_config(doc, loaded)
    if not doc:
        raise ConfigurationError("either --preset or --config is required")
    if args.source is not None:
        doc["source"] = args.source
    if args.eps_death is not None:
        doc["eps_death"] = args.eps_death
    if doc.get("model", {}).get("kind") == "zero_t":
        doc["model"]["beta"] = None
    return doc


# ---------------------------------------------------------------------------
# formatting


def fmt(x):
    if x is None:
        return ""
    x = float(x)
    if x == 0.0:
        return "0"
    return f"{x:.12g}"


def _round(x):
    return None if x is None else float(fmt(x))


def _csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(c if isinstance(c, str) else fmt(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _events_doc(traj, eps):
    exact, secular = detect_events(traj, eps)

    def one(rep):
        d = rep.as_dict()
        d["death_times"] = [_round(t) for t in d["death_times"]]
        d["revival_times"] = [_round(t) for t in d["revival_times"]]
        d["first_death"] = _round(rep.first_death)
        d["horizon"] = _round(d["horizon"])
        return d

    return {"exact": one(exact), "secular": one(secular), "eps_death": eps, "warnings": list(traj.warnings)}


# ---------------------------------------------------------------------------
# subcommands


def trajectory_csv(traj):
    k = traj.kernels
    cols = [traj.times, traj.ef_exact, traj.ef_secular, traj.nu_min_exact, traj.nu_min_secular, k.Gamma, k.DeltaGamma]
    return _csv(RUN_HEADER, zip(*cols))


def cmd_run(doc, out):
    cfg = to_run_config(doc)
    traj = run(cfg)
    _emit(trajectory_csv(traj), out)
    events = _json(_events_doc(traj, cfg.eps_death))
    if out is None or out == "-":
        sys.stderr.write(events)
    else:
        _emit(events, out + ".events.json")


def _sweep_point(doc):
    cfg = to_run_config(doc)
    traj = run(cfg)
    exact, secular = detect_events(traj, cfg.eps_death)
    cmp = compare(traj, cfg.eps_death)
    return [
        exact.classification.value,
        secular.classification.value,
        exact.first_death,
        secular.first_death,
        cmp.max_abs_diff,
    ]


def parse_values(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"--values must be comma-separated numbers, got {text!r}") from None
    if not vals or len(vals) > 10_000:
        raise ConfigurationError("--values needs between 1 and 10000 entries")
    if not all(math.isfinite(v) for v in vals):
        raise ConfigurationError("--values must be finite")
    return vals


def cmd_sweep(doc, out, axis, values, jobs=1):
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"unknown sweep axis {axis!r}; choose from {sorted(SWEEP_AXES)}")
    path = SWEEP_AXES[axis]
    docs = []
    for v in values:
        d = copy.deepcopy(doc)
        target = d
        for key in path[:-1]:
            target = target[key]
        target[path[-1]] = int(v) if axis == "n_steps" else v
        to_run_config(d)  # validate every point before computing any
        docs.append(d)
    if jobs > 1 and len(docs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, docs))
    else:
        results = [_sweep_point(d) for d in docs]
    _emit(_csv(SWEEP_HEADER, ([v] + res for v, res in zip(values, results))), out)


def _rel_dev(a, q):
    if a == q:
        return 0.0
    return abs(a - q) / abs(q) if q != 0 else math.inf


def cmd_coeffs(doc, out, samples=51):
    cfg = to_run_config(doc)
    if samples < 2:
        raise ConfigurationError("--samples must be >= 2")
    times = np.linspace(0.0, cfg.grid.t_max, samples)
    ana = coeff_analytic(cfg.model, cfg.params, times)
    qcfg = QuadratureConfig()
    rows = []
    for i, t in enumerate(times):
        q = coeff_quadrature(cfg.model, cfg.params, float(t), qcfg)
        a = (ana.delta[i], ana.pi[i], ana.gamma[i])
        rows.append(
            [t, *a, q.delta, q.pi, q.gamma, q.rshift]
            + [_rel_dev(x, y) for x, y in zip(a, (q.delta, q.pi, q.gamma))]
        )
    _emit(_csv(COEFF_HEADER, rows), out)


def cmd_compare(doc, out):
    cfg = to_run_config(doc)
    cmp = compare(run(cfg), cfg.eps_death)
    _emit(_json({k: _round(v) for k, v in cmp.as_dict().items()}), out)


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvdyn",
        description="Two-mode Gaussian entanglement in independent Lorentzian reservoirs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--config", help="JSON config document; keys override the preset")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    common.add_argument("--source", choices=["analytic", "quadrature"])
    common.add_argument("--eps-death", type=float)

    sub.add_parser("run", parents=[common], help="exact and secular EoF trajectory as CSV")
    sw = sub.add_parser("sweep", parents=[common], help="classify events along one parameter axis")
    sw.add_argument("--axis", required=True, help=f"one of {', '.join(sorted(SWEEP_AXES))}")
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--jobs", type=int, default=1)
    co = sub.add_parser("coeffs", parents=[common], help="closed-form vs quadrature coefficients")
    co.add_argument("--samples", type=int, default=51)
    sub.add_parser("compare", parents=[common], help="exact vs secular divergence metrics as JSON")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        doc = effective_document(args)
        if args.dump_config:
            to_run_config(doc)
            _emit(_json(doc), args.out)
            return EXIT_OK
        if args.command == "run":
            cmd_run(doc, args.out)
        elif args.command == "sweep":
            cmd_sweep(doc, args.out, args.axis, parse_values(args.values), max(1, args.jobs))
        elif args.command == "coeffs":
            cmd_coeffs(doc, args.out, args.samples)
        else:
            cmd_compare(doc, args.out)
    except ConvergenceError as exc:
        print(f"cvdyn: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ConfigurationError, CvdynError, ValueError) as exc:
        print(f"cvdyn: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
