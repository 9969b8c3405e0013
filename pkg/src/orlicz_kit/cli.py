"""Command-line front end: JSON in, JSON (or CSV for probe sweeps) out.

Exit codes: 0 success, 1 malformed JSON input, 2 domain or precondition
error, 3 failed witness search, 4 acceptance criteria failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

import numpy as np

from . import acceptance
from .conjugation import young_conjugate
from .exceptions import OrliczError, SearchFailed
from .functions import DEFAULT_TOL, Regime, ToleranceConfig, evaluate, function_from_spec, inverse
from .geometry import (
    DEFAULT_CAP,
    PROPERTIES,
    InstanceSpec,
    build_linfty_witness,
    build_lower_estimate_witness,
    build_type_failure_witness,
    probe_concavity,
    probe_convexity,
    probe_cotype,
    probe_lower_estimate,
    probe_type,
    probe_upper_estimate,
    rademacher_average,
)
from .growth import delta2_check, delta_q_best_constant, delta_star_p_best_constant, estimate_indices
from .modular import luxemburg_norm, modular, vector_from_spec
from .regularization import regularize_concave_power, regularize_convex_power

SCHEMA = "orlicz-kit/1"


class MalformedInput(Exception):
    pass


def _load_json(text: str) -> Any:
    """Parse a JSON flag value; ``@path`` reads a file and ``-`` reads stdin."""
    if text == "-":
        text = sys.stdin.read()
    elif text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(str(exc)) from None


def _clean(obj):
    """Make report objects JSON-safe; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    return obj


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(grid_points=args.grid_points) if args.grid_points else DEFAULT_TOL


def _fn(args):
    if args.fn is None:
        raise OrliczError("--fn is required for this command")
    return function_from_spec(_load_json(args.fn))


def _family(args):
    spec = _load_json(args.vec)
    if isinstance(spec, dict) and "vectors" in spec:
        spec = [{"space": spec["space"], "coeffs": c} for c in spec["vectors"]]
    if isinstance(spec, dict):
        spec = [spec]
    return [vector_from_spec(s) for s in spec]


def _need(value, flag):
    if value is None:
        raise OrliczError(f"{flag} is required for this command")
    return value


# --------------------------------------------------------------------------
# commands


def cmd_eval(args):
    f = _fn(args)
    u = _load_json(_need(args.u, "--u"))
    return {"u": u, "value": evaluate(f, u)}


def cmd_inverse(args):
    f = _fn(args)
    y = _load_json(_need(args.y, "--y"))
    return {"y": y, "u": inverse(f, y)}


def cmd_indices(args):
    return estimate_indices(_fn(args), Regime.parse(args.regime), _tol(args)).as_dict()


def cmd_check_delta(args):
    f, regime, tol = _fn(args), Regime.parse(args.regime), _tol(args)
    if args.condition == "delta2":
        return delta2_check(f, regime, tol).as_dict()
    e = _need(args.exponent, "--exponent")
    sweep = delta_q_best_constant if args.condition == "delta_q" else delta_star_p_best_constant
    return sweep(f, e, regime, tol).as_dict()


def cmd_regularize(args):
    f, regime, tol = _fn(args), Regime.parse(args.regime), _tol(args)
    e = _need(args.exponent, "--exponent")
    run = regularize_concave_power if args.mode == "concave" else regularize_convex_power
    res = run(f, e, regime, tol)
    return {"psi": res.psi.to_spec(), "report": res.report.as_dict()}


def cmd_conjugate(args):
    c = young_conjugate(_fn(args), _tol(args))
    out = c.to_spec()
    out["kind"] = "table"
    return out


def cmd_norm(args):
    f = _fn(args)
    x = _family(args)
    if len(x) != 1:
        raise OrliczError("norm takes a single vector")
    return {"norm": luxemburg_norm(f, x[0]), "modular": modular(f, x[0])}


def cmd_rademacher(args):
    return rademacher_average(_fn(args), _family(args), args.cap).as_dict()


_PROBES = {
    "type": probe_type,
    "cotype": probe_cotype,
    "upper_estimate": probe_upper_estimate,
    "lower_estimate": probe_lower_estimate,
    "convexity": probe_convexity,
    "concavity": probe_concavity,
}


def cmd_probe(args):
    f = _fn(args)
    e = _need(args.exponent, "--exponent")
    spec = InstanceSpec(count=args.count, seed=args.seed)
    if args.property in ("upper_estimate", "lower_estimate"):
        spec = spec.disjoint_only()
    families = [_family(args)] if args.vec else None
    kwargs = {}
    if args.property in ("type", "cotype"):
        kwargs = {"moment": args.moment, "cap": args.cap}
    elif args.property in ("upper_estimate", "lower_estimate"):
        kwargs = {"cap": args.cap}
    res = _PROBES[args.property](f, e, spec if args.count > 0 else None, families, **kwargs)
    return res


def cmd_counterexample(args):
    f, tol = _fn(args), _tol(args)
    if args.kind == "linfty":
        regime = Regime.parse(args.regime) if args.regime != "all" else Regime.large(1.0)
        w = build_linfty_witness(f, args.m, regime, tol=tol)
    elif args.kind == "lower-estimate":
        w = build_lower_estimate_witness(f, _need(args.exponent, "--exponent"), args.n, Regime.parse(args.regime), tol)
    else:
        w = build_type_failure_witness(
            f, _need(args.exponent, "--exponent"), _need(args.s, "--s"), args.n, regime=Regime.parse(args.regime), tol=tol
        )
    return w.as_dict()


def cmd_suite(args):
    results = acceptance.run_all(echo=lambda line: print(line, file=sys.stderr))
    return {"passed": all(r.passed for r in results), "criteria": [r.as_dict() for r in results]}


COMMANDS = {
    "eval": cmd_eval,
    "inverse": cmd_inverse,
    "indices": cmd_indices,
    "check-delta": cmd_check_delta,
    "regularize": cmd_regularize,
    "conjugate": cmd_conjugate,
    "norm": cmd_norm,
    "rademacher": cmd_rademacher,
    "probe": cmd_probe,
    "counterexample": cmd_counterexample,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fn", help="function spec as JSON, @file or - for stdin")
    common.add_argument("--vec", help="vector spec, or list of vector specs, as JSON")
    common.add_argument("--regime", default="all", help="all | large:V | small:V")
    common.add_argument("--exponent", type=float)
    common.add_argument("--grid-points", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="sign-enumeration cap")
    common.add_argument("--out", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="orlicz-kit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("eval", parents=[common], help="evaluate phi(u)")
    p.add_argument("--u", help="number or JSON list")
    p = sub.add_parser("inverse", parents=[common], help="evaluate the inverse function")
    p.add_argument("--y", help="number or JSON list")
    sub.add_parser("indices", parents=[common], help="chord and dilation index estimates")
    p = sub.add_parser("check-delta", parents=[common], help="growth-condition constants")
    p.add_argument("--condition", choices=("delta2", "delta_q", "delta_star_p"), default="delta2")
    p = sub.add_parser("regularize", parents=[common], help="envelope-integral regularization")
    p.add_argument("--mode", choices=("concave", "convex"), required=True)
    sub.add_parser("conjugate", parents=[common], help="Young conjugate table")
    sub.add_parser("norm", parents=[common], help="Luxemburg norm and modular of a vector")
    sub.add_parser("rademacher", parents=[common], help="exact sign average of a family")
    p = sub.add_parser("probe", parents=[common], help="type/cotype/estimate/convexity probes")
    p.add_argument("--property", choices=[x for x in PROPERTIES], required=True)
    p.add_argument("--count", type=int, default=200, help="random families (0: only --vec)")
    p.add_argument("--moment", type=int, choices=(1, 2), default=1)
    p = sub.add_parser("counterexample", parents=[common], help="build a witness family")
    p.add_argument("--kind", choices=("linfty", "lower-estimate", "type-failure"), required=True)
    p.add_argument("--n", type=int, default=4, help="block level")
    p.add_argument("--m", type=int, default=4, help="number of functions (linfty)")
    p.add_argument("--s", type=float, help="certified lower exponent (type-failure)")
    sub.add_parser("suite", parents=[common], help="run the acceptance checks")
    return parser


def _emit(args, result, tol):
    if args.out == "csv":
        if args.command != "probe":
            raise OrliczError("CSV output is only available for probe sweeps")
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["instance", "ratio"])
        for i, r in enumerate(result.ratios):
            w.writerow([i, repr(float(r))])
        sys.stdout.write(buf.getvalue())
        return
    if hasattr(result, "as_dict"):
        result = result.as_dict()
    doc = {"schema": SCHEMA, "command": args.command, "tolerance": tol.as_dict(), "seed": args.seed,
           "result": result}
    json.dump(_clean(doc), sys.stdout, indent=2)
    sys.stdout.write("\n")


def _error(kind, message, code):
    json.dump({"schema": SCHEMA, "error": {"type": kind, "message": message}}, sys.stdout)
    sys.stdout.write("\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = _tol(args)
        result = COMMANDS[args.command](args)
        _emit(args, result, tol)
    except MalformedInput as exc:
        return _error("malformed_json", str(exc), 1)
    except SearchFailed as exc:
        return _error("search_failed", str(exc), 3)
    except (OrliczError, ValueError) as exc:
        return _error(type(exc).__name__, str(exc), 2)
    if args.command == "suite" and not result["passed"]:
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
