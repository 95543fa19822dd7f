"""Command-line front end.

A run reads one JSON document::

    {"measure": {...}, "operator": {...}, "params": {"J": 8, "n": 3, ...}}

and writes a JSON report (stdout unless ``--out`` is given). Complex
numbers are ``[re, im]`` pairs and partitions are lists of index lists.

Exit codes: 0 success, 1 a ``reproduce-paper`` criterion failed,
2 unparseable arguments or config, 3 enumeration budget exceeded,
4 numerical diagnostic, 5 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .acceptance import run_all
from .entropy import (
    H1_BUDGET,
    PATH_BUDGET,
    entropy_rate,
    exact_entropy,
    exact_entropy_sb,
    h1_partition_entropy,
    is_zero_entropy,
    partition_entropy,
    sb_truncation,
    truncation_entropy_series,
)
from .exceptions import (
    BudgetExceededError,
    NotContractionError,
    NotSemibistochasticError,
    NumericalDiagnosticError,
    ValidationError,
)
from .measure import Measure
from .mu_norm import Partition, mu_norm_sq, partition_functional
from .operators import OperatorSpec, is_contraction, operator_norm, truncate
from .stochastic import b_map, ergodic_projector, l1_operator_norm, validate_sb

EXIT_OK = 0
EXIT_CRITERIA = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_NUMERIC = 4
EXIT_INVARIANT = 5

ENTROPY_MODES = ("exact", "partition", "h1", "truncate", "rate", "classify")
_INT_PARAMS = ("J", "Jmax", "kmax", "n", "nmax", "seed")
_FLOAT_PARAMS = ("tol", "eps")


class InvariantViolation(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Measure, operator and command parameters of one run."""

    operator: OperatorSpec | None
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ValidationError("config must be a JSON object")
        unknown = set(doc) - {"measure", "operator", "params"}
        if unknown:
            raise ValidationError(f"unknown config keys {sorted(unknown)}")
        measure = Measure.from_dict(doc["measure"]) if "measure" in doc else None
        operator = None
        if "operator" in doc:
            operator = OperatorSpec.from_dict(doc["operator"], measure)
        params = dict(doc.get("params", {}))
        for k in _INT_PARAMS:
            if k in params:
                if int(params[k]) != params[k] or params[k] < 0:
                    raise ValidationError(f"param {k} must be a non-negative integer")
                params[k] = int(params[k])
        for k in _FLOAT_PARAMS:
            if k in params:
                params[k] = float(params[k])
                if not params[k] > 0:
                    raise ValidationError(f"param {k} must be positive")
        if "partition" in params:
            params["partition"] = [sorted(int(i) for i in b) for b in params["partition"]]
            J = params.get("J")
            if J is not None:
                Partition(params["partition"], J=J)
        return cls(operator, params)

    def to_dict(self):
        doc = {"params": self.params}
        if self.operator is not None:
            doc["measure"] = self.operator.measure.to_dict()
            doc["operator"] = self.operator.to_dict(include_measure=False)
        return doc


def normalize(doc):
    """Canonical JSON text of a parsed config."""
    return dumps(ExperimentConfig.from_dict(doc).to_dict())


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


class _Timer:
    def __init__(self):
        self.stages = {}

    def stage(self, name):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.stages[name] = time.perf_counter() - self.t0

        return _Ctx()


def _need(cfg, key):
    if key not in cfg.params:
        raise ValidationError(f"params.{key} is required for this command")
    return cfg.params[key]


def _need_operator(cfg):
    if cfg.operator is None:
        raise ValidationError("config needs an 'operator'")
    return cfg.operator


def _partition(cfg, J):
    p = cfg.params.get("partition")
    return None if p is None else Partition(p, J=J)


def cmd_munorm(cfg, args, timer):
    spec, J = _need_operator(cfg), _need(cfg, "J")
    with timer.stage("truncate"):
        W = truncate(spec, J)
    with timer.stage("munorm"):
        out = {"J": J, "mu_norm_sq": mu_norm_sq(W), "operator_norm": operator_norm(W)}
        chi = _partition(cfg, J)
        if chi is not None:
            out["partition_functional"] = partition_functional(W, chi)
    return out


def cmd_bmap(cfg, args, timer):
    spec, J = _need_operator(cfg), _need(cfg, "J")
    with timer.stage("truncate"):
        W = truncate(spec, J)
    with timer.stage("bmap"):
        try:
            if spec.space == "l1":
                B = validate_sb(W.entries.real)
            else:
                B = b_map(W, require_contraction=cfg.params.get("require_contraction", True))
        except (NotContractionError, NotSemibistochasticError) as exc:
            raise InvariantViolation(str(exc)) from exc
    a = B.entries
    return {
        "J": J,
        "B": a,
        "row_sums": a.sum(axis=1),
        "col_sums": a.sum(axis=0),
        "l1_norm": l1_operator_norm(a),
        "contraction": None if spec.space == "l1" else is_contraction(W),
    }


def _sb(cfg):
    spec, J = _need_operator(cfg), _need(cfg, "J")
    B, mu = sb_truncation(spec, J)
    return B.entries, mu, J


def cmd_ergodic(cfg, args, timer):
    with timer.stage("truncate"):
        B, mu, J = _sb(cfg)
    with timer.stage("projector"):
        data = ergodic_projector(B, mu, tol=args.tol, strict=True)
    return {
        "J": J,
        "projector": data.projector,
        "u": data.u,
        "v": data.v,
        "uT": data.uT,
        "kernel_dim": data.kernel_dim,
        "diagnostics": data.diagnostics,
    }


def _scale(report, args):
    """Convert an EntropyReport dict to the requested log base."""
    d = report.to_dict()
    if args.log_base == "2":
        f = 1.0 / math.log(2)
        if isinstance(d["value"], float):
            d["value"] *= f
        d["trace"] = [[x, y * f if isinstance(y, float) else y] for x, y in d["trace"]]
    d["log_base"] = args.log_base
    return d


def cmd_entropy(cfg, args, timer):
    mode = args.mode
    spec = _need_operator(cfg)
    budget = args.budget
    if mode == "truncate":
        with timer.stage("series"):
            rep = truncation_entropy_series(
                spec,
                Jmax=cfg.params.get("Jmax"),
                kmax=cfg.params.get("kmax"),
                eps=cfg.params.get("eps", 1e-3),
                tol=args.tol,
            )
        if not rep.diagnostics["monotone"]:
            raise InvariantViolation(f"truncation series decreased by {rep.diagnostics['max_drop']:g}")
        return _scale(rep, args)
    J = _need(cfg, "J")
    chi = _partition(cfg, J)
    if mode == "exact":
        with timer.stage("exact"):
            if spec.space == "l1":
                B, mu = sb_truncation(spec, J)
                rep = exact_entropy_sb(B, mu, tol=args.tol)
            else:
                rep = exact_entropy(truncate(spec, J), tol=args.tol)
        return _scale(rep, args)
    if mode == "rate":
        with timer.stage("rate"):
            rep = entropy_rate(spec, chi, cfg.params.get("nmax", 12), J=J, budget=budget or PATH_BUDGET)
        return _scale(rep, args)
    if mode == "classify":
        with timer.stage("classify"):
            B, mu, _ = _sb(cfg)
            res = is_zero_entropy(B)
        return {
            "zero_entropy": res.zero,
            "witness": res.witness,
            "dead_rows": res.dead_rows,
            "dead_cols": res.dead_cols,
        }
    n = _need(cfg, "n")
    if mode == "partition":
        with timer.stage("partition"):
            B, mu, _ = _sb(cfg)
            value = partition_entropy(B, chi, n, mu=mu, budget=budget or PATH_BUDGET)
    else:
        if spec.space == "l1":
            raise ValidationError("h1 needs an l2 operator")
        with timer.stage("h1"):
            value = h1_partition_entropy(truncate(spec, J), chi, n, budget=budget or H1_BUDGET)
    if args.log_base == "2":
        value /= math.log(2)
    return {"value": value, "n": n, "J": J, "log_base": args.log_base}


def cmd_reproduce(cfg, args, timer):
    seed = cfg.params.get("seed", 0) if cfg is not None else 0
    results = []
    for r in run_all(seed=seed):
        timer.stages[f"criterion_{r.number}"] = r.seconds
        print(r.line(), file=sys.stderr)
        results.append({"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail})
    return {"criteria": results, "all_passed": all(r["passed"] for r in results)}


def cmd_config(cfg, args, timer):
    return cfg.to_dict()


COMMANDS = {
    "munorm": cmd_munorm,
    "bmap": cmd_bmap,
    "ergodic": cmd_ergodic,
    "entropy": cmd_entropy,
    "reproduce-paper": cmd_reproduce,
    "config": cmd_config,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file ('-' for stdin)")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--budget", type=int, help="maximum number of enumerated paths")
    common.add_argument("--tol", type=float, default=1e-10, help="rank threshold for Ker(B - I)")
    common.add_argument("--threads", type=int, help="BLAS thread limit")
    common.add_argument("--log-base", choices=("e", "2"), default="e")
    parser = argparse.ArgumentParser(prog="opentropy", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"opentropy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("munorm", parents=[common], help="mu-norm and partition functional")
    sub.add_parser("bmap", parents=[common], help="semibistochastic matrix b(U)")
    sub.add_parser("ergodic", parents=[common], help="projector onto Ker(B - I)")
    ent = sub.add_parser("entropy", parents=[common], help="entropy computations")
    ent.add_argument("mode", choices=ENTROPY_MODES)
    sub.add_parser("reproduce-paper", parents=[common], help="run the acceptance table")
    sub.add_parser("config", parents=[common], help="print the normalized config")
    return parser


def _read_config(path):
    if path is None:
        return None
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return json.loads(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_PARSE
    if args.budget is not None and args.budget < 1:
        print("error: --budget must be positive", file=sys.stderr)
        return EXIT_PARSE
    timer = _Timer()
    try:
        doc = _read_config(args.config)
        if doc is None and args.command != "reproduce-paper":
            raise ValidationError("--config is required")
        cfg = ExperimentConfig.from_dict(doc) if doc is not None else None
    except (OSError, json.JSONDecodeError, ValidationError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    limits = threadpool_limits(args.threads) if args.threads else nullcontext()
    code = EXIT_OK
    try:
        with limits:
            result = COMMANDS[args.command](cfg, args, timer)
        if args.command == "reproduce-paper" and not result["all_passed"]:
            code = EXIT_CRITERIA
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NumericalDiagnosticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValidationError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = {
        "command": args.command if args.command != "entropy" else f"entropy {args.mode}",
        "version": __version__,
        "tolerances": {"rank": args.tol, "budget": args.budget},
        "timings": timer.stages,
        "result": result,
    }
    text = dumps(_jsonable(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
