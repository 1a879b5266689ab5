"""Command-line interface: fit sessions, explain samples, run benchmarks and
serve the HTTP API.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver/infeasibility.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bench import ExperimentConfig, fit_projector, resolve_dataset, run_experiment, write_report
from .core import CfRequest, SolverOptions
from .datasets import gen_toy, load_csv
from .diverse import diverse_counterfactuals
from .errors import DataError, InputError, SolverError
from .sessions import Session, load_session, save_session

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SOLVER = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="drcf", description="Contrasting explanations for dimensionality reduction")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a projector and save a session")
    p_fit.add_argument("--data", required=True, help="'toy' or a CSV path")
    p_fit.add_argument("--label-column", default="", help="label column for CSV data")
    p_fit.add_argument("--method", required=True, help="linear | som | ae | ptsne")
    p_fit.add_argument("--out", required=True, help="session output path")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--hyperparams", default="{}", help="JSON dict of fit hyperparameters")

    p_exp = sub.add_parser("explain", help="compute diverse counterfactuals for a sample")
    p_exp.add_argument("--session", required=True)
    group = p_exp.add_mutually_exclusive_group(required=True)
    group.add_argument("--sample-index", type=int)
    group.add_argument("--x", help="comma-separated sample vector")
    p_exp.add_argument("--target", required=True, help="comma-separated target (grid index for SOM)")
    p_exp.add_argument("--k", type=int, default=3)
    p_exp.add_argument("--blacklist", default="", help="comma-separated feature indices")
    p_exp.add_argument("--C", type=float, default=100.0)
    p_exp.add_argument("--out", default="-", help="output path, '-' for stdout")

    p_bench = sub.add_parser("bench", help="run a benchmark config")
    p_bench.add_argument("--config", required=True, help="ExperimentConfig JSON path")
    p_bench.add_argument("--out", required=True, help="report path prefix")

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument(
        "--session-dir",
        default=os.environ.get("DRCF_SESSION_DIR", "."),
        help="directory of session JSON files (env: DRCF_SESSION_DIR)",
    )
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


_METHODS = ("linear", "som", "ae", "ptsne")


def _cmd_fit(args) -> int:
    if args.method not in _METHODS:
        raise UsageError(f"unknown method {args.method!r}, expected one of {_METHODS}")
    try:
        hp = json.loads(args.hyperparams)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--hyperparams is not valid JSON: {exc}")
    if args.data == "toy":
        dataset = gen_toy(seed=args.seed)
    else:
        if not args.label_column:
            raise UsageError("CSV data requires --label-column")
        dataset = load_csv(args.data, args.label_column)
    projector = fit_projector(dataset, args.method, hp, args.seed)
    session_id = os.path.splitext(os.path.basename(args.out))[0]
    sess = Session(
        session_id=session_id,
        dataset=dataset,
        projector=projector,
        config={"method": args.method, "seed": args.seed, "data": args.data, "hyperparams": hp},
    )
    save_session(sess, args.out)
    print(f"saved session {session_id!r} to {args.out}")
    return 0


def _parse_vec(text):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}: {exc}")


def _cmd_explain(args) -> int:
    sess = load_session(args.session)
    if args.sample_index is not None:
        if not (0 <= args.sample_index < sess.dataset.m):
            raise UsageError(f"--sample-index out of range [0, {sess.dataset.m})")
        x = sess.dataset.X[args.sample_index]
    else:
        x = np.asarray(_parse_vec(args.x))
    target = _parse_vec(args.target)
    if sess.projector.kind == "som":
        y_cf = tuple(int(v) for v in target)
    else:
        y_cf = np.asarray(target)
    blacklist = tuple(int(v) for v in args.blacklist.split(",") if v.strip() != "")
    req = CfRequest(x_orig=x, y_cf=y_cf, blacklist=blacklist, C=args.C, opts=SolverOptions())
    es = diverse_counterfactuals(req, args.k, sess.projector)
    payload = json.dumps(es.to_json_dict(), sort_keys=True, indent=2)
    if args.out == "-":
        print(payload)
    else:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    return 0


def _cmd_bench(args) -> int:
    try:
        with open(args.config) as fh:
            cfg_obj = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"config file not found: {args.config}")
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid config JSON: {exc}")
    cfg = ExperimentConfig.from_json_dict(cfg_obj)
    rt = run_experiment(cfg)
    write_report(rt, args.out)
    with open(args.out + ".txt") as fh:
        sys.stdout.write(fh.read())
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.session_dir), host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "explain":
            return _cmd_explain(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "serve":
            return _cmd_serve(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except InputError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
