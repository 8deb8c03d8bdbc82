"""Command line entry point.

Exit codes: 0 success, 1 input error, 2 pipeline error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from .config import PRESETS, parse_omega, resolve_config
from .entropy import optimize_tree
from .evaluation import confusion_metrics, roc_points, write_roc_csv
from .graph import build_graph
from .ingest import RecordError, features_for, parse_user_records, serialize_records
from .pipeline import NoUsersError, run_detect
from .synthetic import gen_synthetic

log = logging.getLogger("sebot")

EXIT_OK, EXIT_INPUT, EXIT_PIPELINE = 0, 1, 2


class InputError(Exception):
    pass


@contextmanager
def _out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _dump_json(obj, fh):
    json.dump(obj, fh, indent=1)
    fh.write("\n")


def _add_config_flags(p):
    g = p.add_argument_group("configuration (flags override --config, which overrides --preset)")
    g.add_argument("--config", type=Path, help="TOML file of PipelineConfig keys")
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--xi", type=float)
    g.add_argument("--phi", type=float)
    g.add_argument("--p", type=float)
    g.add_argument("--rho", type=float)
    g.add_argument("--pi", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--omega", type=parse_omega, metavar="A,B,C")
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int, help="worker cap for graph construction")


def _add_input_flags(p):
    p.add_argument("--input", "-i", required=True, help="user records file, '-' for stdin")
    p.add_argument("--format", choices=("jsonl", "csv"), help="default: from the file extension, else jsonl")
    p.add_argument("--output", "-o", help="default: stdout")


def _config(args):
    overrides = {k: getattr(args, k) for k in ("xi", "phi", "p", "rho", "pi", "theta", "omega", "seed")}
    try:
        return resolve_config(args.preset, args.config, overrides)
    except (OSError, ValueError) as exc:
        raise InputError(f"bad configuration: {exc}") from exc


def _read_records(args):
    fmt = args.format
    if fmt is None:
        fmt = "csv" if str(args.input).endswith(".csv") else "jsonl"
    try:
        if args.input == "-":
            data = sys.stdin.buffer.read()
        else:
            data = Path(args.input).read_bytes()
        return parse_user_records(data, fmt)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from exc
    except RecordError as exc:
        raise InputError(f"{args.input}: {exc}") from exc


def cmd_detect(args):
    cfg = _config(args)
    records = _read_records(args)
    try:
        det = run_detect(records, cfg, threads=args.threads)
    except NoUsersError as exc:
        raise InputError(str(exc)) from exc
    with _out(args.output) as fh:
        _dump_json(det.to_json(), fh)
    if args.dump_graph:
        with _out(args.dump_graph) as fh:
            det.graph.write_tsv(fh)
    if args.dump_tree:
        with _out(args.dump_tree) as fh:
            det.tree.write_json(fh)
    if args.dump_stationary:
        with _out(args.dump_stationary) as fh:
            det.stationary.write_json(fh, ids=[r.id for r in det.records])
    if args.roc and det.roc is not None:
        with _out(args.roc) as fh:
            write_roc_csv(det.roc, fh)
    if det.metrics is not None:
        m = det.metrics
        log.info("acc %.4f precision %.4f recall %.4f f1 %.4f auc %s",
                 m.acc, m.precision, m.recall, m.f1, "n/a" if m.auc is None else f"{m.auc:.4f}")


def cmd_gen_synthetic(args):
    records = gen_synthetic(args.bots, args.humans, args.seed)
    with _out(args.output) as fh:
        fh.write(serialize_records(records, args.format))


def cmd_eval(args):
    """Metrics from a detect output (or any JSON with a ``users`` list)."""
    try:
        with open(args.input, encoding="utf-8") as fh:
            users = json.load(fh)["users"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read predictions from {args.input}: {exc}") from exc
    users = [u for u in users if u.get("truth_label") is not None]
    if not users:
        raise InputError("no users with truth_label to evaluate")
    truth = [u["truth_label"] for u in users]
    m = confusion_metrics([u["label"] for u in users], truth)
    points = None
    if len(set(truth)) == 2 and all("ev" in u for u in users):
        points, m.auc = roc_points([u["ev"] for u in users], truth)
    with _out(args.output) as fh:
        _dump_json(m.to_json(), fh)
    if args.roc and points is not None:
        with _out(args.roc) as fh:
            write_roc_csv(points, fh)


def _graph_from_args(args):
    cfg = _config(args)
    _, feats = features_for(_read_records(args))
    if not feats:
        raise InputError("no valid users")
    return cfg, build_graph(feats, cfg.graph_config(), threads=args.threads)


def cmd_dump_graph(args):
    _, g = _graph_from_args(args)
    with _out(args.output) as fh:
        g.write_tsv(fh)


def cmd_dump_tree(args):
    cfg, g = _graph_from_args(args)
    tree = optimize_tree(g, cfg.p)
    with _out(args.output) as fh:
        tree.write_json(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sebot", description="Unsupervised social bot detection "
                                     "by structural entropy over a behavioural similarity graph.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    # -v also works after the subcommand; SUPPRESS keeps it from resetting the global flag
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = sub.add_parser("detect", parents=[common], help="run the full pipeline and write per-user labels")
    _add_input_flags(p)
    _add_config_flags(p)
    p.add_argument("--dump-graph", metavar="PATH")
    p.add_argument("--dump-tree", metavar="PATH")
    p.add_argument("--dump-stationary", metavar="PATH")
    p.add_argument("--roc", metavar="PATH", help="write ROC points as CSV when truth labels exist")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("gen-synthetic", parents=[common], help="write a labelled synthetic corpus")
    p.add_argument("--bots", type=int, default=200)
    p.add_argument("--humans", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("eval", parents=[common], help="metrics for an existing detect output")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o")
    p.add_argument("--roc", metavar="PATH")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dump-graph", parents=[common], help="write the similarity graph as 'i j k w' lines")
    _add_input_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_dump_graph)

    p = sub.add_parser("dump-tree", parents=[common], help="write the optimised encoding tree as JSON")
    _add_input_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_dump_tree)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        # reader went away (e.g. `| head`); silence the flush at interpreter exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except Exception as exc:  # any stage failure past input validation
        log.debug("pipeline failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
