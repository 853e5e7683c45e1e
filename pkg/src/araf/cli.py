"""Command line interface.

Four subcommands: discretize (entropy binning of continuous columns), mine
(rule mining to JSON lines), transform (rules to a binary feature matrix),
and bench (synthetic benchmark runs). Every run that writes an output file
also writes <output>.manifest.json recording the resolved parameters, seed,
and sha256 of each input, so results can be tied back to what produced them.

Exit codes: 0 success, 2 bad usage, 3 bad input data, 4 internal failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .bench import (
    METHODS,
    SynthConfig,
    gen_freq_bench,
    generate,
    mine_method,
    rule_keys,
    run_freq_trial,
    run_synth_trial,
    s1_ground_truth,
)
from .data import ColumnKind, Dataset, load_csv, write_csv
from .discretize import apply_dataset, fit_dataset, maps_to_json
from .errors import ArafError, ConflictingFlagsError, DataError, InternalError, UsageError
from .features import FeatureMode, generate_features, suggest_params, transform
from .mining import (
    MiningConfig,
    Scoring,
    mine_frequent,
    mine_with_thresholds,
)
from .rules import (
    parse_rules_jsonl,
    rules_to_jsonl,
    select_rules,
    select_rules_reluctant,
)

_SCORING = {"conf": Scoring.CONFIDENCE, "rconf": Scoring.RELATIVE_CONFIDENCE, "lift": Scoring.LIFT}


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve_threads(value: "int | None") -> int:
    if value is not None:
        if value < 1:
            raise UsageError("--threads must be >= 1")
        return value
    env = os.environ.get("ARAF_THREADS", "").strip()
    if env:
        try:
            parsed = int(env)
        except ValueError:
            raise UsageError("ARAF_THREADS must be an integer, got %r" % env)
        if parsed < 1:
            raise UsageError("ARAF_THREADS must be >= 1")
        return parsed
    return 1


def write_manifest(out_path: str, command: str, params: dict, inputs: list[str]) -> str:
    """Record what produced out_path; returns the manifest path."""
    manifest = {
        "tool": "araf",
        "version": __version__,
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(),
        "params": params,
        "inputs": {p: _sha256(p) for p in inputs},
        "output": out_path,
    }
    path = out_path + ".manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _parse_declares(pairs: "list[str] | None") -> "dict[str, ColumnKind] | None":
    if not pairs:
        return None
    out: dict[str, ColumnKind] = {}
    for pair in pairs:
        name, sep, kind = pair.rpartition("=")
        if not sep or not name:
            raise UsageError("--declare expects NAME=categorical|continuous, got %r" % pair)
        if kind == "categorical":
            out[name] = ColumnKind.CATEGORICAL
        elif kind == "continuous":
            out[name] = ColumnKind.CONTINUOUS
        else:
            raise UsageError("--declare kind must be categorical or continuous, got %r" % kind)
    return out


def _load(args) -> Dataset:
    declared = _parse_declares(getattr(args, "declare", None))
    ds = load_csv(args.input, args.label, declared_kinds=declared)
    if getattr(args, "assume_categorical", False):
        forced = {col.name: ColumnKind.CATEGORICAL for col in ds.schema.features}
        ds = load_csv(args.input, args.label, declared_kinds=forced)
    return ds


# -- discretize -------------------------------------------------------------------


def cmd_discretize(args) -> int:
    ds = _load(args)
    if args.k < 2:
        raise UsageError("--k must be >= 2")
    maps = fit_dataset(ds, k=args.k, l=args.l)
    # no continuous columns: pass the data through and record an empty map
    mapped = apply_dataset(ds, maps) if maps else ds
    write_csv(mapped, args.out_data)
    if args.out_map:
        with open(args.out_map, "w", encoding="utf-8") as f:
            f.write(maps_to_json(maps))
    write_manifest(
        args.out_data,
        "discretize",
        {
            "input": args.input,
            "label": args.label,
            "k": args.k,
            "l": args.l,
            "out_map": args.out_map,
            "columns_discretized": [m.column for m in maps],
            "degenerate_columns": [m.column for m in maps if m.degenerate],
            "threads": args.threads,
        },
        [args.input],
    )
    return 0


# -- mine -------------------------------------------------------------------------


def cmd_mine(args) -> int:
    threshold_mode = args.minsupp is not None or args.minconf is not None
    fixed_flags = (
        args.d_freq is not None
        or args.d_conf is not None
        or args.per_class
        or args.reluctant
        or args.scoring is not None
        or args.subsample is not None
    )
    if threshold_mode and fixed_flags:
        raise ConflictingFlagsError(
            "threshold mining (--minsupp/--minconf) cannot be combined with "
            "fixed-size options (--d-freq/--d-conf/--scoring/--per-class/"
            "--reluctant/--subsample)"
        )
    if threshold_mode and (args.minsupp is None or args.minconf is None):
        raise UsageError("threshold mining needs both --minsupp and --minconf")

    ds = _load(args)
    if args.k is not None:
        maps = fit_dataset(ds, k=args.k, l=args.l)
        ds = apply_dataset(ds, maps)

    if threshold_mode:
        result, rules = mine_with_thresholds(ds, args.minsupp, args.minconf)
        params: dict = {"minsupp": args.minsupp, "minconf": args.minconf}
    else:
        scoring_name = args.scoring
        per_class = args.per_class
        if args.reluctant:
            if scoring_name is not None and scoring_name != "rconf":
                raise ConflictingFlagsError("--reluctant requires rconf scoring")
            scoring_name = "rconf"
            per_class = True
        if scoring_name is None:
            scoring_name = "conf"
        d_freq, d_conf = args.d_freq, args.d_conf
        if d_freq is None or d_conf is None:
            sf, sc = suggest_params(ds.p, ds.num_classes)
            d_freq = sf if d_freq is None else d_freq
            d_conf = sc if d_conf is None else d_conf
        config = MiningConfig(
            d_freq=d_freq,
            d_conf=d_conf,
            per_class=per_class,
            scoring=_SCORING[scoring_name],
            reluctant=args.reluctant,
            subsample=args.subsample,
            seed=args.seed,
        )
        result = mine_frequent(ds, config)
        if config.reluctant:
            rules = select_rules_reluctant(result, config)
        else:
            rules = select_rules(result, config)
        params = {
            "d_freq": d_freq,
            "d_conf": d_conf,
            "scoring": scoring_name,
            "per_class": per_class,
            "reluctant": args.reluctant,
            "subsample": args.subsample,
        }

    with open(args.out_rules, "w", encoding="utf-8") as f:
        f.write(rules_to_jsonl(rules, ds.schema))
    params.update(
        {
            "input": args.input,
            "label": args.label,
            "k": args.k,
            "seed": args.seed,
            "threads": args.threads,
            "n": ds.n,
            "p": ds.p,
            "rules_written": len(rules),
            "singleton_table_entries": result.table_stats.singleton_entries,
            "pair_table_entries": result.table_stats.pair_entries,
        }
    )
    write_manifest(args.out_rules, "mine", params, [args.input])
    return 0


# -- transform ----------------------------------------------------------------------


def cmd_transform(args) -> int:
    ds = _load(args)
    if args.k is not None:
        maps = fit_dataset(ds, k=args.k, l=args.l)
        ds = apply_dataset(ds, maps)
    with open(args.rules, "r", encoding="utf-8") as f:
        text = f.read()
    parsed = parse_rules_jsonl(text, ds.schema)
    mode = FeatureMode.APPEND_TO_LABEL_ENCODED if args.mode == "label" else (
        FeatureMode.APPEND_INTERACTIONS_TO_ONE_HOT
    )
    spec = generate_features(parsed, mode)
    matrix, names = transform(ds, spec)
    label_names = [ds.schema.classes[i] for i in ds.labels]
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(names + [ds.schema.label_name])
        for row, lab in zip(matrix, label_names):
            writer.writerow([("%.12g" % v) for v in row] + [lab])
    write_manifest(
        args.out,
        "transform",
        {
            "input": args.input,
            "rules": args.rules,
            "label": args.label,
            "mode": args.mode,
            "k": args.k,
            "features": len(names),
            "threads": args.threads,
        },
        [args.input, args.rules],
    )
    return 0


# -- bench --------------------------------------------------------------------------


def _bench_freq(args, writer) -> list[list]:
    grid = [100, 500, 1000, 5000]
    recovery_rows = []
    ds = gen_freq_bench(args.n or 10000, args.seed, args.p or 10)
    for n_prime in grid:
        hits = 0
        err_sum = 0.0
        err_count = 0
        for t in range(args.trials):
            hit, errors = run_freq_trial(ds, n_prime, args.seed + 1000 * t)
            hits += int(hit)
            err_sum += sum(errors)
            err_count += len(errors)
        mean_err = err_sum / err_count if err_count else 0.0
        recovery_rows.append(["freq", n_prime, hits, args.trials, "%.6f" % mean_err])
    return recovery_rows


def _bench_synth(args, writer) -> list[list]:
    counts: dict = {m: {} for m in METHODS if m != "origin"}
    truths = s1_ground_truth()
    for t in range(args.trials):
        seed = args.seed + 1000 * t
        trial = run_synth_trial(
            args.variant,
            seed,
            n=args.n or 1000,
            p=args.p or 99,
            d_freq=args.d_freq or 45,
            d_conf=args.d_conf or 5,
            with_eval=not args.no_eval,
        )
        for method, metric in trial.metrics.items():
            writer.writerow([args.variant, method, seed, "%.6f" % metric[0], "%.6f" % metric[1]])
        for method, rules in trial.rules.items():
            keys = rule_keys(rules)
            for ant, cls in truths:
                if (ant, cls) in keys:
                    counts[method][(ant, cls)] = counts[method].get((ant, cls), 0) + 1
    rows = []
    for method in sorted(counts):
        for ant, cls in truths:
            label = "&".join("X%d=%d" % (f + 1, v) for f, v in ant)
            rows.append(
                [args.variant, method, "%s->%d" % (label, cls), counts[method].get((ant, cls), 0), args.trials]
            )
    return rows


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["variant", "method", "seed", "logloss", "accuracy"])
        if args.variant == "freq":
            recovery = _bench_freq(args, writer)
            header = ["variant", "n_prime", "all_recovered", "trials", "mean_abs_err"]
        else:
            recovery = _bench_synth(args, writer)
            header = ["variant", "method", "rule", "recovered", "trials"]
    if args.recovery:
        with open(args.recovery, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(recovery)
    write_manifest(
        args.out,
        "bench",
        {
            "variant": args.variant,
            "trials": args.trials,
            "seed": args.seed,
            "n": args.n,
            "p": args.p,
            "d_freq": args.d_freq,
            "d_conf": args.d_conf,
            "recovery": args.recovery,
            "no_eval": args.no_eval,
            "threads": args.threads,
        },
        [],
    )
    return 0


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="araf",
        description="Mine class association rules and turn them into binary features.",
    )
    parser.add_argument("--version", action="version", version="araf %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_io(p, needs_label=True):
        p.add_argument("--input", required=True, help="input CSV with a header row")
        if needs_label:
            p.add_argument("--label", required=True, help="name of the label column")
        p.add_argument(
            "--declare",
            action="append",
            metavar="NAME=KIND",
            help="override inferred column kind (categorical|continuous); repeatable",
        )
        p.add_argument(
            "--assume-categorical",
            action="store_true",
            help="treat every feature column as categorical regardless of content",
        )
        p.add_argument("--threads", type=int, default=None, help="worker count (default 1 or ARAF_THREADS)")

    d = sub.add_parser("discretize", help="entropy-based binning of continuous columns")
    add_common_io(d)
    d.add_argument("--k", type=int, required=True, help="number of intervals per column")
    d.add_argument("--l", type=int, default=10, help="candidate cut points per round (default 10)")
    d.add_argument("--out-data", required=True, help="output CSV with binned columns")
    d.add_argument("--out-map", help="optional JSON file for the fitted thresholds")
    d.set_defaults(func=cmd_discretize)

    m = sub.add_parser("mine", help="mine class association rules to JSON lines")
    add_common_io(m)
    m.add_argument("--d-freq", type=int, help="frequent itemset capacity (default 5*classes*sqrt(p))")
    m.add_argument("--d-conf", type=int, help="rule count (default 5*sqrt(p))")
    m.add_argument("--scoring", choices=sorted(_SCORING), help="rule score (default conf)")
    m.add_argument("--per-class", action="store_true", help="split itemset capacity per class")
    m.add_argument(
        "--reluctant",
        action="store_true",
        help="per-class rconf mining that drops pairs no better than their parts",
    )
    m.add_argument("--minsupp", type=float, help="threshold mode: minimum support fraction")
    m.add_argument("--minconf", type=float, help="threshold mode: minimum confidence")
    m.add_argument("--subsample", type=int, help="mine on a bootstrap subsample of this size")
    m.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    m.add_argument("--k", type=int, help="discretize continuous columns into this many intervals first")
    m.add_argument("--l", type=int, default=10, help="candidate cut points (default 10)")
    m.add_argument("--out-rules", required=True, help="output rules file (JSON lines)")
    m.set_defaults(func=cmd_mine)

    t = sub.add_parser("transform", help="apply mined rules as binary feature columns")
    add_common_io(t)
    t.add_argument("--rules", required=True, help="rules file produced by mine")
    t.add_argument(
        "--mode",
        choices=("label", "onehot"),
        required=True,
        help="label: encoded originals + all rule indicators; onehot: one-hot originals + pair indicators",
    )
    t.add_argument("--k", type=int, help="discretize continuous columns first (must match mining)")
    t.add_argument("--l", type=int, default=10)
    t.add_argument("--out", required=True, help="output CSV feature matrix")
    t.set_defaults(func=cmd_transform)

    b = sub.add_parser("bench", help="run a synthetic benchmark")
    b.add_argument("--variant", choices=("freq", "s1", "s2"), required=True)
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--n", type=int, help="rows per trial (default 10000 freq, 1000 s1/s2)")
    b.add_argument("--p", type=int, help="feature count (default 10 freq, 99 s1/s2)")
    b.add_argument("--d-freq", type=int, help="itemset capacity (s1/s2 default 45)")
    b.add_argument("--d-conf", type=int, help="rule count (s1/s2 default 5)")
    b.add_argument("--no-eval", action="store_true", help="skip the logistic evaluation")
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--out", required=True, help="output CSV of per-trial metrics")
    b.add_argument("--recovery", help="optional CSV of rule recovery counts")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.threads = _resolve_threads(getattr(args, "threads", None))
        return args.func(args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 2
    except DataError as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return 3
    except InternalError as exc:
        print("internal error: %s" % exc, file=sys.stderr)
        return 4
    except ArafError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 4
    except OSError as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
