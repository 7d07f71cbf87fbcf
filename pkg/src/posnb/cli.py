"""Command-line front end: dataset validation, experiment runs, q sweeps,
nested tuning, and results tables.

Exit codes are a stable contract: 0 success, 2 configuration problem,
3 dataset problem, 4 results problem.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__, evaluate, kernels
from .corpus import (
    FILENAME_PREFIX,
    CorpusError,
    LabeledCorpus,
    load_polarity_corpus,
    load_subjectivity_corpus,
)
from .evaluate import DEFAULT_GRID, ConfigError, EvalReport, ExperimentConfig
from .features import WeightScheme
from .subjectivity import SubjectivityModel, train_subjectivity_model, transform_trace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RESULTS = 4

CANONICAL_DOCS_PER_CLASS = 1000
CANONICAL_SENTENCES_PER_CLASS = 5000

_FAMILIES = {"0+q": 0.0, "1+q": 1.0}

_TOP_KEYS = {
    "name",
    "label",
    "orders",
    "family",
    "q",
    "rule",
    "prefix_fraction",
    "transform",
    "smoothing",
    "use_prior",
    "tune",
    "outer_k",
    "inner_k",
    "seed",
    "fold_strategy",
    "cross_sentence_bigrams",
    "subjectivity_features",
}
_TRANSFORM_KEYS = {"mode", "threshold", "direction"}
_TUNE_KEYS = {"grid"}
_SUBJ_KEYS = {"orders", "rule", "smoothing"}


class RunSpec:
    """A parsed config file: the experiment plus presentation metadata."""

    def __init__(self, name, label, config, subj_orders, subj_rule, subj_smoothing):
        self.name = name
        self.label = label
        self.config: ExperimentConfig = config
        self.subj_orders = subj_orders
        self.subj_rule = subj_rule
        self.subj_smoothing = subj_smoothing

    @property
    def uses_subjectivity(self) -> bool:
        return self.config.transform_mode != "none"


def _check_keys(data: dict, allowed: set, where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {sorted(unknown)}")


def parse_config(data: dict, default_name: str) -> RunSpec:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(data, _TOP_KEYS, "config")

    transform = data.get("transform", {})
    _check_keys(transform, _TRANSFORM_KEYS, "transform")
    tune = data.get("tune")
    if tune is not None:
        _check_keys(tune, _TUNE_KEYS, "tune")
    subj = data.get("subjectivity_features", {})
    _check_keys(subj, _SUBJ_KEYS, "subjectivity_features")

    family = data.get("family", "1+q")
    if family not in _FAMILIES:
        raise ConfigError(f"family must be one of {sorted(_FAMILIES)}, got {family!r}")
    try:
        scheme = WeightScheme(_FAMILIES[family], float(data.get("q", 0.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    config = ExperimentConfig(
        orders=tuple(data.get("orders", [1])),
        scheme=scheme,
        rule=data.get("rule", "presence"),
        k_fraction=float(data.get("prefix_fraction", 0.0)),
        transform_mode=transform.get("mode", "none"),
        threshold=float(transform.get("threshold", 0.5)),
        sort_direction=transform.get("direction", "ascending"),
        smoothing=float(data.get("smoothing", 1.0)),
        use_prior=bool(data.get("use_prior", True)),
        tune_grid=None if tune is None else tuple(tune.get("grid", DEFAULT_GRID)),
        outer_k=int(data.get("outer_k", 10)),
        inner_k=int(data.get("inner_k", 5)),
        seed=int(data.get("seed", 0)),
        fold_strategy=data.get("fold_strategy", FILENAME_PREFIX),
        cross_sentence_bigrams=bool(data.get("cross_sentence_bigrams", False)),
    )
    config.validate()
    name = data.get("name", default_name)
    return RunSpec(
        name=name,
        label=data.get("label", name),
        config=config,
        subj_orders=tuple(subj.get("orders", [1])),
        subj_rule=subj.get("rule", "presence"),
        subj_smoothing=float(subj.get("smoothing", 1.0)),
    )


def resolve_config_path(spec: str) -> Path:
    """A filesystem path, or the name of a bundled config."""
    path = Path(spec)
    if path.is_file():
        return path
    name = spec if spec.endswith(".json") else spec + ".json"
    bundled = resources.files("posnb") / "configs" / name
    if bundled.is_file():
        return Path(str(bundled))
    available = ", ".join(sorted(p.name for p in (resources.files("posnb") / "configs").iterdir()))
    raise ConfigError(f"config not found: {spec!r} (bundled configs: {available})")


def load_run_spec(spec: str) -> RunSpec:
    path = resolve_config_path(spec)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(data, default_name=path.stem)


# ---------------------------------------------------------------------------
# dataset plumbing


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _sha256_tree(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode("utf-8") + b"\0")
            digest.update(_sha256_file(path).encode("ascii") + b"\0")
    return digest.hexdigest()


def _dataset_hashes(args) -> dict:
    hashes = {}
    if args.polarity:
        hashes["polarity"] = {"path": str(args.polarity), "sha256": _sha256_tree(Path(args.polarity))}
    if args.subj:
        hashes["subjective"] = {"path": str(args.subj), "sha256": _sha256_file(Path(args.subj))}
    if args.obj:
        hashes["objective"] = {"path": str(args.obj), "sha256": _sha256_file(Path(args.obj))}
    return hashes


def _require_polarity(args) -> LabeledCorpus:
    if not args.polarity:
        raise ConfigError("--polarity DIR is required for this command")
    return load_polarity_corpus(args.polarity)


def _subjectivity_model_for(spec: RunSpec, args) -> SubjectivityModel | None:
    if not spec.uses_subjectivity:
        return None
    if not args.subj or not args.obj:
        raise ConfigError(
            f"transform mode {spec.config.transform_mode!r} needs --subj and --obj files"
        )
    pairs = load_subjectivity_corpus(args.subj, args.obj)
    return train_subjectivity_model(
        pairs, orders=spec.subj_orders, rule=spec.subj_rule, smoothing=spec.subj_smoothing
    )


def _write_manifest(out_dir: Path, spec: RunSpec, args, outputs: dict) -> None:
    manifest = {
        "tool": "posnb",
        "version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "kernel_backend": kernels.BACKEND,
        "threads": args.threads,
        "config_name": spec.name,
        "config": _config_snapshot(spec),
        "datasets": _dataset_hashes(args),
        "outputs": outputs,
    }
    path = out_dir / f"{spec.name}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _config_snapshot(spec: RunSpec) -> dict:
    config = spec.config
    return {
        "label": spec.label,
        "orders": list(config.orders),
        "a": config.scheme.a,
        "q": config.scheme.q,
        "rule": config.rule,
        "prefix_fraction": config.k_fraction,
        "transform": {
            "mode": config.transform_mode,
            "threshold": config.threshold,
            "direction": config.sort_direction,
        },
        "smoothing": config.smoothing,
        "use_prior": config.use_prior,
        "tune_grid": None if config.tune_grid is None else list(config.tune_grid),
        "outer_k": config.outer_k,
        "inner_k": config.inner_k,
        "seed": config.seed,
        "fold_strategy": config.fold_strategy,
        "cross_sentence_bigrams": config.cross_sentence_bigrams,
        "subjectivity_features": {
            "orders": list(spec.subj_orders),
            "rule": spec.subj_rule,
            "smoothing": spec.subj_smoothing,
        },
    }


def _write_report(out_dir: Path, spec: RunSpec, report: EvalReport) -> Path:
    payload = {
        "name": spec.name,
        "label": spec.label,
        "uses_subjectivity": spec.uses_subjectivity,
        "config": _config_snapshot(spec),
        **report.to_dict(),
    }
    path = out_dir / f"{spec.name}.report.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _write_traces(out_dir: Path, spec: RunSpec, corpus, smodel) -> Path:
    path = out_dir / f"{spec.name}.traces.tsv"
    lines = ["doc_id\tsentence_index\tscore\tkept"]
    for doc in corpus.documents:
        for doc_id, index, score, kept in transform_trace(
            doc, smodel, spec.config.transform_mode, spec.config.threshold
        ):
            lines.append(f"{doc_id}\t{index}\t{score!r}\t{int(kept)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    summary = []
    ok = True
    if not args.polarity and not (args.subj or args.obj):
        print("nothing to validate: pass --polarity and/or --subj/--obj", file=sys.stderr)
        return EXIT_CONFIG
    if args.polarity:
        corpus = load_polarity_corpus(args.polarity)
        counts = corpus.class_counts
        summary.append(f"pos={counts['positive']} neg={counts['negative']}")
        if corpus.n_skipped_empty:
            summary.append(f"skipped_empty={corpus.n_skipped_empty}")
        ok &= all(c == CANONICAL_DOCS_PER_CLASS for c in counts.values())
    if args.subj or args.obj:
        if not (args.subj and args.obj):
            print("subjectivity validation needs both --subj and --obj", file=sys.stderr)
            return EXIT_CONFIG
        pairs = load_subjectivity_corpus(args.subj, args.obj)
        n_subj = sum(1 for _, label in pairs if label == "subjective")
        n_obj = len(pairs) - n_subj
        summary.append(f"subj={n_subj} obj={n_obj}")
        ok &= n_subj == CANONICAL_SENTENCES_PER_CLASS and n_obj == CANONICAL_SENTENCES_PER_CLASS
    print(" ".join(summary))
    if ok or args.allow_custom:
        return EXIT_OK
    print("counts differ from the standard datasets (use --allow-custom to accept)",
          file=sys.stderr)
    return EXIT_DATA


def _execute_run(args, force_tune: bool) -> int:
    spec = load_run_spec(args.config)
    if args.seed is not None:
        spec.config = replace(spec.config, seed=args.seed)
    if force_tune and spec.config.tune_grid is None:
        spec.config = replace(spec.config, tune_grid=DEFAULT_GRID)

    corpus = _require_polarity(args)
    smodel = _subjectivity_model_for(spec, args)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = {"report": f"{spec.name}.report.json"}
    if args.traces and smodel is not None:
        outputs["traces"] = f"{spec.name}.traces.tsv"
    _write_manifest(out_dir, spec, args, outputs)

    if spec.config.tune_grid is not None:
        report = evaluate.nested_tune(corpus, spec.config, smodel, threads=args.threads)
    else:
        report = evaluate.cross_validate(corpus, spec.config, smodel, threads=args.threads)
    _write_report(out_dir, spec, report)
    if args.traces and smodel is not None:
        _write_traces(out_dir, spec, corpus, smodel)
    print(
        f"{spec.name}: accuracy={report.pooled_accuracy:.4f} "
        f"wilson95=[{report.wilson_low:.4f}, {report.wilson_high:.4f}] n={report.n}"
    )
    return EXIT_OK


def cmd_run(args) -> int:
    return _execute_run(args, force_tune=False)


def cmd_tune(args) -> int:
    return _execute_run(args, force_tune=True)


def cmd_sweep(args) -> int:
    if args.step <= 0:
        raise ConfigError(f"--step must be > 0, got {args.step}")
    if args.from_q >= args.to_q:
        raise ConfigError(f"--from must be < --to, got {args.from_q} >= {args.to_q}")
    grid = []
    i = 0
    while True:
        q = round(args.from_q + i * args.step, 10)
        if q > args.to_q + 1e-12:
            break
        grid.append(q)
        i += 1

    spec = load_run_spec(args.config)
    if args.seed is not None:
        spec.config = replace(spec.config, seed=args.seed)
    corpus = _require_polarity(args)
    smodel = _subjectivity_model_for(spec, args)
    result = evaluate.sweep_q(corpus, spec.config, grid, smodel, threads=args.threads)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(result.to_csv(), encoding="utf-8")
    best = max(result.rows, key=lambda row: row[1])
    print(f"wrote {out_path} ({len(result.rows)} rows); best q={best[0]!r} accuracy={best[1]:.4f}")
    return EXIT_OK


def cmd_report(args) -> int:
    results_dir = Path(args.results_dir)
    report_paths = sorted(results_dir.glob("*.report.json"))
    if not report_paths:
        print(f"no *.report.json files under {results_dir}", file=sys.stderr)
        return EXIT_RESULTS
    rows = []
    for path in report_paths:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            rows.append(
                (data["label"], float(data["pooled_accuracy"]), bool(data["uses_subjectivity"]))
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            print(f"corrupted report {path}: {exc}", file=sys.stderr)
            return EXIT_RESULTS
        code = _verify_manifest(path)
        if code != EXIT_OK:
            return code
    rows.sort(key=lambda row: row[1])
    label_width = max(len(label) for label, _, _ in rows)
    print(f"{'Method'.ljust(label_width)}  Accuracy  Subj.?")
    print("-" * (label_width + 18))
    for label, acc, uses_subj in rows:
        print(f"{label.ljust(label_width)}  {100 * acc:8.2f}  {'+' if uses_subj else '-':>6}")
    return EXIT_OK


def _verify_manifest(report_path: Path) -> int:
    """Re-hash the datasets named by the sibling manifest, if they still exist."""
    manifest_path = report_path.with_name(
        report_path.name.replace(".report.json", ".manifest.json")
    )
    if not manifest_path.is_file():
        return EXIT_OK
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        datasets = manifest.get("datasets", {})
    except json.JSONDecodeError as exc:
        print(f"corrupted manifest {manifest_path}: {exc}", file=sys.stderr)
        return EXIT_RESULTS
    for name, entry in datasets.items():
        path = Path(entry["path"])
        if not path.exists():
            continue
        actual = _sha256_tree(path) if path.is_dir() else _sha256_file(path)
        if actual != entry["sha256"]:
            print(
                f"{manifest_path}: dataset {name!r} at {path} changed since the run "
                f"(hash {actual[:12]}… != recorded {entry['sha256'][:12]}…)",
                file=sys.stderr,
            )
            return EXIT_RESULTS
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posnb",
        description="Position-weighted naive Bayes sentiment polarity experiments",
    )
    parser.add_argument("--version", action="version", version=f"posnb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_dataset_flags(p):
        p.add_argument("--polarity", metavar="DIR", help="review corpus root (pos/ and neg/)")
        p.add_argument("--subj", metavar="FILE", help="subjective sentences, one per line")
        p.add_argument("--obj", metavar="FILE", help="objective sentences, one per line")

    def add_run_flags(p):
        p.add_argument("--config", required=True, help="config JSON path or bundled name")
        p.add_argument("--threads", type=int, default=os.cpu_count(),
                       help="worker threads (speed only, never results)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p_validate = sub.add_parser("validate", help="check dataset layout and counts")
    add_dataset_flags(p_validate)
    p_validate.add_argument("--allow-custom", action="store_true",
                            help="accept non-standard corpus sizes")
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="run the experiment described by a config")
    add_dataset_flags(p_run)
    add_run_flags(p_run)
    p_run.add_argument("--out", default="results", metavar="DIR")
    p_run.add_argument("--traces", action="store_true",
                       help="write per-sentence subjectivity traces (TSV)")
    p_run.set_defaults(func=cmd_run)

    p_tune = sub.add_parser("tune", help="run with nested q tuning (default grid if unset)")
    add_dataset_flags(p_tune)
    add_run_flags(p_tune)
    p_tune.add_argument("--out", default="results", metavar="DIR")
    p_tune.add_argument("--traces", action="store_true")
    p_tune.set_defaults(func=cmd_tune)

    p_sweep = sub.add_parser("sweep", help="cross-validate over a range of q values")
    add_dataset_flags(p_sweep)
    add_run_flags(p_sweep)
    p_sweep.add_argument("--from", dest="from_q", type=float, required=True)
    p_sweep.add_argument("--to", dest="to_q", type=float, required=True)
    p_sweep.add_argument("--step", type=float, required=True)
    p_sweep.add_argument("--out", default="sweep.csv", metavar="CSV")
    p_sweep.set_defaults(func=cmd_sweep)

    p_report = sub.add_parser("report", help="tabulate report JSONs in a directory")
    p_report.add_argument("results_dir")
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CorpusError as exc:
        # validate treats layout problems as configuration
        code = EXIT_CONFIG if args.command == "validate" else EXIT_DATA
        print(f"dataset error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
