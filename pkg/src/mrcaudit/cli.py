"""Command-line entry point tying the pipeline together.

Subcommands: ingest, sample, serve, validate, features, baseline,
agreement, report. Data goes to the output file or stdout; diagnostics go
to stderr. Exit codes: 0 success, 1 data error (the module error verbatim),
2 usage error. Every written output file gets a .manifest.json sidecar.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import adapters, cuebaseline, metrics, reports, sampling
from .entries import SchemaVersionError, dumps_line, read_entries, write_entries
from .features import entry_features, fact_global_indices, render_feature_table
from .manifest import TOOL_VERSION, build_manifest, write_manifest
from .records import AnnotationRecord, read_records, validate
from .taxonomy import taxonomy

DATA_ERRORS = (
    adapters.AdapterError,
    sampling.CapacityError,
    cuebaseline.DegenerateFitError,
    cuebaseline.ProtocolError,
    metrics.ProtocolError,
    SchemaVersionError,
    ValueError,
    KeyError,
    OSError,
)

TOKEN_FILE_ENV = "MRCAUDIT_TOKEN_FILE"


def _write_output(args, text: str, inputs: list[str], seed=None) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    Path(args.output).write_text(text, encoding="utf-8")
    flags = {k: v for k, v in vars(args).items() if k not in ("func", "output") and v is not None}
    manifest = build_manifest(args.command, flags, inputs, seed=seed)
    write_manifest(args.output, manifest)


def _load_records_map(path: str, annotator: str | None) -> dict[str, AnnotationRecord]:
    """Latest record per entry, optionally restricted to one annotator."""
    by_entry: dict[str, AnnotationRecord] = {}
    ambiguous: dict[str, set[str]] = {}
    for record in read_records(path):
        if annotator is not None and record.annotator_id != annotator:
            continue
        if record.entry_id in by_entry and by_entry[record.entry_id].annotator_id != record.annotator_id:
            ambiguous.setdefault(record.entry_id, set()).update(
                {by_entry[record.entry_id].annotator_id, record.annotator_id}
            )
        by_entry[record.entry_id] = record
    if ambiguous:
        names = sorted({a for annotators in ambiguous.values() for a in annotators})
        raise ValueError(
            f"{len(ambiguous)} entries have records from several annotators ({', '.join(names)}); "
            "pass --annotator to choose one"
        )
    return by_entry


def cmd_ingest(args) -> int:
    entries = adapters.load(args.dataset, args.input)
    if args.output in (None, "-"):
        write_entries(sys.stdout, entries)
    else:
        write_entries(args.output, entries)
        flags = {"dataset": adapters.canonical_dataset_tag(args.dataset), "input": args.input}
        write_manifest(args.output, build_manifest("ingest", flags, [args.input]))
    print(f"ingested {len(entries)} entries from {args.input}", file=sys.stderr)
    return 0


def cmd_sample(args) -> int:
    entries = read_entries(args.input)
    dataset = args.dataset
    if dataset is None:
        tags = sorted({e.dataset for e in entries})
        if len(tags) != 1:
            raise ValueError(f"input holds several datasets ({', '.join(tags)}); pass --dataset")
        dataset = tags[0]
    plan = sampling.SamplePlan(
        dataset=dataset, n=args.n, seed=args.seed, unique_paragraphs=args.unique_paragraphs
    )
    drawn = sampling.sample(entries, plan)
    if args.output in (None, "-"):
        write_entries(sys.stdout, drawn)
    else:
        write_entries(args.output, drawn)
        flags = {
            "dataset": dataset,
            "n": args.n,
            "seed": args.seed,
            "unique_paragraphs": args.unique_paragraphs,
            "input": args.input,
        }
        write_manifest(args.output, build_manifest("sample", flags, [args.input], seed=args.seed))
    print(f"sampled {len(drawn)} of {len(entries)} entries", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import Workbench, create_app

    entries = read_entries(args.entries)
    workbench = Workbench(entries, args.log)
    tokens = None
    token_file = os.environ.get(TOKEN_FILE_ENV)
    if token_file:
        raw = json.loads(Path(token_file).read_text(encoding="utf-8"))
        tokens = raw.get("tokens", raw)
        print(f"loaded {len(tokens)} annotator tokens", file=sys.stderr)
    app = create_app(workbench, tokens=tokens, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_validate(args) -> int:
    entries = {e.id: e for e in read_entries(args.entries)}
    records = read_records(args.records)
    results = []
    error_count = 0
    for record in records:
        entry = entries.get(record.entry_id)
        if entry is None:
            raise KeyError(f"record references unknown entry {record.entry_id!r}")
        result = validate(record, entry)
        error_count += len(result.errors)
        results.append((record, result))

    if args.format == "machine":
        lines = []
        for record, result in results:
            lines.append(
                dumps_line(
                    {
                        "entry_id": record.entry_id,
                        "annotator_id": record.annotator_id,
                        "ok": result.ok,
                        "errors": [
                            {"rule": f.rule, "message": f.message, "subject": f.subject} for f in result.errors
                        ],
                        "warnings": [
                            {"rule": f.rule, "message": f.message, "subject": f.subject} for f in result.warnings
                        ],
                    }
                )
            )
        text = "\n".join(lines) + "\n"
    else:
        lines = []
        for record, result in results:
            flag = "ok" if result.ok else "FAIL"
            lines.append(f"{record.entry_id}\t{record.annotator_id}\t{flag}")
            for finding in result.errors:
                lines.append(f"  error    {finding.rule}: {finding.message}")
            for finding in result.warnings:
                lines.append(f"  warning  {finding.rule}: {finding.message}")
        text = "\n".join(lines) + "\n"
    _write_output(args, text, [args.entries, args.records])
    print(f"validated {len(records)} records, {error_count} errors", file=sys.stderr)
    return 1 if error_count else 0


def _annotated_pairs(entries_path: str, records_path: str, annotator: str | None):
    entries = {e.id: e for e in read_entries(entries_path)}
    by_entry = _load_records_map(records_path, annotator)
    pairs = []
    for entry_id in sorted(by_entry):
        entry = entries.get(entry_id)
        if entry is None:
            raise KeyError(f"record references unknown entry {entry_id!r}")
        pairs.append((entry, by_entry[entry_id]))
    if not pairs:
        raise ValueError("no (entry, record) pairs found")
    return pairs


def cmd_features(args) -> int:
    pairs = _annotated_pairs(args.entries, args.records, args.annotator)
    rows = []
    for entry, record in pairs:
        facts = fact_global_indices(entry, record)
        for row in entry_features(entry, drop_stopwords=args.drop_stopwords):
            rows.append((row, row.global_index in facts))
    text = render_feature_table(rows)
    _write_output(args, text, [args.entries, args.records])
    print(f"extracted features for {len(rows)} sentences", file=sys.stderr)
    return 0


def _fit_config(args) -> cuebaseline.FitConfig:
    return cuebaseline.FitConfig(
        learning_rate=args.learning_rate,
        iterations=args.iterations,
        l2=args.l2,
        seed=args.seed,
        shuffle=not args.no_shuffle,
        balance_classes=args.balance_classes,
    )


def cmd_baseline(args) -> int:
    pairs = _annotated_pairs(args.entries, args.records, args.annotator)
    by_dataset: dict[str, list] = {}
    for entry, record in pairs:
        by_dataset.setdefault(entry.dataset, []).append((entry, record))
    config = _fit_config(args)
    scores = {
        dataset: cuebaseline.loo_evaluate(group, runs=args.runs, config=config)
        for dataset, group in sorted(by_dataset.items())
    }
    if args.format == "machine":
        payload = {
            dataset: {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "precision_half_width": s.precision_half_width,
                "recall_half_width": s.recall_half_width,
                "f1_half_width": s.f1_half_width,
                "runs": s.runs,
                "entries_evaluated": s.entries_evaluated,
                "entries_excluded": s.entries_excluded,
            }
            for dataset, s in scores.items()
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        width = max(len(d) for d in scores)
        lines = [f"{'dataset'.ljust(width)}  {'P':>11}  {'R':>11}  {'F1':>11}"]
        for dataset, s in scores.items():
            lines.append(
                f"{dataset.ljust(width)}  "
                f"{s.precision:.2f} ±{s.precision_half_width:.2f}  "
                f"{s.recall:.2f} ±{s.recall_half_width:.2f}  "
                f"{s.f1:.2f} ±{s.f1_half_width:.2f}"
            )
        text = "\n".join(lines) + "\n"
    _write_output(args, text, [args.entries, args.records], seed=args.seed)
    return 0


def cmd_agreement(args) -> int:
    entries = {e.id: e for e in read_entries(args.entries)}
    gold = read_records(args.gold)
    other = read_records(args.other)
    dataset_by_entry = {entry_id: entry.dataset for entry_id, entry in entries.items()}
    report = metrics.agreement(gold, other, dataset_by_entry)
    if args.format == "machine":
        payload = {
            "per_dataset": report.per_dataset,
            "micro_f1": report.micro_f1,
            "pairs": report.pairs,
            "skipped": report.skipped,
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        width = max(max(len(d) for d in report.per_dataset), len("micro average"))
        lines = [f"{'dataset'.ljust(width)}  F1"]
        for dataset, f1 in report.per_dataset.items():
            lines.append(f"{dataset.ljust(width)}  {f1:.2f}")
        lines.append(f"{'micro average'.ljust(width)}  {report.micro_f1:.2f}")
        text = "\n".join(lines) + "\n"
    _write_output(args, text, [args.entries, args.gold, args.other])
    return 0


def cmd_report(args) -> int:
    entries = {e.id: e for e in read_entries(args.entries)}
    by_entry = _load_records_map(args.records, args.annotator)
    grouped: dict[str, list[AnnotationRecord]] = {}
    for entry_id, record in by_entry.items():
        entry = entries.get(entry_id)
        if entry is None:
            raise KeyError(f"record references unknown entry {entry_id!r}")
        grouped.setdefault(entry.dataset, []).append(record)
    dataset_reports = [
        reports.aggregate(records, entries) for _, records in sorted(grouped.items())
    ]
    if args.format == "machine":
        payload = [reports.report_to_dict(r) for r in dataset_reports]
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        blocks = []
        for family in taxonomy().families():
            blocks.append(reports.render_family_table(dataset_reports, family))
        text = "\n".join(blocks)
    _write_output(args, text, [args.entries, args.records])
    if args.chart_data:
        series = reports.chart_series(dataset_reports)
        Path(args.chart_data).write_text(json.dumps(series, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        write_manifest(
            args.chart_data,
            build_manifest("report.chart", {"records": args.records}, [args.entries, args.records]),
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrcaudit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mrcaudit {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse an official dev-set file into canonical entries")
    p_ingest.add_argument("--dataset", required=True, choices=sorted(t.lower() for t in adapters.DATASET_TAGS))
    p_ingest.add_argument("--input", required=True)
    p_ingest.add_argument("--output", default=None, help="canonical entries file (default stdout)")
    p_ingest.set_defaults(func=cmd_ingest)

    p_sample = sub.add_parser("sample", help="draw a reproducible annotation sample")
    p_sample.add_argument("--input", required=True, help="canonical entries file")
    p_sample.add_argument("--dataset", default=None)
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--unique-paragraphs", action=argparse.BooleanOptionalAction, default=True)
    p_sample.add_argument("--output", default=None)
    p_sample.set_defaults(func=cmd_sample)

    p_serve = sub.add_parser("serve", help="start the annotation task service")
    p_serve.add_argument("--entries", required=True, help="sampled entries file")
    p_serve.add_argument("--log", required=True, help="append-only annotation log path")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8400)
    p_serve.add_argument("--ui-dir", default=None, help="serve a built UI from this directory")
    p_serve.set_defaults(func=cmd_serve)

    p_validate = sub.add_parser("validate", help="validate a record file against its entries")
    p_validate.add_argument("--entries", required=True)
    p_validate.add_argument("--records", required=True)
    p_validate.add_argument("--format", choices=("table", "machine"), default="table")
    p_validate.add_argument("--output", default=None)
    p_validate.set_defaults(func=cmd_validate)

    p_features = sub.add_parser("features", help="dump per-sentence overlap features")
    p_features.add_argument("--entries", required=True)
    p_features.add_argument("--records", required=True)
    p_features.add_argument("--annotator", default=None)
    p_features.add_argument("--drop-stopwords", action="store_true")
    p_features.add_argument("--output", default=None)
    p_features.set_defaults(func=cmd_features)

    p_baseline = sub.add_parser("baseline", help="leave-one-out cue-baseline evaluation")
    p_baseline.add_argument("--entries", required=True)
    p_baseline.add_argument("--records", required=True)
    p_baseline.add_argument("--annotator", default=None)
    p_baseline.add_argument("--runs", type=int, default=5)
    p_baseline.add_argument("--seed", type=int, default=0)
    p_baseline.add_argument("--learning-rate", type=float, default=0.1)
    p_baseline.add_argument("--iterations", type=int, default=2000)
    p_baseline.add_argument("--l2", type=float, default=1e-4)
    p_baseline.add_argument("--no-shuffle", action="store_true")
    p_baseline.add_argument("--balance-classes", action="store_true")
    p_baseline.add_argument("--format", choices=("table", "machine"), default="table")
    p_baseline.add_argument("--output", default=None)
    p_baseline.set_defaults(func=cmd_baseline)

    p_agreement = sub.add_parser("agreement", help="inter-annotator agreement report")
    p_agreement.add_argument("--entries", required=True)
    p_agreement.add_argument("--gold", required=True, help="first annotator's records (reference)")
    p_agreement.add_argument("--other", required=True, help="second annotator's records")
    p_agreement.add_argument("--format", choices=("table", "machine"), default="table")
    p_agreement.add_argument("--output", default=None)
    p_agreement.set_defaults(func=cmd_agreement)

    p_report = sub.add_parser("report", help="label-count aggregation tables")
    p_report.add_argument("--entries", required=True)
    p_report.add_argument("--records", required=True)
    p_report.add_argument("--annotator", default=None)
    p_report.add_argument("--chart-data", default=None, help="also write bar-chart data series here")
    p_report.add_argument("--format", choices=("table", "machine"), default="table")
    p_report.add_argument("--output", default=None)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DATA_ERRORS as exc:
        message = str(exc) if not isinstance(exc, KeyError) else exc.args[0]
        print(message, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
