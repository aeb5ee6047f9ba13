"""Command-line interface: corpus validation, analytics, and the service."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import analytics
from .corpus import parse_corpus, serialize_corpus
from .errors import XDialogError
from .protocol import default_protocol, load_protocol
from .synthesis import generate_corpus


def _read(path: str) -> str:
    return Path(path).read_text("utf-8")


def _load_protocol_arg(path: str | None):
    return load_protocol(_read(path)) if path else default_protocol()


def _report_to_csv(report: dict, out: Path) -> None:
    """Long-format rows: statistic, group, key, value. Plot-ready."""
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["statistic", "group", "key", "value"])
        for section in ("code_frequency", "mean_occurrence"):
            table = report.get(section, {})
            for group, rows in table.items():
                if group == "by_type":
                    for sub, sub_rows in rows.items():
                        for key, value in sub_rows.items():
                            writer.writerow([section, sub, key, value])
                else:
                    for key, value in rows.items():
                        writer.writerow([section, group, key, value])
        for code, groups in report.get("histograms", {}).items():
            for group, hist in groups.items():
                for bucket, count in hist["buckets"].items():
                    writer.writerow(["histogram", group, f"{code}:{bucket}", count])
                writer.writerow(["histogram_mode", group, code, hist["mode"]])
        endings = report.get("endings", {})
        for group, rows in endings.items():
            if group == "by_type":
                for sub, sub_rows in rows.items():
                    for key, value in sub_rows["final"].items():
                        writer.writerow(["endings", sub, key, value])
            else:
                for key, value in rows["final"].items():
                    writer.writerow(["endings", group, key, value])
        for key, value in report.get("transition_matrix", {}).items():
            writer.writerow(["transition", "ALL", key, value])


def cmd_validate_corpus(args) -> int:
    try:
        corpus = parse_corpus(_read(args.corpus), strict=args.strict)
    except XDialogError as exc:
        print(f"INVALID {exc.code}: {exc.message}")
        return 1
    counts = corpus.per_type_counts
    print(
        f"OK {corpus.corpus_id}: {len(corpus.transcripts)} transcripts, "
        f"{corpus.total_dialogs} dialogs {counts}"
    )
    for warning in corpus.warnings:
        print(f"warning: {warning}")
    if corpus.unassigned:
        print(f"unassigned utterances: {len(corpus.unassigned)}")
    return 0


def cmd_segment(args) -> int:
    corpus = parse_corpus(_read(args.corpus), strict=args.strict)
    for dialog in corpus.dialogs:
        lo, hi = dialog.span
        codes = " ".join(ev.code for ev in dialog.code_events)
        print(f"{dialog.key}\ttype={dialog.dialog_type}\tutterances {lo}..{hi}\t{codes}")
    for transcript_id, index in corpus.unassigned:
        print(f"{transcript_id}\tunassigned utterance {index}")
    return 0


def cmd_stats(args) -> int:
    corpus = parse_corpus(_read(args.corpus))
    protocol = _load_protocol_arg(args.protocol) if args.protocol else None
    report = analytics.build_report(corpus, protocol=protocol, by_type=args.by_type)
    if args.out:
        out = Path(args.out)
        if out.suffix == ".csv":
            _report_to_csv(report, out)
        else:
            out.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {out}")
    else:
        json.dump(report, sys.stdout, indent=2)
        print()
    return 0


def cmd_endings(args) -> int:
    corpus = parse_corpus(_read(args.corpus))
    table = analytics.ending_distribution(corpus, by_type=args.by_type)
    print(f"{'group':>6}  " + "  ".join(f"{cat:>22}" for cat in analytics.ENDING_CATEGORIES))
    print(f"{'ALL':>6}  " + "  ".join(f"{table.rows[cat]:>22}" for cat in analytics.ENDING_CATEGORIES))
    if args.by_type:
        for t in sorted(table.by_type):
            row = table.by_type[t]
            print(f"{t:>6}  " + "  ".join(f"{row[cat]:>22}" for cat in analytics.ENDING_CATEGORIES))
    return 0


def cmd_conformance(args) -> int:
    corpus = parse_corpus(_read(args.corpus))
    protocol = _load_protocol_arg(args.protocol)
    report = analytics.conformance(corpus, protocol)
    print(
        f"accepted {report.accepted}/{report.total} "
        f"(rate {analytics.format_ratio(report.acceptance_rate)}, "
        f"mean edit distance {analytics.format_ratio(report.mean_edit_distance)})"
    )
    for verdict in report.verdicts:
        if verdict.status.value != "ACCEPTED" or args.all:
            suffix = "" if verdict.exact else " (lower bound)"
            where = f" at move {verdict.index}" if verdict.index is not None else ""
            print(
                f"{verdict.key}\t{verdict.status.value}{where}\t"
                f"distance {verdict.edit_distance}{suffix}"
            )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    protocol = _load_protocol_arg(args.protocol)
    app = create_app({protocol.id: protocol}, data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_synth(args) -> int:
    corpus = generate_corpus(seed=args.seed)
    text = serialize_corpus(corpus)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({corpus.total_dialogs} dialogs)")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xdialog",
        description="Explanation-dialog protocol engine and corpus toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-corpus", help="parse and validate a corpus file")
    p.add_argument("corpus")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_validate_corpus)

    p = sub.add_parser("segment", help="list the dialogs of a corpus file")
    p.add_argument("corpus")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("stats", help="full analytics report (JSON or CSV)")
    p.add_argument("corpus")
    p.add_argument("--by-type", action="store_true")
    p.add_argument("--protocol", help="include conformance against a protocol file")
    p.add_argument("--out", help="write report to .json or .csv")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("endings", help="dialog-ending distribution")
    p.add_argument("corpus")
    p.add_argument("--by-type", action="store_true")
    p.set_defaults(func=cmd_endings)

    p = sub.add_parser("conformance", help="validate dialogs against a protocol")
    p.add_argument("corpus")
    p.add_argument("--protocol", help="protocol file (default: bundled)")
    p.add_argument("--all", action="store_true", help="list accepted dialogs too")
    p.set_defaults(func=cmd_conformance)

    p = sub.add_parser("serve", help="run the live session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--protocol", help="protocol file (default: bundled)")
    p.add_argument("--data-dir", help="directory for per-session event logs")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="regenerate the synthetic regression corpus")
    p.add_argument("--seed", type=int, default=2026)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except XDialogError as exc:
        print(f"error {exc.code}: {exc.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
