"""
Command-line entry point: verify a candidate, run a search, or diff the golden tables.
"""
import argparse
import json
from pathlib import Path
import sys
import time

from .pipeline import verify
from .report import (GOLDEN_TABLES, TABLE5_COLUMNS, parse_candidate, report_text,
                     report_to_record, rows_to_csv, rows_to_markdown, run_golden,
                     table5_row, table_row)
from .search import SearchConfig, generate_kodaira2_family, run_search, worker_count


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_verify(args):
    try:
        text = Path(args.file).read_text(encoding="utf-8")
        f, bweights, annotation = parse_candidate(text)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: cannot read candidate {args.file}: {exc}", file=sys.stderr)
        return 2
    rep = verify(f, bweights, annotation, depth=args.depth)
    if args.json:
        print(json.dumps(report_to_record(rep), indent=2, sort_keys=True))
    else:
        print(report_text(rep))
    return 0 if rep.certified else 1


def _write(path, text):
    path.write_text(text, encoding="utf-8")


def _kodaira2_template(data, out):
    pairs = data.get("pairs", [[1, 1]])
    third = data.get("third", 4)
    r_max = data.get("r_max", 60)
    rows = []
    for a, b in pairs:
        fam = generate_kodaira2_family(a, b, third, r_max)
        rows.append(table5_row(fam))
    with open(out / "results.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    _write(out / "rejections.log", "")
    _write(out / "table.csv", rows_to_csv(rows, TABLE5_COLUMNS))
    _write(out / "table.md", rows_to_markdown(rows, TABLE5_COLUMNS))
    return len(rows)


def cmd_search(args):
    try:
        data = _load_json(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if data.get("template") == "kodaira2":
            n = _kodaira2_template(data, out)
            print(f"{n} parametric rows written to {out}")
            return 0
        cfg = SearchConfig.from_dict(data)
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    workers = args.workers if args.workers is not None else worker_count()
    start = time.time()
    rejections = []
    reports = run_search(cfg, workers=workers, rejections=rejections)
    try:
        with open(out / "results.jsonl", "w", encoding="utf-8") as fh:
            for rep in reports:
                fh.write(json.dumps(report_to_record(rep), sort_keys=True) + "\n")
        _write(out / "rejections.log", "".join(line + "\n" for line in rejections))
        rows = [table_row(rep) for rep in reports]
        _write(out / "table.csv", rows_to_csv(rows))
        _write(out / "table.md", rows_to_markdown(rows))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{len(reports)} families, {len(rejections)} rejections, "
          f"{time.time() - start:.1f} s with {workers} worker(s)")
    return 0


def cmd_golden(args):
    directory = Path(args.dir)
    tables = args.tables or GOLDEN_TABLES
    missing = [t for t in tables if not (directory / f"table{t}.csv").exists()]
    if missing:
        print(f"error: missing golden files for tables {missing} in {directory}", file=sys.stderr)
        return 2
    results = run_golden(directory, tables)
    n = 0
    for res in results:
        for d in res.diffs:
            print(d)
            n += 1
        rep = res.report
        if args.verbose and res.table != 5 and not rep.certified:
            print(f"note: table {res.table} no. {res.no}: {rep.status} ({rep.reason})")
    print(f"{len(results)} rows, {n} diffs")
    return 0 if n == 0 else 1


def build_parser():
    p = argparse.ArgumentParser(prog="minwci", description=__doc__.strip())
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify one candidate file")
    v.add_argument("file")
    v.add_argument("--depth", type=int, default=2)
    v.add_argument("--json", action="store_true", help="print the report as JSON")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="run a search from a JSON config")
    s.add_argument("config")
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_search)

    g = sub.add_parser("golden", help="recompute the golden tables and print diffs")
    g.add_argument("dir")
    g.add_argument("--tables", type=int, nargs="*", choices=GOLDEN_TABLES)
    g.add_argument("-v", "--verbose", action="store_true")
    g.set_defaults(func=cmd_golden)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
