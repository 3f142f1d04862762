"""
Serialization of reports, summary tables and the golden comparison.
"""
import csv
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
import io
import json
from pathlib import Path

from .invariants import format_basket, parse_basket
from .pipeline import parse_bweights, verify
from .search import (conditions_hold, equivalent_conditions,
                     generate_kodaira2_family, parse_conditions)
from .wci import WciFamily
from .wps import normalize_quotient

GOLDEN_TABLES = (1, 2, 3, 4, 5)


def fmt_rational(x):
    if x is None:
        return ""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_tuple(values):
    values = tuple(values)
    return f"({values[0]})" if len(values) == 1 else "(" + ",".join(map(str, values)) + ")"


def parse_tuple(text):
    return tuple(int(x) for x in text.strip().strip("()").split(","))


def _fmt(value):
    return "" if value is None else str(value)


# -- reports ---------------------------------------------------------------------

def report_to_record(rep):
    cert = rep.certificate.to_record() if rep.certificate is not None else None
    loci = []
    if rep.stratification is not None:
        loci = [{"stratum": list(l.stratum), "dim": l.locus_dim, "count": l.count,
                 "type": str(l.quotient)} for l in rep.stratification.loci]
    return {
        "family": rep.family.family_id,
        "weights": list(rep.family.weights),
        "degrees": list(rep.family.degrees),
        "alpha": rep.family.alpha,
        "status": rep.status,
        "reason": rep.reason,
        "bweights": rep.bweights,
        "vol": fmt_rational(rep.vol),
        "pg": rep.pg,
        "p2": rep.p2,
        "p2_reid": rep.p2_reid,
        "chi": rep.chi,
        "rho": rep.rho,
        "basket": format_basket(rep.basket) if rep.basket is not None else None,
        "basket_source": rep.basket_source,
        "non_isolated": rep.non_isolated,
        "delta": fmt_rational(rep.delta) if rep.delta is not None else None,
        "noether": rep.noether,
        "kodaira": rep.kodaira,
        "singularities": loci,
        "final": [{"type": t, "dim": d} for t, d in rep.final],
        "certificate": cert,
        "notes": rep.notes,
    }


def report_text(rep):
    """Human-readable report with the certificate trace."""
    rec = report_to_record(rep)
    lines = [f"family        {rep.family.label()}",
             f"status        {rep.status}" + (f" ({rep.reason})" if rep.reason else "")]
    for l in rec["singularities"]:
        where = "curve" if l["dim"] else f"{l['count']} point(s)"
        lines.append(f"  locus     {l['type']} {where} on stratum {tuple(l['stratum'])}")
    if rep.bweights:
        lines.append(f"B-weights     {rep.bweights}")
    cert = rec["certificate"]
    if cert is not None:
        lines.append(f"certificate   {cert['theorem']} k={cert['k']} curve={cert['irreducibility']} "
                     f"valid={cert['valid']}")
        for c in cert["conditions"]:
            detail = f" {c['lhs']} vs {c['rhs']}, slack {c['slack']}" if c["slack"] is not None else ""
            lines.append(f"  {c['verdict']:<4} {c['condition']}{detail}")
    for key in ("vol", "pg", "p2", "p2_reid", "chi", "rho", "basket", "basket_source",
                "non_isolated", "delta", "noether", "kodaira"):
        lines.append(f"{key:<14}{_fmt(rec[key])}")
    for note in rep.notes:
        lines.append(f"note          {note}")
    return "\n".join(lines)


# -- candidate files -------------------------------------------------------------------

def parse_candidate(text):
    """JSON candidate: weights, degrees, optional bweights and annotation."""
    data = json.loads(text)
    f = WciFamily(tuple(data["weights"]), tuple(data["degrees"]))
    bweights = data.get("bweights")
    if bweights is not None:
        parse_bweights(bweights)
    return f, bweights, data.get("annotation")


def serialize_candidate(f, bweights=None, annotation=None):
    data = {"weights": list(f.weights), "degrees": list(f.degrees)}
    if bweights is not None:
        data["bweights"] = bweights
    if annotation is not None:
        data["annotation"] = annotation
    return json.dumps(data, sort_keys=True) + "\n"


# -- summary tables ---------------------------------------------------------------------

TABLE_COLUMNS = ("alpha", "degrees", "weights", "bweights", "vol", "p2", "pg", "chi", "rho",
                 "basket", "delta")


def table_row(rep):
    f = rep.family
    return {
        "alpha": str(f.alpha),
        "degrees": fmt_tuple(f.degrees),
        "weights": fmt_tuple(f.weights),
        "bweights": rep.bweights,
        "vol": fmt_rational(rep.vol),
        "p2": _fmt(rep.p2),
        "pg": _fmt(rep.pg),
        "chi": _fmt(rep.chi),
        "rho": _fmt(rep.rho),
        "basket": format_basket(rep.basket) if rep.basket is not None else "",
        "delta": fmt_rational(rep.delta),
    }


def rows_to_csv(rows, columns=TABLE_COLUMNS):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def rows_to_markdown(rows, columns=TABLE_COLUMNS):
    out = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for row in rows:
        out.append("| " + " | ".join(str(row.get(c, "")) for c in columns) + " |")
    return "\n".join(out) + "\n"


# -- golden comparison ---------------------------------------------------------------------

@dataclass(frozen=True)
class GoldenDiff:
    table: int
    no: str
    column: str
    expected: str
    got: str

    def __str__(self):
        return f"table {self.table} no. {self.no}: {self.column} expected {self.expected!r} got {self.got!r}"


def golden_dir():
    return resources.files("minwci") / "data" / "golden"


def load_table(directory, table):
    path = Path(directory) / f"table{table}.csv"
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_annotations(directory):
    path = Path(directory) / "annotations.json"
    if not path.exists():
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def golden_family(row):
    return WciFamily(parse_tuple(row["weights"]), parse_tuple(row["degrees"]))


def recompute_row(row, annotations):
    f = golden_family(row)
    return verify(f, row["bweights"], annotations.get(f.family_id))


def _centers_column(rep, row):
    """Printed first-level centers against the non-canonical points of X."""
    strat = rep.stratification
    if strat is None:
        return None
    got = sorted(str(l.quotient) for l in strat.non_canonical
                 for _ in range(l.count if l.locus_dim == 0 else 1))
    printed = parse_bweights(row["bweights"])[0]
    want = sorted(str(normalize_quotient(w)) for w in printed)
    return " ".join(want), " ".join(got)


def diff_row(table, row, rep, annotations):
    """Differences between one printed row and its recomputation."""
    got = {
        "alpha": str(rep.family.alpha),
        "vol": fmt_rational(rep.vol),
        "p2": _fmt(rep.p2),
        "chi": _fmt(rep.chi),
        "pg": _fmt(rep.pg),
        "rho": _fmt(rep.rho),
        "basket": format_basket(rep.basket) if rep.basket is not None else "",
        "delta": fmt_rational(rep.delta),
    }
    columns = {1: ("alpha", "vol", "p2", "chi", "rho", "basket"),
               2: ("alpha", "vol", "p2", "chi", "basket"),
               3: ("alpha", "vol", "p2", "pg", "rho", "basket", "delta"),
               4: ("alpha", "vol", "p2", "pg", "rho", "basket", "delta")}[table]
    diffs = []
    for col in columns:
        want = row[col].strip()
        if col == "rho" and want == "":
            continue
        have = got[col]
        if col == "basket":
            want = format_basket(parse_basket(want))
        elif col in ("vol", "delta") and want:
            want = fmt_rational(Fraction(want))
        if want != have:
            diffs.append(GoldenDiff(table, row["no"], col, want, have))
    centers = _centers_column(rep, row)
    if centers is not None and centers[0] != centers[1]:
        diffs.append(GoldenDiff(table, row["no"], "centers", centers[0], centers[1]))
    if table == 2 and not rep.non_isolated:
        diffs.append(GoldenDiff(table, row["no"], "non_isolated", "True", "False"))
    return diffs


def diff_table5_row(row, r_max=60):
    a, b, third = int(row["a"]), int(row["b"]), int(row["third"])
    fam = generate_kodaira2_family(a, b, third, r_max)
    printed = parse_conditions(row["conditions"])
    want = [r for r in range(a + b + 2, r_max + 1) if conditions_hold(*printed, r)]
    diffs = []
    if fam.rs != want:
        diffs.append(GoldenDiff(5, row["no"], "survivors", str(want), str(fam.rs)))
    if fam.conditions is None:
        diffs.append(GoldenDiff(5, row["no"], "conditions", row["conditions"], "unexplained"))
    elif not equivalent_conditions(printed, (fam.lower, fam.conditions)):
        diffs.append(GoldenDiff(5, row["no"], "conditions", row["conditions"], fam.describe()))
    bad = [s.r for s in fam.survivors if s.identity != 0]
    if bad:
        diffs.append(GoldenDiff(5, row["no"], "volume", "0", f"nonzero for r in {bad}"))
    return fam, diffs


@dataclass
class GoldenResult:
    table: int
    no: str
    report: object
    diffs: list


def run_golden(directory=None, tables=GOLDEN_TABLES):
    """Recompute every golden row; returns a list of GoldenResult."""
    directory = Path(directory) if directory is not None else golden_dir()
    annotations = load_annotations(directory)
    out = []
    for t in tables:
        for row in load_table(directory, t):
            if t == 5:
                fam, diffs = diff_table5_row(row)
                out.append(GoldenResult(t, row["no"], fam, diffs))
            else:
                rep = recompute_row(row, annotations)
                out.append(GoldenResult(t, row["no"], rep, diff_row(t, row, rep, annotations)))
    return out


def table5_row(fam):
    return {"a": fam.a, "b": fam.b, "third": fam.third,
            "weights": f"({fam.a},{fam.b},{fam.third},r,r+1,r+2)",
            "bweight": f"1/r({fam.a},{fam.b},1)", "conditions": fam.describe(),
            "survivors": " ".join(map(str, fam.rs))}


TABLE5_COLUMNS = ("a", "b", "third", "weights", "bweight", "conditions", "survivors")
