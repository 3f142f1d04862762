import csv
from pathlib import Path

import pytest

from minwci.nefcert import (NoPassingBranch, PositionMismatch,
                            check_criterion_I, check_criterion_II, check_criterion_III,
                            curve_irreducible, placements)
from minwci.pipeline import parse_bweights
from minwci.strata import stratify
from minwci.wci import WciFamily
from minwci.wps import CyclicQuotient, normalize_quotient

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "minwci" / "data" / "golden"


def q(text):
    return CyclicQuotient.parse(text)


def test_criterion_I_branch_b_first_row():
    f = WciFamily((3, 4, 5, 7, 8, 13), (20, 21))
    cert = check_criterion_I(f, q("1/13(3,4,5)"), (5,))
    assert cert.valid and cert.theorem == "I-branchB"
    assert all(c.slack == 0 for c in cert.conditions if c.slack is not None)
    rec = cert.to_record()
    assert rec["valid"] and rec["conditions"][0]["verdict"] == "pass"


def test_criterion_I_branch_a_with_k():
    f = WciFamily((6, 9, 11, 13, 14, 21), (39, 42))
    cert = check_criterion_I(f, q("1/11(5,2,3)"), (2,), k=3)
    assert cert.valid and cert.theorem == "I-branchA" and cert.k == 3
    with pytest.raises(ValueError):
        check_criterion_I(f, q("1/11(5,2,3)"), (2,), k=4)


def test_criterion_I_reducible_curve_fails():
    # both degree-28 monomials on P(6,8,11,13) contain x_6, so the curve splits
    f = WciFamily((2, 6, 7, 8, 11, 13), (24, 28))
    assert curve_irreducible((6, 8, 11, 13), (24, 28))[0] is False
    rep = stratify(f)
    (pt,) = rep.non_canonical
    with pytest.raises(NoPassingBranch):
        check_criterion_I(f, pt.quotient, pt.stratum)


def test_position_mismatch():
    with pytest.raises(PositionMismatch):
        check_criterion_I(WciFamily((3, 4, 5, 7, 8, 13), (20, 21)), q("1/13(1,1,1)"), (5,))


def test_placements_match_type():
    f = WciFamily((3, 4, 5, 7, 8, 13), (20, 21))
    ps = placements(f, (5,), q("1/13(3,4,5)"))
    assert ps and all(sorted(p.e) == [3, 4, 5] for p in ps)


def test_curve_irreducible_quasi_smooth():
    ok, tag = curve_irreducible((4, 7, 8, 13), (20, 21))
    assert ok and tag in ("quasi-smooth-curve", "pencil-test", "codim2-restriction")


def test_criterion_II_case2_three_points():
    f = WciFamily((1, 1, 5, 8, 12, 12), (20, 24))
    pts = [((3, 4, 5), q("1/4(1,1,1)")), ((4, 5), q("1/12(1,1,5)")), ((4, 5), q("1/12(1,1,5)"))]
    cert = check_criterion_II(f, pts)
    assert cert.valid and cert.theorem == "II-case2"


def test_criterion_II_case1_two_points():
    f = WciFamily((1, 1, 6, 9, 14), (37,))
    pts = [((3,), q("1/9(2,3,1)")), ((4,), q("1/14(1,6,1)"))]
    cert = check_criterion_II(f, pts)
    assert cert.valid and cert.theorem == "II-case1"
    with pytest.raises(NoPassingBranch):
        check_criterion_II(f, pts, case=2)


def test_criterion_III_two_step():
    f = WciFamily((1, 1, 5, 7, 17), (35,))
    cert = check_criterion_III(f, q("1/17(1,5,7)"), (4,), q("1/7(2,3,1)"))
    assert cert.valid and cert.theorem == "III"
    with pytest.raises(PositionMismatch):
        check_criterion_III(f, q("1/17(1,5,7)"), (4,), q("1/3(1,1,1)"))


def test_criterion_II_single_point_agrees_with_I():
    n = 0
    for table in (1, 2, 3):
        with open(GOLDEN / f"table{table}.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        for row in rows:
            levels = parse_bweights(row["bweights"])
            if len(levels) != 1 or len(levels[0]) != 1:
                continue
            w = levels[0][0]
            f = WciFamily(tuple(int(x) for x in row["weights"].strip("()").split(",")),
                          tuple(int(x) for x in row["degrees"].strip("()").split(",")))
            loci = [l for l in stratify(f).non_canonical if l.quotient == normalize_quotient(w)]
            if not loci:
                continue
            J = loci[0].stratum
            try:
                one = any(check_criterion_I(f, w, J, k=k).valid for k in (1, 2, 3))
            except PositionMismatch:
                one = False
            try:
                two = check_criterion_II(f, [(J, w)], case=2).valid
            except (PositionMismatch, NoPassingBranch):
                two = False
            assert one == two, (table, row["no"])
            n += 1
    assert n > 60
