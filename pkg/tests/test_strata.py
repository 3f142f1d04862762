import csv
from pathlib import Path

import pytest

from minwci.strata import (HypothesisViolation, UnsupportedStratum, _Analyzer, intersection_dim,
                           stratify, stratify_hypersurface)
from minwci.wci import WciFamily
from minwci.wps import CyclicQuotient, SingClass, normalize_quotient

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "minwci" / "data" / "golden"


def q(text):
    return normalize_quotient(CyclicQuotient.parse(text))


def loci_summary(rep):
    return sorted((l.stratum, l.locus_dim, l.count, str(l.quotient)) for l in rep.loci)


def test_edge_count_two_quarter_points():
    rep = stratify(WciFamily((3, 4, 5, 7, 8, 13), (20, 21)))
    edge = [l for l in rep.loci if l.stratum == (1, 4)]
    assert len(edge) == 1
    assert edge[0].count == 2 and edge[0].quotient == q("1/4(3,3,1)")
    vertices = {l.stratum: l.quotient for l in rep.loci if len(l.stratum) == 1}
    assert vertices == {(4,): q("1/8(3,7,5)"), (5,): q("1/13(3,4,5)")}
    assert [l.quotient for l in rep.non_canonical] == [q("1/13(3,4,5)")]


def test_face_count_four_third_points():
    rep = stratify(WciFamily((6, 9, 11, 13, 14, 21), (39, 42)))
    face = [l for l in rep.loci if l.stratum == (0, 1, 5)]
    assert len(face) == 1 and face[0].count == 4
    assert face[0].quotient == q("1/3(2,1,2)")
    an = _Analyzer(rep.family)
    assert an.closed_form((0, 1, 5)) == an.stacky_count((0, 1, 5)) == an.torus_count((0, 1, 5)) == 4
    got = {str(l.quotient): l.count for l in rep.loci}
    # transverse weights 6,11,13,14,21 mod 9 minus the residues of 39 and 42
    assert got[str(q("1/9(2,4,5)"))] == 1
    assert got[str(q("1/2(1,1,1)"))] == 1
    assert got[str(q("1/7(1,5,1)"))] == 1
    assert [l.quotient for l in rep.non_canonical] == [q("1/11(5,2,3)")]


def test_non_isolated_curve_reported():
    # P(1,1,6,9,14): the line through the 6- and 14-vertices carries a curve of 1/2 points
    rep = stratify(WciFamily((1, 1, 6, 9, 14), (37,)))
    assert rep.has_non_isolated_canonical
    curves = [l for l in rep.loci if l.locus_dim == 1]
    assert curves and all(0 in l.quotient.residues for l in curves)
    assert sorted(str(l.quotient) for l in rep.non_canonical) == sorted([str(q("1/9(2,3,1)")), str(q("1/14(1,1,6)"))])


def test_hypothesis_violation():
    with pytest.raises(HypothesisViolation):
        stratify_hypersurface(WciFamily((2, 4, 6, 3, 5), (30,)))


def test_intersection_dim():
    f = WciFamily((3, 4, 5, 7, 8, 13), (20, 21))
    assert intersection_dim(f, (0,)) == -1
    assert intersection_dim(f, (5,)) == 0
    assert intersection_dim(f, (1, 4)) == 0


def test_unsupported_dimension():
    with pytest.raises(UnsupportedStratum):
        stratify(WciFamily((1, 1, 1, 1, 1, 1, 1), (2, 2)))


@pytest.mark.parametrize("table", [1, 2, 3, 4])
def test_golden_rows_count_consistently(table):
    # the three counting methods are cross-checked inside stratify
    with open(GOLDEN / f"table{table}.csv", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            w = tuple(int(x) for x in row["weights"].strip("()").split(","))
            d = tuple(int(x) for x in row["degrees"].strip("()").split(","))
            rep = stratify(WciFamily(w, d))
            assert all(l.sing_class != SingClass.SMOOTH for l in rep.loci)
            assert all(l.count is None or l.count > 0 for l in rep.loci)
