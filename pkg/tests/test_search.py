import json
import random

import pytest

from minwci.pipeline import verify
from minwci.report import report_to_record
from minwci.search import (SearchConfig, blocks, conditions_hold, equivalent_conditions,
                           format_conditions, generate_kodaira2_family, infer_conditions,
                           parse_conditions, prefilter, run_search, weight_tuples, worker_count)
from minwci.wci import WciFamily, amplitude

SMALL = dict(alpha_min=1, alpha_max=3, degree_min=5, degree_max=14, codim_min=1, codim_max=2)


def dump(reports):
    return "\n".join(json.dumps(report_to_record(r), sort_keys=True) for r in reports)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(alpha_min=0)
    with pytest.raises(ValueError):
        SearchConfig(filters=["nonsense"])
    with pytest.raises(ValueError):
        SearchConfig(filters=["noether-band"])
    assert SearchConfig(alpha_min=4, alpha_max=2).empty
    assert SearchConfig.from_dict({"alpha_max": 3, "unknown": 1}).alpha_max == 3


def test_empty_config_gives_empty_output():
    cfg = SearchConfig(degree_min=50, degree_max=40)
    assert blocks(cfg) == []
    assert run_search(cfg, workers=1) == []


def test_weight_tuples_have_requested_amplitude():
    for alpha, w in weight_tuples((20, 21), range(1, 3), 6):
        assert amplitude(WciFamily(w, (20, 21))) == alpha
        assert list(w) == sorted(w)
    found = {w for _, w in weight_tuples((20, 21), range(1, 3), 6)}
    assert (3, 4, 5, 7, 8, 13) in found


def test_weight_cap():
    assert all(max(w) <= 9 for _, w in weight_tuples((20, 21), range(1, 3), 6, weight_max=9))


def test_prefilter():
    assert prefilter(WciFamily((3, 4, 5, 7, 8, 13), (20, 21))) is None
    assert prefilter(WciFamily((2, 2, 3, 4, 6), (21,))) == "step0-wellformed"
    assert prefilter(WciFamily((1, 1, 1, 2, 5), (8,))) == "step0-quasismooth"


def test_search_is_deterministic_across_workers():
    cfg = SearchConfig(**SMALL)
    rej1, rej2 = [], []
    one = run_search(cfg, workers=1, rejections=rej1)
    two = run_search(cfg, workers=2, rejections=rej2)
    assert one and dump(one) == dump(two)
    assert rej1 == rej2
    ids = [r.family.family_id for r in one]
    assert len(ids) == len(set(ids))
    assert all(r.certified for r in one)


def test_filters():
    cfg = SearchConfig(**SMALL, filters=["require-kodaira2"])
    assert all(r.kodaira == "kodaira-2" for r in run_search(cfg, workers=1))


def test_worker_env(monkeypatch):
    monkeypatch.setenv("MINWCI_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("MINWCI_WORKERS", "0")
    with pytest.raises(ValueError):
        worker_count()


def test_conditions_round_trip():
    text = "r > 5; mod(r,4) != 3; mod(r,3) != 0"
    lower, conds = parse_conditions(text)
    assert format_conditions(lower, conds) == text
    assert conditions_hold(lower, conds, 8) and not conditions_hold(lower, conds, 9)
    assert equivalent_conditions((lower, conds), parse_conditions("r > 5; mod(r,3) in {1,2}; mod(r,4) in {0,1,2}"))
    with pytest.raises(ValueError):
        parse_conditions("mod(r,4) = 1")


def test_infer_conditions_drops_redundant_moduli():
    rs = [r for r in range(4, 40) if r % 4 in (1, 2)]
    assert infer_conditions(rs, 3, 39, [4, 8]) == [(4, frozenset({1, 2}))]
    assert infer_conditions([5, 7], 3, 39, [4]) is None


def test_kodaira2_family_small():
    fam = generate_kodaira2_family(1, 1, 4, 30)
    assert fam.rs == [r for r in range(4, 31) if r % 4 in (1, 2)]
    assert all(s.identity == 0 for s in fam.survivors)
    assert all(s.certificate.valid for s in fam.survivors)
    assert fam.describe() == "r > 3; mod(r,4) in {1,2}"
    with pytest.raises(ValueError):
        generate_kodaira2_family(2, 4)


def test_soundness_spot_check():
    reps = run_search(SearchConfig(**SMALL), workers=1)
    sample = random.Random(11).sample(reps, min(20, len(reps)))
    for rep in sample:
        again = verify(rep.family, rep.bweights)
        assert again.certified
        assert json.dumps(report_to_record(again), sort_keys=True) == json.dumps(report_to_record(rep), sort_keys=True)
