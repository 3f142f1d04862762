"""
Single-candidate verification: well-formedness and quasi-smoothness, singular
locus, nefness certificate, blow-up charts, terminalization and invariants.

`verify` always returns a report; `status` is "certified" or names the first
step that rejected the candidate. Columns that do not depend on the failing
step are still filled in, which is what the golden comparison needs.
"""
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import re

from .blowup import (BlowupPlan, BlowupStep, InvalidWeight, WellFormednessError,
                     blowup_weights, indexed_charts, volume_after)
from .invariants import (DiscrepancyConditionFailed, IntegralityError,
                         NonCanonicalInput, NonCyclicCone, assemble_basket,
                         chi_and_genera, kodaira2_identity,
                         make_basket, noether_position, picard_number,
                         reid_plurigenus, terminalize)
from .nefcert import (FirstStepNotCertified, NoPassingBranch, PositionMismatch,
                      check_criterion_I, check_criterion_II, check_criterion_III)
from .strata import (CountMismatch, HypothesisViolation, NonIntegralCount,
                     UnsupportedStratum, stratify)
from .wci import (LinearConeError, ambient_k_cube, hilbert_coefficient,
                  is_quasi_smooth_general, is_well_formed)
from .wps import (CyclicQuotient, SingClass, classify_quotient,
                  normalize_quotient)


class Rejection(Exception):
    def __init__(self, step, reason):
        super().__init__(f"{step}: {reason}")
        self.step = step
        self.reason = reason


@dataclass
class MinimalModelReport:
    family: object
    status: str = "pending"
    reason: str = ""
    stratification: object = None
    plan: BlowupPlan = None
    certificate: object = None
    k_cube: Fraction = None
    vol: Fraction = None
    pg: int = None
    p2: int = None
    p2_sections: int = None
    p2_reid: int = None
    chi: int = None
    rho: int = None
    basket: list = None
    basket_source: str = None
    non_isolated: bool = False
    delta: Fraction = None
    noether: str = "n/a"
    kodaira: str = None
    final: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def certified(self):
        return self.status == "certified"

    @property
    def bweights(self):
        return self.plan.describe() if self.plan and self.plan.steps else ""


_WEIGHT_RE = re.compile(r"1/\d+\([\d,\s]+\)")


def parse_bweights(text):
    """'1/12(1,3,5) / 1/5(2,1,1)' -> [[first level], [second level]]."""
    levels = []
    for part in re.split(r"\s+/\s+", text.strip()):
        ws = [CyclicQuotient.parse(m) for m in _WEIGHT_RE.findall(part)]
        if not ws:
            raise ValueError(f"cannot parse B-weights {text!r}")
        levels.append(ws)
    return levels


def format_bweights(levels):
    return " / ".join(" ".join(str(w) for w in lv) for lv in levels)


def nc_points(report):
    """Non-canonical isolated points as (stratum, normalized type), with multiplicity."""
    out = []
    for l in report.non_canonical:
        if l.locus_dim > 0:
            raise Rejection("step1", f"non-canonical curve {l.quotient}")
        out.extend([(l.stratum, l.quotient)] * l.count)
    return out


def _match_points(points, weights):
    """Assign each printed first-level weight to a non-canonical point of that type."""
    free = list(points)
    out = []
    for w in weights:
        nw = normalize_quotient(w)
        idx = next((i for i, (_, q) in enumerate(free) if q == nw), None)
        if idx is None:
            raise Rejection("bweights", f"{w} is not a non-canonical point of X")
        out.append((free.pop(idx)[0], w))
    return out, free


def _certify(f, assigned, second):
    """Nefness certificate for first-level weights (and an optional second-level one)."""
    try:
        if second is not None:
            if len(assigned) != 1:
                raise Rejection("step2", "two-step plans need a single first center")
            (J, w), = assigned
            return check_criterion_III(f, w, J, second)
        if len(assigned) == 1:
            (J, w), = assigned
            return check_criterion_I(f, w, J)
        return check_criterion_II(f, assigned)
    except (NoPassingBranch, PositionMismatch, FirstStepNotCertified) as exc:
        raise Rejection("step2", str(exc))


def _reblown_chart(first, second):
    """Index of the chart of `first` whose origin is the second-level center."""
    target = normalize_quotient(second)
    for i, raw, t in indexed_charts(first):
        if t == target:
            return i
    raise Rejection("bweights", f"{second} is not a chart point of {first}")


def _build_plan(assigned, second):
    plan = BlowupPlan()
    for J, w in assigned:
        plan.steps.append(BlowupStep(w, J, 1))
    chart = None
    if second is not None:
        chart = _reblown_chart(assigned[0][1], second)
        plan.steps.append(BlowupStep(second, ("chart", 0, chart), 2, 0, chart))
    # every chart point except the one blown up again stays on the model
    for s in plan.steps:
        for i, raw, t in indexed_charts(s.weight):
            if s.level == 1 and i == chart:
                continue
            if t.r > 1:
                plan.final.append(t)
    return plan


def _leftover_loci(strat, used):
    """Loci of X after removing the blown-up points (as (type, dim, count))."""
    removed = Counter(normalize_quotient(w) for _, w in used)
    out = []
    for l in strat.loci:
        count = l.count
        if l.locus_dim == 0 and removed[l.quotient]:
            take = min(count, removed[l.quotient])
            removed[l.quotient] -= take
            count -= take
            if count == 0:
                continue
        out.append((l.quotient, l.locus_dim, count))
    return out


def _candidate_plans(points):
    """Weight choices for the non-canonical points, smallest total first.

    Points of the same type on the same stratum get the same weight.
    """
    keys = sorted({(J, q) for J, q in points}, key=lambda t: (t[0], str(t[1])))
    options = [blowup_weights(q) for _, q in keys]
    combos = list(product(*options))
    count = Counter((J, q) for J, q in points)
    combos.sort(key=lambda ws: sum(count[key] * sum(w.residues) for key, w in zip(keys, ws)))
    for ws in combos:
        choice = dict(zip(keys, ws))
        yield [(J, choice[(J, q)]) for J, q in points]


def verify(f, bweights=None, annotation=None, depth=2):
    """
    Run every construction step on the family f.

    bweights: printed plan as text or parsed levels; None searches weights.
    annotation: {"basket": [[b, r, mult], ...], "rho": int | None} used when
    the model has non-isolated canonical singularities.
    """
    rep = MinimalModelReport(f)
    try:
        _run(rep, f, bweights, annotation, depth)
        rep.status = "certified"
    except Rejection as exc:
        rep.status = f"rejected:{exc.step}"
        rep.reason = exc.reason
    return rep


def _run(rep, f, bweights, annotation, depth):
    # Step 0
    if f.alpha <= 0:
        raise Rejection("step0", "non-positive amplitude")
    if f.n != 3:
        raise Rejection("step0", "only 3-folds are supported")
    try:
        qs = is_quasi_smooth_general(f)
    except LinearConeError as exc:
        raise Rejection("step0", str(exc))
    if not is_well_formed(f):
        raise Rejection("step0", "not well-formed")
    if not qs:
        raise Rejection("step0", f"not quasi-smooth (subset {qs.failed})")
    rep.k_cube = ambient_k_cube(f)
    rep.pg = hilbert_coefficient(f, f.alpha)
    rep.chi = 1 - rep.pg
    # Step 1
    try:
        strat = stratify(f)
    except (HypothesisViolation, UnsupportedStratum, CountMismatch, NonIntegralCount) as exc:
        raise Rejection("step1", str(exc))
    rep.stratification = strat
    points = nc_points(strat)
    if bweights is not None:
        levels = parse_bweights(bweights) if isinstance(bweights, str) else bweights
        if len(levels) > depth:
            raise Rejection("step3", f"plan deeper than {depth}")
        second = levels[1][0] if len(levels) > 1 else None
        if len(levels) > 1 and len(levels[1]) != 1:
            raise Rejection("step3", "only one second-level center is supported")
        # volume and sections do not depend on the certificate
        steps = [w for lv in levels for w in lv]
        rep.vol = _volume(rep.k_cube, steps)
        _sections(rep, f, steps)
        rep.p2 = rep.p2_sections
        assigned, _ = _match_points(points, levels[0])
        failure = None
        try:
            cert = _certify(f, assigned, second)
        except Rejection as exc:
            cert, failure = None, exc
        _finish(rep, f, strat, assigned, second, cert, annotation)
        if failure is not None:
            raise failure
        return
    if not points:
        raise Rejection("step1", "no non-canonical point to blow up")
    last = Rejection("step2", "no admissible blow-up weight")
    for assigned in _candidate_plans(points):
        try:
            cert = _certify(f, assigned, None)
        except Rejection as exc:
            last = exc
            continue
        second = None
        pending = _nc_charts(assigned)
        if pending:
            if len(assigned) != 1 or len(pending) != 1 or depth < 2:
                last = Rejection("step3", "non-canonical chart point outside the two-step case")
                continue
            cert, second = _second_step(f, assigned[0], pending[0])
            if cert is None:
                last = Rejection("step3", "two-step criterion fails")
                continue
        steps = [w for _, w in assigned] + ([second] if second is not None else [])
        rep.vol = _volume(rep.k_cube, steps)
        _sections(rep, f, steps)
        try:
            _finish(rep, f, strat, assigned, second, cert, annotation)
            return
        except Rejection as exc:
            last = exc
    raise last


def _volume(k_cube, steps):
    try:
        return volume_after(k_cube, steps)
    except WellFormednessError as exc:
        raise Rejection("step2", str(exc))


def _sections(rep, f, steps):
    try:
        _, rep.p2_sections, _ = chi_and_genera(f, steps)
    except DiscrepancyConditionFailed:
        rep.p2_sections = None
        rep.notes.append("2 * sum(e) <= r for some step; P2 from the Reid formula")


def _nc_charts(assigned):
    out = []
    for _, w in assigned:
        for i, raw, t in indexed_charts(w):
            if t.r > 1 and classify_quotient(t) == SingClass.NON_CANONICAL:
                out.append((i, raw, t))
    return out


def _second_step(f, first, chart):
    J, w = first
    _, raw, t = chart
    if 0 in t.residues:
        return None, None
    for w2 in blowup_weights(t):
        try:
            cert = check_criterion_III(f, w, J, w2)
        except (PositionMismatch, FirstStepNotCertified):
            continue
        if cert.valid:
            return cert, w2
    return None, None


def _finish(rep, f, strat, assigned, second, cert, annotation):
    """Steps 3 and 4. A failed certificate is reported last so the columns get filled."""
    rep.certificate = cert
    try:
        plan = _build_plan(assigned, second)
    except InvalidWeight as exc:
        raise Rejection("step2", str(exc))
    rep.plan = plan
    final = []
    for q, dim, count in _leftover_loci(strat, assigned):
        final.extend([(q, dim)] * (count if dim == 0 else 1))
    final.extend((t, 1 if 0 in t.residues else 0) for t in plan.final)
    rep.final = [(str(q), dim) for q, dim in final]
    rep.non_isolated = any(dim > 0 for _, dim in final)
    rep.p2 = rep.p2_sections
    rep.kodaira = "kodaira-2" if rep.vol == 0 else "general-type"
    if rep.pg >= 1:
        rep.delta, rep.noether = noether_position(rep.vol, rep.pg)
    if rep.vol < 0:
        raise Rejection("step2", "negative volume")
    bad = [q for q, _ in final if classify_quotient(q) == SingClass.NON_CANONICAL]
    if bad:
        raise Rejection("step3", "non-canonical singularities remain: " + " ".join(map(str, bad)))
    _terminalize(rep, plan, final, annotation)
    if cert is not None and not cert.valid:
        raise Rejection("step2", "certificate fails: " + ", ".join(cert.failed()))


def _terminalize(rep, plan, final, annotation):
    if rep.non_isolated:
        if annotation:
            rep.basket = make_basket([(b, r) for b, r, m in annotation.get("basket", []) for _ in range(m)])
            rep.rho = annotation.get("rho")
            rep.basket_source = "annotated"
        return
    try:
        terminal, inc = terminalize([q for q, _ in final])
        rep.basket = assemble_basket(terminal)
    except (NonCanonicalInput, NonCyclicCone) as exc:
        raise Rejection("step4", str(exc))
    rep.basket_source = "computed"
    rep.rho = picard_number(len(plan.steps), inc)
    try:
        rep.p2_reid = reid_plurigenus(rep.vol, rep.chi, rep.basket, 2)
    except IntegralityError as exc:
        raise Rejection("step4", str(exc))
    if rep.p2 is None:
        rep.p2 = rep.p2_reid
    elif rep.p2 != rep.p2_reid:
        raise Rejection("step4", f"P2 by sections {rep.p2} but Reid formula {rep.p2_reid}")


def kodaira2_candidate(a, b, r):
    """Certificate data for X_{2r+2,2r+4} in P(a,b,4,r,r+1,r+2) blown up at 1/r(a,b,1)."""
    return kodaira2_identity(a, b, r)
