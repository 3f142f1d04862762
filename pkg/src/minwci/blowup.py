"""
Weighted blow-ups of cyclic quotient points in 3-folds.

Blowing up 1/r(e_1,...,e_n) with weight (e_1,...,e_n) gives an exceptional
divisor E = P(e_1,...,e_n), discrepancy (r - sum e)/r and n affine charts; the
i-th chart has the quotient type 1/e_i(-e_1, ..., r, ..., -e_n).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .wps import (CyclicQuotient, SingClass, classify_quotient, gcd_all,
                  is_well_formed_space, normalize_quotient, reid_tai_sum,
                  remove_reflections, units)


class WellFormednessError(ValueError):
    """The exceptional weighted projective space is not well-formed."""


class NonIsolatedNonCanonical(ValueError):
    """A non-canonical singular locus is a curve."""


class DepthExceeded(RuntimeError):
    """Chart points stay non-canonical beyond the depth cap."""


class InvalidWeight(ValueError):
    pass


@dataclass(frozen=True)
class BlowupStep:
    """
    Blow-up of a point with the weight 1/r(e_1,...,e_n).

    `center` is an opaque label (stratum or chart reference); `parent` and
    `chart` locate a second-level center on the chart of an earlier step.
    """
    weight: CyclicQuotient
    center: object = None
    level: int = 1
    parent: int = None
    chart: int = None

    def __post_init__(self):
        e, r = self.weight.residues, self.weight.r
        if min(e) < 1 or gcd_all(e) != 1 or sum(e) >= r:
            raise InvalidWeight(f"{self.weight} is not a valid blow-up weight")

    @property
    def r(self):
        return self.weight.r

    @property
    def e(self):
        return self.weight.residues

    @property
    def exceptional_well_formed(self):
        return is_well_formed_space(self.e)


@dataclass
class BlowupPlan:
    steps: list = field(default_factory=list)
    final: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def describe(self):
        levels = {}
        for s in self.steps:
            levels.setdefault(s.level, []).append(str(s.weight))
        return " / ".join(" ".join(levels[k]) for k in sorted(levels))


def chart_type(q, i):
    """Raw type of the i-th chart of the blow-up of q with weight q.residues."""
    e, r = q.residues, q.r
    res = tuple(r if j == i else -e[j] for j in range(len(e)))
    return CyclicQuotient(e[i], res)


def exceptional_charts(step, raw=False):
    """Normalized chart types, one per e_i > 1, in coordinate order."""
    q = step.weight if isinstance(step, BlowupStep) else step
    out = []
    for i, ei in enumerate(q.residues):
        if ei == 1:
            continue
        t = chart_type(q, i)
        out.append(t if raw else normalize_quotient(remove_reflections(t)))
    return out


def indexed_charts(q):
    """(coordinate index, raw chart type, normalized type) for every e_i > 1."""
    out = []
    for i, ei in enumerate(q.residues):
        if ei > 1:
            t = chart_type(q, i)
            out.append((i, t, normalize_quotient(remove_reflections(t))))
    return out


def discrepancy(step):
    q = step.weight if isinstance(step, BlowupStep) else step
    return Fraction(q.r - sum(q.residues), q.r)


def volume_correction(q):
    """(r - sum e)^3 / (r prod e), the drop of K^3 for one blow-up."""
    e = q.residues
    n = len(e)
    return Fraction((q.r - sum(e)) ** n, q.r * prod(e))


def volume_after(k_cube, steps):
    total = Fraction(k_cube)
    for s in steps:
        q = s.weight if isinstance(s, BlowupStep) else s
        if not is_well_formed_space(q.residues):
            raise WellFormednessError(f"P{q.residues} is not well-formed")
        total -= volume_correction(q)
    return total


def blowup_weights(q):
    """
    Valid blow-up weights for the non-canonical type q, by increasing sum.

    These are the unit multiples m*q whose Reid-Tai sum is below 1; the first
    one has the largest discrepancy. Residue order follows q.
    """
    out = []
    for m in units(q.r):
        if reid_tai_sum(q, m) >= 1:
            continue
        w = q.times(m)
        if min(w.residues) < 1 or gcd_all(w.residues) != 1:
            continue
        if w.residues not in [o.residues for o in out]:
            out.append(w)
    out.sort(key=lambda w: (sum(w.residues), w.residues))
    return out


def plan_blowups(report, depth=3, choose=None):
    """
    Blow up every non-canonical point, then every non-canonical chart point.

    `choose(q)` picks the weight for a type (default: smallest sum). The
    returned plan lists the steps and the singularities left afterwards:
    surviving loci of X (as SingularLocus objects) followed by chart types.
    """
    choose = choose or (lambda q: blowup_weights(q)[0])
    plan = BlowupPlan()
    for l in report.loci:
        if l.sing_class == SingClass.NON_CANONICAL and l.locus_dim > 0:
            raise NonIsolatedNonCanonical(f"non-canonical curve {l.quotient}")
    pending = []
    for l in report.loci:
        if l.sing_class == SingClass.NON_CANONICAL:
            for _ in range(l.count):
                pending.append((choose(l.quotient), l.stratum, 1, None, None))
        else:
            plan.final.append(l)
    while pending:
        w, center, level, parent, chart = pending.pop(0)
        if level > depth:
            raise DepthExceeded(f"still non-canonical after {depth} levels")
        plan.steps.append(BlowupStep(w, center, level, parent, chart))
        idx = len(plan.steps) - 1
        for i, raw, t in indexed_charts(w):
            if t.r > 1 and classify_quotient(t) == SingClass.NON_CANONICAL:
                if 0 in t.residues:
                    raise NonIsolatedNonCanonical(f"chart type {t} is non-isolated")
                pending.append((choose(t), ("chart", idx, i), level + 1, idx, i))
            elif t.r > 1:
                plan.final.append(t)
    return plan
