"""
Enumeration of candidate families and the Kodaira-dimension-2 family generator.

Weights are generated in decreasing order for each degree tuple. A weight a
that divides no degree needs, for every degree d, a partner weight of the form
d - m*a (the monomial x^m * x_partner that keeps the vertex quasi-smooth);
branches whose pending partner sets can no longer be filled are cut early.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import gcd, lcm
import os
import re

from .blowup import exceptional_charts
from .invariants import kodaira2_identity
from .nefcert import NoPassingBranch, PositionMismatch, check_criterion_I
from .pipeline import verify
from .strata import stratify
from .wci import WciFamily, is_quasi_smooth_general, is_well_formed
from .wps import (CyclicQuotient, SingClass, classify_quotient,
                  is_well_formed_space, normalize_quotient)

WORKERS_ENV = "MINWCI_WORKERS"
FILTERS = ("require-general-type", "require-kodaira2", "noether-band")


@dataclass
class SearchConfig:
    alpha_min: int = 1
    alpha_max: int = 10
    degree_min: int = 5
    degree_max: int = 100
    codim_min: int = 1
    codim_max: int = 2
    weight_max: int = None
    depth: int = 2
    filters: list = field(default_factory=list)
    delta_bound: object = None

    def __post_init__(self):
        bounds = [self.alpha_min, self.alpha_max, self.degree_min, self.degree_max,
                  self.codim_min, self.codim_max, self.depth]
        if min(bounds) < 1:
            raise ValueError("all search bounds must be positive")
        if self.alpha_max > self.degree_max:
            raise ValueError("the alpha range must lie within the degree cap")
        if self.weight_max is not None and self.weight_max < 1:
            raise ValueError("the weight cap must be positive")
        for name in self.filters:
            if name not in FILTERS:
                raise ValueError(f"unknown filter {name!r}")
        if "noether-band" in self.filters and self.delta_bound is None:
            raise ValueError("the noether-band filter needs delta_bound")

    @property
    def empty(self):
        return (self.alpha_min > self.alpha_max or self.degree_min > self.degree_max
                or self.codim_min > self.codim_max)

    @classmethod
    def from_dict(cls, d):
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


# -- enumeration -----------------------------------------------------------------

def _partner_sets(degrees, a):
    """None if a divides some degree, else per degree the admissible partner weights."""
    if any(d % a == 0 for d in degrees):
        return None
    return [frozenset(d - m * a for m in range(1, d // a + 1) if d - m * a >= 1) for d in degrees]


def weight_tuples(degrees, alphas, n_weights, weight_max=None):
    """
    All weight multisets passing the vertex test, for amplitudes in `alphas`.

    Returns sorted (alpha, ascending weights) pairs.
    """
    dsum = sum(degrees)
    s_hi = dsum - min(alphas)
    s_lo = dsum - max(alphas)
    # a weight at least the largest degree is a linear cone or a bad vertex
    cap0 = min(max(degrees) - 1, s_hi - (n_weights - 1))
    if weight_max is not None:
        cap0 = min(cap0, weight_max)
    if cap0 < 1:
        return []
    info = [None] * (cap0 + 1)
    for a in range(1, cap0 + 1):
        info[a] = False if a in degrees else _partner_sets(degrees, a)
    out = []
    chosen = []

    def pending(cap, slots):
        # partner sets not yet met by the chosen weights, cut to values <= cap
        need = []
        for idx, a in enumerate(chosen):
            req = info[a]
            if req is None:
                continue
            for P in req:
                if any(chosen[j] in P for j in range(len(chosen)) if j != idx):
                    continue
                Q = [v for v in P if v <= cap]
                if slots == 0 or not Q:
                    return None
                need.append(Q)
        return need

    def rec(slots, rlo, rhi, cap):
        hi = min(cap, rhi - (slots - 1))
        lo = max(1, -(-rlo // slots))
        for a in range(hi, lo - 1, -1):
            if info[a] is False:
                continue
            chosen.append(a)
            need = pending(a, slots - 1)
            if need is not None:
                if slots == 1:
                    out.append(tuple(reversed(chosen)))
                else:
                    forced = {Q[0] for Q in need if len(Q) == 1}
                    if len(forced) <= slots - 1 and sum(forced) + (slots - 1 - len(forced)) <= rhi - a:
                        rec(slots - 1, rlo - a, rhi - a, a)
            chosen.pop()

    rec(n_weights, s_lo, s_hi, cap0)
    return sorted((dsum - sum(w), w) for w in out)


def degree_tuples(cfg, c):
    lo = max(cfg.degree_min, 2)
    return list(combinations_with_replacement(range(lo, cfg.degree_max + 1), c))


def blocks(cfg):
    """Independent work units: one per (codimension, degree tuple)."""
    if cfg.empty:
        return []
    out = []
    for c in range(cfg.codim_min, cfg.codim_max + 1):
        out.extend((c, d) for d in degree_tuples(cfg, c))
    return out


def prefilter(f):
    """Cheap necessary conditions; returns a rejection step id or None."""
    if not is_well_formed_space(f.weights):
        return "step0-wellformed"
    if not is_quasi_smooth_general(f, want_trace=False):
        return "step0-quasismooth"
    if not is_well_formed(f):
        return "step0-wellformed"
    return None


def _passes_filters(rep, cfg):
    if "require-general-type" in cfg.filters and rep.kodaira != "general-type":
        return False
    if "require-kodaira2" in cfg.filters and rep.kodaira != "kodaira-2":
        return False
    if "noether-band" in cfg.filters and (rep.delta is None or rep.delta > cfg.delta_bound):
        return False
    return True


def run_block(cfg, block):
    """Verify every candidate of one block; returns (reports, rejection lines)."""
    c, degrees = block
    alphas = range(cfg.alpha_min, cfg.alpha_max + 1)
    reports, rejections = [], []
    for alpha, weights in weight_tuples(degrees, alphas, c + 4, cfg.weight_max):
        f = WciFamily(weights, degrees)
        step = prefilter(f)
        if step is not None:
            rejections.append(f"{f.family_id}\t{step}")
            continue
        rep = verify(f, depth=cfg.depth)
        if not rep.certified:
            step = rep.status.split(":", 1)[1]
            rejections.append(f"{f.family_id}\t{step}\t{rep.reason}")
            continue
        if _passes_filters(rep, cfg):
            reports.append(rep)
        else:
            rejections.append(f"{f.family_id}\tfilter")
    return reports, rejections


def _run_block_args(args):
    return run_block(*args)


def worker_count(default=1):
    value = os.environ.get(WORKERS_ENV)
    if not value:
        return default
    n = int(value)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be positive")
    return n


def run_search(cfg, workers=None, rejections=None):
    """
    All certified reports, sorted by family id.

    Blocks may run in parallel; results are merged in block order and then
    sorted, so the output does not depend on the worker count. Rejection
    lines are appended to the `rejections` list when given.
    """
    workers = worker_count() if workers is None else workers
    work = [(cfg, b) for b in blocks(cfg)]
    if workers > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_block_args, work, chunksize=16))
    else:
        results = [run_block(*w) for w in work]
    out, seen = [], set()
    for reps, rej in results:
        for rep in reps:
            key = rep.family.family_id
            if key not in seen:
                seen.add(key)
                out.append(rep)
        if rejections is not None:
            rejections.extend(rej)
    out.sort(key=lambda r: _sort_key(r.family))
    if rejections is not None:
        rejections.sort()
    return out


def _sort_key(f):
    return (f.c, f.degrees, f.weights)


# -- Kodaira dimension 2 family ------------------------------------------------------

@dataclass
class KodairaSurvivor:
    r: int
    family: WciFamily
    identity: object
    certificate: object


@dataclass
class KodairaFamily:
    a: int
    b: int
    third: int
    r_max: int
    survivors: list
    conditions: list
    lower: int

    @property
    def rs(self):
        return [s.r for s in self.survivors]

    def describe(self):
        return format_conditions(self.lower, self.conditions)


def kodaira2_family(a, b, third, r):
    return WciFamily((a, b, third, r, r + 1, r + 2), (2 * r + 2, 2 * r + 4))


def _kodaira2_survives(a, b, third, r):
    f = kodaira2_family(a, b, third, r)
    try:
        if not is_well_formed(f) or not is_quasi_smooth_general(f, want_trace=False):
            return None
        rep = stratify(f)
    except ValueError:
        return None
    w = CyclicQuotient(r, (a, b, 1))
    nc = rep.non_canonical
    if len(nc) != 1 or nc[0].locus_dim != 0 or nc[0].count != 1 or nc[0].quotient != normalize_quotient(w):
        return None
    others = [l for l in rep.loci if l is not nc[0]]
    if any(l.locus_dim > 0 for l in others):
        return None
    charts = exceptional_charts(w)
    if any(0 in t.residues or classify_quotient(t) == SingClass.NON_CANONICAL for t in charts):
        return None
    try:
        cert = check_criterion_I(f, w, nc[0].stratum, k=3)
    except (PositionMismatch, NoPassingBranch):
        return None
    if not cert.valid:
        return None
    return KodairaSurvivor(r, f, kodaira2_identity(a, b, r), cert)


def residue_moduli(a, b, third):
    """Moduli tried for the conditions: the fixed weights above 2."""
    return sorted({m for m in (a, b, third) if m > 2})


def infer_conditions(rs, lower, r_max, moduli):
    """
    Residue classes explaining the survivors rs among lower < r <= r_max.

    Returns [(m, allowed residues)] with redundant moduli dropped (largest
    first), or None when no combination of the moduli explains rs.
    """
    target = set(rs)
    window = range(lower + 1, r_max + 1)
    conds = [(m, frozenset(r % m for r in rs)) for m in moduli]

    def selected(cs):
        return {r for r in window if all(r % m in allowed for m, allowed in cs)}

    if selected(conds) != target:
        return None
    for m in sorted(moduli, reverse=True):
        trial = [c for c in conds if c[0] != m]
        if selected(trial) == target:
            conds = trial
    conds = [c for c in conds if len(c[1]) < c[0]]
    return sorted(conds, key=lambda c: (c[0] != 4, c[0]))


def generate_kodaira2_family(a, b, third_weight=4, r_max=60):
    """
    Survivors of X_{2r+2,2r+4} in P(a,b,third,r,r+1,r+2) for a+b+2 <= r <= r_max.

    A survivor is well-formed and quasi-smooth, its only non-canonical point is
    1/r(a,b,1), every other singularity and every chart of that blow-up is an
    isolated canonical point, and the nefness certificate passes.
    """
    if gcd(a, b) != 1:
        raise ValueError("a and b must be coprime")
    lower = a + b + 1
    survivors = []
    for r in range(lower + 1, r_max + 1):
        s = _kodaira2_survives(a, b, third_weight, r)
        if s is not None:
            survivors.append(s)
    rs = [s.r for s in survivors]
    conds = infer_conditions(rs, lower, r_max, residue_moduli(a, b, third_weight)) if rs else []
    return KodairaFamily(a, b, third_weight, r_max, survivors, conds, lower)


# -- condition strings ------------------------------------------------------------------

_COND_RE = re.compile(r"mod\(r,(\d+)\)\s*(in|!=|=)\s*\{?([\d,\s]+)\}?$")


def parse_conditions(text):
    """'r > 5; mod(r,4) != 3' -> (5, [(4, allowed residues)])."""
    lower, conds = None, []
    for part in text.split(";"):
        part = part.strip()
        m = re.match(r"r\s*>\s*(\d+)$", part)
        if m:
            lower = int(m.group(1))
            continue
        m = _COND_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse condition {part!r}")
        mod, op = int(m.group(1)), m.group(2)
        vals = {int(x) % mod for x in m.group(3).split(",")}
        allowed = set(range(mod)) - vals if op == "!=" else vals
        conds.append((mod, frozenset(allowed)))
    if lower is None:
        raise ValueError(f"no lower bound in {text!r}")
    return lower, conds


def format_conditions(lower, conds):
    parts = [f"r > {lower}"]
    for m, allowed in conds:
        allowed = sorted(allowed)
        banned = sorted(set(range(m)) - set(allowed))
        if len(allowed) == 1:
            parts.append(f"mod(r,{m}) = {allowed[0]}")
        elif len(banned) == 1:
            parts.append(f"mod(r,{m}) != {banned[0]}")
        else:
            parts.append(f"mod(r,{m}) in {{" + ",".join(map(str, allowed)) + "}")
    return "; ".join(parts)


def conditions_hold(lower, conds, r):
    return r > lower and all(r % m in allowed for m, allowed in conds)


def equivalent_conditions(first, second):
    """Two (lower, conds) pairs select the same integers (checked over one full period)."""
    (l1, c1), (l2, c2) = first, second
    if l1 != l2:
        return False
    period = lcm(*([m for m, _ in c1] + [m for m, _ in c2] + [1]))
    return all(conditions_hold(l1, c1, r) == conditions_hold(l2, c2, r)
               for r in range(l1 + 1, l1 + 1 + period))
