"""
Nefness certificates for K_Y after weighted blow-ups of non-canonical points.

A point Q of X on the open part of a stratum P_J has local coordinates L: the
degrees that vanish on P_J each eliminate one coordinate k outside J (the form
contains x_J^m x_k), and what is left over is L. The linear space Pi of the
criteria is then P(J + eliminated), and the blow-up weight e is attached to L
through a unit m with e_p = m * a_{L_p} mod r.

Every inequality is stored as an exact record (lhs, rhs, slack, verdict).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import prod

from .blowup import chart_type
from .strata import intersection_dim
from .wci import monomials, quasi_smooth_cone, representable
from .wps import gcd_all, is_well_formed_space, units


class PositionMismatch(ValueError):
    """The point's local coordinates cannot be matched to ambient coordinates."""


class NoPassingBranch(ValueError):
    pass


class FirstStepNotCertified(ValueError):
    pass


@dataclass(frozen=True)
class Condition:
    cid: str
    verdict: bool
    lhs: object = None
    rhs: object = None
    relation: str = ">="

    @property
    def slack(self):
        if self.lhs is None:
            return None
        return Fraction(self.lhs) - Fraction(self.rhs)

    def to_record(self):
        fmt = lambda x: None if x is None else str(x)
        return {"condition": self.cid, "lhs": fmt(self.lhs), "rhs": fmt(self.rhs),
                "slack": fmt(self.slack), "verdict": "pass" if self.verdict else "fail"}


def _ge(cid, lhs, rhs):
    return Condition(cid, Fraction(lhs) >= Fraction(rhs), Fraction(lhs), Fraction(rhs), ">=")


def _eq(cid, lhs, rhs):
    return Condition(cid, Fraction(lhs) == Fraction(rhs), Fraction(lhs), Fraction(rhs), "==")


@dataclass
class NefCertificate:
    theorem: str
    conditions: list
    k: int = None
    irreducibility: str = None
    coordinates: tuple = ()
    notes: list = field(default_factory=list)

    @property
    def valid(self):
        return all(c.verdict for c in self.conditions)

    def __bool__(self):
        return self.valid

    def failed(self):
        return [c.cid for c in self.conditions if not c.verdict]

    def to_record(self):
        return {"theorem": self.theorem, "k": self.k, "irreducibility": self.irreducibility,
                "coordinates": list(self.coordinates), "valid": self.valid,
                "conditions": [c.to_record() for c in self.conditions]}


# -- placement of a point ----------------------------------------------------

@dataclass(frozen=True)
class Placement:
    """Stratum J, eliminated coordinates E and local coordinates L (ordered like e)."""
    J: tuple
    E: tuple
    L: tuple
    e: tuple
    r: int

    @property
    def pi(self):
        return tuple(sorted(self.J + self.E))

    @property
    def gap(self):
        return self.r - sum(self.e)


def eliminations(f, J):
    """All sets of coordinates that the vanishing forms can eliminate at a point of P_J."""
    wJ = [f.weights[j] for j in J]
    nonrep = [l for l, d in enumerate(f.degrees) if not representable(d, wJ)]
    options = []
    for l in nonrep:
        ks = [k for k in range(len(f.weights)) if k not in J
              and representable(f.degrees[l] - f.weights[k], wJ)]
        options.append(ks)
    found = set()

    def rec(i, used):
        if i == len(options):
            found.add(tuple(sorted(used)))
            return
        for k in options[i]:
            if k not in used:
                rec(i + 1, used + [k])

    rec(0, [])
    return sorted(found)


def placements(f, J, q):
    """
    Every way of reading the weight q = 1/r(e_1..e_n) as local coordinates at a point of P_J.

    The residues of q must be a unit multiple of the ambient weights of L, in
    the order of q; the order of J-weights' gcd must equal r.
    """
    r = q.r
    if gcd_all(f.weights[j] for j in J) != r:
        return []
    out = []
    seen = set()
    for E in eliminations(f, J):
        rest = [k for k in range(len(f.weights)) if k not in J and k not in E]
        if len(rest) != len(q.residues):
            continue
        for m in units(r):
            for perm in permutations(rest):
                if all(e % r == m * f.weights[k] % r for e, k in zip(q.residues, perm)):
                    key = (E, perm)
                    if key not in seen:
                        seen.add(key)
                        out.append(Placement(tuple(J), E, perm, q.residues, r))
    return out


def _finite(f, T):
    return intersection_dim(f, T) <= 0


# -- irreducibility of the test curve ------------------------------------------

def _reduce_linear(weights, degrees):
    """Eliminate coordinates that appear linearly in a form of the same degree."""
    w, d = list(weights), list(degrees)
    changed = True
    while changed:
        changed = False
        for l, dl in enumerate(d):
            if dl in w:
                w.remove(dl)
                d.pop(l)
                changed = True
                break
    return tuple(w), tuple(d)


def _contains_line(weights, degrees):
    for i, j in combinations(range(len(weights)), 2):
        if not any(representable(d, (weights[i], weights[j])) for d in degrees):
            return True
    return False


def _affine_rank(points):
    from .newton import _rank
    p0 = points[0]
    return _rank([tuple(a - b for a, b in zip(p, p0)) for p in points[1:]])


def _monomial_ok(weights, degree, min_rank):
    """Monomials exist, share no variable, and span an affine space of rank >= min_rank."""
    mons = monomials(list(weights), degree)
    if len(mons) < 2:
        return False
    if any(all(m[i] > 0 for m in mons) for i in range(len(weights))):
        return False
    rank = _affine_rank(mons)
    # two monomials without common factor give an irreducible pencil member
    return rank >= min_rank or len(mons) == 2


def curve_irreducible(weights, degrees):
    """
    Sufficient test for irreducibility of the general curve; (verdict, tag).

    A False verdict means no sufficient condition applied, not reducibility.
    """
    w, d = _reduce_linear(weights, degrees)
    if len(w) - len(d) != 2:
        return False, "unknown"
    if not d:
        return True, "linear"
    if quasi_smooth_cone(w, d) and not _contains_line(w, d):
        return True, "quasi-smooth-curve"
    if len(d) == 1 and is_well_formed_space(w):
        # not a pencil: the monomials are not all on one line
        if _monomial_ok(w, d[0], 2):
            return True, "pencil-test"
    if len(d) == 2 and is_well_formed_space(w):
        surfaces_ok = all(_monomial_ok(w, dl, 2) for dl in d)
        # the two base loci meet in finitely many points
        base_finite = not any(
            not representable(d[0], (w[i], w[j])) and not representable(d[1], (w[i], w[j]))
            for i, j in combinations(range(4), 2))
        if surfaces_ok and base_finite and any(_monomial_ok(w, dl, 3) for dl in d):
            return True, "codim2-restriction"
    return False, "unknown"


# -- criterion I -----------------------------------------------------------------

def _branch_a(f, p, k):
    a = f.alpha
    b = [f.weights[x] for x in p.L]
    pi_w = [f.weights[x] for x in p.pi]
    conds = []
    for j in range(len(p.e)):
        if j != k:
            conds.append(_ge(f"(1) j={j + 1}", a * p.e[j], b[j] * p.gap))
    conds.append(_ge("(2)", a * prod(f.degrees) * p.r * p.e[k], b[k] * prod(pi_w) * p.gap))
    ok, tag = curve_irreducible([b[k]] + pi_w, f.degrees)
    conds.append(Condition("(3) irreducible curve", ok))
    conds.append(Condition("(4) well-formed", is_well_formed_space(p.e)))
    return NefCertificate("I-branchA", conds, k + 1, tag, p.L + p.pi)


def _branch_b(f, p):
    b = [f.weights[x] for x in p.L]
    conds = [_ge(f"(1) j={j + 1}", f.alpha * p.e[j], b[j] * p.gap) for j in range(len(p.e))]
    conds.append(Condition("(2) finite", _finite(f, p.pi)))
    conds.append(Condition("(3) well-formed", is_well_formed_space(p.e)))
    return NefCertificate("I-branchB", conds, None, "finite-set", p.L + p.pi)


def _usable(f, J, q):
    out = [p for p in placements(f, J, q) if _finite(f, p.pi)]
    if not out:
        raise PositionMismatch(f"{q} does not match local coordinates on stratum {J}")
    return out


def check_criterion_I(f, q, stratum, k=None):
    """
    Branch B first, then branch A with k ascending, over all placements.

    With k given (1-based) only branch A for that k is tried and the best
    certificate is returned even if it fails.
    """
    if k is not None and not 1 <= k <= len(q.residues):
        raise ValueError(f"k must lie in 1..{len(q.residues)}")
    ps = _usable(f, stratum, q)
    if k is not None:
        certs = [_branch_a(f, p, k - 1) for p in ps]
        return next((c for c in certs if c.valid), certs[0])
    for p in ps:
        c = _branch_b(f, p)
        if c.valid:
            return c
    for kk in range(len(q.residues)):
        for p in ps:
            c = _branch_a(f, p, kk)
            if c.valid:
                return c
    raise NoPassingBranch(f"criterion I fails for {q} on {stratum}")


# -- criterion II ----------------------------------------------------------------

def _coord_weights(p):
    """Map coordinate index -> e for a placement."""
    return dict(zip(p.L, p.e))


def _case2(f, group, k):
    """group: placements with a common L (as a set); k is a coordinate index in L."""
    a = f.alpha
    L = group[0].L
    pi = group[0].pi
    conds = []
    total = Fraction(0)
    for u, p in enumerate(group):
        ew = _coord_weights(p)
        for x in L:
            if x != k:
                conds.append(_ge(f"(1) j={x} u={u + 1}", a * ew[x], f.weights[x] * p.gap))
        total += Fraction(p.gap, p.r * ew[k])
        conds.append(Condition(f"(4) well-formed u={u + 1}", is_well_formed_space(p.e)))
    pi_w = [f.weights[x] for x in pi]
    conds.append(_ge("(2)", Fraction(a * prod(f.degrees), f.weights[k] * prod(pi_w)), total))
    ok, tag = curve_irreducible([f.weights[k]] + pi_w, f.degrees)
    conds.append(Condition("(3) irreducible curve", ok))
    return NefCertificate("II-case2", conds, k, tag, tuple(L) + tuple(pi))


def _case2_term(p, k):
    return Fraction(p.gap, p.r * _coord_weights(p)[k])


def _case2_local_ok(f, p, k):
    """Conditions (1) and (4) of case 2 for one point."""
    ew = _coord_weights(p)
    return (all(f.alpha * ew[x] >= f.weights[x] * p.gap for x in p.L if x != k)
            and is_well_formed_space(p.e))


def _case1(f, group, C, ys):
    a = f.alpha
    conds = []
    total = Fraction(0)
    for t, (p, y) in enumerate(zip(group, ys)):
        ew = _coord_weights(p)
        for x in C:
            conds.append(_ge(f"(1) j={x} t={t + 1}", a * ew[x], f.weights[x] * p.gap))
        total += Fraction(p.gap, p.r * ew[y])
        conds.append(Condition(f"(4) well-formed t={t + 1}", is_well_formed_space(p.e)))
    rest = [x for x in range(len(f.weights)) if x not in C]
    rest_w = [f.weights[x] for x in rest]
    conds.append(_ge("(2)", Fraction(a * prod(f.degrees), prod(rest_w)), total))
    ok, tag = curve_irreducible(rest_w, f.degrees)
    conds.append(Condition("(3) irreducible curve", ok))
    return NefCertificate("II-case1", conds, None, tag, tuple(C) + tuple(ys))


def _case1_finite(f, C, y):
    T = [x for x in range(len(f.weights)) if x not in C and x != y]
    return _finite(f, T)


def check_criterion_II(f, points, case=None, k=None):
    """
    points: list of (stratum, weight). Case 2 (one common Pi) is tried before
    case 1 when `case` is None; k restricts case 2 to one coordinate index.
    """
    opts = [placements(f, J, q) for J, q in points]
    if any(not o for o in opts):
        raise PositionMismatch("some point has no matching local coordinates")
    best = None
    if case in (None, 2):
        common = set.intersection(*({frozenset(p.L) for p in o} for o in opts))
        for S in sorted(common, key=sorted):
            group = [[p for p in o if frozenset(p.L) == S] for o in opts]
            if not _finite(f, group[0][0].pi):
                continue
            for kk in sorted(S):
                if k is not None and kk != k:
                    continue
                # points only interact through the sum in (2), so each takes
                # its own passing placement with the smallest term
                chosen = [min(g, key=lambda p: (not _case2_local_ok(f, p, kk), _case2_term(p, kk)))
                          for g in group]
                c = _case2(f, chosen, kk)
                if c.valid:
                    return c
                best = best or c
    if case in (None, 1) and len(points) <= f.c + 2:
        n = len(points[0][1].residues)
        for combo in _product(opts):
            common = frozenset.intersection(*(frozenset(p.L) for p in combo))
            for C in combinations(sorted(common), n - 1):
                ys = [next(iter(set(p.L) - set(C))) for p in combo]
                if len(set(ys)) != len(ys) or len(ys) > f.c + 2:
                    continue
                if not all(_case1_finite(f, C, y) for y in ys):
                    continue
                c = _case1(f, list(combo), C, ys)
                if c.valid:
                    return c
                best = best or c
    if best is not None and k is not None:
        return best
    raise NoPassingBranch("criterion II fails")


def _product(opts):
    if not opts:
        yield ()
        return
    for p in opts[0]:
        for rest in _product(opts[1:]):
            yield (p,) + rest


# -- criterion III ---------------------------------------------------------------

def _second_weights(first_e, r, k, second):
    """Orderings (f on x_i, f on x_j, f on E) of the second weight for chart k."""
    raw = chart_type(_Q(r, first_e), k)
    if raw.r != second.r:
        return []
    out = []
    for m in units(raw.r):
        for perm in permutations(range(3)):
            if all(second.residues[i] % raw.r == m * raw.residues[perm[i]] % raw.r for i in range(3)):
                fmap = {perm[i]: second.residues[i] for i in range(3)}
                others = [j for j in range(3) if j != k]
                out.append((fmap[others[0]], fmap[others[1]], fmap[k]))
    return sorted(set(out))


def _Q(r, e):
    from .wps import CyclicQuotient
    return CyclicQuotient(r, tuple(e))


def check_criterion_III(f, q, stratum, second):
    """
    Two-step criterion: blow up q on the stratum, then the origin of its k-th
    chart with weight `second` (a CyclicQuotient), for each admissible k.
    """
    ps = _usable(f, stratum, q)
    best = None
    for k in range(3):
        fs = _second_weights(q.residues, q.r, k, second)
        if not fs:
            continue
        for p in ps:
            first = _branch_a(f, p, k)
            if not first.valid:
                best = best or NefCertificate("III", [Condition("criterion I with k", False)], k + 1)
                continue
            others = [j for j in range(3) if j != k]
            for fw in fs:
                c = _criterion_iii_conditions(f, p, k, others, fw, second.r)
                c.conditions[:0] = [Condition("I " + x.cid, x.verdict, x.lhs, x.rhs, x.relation)
                                    for x in first.conditions]
                c.notes.append(f"second weight on (x{others[0] + 1}, x{others[1] + 1}, E) = {fw}")
                if c.valid:
                    return c
                best = best or c
    if best is None:
        raise PositionMismatch(f"{second} is not a chart type of {q}")
    if not any(c.cid == "criterion I with k" for c in best.conditions):
        return best
    raise FirstStepNotCertified(f"criterion I with the chart index fails for {q}")


def _criterion_iii_conditions(f, p, k, others, fw, r2):
    a = f.alpha
    b = [f.weights[x] for x in p.L]
    gap2 = r2 - sum(fw)
    conds = []
    for idx, j in enumerate(others):
        conds.append(_eq(f"(1) j={j + 1}", a * p.e[j], b[j] * p.gap))
        conds.append(_ge(f"(2) j={j + 1}", a * fw[idx], b[j] * gap2))
    pi_w = [f.weights[x] for x in p.pi]
    lhs = (Fraction(a * prod(f.degrees), b[k] * prod(pi_w)) - Fraction(p.gap, p.r * p.e[k])
           - Fraction(gap2, r2 * fw[2]))
    conds.append(_ge("(3)", lhs, 0))
    conds.append(Condition("(4) well-formed", is_well_formed_space(fw)))
    ok, tag = curve_irreducible([b[k]] + pi_w, f.degrees)
    conds.append(Condition("curve irreducible", ok))
    return NefCertificate("III", conds, k + 1, tag, p.L + p.pi)
