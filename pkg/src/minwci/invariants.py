"""
Birational invariants of the minimal model: basket, Picard number, plurigenera
and the position relative to the Noether lines.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
import re

from .wci import hilbert_coefficient
from .wps import (CyclicQuotient, SingClass, classify_quotient,
                  crepant_multipliers, is_three_fold_terminal_form,
                  normalize_quotient)


class NonTerminalInput(ValueError):
    pass


class NonCanonicalInput(ValueError):
    pass


class NonIsolatedInput(ValueError):
    pass


class IntegralityError(ArithmeticError):
    pass


class DiscrepancyConditionFailed(ValueError):
    """Some step has 2 * sum(e) <= r, so P_2 is not read off from sections."""


class NonCyclicCone(ArithmeticError):
    pass


@dataclass(frozen=True, order=True)
class BasketEntry:
    r: int
    b: int
    multiplicity: int = 1

    def __post_init__(self):
        if self.r < 2 or not 0 < self.b <= self.r / 2 or self.multiplicity < 1:
            raise ValueError(f"invalid basket entry {self}")

    def __str__(self):
        body = f"({self.b},{self.r})"
        return body if self.multiplicity == 1 else f"{self.multiplicity}×{body}"


def make_basket(pairs):
    """Merge (b, r) pairs into sorted entries."""
    counts = Counter(pairs)
    return [BasketEntry(r, b, m) for (b, r), m in sorted(counts.items(), key=lambda t: (t[0][1], t[0][0]))]


def basket_pairs(basket):
    out = []
    for e in basket:
        out.extend([(e.b, e.r)] * e.multiplicity)
    return out


_ENTRY_RE = re.compile(r"(?:(\d+)\s*[×x*]\s*)?\((\d+)\s*,\s*(\d+)\)")


def parse_basket(text):
    """Parse '(1,3) 3×(1,4) (2,5)'; an empty string is the empty basket."""
    text = (text or "").strip()
    pairs = []
    pos = 0
    for m in _ENTRY_RE.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse basket {text!r}")
        pos = m.end()
        pairs.extend([(int(m.group(2)), int(m.group(3)))] * int(m.group(1) or 1))
    if text[pos:].strip():
        raise ValueError(f"cannot parse basket {text!r}")
    return make_basket(pairs)


def format_basket(basket):
    return " ".join(str(e) for e in basket)


def assemble_basket(final_sings):
    pairs = []
    for q in final_sings:
        if q.r == 1:
            continue
        form = is_three_fold_terminal_form(q) if q.dim == 3 else None
        if form is None:
            raise NonTerminalInput(f"{q} is not an isolated terminal 3-fold type")
        pairs.append(form)
    return make_basket(pairs)


# -- terminalization by crepant subdivision ----------------------------------

def _solve(cols, v):
    """Solve sum x_i cols[i] = v exactly (3x3)."""
    m = [[cols[j][i] for j in range(3)] + [v[i]] for i in range(3)]
    for c in range(3):
        p = next(i for i in range(c, 3) if m[i][c] != 0)
        m[c], m[p] = m[p], m[c]
        for i in range(3):
            if i != c and m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [m[i][3] / m[i][i] for i in range(3)]


def _det(cols):
    a, b, c = cols
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _frac(x):
    return x - (x.numerator // x.denominator)


def cone_quotient(cols, lattice_gens):
    """Cyclic type of the simplicial cone spanned by cols in the given lattice."""
    gens = [tuple(_frac(x) for x in _solve(cols, g)) for g in lattice_gens]
    group = {(Fraction(0),) * 3}
    frontier = list(group)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = tuple(_frac(a + b) for a, b in zip(x, g))
                if y not in group:
                    group.add(y)
                    new.append(y)
        frontier = new
    order = len(group)
    if order == 1:
        return CyclicQuotient(1, (0, 0, 0))
    for x in group:
        if max(a.denominator for a in x) == order:
            # an element of full order generates the group
            return CyclicQuotient(order, tuple(int(a * order) for a in x))
    raise NonCyclicCone(f"quotient group of order {order} is not cyclic")


def crepant_subdivision(q):
    """
    Star-subdivide the cone of q at every point with Reid-Tai sum exactly 1.

    Returns (types of the final cones with r > 1, number of added rays).
    """
    r = q.r
    unit = [tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3)]
    v = tuple(Fraction(a, r) for a in q.residues)
    gens = unit + [v]
    rays = [tuple(Fraction(k * a % r, r) for a in q.residues) for k in crepant_multipliers(q)]
    cones = [tuple(unit)]
    for p in rays:
        out = []
        for cone in cones:
            lam = _solve(cone, p)
            if min(lam) < 0:
                out.append(cone)
                continue
            for i in range(3):
                if lam[i] > 0:
                    out.append(tuple(p if j == i else cone[j] for j in range(3)))
        cones = out
    types = []
    for cone in cones:
        t = cone_quotient(cone, gens)
        if t.r > 1:
            types.append(t)
    return types, len(rays)


def terminalize(final_sings):
    """
    Terminal content and Picard increment of a multiset of isolated canonical types.

    Returns (terminal types, rho increment).
    """
    out, inc = [], 0
    for q in final_sings:
        if q.r == 1:
            continue
        if not q.is_isolated:
            raise NonIsolatedInput(f"{q} is not isolated")
        cls = classify_quotient(q)
        if cls == SingClass.NON_CANONICAL:
            raise NonCanonicalInput(f"{q} is not canonical")
        if cls == SingClass.TERMINAL:
            out.append(normalize_quotient(q))
            continue
        types, added = crepant_subdivision(q)
        for t in types:
            if classify_quotient(t) != SingClass.TERMINAL:
                raise NonCanonicalInput(f"subdivision of {q} left {t}")
            out.append(normalize_quotient(t))
        inc += added
    return out, inc


def picard_number(n_steps, rho_increment, has_non_isolated=False):
    if has_non_isolated:
        return None
    return 1 + n_steps + rho_increment


# -- plurigenera ---------------------------------------------------------------

def _l_point(b, r, n):
    if n <= 0:
        return -_l_point(b, r, 1 - n)
    total = Fraction(0)
    for k in range(1, n):
        bk = b * k % r
        total += Fraction(bk * (r - bk), 2 * r)
    return total


def l_value(basket, n):
    """Sum over basket points of l(Q, n)."""
    return sum((e.multiplicity * _l_point(e.b, e.r, n) for e in basket), Fraction(0))


def reid_plurigenus(vol, chi, basket, n):
    if n < 2:
        raise ValueError("the formula is stated for n >= 2")
    value = Fraction((2 * n - 1) * n * (n - 1), 12) * Fraction(vol) - (2 * n - 1) * chi + l_value(basket, n)
    if value.denominator != 1:
        raise IntegralityError(f"P_{n} = {value} is not an integer")
    return int(value)


def discrepancy_condition(steps):
    """True when 2 * sum(e) > r for every blow-up step."""
    for s in steps:
        q = getattr(s, "weight", s)
        if 2 * sum(q.residues) <= q.r:
            return False
    return True


def chi_and_genera(f, steps=()):
    """(p_g, P_2 from sections, chi)."""
    if f.alpha <= 0:
        raise ValueError("the amplitude must be positive")
    if not discrepancy_condition(steps):
        raise DiscrepancyConditionFailed("2 * sum(e) <= r for some step")
    pg = hilbert_coefficient(f, f.alpha)
    return pg, hilbert_coefficient(f, 2 * f.alpha), 1 - pg


def noether_position(vol, pg):
    """(Delta, tag): Delta is the distance above the first Noether line."""
    delta = Fraction(vol) - Fraction(4 * pg, 3) + Fraction(10, 3)
    if delta == 0:
        tag = "on-first"
    elif delta == Fraction(1, 6):
        tag = "on-second"
    elif delta == Fraction(1, 3):
        tag = "on-third"
    elif delta < 0:
        tag = "below"
    elif delta < Fraction(1, 3):
        tag = "between"
    else:
        tag = "above"
    return delta, tag


def kodaira2_identity(a, b, r):
    """K^3 after blowing up 1/r(a,b,1) on X_{2r+2,2r+4} in P(a,b,4,r,r+1,r+2)."""
    alpha = r - a - b - 1
    if alpha <= 0:
        raise ValueError("needs r > a + b + 1")
    ambient = Fraction((2 * r + 4) * (2 * r + 2) * alpha ** 3, 4 * a * b * r * (r + 1) * (r + 2))
    return ambient - Fraction(alpha ** 3, r * a * b)
