"""
Weighted projective spaces and cyclic quotient singularities.

A cyclic quotient type 1/r(a_1,...,a_n) is stored as its order r and the
residues a_i mod r. Two presentations describe the same singularity when one
is a unit multiple of a permutation of the other; `normalize_quotient` picks a
canonical representative so that equality of types is decidable.
"""
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
import re


def gcd_all(values):
    """gcd of an iterable of integers (0 for an empty iterable)."""
    return reduce(gcd, values, 0)


def units(r):
    """Units of Z/r in increasing order."""
    if r == 1:
        return [0]
    return [m for m in range(1, r) if gcd(m, r) == 1]


@dataclass(frozen=True)
class WeightedSpace:
    weights: tuple

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        if len(w) < 2:
            raise ValueError("a weighted projective space needs at least two weights")
        if min(w) < 1:
            raise ValueError(f"weights must be positive, got {w}")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return len(self.weights) - 1

    @property
    def well_formed(self):
        return is_well_formed_space(self)

    def __str__(self):
        return "P(" + ",".join(map(str, self.weights)) + ")"


def _as_weights(space):
    return space.weights if isinstance(space, WeightedSpace) else tuple(space)


def is_well_formed_space(space):
    """True iff every N of the N+1 weights are coprime."""
    w = _as_weights(space)
    return all(gcd_all(w[:i] + w[i + 1:]) == 1 for i in range(len(w)))


def singular_strata(space, max_dim):
    """
    Coordinate strata of P with nontrivial generic stabilizer.

    Returns (J, e) for every index set J with |J| - 1 <= max_dim and
    e = gcd(a_j : j in J) > 1, sorted by |J| and then lexicographically.
    """
    w = _as_weights(space)
    if max_dim > len(w) - 1:
        raise ValueError("max_dim exceeds the dimension of the space")
    out = []
    for size in range(1, max_dim + 2):
        for J in combinations(range(len(w)), size):
            e = gcd_all(w[j] for j in J)
            if e > 1:
                out.append((J, e))
    return out


class RejectNonSmallAction(ValueError):
    """The group contains a pseudo-reflection, so the type is not reduced."""


class SingClass(IntEnum):
    # ordered by severity so that max() picks the worst
    SMOOTH = 0
    TERMINAL = 1
    CANONICAL = 2
    NON_CANONICAL = 3

    @property
    def label(self):
        return {0: "Smooth", 1: "Terminal", 2: "CanonicalNonTerminal", 3: "NonCanonical"}[self.value]


_TYPE_RE = re.compile(r"^\s*1\s*/\s*(\d+)\s*\(([-\d\s,]*)\)\s*$")


@dataclass(frozen=True)
class CyclicQuotient:
    r: int
    residues: tuple

    def __post_init__(self):
        r = int(self.r)
        if r < 1:
            raise ValueError("order must be positive")
        res = tuple(int(a) % r for a in self.residues)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "residues", res)

    @classmethod
    def parse(cls, text):
        """Parse '1/13(3,4,5)'."""
        m = _TYPE_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse quotient type {text!r}")
        return cls(int(m.group(1)), tuple(int(x) for x in m.group(2).split(",")))

    @property
    def dim(self):
        return len(self.residues)

    @property
    def is_small(self):
        res = self.residues
        return all(gcd_all((self.r,) + res[:i] + res[i + 1:]) == 1 for i in range(len(res)))

    @property
    def is_isolated(self):
        return all(gcd(a, self.r) == 1 for a in self.residues)

    def times(self, m):
        return CyclicQuotient(self.r, tuple(m * a for a in self.residues))

    def __str__(self):
        return f"1/{self.r}(" + ",".join(map(str, self.residues)) + ")"


def normalize_quotient(q):
    """Canonical representative of q up to unit multiples and permutations."""
    if q.r == 1:
        return CyclicQuotient(1, (0,) * q.dim)
    if not q.is_small:
        raise RejectNonSmallAction(f"{q} contains a reflection")
    best = min(tuple(sorted(m * a % q.r for a in q.residues)) for m in units(q.r))
    return CyclicQuotient(q.r, best)


def remove_reflections(q):
    """
    Quotient out pseudo-reflections so that the remaining action is small.

    If the subgroup of order g fixes every coordinate but x_i, replacing x_i
    by x_i^g leaves 1/(r/g)(a_1/g, ..., a_i, ..., a_n/g).
    """
    r, res = q.r, list(q.residues)
    g0 = gcd_all([r] + res)
    if g0 > 1:
        # the action is not faithful; pass to the effective quotient
        r //= g0
        res = [a // g0 for a in res]
    changed = True
    while changed and r > 1:
        changed = False
        for i in range(len(res)):
            g = gcd_all([r] + res[:i] + res[i + 1:])
            if g > 1:
                res = [a if j == i else a // g for j, a in enumerate(res)]
                r //= g
                changed = True
                break
    return CyclicQuotient(r, tuple(res))


def reid_tai_sum(q, k):
    """Sum of the fractional parts {k a_i / r}."""
    return sum((Fraction(k * a % q.r, q.r) for a in q.residues), Fraction(0))


def _age_numerators(q):
    # r times the Reid-Tai sum, for k = 1..r-1; exact and cheaper than Fractions
    r, res = q.r, q.residues
    return [sum(k * a % r for a in res) for k in range(1, r)]


def classify_quotient(q):
    if q.r == 1:
        return SingClass.SMOOTH
    low = min(_age_numerators(q))
    if low > q.r:
        return SingClass.TERMINAL
    if low == q.r:
        return SingClass.CANONICAL
    return SingClass.NON_CANONICAL


def crepant_multipliers(q):
    """The k in [1, r-1] whose Reid-Tai sum equals exactly 1."""
    return [k for k, s in enumerate(_age_numerators(q), start=1) if s == q.r]


def is_three_fold_terminal_form(q):
    """
    Return (b, r) with q equivalent to 1/r(1,-1,b) and b <= r/2, or None.

    Only terminal types of dimension three have such a form.
    """
    if q.dim != 3:
        raise ValueError("terminal form is defined for 3-dimensional types")
    if q.r == 1 or not q.is_small or classify_quotient(q) != SingClass.TERMINAL:
        return None
    r = q.r
    for m in units(r):
        res = [m * a % r for a in q.residues]
        for i in range(3):
            if res[i] != 1:
                continue
            rest = res[:i] + res[i + 1:]
            for j in range(2):
                if rest[j] == r - 1:
                    b = rest[1 - j]
                    return (min(b, r - b), r)
    return None
