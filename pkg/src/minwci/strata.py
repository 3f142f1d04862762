"""
Singular loci of the general member of a quasi-smooth 3-fold family.

For a coordinate stratum P_S (coordinates outside S vanish), the forms whose
degree is representable by the S-weights restrict to general forms on P_S and
cut it properly; the other forms vanish identically on P_S and, by
quasi-smoothness, eliminate one transverse coordinate each. A point of X on
the open part of P_S therefore has type 1/e(residues of the transverse
weights, with one residue d_l mod e removed per vanishing form), where
e = gcd(a_S), plus a zero residue for each dimension of the stratum.

Point counts are computed three ways and must agree: the closed vertex/edge/
face formulas (c <= 2), the stacky-degree subtraction over substrata, and the
generic torus count from Newton polytopes.
"""
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, prod

from .newton import generic_solvable, open_stratum_count, stratum_supports
from .wci import representable
from .wps import (CyclicQuotient, SingClass, classify_quotient, gcd_all,
                  normalize_quotient, remove_reflections)


class HypothesisViolation(ValueError):
    """The gcd precondition of the closed-form stratification fails."""


class NonIntegralCount(ArithmeticError):
    """A point-count formula produced a non-integer."""


class CountMismatch(ArithmeticError):
    """Independent point counts disagree."""


class UnsupportedStratum(ValueError):
    """The stratum analysis cannot decide this case."""


@dataclass(frozen=True)
class SingularLocus:
    stratum: tuple
    locus_dim: int
    count: object
    quotient: CyclicQuotient
    raw: CyclicQuotient

    @property
    def sing_class(self):
        return classify_quotient(self.quotient)

    @property
    def e(self):
        return self.quotient.r

    def describe(self, weights):
        where = "P(" + ",".join(str(weights[j]) for j in self.stratum) + ")"
        if self.locus_dim == 0:
            return f"{self.count} x {self.quotient} on {where}"
        return f"curve of {self.quotient} along {where}"


@dataclass
class StratificationReport:
    family: object
    loci: list
    notes: list = field(default_factory=list)

    @property
    def worst(self):
        return max((l.sing_class for l in self.loci), default=SingClass.SMOOTH)

    @property
    def non_canonical(self):
        return [l for l in self.loci if l.sing_class == SingClass.NON_CANONICAL]

    @property
    def has_non_isolated_canonical(self):
        return any(l.locus_dim > 0 and l.sing_class <= SingClass.CANONICAL for l in self.loci)

    def points(self):
        """Isolated singular points with multiplicity, as (locus, copy index)."""
        out = []
        for l in self.loci:
            if l.locus_dim == 0:
                out.extend((l, i) for i in range(l.count))
        return out


class _Analyzer:
    """Per-family memo of stratum data; never shared between families."""

    def __init__(self, f):
        self.f = f
        self.w = f.weights
        self.d = f.degrees
        self._rep = {}
        self._open = {}

    def rep(self, S):
        if S not in self._rep:
            wS = [self.w[j] for j in S]
            self._rep[S] = tuple(l for l, d in enumerate(self.d) if representable(d, wS))
        return self._rep[S]

    def open_dim(self, S):
        """Dimension of X on the open torus of P_S, or -1 when empty."""
        if S in self._open:
            return self._open[S]
        reps = self.rep(S)
        dim = len(S) - 1 - len(reps)
        if dim < 0:
            res = -1
        elif not reps:
            res = dim
        else:
            sup = stratum_supports(self.w, [self.d[l] for l in reps], S)
            res = dim if generic_solvable(sup) else -1
        self._open[S] = res
        return res

    def closed_dim(self, S):
        return max(self.open_dim(T) for k in range(1, len(S) + 1) for T in combinations(S, k))

    def torus_count(self, S):
        return open_stratum_count(self.w, [self.d[l] for l in self.rep(S)], S)

    def stacky_count(self, S):
        """Points on the open part of P_S by degree minus substrata; None if not applicable."""
        if any(self.open_dim(T) > 0 for k in range(1, len(S)) for T in combinations(S, k)):
            return None
        reps = self.rep(S)
        if len(reps) != len(S) - 1:
            return None
        e = gcd_all(self.w[j] for j in S)
        total = Fraction(prod(self.d[l] for l in reps), prod(self.w[j] for j in S))
        for k in range(1, len(S)):
            for T in combinations(S, k):
                if self.open_dim(T) == 0:
                    total -= Fraction(self.torus_count(T), gcd_all(self.w[j] for j in T))
        count = e * total
        if count.denominator != 1:
            raise NonIntegralCount(f"stacky count {count} on stratum {S}")
        return int(count)

    def closed_form(self, S):
        """Vertex / edge floor / face N formulas for c <= 2."""
        f, w = self.f, self.w
        e = gcd_all(w[j] for j in S)
        reps = self.rep(S)
        if len(S) == 1:
            return 1 if not reps else 0
        if len(S) == 2 and len(reps) == 1:
            i, j = S
            return (e * self.d[reps[0]]) // (w[i] * w[j])
        if len(S) == 3 and len(reps) == 2 and f.c == 2:
            N = Fraction(e * self.d[0] * self.d[1], prod(w[j] for j in S))
            for t in S:
                if self.open_dim((t,)) == 0:
                    N -= Fraction(e, w[t])
            for p, q in combinations(S, 2):
                if self.open_dim((p, q)) == 0:
                    N -= Fraction(e * self.torus_count((p, q)), gcd(w[p], w[q]))
            if N.denominator != 1:
                raise NonIntegralCount(f"N formula gives {N} on stratum {S}")
            return int(N)
        return None

    def local_type(self, S):
        """Raw quotient type at a general point of X on the open part of P_S."""
        e = gcd_all(self.w[j] for j in S)
        reps = self.rep(S)
        transverse = Counter(self.w[k] % e for k in range(len(self.w)) if k not in S)
        for l in range(len(self.d)):
            if l in reps:
                continue
            res = self.d[l] % e
            if transverse[res] == 0:
                raise UnsupportedStratum(f"no transverse coordinate eliminated by degree {self.d[l]} on {S}")
            transverse[res] -= 1
        residues = sorted(transverse.elements()) + [0] * self.open_dim(S)
        return CyclicQuotient(e, tuple(residues))


def intersection_dim(f, T):
    """Dimension of X cut with the coordinate subspace P(a_T); -1 when empty."""
    return _Analyzer(f).closed_dim(tuple(sorted(T)))


def _check_triple_gcd(f, size):
    for J in combinations(range(len(f.weights)), size):
        if gcd_all(f.weights[j] for j in J) > 1:
            return J
    return None


def stratify(f, check_hypothesis=True):
    """Dispatch on codimension."""
    if f.n != 3:
        raise UnsupportedStratum("stratification is automated for 3-folds only")
    if f.c == 1:
        return stratify_hypersurface(f, check_hypothesis)
    if f.c == 2:
        return stratify_codim2(f, check_hypothesis)
    if f.c == 3:
        return stratify_codim3(f)
    raise UnsupportedStratum("codimension above 3 is not supported")


def stratify_hypersurface(f, check_hypothesis=True):
    if f.c != 1 or f.n != 3:
        raise ValueError("expected a 3-fold hypersurface")
    if check_hypothesis:
        bad = _check_triple_gcd(f, 3)
        if bad is not None:
            raise HypothesisViolation(f"weights {[f.weights[j] for j in bad]} share a factor")
    return _stratify(f)


def stratify_codim2(f, check_hypothesis=True):
    if f.c != 2 or f.n != 3:
        raise ValueError("expected a 3-fold of codimension 2")
    if check_hypothesis:
        bad = _check_triple_gcd(f, 4)
        if bad is not None:
            raise HypothesisViolation(f"weights {[f.weights[j] for j in bad]} share a factor")
    return _stratify(f)


def stratify_codim3(f):
    if f.c != 3 or f.n != 3:
        raise ValueError("expected a 3-fold of codimension 3")
    return _stratify(f)


def _stratify(f):
    an = _Analyzer(f)
    w = f.weights
    loci, notes = [], []
    for size in range(1, len(w) + 1):
        for S in combinations(range(len(w)), size):
            e = gcd_all(w[j] for j in S)
            if e == 1:
                continue
            dim = an.open_dim(S)
            if dim < 0:
                continue
            if dim > 1:
                raise UnsupportedStratum(f"X meets the stratum {S} in dimension {dim}")
            raw = an.local_type(S)
            if dim == 0 and 0 in raw.residues:
                # such points lie on a curve with the same stabilizer, which is
                # reported through the larger stratum
                notes.append((S, "on curve", str(raw)))
                continue
            q = remove_reflections(raw)
            if q.r == 1:
                continue
            q = normalize_quotient(q)
            count = None
            if dim == 0:
                count = _count_points(an, S, notes)
                if count == 0:
                    continue
            loci.append(SingularLocus(S, dim, count, q, raw))
    return StratificationReport(f, loci, notes)


def _count_points(an, S, notes):
    torus = an.torus_count(S)
    stacky = an.stacky_count(S)
    closed = an.closed_form(S) if an.f.c <= 2 else None
    for name, value in (("subtraction", stacky), ("closed form", closed)):
        if value is not None and value != torus:
            raise CountMismatch(f"stratum {S}: {name} count {value} but torus count {torus}")
    notes.append((S, torus, stacky, closed))
    return torus
