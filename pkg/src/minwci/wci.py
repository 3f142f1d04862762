"""
Weighted complete intersection families X_{d_1..d_c} in P(a_0..a_N).

Everything here is combinatorial: a general member is described by which
monomials exist in each degree, so representability of an integer by a set of
weights is the basic query. Quasi-smoothness of the general member follows the
(Q1)/(Q2) subset criterion.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import prod

from .wps import WeightedSpace, gcd_all, is_well_formed_space


class LinearConeError(ValueError):
    """Some degree equals some weight."""


@dataclass(frozen=True)
class WciFamily:
    weights: tuple
    degrees: tuple

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        d = tuple(int(x) for x in self.degrees)
        if not d:
            raise ValueError("a family needs at least one degree")
        if min(w) < 1 or min(d) < 1:
            raise ValueError("weights and degrees must be positive")
        if len(w) - 1 - len(d) < 1:
            raise ValueError("the family must have positive dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "degrees", d)

    @property
    def space(self):
        return WeightedSpace(self.weights)

    @property
    def c(self):
        return len(self.degrees)

    @property
    def n(self):
        return len(self.weights) - 1 - len(self.degrees)

    @property
    def alpha(self):
        return amplitude(self)

    @property
    def is_linear_cone(self):
        return any(d in self.weights for d in self.degrees)

    def canonical(self):
        return WciFamily(tuple(sorted(self.weights)), tuple(sorted(self.degrees)))

    @property
    def family_id(self):
        f = self.canonical()
        return "X" + ",".join(map(str, f.degrees)) + "_P" + ",".join(map(str, f.weights))

    def label(self):
        return "X_{" + ",".join(map(str, self.degrees)) + "} in P(" + ",".join(map(str, self.weights)) + ")"

    def to_record(self):
        return {"weights": list(self.weights), "degrees": list(self.degrees)}

    @classmethod
    def from_record(cls, rec):
        return cls(tuple(rec["weights"]), tuple(rec["degrees"]))

    @classmethod
    def from_id(cls, text):
        degs, wts = text[1:].split("_P")
        return cls(tuple(int(x) for x in wts.split(",")), tuple(int(x) for x in degs.split(",")))


def amplitude(f):
    return sum(f.degrees) - sum(f.weights)


# -- representability ---------------------------------------------------------

@lru_cache(maxsize=None)
def _reachable(weights, bound):
    # bit x set iff x is a non-negative combination of the weights
    mask = (1 << (bound + 1)) - 1
    reach = 1
    for a in weights:
        step = a
        while step <= bound:
            reach |= (reach << step) & mask
            step <<= 1
    return reach


def representable(degree, weights):
    """True iff degree = sum m_j a_j with m_j >= 0 (degree 0 is always representable)."""
    if degree < 0:
        return False
    if degree == 0:
        return True
    w = tuple(sorted(set(weights)))
    if not w:
        return False
    if len(w) == 1:
        return degree % w[0] == 0
    bound = max(degree, 128)
    bound = 1 << (bound - 1).bit_length()
    return bool((_reachable(w, bound) >> degree) & 1)


def count_monomials(weights, degree):
    """Number of non-negative integer solutions of sum m_i a_i = degree."""
    if degree < 0:
        return 0
    ways = [1] + [0] * degree
    for a in weights:
        for x in range(a, degree + 1):
            ways[x] += ways[x - a]
    return ways[degree]


def monomials(weights, degree):
    """All exponent vectors of degree `degree` in the given weights."""
    out = []

    def rec(i, left, acc):
        if i == len(weights) - 1:
            if left % weights[i] == 0:
                out.append(tuple(acc + [left // weights[i]]))
            return
        for m in range(left // weights[i] + 1):
            rec(i + 1, left - m * weights[i], acc + [m])

    if degree >= 0:
        rec(0, degree, [])
    return out


def hilbert_series(f, kmax):
    """Coefficients h(0..kmax) of prod(1 - t^d) / prod(1 - t^a)."""
    num = [0] * (kmax + 1)
    num[0] = 1
    for d in f.degrees:
        for x in range(kmax, d - 1, -1):
            num[x] -= num[x - d]
    # dividing by (1 - t^a) is a running sum with stride a
    for a in f.weights:
        for x in range(a, kmax + 1):
            num[x] += num[x - a]
    return num


def hilbert_coefficient(f, k):
    """h^0(X, O_X(k)) for the general quasi-smooth member."""
    if k < 0:
        return 0
    return hilbert_series(f, k)[k]


# -- well-formedness ----------------------------------------------------------

def rep_degrees(f, J):
    """Indices of degrees having a monomial in the variables indexed by J."""
    wj = [f.weights[j] for j in J]
    return [l for l, d in enumerate(f.degrees) if representable(d, wj)]


def is_well_formed(f):
    """
    Ambient space well-formed and X contains no codimension c+1 singular stratum.

    A stratum P_J lies in X exactly when every defining form vanishes on it,
    i.e. when no degree is representable by the weights indexed by J.
    """
    if not is_well_formed_space(f.weights):
        return False
    size = f.n  # |J| = N - c
    for J in combinations(range(len(f.weights)), size):
        if gcd_all(f.weights[j] for j in J) > 1 and not rep_degrees(f, J):
            return False
    return True


# -- quasi-smoothness ---------------------------------------------------------

@dataclass
class QuasiSmoothResult:
    ok: bool
    trace: list = field(default_factory=list)
    failed: tuple = None

    def __bool__(self):
        return self.ok


def _q1(f, I):
    rho = min(f.c, len(I))
    reps = rep_degrees(f, I)
    if len(reps) >= rho:
        return ("Q1", tuple(reps[:rho]))
    return None


def _covering_ok(chosen, k_minus_l):
    # |union of E_r over J| >= k - l + |J| - 1 for every non-empty J
    rs = list(chosen)
    for size in range(2, len(rs) + 1):
        for J in combinations(rs, size):
            union = set().union(*(chosen[r] for r in J))
            if len(union) < k_minus_l + size - 1:
                return False
    return True


def _q2(f, I):
    k = len(I)
    rho = min(f.c, k)
    wI = [f.weights[i] for i in I]
    outside = [j for j in range(len(f.weights)) if j not in I]
    reps = rep_degrees(f, I)
    for l in range(rho - 1, -1, -1):
        need = k - l
        for P in combinations(reps, l):
            rest = [r for r in range(f.c) if r not in P]
            options = {}
            for r in rest:
                T = [e for e in outside if representable(f.degrees[r] - f.weights[e], wI)]
                if len(T) < need:
                    break
                options[r] = list(combinations(T, need))
            else:
                found = _search_choice(rest, options, need)
                if found is not None:
                    return ("Q2", (l, P, found))
    return None


def _search_choice(rest, options, need):
    chosen = {}

    def rec(i):
        if i == len(rest):
            return _covering_ok(chosen, need)
        r = rest[i]
        for E in options[r]:
            chosen[r] = set(E)
            if rec(i + 1):
                return True
        del chosen[r]
        return False

    if rec(0):
        return {r: tuple(sorted(chosen[r])) for r in rest}
    return None


def is_quasi_smooth_general(f, want_trace=True):
    """
    Check (Q1) or (Q2) for every non-empty subset I of coordinates.

    Returns a truthy QuasiSmoothResult; its trace lists (I, condition,
    certificate) per subset, and `failed` names the first failing subset.
    """
    if f.is_linear_cone:
        raise LinearConeError(f"{f.label()} is a linear cone")
    return _quasi_smooth(f.weights, f.degrees, want_trace)


def _quasi_smooth(weights, degrees, want_trace=True):
    f = WciFamily.__new__(WciFamily)
    object.__setattr__(f, "weights", tuple(weights))
    object.__setattr__(f, "degrees", tuple(degrees))
    trace = []
    N1 = len(weights)
    # small subsets fail most often, so test them first
    for size in range(1, N1 + 1):
        for I in combinations(range(N1), size):
            cert = _q1(f, I) or _q2(f, I)
            if cert is None:
                return QuasiSmoothResult(False, trace, I)
            if want_trace:
                trace.append((I,) + cert)
    return QuasiSmoothResult(True, trace, None)


def quasi_smooth_cone(weights, degrees):
    """Quasi-smoothness for any weights and degrees (no dimension constraint)."""
    return _quasi_smooth(weights, degrees, want_trace=False).ok


def ambient_k_cube(f):
    """(K_X)^n = alpha^n prod(d) / prod(a) for the general member."""
    return Fraction(f.alpha ** f.n * prod(f.degrees), prod(f.weights))
