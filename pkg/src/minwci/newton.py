"""
Newton polytopes of weighted-homogeneous forms restricted to a coordinate stratum.

For a general system of forms supported on given monomials, the number of
solutions in the open torus equals the mixed volume of the Newton polytopes
(Bernstein-Kushnirenko). Solvability at all is decided by the rank condition:
every subfamily of k polytopes must span at least k dimensions.

The torus of the stratum P(a_S) is (C^*)^S / C^*, whose character lattice is
{m : sum m_j a_j = 0}. Dropping one coordinate t maps that lattice onto a
sublattice of index a_t / gcd(a_S), so Euclidean volumes of projected
polytopes are divided by that index.
"""
from fractions import Fraction
from itertools import combinations

from .wci import monomials
from .wps import gcd_all


def _rank(vectors):
    """Rank of a list of integer vectors (fraction-free elimination)."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return 0
    rank, ncols = 0, len(rows[0])
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][col]:
                q = rows[i][col]
                rows[i] = [p[col] * x - q * y for x, y in zip(rows[i], p)]
        rank += 1
    return rank


def _differences(points):
    p0 = points[0]
    return [tuple(x - y for x, y in zip(p, p0)) for p in points[1:]]


def generic_solvable(supports):
    """
    True iff a general system with these supports has a solution in the torus.

    supports: list of lists of exponent vectors (one list per equation).
    """
    diffs = [_differences(s) if s else None for s in supports]
    if any(d is None for d in diffs):
        return False
    for k in range(1, len(supports) + 1):
        for K in combinations(range(len(supports)), k):
            if _rank([v for i in K for v in diffs[i]]) < k:
                return False
    return True


def _hull2(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _volume(points, dim):
    """Euclidean volume (exact Fraction) of the convex hull of integer points."""
    pts = sorted(set(points))
    if dim == 1:
        xs = [p[0] for p in pts]
        return Fraction(max(xs) - min(xs))
    if dim == 2:
        h = _hull2(pts)
        if len(h) < 3:
            return Fraction(0)
        twice = sum(h[i][0] * h[(i + 1) % len(h)][1] - h[(i + 1) % len(h)][0] * h[i][1]
                    for i in range(len(h)))
        return Fraction(abs(twice), 2)
    if dim == 3:
        return _volume3(pts)
    raise NotImplementedError("volumes are implemented up to dimension 3")


def _volume3(pts):
    if len(pts) < 4 or _rank(_differences(pts)) < 3:
        return Fraction(0)
    from scipy.spatial import ConvexHull

    hull = ConvexHull(pts)
    # qhull only supplies the facet combinatorics; every facet is re-verified
    # and the volume is summed with integer determinants
    apex = pts[hull.vertices[0]]
    six = 0
    for tri in hull.simplices:
        a, b, c = (pts[i] for i in tri)
        u = [b[i] - a[i] for i in range(3)]
        v = [c[i] - a[i] for i in range(3)]
        nrm = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        side = {(_dot(nrm, p) - _dot(nrm, a)) > 0 for p in pts if _dot(nrm, p) != _dot(nrm, a)}
        if len(side) > 1:
            raise ArithmeticError("convex hull facet failed exact verification")
        six += abs(_dot(nrm, apex) - _dot(nrm, a))
    return Fraction(six, 6)


def _dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def _minkowski(sets):
    acc = [tuple(0 for _ in sets[0][0])]
    for s in sets:
        acc = list({tuple(x + y for x, y in zip(p, q)) for p in acc for q in s})
        if len(acc[0]) == 2:
            acc = _hull2(acc)
    return acc


def mixed_volume(polys, dim):
    """Normalized mixed volume MV(P_1..P_dim) with MV(P..P) = dim! vol(P)."""
    if len(polys) != dim:
        raise ValueError("mixed volume needs exactly dim polytopes")
    total = Fraction(0)
    for k in range(1, dim + 1):
        for K in combinations(range(dim), k):
            vol = _volume(_minkowski([polys[i] for i in K]), dim)
            total += (-1) ** (dim - k) * vol
    return total


def stratum_supports(weights, degrees, S):
    """Exponent vectors (in the S variables) of each degree that is representable on S."""
    wS = [weights[j] for j in S]
    return [monomials(wS, d) for d in degrees]


def open_stratum_count(weights, rep_degrees, S):
    """
    Number of points of a general complete intersection in the open torus of P(a_S).

    rep_degrees are the degrees whose forms do not vanish identically on P_S;
    their number must be |S| - 1.
    """
    m = len(S) - 1
    if len(rep_degrees) != m:
        raise ValueError("expected |S| - 1 equations")
    if m == 0:
        return 1
    wS = [weights[j] for j in S]
    supports = [monomials(wS, d) for d in rep_degrees]
    if not generic_solvable(supports):
        return 0
    t = 0
    proj = [[p[1:] for p in s] for s in supports]
    mv = mixed_volume(proj, m)
    index = Fraction(wS[t], gcd_all(wS))
    count = mv / index
    if count.denominator != 1:
        raise ArithmeticError(f"non-integral torus count {count} on stratum {S}")
    return int(count)
