"""Lattice points, triangulations, circuits, and twisted sectors.

The ambient data is a rank-d lattice N, points v_1..v_n of degree one under
a fixed grading functional, and the cone C spanned by all the points.  A
triangulation is given by its maximal cones (index sets into the points).
Everything in this module is exact: integer and Fraction arithmetic only.

Index convention: points are 0-based internally; fixture files and reports
use 1-based indices.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (
    Infeasible,
    MissingRay,
    NonUnitDegree,
    NotACone,
    NotAdjacent,
    RankDeficient,
)
from . import rational


@dataclass(frozen=True)
class ToricData:
    """Points with a degree-one grading in a rank-d lattice."""

    rank: int
    points: tuple  # tuple of tuple[int], length n
    deg: tuple     # grading functional coefficients, length d

    @property
    def n(self):
        return len(self.points)

    def degree(self, v):
        return sum(a * b for a, b in zip(self.deg, v))

    def combine(self, coeffs):
        """Sum of coeffs[i] * v_i as a coordinate tuple (exact)."""
        out = [Fraction(0)] * self.rank
        for c, v in zip(coeffs, self.points):
            if c:
                for j in range(self.rank):
                    out[j] += Fraction(c) * v[j]
        return tuple(out)


@dataclass(frozen=True)
class Triangulation:
    """A simplicial fan structure on C, given by maximal cones."""

    label: str
    maximal: tuple  # tuple of frozenset[int]

    def cones(self):
        """All faces of all maximal cones, including the empty cone."""
        faces = set()
        for sigma in self.maximal:
            idx = sorted(sigma)
            for size in range(len(idx) + 1):
                for sub in combinations(idx, size):
                    faces.add(frozenset(sub))
        return faces

    def is_cone(self, index_set):
        s = frozenset(index_set)
        return any(s <= sigma for sigma in self.maximal)


@dataclass(frozen=True)
class Circuit:
    """Primitive relation sum h_j v_j = 0 supporting an adjacent flip.

    Sign normalization: the plus-side triangulation's modified cones each
    omit exactly one index from I_plus = {j : h_j > 0}.
    """

    h: tuple  # length n, integers
    plus_label: str
    minus_label: str

    @property
    def support(self):
        return frozenset(j for j, hj in enumerate(self.h) if hj)

    @property
    def I_plus(self):
        return frozenset(j for j, hj in enumerate(self.h) if hj > 0)

    @property
    def I_minus(self):
        return frozenset(j for j, hj in enumerate(self.h) if hj < 0)


@dataclass(frozen=True)
class TwistedSector:
    """Box element: gamma = sum gamma_j v_j with gamma_j in [0,1)."""

    coords: tuple   # length n of Fraction in [0,1)
    point: tuple    # integer coordinates of the lattice point

    @property
    def support(self):
        return frozenset(j for j, g in enumerate(self.coords) if g)

    def key(self):
        """Deterministic sort/identity key."""
        return tuple(self.coords)


@dataclass(frozen=True)
class Lift:
    """Rational solution l of sum l_j v_j = -c with {l_j} = gamma_j."""

    sector: TwistedSector
    c: tuple      # integer coordinates
    values: tuple  # length n of Fraction


def validate_toric_data(data):
    """Degree-one and full-rank checks; raises on violation."""
    for i, v in enumerate(data.points):
        if len(v) != data.rank:
            raise RankDeficient(f"point {i + 1} has wrong dimension")
        if data.degree(v) != 1:
            raise NonUnitDegree(f"point {i + 1} has degree {data.degree(v)}")
    if rational.rank([list(v) for v in data.points]) != data.rank:
        raise RankDeficient("points do not span the lattice over Q")
    return True


def _simplex_matrix(data, sigma):
    return [list(data.points[j]) for j in sorted(sigma)]


def cone_index(data, sigma):
    """Lattice index (|det|) of a full-dimensional simplicial cone."""
    m = _simplex_matrix(data, sigma)
    return abs(_det_int(m))


def _det_int(m):
    n = len(m)
    if n == 0:
        return 1
    work = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if work[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            det = -det
        det *= work[c][c]
        for i in range(c + 1, n):
            f = work[i][c] / work[c][c]
            if f:
                work[i] = [a - f * b for a, b in zip(work[i], work[c])]
    assert det.denominator == 1
    return int(det)


def simplicial_coordinates(data, sigma, x):
    """Coefficients of x in the ray basis of a full-dim simplicial cone."""
    rays = sorted(sigma)
    cols = [[Fraction(data.points[j][i]) for j in rays] for i in range(data.rank)]
    sol = rational.solve(cols, [Fraction(xi) for xi in x])
    return dict(zip(rays, sol)) if sol is not None else None


def boundary_facets(data, t):
    """Outward-supporting facet functionals of C derived from t.

    Returns a list of integer functionals mu with mu >= 0 on all points and
    mu == 0 on some facet of the cone C.  Used for interior tests.
    """
    seen = {}
    for sigma in t.maximal:
        for facet in combinations(sorted(sigma), data.rank - 1):
            mu = _facet_normal(data, facet, sigma)
            if mu is None:
                continue
            if all(_apply(mu, v) >= 0 for v in data.points):
                seen[tuple(mu)] = mu
            elif all(_apply(mu, v) <= 0 for v in data.points):
                seen[tuple(-x for x in mu)] = [-x for x in mu]
    return [list(mu) for mu in seen]


def _apply(mu, v):
    return sum(a * b for a, b in zip(mu, v))


def _facet_normal(data, facet, sigma):
    """Primitive normal of span(facet), oriented positive on sigma's extra ray."""
    rows = [list(data.points[j]) for j in facet]
    null = rational.nullspace(rows) if rows else []
    if rows and len(null) != 1:
        return None
    if not rows:
        return None
    mu = null[0]
    den = 1
    for x in mu:
        den = den * x.denominator // _gcd(den, x.denominator) if x else den
    ints = [int(x * den) for x in mu]
    g = 0
    for x in ints:
        g = _gcd(g, abs(x))
    ints = [x // g for x in ints] if g else ints
    extra = next(iter(set(sigma) - set(facet)))
    s = _apply(ints, data.points[extra])
    if s < 0:
        ints = [-x for x in ints]
    return ints


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def check_triangulation(data, t):
    """Structural triangulation check with diagnostics.

    Verifies: maximal cones are full-dimensional and simplicial, and every
    facet of a maximal cone either supports C (boundary wall) or is shared
    by exactly two maximal cones (interior wall).

    Returns (ok, messages).
    """
    messages = []
    for sigma in t.maximal:
        if len(sigma) != data.rank:
            messages.append(f"cone {_fmt(sigma)} is not full-dimensional")
            continue
        if cone_index(data, sigma) == 0:
            messages.append(f"cone {_fmt(sigma)} is degenerate")
    if messages:
        return False, messages
    for sigma in t.maximal:
        for facet in combinations(sorted(sigma), data.rank - 1):
            mu = _facet_normal(data, facet, sigma)
            if mu is None:
                messages.append(f"facet {_fmt(facet)} has no hyperplane")
                continue
            on_boundary = all(_apply(mu, v) >= 0 for v in data.points)
            sharing = [
                s for s in t.maximal
                if frozenset(facet) <= s and all(_apply(mu, data.points[j]) == 0
                                                 for j in facet)
            ]
            count = len([s for s in t.maximal if frozenset(facet) <= s])
            if on_boundary:
                if count != 1:
                    messages.append(
                        f"boundary facet {_fmt(facet)} shared by {count} cones")
            else:
                if count != 2:
                    messages.append(
                        f"interior wall {_fmt(facet)} shared by {count} cones")
            del sharing
    return (not messages), messages


def _fmt(index_set):
    return "{" + ",".join(str(j + 1) for j in sorted(index_set)) + "}"


def sector_label(coords):
    """Compact display form of sector coordinates: '(0,1/2,0)'."""
    return "(" + ",".join(str(v) for v in coords) + ")"


def find_circuit(data, t_plus, t_minus):
    """Circuit relating two adjacent triangulations, with normalized sign.

    Raises NotAdjacent when the modified cones are not explained by a
    single primitive relation.
    """
    changed_plus = [s for s in t_plus.maximal if s not in t_minus.maximal]
    changed_minus = [s for s in t_minus.maximal if s not in t_plus.maximal]
    if not changed_plus or not changed_minus:
        raise NotAdjacent("triangulations are identical")
    # local patch: every modified cone is the patch minus one circuit index
    patch = frozenset().union(*changed_plus, *changed_minus)
    rays = sorted(patch)
    kernel = rational.integer_kernel([list(data.points[j]) for j in rays])
    if len(kernel) != 1:
        raise NotAdjacent("modified patch does not carry a unique relation")
    local = kernel[0]
    g = 0
    for x in local:
        g = _gcd(g, abs(x))
    local = [x // g for x in local]
    h = [0] * data.n
    for j, hj in zip(rays, local):
        h[j] = hj
    for sign in (1, -1):
        cand = tuple(sign * x for x in h)
        if _matches_flip(cand, patch, changed_plus, changed_minus):
            return Circuit(h=cand, plus_label=t_plus.label,
                           minus_label=t_minus.label)
    raise NotAdjacent("modified cones do not follow the circuit pattern")


def _matches_flip(h, patch, changed_plus, changed_minus):
    support = frozenset(j for j, hj in enumerate(h) if hj)
    i_plus = frozenset(j for j, hj in enumerate(h) if hj > 0)
    i_minus = support - i_plus
    def side_ok(changed, side):
        missing = set()
        for sigma in changed:
            gap = patch - sigma
            if len(gap) != 1:
                return False
            i = next(iter(gap))
            if i not in side:
                return False
            missing.add(i)
        return missing == set(side)
    return side_ok(changed_plus, i_plus) and side_ok(changed_minus, i_minus)


def star_of(t, sigma):
    """Maximal cones of t containing sigma; NotACone if sigma is no face."""
    s = frozenset(sigma)
    if not t.is_cone(s):
        raise NotACone(f"{_fmt(s)} is not a cone of {t.label}")
    return [m for m in t.maximal if s <= m]


def star_rays(t, sigma):
    """Indices i with sigma + {i} still a cone, excluding sigma itself."""
    s = frozenset(sigma)
    out = set()
    for m in star_of(t, sigma):
        out |= m
    return frozenset(i for i in out - s if t.is_cone(s | {i}))


def compute_box(data, t):
    """All twisted sectors of t, sorted deterministically.

    Enumerates, per maximal cone, the lattice points in the half-open
    parallelepiped of the rays; keeps those whose support is a face.
    """
    found = {}
    for sigma in t.maximal:
        rays = sorted(sigma)
        m = cone_index(data, sigma)
        if m == 0:
            continue
        for ks in _tuples(len(rays), m):
            coeffs = [Fraction(k, m) for k in ks]
            point = [Fraction(0)] * data.rank
            for c, j in zip(coeffs, rays):
                for a in range(data.rank):
                    point[a] += c * data.points[j][a]
            if any(p.denominator != 1 for p in point):
                continue
            coords = [Fraction(0)] * data.n
            for c, j in zip(coeffs, rays):
                coords[j] = c
            sector = TwistedSector(coords=tuple(coords),
                                   point=tuple(int(p) for p in point))
            found[sector.key()] = sector
    return sorted(found.values(), key=lambda s: s.key())


def _tuples(length, bound):
    if length == 0:
        yield ()
        return
    for rest in _tuples(length - 1, bound):
        for k in range(bound):
            yield (k,) + rest


def essential_cones(data, t, circuit):
    """Maximal cones omitting exactly one index of the circuit's own side.

    The side is inferred from which omission pattern the triangulation
    matches (I_plus for the plus-side triangulation).
    """
    support = circuit.support
    for side in (circuit.I_plus, circuit.I_minus):
        cones = [s for s in t.maximal
                 if len(support - s) == 1 and next(iter(support - s)) in side]
        pattern = {next(iter(support - s)) for s in cones}
        if pattern == set(side):
            return sorted(cones, key=lambda s: sorted(s))
    raise NotAdjacent(f"{t.label} does not match either side of the circuit")


def essential_sectors(data, t, circuit, mode="containment"):
    """Sectors whose support cone sits inside (or equals) an essential cone."""
    essential = essential_cones(data, t, circuit)
    out = []
    for sector in compute_box(data, t):
        if mode == "containment":
            hit = any(sector.support <= s for s in essential)
        elif mode == "equality":
            hit = any(sector.support == s for s in essential)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if hit:
            out.append(sector)
    return out


def canonical_lift(data, sector, c):
    """Deterministic rational lift l with {l_j} = gamma_j, sum l_j v_j = -c.

    The integer part is the HNF-reduced representative modulo the integer
    kernel lattice of the points, so equal inputs give equal outputs.
    """
    target = [-int(ci) - gp for ci, gp in zip(c, sector.point)]
    rows = [list(v) for v in data.points]
    z = rational.solve_integer(rows, target)
    if z is None:
        raise Infeasible("no integer lift with the prescribed fractional parts")
    kernel = rational.integer_kernel(rows)
    z = rational.reduce_mod_lattice(z, kernel)
    values = tuple(Fraction(zi) + gi for zi, gi in zip(z, sector.coords))
    return Lift(sector=sector, c=tuple(int(ci) for ci in c), values=values)


def adjacent_sector(data, circuit, t_minus, sector, k, r, lift=None):
    """Minus-side sector reached from a plus-side sector through pole (k, r).

    k must be in I_minus and 0 <= r < -h_k.  The sector is read off the
    shifted lift l'' = l' + q h with q = (l'_k - r) / (-h_k).
    """
    if k not in circuit.I_minus:
        raise ValueError("k must carry a negative circuit coefficient")
    hk = circuit.h[k]
    if not 0 <= r < -hk:
        raise ValueError(f"r must lie in [0, {-hk})")
    if lift is None:
        lift = canonical_lift(data, sector, (0,) * data.rank)
    q = (lift.values[k] - r) / (-hk)
    shifted = [lv + q * hj for lv, hj in zip(lift.values, circuit.h)]
    coords = [x - _floor(x) for x in shifted]
    point = data.combine(coords)
    assert all(p.denominator == 1 for p in point)
    gamma = TwistedSector(coords=tuple(coords),
                          point=tuple(int(p) for p in point))
    if not t_minus.is_cone(gamma.support):
        raise NotACone(
            f"shifted sector support {_fmt(gamma.support)} not in {t_minus.label}")
    return gamma, Lift(sector=gamma, c=lift.c, values=tuple(shifted))


def _floor(x):
    return x.numerator // x.denominator


def interior_cones(data, t):
    """Faces of t whose relative interior lies inside the open support cone.

    A nonempty face qualifies iff the sum of its rays is an interior
    point of the support; the empty face never does.
    """
    facets = boundary_facets(data, t)
    out = []
    for sigma in sorted(t.cones(), key=lambda s: (len(s), sorted(s))):
        if not sigma:
            continue
        pt = [0] * data.rank
        for j in sigma:
            pt = [a + b for a, b in zip(pt, data.points[j])]
        if all(_apply(mu, pt) > 0 for mu in facets):
            out.append(sigma)
    return out


def is_interior_point(data, t, c):
    """True when c lies in the open cone spanned by the points."""
    facets = boundary_facets(data, t)
    if not _in_cone(data, t, c):
        return False
    return all(_apply(mu, c) > 0 for mu in facets)


def _in_cone(data, t, c):
    for sigma in t.maximal:
        coeffs = simplicial_coordinates(data, sigma, c)
        if coeffs is not None and all(v >= 0 for v in coeffs.values()):
            return True
    return False
