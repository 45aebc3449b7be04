"""Continuation across the wall between two adjacent triangulations.

Three independent computations of the same linear map are assembled here
and played against each other:

  * the residue route: coefficients C read off the pole families of the
    auxiliary integrand, with the adjacent-sector data transported along
    stored lifts;
  * the kernel route: the same coefficients parametrized by the residue
    locations themselves, evaluated through the localization points;
  * the contour oracle: direct numeric quadrature of the integrand on a
    vertical line, which is the ground truth for both.

Everything runs over a DeformationRing so that coinciding divisor
classes stay separated; matrices are sampled at generic eps or built as
eps-Laurent data whose principal parts must cancel before the value at
eps^0 is read off.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InfeasibleArgs, PoleOnContour, PoleProximity, \
    TailBoundViolated, VerificationFailed
from . import kernels
from .toric import compute_box, canonical_lift, adjacent_sector, \
    essential_sectors, sector_label
from .rings import build_sector_algebra
from .deform import DeformationRing, TWO_PI_I, unit_phase, principal_log
from .series import TruncationPolicy, enumerate_terms, term_value, \
    scalar_power


# -- path and endpoints -------------------------------------------------


@dataclass(frozen=True)
class PathSpec:
    """Endpoints on the two sides of the wall, sharing their arguments."""

    x_plus: tuple
    x_minus: tuple
    amplitude: float
    y_abs_plus: float
    y_abs_minus: float
    arg_y: float


def y_value(circuit, x):
    """Auxiliary coordinate (|y|, continuous arg y) at the point x."""
    la = sum(h * math.log(abs(v)) for h, v in zip(circuit.h, x))
    ay = sum(h * cmath.phase(complex(v)) for h, v in zip(circuit.h, x))
    ay += math.pi * sum(circuit.h[j] for j in sorted(circuit.I_minus))
    return math.exp(la), ay


def select_endpoints(circuit, amplitude, y_abs):
    """Deterministic endpoints with |y| = y_abs on the near side.

    Moduli follow the circuit direction, arguments are a common small
    tilt that parks arg y at -pi, the midpoint of its allowed window
    (and the fastest two-sided decay for the line integral).
    """
    if not 0.0 < y_abs < 1.0:
        raise InfeasibleArgs("target |y| must lie strictly inside (0, 1)")
    if amplitude <= 0.0:
        raise InfeasibleArgs("amplitude must be positive")
    h = circuit.h
    h2 = sum(v * v for v in h)
    hm = sum(-h[j] for j in circuit.I_minus)
    delta = math.pi * (hm - 1) / h2
    args = [delta * v for v in h]
    if any(abs(a) >= math.pi for a in args):
        raise InfeasibleArgs("argument tilt leaves the principal range")
    base = math.log(y_abs) / h2
    x_plus = tuple(cmath.exp(base * v + 1j * a) for v, a in zip(h, args))
    x_minus = tuple(v * math.exp(amplitude * hj)
                    for v, hj in zip(x_plus, h))
    y_minus = y_abs * math.exp(amplitude * h2)
    if y_minus <= 1.0:
        raise InfeasibleArgs("amplitude too small to cross |y| = 1")
    _, ay = y_value(circuit, x_plus)
    assert abs(ay + math.pi) < 1e-9
    return PathSpec(x_plus=x_plus, x_minus=x_minus, amplitude=amplitude,
                    y_abs_plus=y_abs, y_abs_minus=y_minus, arg_y=-math.pi)


# -- pole bookkeeping ---------------------------------------------------


@dataclass(frozen=True)
class PoleFamily:
    """One pole of the integrand: an integer point or a ratio-factor zero."""

    kind: str                # "integer" | "gamma"
    location: complex        # scalar part of the position
    k: int = -1              # ray index for the gamma family
    w: int = -1              # nonnegative index inside the family
    w0: int = 0              # w = w0 * (-h_k) + r
    r: int = 0


def pole_families(lprime, circuit, offsets=None, eps=0.0, w_max=12):
    """Scalar pole positions near the real axis, both families."""
    out = []
    for m in range(-w_max, w_max + 1):
        out.append(PoleFamily(kind="integer", location=complex(m)))
    eps = complex(eps)
    for k in sorted(circuit.I_minus):
        hk = circuit.h[k]
        shift = 0j if offsets is None else complex(offsets[k]) * eps / TWO_PI_I
        for w in range(w_max + 1):
            loc = (complex(lprime[k] - w) + shift) / (-hk)
            out.append(PoleFamily(kind="gamma", location=loc, k=k, w=w,
                                  w0=w // (-hk), r=w % (-hk)))
    return out


def default_contour_re(lprime, circuit):
    """Vertical-line abscissa with every ratio-factor pole strictly left.

    The line sits at shift - 1/2 where shift exceeds the largest real
    part in the gamma families by at least half a unit; integer points
    below shift fall on the left and their residues are restored in
    closed form by the caller.
    """
    rho = max(Fraction(lprime[k]) / (-circuit.h[k])
              for k in circuit.I_minus)
    shift = 1 + max(0, math.floor(rho + Fraction(1, 2)))
    return shift - 0.5, shift


def _min_pole_distance(s0, lprime, circuit):
    dist = abs(s0 - round(s0))
    for k in sorted(circuit.I_minus):
        hk = circuit.h[k]
        for w in range(0, 64):
            re = float(Fraction(lprime[k] - w) / (-hk))
            dist = min(dist, abs(s0 - re))
            if re < s0 - 2:
                break
    return dist


# -- the integrand ------------------------------------------------------


def make_integrand(x, lprime, circuit, ring, form=2, guard=1e-7):
    """Closure evaluating I(s) with the s-independent parts hoisted out."""
    x = tuple(complex(v) for v in x)
    n = len(x)
    iminus = sorted(circuit.I_minus)
    h = circuit.h
    d = [ring.divisor(j) * (1.0 / TWO_PI_I) for j in range(n)]
    div = [ring.divisor(j) for j in range(n)]
    exp_neg = {j: ring.exp(div[j] * (-1.0)) for j in iminus}
    nums = {j: ring.one() - exp_neg[j] * unit_phase(-lprime[j])
            for j in iminus}
    bp = [ring.branched_power(x[j], d[j]) for j in range(n)]
    logx = [principal_log(x[j]) for j in range(n)]
    const = ring.one()
    for j in range(n):
        const = const * bp[j] * scalar_power(x[j], lprime[j])
    logy = sum(hv * lg.real for hv, lg in zip(h, logx))
    ay = sum(hv * lg.imag for hv, lg in zip(h, logx)) \
        + math.pi * sum(h[j] for j in iminus)
    hm_sum = sum(h[j] for j in iminus)

    def guard_distance(s):
        dist = abs(s - complex(round(s.real)))
        for k in iminus:
            w_near = lprime[k] + s.real * circuit.h[k]
            for w in (math.floor(w_near), math.ceil(w_near)):
                loc = complex(Fraction(lprime[k] - w) / (-circuit.h[k]))
                dist = min(dist, abs(s - loc))
        return dist

    def eval2(s):
        acc = const * (TWO_PI_I / (1.0 - cmath.exp(-TWO_PI_I * s)))
        for j in iminus:
            den = ring.one() - exp_neg[j] * cmath.exp(
                -TWO_PI_I * (complex(lprime[j]) + s * h[j]))
            acc = acc * nums[j] * ring.inv(den)
        for j in range(n):
            e = complex(lprime[j]) + s * h[j]
            if h[j]:
                acc = acc * cmath.exp(e * logx[j] - complex(lprime[j]) * logx[j])
            acc = acc * ring.recip_gamma(e, d[j])
        return acc

    def eval1(s):
        pref = -cmath.exp(kernels.log_gamma(-s) + kernels.log_gamma(1.0 + s))
        grow = cmath.exp(s * complex(logy, ay + math.pi * (1 - hm_sum)))
        acc = const * (pref * grow)
        for j in iminus:
            den = ring.one() - exp_neg[j] * cmath.exp(
                -TWO_PI_I * (complex(lprime[j]) + s * h[j]))
            acc = acc * nums[j] * ring.inv(den)
        for j in range(n):
            acc = acc * ring.recip_gamma(complex(lprime[j]) + s * h[j], d[j])
        return acc

    def f(s):
        s = complex(s)
        if guard_distance(s) < guard:
            raise PoleProximity(f"s = {s} too close to a pole")
        return eval2(s) if form == 2 else eval1(s)

    f.decay = (2.0 * math.pi + ay, -ay)   # rates for t -> +inf / -inf
    f.arg_y = ay
    return f


def mb_integrand(x, lprime, circuit, ring, s, form=2):
    """Single evaluation of the line integrand; see make_integrand."""
    return make_integrand(x, lprime, circuit, ring, form=form)(s)


# -- quadrature ---------------------------------------------------------


@dataclass(frozen=True)
class ContourSpec:
    s0: float = None         # None: automatic placement
    height: float = 14.0
    panels: int = 48
    order: int = 12
    tail_tol: float = 1e-9


def _line_quadrature(f, s0, height, panels, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    acc = None
    edges = np.linspace(-height, height, panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        for t, w in zip(nodes, weights):
            val = f(complex(s0, mid + half * t)) * (w * half)
            acc = val if acc is None else acc + val
    return acc * (-1.0 / (2.0 * math.pi))


def mb_contour_oracle(x, lprime, circuit, ring, spec=None, form=2):
    """Numeric value of the line integral, downward orientation.

    With this orientation the result equals the right-hand pole sum when
    |y| < 1 and minus the left-hand pole sum when |y| > 1.  Returns the
    value and a diagnostics dict (automatic abscissa, error estimate
    from a refined pass, measured tail bounds).
    """
    spec = spec or ContourSpec()
    if spec.s0 is None:
        s0, shift = default_contour_re(lprime, circuit)
    else:
        s0, shift = float(spec.s0), None
    if _min_pole_distance(s0, lprime, circuit) < 0.15:
        for cand in (s0 + 0.25, s0 - 0.25):
            if _min_pole_distance(cand, lprime, circuit) >= 0.15:
                s0 = cand
                break
        else:
            raise PoleOnContour(f"no clear line near Re s = {s0}")
    f = make_integrand(x, lprime, circuit, ring, form=form)
    coarse = _line_quadrature(f, s0, spec.height, spec.panels, spec.order)
    fine = _line_quadrature(f, s0, spec.height, 2 * spec.panels, spec.order)
    est = (fine - coarse).norm()
    rate_up, rate_dn = f.decay
    if min(rate_up, rate_dn) <= 0:
        raise TailBoundViolated("arg y outside (-2 pi, 0): no decay")
    tail_up = f(complex(s0, spec.height)).norm() / rate_up
    tail_dn = f(complex(s0, -spec.height)).norm() / rate_dn
    if tail_up + tail_dn > spec.tail_tol:
        raise TailBoundViolated(
            f"measured tails {tail_up:.2e}+{tail_dn:.2e} "
            f"exceed {spec.tail_tol:.2e}")
    diag = {"s0": s0, "shift": shift, "height": spec.height,
            "panels": 2 * spec.panels, "order": spec.order,
            "est_error": est, "tail": tail_up + tail_dn}
    return fine, diag


def residue_at(x, lprime, circuit, ring, center, radius=0.25, nodes=64,
               form=2):
    """Residue by a small positively oriented circle."""
    f = make_integrand(x, lprime, circuit, ring, form=form)
    acc = None
    for k in range(nodes):
        z = cmath.exp(TWO_PI_I * k / nodes) * radius
        val = f(complex(center) + z) * z
        acc = val if acc is None else acc + val
    return acc * (1.0 / nodes)


def orbit_sum(x, lprime, circuit, ring, m_from, m_to):
    """Plain sum of the h-orbit terms m_from <= m <= m_to."""
    acc = ring.zero()
    for m in range(m_from, m_to + 1):
        l = tuple(v + m * hv for v, hv in zip(lprime, circuit.h))
        acc = acc + term_value(x, l, ring)
    return acc


def orbit_continued(x, lprime, circuit, ring, spec=None, m_back=25):
    """Continuation of the h-orbit sum of one generator across the wall.

    Equals the closed-form restored residues at the integer points left
    of the line plus the line integral; on the far side this is the
    analytic continuation of the near-side orbit sum.
    """
    q, diag = mb_contour_oracle(x, lprime, circuit, ring, spec)
    _, shift = default_contour_re(lprime, circuit)
    back = orbit_sum(x, lprime, circuit, ring, -m_back, shift - 1)
    return back + q, diag


def left_residue_sum(x, lprime, circuit, ring, spec=None, stop=1e-13,
                     max_groups=40):
    """Sum of all residues left of the line, by grouped circles.

    Poles sharing a real location (merged families, integer points hit
    by a family) are enclosed together, so nearly coinciding poles never
    force a tiny radius.
    """
    spec = spec or ContourSpec()
    if spec.s0 is None:
        s0, _ = default_contour_re(lprime, circuit)
    else:
        s0 = float(spec.s0)
    locations = set()
    for m in range(math.floor(s0), math.floor(s0) - max_groups, -1):
        locations.add(Fraction(m))
    for k in sorted(circuit.I_minus):
        hk = circuit.h[k]
        for w in range(0, max_groups * (-hk)):
            re = Fraction(lprime[k] - w) / (-hk)
            if re < s0 - max_groups:
                break
            if re < s0:
                locations.add(re)
    acc = None
    small = 0
    for re in sorted(locations, reverse=True):
        val = residue_at(x, lprime, circuit, ring, complex(float(re)),
                         radius=0.2)
        acc = val if acc is None else acc + val
        scale = max(acc.norm(), 1.0)
        if val.norm() < stop * scale:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    return acc


# -- residue coefficients ------------------------------------------------


def adjacent_data_transport(data, circuit, t_minus, gamma, k, r, lift=None):
    """theta and the reached sector, via the stored lift moved along h."""
    if lift is None:
        lift = canonical_lift(data, gamma, (0,) * data.rank)
    q = (lift.values[k] - r) / (-circuit.h[k])
    theta = q % 1
    sector, _ = adjacent_sector(data, circuit, t_minus, gamma, k, r, lift)
    return theta, tuple(sector.coords)


def adjacent_data_pole(circuit, gamma, k, m):
    """theta and the reached coordinates, read off the residue location."""
    base = (gamma.coords[k] + m) / Fraction(-circuit.h[k])
    theta = base % 1
    coords = tuple((g + h * base) % 1 for g, h in zip(gamma.coords, circuit.h))
    return theta, coords


def coefficient_C(data, circuit, t_minus, gamma, k, r, ring, lift=None,
                  route="transport"):
    """Residue coefficient attached to the (k, r) pole of sector gamma.

    route "transport" derives the angular data from lifts, route "pole"
    from the residue location; they must produce identical elements and
    are kept as separate code paths on purpose.
    """
    h = circuit.h
    hk = h[k]
    assert k in circuit.I_minus and 0 <= r < -hk
    if route == "transport":
        theta, coords2 = adjacent_data_transport(
            data, circuit, t_minus, gamma, k, r, lift)
    elif route == "pole":
        theta, coords2 = adjacent_data_pole(circuit, gamma, k, r)
    else:
        raise ValueError(f"unknown route {route!r}")
    dk = ring.divisor(k)
    num = ring.one() - ring.exp(dk * (-1.0)) * unit_phase(-gamma.coords[k])
    den = (ring.one() - ring.exp(dk * (1.0 / hk)) * unit_phase(-theta)) * hk
    acc = num * ring.inv(den)
    for j in sorted(circuit.I_minus):
        if j == k:
            continue
        dj = ring.divisor(j)
        delta = dj - dk * (h[j] / hk)
        numj = ring.one() - ring.exp(dj * (-1.0)) * unit_phase(-gamma.coords[j])
        denj = ring.one() - ring.exp(delta * (-1.0)) * unit_phase(-coords2[j])
        acc = acc * numj * ring.inv(denj)
    return acc


# -- transform matrices -------------------------------------------------


@dataclass
class TransformMatrix:
    source: str
    target: str
    row_index: tuple         # (sector key, basis position) on the target side
    col_index: tuple         # same on the source side
    entries: np.ndarray
    eps: object              # sampled eps, or None for the eps^0 extraction
    provenance: str
    principal_ratio: float = 0.0

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)


class WallContext:
    """Shared sector algebras and rings for one wall crossing."""

    def __init__(self, data, circuit, t_plus, t_minus, offsets=None,
                 eps=None, window=8):
        self.data = data
        self.circuit = circuit
        self.t_plus = t_plus
        self.t_minus = t_minus
        self.eps = eps
        self.window = window
        self.box_plus = compute_box(data, t_plus)
        self.box_minus = compute_box(data, t_minus)
        self.alg_plus = {g.key(): build_sector_algebra(data, t_plus, g)
                         for g in self.box_plus}
        self.alg_minus = {g.key(): build_sector_algebra(data, t_minus, g)
                          for g in self.box_minus}
        probe = DeformationRing(next(iter(self.alg_plus.values())), offsets,
                                eps=eps, window=window)
        self.offsets = probe.offsets
        for k in circuit.I_minus:
            if self.offsets[k] == 0:
                raise InfeasibleArgs(
                    f"offset {k + 1} must be nonzero on the negative side")
            for j in circuit.I_minus:
                if j != k and self.offsets[j] * circuit.h[k] \
                        == self.offsets[k] * circuit.h[j]:
                    raise InfeasibleArgs(
                        "offsets proportional to the circuit on the "
                        "negative side merge the deformed poles")
        self.ring_plus = {k: DeformationRing(a, self.offsets, eps=eps,
                                             window=window)
                          for k, a in self.alg_plus.items()}
        self.ring_minus = {k: DeformationRing(a, self.offsets, eps=eps,
                                              window=window)
                          for k, a in self.alg_minus.items()}
        ess = essential_sectors(data, t_plus, circuit)
        self.essential_plus = {g.key() for g in ess}
        self.rows = tuple((g.key(), i) for g in self.box_plus
                          for i in range(self.alg_plus[g.key()].dim))
        self.cols = tuple((g.key(), i) for g in self.box_minus
                          for i in range(self.alg_minus[g.key()].dim))

    @property
    def laurent(self):
        return self.eps is None


def _phi_at_localization(ring, coords, b):
    """Value of the Laurent monomial R^b at r_j = e^{D~_j + 2 pi i g_j}."""
    phase = unit_phase(sum(Fraction(bj) * g for bj, g in zip(b, coords)))
    combo = None
    for j, bj in enumerate(b):
        if bj == 0:
            continue
        piece = ring.divisor(j) * float(bj)
        combo = piece if combo is None else combo + piece
    if combo is None:
        return ring.one() * phase
    return ring.exp(combo) * phase


def monomial_basis(wall):
    """Laurent exponents picked greedily to a full-rank localization image."""
    target = len(wall.cols)
    n = wall.data.n
    chosen = []
    rows = []

    def undeformed_column(b):
        col = []
        for g in wall.box_minus:
            ring0 = DeformationRing(wall.alg_minus[g.key()], wall.offsets,
                                    eps=0.0)
            col.extend(_phi_at_localization(ring0, g.coords, b).coords)
        return np.array(col, dtype=complex)

    def candidates():
        yield (0,) * n
        deg = 1
        while deg <= 3 * target:
            opts = []

            def grow(prefix, rem):
                if len(prefix) == n:
                    if rem == 0:
                        opts.append(tuple(prefix))
                    return
                for v in range(-rem, rem + 1):
                    grow(prefix + [v], rem - abs(v))
            grow([], deg)
            for b in sorted(opts):
                yield b
            deg += 1

    for b in candidates():
        col = undeformed_column(b)
        trial = rows + [col]
        if np.linalg.matrix_rank(np.array(trial), tol=1e-9) > len(rows):
            chosen.append(b)
            rows.append(col)
            if len(chosen) == target:
                return tuple(chosen)
    raise AssertionError("localization image never reached full rank")


def localization_matrix(wall, mons):
    """Columns phi_b at the source-side localization points (deformed)."""
    cols = []
    for b in mons:
        col = []
        for g in wall.box_minus:
            ring = wall.ring_minus[g.key()]
            val = _phi_at_localization(ring, g.coords, b)
            col.append((g.key(), val))
        cols.append(col)
    return cols


def _stack_minus(wall, per_sector):
    out = []
    for g in wall.box_minus:
        out.extend(np.asarray(per_sector[g.key()].coords))
    return np.array(out, dtype=complex)


def _stack_plus(wall, per_sector):
    out = []
    for g in wall.box_plus:
        out.extend(np.asarray(per_sector[g.key()].coords))
    return np.array(out, dtype=complex)


def _column_entries(wall, values, rtol=1e-9):
    """Flatten per-sector ring values to complex coords; eps^0 if Laurent."""
    flat = []
    worst = 0.0
    for g in wall.box_plus:
        v = values[g.key()]
        if wall.laurent:
            ring = wall.ring_plus[g.key()]
            worst = max(worst, ring.principal_ratio(v))
            v = ring.eps_zero(v, rtol=rtol)
        flat.extend(np.asarray(v.coords))
    return np.array(flat, dtype=complex), worst


def _transform(wall, route):
    """Shared assembly for both residue routes."""
    data, circuit = wall.data, wall.circuit
    h = circuit.h
    mons = monomial_basis(wall)
    loc_cols = localization_matrix(wall, mons)
    raw_cols = []
    principal = 0.0
    for b in mons:
        values = {}
        for g in wall.box_plus:
            key = g.key()
            ring = wall.ring_plus[key]
            if key not in wall.essential_plus:
                values[key] = _phi_at_localization(ring, g.coords, b)
                continue
            lift = canonical_lift(data, g, (0,) * data.rank)
            acc = None
            for k in sorted(circuit.I_minus):
                for r in range(-h[k]):
                    c_kr = coefficient_C(data, circuit, wall.t_minus, g, k,
                                         r, ring, lift=lift, route=route)
                    if route == "transport":
                        _, coords2 = adjacent_data_transport(
                            data, circuit, wall.t_minus, g, k, r, lift)
                        phase = unit_phase(sum(Fraction(bj) * c2 for bj, c2
                                               in zip(b, coords2)))
                        combo = None
                        for j, bj in enumerate(b):
                            if bj == 0:
                                continue
                            piece = (ring.divisor(j)
                                     - ring.divisor(k) * (h[j] / h[k])) \
                                * float(bj)
                            combo = piece if combo is None else combo + piece
                        val = ring.one() * phase if combo is None \
                            else ring.exp(combo) * phase
                    else:
                        pk = ring.exp(ring.divisor(k) * (1.0 / (-h[k]))) \
                            * unit_phase(Fraction(g.coords[k] + r, -h[k]))
                        val = ring.one()
                        for j, bj in enumerate(b):
                            if bj == 0:
                                continue
                            rj = ring.exp(ring.divisor(j)) \
                                * unit_phase(g.coords[j])
                            factor = rj * ring.power(pk, h[j]) if h[j] \
                                else rj
                            val = val * ring.power(factor, bj)
                    contrib = c_kr * val
                    acc = contrib if acc is None else acc + contrib
            values[key] = acc * (-1.0)
        col, worst = _column_entries(wall, values)
        principal = max(principal, worst)
        raw_cols.append(col)
    loc = np.zeros((len(wall.cols), len(mons)), dtype=complex)
    for ci, col in enumerate(loc_cols):
        flat = []
        for key, val in col:
            if wall.laurent:
                ring = wall.ring_minus[key]
                val = ring.eps_zero(val)
            flat.extend(np.asarray(val.coords))
        loc[:, ci] = flat
    colmat = np.array(raw_cols, dtype=complex).T
    entries = colmat @ np.linalg.inv(loc)
    prov = "ac-residue" if route == "transport" else "fm-residue"
    return TransformMatrix(source=wall.t_minus.label,
                           target=wall.t_plus.label,
                           row_index=wall.rows, col_index=wall.cols,
                           entries=entries, eps=wall.eps, provenance=prov,
                           principal_ratio=principal)


def ac_transform(wall):
    """Transform assembled from lift-transported residue data."""
    return _transform(wall, "transport")


def fm_transform(wall):
    """Transform assembled from residue-location (kernel) data."""
    return _transform(wall, "pole")


# -- verification -------------------------------------------------------


def c_battery(data, depth):
    cs = {(0,) * data.rank}
    frontier = list(cs)
    for _ in range(depth):
        new = []
        for c in frontier:
            for v in data.points:
                cn = tuple(a + b for a, b in zip(c, v))
                if cn not in cs:
                    cs.add(cn)
                    new.append(cn)
        frontier = new
    return sorted(cs)


def nonessential_index_sets(data, circuit, t_plus, t_minus):
    """Smallest index sets inside no essential cone of either side."""
    from .toric import essential_cones
    ess = {frozenset(s) for s in essential_cones(data, t_plus, circuit)}
    ess |= {frozenset(s) for s in essential_cones(data, t_minus, circuit)}
    n = data.n
    for size in range(1, n + 1):
        found = [J for J in _subsets(range(n), size)
                 if not any(frozenset(J) <= e for e in ess)]
        if found:
            return found
    return []


def random_nonessential_class(rng, data, circuit, t_plus, t_minus):
    """A Laurent combination times prod (1 - R_j) over a non-essential set.

    The index set J fits in no essential cone on either side, so the
    class is blind to the wall and must be fixed by the transform.
    """
    sets = nonessential_index_sets(data, circuit, t_plus, t_minus)
    assert sets, "every index set meets an essential cone"
    best = sets[0]
    n = data.n
    terms = {}
    for _ in range(3):
        b = tuple(int(rng.integers(-2, 3)) for _ in range(n))
        terms[b] = terms.get(b, 0.0) + complex(rng.standard_normal(),
                                               rng.standard_normal())
    out = {}
    for b, cf in terms.items():
        expanded = {b: cf}
        for j in best:
            nxt = {}
            for bb, cc in expanded.items():
                nxt[bb] = nxt.get(bb, 0.0) + cc
                b2 = tuple(v + (1 if i == j else 0)
                           for i, v in enumerate(bb))
                nxt[b2] = nxt.get(b2, 0.0) - cc
            expanded = nxt
        for bb, cc in expanded.items():
            out[bb] = out.get(bb, 0.0) + cc
    return out, best


def _subsets(items, size):
    from itertools import combinations
    return combinations(items, size)


def evaluate_class(wall, side, poly):
    """Localization values of a Laurent combination, one flat vector."""
    box = wall.box_plus if side == "plus" else wall.box_minus
    rings = wall.ring_plus if side == "plus" else wall.ring_minus
    per = {}
    for g in box:
        ring = rings[g.key()]
        acc = None
        for b, cf in sorted(poly.items()):
            val = _phi_at_localization(ring, g.coords, b) * cf
            acc = val if acc is None else acc + val
        if wall.laurent:
            acc = ring.eps_zero(acc)
        per[g.key()] = acc
    stack = _stack_plus if side == "plus" else _stack_minus
    return stack(wall, per)


def gamma_vector(wall, side, c, x, policy=None):
    """Stacked sector coordinates of the series value on one side."""
    policy = policy or TruncationPolicy()
    box = wall.box_plus if side == "plus" else wall.box_minus
    rings = wall.ring_plus if side == "plus" else wall.ring_minus
    t = wall.t_plus if side == "plus" else wall.t_minus
    per = {}
    for g in box:
        ring = rings[g.key()]
        acc = ring.zero()
        for term in enumerate_terms(wall.data, t, c, g, policy):
            acc = acc + term_value(x, term.l, ring)
        per[g.key()] = acc
    stack = _stack_plus if side == "plus" else _stack_minus
    return stack(wall, per)


def continued_vector(wall, c, x, policy=None, spec=None):
    """Far-side values of the near-side solution, by the contour oracle.

    Essential families are continued orbit-by-orbit from their
    generators; any non-essential leftovers (none in the bundled data)
    are summed directly.
    """
    policy = policy or TruncationPolicy()
    per = {}
    worst = {"est_error": 0.0, "tail": 0.0}
    for g in wall.box_plus:
        ring = wall.ring_plus[g.key()]
        acc = ring.zero()
        for term in enumerate_terms(wall.data, wall.t_plus, c, g, policy,
                                    wall.circuit):
            if term.generator:
                val, diag = orbit_continued(x, term.l, wall.circuit, ring,
                                            spec)
                acc = acc + val
                worst["est_error"] = max(worst["est_error"],
                                         diag["est_error"])
                worst["tail"] = max(worst["tail"], diag["tail"])
            elif not term.essential:
                acc = acc + term_value(x, term.l, ring)
        per[g.key()] = acc
    return _stack_plus(wall, per), worst


def oracle_report(data, circuit, t_plus, t_minus, eps_values=(1e-2, 1e-3),
                  y_abs=0.1, amplitude=None, c_set=None, spec=None,
                  m_max=30):
    """Quadrature vs pole sums on both sides, per generator and eps."""
    h2 = sum(v * v for v in circuit.h)
    if amplitude is None:
        amplitude = math.log(1.0 / y_abs ** 2) / h2
    path = select_endpoints(circuit, amplitude, y_abs)
    if c_set is None:
        c_set = [(0,) * data.rank]
    policy = TruncationPolicy()
    checks = []
    for eps in eps_values:
        wall = WallContext(data, circuit, t_plus, t_minus, eps=eps)
        for g in wall.box_plus:
            if g.key() not in wall.essential_plus:
                continue
            ring = wall.ring_plus[g.key()]
            for c in c_set:
                gens = [t.l for t in enumerate_terms(data, t_plus, c, g,
                                                     policy, circuit)
                        if t.generator]
                for lp in gens:
                    _, shift = default_contour_re(lp, circuit)
                    q_p, dg_p = mb_contour_oracle(path.x_plus, lp, circuit,
                                                  ring, spec)
                    right = orbit_sum(path.x_plus, lp, circuit, ring,
                                      shift, m_max)
                    scale = max(right.norm(), 1.0)
                    dev_r = (q_p - right).norm() / scale
                    q_m, dg_m = mb_contour_oracle(path.x_minus, lp, circuit,
                                                  ring, spec)
                    left = left_residue_sum(path.x_minus, lp, circuit, ring,
                                            spec)
                    scale = max(left.norm(), 1.0)
                    dev_l = (q_m + left).norm() / scale
                    checks.append({
                        "eps": eps, "sector": sector_label(g.key()),
                        "c": list(c),
                        "lprime": [str(v) for v in lp],
                        "right_dev": dev_r, "left_dev": dev_l,
                        "right_pass": dev_r < 1e-7, "left_pass": dev_l < 1e-6,
                        "est_error": max(dg_p["est_error"],
                                         dg_m["est_error"])})
    ok = all(c["right_pass"] and c["left_pass"] for c in checks)
    return {"kind": "contour-oracle", "y_abs": [path.y_abs_plus,
                                                path.y_abs_minus],
            "checks": checks, "pass": ok}


def verify_fm_equals_ac(data, circuit, t_plus, t_minus,
                        eps_samples=(1e-2, 5e-3, 2e-3), depth=2,
                        y_abs=0.1, amplitude=None, policy=None,
                        spec=None, seed=7, n_classes=20):
    """The full crossing battery: matrices, cancellation, end to end.

    Returns a report dict; raises nothing on mere check failure (the
    caller decides), but propagates structural errors.
    """
    policy = policy or TruncationPolicy(degree_bound=25)
    h2 = sum(v * v for v in circuit.h)
    if amplitude is None:
        amplitude = math.log(1.0 / y_abs ** 2) / h2
    path = select_endpoints(circuit, amplitude, y_abs)
    report = {"kind": "fm-vs-ac", "fixture": {"plus": t_plus.label,
                                              "minus": t_minus.label},
              "eps_samples": list(eps_samples)}

    samples = []
    for eps in eps_samples:
        wall = WallContext(data, circuit, t_plus, t_minus, eps=eps)
        ac = ac_transform(wall)
        fm = fm_transform(wall)
        scale = max(np.abs(fm.entries).max(), 1.0)
        dev = float(np.abs(ac.entries - fm.entries).max() / scale)
        det = float(abs(np.linalg.det(fm.entries)))
        samples.append({"eps": eps, "matrix_dev": dev, "det": det,
                        "pass": dev < 1e-10 and det > 1e-6})
    report["matrix"] = {"samples": samples,
                        "pass": all(s["pass"] for s in samples)}

    lwall = WallContext(data, circuit, t_plus, t_minus, eps=None)
    ac0 = ac_transform(lwall)
    fm0 = fm_transform(lwall)
    scale = max(np.abs(fm0.entries).max(), 1.0)
    dev0 = float(np.abs(ac0.entries - fm0.entries).max() / scale)
    report["laurent"] = {
        "principal_ratio": float(max(ac0.principal_ratio,
                                     fm0.principal_ratio)),
        "matrix_dev": dev0,
        "entries": [[[v.real, v.imag] for v in row]
                    for row in fm0.entries],
        "pass": max(ac0.principal_ratio, fm0.principal_ratio) < 1e-9}

    wall0 = WallContext(data, circuit, t_plus, t_minus, eps=0.0)
    battery = c_battery(data, depth)
    worst_dev = 0.0
    rows = []
    for c in battery:
        lhs, diag = continued_vector(wall0, c, path.x_minus, policy, spec)
        rhs = fm0.entries @ gamma_vector(wall0, "minus", c, path.x_minus,
                                         policy)
        scale = max(np.abs(lhs).max(), 1.0)
        dev = float(np.abs(lhs - rhs).max() / scale)
        worst_dev = max(worst_dev, dev)
        rows.append({"c": list(c), "dev": dev,
                     "quad_error": diag["est_error"]})
    report["end_to_end"] = {"battery": rows, "max_dev": worst_dev,
                            "pass": worst_dev < 1e-6}

    rng = np.random.default_rng(seed)
    worst_inv = 0.0
    j_used = None
    for _ in range(n_classes):
        poly, j_used = random_nonessential_class(rng, data, circuit,
                                                 t_plus, t_minus)
        src = evaluate_class(wall0, "minus", poly)
        tgt = evaluate_class(wall0, "plus", poly)
        got = fm0.entries @ src
        scale = max(np.abs(tgt).max(), 1.0)
        worst_inv = max(worst_inv, float(np.abs(got - tgt).max() / scale))
    report["invariance"] = {"classes": n_classes,
                            "J": [j + 1 for j in (j_used or ())],
                            "max_dev": worst_inv,
                            "pass": worst_inv < 1e-10}

    report["pass"] = all(report[k]["pass"] for k in
                         ("matrix", "laurent", "end_to_end", "invariance"))
    return report
