"""Gamma-type series over the sector algebras.

A solution attached to a lattice point c of the cone is a sum over
rational tuples l with sum_i l_i v_i = -c and prescribed fractional
parts, of terms

    prod_j x_j^{l_j + D_j/2pi i} / Gamma(1 + l_j + D_j/2pi i),

valued in the direct sum of the sector algebras.  This module
enumerates the terms inside a degree ball, evaluates the primal and the
compactly supported (dual) variants, and checks the two defining PDE
families by exact term pairing: the derivative recursion maps the term
at l to the term at l - e_i through the Gamma functional equation, so
matched descriptor pairs contribute a residual of exactly zero and only
truncation-boundary terms carry a numeric bound.
"""

import cmath
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BranchCut, DivergenceSuspected, InfeasibleArgs, \
    NonInteriorPoint
from . import rational
from .toric import compute_box, essential_cones, interior_cones, \
    is_interior_point, canonical_lift
from .rings import build_sector_algebra
from .deform import DeformationRing, TWO_PI_I, principal_log, \
    reciprocal_gamma_stripped


@dataclass(frozen=True)
class TruncationPolicy:
    """Degree ball sum_i |l_i| <= degree_bound, with optional tail fit."""

    degree_bound: int = 20
    tail_check: bool = True

    def __post_init__(self):
        assert self.degree_bound >= 1


@dataclass(frozen=True)
class EvaluationPoint:
    """Complex coordinates with every argument strictly inside (-pi, pi)."""

    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(complex(v) for v in self.x))
        for j, v in enumerate(self.x):
            if v == 0:
                raise InfeasibleArgs(f"coordinate {j + 1} is zero")
            if v.imag == 0 and v.real < 0:
                raise BranchCut(f"coordinate {j + 1} on the negative axis")


@dataclass(frozen=True)
class LatticeTerm:
    """One exponent tuple of the series, with its classification."""

    l: tuple                 # Fractions
    sector: object           # TwistedSector
    support: frozenset       # I(l) = {i : l_i not a nonnegative integer}
    owning_cones: tuple
    essential: bool = False
    generator: bool = False

    @property
    def degree(self):
        return sum(abs(v) for v in self.l)


@dataclass
class OrbifoldSum:
    """Per-sector components over the Box of one triangulation."""

    components: dict = field(default_factory=dict)

    def norm(self):
        return max((v.norm() for v in self.components.values()), default=0.0)


@dataclass
class GammaValue:
    value: OrbifoldSum
    essential: OrbifoldSum
    nonessential: OrbifoldSum
    algebras: dict
    term_counts: dict
    tail: dict


@dataclass
class DualGammaValue:
    """Coefficients attached to interior-cone generators, per sector."""

    components: dict         # (sector key, cone tuple) -> AlgebraElement
    algebras: dict
    term_counts: dict
    reduced: object = None


def _term_support(l):
    return frozenset(i for i, v in enumerate(l)
                     if not (v.denominator == 1 and v >= 0))


def _negative_support(l):
    return frozenset(i for i, v in enumerate(l)
                     if v.denominator == 1 and v < 0)


def scalar_power(x, e):
    """x**e on the principal branch, exact for integer e."""
    e = Fraction(e)
    if e.denominator == 1:
        return complex(x) ** int(e)
    return cmath.exp(float(e) * principal_log(x))


def _kernel_basis(data):
    rows = [list(v) for v in data.points]
    kernel = rational.integer_kernel(rows)
    if not kernel:
        return []
    h, _ = rational.hnf([list(k) for k in kernel])
    basis = [row for row in h if any(row)]
    return basis


def _pivot(row):
    for i, v in enumerate(row):
        if v:
            return i
    raise AssertionError("zero kernel row")


def _solutions(l0, basis, bound):
    """All l = l0 + Z-combinations of basis with sum |l_i| <= bound.

    The basis rows are in echelon form, so each coefficient is confined
    to an exact interval read off at its pivot column.
    """
    out = []

    def descend(cur, idx):
        if idx == len(basis):
            if sum(abs(v) for v in cur) <= bound:
                out.append(tuple(cur))
            return
        row = basis[idx]
        p = _pivot(row)
        k = Fraction(row[p])
        lo = (-bound - cur[p]) / k
        hi = (bound - cur[p]) / k
        if k < 0:
            lo, hi = hi, lo
        m0 = -((-lo.numerator) // lo.denominator)   # ceil
        m1 = hi.numerator // hi.denominator          # floor
        for m in range(m0, m1 + 1):
            descend([c + m * r for c, r in zip(cur, row)], idx + 1)

    descend(list(l0), 0)
    return out


def enumerate_terms(data, t, c, gamma, policy, circuit=None):
    """Terms of the (c, gamma) series inside the degree ball, sorted.

    Tuples whose support set fits in no maximal cone are dropped: their
    value vanishes identically because the support's divisor product is
    a relation of every sector algebra.
    """
    lift = canonical_lift(data, gamma, c)
    basis = _kernel_basis(data)
    maximal = sorted(t.maximal, key=sorted)
    ess = set(map(frozenset, essential_cones(data, t, circuit))) \
        if circuit is not None else set()
    h = tuple(circuit.h) if circuit is not None else None

    def essential_of(l):
        sup = _term_support(l)
        return any(sup <= e for e in ess)

    out = []
    for l in _solutions(lift.values, basis, policy.degree_bound):
        sup = _term_support(l)
        owning = tuple(s for s in maximal if sup <= s)
        if not owning:
            continue
        is_ess = bool(ess) and any(frozenset(s) in ess for s in owning)
        gen = False
        if is_ess:
            back = tuple(v - hv for v, hv in zip(l, h))
            gen = not essential_of(back)
        out.append(LatticeTerm(l=l, sector=gamma, support=sup,
                               owning_cones=owning, essential=is_ess,
                               generator=gen))
    out.sort(key=lambda term: (term.degree, term.l))
    return out


def term_value(x, l, ring):
    """prod_j x_j^{l_j + D~_j/2pi i} / Gamma(1 + l_j + D~_j/2pi i)."""
    acc = ring.one()
    for j, lj in enumerate(l):
        d = ring.divisor(j) * (1.0 / TWO_PI_I)
        acc = acc * ring.branched_power(x[j], d) * scalar_power(x[j], lj)
        acc = acc * ring.recip_gamma(lj, d)
    return acc


def dual_term_value(x, l, ring):
    """Dual-series coefficient: negative-integer factors are stripped.

    For i with l_i < 0 integral the reciprocal-Gamma factor is divisible
    by D_i/2pi i; that leading factor is removed (and the 1/2pi i kept),
    realizing the divided coefficient that multiplies the generator of
    the support cone.
    """
    acc = ring.one()
    for j, lj in enumerate(l):
        d = ring.divisor(j) * (1.0 / TWO_PI_I)
        acc = acc * ring.branched_power(x[j], d) * scalar_power(x[j], lj)
        if lj.denominator == 1 and lj < 0:
            acc = acc * reciprocal_gamma_stripped(lj, d) * (1.0 / TWO_PI_I)
        else:
            acc = acc * ring.recip_gamma(lj, d)
    return acc


def _point(x, n):
    if isinstance(x, EvaluationPoint):
        pt = x
    else:
        pt = EvaluationPoint(tuple(x))
    assert len(pt.x) == n, f"need {n} coordinates"
    return pt.x


def _tail_scan(shell_norms):
    """Geometric-decay fit on the last shells; ratio >= 1 is suspicious."""
    degs = sorted(shell_norms)
    vals = [shell_norms[d] for d in degs if shell_norms[d] > 0]
    if len(vals) < 3:
        return {"ratio": 0.0, "checked": False}
    window = vals[-5:]
    ratios = [b / a for a, b in zip(window, window[1:]) if a > 0]
    ratio = max(ratios) if ratios else 0.0
    return {"ratio": ratio, "checked": True}


def evaluate_gamma(data, t, c, x, policy, circuit=None):
    """Sum the series for lattice point c at x, per twisted sector."""
    xs = _point(x, data.n)
    total, ess, ness, algebras = {}, {}, {}, {}
    counts = {}
    shells = defaultdict(float)
    for gamma in compute_box(data, t):
        alg = build_sector_algebra(data, t, gamma)
        ring = DeformationRing(alg, eps=0.0)
        acc = alg.zero()
        acc_e = alg.zero()
        acc_n = alg.zero()
        terms = enumerate_terms(data, t, c, gamma, policy, circuit)
        for term in terms:
            v = term_value(xs, term.l, ring)
            acc = acc + v
            if term.essential:
                acc_e = acc_e + v
            else:
                acc_n = acc_n + v
            shells[term.degree] += v.norm()
        key = gamma.key()
        algebras[key] = alg
        total[key] = acc
        ess[key] = acc_e
        ness[key] = acc_n
        counts[key] = len(terms)
    tail = _tail_scan(shells)
    if policy.tail_check and tail["checked"] and tail["ratio"] >= 1.0:
        raise DivergenceSuspected(
            f"shell norms grow with ratio {tail['ratio']:.3f}")
    return GammaValue(value=OrbifoldSum(total), essential=OrbifoldSum(ess),
                      nonessential=OrbifoldSum(ness), algebras=algebras,
                      term_counts=counts, tail=tail)


def evaluate_gamma_dual(data, t, c, x, policy, module=None):
    """Dual series: coefficients on the interior-cone generators."""
    if not is_interior_point(data, t, c):
        raise NonInteriorPoint(f"{tuple(c)} is not interior")
    xs = _point(x, data.n)
    interior = set(map(frozenset, interior_cones(data, t)))
    components = {}
    algebras = {}
    counts = {}
    for gamma in compute_box(data, t):
        alg = build_sector_algebra(data, t, gamma)
        ring = DeformationRing(alg, eps=0.0)
        terms = enumerate_terms(data, t, c, gamma, policy)
        key = gamma.key()
        algebras[key] = alg
        counts[key] = len(terms)
        for term in terms:
            assert term.support in interior, \
                "support of an interior-point term must be an interior cone"
            v = dual_term_value(xs, term.l, ring)
            ckey = (key, tuple(sorted(term.support)))
            if ckey in components:
                components[ckey] = components[ckey] + v
            else:
                components[ckey] = v
    reduced = module.reduce_components(components) if module is not None \
        else None
    return DualGammaValue(components=components, algebras=algebras,
                          term_counts=counts, reduced=reduced)


# -- PDE residuals ------------------------------------------------------


def _exact_divisor_product(alg, idx):
    acc = [Fraction(0)] * alg.dim
    acc[alg.basis_index[()]] = Fraction(1)
    for i in sorted(idx):
        acc = alg.multiply_exact(acc, alg.divisor_exact(i))
        if not any(acc):
            break
    return acc


def _image_vanishes(alg, l_img):
    """Exact test that the term at l_img is the zero element.

    Each negative-integer coordinate contributes a factor divisible by
    its divisor class, so a vanishing product of those classes kills the
    whole term.
    """
    neg = _negative_support(l_img)
    return not any(_exact_divisor_product(alg, neg))


def _euler_defect(alg, terms, c):
    """Exact Euler residual: scalar part plus the divisor-class part."""
    worst = Fraction(0)
    for row in alg.linear_relation_defects():
        m = max((abs(v) for v in row), default=Fraction(0))
        worst = max(worst, m)
    for term in terms:
        for a in range(alg.data.rank):
            s = sum(lv * Fraction(v[a])
                    for lv, v in zip(term.l, alg.data.points)) + c[a]
            worst = max(worst, abs(s))
    return worst


def _factor_identity_dev(alg, lj):
    """Numeric check of recip(l-1, d) = (l + d) recip(l, d)."""
    ring = DeformationRing(alg, eps=0.0)
    worst = 0.0
    for j in range(alg.data.n):
        d = ring.divisor(j) * (1.0 / TWO_PI_I)
        lhs = ring.recip_gamma(lj - 1, d)
        rhs = (d + complex(lj)) * ring.recip_gamma(lj, d)
        scale = max(lhs.norm(), rhs.norm(), 1.0)
        worst = max(worst, (lhs - rhs).norm() / scale)
    return worst


def pde_residuals(data, t, c_list, x, policy, which="primal", circuit=None):
    """Exact recursion/Euler residual report over a battery of points.

    The derivative in x_i sends the term at l to the term at l - e_i of
    the next series; pairs matched by exact descriptor comparison have
    residual zero, images falling outside the degree ball are reported
    with their magnitude, and images whose divisor product vanishes are
    exact zeros.  For the dual system a support-set change of a matched
    pair is absorbed by the module relation D_i F_I = F_{I + i}.
    """
    assert which in ("primal", "dual")
    xs = _point(x, data.n)
    c_set = {tuple(int(v) for v in c) for c in c_list}
    box = compute_box(data, t)
    algebras = {g.key(): build_sector_algebra(data, t, g) for g in box}
    rings = {k: DeformationRing(a, eps=0.0) for k, a in algebras.items()}
    value_fn = term_value if which == "primal" else dual_term_value

    if which == "dual":
        for c in c_set:
            if not is_interior_point(data, t, c):
                raise NonInteriorPoint(f"{c} is not interior")

    terms = {}
    for c in sorted(c_set):
        for gamma in box:
            terms[(c, gamma.key())] = enumerate_terms(
                data, t, c, gamma, policy, circuit)

    euler = Fraction(0)
    for (c, key), tl in terms.items():
        euler = max(euler, _euler_defect(algebras[key], tl, c))

    pairs = []
    factor_dev = 0.0
    sampled = set()
    for c in sorted(c_set):
        for i in range(data.n):
            cn = tuple(a + b for a, b in zip(c, data.points[i]))
            if cn not in c_set:
                continue
            matched = zero_images = boundary = mismatches = 0
            boundary_max = 0.0
            for gamma in box:
                key = gamma.key()
                alg = algebras[key]
                src = terms[(c, key)]
                dst = {term.l for term in terms[(cn, key)]}
                for term in src:
                    img = tuple(v - (1 if j == i else 0)
                                for j, v in enumerate(term.l))
                    if img in dst:
                        matched += 1
                        lj = term.l[i]
                        skey = (lj, key)
                        if skey not in sampled and len(sampled) < 24:
                            sampled.add(skey)
                            factor_dev = max(
                                factor_dev, _factor_identity_dev(alg, lj))
                        continue
                    if _image_vanishes(alg, img):
                        zero_images += 1
                        continue
                    sup = _term_support(img)
                    in_cone = any(sup <= s for s in t.maximal)
                    if which == "dual" and not in_cone:
                        zero_images += 1      # module relation sends it to 0
                        continue
                    if sum(abs(v) for v in img) > policy.degree_bound:
                        boundary += 1
                        if in_cone:
                            mag = value_fn(xs, img, rings[key]).norm()
                            boundary_max = max(boundary_max, mag)
                        continue
                    mismatches += 1
            pairs.append({
                "c": list(c), "i": i + 1, "matched": matched,
                "zero_images": zero_images, "boundary_count": boundary,
                "boundary_max": boundary_max, "mismatches": mismatches,
            })
    worst = max((p["mismatches"] for p in pairs), default=0)
    return {
        "system": which,
        "euler_max": float(euler),
        "interior_residual": 0.0 if worst == 0 else float("nan"),
        "factor_identity_max": factor_dev,
        "pairs": pairs,
    }
