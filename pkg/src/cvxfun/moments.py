"""Moment pencils and the spectrahedral outer-approximation hierarchy.

Given a measure on a compact set B and a polynomial map T, the degree-k
pencil consists of exact rational matrices M_0, M_1, ..., M_m indexed by
monomials of degree <= k, with

    (M_0)_{ab} = integral of x^{a+b},   (M_i)_{ab} = integral of T_i x^{a+b}.

Q_k is the spectrahedron where M_0 + sum lambda_i M_i is PSD; it shrinks
with k and always contains the polar of Conv(T(B)).  Polars here follow
the {y : <y, x> >= -1} convention throughout.

Measures are limited to finite point sets, box Lebesgue measures, and
products of those: exactly the cases with closed-form exact moments.

Monomials are ordered by total degree, then descending lexicographically
within a degree, so pencil files are bit-for-bit reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import caps
from .cones import ConvexBody, polar_body
from .errors import InputError, InternalCheckError, NumericalError, SizeCapError
from .functors import monomials
from .qlinalg import (
    ONE,
    ZERO,
    LPProblem,
    Optimal,
    Q,
    dot,
    lp_optimize,
    psd_decide_exact,
    qvec,
    sym_eig_approx,
)

DEFAULT_BOX_BOUND = Q(10)
DEFAULT_TOL = 1e-6


# ---------------------------------------------------------------------------
# measures with exact moments


class FinitePoints:
    """Weighted counting measure on finitely many points (weights default 1)."""

    __slots__ = ("points", "weights")

    def __init__(self, points, weights=None):
        self.points = tuple(qvec(p) for p in points)
        if not self.points:
            raise InputError("a finite measure needs at least one support point")
        if len({len(p) for p in self.points}) != 1:
            raise InputError("support points of mixed dimension")
        if weights is None:
            weights = (ONE,) * len(self.points)
        else:
            weights = qvec(weights)
            if len(weights) != len(self.points):
                raise InputError("one weight per point required")
            if any(w <= 0 for w in weights):
                raise InputError("weights must be positive")
        self.weights = weights

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def moment(self, alpha):
        total = ZERO
        for w, p in zip(self.weights, self.points):
            term = w
            for x, e in zip(p, alpha):
                term *= x**e
                if term == 0:
                    break
            total += term
        return total


class BoxLebesgue:
    """Lebesgue measure restricted to a product of intervals."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        self.lower = qvec(lower)
        self.upper = qvec(upper)
        if len(self.lower) != len(self.upper):
            raise InputError("box bounds of mixed dimension")
        if any(l >= u for l, u in zip(self.lower, self.upper)):
            raise InputError("box requires lower < upper componentwise")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def moment(self, alpha):
        total = ONE
        for l, u, e in zip(self.lower, self.upper, alpha):
            total *= (u ** (e + 1) - l ** (e + 1)) / (e + 1)
        return total


class ProductMeasure:
    """Product of measures on disjoint coordinate blocks."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)
        if not self.factors:
            raise InputError("a product measure needs at least one factor")

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    def moment(self, alpha):
        total = ONE
        offset = 0
        for f in self.factors:
            total *= f.moment(tuple(alpha[offset : offset + f.dim]))
            offset += f.dim
        return total


def moment(measure, alpha):
    """Exact integral of x^alpha against the measure."""
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise InputError("exponents must be nonnegative")
    if len(alpha) != measure.dim:
        raise InputError("exponent vector dimension mismatch")
    return measure.moment(alpha)


# ---------------------------------------------------------------------------
# polynomial maps


class PolyMap:
    """T: R^n -> R^m with rational polynomial components."""

    __slots__ = ("nvars", "components")

    def __init__(self, nvars: int, components):
        self.nvars = int(nvars)
        if self.nvars < 1:
            raise InputError("a polynomial map needs at least one variable")
        comps = []
        for comp in components:
            terms = {}
            items = comp.items() if isinstance(comp, dict) else comp
            for exp, coef in items:
                exp = tuple(int(e) for e in exp)
                if len(exp) != self.nvars or any(e < 0 for e in exp):
                    raise InputError(f"bad exponent vector {exp}")
                coef = Q(coef)
                if coef != 0:
                    terms[exp] = terms.get(exp, ZERO) + coef
            comps.append({e: c for e, c in terms.items() if c != 0})
        if not comps:
            raise InputError("a polynomial map needs at least one component")
        self.components = tuple(comps)

    @property
    def m(self) -> int:
        return len(self.components)

    def evaluate(self, point) -> tuple:
        point = qvec(point)
        if len(point) != self.nvars:
            raise InputError("point dimension mismatch")
        out = []
        for comp in self.components:
            total = ZERO
            for exp, coef in comp.items():
                term = coef
                for x, e in zip(point, exp):
                    term *= x**e
                    if term == 0:
                        break
                total += term
            out.append(total)
        return tuple(out)

    @classmethod
    def coordinate_map(cls, nvars: int) -> "PolyMap":
        comps = []
        for i in range(nvars):
            exp = tuple(1 if j == i else 0 for j in range(nvars))
            comps.append({exp: ONE})
        return cls(nvars, comps)


# ---------------------------------------------------------------------------
# pencils


@dataclass(frozen=True)
class MomentPencil:
    k: int
    nvars: int
    monomial_index: tuple
    m0: tuple
    ms: tuple  # one matrix per map component

    @property
    def m(self) -> int:
        return len(self.ms)

    @property
    def size(self) -> int:
        return len(self.monomial_index)

    def at(self, lam) -> tuple:
        lam = qvec(lam)
        if len(lam) != self.m:
            raise InputError(f"lambda has dimension {len(lam)}, pencil has {self.m}")
        n = self.size
        out = [list(row) for row in self.m0]
        for coef, mat in zip(lam, self.ms):
            if coef == 0:
                continue
            for i in range(n):
                row = mat[i]
                tgt = out[i]
                for j in range(n):
                    if row[j] != 0:
                        tgt[j] += coef * row[j]
        return tuple(tuple(row) for row in out)


def pencil_monomials(nvars: int, k: int):
    """Exponent vectors of degree <= k: graded, descending lex within a degree."""
    out = []
    for degree in range(k + 1):
        out.extend(monomials(nvars, degree))
    return out


def assemble_pencil(measure, pmap: PolyMap, k: int) -> MomentPencil:
    """Exact moment matrices of degree k for the measure and map."""
    if k < 0:
        raise InputError("the pencil degree k must be nonnegative")
    if measure.dim != pmap.nvars:
        raise InputError("measure and map dimensions disagree")
    index = pencil_monomials(pmap.nvars, k)
    n = len(index)
    limit = caps.cap("PENCIL_SIZE")
    if n > limit:
        raise SizeCapError(f"pencil would have {n} rows, cap is {limit}")

    cache: dict = {}

    def mom(alpha):
        if alpha not in cache:
            cache[alpha] = moment(measure, alpha)
        return cache[alpha]

    def build(component: Optional[dict]) -> tuple:
        mat = [[ZERO] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                base = tuple(x + y for x, y in zip(index[a], index[b]))
                if component is None:
                    value = mom(base)
                else:
                    value = ZERO
                    for exp, coef in component.items():
                        value += coef * mom(tuple(x + y for x, y in zip(base, exp)))
                mat[a][b] = value
                mat[b][a] = value
        return tuple(tuple(row) for row in mat)

    m0 = build(None)
    if not psd_decide_exact(m0).is_psd:
        raise InternalCheckError("the Gram matrix M_0 must be PSD")
    ms = tuple(build(comp) for comp in pmap.components)
    return MomentPencil(k=k, nvars=pmap.nvars, monomial_index=tuple(index), m0=m0, ms=ms)


def qk_membership(pencil: MomentPencil, lam) -> bool:
    """Exact PSD decision of the pencil at a rational lambda."""
    return psd_decide_exact(pencil.at(lam)).is_psd


# ---------------------------------------------------------------------------
# optimization over Q_k by eigenvector cuts


@dataclass(frozen=True)
class QkOptimum:
    value: float
    lam: tuple  # floats
    cuts: int
    box_active: bool
    lam_exact: tuple = field(repr=False, default=())


def _rationalize_cut(vector, pencil, lam_exact):
    """Round a float eigenvector to rationals that still violate the pencil
    at lam_exact; fall back to the exact indefiniteness witness."""
    S = pencil.at(lam_exact)
    scale = max(abs(x) for x in vector) or 1.0
    for denominator_limit in (10**6, 10**12):
        cand = tuple(
            Q(Fraction(x / scale).limit_denominator(denominator_limit))
            for x in vector
        )
        if all(c == 0 for c in cand):
            continue
        value = dot(cand, tuple(dot(row, cand) for row in S))
        if value < 0:
            return cand
    decision = psd_decide_exact(S)
    if decision.is_psd:
        return None
    return decision.witness


def qk_maximize(
    pencil: MomentPencil,
    c,
    box_bound=DEFAULT_BOX_BOUND,
    tol: float = DEFAULT_TOL,
    max_iterations: int = 2000,
) -> QkOptimum:
    """Maximize <c, lambda> over Q_k intersected with the box |lambda|_inf <= R.

    Kelley cutting planes: solve the exact LP over the box plus accumulated
    linear cuts v' (M_0 + sum lambda_i M_i) v >= 0; while the pencil at the
    LP optimum has an eigenvalue below -tol (relative), add the eigenvector
    cut and repeat.  The returned value approaches the true supremum from
    above.  box_active reports whether a box row carries a nonzero dual
    multiplier at the final LP optimum.
    """
    c = qvec(c)
    m = pencil.m
    if len(c) != m:
        raise InputError("objective dimension mismatch")
    R = Q(box_bound)
    if R <= 0:
        raise InputError("box bound must be positive")
    if tol <= 0:
        raise InputError("tolerance must be positive")

    lhs = []
    rhs = []
    senses = []
    for i in range(m):
        unit = tuple(ONE if j == i else ZERO for j in range(m))
        lhs.append(unit)
        rhs.append(R)
        senses.append("<=")
        lhs.append(unit)
        rhs.append(-R)
        senses.append(">=")
    n_box_rows = len(lhs)

    cuts = 0
    for _ in range(max_iterations):
        problem = LPProblem(
            objective=c, lhs=tuple(lhs), rhs=tuple(rhs), senses=tuple(senses)
        )
        result = lp_optimize(problem)
        if not isinstance(result, Optimal):
            raise InternalCheckError("the cut LP over a box must have an optimum")
        lam_exact = result.point
        S = pencil.at(lam_exact)
        floatS = [[float(x) for x in row] for row in S]
        eigenvalues, vectors = sym_eig_approx(floatS, tol=1e-12)
        scale = 1.0 + max((abs(x) for row in floatS for x in row), default=0.0)
        if eigenvalues[0] >= -tol * scale:
            box_active = any(
                result.dual[i] != 0 for i in range(n_box_rows)
            )
            return QkOptimum(
                value=float(result.value),
                lam=tuple(float(x) for x in lam_exact),
                cuts=cuts,
                box_active=box_active,
                lam_exact=lam_exact,
            )
        cut_vector = _rationalize_cut(vectors[0], pencil, lam_exact)
        if cut_vector is None:
            # exact arithmetic says PSD; the float eigenvalue was noise
            box_active = any(result.dual[i] != 0 for i in range(n_box_rows))
            return QkOptimum(
                value=float(result.value),
                lam=tuple(float(x) for x in lam_exact),
                cuts=cuts,
                box_active=box_active,
                lam_exact=lam_exact,
            )
        coefs = tuple(
            dot(cut_vector, tuple(dot(row, cut_vector) for row in mat))
            for mat in pencil.ms
        )
        offset = dot(cut_vector, tuple(dot(row, cut_vector) for row in pencil.m0))
        lhs.append(coefs)
        rhs.append(-offset)
        senses.append(">=")
        cuts += 1
    raise NumericalError(
        f"cutting-plane loop did not converge in {max_iterations} iterations; "
        f"last objective {float(dot(c, lam_exact)):.9g} with {cuts} cuts"
    )


# ---------------------------------------------------------------------------
# polar membership and finite convergence


@dataclass(frozen=True)
class PolarVerdict:
    kind: str  # 'inside' | 'outside' | 'borderline'
    support_value: float
    box_active: bool


def qk_polar_membership(
    pencil: MomentPencil,
    point,
    box_bound=DEFAULT_BOX_BOUND,
    tol: float = DEFAULT_TOL,
) -> PolarVerdict:
    """Decide p in Q_k^polar, with the polar {y : <y, lambda> >= -1 on Q_k}.

    Membership is equivalent to sup_{lambda in Q_k} <-p, lambda> <= 1.  The
    supremum is taken over the boxed spectrahedron: a value above 1 + tol
    certifies 'outside' regardless of the box (the box only shrinks the
    feasible set); 'inside' additionally needs the box constraint slack.
    """
    point = qvec(point)
    direction = tuple(-x for x in point)
    result = qk_maximize(pencil, direction, box_bound=box_bound, tol=tol)
    if result.value >= 1.0 + tol:
        return PolarVerdict(kind="outside", support_value=result.value, box_active=result.box_active)
    if result.value <= 1.0 - tol and not result.box_active:
        return PolarVerdict(kind="inside", support_value=result.value, box_active=result.box_active)
    return PolarVerdict(kind="borderline", support_value=result.value, box_active=result.box_active)


def recenter_points(points):
    """Subtract the average; returns (centered points, center)."""
    pts = [qvec(p) for p in points]
    n = len(pts)
    center = tuple(sum(col, ZERO) / n for col in zip(*pts))
    return [tuple(x - c for x, c in zip(p, center)) for p in pts], center


@dataclass(frozen=True)
class ConvergenceReport:
    k_star: Optional[int]
    verified: bool
    hull: ConvexBody
    polar: ConvexBody
    support_values: dict  # k -> tuple of floats, one per hull vertex
    polar_vertices_exact: dict  # k -> bool


def finite_convergence(
    points,
    pmap: PolyMap,
    k_max: int,
    box_bound=DEFAULT_BOX_BOUND,
    tol: float = DEFAULT_TOL,
) -> ConvergenceReport:
    """Smallest k <= k_max with Q_k^polar = Conv(T(B)) for a finite B.

    Conv(T(B)) is computed exactly; containment polar(Conv) subset Q_k is
    checked by exact PSD membership of every polar vertex, and Q_k subset
    polar(Conv) by maximizing along each facet normal of the polar and
    comparing with the exact support value 1 within tol.
    """
    images = [pmap.evaluate(p) for p in points]
    try:
        hull = ConvexBody.from_points(images)
    except InputError as exc:
        raise InputError(
            f"the image hull is degenerate ({exc}); recenter the map, e.g. with "
            "recenter_points, so that 0 is interior to Conv(T(B))"
        ) from exc
    polar = polar_body(hull)
    measure = FinitePoints(points)

    support_values: dict = {}
    polar_ok: dict = {}
    k_star = None
    for k in range(k_max + 1):
        pencil = assemble_pencil(measure, pmap, k)
        polar_ok[k] = all(qk_membership(pencil, v) for v in polar.vertices)
        values = []
        inside = True
        for w in hull.vertices:
            res = qk_maximize(
                pencil, tuple(-x for x in w), box_bound=box_bound, tol=tol
            )
            values.append(res.value)
            if res.value > 1.0 + tol or res.box_active:
                inside = False
        support_values[k] = tuple(values)
        if polar_ok[k] and inside:
            k_star = k
            break
    return ConvergenceReport(
        k_star=k_star,
        verified=k_star is not None,
        hull=hull,
        polar=polar,
        support_values=support_values,
        polar_vertices_exact=polar_ok,
    )
