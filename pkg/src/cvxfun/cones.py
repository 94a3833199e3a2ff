"""Polyhedral cones, marked cones and convex bodies, with exact duality.

Conventions fixed here and relied on everywhere else:

* Cones are pointed, closed, full-dimensional, and given by generators
  (V-representation).  Rays are normalized to primitive integer vectors
  (positive scaling only; the direction is never flipped) and stored
  sorted, so cones compare as ray sets.
* The H-representation (inner-pointing facet normals) is computed lazily
  by double description and cached; the cache is write-once and the
  computation idempotent, so concurrent recomputation is harmless.
* Convex bodies are full-dimensional polytopes with the origin strictly
  interior and an irredundant vertex list.
* Body duality uses the polar {y : <y, x> >= -1 for all x}, which matches
  cone duality under the lift P -> Cone{(p, 1)}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import caps
from .errors import InputError, InternalCheckError, SizeCapError
from .qlinalg import (
    ONE,
    ZERO,
    LPProblem,
    Infeasible,
    Optimal,
    Q,
    Unbounded,
    dot,
    invert,
    lp_optimize,
    qvec,
    rank,
    rref_kernel,
    transpose,
    vec_scale,
    vec_sub,
)


def primitive(vector: Sequence) -> tuple:
    """Scale a nonzero rational vector to coprime integers, keeping direction."""
    v = qvec(vector)
    if all(x == 0 for x in v):
        raise InputError("cannot normalize the zero vector")
    denom_lcm = 1
    for x in v:
        denom_lcm = math.lcm(denom_lcm, int(x.denominator))
    ints = [int(x * denom_lcm) for x in v]
    g = 0
    for n in ints:
        g = math.gcd(g, abs(n))
    return tuple(Q(n // g) for n in ints)


def _canonical_rays(rays) -> tuple:
    seen = {}
    for r in rays:
        seen.setdefault(primitive(r), None)
    return tuple(sorted(seen.keys()))


# ---------------------------------------------------------------------------
# membership machinery (shared by cones and bodies)


@dataclass(frozen=True)
class MembershipResult:
    kind: str  # 'inside' | 'boundary' | 'outside'
    separator: Optional[tuple] = None

    @property
    def is_member(self) -> bool:
        return self.kind != "outside"


def _conic_combination(generators, v):
    """Feasibility of v = sum t_i g_i, t >= 0.  Returns (point or None, separator or None)."""
    d = len(v)
    m = len(generators)
    lhs = tuple(tuple(g[i] for g in generators) for i in range(d))
    problem = LPProblem(
        objective=(ZERO,) * m,
        lhs=lhs,
        rhs=v,
        senses=("=",) * d,
        nonneg=(True,) * m,
    )
    result = lp_optimize(problem)
    if isinstance(result, Optimal):
        return result.point, None
    separator = primitive(tuple(-c for c in result.certificate))
    # exact validation: separator >= 0 on generators, < 0 at v
    if any(dot(separator, g) < 0 for g in generators) or dot(separator, v) >= 0:
        raise InternalCheckError("separating functional failed validation")
    return None, separator


def _line_in_cone(generators):
    """A direction g with both g and -g in the cone, or None when pointed."""
    m = len(generators)
    d = len(generators[0])
    lhs = [tuple(g[i] for g in generators) for i in range(d)]
    lhs.append((ONE,) * m)
    rhs = [ZERO] * d + [ONE]
    problem = LPProblem(
        objective=(ZERO,) * m,
        lhs=tuple(lhs),
        rhs=tuple(rhs),
        senses=("=",) * (d + 1),
        nonneg=(True,) * m,
    )
    result = lp_optimize(problem)
    if isinstance(result, Infeasible):
        return None
    j = next(i for i, t in enumerate(result.point) if t > 0)
    return generators[j]


# ---------------------------------------------------------------------------
# double description


def dd_extreme_rays(normals, dim):
    """Extreme rays of {y : n . y >= 0 for every n in normals}.

    The normals must span the space (so the result is pointed).  Standard
    double description: a simplicial start from `dim` independent normals,
    then one halfspace at a time with the combinatorial adjacency test.
    """
    normals = [primitive(n) for n in normals]
    seen = dict.fromkeys(normals)
    normals = list(seen)
    if rank(normals) < dim:
        raise InputError("inequality normals do not span; the cone contains a line")

    chosen: list[int] = []
    basis_rows: list[tuple] = []
    for idx, n in enumerate(normals):
        if len(chosen) == dim:
            break
        if rank(basis_rows + [n]) > len(basis_rows):
            chosen.append(idx)
            basis_rows.append(n)
    inv = invert(basis_rows)
    rays = [primitive(col) for col in transpose(inv)]
    processed = list(chosen)
    remaining = [i for i in range(len(normals)) if i not in set(chosen)]

    for idx in remaining:
        h = normals[idx]
        values = [dot(h, r) for r in rays]
        if all(v >= 0 for v in values):
            processed.append(idx)
            continue
        tight = [
            frozenset(i for i in processed if dot(normals[i], r) == 0)
            for r in rays
        ]
        keep = [r for r, v in zip(rays, values) if v >= 0]
        new_rays = []
        plus = [i for i, v in enumerate(values) if v > 0]
        minus = [i for i, v in enumerate(values) if v < 0]
        for ip in plus:
            for im in minus:
                common = tight[ip] & tight[im]
                adjacent = True
                for io in range(len(rays)):
                    if io in (ip, im):
                        continue
                    if common <= tight[io]:
                        adjacent = False
                        break
                if adjacent:
                    combo = vec_sub(
                        vec_scale(rays[im], values[ip]),
                        vec_scale(rays[ip], values[im]),
                    )
                    new_rays.append(primitive(combo))
        rays = keep + [r for r in dict.fromkeys(new_rays) if r not in set(keep)]
        processed.append(idx)
        if not rays:
            raise InternalCheckError("double description lost all rays")
    return _canonical_rays(rays)


# ---------------------------------------------------------------------------
# PolyCone


class PolyCone:
    """Pointed, closed, full-dimensional rational polyhedral cone (V-rep).

    Generators are primitive, deduplicated, and sorted; they are not
    required to be irredundant (see reduce_to_extreme_rays).  Equality is
    equality of generator sets.
    """

    __slots__ = ("dim", "generators", "_facets")

    def __init__(self, rays, *, validate: bool = True):
        rays = list(rays)
        if not rays:
            raise InputError("a cone needs at least one generator")
        dims = {len(r) for r in rays}
        if len(dims) != 1:
            raise InputError("generators of mixed dimension")
        self.dim = dims.pop()
        if self.dim == 0:
            raise InputError("ambient dimension must be positive")
        self.generators = _canonical_rays(rays)
        self._facets = None
        if validate:
            if rank(self.generators) < self.dim:
                raise InputError(
                    f"generators span a {rank(self.generators)}-dimensional subspace "
                    f"of R^{self.dim}; cone must be full-dimensional"
                )
            line = _line_in_cone(self.generators)
            if line is not None:
                raise InputError(f"cone is not pointed: it contains the line through {line}")

    def __eq__(self, other):
        return (
            isinstance(other, PolyCone)
            and self.dim == other.dim
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.dim, self.generators))

    def __repr__(self):
        return f"PolyCone(dim={self.dim}, rays={len(self.generators)})"

    # -- basic geometry ------------------------------------------------------

    def interior_point(self) -> tuple:
        """The sum of the generators; interior because they span."""
        total = [ZERO] * self.dim
        for g in self.generators:
            total = [a + b for a, b in zip(total, g)]
        return tuple(total)

    def facets(self) -> tuple:
        """Inner-pointing facet normals (extreme rays of the dual), cached."""
        if self._facets is None:
            computed = dd_extreme_rays(self.generators, self.dim)
            for f in computed:
                if any(dot(f, g) < 0 for g in self.generators):
                    raise InternalCheckError("facet normal negative on a generator")
            self._facets = computed
        return self._facets

    def contains(self, v) -> bool:
        v = qvec(v)
        if len(v) != self.dim:
            raise InputError(f"point has dimension {len(v)}, cone has {self.dim}")
        point, _ = _conic_combination(self.generators, v)
        return point is not None

    def is_interior(self, v) -> bool:
        """Exact strict-interior test via max{t : v - t * p_int in cone} > 0."""
        v = qvec(v)
        if len(v) != self.dim:
            raise InputError(f"point has dimension {len(v)}, cone has {self.dim}")
        p = self.interior_point()
        m = len(self.generators)
        lhs = tuple(
            tuple(g[i] for g in self.generators) + (p[i],) for i in range(self.dim)
        )
        problem = LPProblem(
            objective=(ZERO,) * m + (ONE,),
            lhs=lhs,
            rhs=v,
            senses=("=",) * self.dim,
            nonneg=(True,) * m + (False,),
        )
        result = lp_optimize(problem)
        if isinstance(result, Infeasible):
            return False
        if isinstance(result, Unbounded):
            raise InternalCheckError("interiority LP unbounded on a pointed cone")
        return result.value > 0


def membership(cone: PolyCone, v) -> MembershipResult:
    """Exact membership with certificate.

    Nonzero members report 'inside' (a generator is inside its own cone),
    the apex reports 'boundary', and non-members report 'outside' together
    with an exact separating functional h: h >= 0 on the cone, h(v) < 0.
    """
    v = qvec(v)
    if len(v) != cone.dim:
        raise InputError(f"point has dimension {len(v)}, cone has {cone.dim}")
    point, separator = _conic_combination(cone.generators, v)
    if point is None:
        return MembershipResult(kind="outside", separator=separator)
    if all(x == 0 for x in v):
        return MembershipResult(kind="boundary")
    return MembershipResult(kind="inside")


def dual_cone(cone: PolyCone) -> PolyCone:
    """Extreme rays of {y : <y, x> >= 0 for all x in cone}, by double description."""
    rays = dd_extreme_rays(cone.generators, cone.dim)
    return PolyCone(rays, validate=False)


def reduce_to_extreme_rays(generators, *, dim: Optional[int] = None) -> PolyCone:
    """Drop generators lying in the cone of the others; keeps exactly the
    extreme rays.  Raises InputError (naming a line) on non-pointed input."""
    gens = _canonical_rays(generators)
    if dim is None:
        dim = len(gens[0])
    if rank(gens) < dim:
        raise InputError("generators do not span the ambient space")
    line = _line_in_cone(gens)
    if line is not None:
        raise InputError(f"cone is not pointed: it contains the line through {line}")
    current = list(gens)
    i = 0
    while i < len(current):
        others = current[:i] + current[i + 1 :]
        point, _ = _conic_combination(others, current[i])
        if point is not None:
            current.pop(i)
        else:
            i += 1
    return PolyCone(current, validate=False)


def product_cone(a: PolyCone, b: PolyCone) -> PolyCone:
    """Cartesian product, generated by (g, 0) and (0, h)."""
    zeros_a = (ZERO,) * a.dim
    zeros_b = (ZERO,) * b.dim
    rays = [g + zeros_b for g in a.generators] + [zeros_a + h for h in b.generators]
    return PolyCone(rays, validate=False)


# ---------------------------------------------------------------------------
# marked cones and convex bodies


class MarkedCone:
    """A cone with a grading functional g (positive off the apex) and a
    section point s1 = s(1), strictly interior, with g(s1) = 1."""

    __slots__ = ("cone", "grading", "section")

    def __init__(self, cone: PolyCone, grading, section, *, validate: bool = True):
        self.cone = cone
        self.grading = qvec(grading)
        self.section = qvec(section)
        if len(self.grading) != cone.dim or len(self.section) != cone.dim:
            raise InputError("grading/section dimension mismatch")
        if validate:
            for g in cone.generators:
                if dot(self.grading, g) <= 0:
                    raise InputError(f"grading is not positive on generator {g}")
            if dot(self.grading, self.section) != 1:
                raise InputError("grading must evaluate to 1 at the section point")
            if not cone.is_interior(self.section):
                raise InputError("section point is not strictly interior")

    def __eq__(self, other):
        return (
            isinstance(other, MarkedCone)
            and self.cone == other.cone
            and self.grading == other.grading
            and self.section == other.section
        )

    def __repr__(self):
        return f"MarkedCone({self.cone!r})"


class ConvexBody:
    """Full-dimensional polytope with 0 strictly interior, as a vertex list.

    Vertices are deduplicated and sorted; with validate=True each vertex is
    certified extreme by LP and the origin certified interior.
    """

    __slots__ = ("dim", "vertices")

    def __init__(self, vertices, *, validate: bool = True):
        vertices = [qvec(v) for v in vertices]
        if not vertices:
            raise InputError("a body needs at least one vertex")
        dims = {len(v) for v in vertices}
        if len(dims) != 1:
            raise InputError("vertices of mixed dimension")
        self.dim = dims.pop()
        self.vertices = tuple(sorted(dict.fromkeys(vertices)))
        if validate:
            if not _spans_affinely(self.vertices, self.dim):
                raise InputError(
                    "vertices span a proper affine subspace; the body must be full-dimensional"
                )
            if _origin_interior_margin(self.vertices, self.dim) <= 0:
                raise InputError("the origin is not strictly interior to the hull")
            for i in range(len(self.vertices)):
                others = self.vertices[:i] + self.vertices[i + 1 :]
                if others and _in_hull(others, self.vertices[i]):
                    raise InputError(f"vertex {self.vertices[i]} is not extreme")

    @classmethod
    def from_points(cls, points) -> "ConvexBody":
        """Hull of arbitrary points: reduces to the extreme ones first."""
        pts = list(dict.fromkeys(qvec(p) for p in points))
        if not pts:
            raise InputError("no points given")
        i = 0
        while i < len(pts):
            others = pts[:i] + pts[i + 1 :]
            if others and _in_hull(others, pts[i]):
                pts.pop(i)
            else:
                i += 1
        body = cls(pts, validate=False)
        if not _spans_affinely(body.vertices, body.dim):
            raise InputError(
                "points span a proper affine subspace; the hull must be full-dimensional"
            )
        if _origin_interior_margin(body.vertices, body.dim) <= 0:
            raise InputError("the origin is not strictly interior to the hull")
        return body

    def __eq__(self, other):
        return (
            isinstance(other, ConvexBody)
            and self.dim == other.dim
            and self.vertices == other.vertices
        )

    def __hash__(self):
        return hash((self.dim, self.vertices))

    def __repr__(self):
        return f"ConvexBody(dim={self.dim}, vertices={len(self.vertices)})"

    def contains(self, point) -> bool:
        return _in_hull(self.vertices, qvec(point))

    def support(self, direction, constant=ZERO):
        """Exact max of <direction, x> + constant over the body, with an argmax vertex."""
        direction = qvec(direction)
        if len(direction) != self.dim:
            raise InputError("direction dimension mismatch")
        best = None
        arg = None
        for v in self.vertices:
            val = dot(direction, v)
            if best is None or val > best:
                best, arg = val, v
        return best + Q(constant), arg


def _spans_affinely(points, d: int) -> bool:
    if len(points) < d + 1:
        return False
    base = points[0]
    return rank([vec_sub(p, base) for p in points[1:]]) == d


def _in_hull(points, x) -> bool:
    d = len(x)
    m = len(points)
    lhs = [tuple(p[i] for p in points) for i in range(d)]
    lhs.append((ONE,) * m)
    problem = LPProblem(
        objective=(ZERO,) * m,
        lhs=tuple(lhs),
        rhs=tuple(x) + (ONE,),
        senses=("=",) * (d + 1),
        nonneg=(True,) * m,
    )
    return isinstance(lp_optimize(problem), Optimal)


def _origin_interior_margin(points, d):
    """max eps with 0 = sum t_i p_i, sum t_i = 1, t_i >= eps; negative/None -> not interior."""
    m = len(points)
    # substitute t_i = u_i + eps, u >= 0, eps free
    sum_p = [ZERO] * d
    for p in points:
        sum_p = [a + b for a, b in zip(sum_p, p)]
    lhs = [tuple(p[i] for p in points) + (sum_p[i],) for i in range(d)]
    lhs.append((ONE,) * m + (Q(m),))
    problem = LPProblem(
        objective=(ZERO,) * m + (ONE,),
        lhs=tuple(lhs),
        rhs=(ZERO,) * d + (ONE,),
        senses=("=",) * (d + 1),
        nonneg=(True,) * m + (False,),
    )
    result = lp_optimize(problem)
    if isinstance(result, Infeasible):
        return Q(-1)
    if isinstance(result, Unbounded):
        raise InternalCheckError("interiority LP unbounded over a simplex of weights")
    return result.value


def lift_body(body: ConvexBody) -> MarkedCone:
    """Cone over {(v, 1)}, graded by the last coordinate, section (0,...,0,1)."""
    rays = [v + (ONE,) for v in body.vertices]
    cone = PolyCone(rays, validate=False)
    grading = (ZERO,) * body.dim + (ONE,)
    section = (ZERO,) * body.dim + (ONE,)
    return MarkedCone(cone, grading, section, validate=False)


def slice_cone(marked: MarkedCone) -> ConvexBody:
    """Vertices of {g = 1} recentered at the section point, in kernel-of-g
    coordinates.  slice_cone(lift_body(P)) == P exactly."""
    cone = reduce_to_extreme_rays(marked.cone.generators, dim=marked.cone.dim)
    g = marked.grading
    for r in cone.generators:
        if dot(g, r) <= 0:
            raise InputError(f"grading is not positive on generator {r}")
    _, kernel = rref_kernel([g])
    free_cols = []
    pivot = next(i for i, x in enumerate(g) if x != 0)
    free_cols = [i for i in range(len(g)) if i != pivot]
    points = []
    for r in cone.generators:
        scale = ONE / dot(g, r)
        p = vec_sub(vec_scale(r, scale), marked.section)
        if dot(g, p) != 0:
            raise InternalCheckError("recentered slice point left ker(g)")
        points.append(tuple(p[i] for i in free_cols))
    return ConvexBody(points, validate=True)


def product_marked(a: MarkedCone, b: MarkedCone) -> MarkedCone:
    """Categorical product: grading (g1 + g2) / 2, section (s1, s2)."""
    cone = product_cone(a.cone, b.cone)
    half = Q(1, 2)
    grading = tuple(x * half for x in a.grading) + tuple(x * half for x in b.grading)
    section = a.section + b.section
    return MarkedCone(cone, grading, section, validate=False)


def product_body(p: ConvexBody, q: ConvexBody) -> ConvexBody:
    return slice_cone(product_marked(lift_body(p), lift_body(q)))


def polar_body(body: ConvexBody) -> ConvexBody:
    """The polar {y : <y, x> >= -1 on the body}; compact since 0 is interior."""
    lifted = lift_body(body).cone
    dual = dual_cone(lifted)
    vertices = []
    for r in dual.generators:
        last = r[-1]
        if last <= 0:
            raise InternalCheckError("dual ray of a lifted body must have positive height")
        vertices.append(tuple(x / last for x in r[:-1]))
    return ConvexBody(vertices, validate=False)


# ---------------------------------------------------------------------------
# faces of bodies


@dataclass(frozen=True)
class Face:
    """A face of a polytope: its vertex-index set and an exact affine
    supporting functional (a, b), meaning <a, x> + b >= 0 on the body with
    equality exactly on the face."""

    vertex_indices: frozenset
    functional: tuple  # (a: vector, b: rational)


def body_facets(body: ConvexBody):
    """Facet functionals (a, b) with <a, v> + b >= 0, tight on each facet."""
    lifted = lift_body(body).cone
    normals = lifted.facets()
    return [(n[:-1], n[-1]) for n in normals]


def face_lattice(body: ConvexBody):
    """All faces (including the empty face and the body itself).

    Enumeration caps: refuses bodies with more than the configured number
    of vertices or facets; census sampling is the fallback at larger sizes.
    """
    nverts = len(body.vertices)
    if nverts > caps.cap("FACE_LATTICE_VERTICES"):
        raise SizeCapError(
            f"face lattice capped at {caps.cap('FACE_LATTICE_VERTICES')} vertices, "
            f"got {nverts}; sample the face census instead"
        )
    facets = body_facets(body)
    if len(facets) > caps.cap("FACE_LATTICE_FACETS"):
        raise SizeCapError(
            f"face lattice capped at {caps.cap('FACE_LATTICE_FACETS')} facets, "
            f"got {len(facets)}; sample the face census instead"
        )
    tight_sets = []
    for a, b in facets:
        tight = frozenset(
            i for i, v in enumerate(body.vertices) if dot(a, v) + b == 0
        )
        tight_sets.append(tight)

    all_vertices = frozenset(range(nverts))
    found = {all_vertices}
    queue = [all_vertices]
    while queue:
        current = queue.pop()
        for tight in tight_sets:
            meet = current & tight
            if meet not in found:
                found.add(meet)
                queue.append(meet)
    found.add(frozenset())

    faces = []
    zero_vec = (ZERO,) * body.dim
    for vset in found:
        if vset == all_vertices:
            functional = (zero_vec, ZERO)
        elif not vset:
            functional = (zero_vec, ONE)
        else:
            a_total = [ZERO] * body.dim
            b_total = ZERO
            for (a, b), tight in zip(facets, tight_sets):
                if vset <= tight:
                    a_total = [x + y for x, y in zip(a_total, a)]
                    b_total += b
            functional = (tuple(a_total), b_total)
            for i, v in enumerate(body.vertices):
                value = dot(functional[0], v) + functional[1]
                if (value == 0) != (i in vset):
                    raise InternalCheckError("face functional has the wrong zero set")
        faces.append(Face(vertex_indices=vset, functional=functional))
    faces.sort(key=lambda f: (len(f.vertex_indices), sorted(f.vertex_indices)))
    return faces


def is_face(body: ConvexBody, subset) -> bool:
    """Is conv(subset) a face of the body?  Decided by a supporting-functional LP."""
    subset = frozenset(subset)
    if not subset <= set(range(len(body.vertices))):
        raise InputError("subset must consist of vertex indices")
    inside = [body.vertices[i] for i in sorted(subset)]
    outside = [v for i, v in enumerate(body.vertices) if i not in subset]
    d = body.dim
    lhs = []
    senses = []
    rhs = []
    for v in inside:
        lhs.append(tuple(v) + (ONE,))
        senses.append("=")
        rhs.append(ZERO)
    for v in outside:
        lhs.append(tuple(v) + (ONE,))
        senses.append(">=")
        rhs.append(ONE)
    if not lhs:
        return True
    problem = LPProblem(
        objective=(ZERO,) * (d + 1),
        lhs=tuple(lhs),
        rhs=tuple(rhs),
        senses=tuple(senses),
    )
    return isinstance(lp_optimize(problem), Optimal)


# ---------------------------------------------------------------------------
# cone morphisms


class ConeMorphism:
    """A linear map given by a matrix (rows x cols = target dim x source dim)
    that carries the source cone into the target cone (checked on generators)."""

    __slots__ = ("matrix", "source", "target")

    def __init__(self, matrix, source: PolyCone, target: PolyCone, *, validate: bool = True):
        self.matrix = tuple(qvec(row) for row in matrix)
        self.source = source
        self.target = target
        if len(self.matrix) != target.dim or any(len(r) != source.dim for r in self.matrix):
            raise InputError(
                f"morphism matrix must be {target.dim} x {source.dim}"
            )
        if validate:
            for g in source.generators:
                image = tuple(dot(row, g) for row in self.matrix)
                if all(x == 0 for x in image):
                    continue
                if not target.contains(image):
                    raise InputError(f"matrix does not map generator {g} into the target cone")

    def apply(self, v) -> tuple:
        return tuple(dot(row, qvec(v)) for row in self.matrix)

    def __repr__(self):
        return f"ConeMorphism({self.source!r} -> {self.target!r})"


def dual_morphism(f: ConeMorphism) -> ConeMorphism:
    """The transpose, as a morphism between the dual cones."""
    return ConeMorphism(
        transpose(f.matrix), dual_cone(f.target), dual_cone(f.source), validate=True
    )
