"""Functorial constructions on polyhedral data.

Tensor products, symmetric powers, Hom cones and Schur-functor images of
convex bodies, together with induced maps on morphisms, supporting-face
witnesses, and the strongly-injective / dense-image classification.

Coordinate conventions (fixed once, used everywhere):

* Tensor coordinates flatten row-major: (i, j) -> i * dim_second + j.
* Sym^j(R^d) uses the monomial basis, ordered by exponent vector in
  descending lexicographic order (so x1^2, x1 x2, ..., xd^2).  The
  symmetric product of vectors v1 ... vj has, as coordinates, the
  coefficients of the polynomial  prod_i <v_i, x>  in that basis.
* Hom(A, B) lives in (target dim) x (source dim) matrices, row-major.
* Schur images live in coordinates over a basis of the Young-symmetrizer
  image obtained by column-reducing symmetrizer images of standard basis
  tensors taken in lexicographic order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, factorial
from typing import Optional, Sequence

from . import caps
from .cones import (
    ConeMorphism,
    ConvexBody,
    PolyCone,
    _conic_combination,
    dual_cone,
    face_lattice,
    membership,
    reduce_to_extreme_rays,
)
from .errors import InputError, InternalCheckError, SizeCapError
from .qlinalg import (
    ONE,
    ZERO,
    Q,
    dot,
    kron,
    kron_mat,
    qvec,
    rank,
    transpose,
)

# ---------------------------------------------------------------------------
# monomial bookkeeping for symmetric powers


def monomials(d: int, degree: int):
    """Exponent vectors of total degree `degree` in d variables,
    descending lexicographic order."""
    if degree == 0:
        return [(0,) * d]
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), degree, d)
    return out


def _poly_mul(p: dict, q: dict) -> dict:
    out = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, ZERO) + ca * cb
    return {k: v for k, v in out.items() if v != 0}


def _linear_form(v) -> dict:
    d = len(v)
    return {
        tuple(ONE if i == j else 0 for j in range(d)): v[i]
        for i in range(d)
        if v[i] != 0
    }


def sym_product_coords(vectors) -> tuple:
    """Coordinates of v1 . v2 . ... . vn in the monomial basis of Sym^n."""
    vectors = [qvec(v) for v in vectors]
    d = len(vectors[0])
    poly = {(0,) * d: ONE}
    for v in vectors:
        poly = _poly_mul(poly, _linear_form(v))
    return tuple(poly.get(m, ZERO) for m in monomials(d, len(vectors)))


def elementary_symmetric_images(points, n: int) -> tuple:
    """(e_1(p), ..., e_n(p)) of a tuple of points, as concatenated monomial
    blocks of Sym^1 through Sym^n."""
    points = [qvec(p) for p in points]
    d = len(points[0])
    # e[j] as polynomial dicts, built by the usual one-point-at-a-time recursion
    e = [{(0,) * d: ONE}] + [dict() for _ in range(n)]
    for p in points:
        lf = _linear_form(p)
        for j in range(min(n, len(points)), 0, -1):
            add = _poly_mul(e[j - 1], lf)
            acc = dict(e[j])
            for k, v in add.items():
                acc[k] = acc.get(k, ZERO) + v
            e[j] = {k: v for k, v in acc.items() if v != 0}
    coords = []
    for j in range(1, n + 1):
        coords.extend(e[j].get(m, ZERO) for m in monomials(d, j))
    return tuple(coords)


def sym_block_dims(d: int, n: int):
    return tuple(comb(d + j - 1, j) for j in range(1, n + 1))


# ---------------------------------------------------------------------------
# tensor product


@dataclass(frozen=True)
class TensorBody:
    """Conv{(p, q, p tensor q)} with coordinate layout (p | q | row-major p x q)."""

    body: ConvexBody
    source_left: ConvexBody
    source_right: ConvexBody

    @property
    def vertices(self):
        return self.body.vertices


def _check_factor_size(body: ConvexBody):
    limit = caps.cap("VERTICES_PER_FACTOR")
    if len(body.vertices) > limit:
        raise SizeCapError(
            f"factor body has {len(body.vertices)} vertices, cap is {limit}"
        )


def tensor_body(p: ConvexBody, q: ConvexBody) -> TensorBody:
    """The tensor product body.  Every product point (v, w, v tensor w) is
    extreme; construction reduces the candidate list and insists nothing
    was dropped."""
    _check_factor_size(p)
    _check_factor_size(q)
    points = [v + w + kron(v, w) for v in p.vertices for w in q.vertices]
    body = ConvexBody.from_points(points)
    if len(body.vertices) != len(points):
        raise InternalCheckError(
            "a tensor product of extreme points failed the irredundancy check"
        )
    return TensorBody(body=body, source_left=p, source_right=q)


def tensor_cone(a: PolyCone, b: PolyCone) -> PolyCone:
    """Cone generated by pairwise tensor products of generators (reduced)."""
    products = [kron(g, h) for g in a.generators for h in b.generators]
    return reduce_to_extreme_rays(products, dim=a.dim * b.dim)


# ---------------------------------------------------------------------------
# symmetric powers


@dataclass(frozen=True)
class SymBody:
    """Conv{(e_1(p1..pn), ..., e_n(p1..pn))} in concatenated monomial blocks."""

    body: ConvexBody
    source: ConvexBody
    n: int
    block_dims: tuple

    @property
    def vertices(self):
        return self.body.vertices


def sym_body(p: ConvexBody, n: int) -> SymBody:
    if n < 1:
        raise InputError("symmetric power requires n >= 1")
    _check_factor_size(p)
    count = comb(len(p.vertices) + n - 1, n)
    if count > caps.cap("TUPLE_ENUMERATION"):
        raise SizeCapError(f"{count} vertex multisets exceed the enumeration cap")
    images = [
        elementary_symmetric_images(tup, n)
        for tup in itertools.combinations_with_replacement(p.vertices, n)
    ]
    body = ConvexBody.from_points(images)
    return SymBody(body=body, source=p, n=n, block_dims=sym_block_dims(p.dim, n))


def sym_cone(a: PolyCone, n: int) -> PolyCone:
    """Sym^n of a cone: generated by n-fold products of generators (reduced)."""
    products = [
        sym_product_coords(tup)
        for tup in itertools.combinations_with_replacement(a.generators, n)
    ]
    return reduce_to_extreme_rays(products, dim=comb(a.dim + n - 1, n))


def sym_grading(g, n: int) -> tuple:
    """The functional on Sym^n coordinates evaluating to prod_i g(v_i) on
    products; its weight at monomial alpha is g^alpha."""
    g = qvec(g)
    out = []
    for m in monomials(len(g), n):
        w = ONE
        for gi, e in zip(g, m):
            w *= gi**e
        out.append(w)
    return tuple(out)


# ---------------------------------------------------------------------------
# Hom cones


def hom_cone(a: PolyCone, b: PolyCone) -> PolyCone:
    """Hom(A, B) = (A tensor B*)*, realized in row-major (dim B) x (dim A)
    matrix coordinates.  Every generator is checked to map A into B."""
    bstar = dual_cone(b)
    inequalities = [kron(g, phi) for g in a.generators for phi in bstar.generators]
    dual_rays = _dd_rays(inequalities, a.dim * b.dim)
    gens = []
    for ray in dual_rays:
        # ray indexes (i in A-coords, j in B-coords); the morphism matrix is
        # its transpose, flattened row-major.
        matrix = tuple(
            tuple(ray[i * b.dim + j] for i in range(a.dim)) for j in range(b.dim)
        )
        ConeMorphism(matrix, a, b, validate=True)
        gens.append(tuple(x for row in matrix for x in row))
    return PolyCone(gens, validate=False)


def _dd_rays(normals, dim):
    from .cones import dd_extreme_rays

    return dd_extreme_rays(normals, dim)


def hom_entry_matrix(flat, rows: int, cols: int) -> tuple:
    """Reshape a row-major Hom coordinate vector into its matrix."""
    if len(flat) != rows * cols:
        raise InputError("flat vector has the wrong length for this shape")
    return tuple(tuple(flat[r * cols + c] for c in range(cols)) for r in range(rows))


def adjunction_reindex(dim_a: int, dim_b: int, dim_c: int):
    """Permutation carrying Hom(A tensor B, C) coordinates onto
    Hom(A, Hom(B, C)) coordinates.

    Left side: matrices dC x (dA dB), entry (i, a*dB + b) at flat position
    i*dA*dB + a*dB + b.  Right side: matrices (dC dB) x dA, entry
    (i*dB + b, a) at flat position (i*dB + b)*dA + a.
    """
    perm = [0] * (dim_a * dim_b * dim_c)
    for i in range(dim_c):
        for a in range(dim_a):
            for b in range(dim_b):
                left = i * dim_a * dim_b + a * dim_b + b
                right = (i * dim_b + b) * dim_a + a
                perm[left] = right
    return tuple(perm)


def permute_coordinates(vec, perm) -> tuple:
    out = [ZERO] * len(vec)
    for src, dst in enumerate(perm):
        out[dst] = vec[src]
    return tuple(out)


# ---------------------------------------------------------------------------
# partitions, tableaux, Schur functors


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __init__(self, parts):
        parts = tuple(int(p) for p in parts)
        if not parts or any(p <= 0 for p in parts):
            raise InputError("partition parts must be positive")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InputError("partition parts must be weakly decreasing")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def rows(self) -> int:
        return len(self.parts)

    def conjugate(self) -> "Partition":
        width = self.parts[0]
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(width)))

    def cells(self):
        return [(i, j) for i, p in enumerate(self.parts) for j in range(p)]

    def __str__(self):
        return "(" + ",".join(str(p) for p in self.parts) + ")"


def ssyt_count(shape: Partition, d: int) -> int:
    """Semistandard tableaux with entries in {1..d}: weakly increasing along
    rows, strictly increasing down columns.  Direct enumeration."""
    cells = shape.cells()

    def rec(idx, filling):
        if idx == len(cells):
            return 1
        i, j = cells[idx]
        lo = 1
        if j > 0:
            lo = max(lo, filling[(i, j - 1)])
        if i > 0:
            lo = max(lo, filling[(i - 1, j)] + 1)
        total = 0
        for val in range(lo, d + 1):
            filling[(i, j)] = val
            total += rec(idx + 1, filling)
        filling.pop((i, j), None)
        return total

    return rec(0, {})


def hook_content_dim(shape: Partition, d: int) -> int:
    conj = shape.conjugate()
    value = Q(1)
    for i, j in shape.cells():
        hook = shape.parts[i] - j + conj.parts[j] - i - 1
        value *= Q(d + j - i, hook)
    if value.denominator != 1:
        raise InternalCheckError("hook content formula did not give an integer")
    return int(value)


def schur_dim(shape: Partition, d: int) -> int:
    """Dimension of the Schur image, by SSYT enumeration and by the
    hook content formula; the two must agree exactly."""
    by_tableaux = ssyt_count(shape, d)
    by_formula = hook_content_dim(shape, d)
    if by_tableaux != by_formula:
        raise InternalCheckError(
            f"SSYT count {by_tableaux} disagrees with hook content {by_formula} "
            f"for shape {shape} and d={d}"
        )
    return by_tableaux


def _canonical_tableau(shape: Partition):
    """Rows filled 1..n left to right, top to bottom (0-based entries)."""
    rows = []
    counter = 0
    for p in shape.parts:
        rows.append(list(range(counter, counter + p)))
        counter += p
    return rows


def _group_perms(blocks, n):
    """All permutations fixing the complement of each block, as tuples."""
    perms = [tuple(range(n))]
    for block in blocks:
        if len(block) < 2:
            continue
        new = []
        for base in perms:
            for images in itertools.permutations(block):
                p = list(base)
                for src, dst in zip(block, images):
                    p[src] = base[dst]
                new.append(tuple(p))
        perms = new
    return perms


def _perm_sign(p) -> int:
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class YoungSymmetrizer:
    """The operator a . b on V^{tensor n}: antisymmetrize down the columns of
    the canonical tableau, then symmetrize along its rows.

    This order realizes the column-exchange sign rule exactly: swapping two
    arguments lying in the same column negates the output.
    """

    def __init__(self, shape: Partition):
        self.shape = shape
        n = shape.n
        tableau = _canonical_tableau(shape)
        columns = []
        width = shape.parts[0]
        for j in range(width):
            col = [tableau[i][j] for i in range(shape.rows) if shape.parts[i] > j]
            columns.append(col)
        row_perms = _group_perms(tableau, n)
        col_perms = _group_perms(columns, n)
        terms: dict = {}
        for sigma in row_perms:
            for tau in col_perms:
                sign = _perm_sign(tau)
                composed = tuple(sigma[tau[i]] for i in range(n))
                terms[composed] = terms.get(composed, 0) + sign
        self.terms = [(p, Q(c)) for p, c in terms.items() if c != 0]
        self.n = n

    def apply_to_tuple(self, vectors):
        """Dense coordinates of h(v_1, ..., v_n) in V^{tensor n} (row-major)."""
        vectors = [qvec(v) for v in vectors]
        if len(vectors) != self.n:
            raise InputError(f"expected {self.n} vectors")
        d = len(vectors[0])
        size = d**self.n
        out = [ZERO] * size
        for perm, coef in self.terms:
            arranged = [None] * self.n
            for src in range(self.n):
                arranged[perm[src]] = vectors[src]
            for flat, idx in enumerate(itertools.product(range(d), repeat=self.n)):
                prod = coef
                for vec, i in zip(arranged, idx):
                    prod *= vec[i]
                    if prod == 0:
                        break
                if prod != 0:
                    out[flat] += prod
        return tuple(out)


class SchurImageBasis:
    """Column-reduced basis of the symmetrizer image inside V^{tensor n}."""

    def __init__(self, shape: Partition, d: int):
        size = d**shape.n
        if size > caps.cap("TENSOR_POWER_DIM"):
            raise SizeCapError(
                f"tensor power dimension {size} exceeds cap "
                f"{caps.cap('TENSOR_POWER_DIM')}"
            )
        self.shape = shape
        self.d = d
        self.operator = YoungSymmetrizer(shape)
        basis = []  # list of (pivot index, reduced dense row)
        unit = [ZERO] * d
        for idx in itertools.product(range(d), repeat=shape.n):
            vecs = []
            for i in idx:
                v = list(unit)
                v[i] = ONE
                vecs.append(tuple(v))
            image = list(self.operator.apply_to_tuple(vecs))
            self._reduce_in_place(image, basis, extend=True)
        self.rows = tuple(row for _, row in basis)
        self.pivots = tuple(p for p, _ in basis)
        expected = schur_dim(shape, d)
        if len(self.rows) != expected:
            raise InternalCheckError(
                f"image dimension {len(self.rows)} != semistandard count {expected}"
            )

    @staticmethod
    def _reduce_in_place(vec, basis, extend: bool):
        coords = []
        for pivot, row in basis:
            c = vec[pivot]
            coords.append(c)
            if c != 0:
                for k in range(len(vec)):
                    if row[k] != 0:
                        vec[k] -= c * row[k]
        if any(x != 0 for x in vec):
            if not extend:
                return None
            pivot = next(i for i, x in enumerate(vec) if x != 0)
            inv = ONE / vec[pivot]
            normalized = tuple(x * inv for x in vec)
            # keep existing rows reduced against the new one
            for pos, (p0, row0) in enumerate(basis):
                c = row0[pivot]
                if c != 0:
                    basis[pos] = (
                        p0,
                        tuple(x - c * y for x, y in zip(row0, normalized)),
                    )
            basis.append((pivot, normalized))
            coords.append(ONE)
            return coords
        return coords

    def coordinates(self, dense):
        """Image coordinates of a tensor known to lie in the image."""
        vec = list(dense)
        coords = []
        for pivot, row in zip(self.pivots, self.rows):
            c = vec[pivot]
            coords.append(c)
            if c != 0:
                for k in range(len(vec)):
                    if row[k] != 0:
                        vec[k] -= c * row[k]
        if any(x != 0 for x in vec):
            raise InternalCheckError("tensor does not lie in the symmetrizer image")
        return tuple(coords)

    def embed(self, coords) -> tuple:
        """Ambient tensor coordinates of an image-coordinate vector."""
        out = [ZERO] * (self.d**self.shape.n)
        for c, row in zip(coords, self.rows):
            if c != 0:
                for k, x in enumerate(row):
                    if x != 0:
                        out[k] += c * x
        return tuple(out)

    def image_of_tuple(self, vectors) -> tuple:
        return self.coordinates(self.operator.apply_to_tuple(vectors))


@dataclass(frozen=True)
class SchurBody:
    body: ConvexBody
    shape: Partition
    source: ConvexBody
    basis: SchurImageBasis

    @property
    def vertices(self):
        return self.body.vertices


def schur_body(p: ConvexBody, shape: Partition) -> SchurBody:
    """Conv of the symmetrizer images of all vertex tuples, in image coordinates."""
    if shape.rows > p.dim:
        raise InputError(
            f"shape {shape} has more rows than the ambient dimension {p.dim}: "
            "the Schur image is the zero space"
        )
    _check_factor_size(p)
    tuples = len(p.vertices) ** shape.n
    if tuples > caps.cap("TUPLE_ENUMERATION"):
        raise SizeCapError(f"{tuples} vertex tuples exceed the enumeration cap")
    basis = SchurImageBasis(shape, p.dim)
    images = set()
    for tup in itertools.product(p.vertices, repeat=shape.n):
        images.add(basis.image_of_tuple(tup))
    zero = (ZERO,) * len(basis.rows)
    images.discard(zero)
    body = ConvexBody.from_points(sorted(images))
    if body.dim != schur_dim(shape, p.dim):
        raise InternalCheckError("Schur body does not span the Schur image")
    return SchurBody(body=body, shape=shape, source=p, basis=basis)


# ---------------------------------------------------------------------------
# induced maps on morphisms


def induced_tensor_map(f: ConeMorphism, g: ConeMorphism) -> ConeMorphism:
    return ConeMorphism(
        kron_mat(f.matrix, g.matrix),
        tensor_cone(f.source, g.source),
        tensor_cone(f.target, g.target),
        validate=True,
    )


def sym_power_matrix(matrix, n: int) -> tuple:
    """Matrix of Sym^n(f) in monomial coordinates."""
    rows_out = len(matrix)
    cols_in = len(matrix[0])
    source_mons = monomials(cols_in, n)
    target_mons = monomials(rows_out, n)
    columns = []
    f_cols = transpose(matrix)  # images of source basis vectors
    for alpha in source_mons:
        poly = {(0,) * rows_out: ONE}
        for j, e in enumerate(alpha):
            for _ in range(e):
                poly = _poly_mul(poly, _linear_form(f_cols[j]))
        columns.append(tuple(poly.get(m, ZERO) for m in target_mons))
    return transpose(columns)


def induced_sym_map(f: ConeMorphism, n: int) -> ConeMorphism:
    return ConeMorphism(
        sym_power_matrix(f.matrix, n),
        sym_cone(f.source, n),
        sym_cone(f.target, n),
        validate=True,
    )


def induced_hom_post_map(f: ConeMorphism, c: PolyCone) -> ConeMorphism:
    """Hom(C, source f) -> Hom(C, target f) by postcomposition."""
    eye = tuple(
        tuple(ONE if i == j else ZERO for j in range(c.dim)) for i in range(c.dim)
    )
    return ConeMorphism(
        kron_mat(f.matrix, eye),
        hom_cone(c, f.source),
        hom_cone(c, f.target),
        validate=True,
    )


def induced_hom_pre_map(f: ConeMorphism, b: PolyCone) -> ConeMorphism:
    """Hom(target f, B) -> Hom(source f, B) by precomposition."""
    eye = tuple(
        tuple(ONE if i == j else ZERO for j in range(b.dim)) for i in range(b.dim)
    )
    return ConeMorphism(
        kron_mat(eye, transpose(f.matrix)),
        hom_cone(f.target, b),
        hom_cone(f.source, b),
        validate=True,
    )


def schur_map_matrix(matrix, shape: Partition, check_tuples=()) -> tuple:
    """Matrix of the induced Schur map between image coordinate spaces."""
    d_in = len(matrix[0])
    d_out = len(matrix)
    basis_in = SchurImageBasis(shape, d_in)
    basis_out = SchurImageBasis(shape, d_out)
    n = shape.n
    columns = []
    for row_vec in basis_in.rows:
        image = _apply_tensor_power(matrix, row_vec, d_in, d_out, n)
        columns.append(basis_out.coordinates(image))
    result = transpose(columns)
    for tup in check_tuples:
        lhs = basis_out.image_of_tuple([
            tuple(dot(r, qvec(v)) for r in matrix) for v in tup
        ])
        rhs_coords = basis_in.image_of_tuple(tup)
        rhs = tuple(dot(row, rhs_coords) for row in result)
        if lhs != rhs:
            raise InternalCheckError("Schur map failed the functoriality check")
    return result


def _apply_tensor_power(matrix, dense, d_in, d_out, n):
    out = [ZERO] * (d_out**n)
    for flat_in, idx_in in enumerate(itertools.product(range(d_in), repeat=n)):
        c = dense[flat_in]
        if c == 0:
            continue
        for flat_out, idx_out in enumerate(itertools.product(range(d_out), repeat=n)):
            prod = c
            for o, i in zip(idx_out, idx_in):
                prod *= matrix[o][i]
                if prod == 0:
                    break
            if prod != 0:
                out[flat_out] += prod
    return tuple(out)


def induced_map(f: ConeMorphism, tag: str, argument=None):
    """Dispatch: tag in {'tensor', 'sym', 'schur', 'hom-pre', 'hom-post'}.

    'tensor' takes a second morphism, 'sym' an integer, 'schur' a Partition
    (returns the plain matrix between image coordinates), 'hom-pre'/'hom-post'
    a cone to hom against.
    """
    if tag == "tensor":
        return induced_tensor_map(f, argument)
    if tag == "sym":
        return induced_sym_map(f, int(argument))
    if tag == "schur":
        return schur_map_matrix(f.matrix, argument)
    if tag == "hom-post":
        return induced_hom_post_map(f, argument)
    if tag == "hom-pre":
        return induced_hom_pre_map(f, argument)
    raise InputError(f"unknown functor tag {tag!r}")


# ---------------------------------------------------------------------------
# face witnesses


def _check_supporting(cone: PolyCone, phi, what: str):
    phi = qvec(phi)
    if len(phi) != cone.dim:
        raise InputError(f"{what} has dimension {len(phi)}, cone has {cone.dim}")
    for g in cone.generators:
        if dot(phi, g) < 0:
            raise InputError(f"{what} is negative on generator {g}; not supporting")
    return phi


def _check_grading(cone: PolyCone, g):
    g = qvec(g)
    if len(g) != cone.dim:
        raise InputError("grading dimension mismatch")
    for gen in cone.generators:
        if dot(g, gen) <= 0:
            raise InputError(f"grading is not positive on generator {gen}")
    return g


def tensor_face_witness(a: PolyCone, phi_a, g_a, b: PolyCone, phi_b, g_b) -> tuple:
    """phi_A tensor g_B + g_A tensor phi_B: supports F_A tensor F_B inside
    A tensor B, vanishing exactly on products of the two faces."""
    phi_a = _check_supporting(a, phi_a, "phi_A")
    phi_b = _check_supporting(b, phi_b, "phi_B")
    g_a = _check_grading(a, g_a)
    g_b = _check_grading(b, g_b)
    witness = tuple(
        x + y for x, y in zip(kron(phi_a, g_b), kron(g_a, phi_b))
    )
    for ga in a.generators:
        for gb in b.generators:
            value = dot(witness, kron(ga, gb))
            if value < 0:
                raise InternalCheckError("tensor face witness negative on a generator")
            expected_zero = dot(phi_a, ga) == 0 and dot(phi_b, gb) == 0
            if (value == 0) != expected_zero:
                raise InternalCheckError("tensor face witness has the wrong zero set")
    return witness


def sym_face_witness(a: PolyCone, phis, g) -> tuple:
    """A functional on Sym^n coordinates supporting the product face
    F_1 ... F_n of Sym^n(A).

    Distinct faces are grouped; a face appearing with multiplicity m
    contributes the symmetrization of chi^(n-m+1) tensor g^(m-1), where chi
    supports it.  The result is nonnegative on every generator product and
    vanishes on all products drawn from the face multiset; when the faces
    meet only at the apex the zero set is exactly the product face.
    """
    g = _check_grading(a, g)
    n = len(phis)
    checked = [_check_supporting(a, phi, f"phi_{i}") for i, phi in enumerate(phis)]
    # group by the face each functional cuts out
    classes: dict = {}
    for phi in checked:
        face = frozenset(
            i for i, gen in enumerate(a.generators) if dot(phi, gen) == 0
        )
        if face == frozenset(range(len(a.generators))):
            continue  # improper face: contributes nothing
        if face in classes:
            prev, mult = classes[face]
            classes[face] = (tuple(x + y for x, y in zip(prev, phi)), mult + 1)
        else:
            classes[face] = (tuple(phi), 1)

    d = a.dim
    mons = monomials(d, n)
    weights = [ZERO] * len(mons)
    for face, (chi, mult) in classes.items():
        t = n - mult + 1
        for pos, alpha in enumerate(mons):
            # coefficient of z^t in prod_j (g_j + z chi_j)^alpha_j
            poly = [ONE]
            for gj, cj, e in zip(g, chi, alpha):
                for _ in range(e):
                    nxt = [ZERO] * (len(poly) + 1)
                    for k, c in enumerate(poly):
                        nxt[k] += c * gj
                        nxt[k + 1] += c * cj
                    poly = nxt
            if t < len(poly):
                weights[pos] += poly[t]
    witness = tuple(weights)

    # validation on generator products
    for tup in itertools.combinations_with_replacement(a.generators, n):
        value = dot(witness, sym_product_coords(tup))
        if value < 0:
            raise InternalCheckError("symmetric face witness negative on a generator product")
    for face, (chi, mult) in classes.items():
        if not face:
            raise InputError("a supporting functional vanishes on no generator; face is empty")
    face_lists = []
    for face, (chi, mult) in classes.items():
        face_lists.extend([sorted(face)] * mult)
    while len(face_lists) < n:
        face_lists.append(list(range(len(a.generators))))
    for combo in itertools.product(*face_lists):
        tup = [a.generators[i] for i in combo]
        if dot(witness, sym_product_coords(tup)) != 0:
            raise InternalCheckError("symmetric face witness does not vanish on the face")
    return witness


# ---------------------------------------------------------------------------
# product-face census


def product_face_census(p: ConvexBody, n: int):
    """Count distinct faces of Sym^n(P) of the form F_1 ... F_n over all
    multisets of nonempty faces of P, against the total nonempty face count.

    Returns (product_face_count, total_nonempty_faces).
    """
    faces = [f.vertex_indices for f in face_lattice(p) if f.vertex_indices]
    sym = sym_body(p, n)
    sym_vertex_index = {v: i for i, v in enumerate(sym.vertices)}

    multiset_images: dict = {}
    for tup in itertools.combinations_with_replacement(range(len(p.vertices)), n):
        image = elementary_symmetric_images([p.vertices[i] for i in tup], n)
        if image in sym_vertex_index:
            multiset_images.setdefault(tup, sym_vertex_index[image])

    product_faces = set()
    for face_combo in itertools.combinations_with_replacement(faces, n):
        vertex_set = set()
        for tup, img in multiset_images.items():
            if _multiset_matches(tup, face_combo):
                vertex_set.add(img)
        product_faces.add(frozenset(vertex_set))
    total = sum(1 for f in face_lattice(sym.body) if f.vertex_indices)
    return len(product_faces), total


def _multiset_matches(tup, face_combo) -> bool:
    n = len(tup)
    for perm in itertools.permutations(range(n)):
        if all(tup[i] in face_combo[perm[i]] for i in range(n)):
            return True
    return False


# ---------------------------------------------------------------------------
# morphism classification


@dataclass(frozen=True)
class MorphismClass:
    strongly_injective: bool
    surjective: bool


def classify_morphism(f: ConeMorphism) -> MorphismClass:
    """Strongly injective: injective with f^{-1}(target) = source, decided by
    pulling the target's facets back and comparing H-representations.
    Surjective (= dense image for polyhedral data): the generator images
    generate the target."""
    injective = rank(transpose(f.matrix)) == f.source.dim
    strongly = injective
    if strongly:
        pulled = [
            tuple(dot(facet, col) for col in transpose(f.matrix))
            for facet in f.target.facets()
        ]
        # f^{-1}(target) = {x : pulled . x >= 0}; it contains the source.
        # Equality holds iff every facet of the source is a nonnegative
        # combination of pulled rows.
        for c in f.source.facets():
            point, _ = _conic_combination(pulled, c)
            if point is None:
                strongly = False
                break
    images = [f.apply(g) for g in f.source.generators]
    images = [im for im in images if any(x != 0 for x in im)]
    surjective = bool(images) and rank(images) == f.target.dim
    if surjective:
        for g in f.target.generators:
            point, _ = _conic_combination(images, g)
            if point is None:
                surjective = False
                break
    return MorphismClass(strongly_injective=strongly, surjective=surjective)


# ---------------------------------------------------------------------------
# the Sym^2 trace pairing (used by the quadratic counterexample checks)


def quad_matrix(coords, d: int) -> tuple:
    """Symmetric matrix of a quadratic form given in monomial coordinates."""
    mons = monomials(d, 2)
    m = [[ZERO] * d for _ in range(d)]
    half = Q(1, 2)
    for alpha, c in zip(mons, coords):
        support = [i for i, e in enumerate(alpha) if e]
        if len(support) == 1:
            i = support[0]
            m[i][i] = c
        else:
            i, j = support
            m[i][j] = c * half
            m[j][i] = c * half
    return tuple(tuple(row) for row in m)


def sym2_trace_pairing(u_coords, v_coords, d: int):
    """<fg, uv> = (f(u) g(v) + f(v) g(u)) / 2 extended bilinearly: the trace
    pairing of the two quadratic forms."""
    mu = quad_matrix(u_coords, d)
    mv = quad_matrix(v_coords, d)
    total = ZERO
    for i in range(d):
        for j in range(d):
            total += mu[i][j] * mv[i][j]
    return total


def sym2_pair_with_product(dual_coords, v, w, d: int):
    """Pairing of a dual quadratic form with the product v . w."""
    m = quad_matrix(dual_coords, d)
    return dot(qvec(v), tuple(dot(row, qvec(w)) for row in m))
