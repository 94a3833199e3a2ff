"""Turning multilinear objectives into linear ones over functor bodies.

An objective of order n over bodies P_1, ..., P_n is a coefficient tensor
over the *lifted* coordinates of the factors (each point p in R^d is lifted
to (p, 1)), so affine and mixed lower-order terms ride along in one tensor.
Linearization rewrites it as an affine functional over the tensor body
(order 2) or the symmetric-power body (symmetric, any order), and the
rewrite is verified exactly on every vertex tuple before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import caps
from .cones import ConvexBody
from .errors import InputError, InternalCheckError, SizeCapError
from .functors import (
    SymBody,
    TensorBody,
    elementary_symmetric_images,
    monomials,
    sym_body,
    tensor_body,
)
from .qlinalg import ONE, ZERO, Q, dot, qvec


def _tensor_shape(nested, dims, depth=0):
    if depth == len(dims):
        return
    if len(nested) != dims[depth]:
        raise InputError(
            f"coefficient tensor has length {len(nested)} at depth {depth}, expected {dims[depth]}"
        )
    for item in nested:
        _tensor_shape(item, dims, depth + 1)


def _to_qtensor(nested, depth, order):
    if depth == order:
        return Q(nested)
    return tuple(_to_qtensor(x, depth + 1, order) for x in nested)


@dataclass(frozen=True)
class MultilinearObjective:
    """order-n coefficient tensor over lifted factor coordinates.

    coeffs[i1][i2]...[in] multiplies the product of lifted coordinates;
    index d_k (the last one of factor k) is the homogenizing 1.
    """

    order: int
    lift_dims: tuple
    coeffs: tuple
    symmetric: bool

    def __init__(self, order, lift_dims, coeffs, symmetric=False):
        order = int(order)
        lift_dims = tuple(int(d) for d in lift_dims)
        if order < 1 or len(lift_dims) != order:
            raise InputError("order must match the number of lifted factors")
        _tensor_shape(coeffs, lift_dims)
        coeffs = _to_qtensor(coeffs, 0, order)
        if symmetric:
            if len(set(lift_dims)) != 1:
                raise InputError("a symmetric objective needs equal factor dimensions")
            for idx in itertools.product(range(lift_dims[0]), repeat=order):
                v = _tensor_entry(coeffs, idx)
                for perm in itertools.permutations(idx):
                    if _tensor_entry(coeffs, perm) != v:
                        raise InputError(
                            "coefficient tensor is not invariant under factor permutations"
                        )
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "lift_dims", lift_dims)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "symmetric", bool(symmetric))

    def evaluate(self, points):
        """Exact value at one point per factor (unlifted coordinates)."""
        if len(points) != self.order:
            raise InputError("one point per factor required")
        lifted = []
        for p, dim in zip(points, self.lift_dims):
            p = qvec(p)
            if len(p) != dim - 1:
                raise InputError("point dimension does not match the lift")
            lifted.append(p + (ONE,))
        total = ZERO
        for idx in itertools.product(*(range(d) for d in self.lift_dims)):
            c = _tensor_entry(self.coeffs, idx)
            if c == 0:
                continue
            prod = c
            for vec, i in zip(lifted, idx):
                prod *= vec[i]
                if prod == 0:
                    break
            total += prod
        return total


def _tensor_entry(coeffs, idx):
    cur = coeffs
    for i in idx:
        cur = cur[i]
    return cur


@dataclass(frozen=True)
class LinearizedProgram:
    """An affine functional <functional, x> + constant over a functor body,
    exactly equal to the source objective on the corresponding tuples."""

    functional: tuple
    constant: object
    body: object  # TensorBody or SymBody


def linearize_tensor(t: MultilinearObjective, p: ConvexBody, q: ConvexBody) -> LinearizedProgram:
    """Order-2 objective -> affine functional over the tensor body
    (coordinates p | q | p tensor q)."""
    if t.order != 2:
        raise InputError("linearize_tensor needs an order-2 objective")
    d1, d2 = p.dim, q.dim
    if t.lift_dims != (d1 + 1, d2 + 1):
        raise InputError(
            f"objective lift dims {t.lift_dims} do not match bodies of dims {d1}, {d2}"
        )
    body = tensor_body(p, q)
    c = t.coeffs
    functional = (
        tuple(c[i][d2] for i in range(d1))
        + tuple(c[d1][j] for j in range(d2))
        + tuple(c[i][j] for i in range(d1) for j in range(d2))
    )
    constant = c[d1][d2]
    for v in p.vertices:
        for w in q.vertices:
            coords = v + w + tuple(a * b for a in v for b in w)
            got = dot(functional, coords) + constant
            want = t.evaluate((v, w))
            if got != want:
                raise InternalCheckError("tensor linearization identity failed at a vertex pair")
    return LinearizedProgram(functional=functional, constant=constant, body=body)


def linearize_sym(t: MultilinearObjective, p: ConvexBody) -> LinearizedProgram:
    """Symmetric order-n objective -> affine functional over Sym^n(P).

    With the monomial-coefficient convention for symmetric products the
    weights can be read straight out of the coefficient tensor: the weight
    of the degree-j monomial alpha is the tensor entry whose index multiset
    consists of alpha's variables plus n-j homogenizing indices.
    """
    if not t.symmetric:
        raise InputError("linearize_sym needs an objective flagged symmetric")
    d = p.dim
    n = t.order
    if t.lift_dims != (d + 1,) * n:
        raise InputError("objective lift dims do not match the body")
    body = sym_body(p, n)
    functional = []
    for j in range(1, n + 1):
        for alpha in monomials(d, j):
            idx = []
            for var, e in enumerate(alpha):
                idx.extend([var] * e)
            idx.extend([d] * (n - j))
            functional.append(_tensor_entry(t.coeffs, tuple(idx)))
    functional = tuple(functional)
    constant = _tensor_entry(t.coeffs, (d,) * n)
    count = len(p.vertices) ** n
    if count > caps.cap("TUPLE_ENUMERATION"):
        raise SizeCapError(f"{count} verification tuples exceed the enumeration cap")
    for tup in itertools.product(p.vertices, repeat=n):
        got = dot(functional, elementary_symmetric_images(tup, n)) + constant
        want = t.evaluate(tup)
        if got != want:
            raise InternalCheckError("symmetric linearization identity failed at a vertex tuple")
    return LinearizedProgram(functional=functional, constant=constant, body=body)


def brute_force_max(t: MultilinearObjective, vertex_lists: Sequence[Sequence]):
    """Exact maximum of the objective over all vertex tuples.

    A multilinear map attains its maximum over a product of polytopes at a
    vertex tuple, so this is the exact optimum over the product of hulls.
    """
    if len(vertex_lists) != t.order:
        raise InputError("one vertex list per factor required")
    total = 1
    for lst in vertex_lists:
        total *= len(lst)
    if total > caps.cap("TUPLE_ENUMERATION"):
        raise SizeCapError(f"{total} tuples exceed the enumeration cap")
    best = None
    arg = None
    for tup in itertools.product(*vertex_lists):
        value = t.evaluate(tup)
        if best is None or value > best:
            best, arg = value, tup
    return best, arg


def lp_max_over_body(c, body: ConvexBody, constant=ZERO):
    """Exact max of <c, x> + constant over a V-polytope, attained at a vertex."""
    return body.support(c, constant)
