"""Seeded random geometry shared by the test modules.

Cones are sampled with a positive last coordinate so they are pointed by
construction; bodies are recentered on their vertex average and rejected
until the origin is strictly interior.  Everything is deterministic given
the Random instance.
"""

import random

from cvxfun.cones import (
    ConeMorphism,
    ConvexBody,
    PolyCone,
    dual_cone,
    reduce_to_extreme_rays,
)
from cvxfun.errors import InputError
from cvxfun.qlinalg import Q, qvec


def random_pointed_cone(rng: random.Random, dim: int, max_rays: int) -> PolyCone:
    while True:
        count = rng.randint(dim, max_rays)
        rays = []
        for _ in range(count):
            head = [rng.randint(-4, 4) for _ in range(dim - 1)]
            rays.append(head + [rng.randint(1, 4)])
        try:
            return reduce_to_extreme_rays(rays, dim=dim)
        except InputError:
            continue


def random_body(rng: random.Random, dim: int, max_vertices: int) -> ConvexBody:
    while True:
        count = rng.randint(dim + 1, max_vertices)
        points = [
            tuple(Q(rng.randint(-4, 4)) for _ in range(dim)) for _ in range(count)
        ]
        n = len(points)
        center = tuple(sum(col, Q(0)) / n for col in zip(*points))
        centered = [tuple(x - c for x, c in zip(p, center)) for p in points]
        try:
            return ConvexBody.from_points(centered)
        except InputError:
            continue


def random_morphism(rng: random.Random, source: PolyCone, target: PolyCone) -> ConeMorphism:
    """A random element of the cone generated by (target ray) x (source dual ray)
    outer products; always a valid morphism."""
    duals = dual_cone(source).generators
    while True:
        matrix = [[Q(0)] * source.dim for _ in range(target.dim)]
        terms = rng.randint(1, 4)
        for _ in range(terms):
            d = rng.choice(target.generators)
            c = rng.choice(duals)
            w = rng.randint(0, 3)
            if w == 0:
                continue
            for i in range(target.dim):
                for j in range(source.dim):
                    matrix[i][j] += w * d[i] * c[j]
        if any(any(x != 0 for x in row) for row in matrix):
            return ConeMorphism(matrix, source, target, validate=True)
