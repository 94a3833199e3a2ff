"""Built-in verification suite over known reference results.

Each item recomputes a reference construction from scratch and compares
against frozen exact values: the tensor and symmetric squares of the
segment [-1, 1], the two separation counterexamples around the cone over
the square with its embedding into the nonnegative orthant, the exterior
square of the cube, product-face censuses, adjunction and duality round
trips, and finite convergence of the moment hierarchy.

Items return {"id", "pass", "values"} dicts with exact values rendered as
canonical rational strings; run_all() aggregates them.
"""

from __future__ import annotations

import itertools

from .cones import (
    ConeMorphism,
    ConvexBody,
    PolyCone,
    dual_cone,
    membership,
    reduce_to_extreme_rays,
)
from .functors import (
    Partition,
    adjunction_reindex,
    classify_morphism,
    hom_cone,
    permute_coordinates,
    schur_body,
    schur_dim,
    sym_body,
    sym_cone,
    sym_power_matrix,
    sym2_pair_with_product,
    sym2_trace_pairing,
    product_face_census,
    tensor_body,
    tensor_cone,
)
from .moments import PolyMap, finite_convergence
from .qlinalg import Q, dot, kron_mat, qmat, qstr, qvec

# ---------------------------------------------------------------------------
# reference data

SEGMENT = ConvexBody([[-1], [1]])

# The cone over the square [-1,1]^2 at height 1 and its strongly injective
# embedding into the nonnegative orthant of R^4 (rows are the facets).
SQUARE_CONE = PolyCone([[1, 1, 1], [-1, 1, 1], [1, -1, 1], [-1, -1, 1]])
ORTHANT4 = PolyCone([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
EMBEDDING = qmat([[-1, 0, 1], [1, 0, 1], [0, -1, 1], [0, 1, 1]])

# The tensor outlier: in the dual-dual cone but not in the tensor cone.
# Row-major 3x3 coordinates over x tensor y.
TENSOR_OUTLIER = qvec([-1, 1, 0, 1, 1, 0, 0, 0, 1])
TENSOR_SEPARATOR = qvec([1, -1, 0, -1, -1, 0, 0, 0, 2])
# Image under the doubled embedding: exactly these 16 coefficients.
TENSOR_IMAGE_EXPECTED = qvec([0, 2, 2, 0, 2, 0, 0, 2, 2, 0, 2, 0, 0, 2, 0, 2])

# The symmetric-square outlier, in monomial coordinates
# (x1^2, x1x2, x1x3, x2^2, x2x3, x3^2).
SYM_OUTLIER = qvec([-1, 2, 0, 1, 0, 1])
SYM_SEPARATOR = qvec([1, -2, 0, -1, 0, 2])
# Image in z-monomials (z1^2, z1z2, z1z3, z1z4, z2^2, z2z3, z2z4, z3^2, z3z4, z4^2).
SYM_IMAGE_EXPECTED = qvec([0, 4, 4, 0, 0, 0, 4, 2, 0, 2])

TETRAHEDRON_VERTICES = tuple(
    sorted(qvec(v) for v in [(1, 1, 1), (-1, 1, -1), (-1, -1, 1), (1, -1, -1)])
)
TRIANGLE_VERTICES = tuple(sorted(qvec(v) for v in [(2, 1), (0, -1), (-2, 1)]))


def _fmt(value):
    return qstr(value)


def _fmt_vec(v):
    return [qstr(x) for x in v]


# ---------------------------------------------------------------------------
# items


def check_tensor_square_of_segment():
    tb = tensor_body(SEGMENT, SEGMENT)
    got = tuple(sorted(tb.vertices))
    ok = got == TETRAHEDRON_VERTICES
    return {
        "id": "tensor-square-of-segment",
        "pass": ok,
        "values": {"vertices": [_fmt_vec(v) for v in got]},
    }


def check_sym_square_of_segment():
    sb = sym_body(SEGMENT, 2)
    got = tuple(sorted(sb.vertices))
    ok = got == TRIANGLE_VERTICES
    return {
        "id": "sym-square-of-segment",
        "pass": ok,
        "values": {
            "vertices": [_fmt_vec(v) for v in got],
            "coordinate_order": "(e1, e2); some displays use (e2, e1)",
        },
    }


def check_tensor_outlier(outlier=TENSOR_OUTLIER):
    """The outlier passes the dual-dual test but is separated from the
    tensor cone; the reference separator evaluates to -2 on it."""
    doubled = kron_mat(EMBEDDING, EMBEDDING)
    image = tuple(dot(row, outlier) for row in doubled)
    image_ok = image == tuple(TENSOR_IMAGE_EXPECTED) and all(x >= 0 for x in image)

    tcone = tensor_cone(SQUARE_CONE, SQUARE_CONE)
    result = membership(tcone, outlier)
    outside_ok = result.kind == "outside" and result.separator is not None

    sep_ok = all(dot(TENSOR_SEPARATOR, g) >= 0 for g in tcone.generators)
    pairing = dot(TENSOR_SEPARATOR, outlier)
    ok = image_ok and outside_ok and sep_ok and pairing == Q(-2)
    return {
        "id": "tensor-outlier-separation",
        "pass": ok,
        "values": {
            "doubled_image": _fmt_vec(image),
            "separator_pairing": _fmt(pairing),
            "lp_separator": _fmt_vec(result.separator) if result.separator else None,
            "dual_dual_member": image_ok,
            "tensor_cone_member": result.kind != "outside",
        },
    }


def check_sym_outlier():
    """Same story one level up: the quadratic outlier lies in the dual of
    Sym^2 of the dual cone but outside Sym^2 of the cone itself."""
    s2 = sym_power_matrix(EMBEDDING, 2)
    image = tuple(dot(row, SYM_OUTLIER) for row in s2)
    image_ok = image == tuple(SYM_IMAGE_EXPECTED) and all(x >= 0 for x in image)

    scone = sym_cone(SQUARE_CONE, 2)
    result = membership(scone, SYM_OUTLIER)
    outside_ok = result.kind == "outside"

    sep_nonneg = all(
        sym2_pair_with_product(SYM_SEPARATOR, v, w, 3) >= 0
        for v, w in itertools.combinations_with_replacement(SQUARE_CONE.generators, 2)
    )
    pairing = sym2_trace_pairing(SYM_SEPARATOR, SYM_OUTLIER, 3)
    # dual-route check: the outlier pairs nonnegatively with every generator
    # product of Sym^2 of the dual cone
    dual = dual_cone(SQUARE_CONE)
    dual_ok = all(
        sym2_pair_with_product(SYM_OUTLIER, f, g, 3) >= 0
        for f, g in itertools.combinations_with_replacement(dual.generators, 2)
    )
    ok = image_ok and outside_ok and sep_nonneg and dual_ok and pairing == Q(-2)
    return {
        "id": "sym-outlier-separation",
        "pass": ok,
        "values": {
            "sym_image": _fmt_vec(image),
            "separator_pairing": _fmt(pairing),
            "in_sym_of_dual_dual": dual_ok,
            "sym_cone_member": result.kind != "outside",
        },
    }


def check_exterior_square_of_cube():
    cube = ConvexBody(list(itertools.product((-1, 1), repeat=3)))
    shape = Partition((1, 1))
    sc = schur_body(cube, shape)
    negated = {tuple(-x for x in v) for v in sc.vertices}
    ok = (
        len(sc.vertices) == 12
        and sc.body.dim == 3
        and sc.body.dim == schur_dim(shape, 3)
        and negated == set(sc.vertices)
    )
    return {
        "id": "exterior-square-of-cube",
        "pass": ok,
        "values": {
            "vertex_count": len(sc.vertices),
            "ambient_dim": sc.body.dim,
            "centrally_symmetric": negated == set(sc.vertices),
        },
    }


def check_product_face_census():
    results = {}
    ok = True
    for n in (2, 3, 4):
        count, total = product_face_census(SEGMENT, n)
        expected = (n + 2) * (n + 1) // 2
        results[f"n={n}"] = {
            "product_faces": count,
            "expected_binom": expected,
            "total_nonempty_faces": total,
            "two_to_n_minus_1": 2**n - 1,
            "flagged_discrepancy": total != 2**n - 1,
        }
        ok = ok and count == expected
    return {"id": "product-face-census", "pass": ok, "values": results}


def check_embedding_classification():
    f = ConeMorphism(EMBEDDING, SQUARE_CONE, ORTHANT4)
    cls = classify_morphism(f)
    dual_cls = classify_morphism(
        ConeMorphism(
            tuple(zip(*EMBEDDING)), dual_cone(ORTHANT4), dual_cone(SQUARE_CONE)
        )
    )
    ok = (
        cls.strongly_injective
        and not cls.surjective
        and dual_cls.surjective
        and cls.strongly_injective == dual_cls.surjective
    )
    return {
        "id": "embedding-strongly-injective-duality",
        "pass": ok,
        "values": {
            "strongly_injective": cls.strongly_injective,
            "dual_surjective": dual_cls.surjective,
        },
    }


def check_adjunction_sample():
    a = PolyCone([[1, 0], [1, 2]])
    b = PolyCone([[0, 1], [3, 1]])
    c = PolyCone([[1, 1], [1, -1]])
    left = hom_cone(tensor_cone(a, b), c)
    inner = hom_cone(b, c)
    right = hom_cone(a, inner)
    perm = adjunction_reindex(a.dim, b.dim, c.dim)
    carried = PolyCone(
        [permute_coordinates(g, perm) for g in left.generators], validate=False
    )
    ok = carried == right
    return {
        "id": "hom-tensor-adjunction-sample",
        "pass": ok,
        "values": {"ray_count": len(left.generators)},
    }


def check_hierarchy_finite_convergence():
    seg_report = finite_convergence([[-1], [1]], PolyMap.coordinate_map(1), 2)
    square = [[1, 1], [-1, 1], [1, -1], [-1, -1]]
    square_map = PolyMap(2, [{(1, 0): 1}, {(0, 1): 1}, {(1, 1): 1}])
    sq_report = finite_convergence(square, square_map, 4)
    ok = (
        seg_report.verified
        and seg_report.k_star == 1
        and sq_report.verified
        and sq_report.k_star is not None
        and sq_report.k_star <= 4
    )
    return {
        "id": "hierarchy-finite-convergence",
        "pass": ok,
        "values": {
            "segment_k_star": seg_report.k_star,
            "square_k_star": sq_report.k_star,
            "square_supports_at_k_star": list(sq_report.support_values[sq_report.k_star])
            if sq_report.k_star is not None
            else None,
        },
    }


def check_dual_involution_sample():
    cone = PolyCone([[2, 1, 1], [-1, 2, 1], [0, -1, 1], [1, 0, 2]])
    ok = dual_cone(dual_cone(cone)) == reduce_to_extreme_rays(cone.generators)
    return {"id": "dual-involution-sample", "pass": ok, "values": {}}


ITEMS = (
    check_tensor_square_of_segment,
    check_sym_square_of_segment,
    check_tensor_outlier,
    check_sym_outlier,
    check_exterior_square_of_cube,
    check_product_face_census,
    check_embedding_classification,
    check_adjunction_sample,
    check_hierarchy_finite_convergence,
    check_dual_involution_sample,
)


def run_all():
    items = [fn() for fn in ITEMS]
    return {
        "kind": "report",
        "suite": "verify-paper",
        "items": items,
        "all_pass": all(item["pass"] for item in items),
    }
