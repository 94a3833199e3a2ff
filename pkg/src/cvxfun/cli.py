"""The `cvxfun` command line front end.

One binary, subcommand style; all I/O is JSON documents through files or
stdin/stdout (`-`).  Documents carry a kind tag, a payload, and a
provenance block (tool version, command line, seed) sufficient to
reproduce the output byte for byte.  Rationals serialize as bare integers
or lowest-terms "p/q" strings; dumps are canonical (sorted keys, compact
separators, trailing newline), so round trips are byte-identical.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 size cap.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys

from . import __version__, verify
from .cones import (
    ConvexBody,
    MarkedCone,
    PolyCone,
    dual_cone,
    polar_body,
    product_body,
    product_cone,
    product_marked,
)
from .errors import InputError, NumericalError, SizeCapError
from .functors import (
    Partition,
    hom_cone,
    schur_body,
    sym_body,
    sym_cone,
    tensor_body,
    tensor_cone,
)
from .linearizer import (
    MultilinearObjective,
    brute_force_max,
    linearize_sym,
    linearize_tensor,
    lp_max_over_body,
)
from .moments import (
    DEFAULT_BOX_BOUND,
    DEFAULT_TOL,
    BoxLebesgue,
    FinitePoints,
    PolyMap,
    assemble_pencil,
    finite_convergence,
    qk_maximize,
    qk_polar_membership,
)
from .qlinalg import Q, parse_rational, qstr, qvec


# ---------------------------------------------------------------------------
# JSON encoding of exact data


def encode_rational(q):
    q = Q(q)
    if q.denominator == 1:
        return int(q.numerator)
    return qstr(q)


def encode_vector(v):
    return [encode_rational(x) for x in v]


def encode_matrix(m):
    return [encode_vector(row) for row in m]


def decode_vector(data):
    return qvec(parse_rational(x) for x in data)


def canonical_dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def provenance(args, extra=None):
    block = {
        "tool": f"cvxfun {__version__}",
        "command": list(getattr(args, "_argv", [])),
        "seed": getattr(args, "seed", None),
    }
    if extra:
        block.update(extra)
    return block


def cone_doc(cone: PolyCone, args, extra=None):
    return {
        "kind": "cone",
        "dim": cone.dim,
        "rays": encode_matrix(cone.generators),
        "provenance": provenance(args, extra),
    }


def body_doc(body: ConvexBody, args, extra=None):
    return {
        "kind": "body",
        "dim": body.dim,
        "vertices": encode_matrix(body.vertices),
        "provenance": provenance(args, extra),
    }


def marked_doc(marked: MarkedCone, args, extra=None):
    return {
        "kind": "marked-cone",
        "cone": {"dim": marked.cone.dim, "rays": encode_matrix(marked.cone.generators)},
        "grading": encode_vector(marked.grading),
        "section": encode_vector(marked.section),
        "provenance": provenance(args, extra),
    }


def read_document(path: str) -> dict:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError(f"{path} is not a cvxfun document (missing kind)")
    return doc


def write_document(doc: dict, path) -> None:
    text = canonical_dumps(doc)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def parse_body(doc: dict) -> ConvexBody:
    if doc["kind"] != "body":
        raise InputError(f"expected a body document, got kind={doc['kind']!r}")
    vertices = [decode_vector(v) for v in doc["vertices"]]
    body = ConvexBody.from_points(vertices)
    return body


def parse_cone(doc: dict) -> PolyCone:
    if doc["kind"] != "cone":
        raise InputError(f"expected a cone document, got kind={doc['kind']!r}")
    return PolyCone([decode_vector(r) for r in doc["rays"]])


def parse_marked(doc: dict) -> MarkedCone:
    if doc["kind"] != "marked-cone":
        raise InputError(f"expected a marked-cone document, got kind={doc['kind']!r}")
    cone = PolyCone([decode_vector(r) for r in doc["cone"]["rays"]])
    return MarkedCone(cone, decode_vector(doc["grading"]), decode_vector(doc["section"]))


def parse_geometry(doc: dict):
    if doc["kind"] == "body":
        return parse_body(doc)
    if doc["kind"] == "cone":
        return parse_cone(doc)
    if doc["kind"] == "marked-cone":
        return parse_marked(doc)
    raise InputError(f"unsupported document kind {doc['kind']!r}")


def parse_objective(doc: dict) -> MultilinearObjective:
    if doc["kind"] != "objective":
        raise InputError(f"expected an objective document, got kind={doc['kind']!r}")

    def convert(node):
        if isinstance(node, list):
            return [convert(x) for x in node]
        return parse_rational(node)

    return MultilinearObjective(
        order=doc["order"],
        lift_dims=tuple(doc["lift_dims"]),
        coeffs=convert(doc["coeffs"]),
        symmetric=bool(doc.get("symmetric", False)),
    )


def parse_polymap(doc: dict) -> PolyMap:
    if doc["kind"] != "polymap":
        raise InputError(f"expected a polymap document, got kind={doc['kind']!r}")
    components = []
    for comp in doc["components"]:
        components.append([(tuple(term[0]), parse_rational(term[1])) for term in comp])
    return PolyMap(doc["vars"], components)


def parse_measure(args):
    if getattr(args, "points", None):
        doc = read_document(args.points)
        if doc["kind"] != "points":
            raise InputError(f"expected a points document, got kind={doc['kind']!r}")
        pts = [decode_vector(p) for p in doc["points"]]
        weights = doc.get("weights")
        return FinitePoints(pts, qvec(parse_rational(w) for w in weights) if weights else None), pts
    if getattr(args, "box", None):
        lower, upper = [], []
        for chunk in args.box.split(";"):
            lo, hi = chunk.split(",")
            lower.append(parse_rational(lo.strip()))
            upper.append(parse_rational(hi.strip()))
        return BoxLebesgue(lower, upper), None
    raise InputError("a measure is required: pass --points FILE or --box 'lo,hi;...'")


def _parse_rational_list(text: str):
    return qvec(parse_rational(chunk.strip()) for chunk in text.split(","))


# ---------------------------------------------------------------------------
# subcommands


def cmd_tensor(args) -> int:
    left = parse_geometry(read_document(args.inputs[0]))
    right = parse_geometry(read_document(args.inputs[1]))
    sources = {"functor": "tensor", "sources": list(args.inputs)}
    if isinstance(left, ConvexBody) and isinstance(right, ConvexBody):
        tb = tensor_body(left, right)
        sources["layout"] = "(p | q | row-major p tensor q)"
        write_document(body_doc(tb.body, args, sources), args.output)
        return 0
    if isinstance(left, PolyCone) and isinstance(right, PolyCone):
        cone = tensor_cone(left, right)
        sources["layout"] = "row-major tensor coordinates"
        write_document(cone_doc(cone, args, sources), args.output)
        return 0
    raise InputError("tensor needs two bodies or two cones")


def cmd_sym(args) -> int:
    geom = parse_geometry(read_document(args.inputs[0]))
    n = args.n
    if n is None:
        raise InputError("sym requires -n")
    extra = {"functor": "sym", "sources": list(args.inputs), "power": n}
    if isinstance(geom, ConvexBody):
        sb = sym_body(geom, n)
        extra["layout"] = "concatenated monomial blocks of Sym^1..Sym^n, descending lex"
        write_document(body_doc(sb.body, args, extra), args.output)
        return 0
    if isinstance(geom, PolyCone):
        cone = sym_cone(geom, n)
        extra["layout"] = "monomial basis of Sym^n, descending lex"
        write_document(cone_doc(cone, args, extra), args.output)
        return 0
    raise InputError("sym needs a body or a cone")


def cmd_schur(args) -> int:
    body = parse_body(read_document(args.inputs[0]))
    if not args.shape:
        raise InputError("schur requires --shape p1,p2,...")
    shape = Partition(tuple(int(p) for p in args.shape.split(",")))
    sc = schur_body(body, shape)
    extra = {
        "functor": "schur",
        "sources": list(args.inputs),
        "shape": list(shape.parts),
        "layout": "column-reduced symmetrizer-image basis coordinates",
    }
    write_document(body_doc(sc.body, args, extra), args.output)
    return 0


def cmd_hom(args) -> int:
    a = parse_cone(read_document(args.inputs[0]))
    b = parse_cone(read_document(args.inputs[1]))
    cone = hom_cone(a, b)
    extra = {
        "functor": "hom",
        "sources": list(args.inputs),
        "layout": f"row-major {b.dim} x {a.dim} matrices",
    }
    write_document(cone_doc(cone, args, extra), args.output)
    return 0


def cmd_dual(args) -> int:
    geom = parse_geometry(read_document(args.inputs[0]))
    extra = {"functor": "dual", "sources": list(args.inputs)}
    if isinstance(geom, PolyCone):
        write_document(cone_doc(dual_cone(geom), args, extra), args.output)
        return 0
    if isinstance(geom, ConvexBody):
        extra["layout"] = "polar {y : <y,x> >= -1}"
        write_document(body_doc(polar_body(geom), args, extra), args.output)
        return 0
    raise InputError("dual needs a body or a cone")


def cmd_product(args) -> int:
    left = parse_geometry(read_document(args.inputs[0]))
    right = parse_geometry(read_document(args.inputs[1]))
    extra = {"functor": "product", "sources": list(args.inputs)}
    if isinstance(left, PolyCone) and isinstance(right, PolyCone):
        write_document(cone_doc(product_cone(left, right), args, extra), args.output)
        return 0
    if isinstance(left, ConvexBody) and isinstance(right, ConvexBody):
        write_document(body_doc(product_body(left, right), args, extra), args.output)
        return 0
    if isinstance(left, MarkedCone) and isinstance(right, MarkedCone):
        write_document(marked_doc(product_marked(left, right), args, extra), args.output)
        return 0
    raise InputError("product needs two documents of the same kind")


def cmd_linearize(args) -> int:
    objective = parse_objective(read_document(args.inputs[0]))
    bodies = [parse_body(read_document(p)) for p in args.inputs[1:]]
    if not bodies:
        raise InputError("linearize needs the objective plus one or two bodies")
    if len(bodies) == 2:
        program = linearize_tensor(objective, bodies[0], bodies[1])
        route = "tensor"
    elif len(bodies) == 1:
        program = linearize_sym(objective, bodies[0])
        route = "sym"
    else:
        raise InputError("linearize accepts at most two factor bodies")
    value, vertex = lp_max_over_body(program.functional, program.body.body, program.constant)
    report = {
        "kind": "report",
        "suite": "linearize",
        "route": route,
        "functional": encode_vector(program.functional),
        "constant": encode_rational(program.constant),
        "body": {
            "dim": program.body.body.dim,
            "vertices": encode_matrix(program.body.body.vertices),
        },
        "lp_value": encode_rational(value),
        "lp_argmax": encode_vector(vertex),
        "provenance": provenance(args, {"sources": list(args.inputs)}),
    }
    exit_code = 0
    if args.check_bruteforce:
        lists = [b.vertices for b in bodies]
        if route == "sym":
            lists = lists * objective.order
        bf_value, bf_arg = brute_force_max(objective, lists)
        report["bruteforce_value"] = encode_rational(bf_value)
        report["equal"] = bf_value == value
        if not report["equal"]:
            exit_code = 1
    write_document(report, args.output)
    return exit_code


def _parse_k_range(text: str):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_hierarchy(args) -> int:
    measure, support_points = parse_measure(args)
    pmap = parse_polymap(read_document(args.map))
    tol = args.tol
    box_bound = parse_rational(args.box_bound) if isinstance(args.box_bound, str) else Q(args.box_bound)

    if args.finite_convergence:
        if support_points is None:
            raise InputError("finite convergence requires a finite --points measure")
        k_max = args.kmax if args.kmax is not None else 4
        report = finite_convergence(support_points, pmap, k_max, box_bound=box_bound, tol=tol)
        doc = {
            "kind": "report",
            "suite": "hierarchy-finite-convergence",
            "k_star": report.k_star,
            "verified": report.verified,
            "hull_vertices": encode_matrix(report.hull.vertices),
            "polar_vertices": encode_matrix(report.polar.vertices),
            "support_values": {str(k): list(v) for k, v in report.support_values.items()},
            "polar_vertices_pass_exact": {
                str(k): v for k, v in report.polar_vertices_exact.items()
            },
            "provenance": provenance(args),
        }
        write_document(doc, args.output)
        return 0 if report.verified else 1

    if args.k is None:
        raise InputError("hierarchy requires -k K or -k LO..HI")
    ks = _parse_k_range(args.k)
    pencils = {k: assemble_pencil(measure, pmap, k) for k in ks}

    queries = {}
    if args.maximize:
        direction = _parse_rational_list(args.maximize)
        per_k = {}
        for k in ks:
            res = qk_maximize(pencils[k], direction, box_bound=box_bound, tol=tol)
            per_k[str(k)] = {
                "value": res.value,
                "cuts": res.cuts,
                "box_active": res.box_active,
            }
        queries["maximize"] = {"direction": encode_vector(direction), "per_k": per_k}
    if args.query:
        point = _parse_rational_list(args.query)
        per_k = {}
        for k in ks:
            verdict = qk_polar_membership(pencils[k], point, box_bound=box_bound, tol=tol)
            per_k[str(k)] = {
                "verdict": verdict.kind,
                "support_value": verdict.support_value,
                "box_active": verdict.box_active,
            }
        queries["polar_membership"] = {"point": encode_vector(point), "per_k": per_k}

    if not queries and len(ks) == 1:
        pencil = pencils[ks[0]]
        doc = {
            "kind": "pencil",
            "k": pencil.k,
            "monomials": [list(m) for m in pencil.monomial_index],
            "M": [encode_matrix(pencil.m0)] + [encode_matrix(m) for m in pencil.ms],
            "provenance": provenance(args),
        }
        write_document(doc, args.output)
        return 0

    doc = {
        "kind": "report",
        "suite": "hierarchy",
        "k_values": ks,
        "pencil_sizes": {str(k): pencils[k].size for k in ks},
        "queries": queries,
        "provenance": provenance(args),
    }
    write_document(doc, args.output)
    return 0


def cmd_verify_paper(args) -> int:
    report = verify.run_all()
    report["provenance"] = provenance(args)
    write_document(report, args.output)
    return 0 if report["all_pass"] else 1


# ---------------------------------------------------------------------------
# generators


def hamiltonian_cycles(n: int):
    """Hamiltonian cycles of K_n up to rotation and reflection."""
    cycles = []
    for perm in itertools.permutations(range(1, n)):
        if n > 2 and perm[0] > perm[-1]:
            continue  # reflection representative
        cycles.append((0,) + perm)
    return cycles


def stsp_body(n: int) -> ConvexBody:
    """The symmetric traveling salesman polytope, recentered on the average
    of its vertices and written in exact coordinates for its span."""
    if not 3 <= n <= 7:
        raise SizeCapError(f"stsp generator supports 3 <= n <= 7, got {n}")
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edge_index = {e: k for k, e in enumerate(edges)}
    vectors = []
    for cycle in hamiltonian_cycles(n):
        v = [Q(0)] * len(edges)
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            v[edge_index[(min(a, b), max(a, b))]] = Q(1)
        vectors.append(tuple(v))
    centered, _ = _recenter(vectors)
    from .qlinalg import rref

    rank_, pivots, rows = rref(centered)
    if rank_ == 0:
        raise InputError(
            f"stsp({n}) has a single vertex; the recentered hull is not full-dimensional"
        )
    coords = []
    for v in centered:
        c = tuple(v[p] for p in pivots)
        # reconstruct to confirm v lies in the row span
        recon = [Q(0)] * len(v)
        for coef, row in zip(c, rows):
            for k, x in enumerate(row):
                recon[k] += coef * x
        if tuple(recon) != tuple(v):
            raise InputError("stsp vertex left the span during projection")
        coords.append(c)
    return ConvexBody.from_points(coords)


def _recenter(vectors):
    n = len(vectors)
    center = tuple(sum(col, Q(0)) / n for col in zip(*vectors))
    return [tuple(x - c for x, c in zip(v, center)) for v in vectors], center


def cmd_gen(args) -> int:
    if args.target != "stsp":
        raise InputError(f"unknown generator {args.target!r}; available: stsp")
    if args.n is None:
        raise InputError("gen stsp requires -n")
    body = stsp_body(args.n)
    extra = {
        "generator": "stsp",
        "cities": args.n,
        "cycles": math.factorial(args.n - 1) // 2,
    }
    write_document(body_doc(body, args, extra), args.output)
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvxfun",
        description=(
            "Exact functorial constructions on polyhedral convex sets, "
            "multilinear linearization, and moment-matrix outer approximations."
        ),
    )
    parser.add_argument("--version", action="version", version=f"cvxfun {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, inputs=0):
        if inputs:
            p.add_argument("inputs", nargs=inputs, help="input document(s), '-' for stdin")
        p.add_argument("-o", "--output", default=None, help="output file, '-' or omitted for stdout")
        p.add_argument("--seed", type=int, default=None, help="seed recorded in provenance")
        p.add_argument("--cap", type=int, default=None, help="override all enumeration caps")

    p = sub.add_parser("tensor", help="tensor product of two bodies or two cones")
    common(p, inputs=2)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("sym", help="symmetric power of a body or cone")
    common(p, inputs=1)
    p.add_argument("-n", type=int, default=None, help="power")
    p.set_defaults(func=cmd_sym)

    p = sub.add_parser("schur", help="Schur-functor image of a body")
    common(p, inputs=1)
    p.add_argument("--shape", default=None, help="partition, e.g. 2,1")
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("hom", help="cone of morphisms between two cones")
    common(p, inputs=2)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("dual", help="dual cone / polar body")
    common(p, inputs=1)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("product", help="categorical product")
    common(p, inputs=2)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("linearize", help="linearize a multilinear objective over factor bodies")
    common(p, inputs="+")
    p.add_argument("--check-bruteforce", action="store_true", help="verify against exact enumeration")
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("hierarchy", help="moment pencils and spectrahedral queries")
    common(p, inputs=0)
    p.add_argument("--points", default=None, help="points document for a finite measure")
    p.add_argument("--box", default=None, help="box measure, 'lo,hi;lo,hi;...'")
    p.add_argument("--map", required=True, help="polymap document")
    p.add_argument("-k", default=None, help="pencil degree K or range LO..HI")
    p.add_argument("--kmax", type=int, default=None, help="largest degree for finite convergence")
    p.add_argument("--maximize", default=None, help="direction 'c1,c2,...' to maximize over Q_k")
    p.add_argument("--query", default=None, help="point 'p1,p2,...' for polar membership")
    p.add_argument("--finite-convergence", action="store_true")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--box-bound", default=str(DEFAULT_BOX_BOUND))
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("verify-paper", help="run the built-in reference verification suite")
    common(p, inputs=0)
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("gen", help="generate demo inputs (stsp)")
    common(p, inputs=0)
    p.add_argument("target", help="what to generate: stsp")
    p.add_argument("-n", type=int, default=None, help="city count for stsp")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = ["cvxfun"] + argv
    if getattr(args, "cap", None):
        os.environ["CVXFUN_CAP"] = str(args.cap)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(canonical_dumps({"error": {"kind": "input", "message": str(exc)}}))
        return 2
    except SizeCapError as exc:
        sys.stderr.write(canonical_dumps({"error": {"kind": "size-cap", "message": str(exc)}}))
        return 3
    except NumericalError as exc:
        sys.stderr.write(canonical_dumps({"error": {"kind": "numerical", "message": str(exc)}}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
