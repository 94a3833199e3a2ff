"""Exact rational linear algebra, linear programming, and PSD decisions.

Everything on the decision path is computed over arbitrary-precision
rationals (gmpy2.mpq when available, fractions.Fraction otherwise): row
reduction, a two-phase simplex with Bland's rule, and a square-root-free
positive-semidefiniteness test by symmetric diagonal pivoting.  Floating
point appears in exactly one place, sym_eig_approx, which backs cut
generation for the spectrahedral optimizer.

Vectors are tuples of rationals, matrices are tuples of row tuples; both
are immutable after construction and all functions here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError, InternalCheckError, NumericalError

try:
    from gmpy2 import mpq as _mpq

    _RAT = _mpq
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _RAT = Fraction

ZERO = _RAT(0)
ONE = _RAT(1)


def Q(value, den=None):
    """Coerce to an exact rational.  Accepts ints, rationals, and 'p/q' strings."""
    if den is not None:
        return _RAT(value, den)
    if isinstance(value, float):
        raise InputError(f"refusing to coerce float {value!r}; pass an int, rational or 'p/q' string")
    return _RAT(value)


def qstr(q) -> str:
    """Canonical string: bare integer when the denominator is 1, else 'p/q'."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(value):
    """Parse a JSON-level rational: int, or string 'p' / 'p/q'."""
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return _RAT(value)
    if isinstance(value, str):
        try:
            return _RAT(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not a rational: {value!r}")


# ---------------------------------------------------------------------------
# vectors and matrices


def qvec(values: Iterable) -> tuple:
    return tuple(Q(v) for v in values)


def qmat(rows: Iterable[Iterable]) -> tuple:
    out = tuple(qvec(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise InputError("ragged matrix")
    return out


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise InputError(f"dimension mismatch: {len(u)} vs {len(v)}")
    total = ZERO
    for a, b in zip(u, v):
        total += a * b
    return total


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def transpose(m: Sequence[Sequence]) -> tuple:
    return tuple(zip(*m)) if m else ()


def vec_add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(u: Sequence, s) -> tuple:
    return tuple(a * s for a in u)


def is_zero_vec(u: Sequence) -> bool:
    return all(a == 0 for a in u)


def is_symmetric(m: Sequence[Sequence]) -> bool:
    n = len(m)
    if any(len(r) != n for r in m):
        return False
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def kron(u: Sequence, v: Sequence) -> tuple:
    """Tensor product of vectors, row-major: index (i, j) -> i*len(v)+j."""
    return tuple(a * b for a in u for b in v)


def kron_mat(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    """Kronecker product acting on row-major flattened vectors."""
    rows = []
    for ra in a:
        for rb in b:
            rows.append(tuple(x * y for x in ra for y in rb))
    return tuple(rows)


# ---------------------------------------------------------------------------
# row reduction


def rref(matrix: Sequence[Sequence]):
    """Reduced row echelon form.  Returns (rank, pivot_columns, rows)."""
    rows = [list(qvec(r)) for r in matrix]
    if not rows:
        return 0, (), ()
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = ONE / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return r, tuple(pivots), tuple(tuple(row) for row in rows[:r])


def rank(matrix: Sequence[Sequence]) -> int:
    return rref(matrix)[0]


def rref_kernel(matrix: Sequence[Sequence]):
    """Exact kernel basis.  Returns (rank, [basis vectors]).

    Each basis vector carries a 1 in "its" free column and zeros in the
    other free columns, so coordinates in this basis can be read off.
    """
    m = qmat(matrix)
    if not m:
        raise InputError("empty matrix")
    ncols = len(m[0])
    rk, pivots, rows = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][free]
        basis.append(tuple(v))
    return rk, basis


def solve_unique(matrix: Sequence[Sequence], rhs: Sequence) -> tuple:
    """Solve A x = b when a solution exists; raises InputError otherwise.

    With a nontrivial kernel the particular solution with zero free
    coordinates is returned.
    """
    m = qmat(matrix)
    b = qvec(rhs)
    if len(m) != len(b):
        raise InputError("dimension mismatch in solve")
    ncols = len(m[0]) if m else 0
    aug = [list(row) + [bb] for row, bb in zip(m, b)]
    rk, pivots, rows = rref(aug)
    if ncols in pivots:
        raise InputError("inconsistent linear system")
    x = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][ncols]
    return tuple(x)


def invert(matrix: Sequence[Sequence]) -> tuple:
    m = qmat(matrix)
    n = len(m)
    if any(len(r) != n for r in m):
        raise InputError("inversion requires a square matrix")
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(m)]
    rk, pivots, rows = rref(aug)
    if rk < n or tuple(pivots) != tuple(range(n)):
        raise InputError("singular matrix")
    return tuple(tuple(row[n:]) for row in rows)


# ---------------------------------------------------------------------------
# linear programming


@dataclass(frozen=True)
class LPProblem:
    """max objective . x  subject to  lhs[i] . x  (senses[i])  rhs[i].

    senses entries are '<=', '=' or '>='.  nonneg[j] constrains x_j >= 0
    natively; other variables are free.  Optional box bounds are
    materialized as ordinary rows by `with_bounds`, so Farkas certificates
    always have one multiplier per row of the problem as stored.
    """

    objective: tuple
    lhs: tuple
    rhs: tuple
    senses: tuple
    nonneg: tuple

    def __init__(self, objective, lhs, rhs, senses, nonneg=None, bounds=None):
        objective = qvec(objective)
        lhs = qmat(lhs)
        rhs = qvec(rhs)
        senses = tuple(senses)
        nvars = len(objective)
        if len(lhs) != len(rhs) or len(lhs) != len(senses):
            raise InputError("row count mismatch between lhs, rhs and senses")
        if any(len(row) != nvars for row in lhs):
            raise InputError("objective length differs from constraint columns")
        if any(s not in ("<=", "=", ">=") for s in senses):
            raise InputError(f"bad sense in {senses}")
        if nonneg is None:
            nonneg = (False,) * nvars
        else:
            nonneg = tuple(bool(f) for f in nonneg)
            if len(nonneg) != nvars:
                raise InputError("nonneg flag count differs from variable count")
        if bounds is not None:
            lhs, rhs, senses, nonneg = _materialize_bounds(lhs, rhs, senses, nonneg, bounds, nvars)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "nonneg", nonneg)


def _materialize_bounds(lhs, rhs, senses, nonneg, bounds, nvars):
    if len(bounds) != nvars:
        raise InputError("bounds count differs from variable count")
    lhs, rhs, senses, nonneg = list(lhs), list(rhs), list(senses), list(nonneg)
    for j, bound in enumerate(bounds):
        if bound is None:
            continue
        lo, hi = bound
        unit = tuple(ONE if i == j else ZERO for i in range(nvars))
        if lo is not None:
            if Q(lo) == 0:
                nonneg[j] = True
            else:
                lhs.append(unit)
                rhs.append(Q(lo))
                senses.append(">=")
        if hi is not None:
            lhs.append(unit)
            rhs.append(Q(hi))
            senses.append("<=")
    return tuple(lhs), tuple(rhs), tuple(senses), tuple(nonneg)


@dataclass(frozen=True)
class Optimal:
    value: object
    point: tuple
    dual: tuple


@dataclass(frozen=True)
class Infeasible:
    certificate: tuple


@dataclass(frozen=True)
class Unbounded:
    ray: tuple


class _Tableau:
    """Dense simplex tableau over exact rationals, Bland's rule throughout."""

    def __init__(self, problem: LPProblem):
        nvars = len(problem.objective)
        m = len(problem.lhs)
        # column layout: per-variable columns first (split for free vars),
        # then slacks, then artificials.
        self.var_cols = []  # list of (var_index, sign)
        for j in range(nvars):
            self.var_cols.append((j, 1))
            if not problem.nonneg[j]:
                self.var_cols.append((j, -1))
        nstruct = len(self.var_cols)
        self.nslack = sum(1 for s in problem.senses if s != "=")
        self.ncols = nstruct + self.nslack + m
        self.art0 = nstruct + self.nslack
        self.m = m
        self.flips = []
        rows = []
        slack_at = 0
        for i in range(m):
            coefs = [ZERO] * self.ncols
            for cidx, (j, sign) in enumerate(self.var_cols):
                coefs[cidx] = problem.lhs[i][j] * sign
            if problem.senses[i] == "<=":
                coefs[nstruct + slack_at] = ONE
                slack_at += 1
            elif problem.senses[i] == ">=":
                coefs[nstruct + slack_at] = -ONE
                slack_at += 1
            b = problem.rhs[i]
            if b < 0:
                coefs = [-c for c in coefs]
                b = -b
                self.flips.append(-ONE)
            else:
                self.flips.append(ONE)
            coefs[self.art0 + i] = ONE
            coefs.append(b)
            rows.append(coefs)
        self.rows = rows
        self.basis = [self.art0 + i for i in range(m)]
        self.problem = problem

    # -- pivoting -----------------------------------------------------------

    def _pivot(self, pr: int, pc: int):
        row = self.rows[pr]
        inv = ONE / row[pc]
        if inv != 1:
            self.rows[pr] = row = [x * inv for x in row]
        for i in range(self.m):
            if i == pr:
                continue
            f = self.rows[i][pc]
            if f != 0:
                target = self.rows[i]
                self.rows[i] = [x - f * y for x, y in zip(target, row)]
        f = self.z[pc]
        if f != 0:
            self.z = [x - f * y for x, y in zip(self.z, row)]
            self.zval += f * row[-1]
        self.basis[pr] = pc

    def _run(self, barred) -> bool:
        """Bland simplex to optimality.  Returns False on unboundedness."""
        while True:
            enter = None
            for j in range(self.ncols):
                if j in barred:
                    continue
                if self.z[j] > 0:
                    enter = j
                    break
            if enter is None:
                return True
            leave = None
            best = None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > 0:
                    ratio = self.rows[i][-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best = ratio
                        leave = i
            if leave is None:
                self.unbounded_col = enter
                return False
            self._pivot(leave, enter)

    def _set_objective(self, costs):
        """Install reduced costs for `costs` given the current basis."""
        self.z = list(costs) + [ZERO] * (self.ncols - len(costs))
        self.zval = ZERO
        for i, v in enumerate(self.basis):
            f = self.z[v]
            if f != 0:
                row = self.rows[i]
                self.z = [x - f * y for x, y in zip(self.z, row)]
                self.zval += f * row[-1]
        # zval now equals costs_B . x_B with the sign convention
        # zval = sum of basic costs times rhs.

    def solve(self):
        # phase 1: maximize -sum(artificials)
        phase1 = [ZERO] * self.ncols
        for j in range(self.art0, self.art0 + self.m):
            phase1[j] = -ONE
        self._set_objective(phase1)
        arts = set(range(self.art0, self.art0 + self.m))
        self._run(barred=arts)
        if self.zval < 0:
            return self._extract_infeasible()
        # drive artificials out of the basis where possible
        for i in range(self.m):
            if self.basis[i] >= self.art0:
                pc = next(
                    (j for j in range(self.art0) if self.rows[i][j] != 0),
                    None,
                )
                if pc is not None:
                    self._pivot(i, pc)
        # phase 2
        costs = [ZERO] * self.ncols
        for cidx, (j, sign) in enumerate(self.var_cols):
            costs[cidx] = self.problem.objective[j] * sign
        self._set_objective(costs)
        if not self._run(barred=arts):
            return self._extract_unbounded()
        return self._extract_optimal()

    # -- solution extraction -------------------------------------------------

    def _x_from_basis(self) -> tuple:
        nvars = len(self.problem.objective)
        x = [ZERO] * nvars
        for i, v in enumerate(self.basis):
            if v < len(self.var_cols):
                j, sign = self.var_cols[v]
                x[j] += sign * self.rows[i][-1]
        return tuple(x)

    def _row_multipliers(self, costs) -> list:
        """y = costs_B . B^-1 read from the artificial columns."""
        y = []
        for i in range(self.m):
            col = self.art0 + i
            y.append(costs[col] - self.z[col])
        return y

    def _extract_optimal(self):
        x = self._x_from_basis()
        p = self.problem
        value = dot(p.objective, x)
        y = self._row_multipliers([ZERO] * self.ncols)
        dual = tuple(self.flips[i] * y[i] for i in range(self.m))
        _check_optimal(p, x, value, dual)
        return Optimal(value=value, point=x, dual=dual)

    def _extract_infeasible(self):
        phase1 = [ZERO] * self.ncols
        for j in range(self.art0, self.art0 + self.m):
            phase1[j] = -ONE
        y = self._row_multipliers(phase1)
        cert = tuple(-self.flips[i] * y[i] for i in range(self.m))
        _check_farkas(self.problem, cert)
        return Infeasible(certificate=cert)

    def _extract_unbounded(self):
        e = self.unbounded_col
        nvars = len(self.problem.objective)
        ray = [ZERO] * nvars
        if e < len(self.var_cols):
            j, sign = self.var_cols[e]
            ray[j] += sign
        for i, v in enumerate(self.basis):
            if v < len(self.var_cols):
                j, sign = self.var_cols[v]
                ray[j] += sign * (-self.rows[i][e])
        ray = tuple(ray)
        _check_ray(self.problem, ray)
        return Unbounded(ray=ray)


def _check_optimal(p: LPProblem, x, value, dual):
    for i, row in enumerate(p.lhs):
        lhs = dot(row, x)
        s = p.senses[i]
        ok = lhs <= p.rhs[i] if s == "<=" else lhs >= p.rhs[i] if s == ">=" else lhs == p.rhs[i]
        if not ok:
            raise InternalCheckError(f"optimal point violates row {i}")
        if s == "<=" and dual[i] < 0:
            raise InternalCheckError(f"dual sign violated at row {i}")
        if s == ">=" and dual[i] > 0:
            raise InternalCheckError(f"dual sign violated at row {i}")
    cols = transpose(p.lhs) if p.lhs else tuple(() for _ in p.objective)
    for j, cj in enumerate(p.objective):
        reduced = dot(cols[j], dual) if p.lhs else ZERO
        if p.nonneg[j]:
            if x[j] < 0:
                raise InternalCheckError(f"nonnegative variable {j} is negative")
            if reduced < cj:
                raise InternalCheckError(f"dual infeasible at variable {j}")
        elif reduced != cj:
            raise InternalCheckError(f"dual equality violated at free variable {j}")
    if dot(dual, p.rhs) != value:
        raise InternalCheckError("strong duality gap is nonzero")


def _check_farkas(p: LPProblem, cert):
    for i, s in enumerate(p.senses):
        if s == "<=" and cert[i] > 0:
            raise InternalCheckError("Farkas sign violated on a <= row")
        if s == ">=" and cert[i] < 0:
            raise InternalCheckError("Farkas sign violated on a >= row")
    cols = transpose(p.lhs)
    for j in range(len(p.objective)):
        combo = dot(cols[j], cert)
        if p.nonneg[j]:
            if combo > 0:
                raise InternalCheckError("Farkas combination positive on a nonnegative variable")
        elif combo != 0:
            raise InternalCheckError("Farkas combination nonzero on a free variable")
    if dot(cert, p.rhs) <= 0:
        raise InternalCheckError("Farkas certificate does not witness infeasibility")


def _check_ray(p: LPProblem, ray):
    if dot(p.objective, ray) <= 0:
        raise InternalCheckError("unbounded ray does not improve the objective")
    for i, row in enumerate(p.lhs):
        v = dot(row, ray)
        s = p.senses[i]
        if (s == "<=" and v > 0) or (s == ">=" and v < 0) or (s == "=" and v != 0):
            raise InternalCheckError(f"ray is not a feasible direction at row {i}")
    for j, flag in enumerate(p.nonneg):
        if flag and ray[j] < 0:
            raise InternalCheckError("ray drives a nonnegative variable negative")


def lp_optimize(problem: LPProblem):
    """Exact two-phase simplex (maximization).

    Returns Optimal(value, point, dual), Infeasible(certificate) or
    Unbounded(ray).  Every outcome is validated exactly before it is
    returned: optima against strong duality, certificates against the
    Farkas conditions, rays against direction feasibility.
    """
    return _Tableau(problem).solve()


# ---------------------------------------------------------------------------
# exact PSD decision


@dataclass(frozen=True)
class PSDDecision:
    is_psd: bool
    witness: Optional[tuple]  # satisfies w . S w < 0 exactly when not PSD


def _psd_witness(S: list, n: int):
    if n == 0:
        return None
    d = S[0][0]
    if d < 0:
        return [ONE] + [ZERO] * (n - 1)
    if d == 0:
        j = next((k for k in range(1, n) if S[0][k] != 0), None)
        if j is None:
            sub = [row[1:] for row in S[1:]]
            w = _psd_witness(sub, n - 1)
            return None if w is None else [ZERO] + w
        # principal 2x2 block [[0, a], [a, djj]] is indefinite; pick the
        # combination with value exactly -1.
        a = S[0][j]
        djj = S[j][j]
        w = [ZERO] * n
        w[0] = -(ONE + djj) / (2 * a)
        w[j] = ONE
        return w
    schur = [
        [S[i][k] - S[0][i] * S[0][k] / d for k in range(1, n)]
        for i in range(1, n)
    ]
    w = _psd_witness(schur, n - 1)
    if w is None:
        return None
    w0 = -sum((S[0][i + 1] * w[i] for i in range(n - 1)), ZERO) / d
    return [w0] + w


def psd_decide_exact(S: Sequence[Sequence]) -> PSDDecision:
    """Decide S >= 0 exactly by symmetric diagonal pivoting.

    A zero diagonal entry with a nonzero entry in its row yields the
    standard indefinite 2x2 witness; otherwise positive pivots are
    eliminated through exact Schur complements.  The witness w of a
    negative decision satisfies w . S w < 0 in exact arithmetic.
    """
    M = qmat(S)
    if not M or len(M) != len(M[0]):
        raise InputError("psd_decide_exact requires a square matrix")
    if not is_symmetric(M):
        raise InputError("psd_decide_exact requires a symmetric matrix")
    w = _psd_witness([list(r) for r in M], len(M))
    if w is None:
        return PSDDecision(is_psd=True, witness=None)
    value = dot(w, mat_vec(M, w))
    if value >= 0:
        raise InternalCheckError("indefiniteness witness failed exact validation")
    return PSDDecision(is_psd=False, witness=tuple(w))


def quadratic_form(S: Sequence[Sequence], v: Sequence):
    return dot(v, mat_vec(S, v))


# ---------------------------------------------------------------------------
# floating-point eigendecomposition (cut generation only)


def sym_eig_approx(S, tol: float = 1e-9):
    """Eigenvalues (ascending) and unit eigenvectors of a symmetric matrix.

    Residuals are checked against ||S v - mu v||_inf <= tol * (1 + ||S||_inf);
    a violation raises NumericalError with diagnostics.
    """
    A = np.asarray(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("sym_eig_approx requires a square matrix")
    scale = 1.0 + (np.max(np.abs(A)) if A.size else 0.0)
    if A.size and np.max(np.abs(A - A.T)) > tol * scale:
        raise InputError("matrix is not symmetric within tolerance")
    A = 0.5 * (A + A.T)
    try:
        eigenvalues, vectors = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    residual = np.max(np.abs(A @ vectors - vectors * eigenvalues)) if A.size else 0.0
    if residual > max(tol, 1e-12) * scale:
        raise NumericalError(
            f"eigendecomposition residual {residual:.3e} exceeds {tol:.1e} * {scale:.3e}"
        )
    return tuple(float(v) for v in eigenvalues), tuple(tuple(float(x) for x in vectors[:, i]) for i in range(vectors.shape[1]))
