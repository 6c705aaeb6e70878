"""Exact rational linear programming with verifiable certificates.

Problems are stated in natural mixed form:

    optimize   c . x            (sense "min" or "max")
    subject to row_i . x  (<= | = | >=)  rhs_i       for every row
               lower_j <= x_j <= upper_j              (None = unbounded side)

and solved by a dense two-phase tableau simplex under Bland's rule: entering
variable is the lowest-index column with negative reduced cost, leaving row
breaks ratio ties by lowest basic-variable index. With exact arithmetic this
terminates on every input and there are no numeric failure modes.

Every outcome carries a certificate checkable from the untouched data:

  optimal    -> primal vector, per-row dual vector, objective value; strong
                duality and complementary slackness hold as exact identities
  infeasible -> Farkas vector y (nonnegative on >= rows, nonpositive on <=
                rows) whose aggregated inequality is violated even at the
                most favorable corner of the variable box
  unbounded  -> feasible point plus an improving ray

`verify_certificate` re-derives all of this from scratch; it shares no state
with the solver beyond the problem statement.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import StructureError

MIN = "min"
MAX = "max"
LE = "<="
EQ = "="
GE = ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class LpProblem:
    sense: str
    objective: list[Fraction]
    rows: list[list[Fraction]]
    relations: list[str]
    rhs: list[Fraction]
    lower: list[Fraction | None]
    upper: list[Fraction | None]


@dataclass
class LpOutcome:
    status: str
    primal: list[Fraction] | None = None
    dual: list[Fraction] | None = None
    objective_value: Fraction | None = None
    farkas: list[Fraction] | None = None
    ray: list[Fraction] | None = None


def _validate(p: LpProblem) -> None:
    if p.sense not in (MIN, MAX):
        raise StructureError(f"unknown sense {p.sense!r}")
    n = len(p.objective)
    m = len(p.rows)
    if len(p.relations) != m or len(p.rhs) != m:
        raise StructureError("row count mismatch between rows, relations, rhs")
    for i, row in enumerate(p.rows):
        if len(row) != n:
            raise StructureError(f"row {i} has {len(row)} coefficients, expected {n}")
    for i, rel in enumerate(p.relations):
        if rel not in (LE, EQ, GE):
            raise StructureError(f"row {i}: unknown relation {rel!r}")
    if len(p.lower) != n or len(p.upper) != n:
        raise StructureError("bound vectors must match the variable count")
    for j in range(n):
        lo, up = p.lower[j], p.upper[j]
        if lo is not None and up is not None and lo > up:
            raise StructureError(f"variable {j}: lower bound {lo} exceeds upper bound {up}")


def solve_unique(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve a linear system exactly; None unless the solution is unique.

    Accepts any shape. Returns None when the system is inconsistent or the
    solution space has positive dimension.
    """
    m = len(rows)
    if m == 0:
        return None
    n = len(rows[0])
    a = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    piv_cols: list[int] = []
    r = 0
    for col in range(n):
        sel = None
        for i in range(r, m):
            if a[i][col]:
                sel = i
                break
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        prow = a[r]
        inv = _ONE / prow[col]
        if inv != 1:
            a[r] = prow = [v * inv for v in prow]
        for i in range(m):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [u - f * v for u, v in zip(a[i], prow)]
        piv_cols.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n]:
            return None  # inconsistent
    if len(piv_cols) < n:
        return None  # underdetermined
    x = [_ZERO] * n
    for k, col in enumerate(piv_cols):
        x[col] = a[k][n]
    return x


class _StdForm:
    """Reduction to   min cost.z  s.t.  A z = b (b >= 0), z >= 0.

    Bookkeeping to map certificates back:
      terms[j] / shift[j]:  x_j = shift_j + sum(coef * z_col)
      row_source[k]: ("row", i) for original row i, ("bound", j) for the
                     synthetic cap row of a doubly bounded variable
      row_sign[k]: -1 when the row was negated to make its rhs nonnegative
      slack_col[k]: the slack column of row k (None for equalities)
    """

    def __init__(self, p: LpProblem):
        minimize = p.sense == MIN
        n = len(p.objective)
        obj = [c if minimize else -c for c in p.objective]

        terms: list[list[tuple[int, Fraction]]] = []
        shift: list[Fraction] = []
        ncols = 0
        bound_caps: list[tuple[int, Fraction, int]] = []
        for j in range(n):
            lo, up = p.lower[j], p.upper[j]
            if lo is not None and up is not None and lo == up:
                terms.append([])
                shift.append(lo)
            elif lo is not None:
                terms.append([(ncols, _ONE)])
                shift.append(lo)
                if up is not None:
                    bound_caps.append((ncols, up - lo, j))
                ncols += 1
            elif up is not None:
                terms.append([(ncols, Fraction(-1))])
                shift.append(up)
                ncols += 1
            else:
                terms.append([(ncols, _ONE), (ncols + 1, Fraction(-1))])
                shift.append(_ZERO)
                ncols += 2

        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        rels: list[str] = []
        source: list[tuple[str, int]] = []
        for i in range(len(p.rows)):
            coefs = [_ZERO] * ncols
            base = p.rhs[i]
            for j, a in enumerate(p.rows[i]):
                if not a:
                    continue
                if shift[j]:
                    base -= a * shift[j]
                for col, cf in terms[j]:
                    coefs[col] += a * cf
            rows.append(coefs)
            rhs.append(base)
            rels.append(p.relations[i])
            source.append(("row", i))
        for col, cap, j in bound_caps:
            coefs = [_ZERO] * ncols
            coefs[col] = _ONE
            rows.append(coefs)
            rhs.append(cap)
            rels.append(LE)
            source.append(("bound", j))

        nslack = sum(1 for rel in rels if rel != EQ)
        slack_col: list[int | None] = []
        k = ncols
        for rel in rels:
            if rel == EQ:
                slack_col.append(None)
            else:
                slack_col.append(k)
                k += 1
        total = ncols + nslack
        sign: list[int] = []
        for i, row in enumerate(rows):
            row.extend([_ZERO] * nslack)
            sc = slack_col[i]
            if sc is not None:
                row[sc] = _ONE if rels[i] == LE else Fraction(-1)
            if rhs[i] < 0:
                rows[i] = [-v for v in row]
                rhs[i] = -rhs[i]
                sign.append(-1)
            else:
                sign.append(1)

        cost = [_ZERO] * total
        for j in range(n):
            cj = obj[j]
            if cj:
                for col, cf in terms[j]:
                    cost[col] += cj * cf

        self.minimize = minimize
        self.nvars = n
        self.terms = terms
        self.shift = shift
        self.ncols = total
        self.rows = rows
        self.rhs = rhs
        self.row_source = source
        self.row_sign = sign
        self.cost = cost

    def to_original_point(self, z: list[Fraction]) -> list[Fraction]:
        out = []
        for j in range(self.nvars):
            v = self.shift[j]
            for col, cf in self.terms[j]:
                if z[col]:
                    v += cf * z[col]
            out.append(v)
        return out

    def to_original_ray(self, d: list[Fraction]) -> list[Fraction]:
        out = []
        for j in range(self.nvars):
            v = _ZERO
            for col, cf in self.terms[j]:
                if d[col]:
                    v += cf * d[col]
            out.append(v)
        return out

    def to_original_dual(self, y_std: dict[int, Fraction], nrows: int, negate: bool) -> list[Fraction]:
        out = [_ZERO] * nrows
        for k, (kind, idx) in enumerate(self.row_source):
            if kind != "row":
                continue
            v = y_std.get(k, _ZERO)
            if self.row_sign[k] < 0:
                v = -v
            out[idx] = -v if negate else v
        return out


def _pivot(tab, rhs, red, basis, r, jc):
    prow = tab[r]
    piv = prow[jc]
    if piv != 1:
        inv = _ONE / piv
        tab[r] = prow = [v * inv for v in prow]
        rhs[r] *= inv
    for i, row in enumerate(tab):
        if i == r:
            continue
        f = row[jc]
        if f:
            tab[i] = [u - f * v for u, v in zip(row, prow)]
            rhs[i] -= f * rhs[r]
    f = red[jc]
    if f:
        red[:] = [u - f * v for u, v in zip(red, prow)]
    basis[r] = jc


def _optimize(tab, rhs, red, basis, ncols):
    """Run Bland pivots to optimality; return entering column if unbounded."""
    while True:
        jc = -1
        for j in range(ncols):
            if red[j] < 0:
                jc = j
                break
        if jc < 0:
            return None
        r = -1
        best = None
        best_var = -1
        for i, row in enumerate(tab):
            a = row[jc]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < best_var):
                    best, r, best_var = ratio, i, basis[i]
        if r < 0:
            return jc
        _pivot(tab, rhs, red, basis, r, jc)


def _basis_dual(std: _StdForm, active: list[int], basis: list[int], costs) -> dict[int, Fraction]:
    """Exact duals from the final basis: solve y^T B = cost_B afresh.

    Columns at index >= ncols are artificials, whose standard column is the
    identity vector of their row.
    """
    if not basis:
        return {}
    n = std.ncols
    mat = []
    target = []
    for col in basis:
        if col >= n:
            mat.append([_ONE if k == col - n else _ZERO for k in active])
        else:
            mat.append([std.rows[k][col] for k in active])
        target.append(costs(col))
    y = solve_unique(mat, target)
    if y is None:
        raise StructureError("basis matrix singular; solver invariant broken")
    return {k: y[pos] for pos, k in enumerate(active)}


def solve_lp(p: LpProblem) -> LpOutcome:
    """Two-phase exact simplex with Bland's rule and certificate extraction."""
    _validate(p)
    std = _StdForm(p)
    m = len(std.rows)
    n = std.ncols
    nrows = len(p.rows)

    tab = [row[:] for row in std.rows]
    rhs = std.rhs[:]
    basis = [n + i for i in range(m)]  # artificial variables, columns implicit
    active = list(range(m))

    # Phase 1: minimize the sum of artificials. Reduced cost of column j is
    # -sum of its tableau column (all artificial costs are one).
    red = [_ZERO] * n
    for row in tab:
        for j in range(n):
            if row[j]:
                red[j] -= row[j]
    jc = _optimize(tab, rhs, red, basis, n)
    if jc is not None:
        raise StructureError("phase-1 unbounded; solver invariant broken")

    infeas = sum((rhs[i] for i in range(len(tab)) if basis[i] >= n), _ZERO)
    if infeas > 0:
        y_std = _basis_dual(std, active, basis,
                            lambda col: _ONE if col >= n else _ZERO)
        farkas = std.to_original_dual(y_std, nrows, negate=False)
        return LpOutcome(status=INFEASIBLE, farkas=farkas)

    # Drive remaining zero-level artificials out of the basis; rows that
    # cannot pivot are redundant and are dropped (their dual is zero).
    keep = []
    for i in range(len(tab)):
        if basis[i] >= n:
            jc = -1
            for j in range(n):
                if tab[i][j]:
                    jc = j
                    break
            if jc < 0:
                continue  # redundant row
            _pivot(tab, rhs, red, basis, i, jc)
        keep.append(i)
    if len(keep) != len(tab):
        tab = [tab[i] for i in keep]
        rhs = [rhs[i] for i in keep]
        basis = [basis[i] for i in keep]
        active = [active[i] for i in keep]

    # Phase 2 on the real objective.
    red = std.cost[:]
    for i, row in enumerate(tab):
        cb = std.cost[basis[i]]
        if cb:
            for j in range(n):
                if row[j]:
                    red[j] -= cb * row[j]
    jc = _optimize(tab, rhs, red, basis, n)

    if jc is not None:
        d = [_ZERO] * n
        d[jc] = _ONE
        for i, row in enumerate(tab):
            if row[jc]:
                d[basis[i]] = -row[jc]
        z = [_ZERO] * n
        for i, col in enumerate(basis):
            z[col] = rhs[i]
        return LpOutcome(
            status=UNBOUNDED,
            primal=std.to_original_point(z),
            ray=std.to_original_ray(d),
        )

    z = [_ZERO] * n
    for i, col in enumerate(basis):
        z[col] = rhs[i]
    x = std.to_original_point(z)
    y_std = _basis_dual(std, active, basis, lambda col: std.cost[col])
    y = std.to_original_dual(y_std, nrows, negate=not std.minimize)
    value = sum((c * v for c, v in zip(p.objective, x) if c), _ZERO)
    return LpOutcome(status=OPTIMAL, primal=x, dual=y, objective_value=value)


def _row_value(row: list[Fraction], x: list[Fraction]) -> Fraction:
    return sum((a * v for a, v in zip(row, x) if a), _ZERO)


def _primal_feasible(p: LpProblem, x: list[Fraction]) -> bool:
    for j, v in enumerate(x):
        lo, up = p.lower[j], p.upper[j]
        if lo is not None and v < lo:
            return False
        if up is not None and v > up:
            return False
    for i, row in enumerate(p.rows):
        lhs = _row_value(row, x)
        rel = p.relations[i]
        if rel == LE and lhs > p.rhs[i]:
            return False
        if rel == GE and lhs < p.rhs[i]:
            return False
        if rel == EQ and lhs != p.rhs[i]:
            return False
    return True


def _dual_row_signs_ok(p: LpProblem, y: list[Fraction], minimize: bool) -> bool:
    for i, rel in enumerate(p.relations):
        yi = y[i]
        if not yi:
            continue
        if rel == EQ:
            continue
        wants_nonneg = (rel == GE) if minimize else (rel == LE)
        if wants_nonneg and yi < 0:
            return False
        if not wants_nonneg and yi > 0:
            return False
    return True


def _reduced_costs(p: LpProblem, y: list[Fraction]) -> list[Fraction]:
    n = len(p.objective)
    d = list(p.objective)
    for i, yi in enumerate(y):
        if yi:
            row = p.rows[i]
            for j in range(n):
                if row[j]:
                    d[j] -= yi * row[j]
    return d


def verify_certificate(p: LpProblem, o: LpOutcome) -> bool:
    """Re-check an outcome from scratch, exactly. True iff everything holds."""
    try:
        _validate(p)
    except StructureError:
        return False
    minimize = p.sense == MIN
    n = len(p.objective)
    m = len(p.rows)

    if o.status == OPTIMAL:
        if o.primal is None or o.dual is None or o.objective_value is None:
            return False
        if o.farkas is not None or o.ray is not None:
            return False
        if len(o.primal) != n or len(o.dual) != m:
            return False
        if not _primal_feasible(p, o.primal):
            return False
        if _row_value(p.objective, o.primal) != o.objective_value:
            return False
        if not _dual_row_signs_ok(p, o.dual, minimize):
            return False
        d = _reduced_costs(p, o.dual)
        dual_value = sum((yi * bi for yi, bi in zip(o.dual, p.rhs) if yi), _ZERO)
        for j in range(n):
            dj = d[j]
            lo, up = p.lower[j], p.upper[j]
            if not dj:
                continue
            # sign admissibility, the bound the variable must sit on, and
            # that bound's contribution to the dual objective
            at_lower = (dj > 0) if minimize else (dj < 0)
            if at_lower:
                if lo is None:
                    return False
                if o.primal[j] != lo:
                    return False
                dual_value += dj * lo
            else:
                if up is None:
                    return False
                if o.primal[j] != up:
                    return False
                dual_value += dj * up
        for i in range(m):
            if o.dual[i] and _row_value(p.rows[i], o.primal) != p.rhs[i]:
                return False
        return dual_value == o.objective_value

    if o.status == INFEASIBLE:
        if o.farkas is None:
            return False
        if o.primal is not None or o.dual is not None or o.ray is not None:
            return False
        if o.objective_value is not None:
            return False
        y = o.farkas
        if len(y) != m:
            return False
        for i, rel in enumerate(p.relations):
            if rel == GE and y[i] < 0:
                return False
            if rel == LE and y[i] > 0:
                return False
        sigma = [_ZERO] * n
        for i, yi in enumerate(y):
            if yi:
                row = p.rows[i]
                for j in range(n):
                    if row[j]:
                        sigma[j] += yi * row[j]
        box_sup = _ZERO
        for j in range(n):
            sj = sigma[j]
            if sj > 0:
                if p.upper[j] is None:
                    return False
                box_sup += sj * p.upper[j]
            elif sj < 0:
                if p.lower[j] is None:
                    return False
                box_sup += sj * p.lower[j]
        agg_rhs = sum((yi * bi for yi, bi in zip(y, p.rhs) if yi), _ZERO)
        return box_sup < agg_rhs

    if o.status == UNBOUNDED:
        if o.primal is None or o.ray is None:
            return False
        if o.dual is not None or o.farkas is not None or o.objective_value is not None:
            return False
        if len(o.primal) != n or len(o.ray) != n:
            return False
        if not _primal_feasible(p, o.primal):
            return False
        r = o.ray
        for j in range(n):
            if p.lower[j] is not None and r[j] < 0:
                return False
            if p.upper[j] is not None and r[j] > 0:
                return False
        for i, rel in enumerate(p.relations):
            drift = _row_value(p.rows[i], r)
            if rel == LE and drift > 0:
                return False
            if rel == GE and drift < 0:
                return False
            if rel == EQ and drift != 0:
                return False
        gain = _row_value(p.objective, r)
        return gain < 0 if minimize else gain > 0

    return False
