"""Brute-force cross-checks for the test suite. Never on the production path.

Exponential-time by design, behind hard size guards: vertex enumeration of
the consistent-measure polytope (so dual prices can be checked against a
max over vertices) and the definitional robust-no-arbitrage scan that
shrinks quotes through a dyadic ladder and reruns the plain arbitrage check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .arbitrage import _charged_positions, check_na
from .errors import DomainError
from .lp import solve_unique
from .model import (
    MarketModel,
    OptionQuote,
    ZERO,
    ONE,
    dynamic_gain_rows,
    require_valid,
)

MAX_ORACLE_LEAVES = 10


@dataclass
class VertexSet:
    vertices: list[list[Fraction]]

    def best_value(self, payoff: list[Fraction], maximize: bool = True):
        """Exact optimum of a linear claim over the polytope, None if empty."""
        if not self.vertices:
            return None
        values = [
            sum((w * v for w, v in zip(vertex, payoff) if w), ZERO)
            for vertex in self.vertices
        ]
        return max(values) if maximize else min(values)


@dataclass
class NarScanResult:
    holds: bool
    passes_at: int | None = None


def _rank(rows: list[list[Fraction]]) -> int:
    work = [list(r) for r in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for col in range(cols):
        sel = None
        for i in range(rank, len(work)):
            if work[i][col]:
                sel = i
                break
        if sel is None:
            continue
        work[rank], work[sel] = work[sel], work[rank]
        prow = work[rank]
        inv = ONE / prow[col]
        if inv != 1:
            work[rank] = prow = [v * inv for v in prow]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                f = work[i][col]
                work[i] = [u - f * v for u, v in zip(work[i], prow)]
        rank += 1
    return rank


def enumerate_consistent_measures(m: MarketModel) -> VertexSet:
    """All vertices of the consistent-measure polytope, by active-set search.

    Coordinates are the charged leaves. Equalities: unit mass, node-level
    martingale rows, zero-spread quote rows. Inequalities: nonnegativity and
    the spread quote rows. Every subset of inequalities of size equal to the
    polytope's dimension is intersected with the equality space; unique,
    feasible solutions are vertices.
    """
    layout = require_valid(m)
    leaf_count = len(layout.leaves)
    if leaf_count > MAX_ORACLE_LEAVES:
        raise DomainError(
            f"oracle guard: {leaf_count} leaves exceeds the limit of {MAX_ORACLE_LEAVES}"
        )
    supp = _charged_positions(m)
    k = len(supp)
    drows = dynamic_gain_rows(m, layout)
    nh = len(layout.nonleaf) * m.tree.num_assets

    eq_rows: list[list[Fraction]] = [[ONE] * k]
    eq_rhs: list[Fraction] = [ONE]
    for col in range(nh):
        coefs = [drows[pos][col] for pos in supp]
        if any(coefs):
            eq_rows.append(coefs)
            eq_rhs.append(ZERO)
    # inequalities as coefs . q <= bound
    ineq: list[tuple[list[Fraction], Fraction]] = []
    for opt in m.options:
        gcoefs = [opt.payoff[pos] for pos in supp]
        if opt.has_spread():
            ineq.append((gcoefs, opt.ask))
            ineq.append(([-g for g in gcoefs], -opt.bid))
        else:
            eq_rows.append(gcoefs)
            eq_rhs.append(opt.bid)
    for idx in range(k):
        row = [ZERO] * k
        row[idx] = Fraction(-1)
        ineq.append((row, ZERO))

    dim = k - _rank(eq_rows)
    seen: set[tuple] = set()
    vertices: list[list[Fraction]] = []

    def admit(q: list[Fraction]) -> None:
        for coefs, bound in ineq:
            if sum((c * v for c, v in zip(coefs, q) if c), ZERO) > bound:
                return
        key = tuple(q)
        if key in seen:
            return
        seen.add(key)
        full = [ZERO] * leaf_count
        for idx, pos in enumerate(supp):
            full[pos] = q[idx]
        vertices.append(full)

    if dim <= 0:
        q = solve_unique(eq_rows, eq_rhs)
        if q is not None:
            admit(q)
    else:
        for chosen in combinations(range(len(ineq)), dim):
            rows = list(eq_rows) + [ineq[c][0] for c in chosen]
            rhs = list(eq_rhs) + [ineq[c][1] for c in chosen]
            q = solve_unique(rows, rhs)
            if q is not None:
                admit(q)

    vertices.sort(key=tuple)
    return VertexSet(vertices)


def _shrunk_market(m: MarketModel, level: int) -> MarketModel:
    options = []
    for opt in m.options:
        if opt.has_spread():
            eps = (opt.ask - opt.bid) / Fraction(2 ** (level + 1))
            options.append(OptionQuote(opt.name, opt.payoff, opt.bid + eps, opt.ask - eps))
        else:
            options.append(opt)
    return MarketModel(tree=m.tree, options=options, measures=m.measures)


def definitional_nar_scan(m: MarketModel, depth: int) -> NarScanResult:
    """Robust no-arbitrage by its definition: scan dyadic quote shrinks.

    Level j pulls each nonzero spread in by (ask - bid) / 2^(j+1) per side
    and reruns the plain no-arbitrage check. Because the feasible region is
    polyhedral in the shrink, a market that is robustly arbitrage-free passes
    at every sufficiently deep level; the scan reports the first.
    """
    require_valid(m)
    if depth < 1:
        raise DomainError(f"scan depth must be >= 1, got {depth}")
    for level in range(1, depth + 1):
        if check_na(_shrunk_market(m, level)).holds:
            return NarScanResult(True, level)
    return NarScanResult(False)
