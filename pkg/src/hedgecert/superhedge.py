"""Super-hedging prices, optimal semi-static strategies, and dual measures.

The super-hedging price of a claim is the least initial capital from which
some semi-static strategy dominates the claim on every charged scenario. On
a finite tree that is one linear program, and its exact dual maximizes the
claim's expectation over quote-consistent martingale measures; both sides
are solved here and their values must agree to the last digit. A strictly
interior near-optimizer is available by mixing the dual optimizer with the
robustness witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .arbitrage import (
    MartingaleMeasure,
    _charged_positions,
    _consistency_rows,
    check_nar,
    measure_from_weights,
    _strategy_from_primal,
)
from .errors import (
    ArbitrageError,
    DomainError,
    RobustArbitrageError,
    SoundnessError,
    StructureError,
)
from .model import (
    Claim,
    MarketModel,
    Strategy,
    ZERO,
    ONE,
    canonical_legs,
    dynamic_gain_rows,
    require_valid,
    terminal_gain,
)


@dataclass
class PricingReport:
    """Both sides of the pricing duality, packaged with their certificates.

    When both sides are finite the gap is zero as a rational identity; a
    nonzero gap is a solver bug, never a market property.
    """

    primal_value: Fraction
    strategy: Strategy
    dual_value: Fraction
    dual_measure: MartingaleMeasure
    gap: Fraction


def _check_claim(m: MarketModel, f: Claim, leaf_count: int) -> None:
    if len(f.payoff) != leaf_count:
        raise StructureError(
            f"claim has {len(f.payoff)} payoffs, market has {leaf_count} leaves"
        )


def _hedge_program(m, layout, supp, payoff):
    """min x over (x, strategy): x + gain >= payoff on every charged leaf."""
    drows = dynamic_gain_rows(m, layout)
    e = len(m.options)
    nh = len(layout.nonleaf) * m.tree.num_assets
    ncols = 1 + nh + 2 * e
    rows, rhs = [], []
    for pos in supp:
        coefs = [ONE] + list(drows[pos])
        for opt in m.options:
            coefs.append(opt.payoff[pos] - opt.ask)
        for opt in m.options:
            coefs.append(-(opt.payoff[pos] - opt.bid))
        rows.append(coefs)
        rhs.append(payoff[pos])
    return lp.LpProblem(
        sense=lp.MIN,
        objective=[ONE] + [ZERO] * (ncols - 1),
        rows=rows,
        relations=[lp.GE] * len(rows),
        rhs=rhs,
        lower=[None] * (1 + nh) + [ZERO] * (2 * e),
        upper=[None] * ncols,
    )


def superhedge_price(m: MarketModel, f: Claim) -> tuple[Fraction, Strategy | None]:
    """Least super-replication capital and a strategy attaining it.

    Under robust no-arbitrage the program is bounded; when it is unbounded
    below, the improving ray is a scalable arbitrage and is raised as such
    rather than reported as a price. The infeasible branch cannot occur on a
    finite tree (capital is free); +inf is kept for interface stability.
    """
    layout = require_valid(m)
    _check_claim(m, f, len(layout.leaves))
    supp = _charged_positions(m)
    problem = _hedge_program(m, layout, supp, f.payoff)
    out = lp.solve_lp(problem)
    if out.status == lp.UNBOUNDED:
        ray_strategy = _strategy_from_primal(m, layout, out.ray[1:], len(layout.nonleaf) * m.tree.num_assets)
        raise RobustArbitrageError(
            "market admits robust arbitrage: super-hedging cost decreases without bound",
            blocking="unbounded super-hedging program",
            ray=(out.ray[0], ray_strategy),
        )
    if out.status == lp.INFEASIBLE:
        return math.inf, None
    nh = len(layout.nonleaf) * m.tree.num_assets
    strategy = canonical_legs(_strategy_from_primal(m, layout, out.primal[1:], nh))
    return out.objective_value, strategy


def dual_price(m: MarketModel, f: Claim) -> tuple[Fraction, MartingaleMeasure]:
    """Maximal claim expectation over quote-consistent martingale measures."""
    layout = require_valid(m)
    _check_claim(m, f, len(layout.leaves))
    supp = _charged_positions(m)
    ncols, rows, rels, rhs = _consistency_rows(m, layout, supp, with_slack=False)
    problem = lp.LpProblem(
        sense=lp.MAX,
        objective=[f.payoff[pos] for pos in supp],
        rows=rows,
        relations=rels,
        rhs=rhs,
        lower=[ZERO] * ncols,
        upper=[None] * ncols,
    )
    out = lp.solve_lp(problem)
    if out.status == lp.INFEASIBLE:
        raise ArbitrageError(
            "no quote-consistent martingale measure exists: "
            "the market admits arbitrage on some charged scenario"
        )
    if out.status != lp.OPTIMAL:
        raise SoundnessError("dual program unbounded over a probability simplex")
    weights = [ZERO] * len(layout.leaves)
    for idx, pos in enumerate(supp):
        weights[pos] = out.primal[idx]
    return out.objective_value, measure_from_weights(m, weights)


def duality_report(m: MarketModel, f: Claim) -> PricingReport:
    """Run both sides and insist on an exactly zero gap."""
    price, strategy = superhedge_price(m, f)
    value, measure = dual_price(m, f)
    gap = price - value
    if gap != 0:
        raise SoundnessError(f"pricing duality gap {gap} is nonzero; solver bug")
    return PricingReport(price, strategy, value, measure, gap)


def _largest_dyadic_at_most(bound: Fraction) -> Fraction:
    """Largest 1/2^k (k >= 1) that does not exceed the positive bound."""
    lam = Fraction(1, 2)
    while lam > bound:
        lam /= 2
    return lam


def strict_dual_approx(m: MarketModel, f: Claim, eps: Fraction) -> MartingaleMeasure:
    """A strictly interior consistent measure within eps of the dual optimum.

    Mixes the dual optimizer toward the robustness witness with a dyadic
    weight small enough to lose at most eps of value; the witness's full
    support and strict quote interiority survive any positive mixing weight.
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    verdict = check_nar(m)
    if not verdict.holds:
        raise RobustArbitrageError(
            f"robust no-arbitrage fails: {verdict.blocking}", blocking=verdict.blocking
        )
    value, best = dual_price(m, f)
    interior = verdict.witness.interior_measure
    drift = abs(value - interior.expectation(f.payoff))
    lam = _largest_dyadic_at_most(min(Fraction(1, 2), eps / (1 + drift)))
    weights = [
        (1 - lam) * a + lam * b for a, b in zip(best.weights, interior.weights)
    ]
    return measure_from_weights(m, weights)


def claim_price_bounds(m: MarketModel, f: Claim) -> tuple[Fraction, Fraction]:
    """Sub- and super-replication prices of a claim in the market as given."""
    upper, _ = superhedge_price(m, f)
    lower_neg, _ = superhedge_price(m, Claim([-v for v in f.payoff]))
    return -lower_neg, upper


def market_without_option(m: MarketModel, i: int) -> MarketModel:
    options = [opt for k, opt in enumerate(m.options) if k != i]
    return MarketModel(tree=m.tree, options=options, measures=m.measures)


def price_bounds_excluding(m: MarketModel, i: int) -> tuple[Fraction, Fraction]:
    """Price interval for option i implied by the rest of the market.

    Requires the reduced market (everything except option i) to be robustly
    arbitrage-free; the interval is then the sub- to super-replication range
    of option i's payoff hedged with the remaining instruments. Quoting a new
    option strictly inside this interval preserves robust no-arbitrage,
    quoting it strictly outside creates arbitrage.
    """
    require_valid(m)
    if not 0 <= i < len(m.options):
        raise DomainError(f"option index {i} out of range")
    reduced = market_without_option(m, i)
    verdict = check_nar(reduced)
    if not verdict.holds:
        raise RobustArbitrageError(
            f"market without option '{m.options[i].name}' fails robust no-arbitrage: "
            f"{verdict.blocking}",
            blocking=verdict.blocking,
        )
    return claim_price_bounds(reduced, Claim(list(m.options[i].payoff)))


def verify_super_replication(
    m: MarketModel, f: Claim, price: Fraction, strategy: Strategy
) -> bool:
    """Exact replay: price + gain covers the claim on every charged leaf."""
    gains = terminal_gain(m, strategy)
    return all(price + gains[pos] >= f.payoff[pos] for pos in _charged_positions(m))
