"""No-arbitrage and robust no-arbitrage verdicts with replayable certificates.

Plain no-arbitrage asks that no semi-static strategy have nonnegative gain on
every charged scenario and strictly positive gain on one of them. The robust
variant additionally requires survival after every nonzero bid-ask spread is
shrunk strictly into its interior; on a finite tree that is equivalent to the
existence of a martingale measure that charges every supported scenario and
prices every spread option strictly inside its quotes, which this module
decides through a single slack-maximization program. Both verdict directions
come with machine-checkable evidence: a gain-positive strategy when arbitrage
exists, an interior measure plus shrunk quotes when robustness holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .errors import DomainError, RobustArbitrageError, SoundnessError
from .model import (
    MarketModel,
    MarketLayout,
    Strategy,
    ZERO,
    ONE,
    canonical_legs,
    dynamic_gain_rows,
    dynamic_positions,
    require_valid,
    terminal_gain,
)


@dataclass
class MartingaleMeasure:
    """Leaf weights satisfying every node-level one-step pricing identity.

    `option_values` caches the exact expectation of each option payoff under
    the weights. Weights vanish off the charged scenarios, which is what
    absolute continuity with respect to the measure family means here.
    """

    weights: list[Fraction]
    option_values: list[Fraction]

    def expectation(self, payoff: list[Fraction]) -> Fraction:
        return sum((w * v for w, v in zip(self.weights, payoff) if w), ZERO)


@dataclass
class ArbitrageCertificate:
    strategy: Strategy
    gains: list[Fraction]
    strict_leaf: int


@dataclass
class RobustnessWitness:
    """Evidence that no-arbitrage survives a strict quote shrink.

    The interior measure charges every supported scenario and its option
    values sit inside [shrunk_bids, shrunk_asks], which are pulled in by half
    the achieved slack on every option with a spread.
    """

    shrunk_bids: list[Fraction]
    shrunk_asks: list[Fraction]
    interior_measure: MartingaleMeasure
    slack: Fraction


@dataclass
class NaVerdict:
    holds: bool
    certificate: ArbitrageCertificate | None = None


@dataclass
class NarVerdict:
    holds: bool
    witness: RobustnessWitness | None = None
    blocking: str | None = None


def _charged_positions(m: MarketModel) -> list[int]:
    charged = set()
    for weights in m.measures.generators:
        for pos, w in enumerate(weights):
            if w > 0:
                charged.add(pos)
    return sorted(charged)


def measure_from_weights(m: MarketModel, weights: list[Fraction]) -> MartingaleMeasure:
    values = [
        sum((w * opt.payoff[pos] for pos, w in enumerate(weights) if w), ZERO)
        for opt in m.options
    ]
    return MartingaleMeasure(list(weights), values)


def _strategy_from_primal(
    m: MarketModel, layout: MarketLayout, primal: list[Fraction], nh: int
) -> Strategy:
    pairs = dynamic_positions(m, layout)
    dynamic = {nid: [ZERO] * m.tree.num_assets for nid in layout.nonleaf}
    for col, (nid, asset) in enumerate(pairs):
        dynamic[nid][asset] = primal[col]
    e = len(m.options)
    buy = list(primal[nh:nh + e])
    sell = list(primal[nh + e:nh + 2 * e])
    return Strategy(dynamic, buy, sell)


def check_na(m: MarketModel) -> NaVerdict:
    """Decide no-arbitrage by maximizing total surplus over charged leaves.

    Variables are a strategy plus one surplus per charged leaf; the gain on
    each charged leaf must equal its surplus (hence be nonnegative) and the
    surpluses are capped at total one so the program stays bounded. The cap
    makes the optimum zero exactly when no arbitrage exists, and any positive
    optimizer is itself an arbitrage certificate.
    """
    layout = require_valid(m)
    supp = _charged_positions(m)
    drows = dynamic_gain_rows(m, layout)
    e = len(m.options)
    nh = len(layout.nonleaf) * m.tree.num_assets
    k = len(supp)
    ncols = nh + 2 * e + k

    rows, rels, rhs = [], [], []
    for idx, pos in enumerate(supp):
        coefs = list(drows[pos])
        for opt in m.options:
            coefs.append(opt.payoff[pos] - opt.ask)
        for opt in m.options:
            coefs.append(-(opt.payoff[pos] - opt.bid))
        coefs.extend([ZERO] * k)
        coefs[nh + 2 * e + idx] = Fraction(-1)
        rows.append(coefs)
        rels.append(lp.EQ)
        rhs.append(ZERO)
    rows.append([ZERO] * (nh + 2 * e) + [ONE] * k)
    rels.append(lp.LE)
    rhs.append(ONE)

    problem = lp.LpProblem(
        sense=lp.MAX,
        objective=[ZERO] * (nh + 2 * e) + [ONE] * k,
        rows=rows,
        relations=rels,
        rhs=rhs,
        lower=[None] * nh + [ZERO] * (2 * e + k),
        upper=[None] * ncols,
    )
    out = lp.solve_lp(problem)
    if out.status != lp.OPTIMAL:
        raise SoundnessError(f"surplus program ended {out.status}; it is always solvable")
    if out.objective_value == 0:
        return NaVerdict(True)

    strategy = canonical_legs(_strategy_from_primal(m, layout, out.primal, nh))
    gains = terminal_gain(m, strategy)
    strict = next((pos for pos in supp if gains[pos] > 0), None)
    if strict is None:
        raise SoundnessError("positive surplus reported but no strictly positive gain found")
    return NaVerdict(False, ArbitrageCertificate(strategy, gains, strict))


def _consistency_rows(m, layout, supp, with_slack):
    """Shared constraint block for measure programs over charged leaves.

    Variables are R_w >= 0 per charged leaf (plus a trailing slack variable
    when `with_slack`), where the measure itself is Q_w = R_w + slack. Rows:
    total mass one, every node-level martingale identity, and the quote rows,
    with equality on zero-spread options and slack-tightened inequalities on
    spread options.
    """
    k = len(supp)
    drows = dynamic_gain_rows(m, layout)
    ncols = k + 1 if with_slack else k
    rows, rels, rhs = [], [], []

    total = [ONE] * k + ([Fraction(k)] if with_slack else [])
    rows.append(total)
    rels.append(lp.EQ)
    rhs.append(ONE)

    nh = len(layout.nonleaf) * m.tree.num_assets
    for col in range(nh):
        coefs = [drows[pos][col] for pos in supp]
        if not any(coefs):
            continue
        if with_slack:
            coefs = coefs + [sum(coefs, ZERO)]
        rows.append(coefs)
        rels.append(lp.EQ)
        rhs.append(ZERO)

    for opt in m.options:
        gcoefs = [opt.payoff[pos] for pos in supp]
        gsum = sum(gcoefs, ZERO)
        if not opt.has_spread():
            row = gcoefs + ([gsum] if with_slack else [])
            rows.append(row)
            rels.append(lp.EQ)
            rhs.append(opt.bid)
        else:
            lo = gcoefs + ([gsum - 1] if with_slack else [])
            hi = gcoefs + ([gsum + 1] if with_slack else [])
            rows.append(lo)
            rels.append(lp.GE)
            rhs.append(opt.bid)
            rows.append(hi)
            rels.append(lp.LE)
            rhs.append(opt.ask)

    return ncols, rows, rels, rhs


def check_nar(m: MarketModel) -> NarVerdict:
    """Decide robust no-arbitrage by maximizing a uniform slack.

    The slack simultaneously lower-bounds every charged leaf's weight and the
    distance of every spread option's value from both quotes. Robustness
    holds exactly when the maximal slack is positive; the optimizer then
    yields the interior measure and the strictly shrunk quotes.
    """
    layout = require_valid(m)
    supp = _charged_positions(m)
    ncols, rows, rels, rhs = _consistency_rows(m, layout, supp, with_slack=True)

    problem = lp.LpProblem(
        sense=lp.MAX,
        objective=[ZERO] * (ncols - 1) + [ONE],
        rows=rows,
        relations=rels,
        rhs=rhs,
        lower=[ZERO] * ncols,
        upper=[None] * ncols,
    )
    out = lp.solve_lp(problem)
    if out.status == lp.INFEASIBLE:
        return NarVerdict(
            False,
            blocking="no quote-consistent martingale measure is supported on the charged scenarios",
        )
    if out.status != lp.OPTIMAL:
        raise SoundnessError("slack program unbounded; the mass constraint caps it")
    slack = out.objective_value
    if slack == 0:
        return NarVerdict(
            False,
            blocking=(
                "maximal uniform slack is 0: every consistent martingale measure "
                "touches a quote bound or drops a charged scenario"
            ),
        )

    leaf_count = len(layout.leaves)
    weights = [ZERO] * leaf_count
    for idx, pos in enumerate(supp):
        weights[pos] = out.primal[idx] + slack
    measure = measure_from_weights(m, weights)
    half = slack / 2
    shrunk_bids, shrunk_asks = [], []
    for opt in m.options:
        if opt.has_spread():
            shrunk_bids.append(opt.bid + half)
            shrunk_asks.append(opt.ask - half)
        else:
            shrunk_bids.append(opt.bid)
            shrunk_asks.append(opt.ask)
    return NarVerdict(True, RobustnessWitness(shrunk_bids, shrunk_asks, measure, slack))


def dominating_measure(m: MarketModel, generator_index: int) -> MartingaleMeasure:
    """A consistent measure dominating the chosen generator.

    The robustness witness already charges every supported scenario with
    weight at least the achieved slack and stays strictly inside every
    spread, so it dominates each generator at once; returning it keeps the
    output deterministic and the domination as strong as possible.
    """
    require_valid(m)
    if not 0 <= generator_index < len(m.measures.generators):
        raise DomainError(f"generator index {generator_index} out of range")
    verdict = check_nar(m)
    if not verdict.holds:
        raise RobustArbitrageError(
            f"robust no-arbitrage fails: {verdict.blocking}",
            blocking=verdict.blocking,
        )
    measure = verdict.witness.interior_measure
    generator = m.measures.generators[generator_index]
    for pos, w in enumerate(generator):
        if w > 0 and not measure.weights[pos] > 0:
            raise SoundnessError("witness fails to dominate a generator it must dominate")
    return measure


def scenario_pricing_measure(m: MarketModel, leaf: int) -> MartingaleMeasure | None:
    """A consistent measure charging the given leaf, or None if none exists.

    No-arbitrage holds exactly when the answer is non-None for every charged
    leaf, which makes this the per-scenario diagnosis of an arbitrage verdict.
    """
    layout = require_valid(m)
    supp = _charged_positions(m)
    if not 0 <= leaf < len(layout.leaves):
        raise DomainError(f"leaf position {leaf} out of range")
    if leaf not in supp:
        raise DomainError(f"leaf {leaf} is not charged by any generator")

    ncols, rows, rels, rhs = _consistency_rows(m, layout, supp, with_slack=False)
    objective = [ZERO] * ncols
    objective[supp.index(leaf)] = ONE
    problem = lp.LpProblem(
        sense=lp.MAX,
        objective=objective,
        rows=rows,
        relations=rels,
        rhs=rhs,
        lower=[ZERO] * ncols,
        upper=[None] * ncols,
    )
    out = lp.solve_lp(problem)
    if out.status == lp.INFEASIBLE:
        return None
    if out.status != lp.OPTIMAL:
        raise SoundnessError("pricing-measure program unbounded over a probability simplex")
    if out.objective_value == 0:
        return None
    weights = [ZERO] * len(layout.leaves)
    for idx, pos in enumerate(supp):
        weights[pos] = out.primal[idx]
    return measure_from_weights(m, weights)


def verify_measure(m: MarketModel, q: MartingaleMeasure) -> bool:
    """Replay every measure invariant exactly: mass, support, martingale, quotes.

    The martingale identity is checked by walking the tree directly (mass
    under each child times the price step), independently of the coefficient
    rows the programs are built from.
    """
    layout = require_valid(m)
    leaf_count = len(layout.leaves)
    if len(q.weights) != leaf_count or len(q.option_values) != len(m.options):
        return False
    if any(w < 0 for w in q.weights):
        return False
    if sum(q.weights, ZERO) != 1:
        return False
    supp = set(_charged_positions(m))
    if any(w > 0 for pos, w in enumerate(q.weights) if pos not in supp):
        return False
    mass = {node.id: ZERO for node in m.tree.nodes}
    for pos, leaf in enumerate(layout.leaves):
        if q.weights[pos]:
            for nid in layout.paths[pos]:
                mass[nid] += q.weights[pos]
    for nid in layout.nonleaf:
        here = layout.prices(nid)
        for j in range(m.tree.num_assets):
            drift = sum(
                (mass[kid] * (layout.prices(kid)[j] - here[j]) for kid in layout.children[nid]),
                ZERO,
            )
            if drift != 0:
                return False
    for i, opt in enumerate(m.options):
        value = sum((w * opt.payoff[pos] for pos, w in enumerate(q.weights) if w), ZERO)
        if value != q.option_values[i]:
            return False
        if not opt.bid <= value <= opt.ask:
            return False
    return True


def strictly_inside_quotes(m: MarketModel, q: MartingaleMeasure) -> bool:
    """True when every spread option is valued strictly inside its quotes."""
    for i, opt in enumerate(m.options):
        v = q.option_values[i]
        if opt.has_spread():
            if not opt.bid < v < opt.ask:
                return False
        elif v != opt.bid:
            return False
    return True


def verify_na_certificate(m: MarketModel, cert: ArbitrageCertificate) -> bool:
    gains = terminal_gain(m, cert.strategy)
    if gains != cert.gains:
        return False
    supp = set(_charged_positions(m))
    if cert.strict_leaf not in supp:
        return False
    if any(gains[pos] < 0 for pos in supp):
        return False
    return gains[cert.strict_leaf] > 0


def verify_nar_witness(m: MarketModel, w: RobustnessWitness) -> bool:
    if w.slack <= 0:
        return False
    e = len(m.options)
    if len(w.shrunk_bids) != e or len(w.shrunk_asks) != e:
        return False
    for i, opt in enumerate(m.options):
        sb, sa = w.shrunk_bids[i], w.shrunk_asks[i]
        if opt.has_spread():
            if not (opt.bid < sb <= sa < opt.ask):
                return False
        elif sb != opt.bid or sa != opt.bid:
            return False
    q = w.interior_measure
    if not verify_measure(m, q):
        return False
    supp = _charged_positions(m)
    if any(not q.weights[pos] > 0 for pos in supp):
        return False
    for i in range(e):
        if not w.shrunk_bids[i] <= q.option_values[i] <= w.shrunk_asks[i]:
            return False
    return True
