"""Finite-market data model: scenario trees, quoted options, measure families.

Every quantity is an exact rational (`fractions.Fraction`). Arbitrage is a
strict-inequality phenomenon, so nothing in the core ever touches floating
point. All types are treated as immutable once constructed and every
operation is a pure function, which makes concurrent use on shared inputs
safe without synchronization.

Leaves are indexed by *position* 0..L-1 in ascending node-id order among the
nodes at the final period. Option payoffs, measure weights, and claims all
follow that ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import StructureError

# The rational substrate. Fraction already guarantees the invariants this
# package relies on: positive denominator, lowest terms, canonical zero.
Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value: Fraction | int | str) -> Fraction:
    """Coerce a literal to an exact rational.

    Accepts Fractions, ints, and strings such as "3", "-2", "1/3", "0.25"
    (decimals are parsed exactly as p/10^k). Floats are rejected: they have
    no place in an exact pipeline.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise StructureError(f"cannot interpret {value!r} as a rational")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise StructureError(f"not a rational literal: {value!r}") from exc
    raise StructureError(f"cannot interpret {type(value).__name__} as a rational")


def rats(values) -> list[Fraction]:
    return [rat(v) for v in values]


@dataclass
class Node:
    """One tree node: a market state at a given period.

    `prices` holds the traded asset prices at this node; its length equals
    the tree's asset count. The root has parent None.
    """

    id: int
    time: int
    parent: int | None
    prices: list[Fraction]


@dataclass
class ScenarioTree:
    nodes: list[Node]
    periods: int      # number of trading periods (final time)
    num_assets: int   # dynamically traded assets per node


@dataclass
class OptionQuote:
    """A statically tradable option: payoff per leaf, quoted bid and ask."""

    name: str
    payoff: list[Fraction]
    bid: Fraction
    ask: Fraction

    def has_spread(self) -> bool:
        return self.bid < self.ask


@dataclass
class MeasureFamily:
    """Finitely generated family of scenario weightings.

    The represented family is the convex hull of the generators; anything
    quasi-sure therefore only depends on the union of their supports.
    """

    generators: list[list[Fraction]]
    names: list[str] | None = None


@dataclass
class MarketModel:
    tree: ScenarioTree
    options: list[OptionQuote]
    measures: MeasureFamily


@dataclass
class Claim:
    """A contingent claim, as its payoff on each leaf."""

    payoff: list[Fraction]


@dataclass
class Strategy:
    """Semi-static strategy: dynamic stock positions plus static option legs.

    `dynamic` maps each non-leaf node id to the per-asset position held from
    that node to its children. Option positions are stored pre-split into
    nonnegative buy/sell legs because with a bid-ask spread the payoff is not
    linear in a signed position; the net signed exposure is buy - sell.
    """

    dynamic: dict[int, list[Fraction]]
    buy_leg: list[Fraction]
    sell_leg: list[Fraction]


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)


class MarketLayout:
    """Precomputed navigation for a validated market's tree.

    children / leaves / root-to-leaf paths, all keyed by node id, plus the
    canonical leaf ordering (ascending node id at the final period).
    """

    def __init__(self, tree: ScenarioTree):
        by_id = {node.id: node for node in tree.nodes}
        children: dict[int, list[int]] = {node.id: [] for node in tree.nodes}
        root = None
        for node in tree.nodes:
            if node.parent is None:
                root = node.id
            else:
                children[node.parent].append(node.id)
        for kids in children.values():
            kids.sort()
        self.tree = tree
        self.by_id = by_id
        self.children = children
        self.root = root
        self.leaves = sorted(n.id for n in tree.nodes if n.time == tree.periods)
        self.leaf_pos = {leaf: k for k, leaf in enumerate(self.leaves)}
        self.paths = [self._path(leaf) for leaf in self.leaves]
        self.nonleaf = sorted(n.id for n in tree.nodes if n.time < tree.periods)

    def _path(self, leaf: int) -> list[int]:
        path = [leaf]
        node = self.by_id[leaf]
        while node.parent is not None:
            path.append(node.parent)
            node = self.by_id[node.parent]
        path.reverse()
        return path

    def prices(self, node_id: int) -> list[Fraction]:
        return self.by_id[node_id].prices


def validate_market(m: MarketModel) -> ValidationReport:
    """Check every model invariant; violations are data, not exceptions."""
    issues: list[str] = []
    tree = m.tree
    n = len(tree.nodes)
    if n == 0:
        return ValidationReport(False, ["tree: no nodes"])
    if tree.periods < 1:
        issues.append(f"tree: periods is {tree.periods}, must be >= 1")
    if tree.num_assets < 0:
        issues.append(f"tree: num_assets is {tree.num_assets}, must be >= 0")

    ids = sorted(node.id for node in tree.nodes)
    if ids != list(range(n)):
        issues.append("tree: node ids are not dense 0..n-1")
        return ValidationReport(False, issues)

    by_id = {node.id: node for node in tree.nodes}
    roots = [node for node in tree.nodes if node.parent is None]
    if len(roots) != 1:
        issues.append(f"tree: expected exactly one root, found {len(roots)}")
    else:
        if roots[0].time != 0:
            issues.append(f"tree: root node {roots[0].id} has time {roots[0].time}, must be 0")

    has_child = {node.id: False for node in tree.nodes}
    for node in tree.nodes:
        if not 0 <= node.time <= tree.periods:
            issues.append(f"tree: node {node.id} has time {node.time} outside [0, {tree.periods}]")
        if node.parent is not None:
            parent = by_id.get(node.parent)
            if parent is None:
                issues.append(f"tree: node {node.id} refers to missing parent {node.parent}")
            else:
                has_child[parent.id] = True
                if parent.time != node.time - 1:
                    issues.append(
                        f"tree: node {node.id} at time {node.time} has parent at time {parent.time}"
                    )
        if len(node.prices) != tree.num_assets:
            issues.append(
                f"tree: node {node.id} carries {len(node.prices)} prices, expected {tree.num_assets}"
            )
    for node in tree.nodes:
        if node.time < tree.periods and not has_child[node.id]:
            issues.append(f"tree: node {node.id} at time {node.time} has no children")

    leaf_count = sum(1 for node in tree.nodes if node.time == tree.periods)
    for k, option in enumerate(m.options):
        label = f"options[{k}] ('{option.name}')"
        if len(option.payoff) != leaf_count:
            issues.append(f"{label}: payoff has {len(option.payoff)} entries, expected {leaf_count}")
        if option.bid > option.ask:
            issues.append(f"{label}: bid {option.bid} exceeds ask {option.ask}")

    gens = m.measures.generators
    if not gens:
        issues.append("measures: at least one generator required")
    names = m.measures.names
    if names is not None and len(names) != len(gens):
        issues.append(f"measures: {len(names)} names for {len(gens)} generators")
    for k, weights in enumerate(gens):
        label = f"measures[{k}]"
        if len(weights) != leaf_count:
            issues.append(f"{label}: {len(weights)} weights, expected {leaf_count}")
            continue
        if any(w < 0 for w in weights):
            issues.append(f"{label}: negative weight")
        total = sum(weights, ZERO)
        if total != 1:
            issues.append(f"{label}: measure sums to {total}, expected 1")

    return ValidationReport(not issues, issues)


def require_valid(m: MarketModel) -> MarketLayout:
    report = validate_market(m)
    if not report.ok:
        raise StructureError("invalid market: " + "; ".join(report.violations))
    return MarketLayout(m.tree)


def support(m: MarketModel) -> set[int]:
    """Leaf positions charged by at least one generator.

    The complement is the largest set that every generator ignores, so a
    statement holds quasi-surely exactly when it holds on this set.
    """
    require_valid(m)
    charged: set[int] = set()
    for weights in m.measures.generators:
        for pos, w in enumerate(weights):
            if w > 0:
                charged.add(pos)
    return charged


def _check_strategy_shape(m: MarketModel, layout: MarketLayout, s: Strategy) -> None:
    e = len(m.options)
    if len(s.buy_leg) != e or len(s.sell_leg) != e:
        raise StructureError(
            f"strategy legs sized {len(s.buy_leg)}/{len(s.sell_leg)}, expected {e}"
        )
    if any(v < 0 for v in s.buy_leg) or any(v < 0 for v in s.sell_leg):
        raise StructureError("strategy legs must be nonnegative")
    if set(s.dynamic) != set(layout.nonleaf):
        raise StructureError("strategy dynamic positions must cover exactly the non-leaf nodes")
    for node_id, positions in s.dynamic.items():
        if len(positions) != m.tree.num_assets:
            raise StructureError(
                f"strategy at node {node_id} has {len(positions)} positions, "
                f"expected {m.tree.num_assets}"
            )


def terminal_gain(m: MarketModel, s: Strategy) -> list[Fraction]:
    """Terminal wealth of a strategy on each leaf, from zero initial capital.

    Dynamic trading gains accrue per period step along the leaf's path;
    each option bought contributes payoff minus ask, each option sold
    contributes bid minus payoff.
    """
    layout = require_valid(m)
    _check_strategy_shape(m, layout, s)
    gains: list[Fraction] = []
    for pos, path in enumerate(layout.paths):
        total = ZERO
        for step in range(len(path) - 1):
            here, there = path[step], path[step + 1]
            held = s.dynamic[here]
            p_here = layout.prices(here)
            p_there = layout.prices(there)
            for j in range(m.tree.num_assets):
                h = held[j]
                if h:
                    total += h * (p_there[j] - p_here[j])
        for i, option in enumerate(m.options):
            if s.buy_leg[i]:
                total += s.buy_leg[i] * (option.payoff[pos] - option.ask)
            if s.sell_leg[i]:
                total -= s.sell_leg[i] * (option.payoff[pos] - option.bid)
        gains.append(total)
    return gains


def zero_strategy(m: MarketModel) -> Strategy:
    layout = require_valid(m)
    dynamic = {nid: [ZERO] * m.tree.num_assets for nid in layout.nonleaf}
    e = len(m.options)
    return Strategy(dynamic, [ZERO] * e, [ZERO] * e)


def canonical_legs(s: Strategy) -> Strategy:
    """Net out simultaneous buy/sell positions: min(buy, sell) becomes 0.

    Netting adds min(buy, sell) * (ask - bid) >= 0 to the gain on every
    leaf, so it never breaks a super-replication or arbitrage certificate.
    """
    buy, sell = [], []
    for b, v in zip(s.buy_leg, s.sell_leg):
        net = b - v
        buy.append(net if net > 0 else ZERO)
        sell.append(-net if net < 0 else ZERO)
    return Strategy(s.dynamic, buy, sell)


def net_positions(s: Strategy) -> list[Fraction]:
    return [b - v for b, v in zip(s.buy_leg, s.sell_leg)]


def dynamic_positions(m: MarketModel, layout: MarketLayout | None = None) -> list[tuple[int, int]]:
    """Column order for the dynamic part of strategy space: (node id, asset)."""
    if layout is None:
        layout = require_valid(m)
    return [(nid, j) for nid in layout.nonleaf for j in range(m.tree.num_assets)]


def dynamic_gain_rows(m: MarketModel, layout: MarketLayout | None = None) -> list[list[Fraction]]:
    """Per-leaf coefficients of the dynamic gain, one column per (node, asset).

    Entry [leaf][column] is the one-step price increment the position at that
    node earns along the leaf's path, zero when the node is off the path.
    """
    if layout is None:
        layout = require_valid(m)
    pairs = dynamic_positions(m, layout)
    col = {pair: k for k, pair in enumerate(pairs)}
    rows = []
    for path in layout.paths:
        coefs = [ZERO] * len(pairs)
        for step in range(len(path) - 1):
            here, there = path[step], path[step + 1]
            p_here = layout.prices(here)
            p_there = layout.prices(there)
            for j in range(m.tree.num_assets):
                coefs[col[(here, j)]] = p_there[j] - p_here[j]
        rows.append(coefs)
    return rows
