"""JSON market and claim files, plus the serializers the CLI reports use.

Rationals travel as strings: integers ("3", "-2"), fractions ("1/3"), or
finite decimals ("0.25") parsed exactly as p/10^k. Output always uses the
canonical lowest-terms form, so identical models print identical bytes.
Leaf ordering is explicit in every file (`leafOrder`), never inferred, and
payoff/weight arrays align with it.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .arbitrage import ArbitrageCertificate, MartingaleMeasure, RobustnessWitness
from .errors import StructureError
from .model import (
    Claim,
    MarketModel,
    MarketLayout,
    MeasureFamily,
    Node,
    OptionQuote,
    ScenarioTree,
    Strategy,
    validate_market,
)
from .redundancy import ReplicationCertificate

SCHEMA_VERSION = 1

_RATIONAL_RE = re.compile(r"^-?\d+$|^-?\d+/\d+$|^-?\d+\.\d+$")

_MARKET_KEYS = {"schemaVersion", "tree", "options", "measures", "leafOrder"}
_TREE_KEYS = {"nodes"}
_NODE_KEYS = {"id", "time", "parent", "prices"}
_OPTION_KEYS = {"name", "payoff", "bid", "ask"}
_MEASURE_KEYS = {"name", "weights"}
_CLAIM_KEYS = {"schemaVersion", "leafOrder", "payoff"}


class MarketParseError(StructureError):
    """Carries every located problem found in an input file."""

    def __init__(self, issues: list[tuple[str, str]]):
        self.issues = issues
        super().__init__("; ".join(f"{path}: {message}" for path, message in issues))


class _Issues:
    def __init__(self):
        self.items: list[tuple[str, str]] = []

    def add(self, path: str, message: str) -> None:
        self.items.append((path, message))

    def mark(self) -> int:
        return len(self.items)

    def raise_if_added(self, mark: int) -> None:
        # this section's problems block further parsing; report everything so far
        if len(self.items) > mark:
            raise MarketParseError(self.items)

    def raise_if_any(self) -> None:
        if self.items:
            raise MarketParseError(self.items)


def parse_rational_text(text) -> Fraction:
    """Strict rational grammar; raises StructureError on anything else."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise StructureError(f"not a rational string: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise StructureError("zero denominator") from None


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _take_rational(obj, path: str, issues: _Issues) -> Fraction | None:
    try:
        return parse_rational_text(obj)
    except StructureError as exc:
        issues.add(path, str(exc))
        return None


def _take_rational_list(obj, path: str, issues: _Issues) -> list[Fraction]:
    if not isinstance(obj, list):
        issues.add(path, "expected a list of rational strings")
        return []
    out = []
    for k, item in enumerate(obj):
        v = _take_rational(item, f"{path}[{k}]", issues)
        out.append(v if v is not None else Fraction(0))
    return out


def _check_keys(obj: dict, allowed: set[str], path: str, issues: _Issues) -> None:
    for key in obj:
        if key not in allowed:
            issues.add(f"{path}.{key}", "unknown field")


def _take_int(obj, path: str, issues: _Issues, allow_none: bool = False):
    if allow_none and obj is None:
        return None
    if isinstance(obj, bool) or not isinstance(obj, int):
        issues.add(path, f"expected an integer, got {obj!r}")
        return None
    return obj


def _parse_nodes(raw, issues: _Issues) -> list[Node]:
    nodes = []
    if not isinstance(raw, list) or not raw:
        issues.add("tree.nodes", "expected a non-empty list")
        return nodes
    for k, item in enumerate(raw):
        path = f"tree.nodes[{k}]"
        if not isinstance(item, dict):
            issues.add(path, "expected an object")
            continue
        _check_keys(item, _NODE_KEYS, path, issues)
        missing = _NODE_KEYS - set(item)
        if missing:
            issues.add(path, f"missing fields: {', '.join(sorted(missing))}")
            continue
        nid = _take_int(item["id"], f"{path}.id", issues)
        time = _take_int(item["time"], f"{path}.time", issues)
        parent = _take_int(item["parent"], f"{path}.parent", issues, allow_none=True)
        prices = _take_rational_list(item["prices"], f"{path}.prices", issues)
        if nid is None or time is None:
            continue
        nodes.append(Node(nid, time, parent, prices))
    return nodes


def parse_market(data: bytes | str) -> MarketModel:
    """Exact parse of a market file; every problem is reported with its path."""
    issues = _Issues()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MarketParseError([("$", f"malformed JSON: {exc.msg} at line {exc.lineno}")])
    if not isinstance(raw, dict):
        raise MarketParseError([("$", "top level must be an object")])
    version = raw.get("schemaVersion")
    if version != SCHEMA_VERSION:
        raise MarketParseError([("schemaVersion", f"unsupported value {version!r}, expected {SCHEMA_VERSION}")])
    _check_keys(raw, _MARKET_KEYS, "$", issues)
    missing_top = _MARKET_KEYS - set(raw)
    if missing_top:
        for key in missing_top:
            issues.add(key, "missing field")
        issues.raise_if_any()

    mark = issues.mark()
    tree_raw = raw["tree"]
    if not isinstance(tree_raw, dict):
        issues.add("tree", "expected an object")
        issues.raise_if_any()
    _check_keys(tree_raw, _TREE_KEYS, "tree", issues)
    nodes = _parse_nodes(tree_raw.get("nodes"), issues)
    issues.raise_if_added(mark)

    periods = max(node.time for node in nodes)
    roots = [n for n in nodes if n.parent is None]
    num_assets = len(roots[0].prices) if roots else 0
    tree = ScenarioTree(nodes, periods, num_assets)

    mark = issues.mark()
    leaf_ids = sorted(n.id for n in nodes if n.time == periods)
    order_raw = raw["leafOrder"]
    if not isinstance(order_raw, list) or any(
        isinstance(v, bool) or not isinstance(v, int) for v in order_raw
    ):
        issues.add("leafOrder", "expected a list of node ids")
    elif sorted(order_raw) != leaf_ids:
        issues.add("leafOrder", "must list exactly the nodes at the final period")
    issues.raise_if_added(mark)
    slot = {leaf: k for k, leaf in enumerate(order_raw)}
    reorder = [slot[leaf] for leaf in leaf_ids]  # file index per canonical position

    options = []
    options_raw = raw["options"]
    if not isinstance(options_raw, list):
        issues.add("options", "expected a list")
        issues.raise_if_any()
    seen_names = set()
    for k, item in enumerate(options_raw):
        path = f"options[{k}]"
        if not isinstance(item, dict):
            issues.add(path, "expected an object")
            continue
        _check_keys(item, _OPTION_KEYS, path, issues)
        missing = _OPTION_KEYS - set(item)
        if missing:
            issues.add(path, f"missing fields: {', '.join(sorted(missing))}")
            continue
        name = item["name"]
        if not isinstance(name, str) or not name:
            issues.add(f"{path}.name", "expected a non-empty string")
            continue
        if name in seen_names:
            issues.add(f"{path}.name", f"duplicate option name {name!r}")
        seen_names.add(name)
        payoff = _take_rational_list(item["payoff"], f"{path}.payoff", issues)
        bid = _take_rational(item["bid"], f"{path}.bid", issues)
        ask = _take_rational(item["ask"], f"{path}.ask", issues)
        if bid is None or ask is None:
            continue
        if len(payoff) == len(leaf_ids):
            payoff = [payoff[i] for i in reorder]
        options.append(OptionQuote(name, payoff, bid, ask))

    measures_raw = raw["measures"]
    generators, gen_names = [], []
    if not isinstance(measures_raw, list):
        issues.add("measures", "expected a list")
        issues.raise_if_any()
    seen_names = set()
    for k, item in enumerate(measures_raw):
        path = f"measures[{k}]"
        if not isinstance(item, dict):
            issues.add(path, "expected an object")
            continue
        _check_keys(item, _MEASURE_KEYS, path, issues)
        missing = _MEASURE_KEYS - set(item)
        if missing:
            issues.add(path, f"missing fields: {', '.join(sorted(missing))}")
            continue
        name = item["name"]
        if not isinstance(name, str) or not name:
            issues.add(f"{path}.name", "expected a non-empty string")
            continue
        if name in seen_names:
            issues.add(f"{path}.name", f"duplicate measure name {name!r}")
        seen_names.add(name)
        weights = _take_rational_list(item["weights"], f"{path}.weights", issues)
        if len(weights) == len(leaf_ids):
            weights = [weights[i] for i in reorder]
        generators.append(weights)
        gen_names.append(name)
    issues.raise_if_any()

    market = MarketModel(tree, options, MeasureFamily(generators, gen_names))
    report = validate_market(market)
    if not report.ok:
        raise MarketParseError([("market", v) for v in report.violations])
    return market


def market_to_json(m: MarketModel) -> dict:
    layout = MarketLayout(m.tree)
    names = m.measures.names or [f"P{k}" for k in range(len(m.measures.generators))]
    return {
        "schemaVersion": SCHEMA_VERSION,
        "tree": {
            "nodes": [
                {
                    "id": node.id,
                    "time": node.time,
                    "parent": node.parent,
                    "prices": [format_rational(p) for p in node.prices],
                }
                for node in sorted(m.tree.nodes, key=lambda n: n.id)
            ]
        },
        "options": [
            {
                "name": opt.name,
                "payoff": [format_rational(v) for v in opt.payoff],
                "bid": format_rational(opt.bid),
                "ask": format_rational(opt.ask),
            }
            for opt in m.options
        ],
        "measures": [
            {"name": names[k], "weights": [format_rational(w) for w in weights]}
            for k, weights in enumerate(m.measures.generators)
        ],
        "leafOrder": list(layout.leaves),
    }


def dump_market(m: MarketModel) -> str:
    return json.dumps(market_to_json(m), indent=2)


def parse_claim(data: bytes | str, m: MarketModel) -> Claim:
    """Parse a claim file against a market's leaves."""
    issues = _Issues()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MarketParseError([("$", f"malformed JSON: {exc.msg} at line {exc.lineno}")])
    if not isinstance(raw, dict):
        raise MarketParseError([("$", "top level must be an object")])
    if raw.get("schemaVersion") != SCHEMA_VERSION:
        raise MarketParseError([("schemaVersion", f"unsupported value {raw.get('schemaVersion')!r}")])
    _check_keys(raw, _CLAIM_KEYS, "$", issues)
    for key in _CLAIM_KEYS - set(raw):
        issues.add(key, "missing field")
    issues.raise_if_any()

    layout = MarketLayout(m.tree)
    order = raw["leafOrder"]
    if not isinstance(order, list) or sorted(order) != list(layout.leaves):
        issues.add("leafOrder", "must list exactly the market's final-period nodes")
        issues.raise_if_any()
    payoff = _take_rational_list(raw["payoff"], "payoff", issues)
    if len(payoff) != len(order):
        issues.add("payoff", f"{len(payoff)} entries for {len(order)} leaves")
    issues.raise_if_any()
    slot = {leaf: k for k, leaf in enumerate(order)}
    return Claim([payoff[slot[leaf]] for leaf in layout.leaves])


def claim_to_json(m: MarketModel, f: Claim) -> dict:
    layout = MarketLayout(m.tree)
    return {
        "schemaVersion": SCHEMA_VERSION,
        "leafOrder": list(layout.leaves),
        "payoff": [format_rational(v) for v in f.payoff],
    }


def strategy_to_json(m: MarketModel, s: Strategy) -> dict:
    return {
        "dynamic": {
            str(nid): [format_rational(v) for v in s.dynamic[nid]]
            for nid in sorted(s.dynamic)
        },
        "buyLeg": [format_rational(v) for v in s.buy_leg],
        "sellLeg": [format_rational(v) for v in s.sell_leg],
        "net": [format_rational(b - v) for b, v in zip(s.buy_leg, s.sell_leg)],
    }


def measure_to_json(q: MartingaleMeasure) -> dict:
    return {
        "weights": [format_rational(w) for w in q.weights],
        "optionValues": [format_rational(v) for v in q.option_values],
    }


def na_certificate_to_json(m: MarketModel, cert: ArbitrageCertificate) -> dict:
    return {
        "strategy": strategy_to_json(m, cert.strategy),
        "gains": [format_rational(g) for g in cert.gains],
        "strictLeaf": cert.strict_leaf,
    }


def witness_to_json(m: MarketModel, w: RobustnessWitness) -> dict:
    return {
        "shrunkBids": [format_rational(v) for v in w.shrunk_bids],
        "shrunkAsks": [format_rational(v) for v in w.shrunk_asks],
        "slack": format_rational(w.slack),
        "interiorMeasure": measure_to_json(w.interior_measure),
    }


def replication_to_json(m: MarketModel, i: int, cert: ReplicationCertificate) -> dict:
    others = [k for k in range(len(m.options)) if k != i]
    return {
        "option": m.options[i].name,
        "initialCapital": format_rational(cert.initial_capital),
        "dynamic": {
            str(nid): [format_rational(v) for v in cert.dynamic[nid]]
            for nid in sorted(cert.dynamic)
        },
        "staticSigned": [
            {"option": m.options[k].name, "position": format_rational(h)}
            for k, h in zip(others, cert.static_signed)
        ],
    }
