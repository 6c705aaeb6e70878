"""Non-redundancy of hedging options, and the sharper verdict it enables.

An option is redundant when cash, dynamic stock trading, and the other
options replicate its payoff exactly on every charged scenario; quotes play
no role in that question, only payoffs do. When every option with a nonzero
spread is non-redundant, plain no-arbitrage already implies the robust
version, so a single no-arbitrage check plus its dual package settles the
whole market; `sharper_ftap` bundles exactly that.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .arbitrage import (
    MartingaleMeasure,
    NaVerdict,
    RobustnessWitness,
    _charged_positions,
    check_na,
    check_nar,
    dominating_measure,
)
from .errors import DomainError, PreconditionError, SoundnessError
from .model import (
    MarketModel,
    ZERO,
    ONE,
    dynamic_gain_rows,
    dynamic_positions,
    require_valid,
)


@dataclass
class ReplicationCertificate:
    """Witness of redundancy: capital, dynamic positions, and signed static
    positions in the other options reproducing the target payoff exactly."""

    initial_capital: Fraction
    dynamic: dict[int, list[Fraction]]
    static_signed: list[Fraction]


@dataclass
class NonredundancyVerdict:
    non_redundant: bool
    certificate: ReplicationCertificate | None = None


@dataclass
class SpreadOptionsReport:
    all_non_redundant: bool
    verdicts: dict[int, NonredundancyVerdict]


@dataclass
class SharperFtapBundle:
    na: NaVerdict
    nar_witness: RobustnessWitness | None
    dominating: list[MartingaleMeasure] | None


def check_nonredundant(m: MarketModel, i: int) -> NonredundancyVerdict:
    """Feasibility of x + dynamic gains + other options == option i, exactly."""
    layout = require_valid(m)
    if not 0 <= i < len(m.options):
        raise DomainError(f"option index {i} out of range")
    supp = _charged_positions(m)
    drows = dynamic_gain_rows(m, layout)
    others = [k for k in range(len(m.options)) if k != i]
    nh = len(layout.nonleaf) * m.tree.num_assets
    ncols = 1 + nh + len(others)

    rows, rhs = [], []
    for pos in supp:
        coefs = [ONE] + list(drows[pos])
        coefs.extend(m.options[k].payoff[pos] for k in others)
        rows.append(coefs)
        rhs.append(m.options[i].payoff[pos])
    problem = lp.LpProblem(
        sense=lp.MIN,
        objective=[ZERO] * ncols,
        rows=rows,
        relations=[lp.EQ] * len(rows),
        rhs=rhs,
        lower=[None] * ncols,
        upper=[None] * ncols,
    )
    out = lp.solve_lp(problem)
    if out.status == lp.INFEASIBLE:
        return NonredundancyVerdict(True)
    if out.status != lp.OPTIMAL:
        raise SoundnessError("replication program has a constant objective")

    pairs = dynamic_positions(m, layout)
    dynamic = {nid: [ZERO] * m.tree.num_assets for nid in layout.nonleaf}
    for col, (nid, asset) in enumerate(pairs):
        dynamic[nid][asset] = out.primal[1 + col]
    static = list(out.primal[1 + nh:])
    return NonredundancyVerdict(
        False, ReplicationCertificate(out.primal[0], dynamic, static)
    )


def all_spread_options_nonredundant(m: MarketModel) -> SpreadOptionsReport:
    require_valid(m)
    verdicts = {
        i: check_nonredundant(m, i)
        for i, opt in enumerate(m.options)
        if opt.has_spread()
    }
    return SpreadOptionsReport(
        all(v.non_redundant for v in verdicts.values()), verdicts
    )


def sharper_ftap(m: MarketModel) -> SharperFtapBundle:
    """Settle the market from plain no-arbitrage alone.

    Precondition: every spread option non-redundant. If arbitrage exists the
    verdict carries its certificate; otherwise robust no-arbitrage must
    follow, and the bundle includes the robustness witness plus a dominating
    measure per generator. A market passing the precondition where the
    implication fails would be a solver bug, not a market.
    """
    require_valid(m)
    report = all_spread_options_nonredundant(m)
    if not report.all_non_redundant:
        bad = sorted(
            m.options[i].name for i, v in report.verdicts.items() if not v.non_redundant
        )
        raise PreconditionError(
            "redundant spread options: " + ", ".join(bad),
            details=report,
        )
    na = check_na(m)
    if not na.holds:
        return SharperFtapBundle(na, None, None)
    nar = check_nar(m)
    if not nar.holds:
        raise SoundnessError(
            "no-arbitrage holds with non-redundant spread options, yet the robust "
            f"check fails ({nar.blocking}); this contradicts an exact implication"
        )
    dominating = [
        dominating_measure(m, k) for k in range(len(m.measures.generators))
    ]
    return SharperFtapBundle(na, nar.witness, dominating)


def verify_replication(m: MarketModel, i: int, cert: ReplicationCertificate) -> bool:
    """Replay the replication identity on every charged leaf."""
    layout = require_valid(m)
    if not 0 <= i < len(m.options):
        return False
    supp = _charged_positions(m)
    drows = dynamic_gain_rows(m, layout)
    pairs = dynamic_positions(m, layout)
    others = [k for k in range(len(m.options)) if k != i]
    if len(cert.static_signed) != len(others):
        return False
    if set(cert.dynamic) != set(layout.nonleaf):
        return False
    for pos in supp:
        total = cert.initial_capital
        for col, (nid, asset) in enumerate(pairs):
            h = cert.dynamic[nid][asset]
            if h:
                total += h * drows[pos][col]
        for k, h in zip(others, cert.static_signed):
            if h:
                total += h * m.options[k].payoff[pos]
        if total != m.options[i].payoff[pos]:
            return False
    return True
