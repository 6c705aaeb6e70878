"""Exact arbitrage verdicts, super-hedging prices, and dual measures for
finite discrete-time markets whose hedging options quote with bid-ask
spreads, under a finitely generated family of scenario weightings.

Everything is exact rational arithmetic end to end; every verdict ships a
certificate that replays outside the solver.
"""

from .arbitrage import (
    ArbitrageCertificate,
    MartingaleMeasure,
    NaVerdict,
    NarVerdict,
    RobustnessWitness,
    check_na,
    check_nar,
    dominating_measure,
    scenario_pricing_measure,
    verify_measure,
    verify_na_certificate,
    verify_nar_witness,
    strictly_inside_quotes,
)
from .errors import (
    ArbitrageError,
    DomainError,
    HedgecertError,
    PreconditionError,
    RobustArbitrageError,
    SoundnessError,
    StructureError,
)
from .lp import LpOutcome, LpProblem, solve_lp, verify_certificate
from .model import (
    Claim,
    MarketModel,
    MeasureFamily,
    Node,
    OptionQuote,
    Rational,
    ScenarioTree,
    Strategy,
    ValidationReport,
    canonical_legs,
    rat,
    rats,
    support,
    terminal_gain,
    validate_market,
    zero_strategy,
)
from .oracle import (
    NarScanResult,
    VertexSet,
    definitional_nar_scan,
    enumerate_consistent_measures,
)
from .redundancy import (
    NonredundancyVerdict,
    ReplicationCertificate,
    SharperFtapBundle,
    SpreadOptionsReport,
    all_spread_options_nonredundant,
    check_nonredundant,
    sharper_ftap,
    verify_replication,
)
from .superhedge import (
    PricingReport,
    claim_price_bounds,
    dual_price,
    duality_report,
    market_without_option,
    price_bounds_excluding,
    strict_dual_approx,
    superhedge_price,
    verify_super_replication,
)

__version__ = "0.1.0"
