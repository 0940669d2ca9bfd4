"""Exact three-party competitive equilibria for mediated combinatorial auctions."""
from .core import (
    Allocation,
    AuctionError,
    EquivalenceViolation,
    Instance,
    ItemSet,
    LatticeViolation,
    NoEquilibrium,
    NoWalrasianEquilibrium,
    NoWerpEquilibrium,
    OracleDisagreement,
    PriceVector,
    Rational,
    SizeGuard,
    pointwise_max,
    pointwise_min,
    price_sum,
)
from .mediator import (
    REJECTED,
    EFMediator,
    MediatorDemand,
    VirtualAuctionOutcome,
    check_or_equivalence,
    mediator_demand,
    mediator_demand_bruteforce,
    or_player_demand,
    virtual_auction,
)
from .pipeline import (
    EquilibriumCertificate,
    build_mediator_hierarchy,
    check_equilibrium,
    check_min_price_relation,
    solve_three_party,
    trivial_equilibrium_from_we,
)
from .reserves import (
    ReservePrices,
    WerpEquilibrium,
    augment_with_additive_player,
    max_werp_prices,
    min_werp_prices,
    solve_werp,
    werp_lattice_join,
    werp_lattice_meet,
)
from .smallk import enumerate_set_partitions, hungarian_max_matching, smallk_max_welfare
from .valuations import (
    Additive,
    DemandResult,
    Explicit,
    Or,
    UnitDemand,
    Valuation,
    demand,
    demand_all,
    is_gross_substitutes,
    or_player,
)
from .verify import (
    EnvyReport,
    brute_welfare,
    check_envy_free,
    is_over_demanded,
    min_ef_price_oracle,
    min_price_lp,
    requirement_function,
)
from .walrasian import (
    WalrasianEquilibrium,
    WelfareSolution,
    max_walrasian_prices,
    max_welfare,
    min_walrasian_prices,
    solve_we,
)
from .formats import FormatError, dump_certificate, dump_instance, load_certificate, load_instance, read_instance

__version__ = "0.1.0"
