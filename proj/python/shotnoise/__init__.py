"""Option and bond pricing under shot-noise jump models."""

from ._core import (
    AssetModel,
    ConvergenceError,
    DomainError,
    Error,
    JumpLaw,
    KinkError,
    OptionTerms,
    RateModel,
    TruncationError,
    __version__,
    a_factor,
    b_factor,
    backend_agreement,
    bond_price,
    bs_price,
    conditional_moments,
    greeks,
    identity_report,
    l_parameter,
    mc_bond_price,
    mc_option_price,
    parity_residual,
    price,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
