"""Python access to the bic library: effective Hamiltonians, S-matrices and BIC search."""

from ._bic import (
    UsageError,
    bics,
    fp_chain_bic,
    heff,
    models,
    ring_transmission,
    smatrix,
    sweep,
    twolevel_bic_point,
    twolevel_eigenvalues,
    twolevel_transmission,
)

__all__ = [
    "UsageError",
    "bics",
    "fp_chain_bic",
    "heff",
    "models",
    "ring_transmission",
    "smatrix",
    "sweep",
    "twolevel_bic_point",
    "twolevel_eigenvalues",
    "twolevel_transmission",
]
