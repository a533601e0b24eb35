"""Heun spectral polynomials, root loci, and Strebel trajectory structures."""

from ._core import (
    NumericalError,
    SpectrumResult,
    VanVleckPair,
    __version__,
    build_Mi,
    cauchy_transform,
    ct_ode_residual,
    f_side,
    f_side_prime,
    find_b0,
    gamma_locus,
    log_potential,
    loop_identities,
    polynomial_roots,
    run_verification,
    singular_graph,
    solve_spectrum,
)

__all__ = [
    "NumericalError",
    "SpectrumResult",
    "VanVleckPair",
    "__version__",
    "build_Mi",
    "cauchy_transform",
    "ct_ode_residual",
    "f_side",
    "f_side_prime",
    "find_b0",
    "gamma_locus",
    "log_potential",
    "loop_identities",
    "polynomial_roots",
    "run_verification",
    "singular_graph",
    "solve_spectrum",
]
