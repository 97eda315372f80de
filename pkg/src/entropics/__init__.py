"""Entropic quantities of finite-dimensional quantum channels.

Channels are given by Kraus operators, states by density matrices, and
every optimization over input decompositions runs as a seeded multistart
projected gradient search, so results are reproducible. The CLI entry
point lives in :mod:`entropics.cli`.
"""

from .core import (DensityMatrix, Ensemble, HermitianMatrix, KrausChannel,
                   ValidationError, apply_channel, compose_channel,
                   density_matrix, dephasing_channel, depolarizing_channel,
                   ensemble, hermitian_matrix, identity_channel,
                   maximally_entangled_state, partial_trace,
                   partial_trace_channel, pure_state, random_channel,
                   random_hermitian, random_pure, random_state,
                   spectral_truncation, tensor_channel, validate_channel)
from .decompositions import (StiefelPoint, TransportError,
                             decomposition_from_stiefel, random_stiefel,
                             stiefel_from_ensemble, stiefel_point,
                             transport_ensemble, truncation_sequence)
from .entropy import (donald_residual, ensemble_holevo_value,
                      ensemble_output_entropy, entropy, output_entropy,
                      relative_entropy, truncated_entropy_sequence)
from .optimize import (OptimizerOptions, OptimizerReport, brute_force_chi,
                       constrained_capacity, convex_closure_output_entropy,
                       holevo_chi, min_output_entropy, output_purity)
from .duality import (DualityReport, double_fenchel, duality_check,
                      fenchel_conjugate)
from .additivity import (AdditivityReport, chi_constrained_additivity_gap,
                         chi_strong_additivity_gap, product_state_gap,
                         purity_additivity_gap, subchannel_min_entropy_gap,
                         superadditivity_gap)
from .eof import (BipartiteState, bipartite_state, concurrence, eof,
                  schmidt_pure_state, separability_scan, wootters_eof)
from .io import (read_channel, read_hermitian, read_state, write_channel,
                 write_csv, write_hermitian, write_state)
from .propsuite import run_suite

__version__ = "0.1.0"

__all__ = [
    "AdditivityReport", "BipartiteState", "DensityMatrix", "DualityReport",
    "Ensemble", "HermitianMatrix", "KrausChannel", "OptimizerOptions",
    "OptimizerReport", "StiefelPoint", "TransportError", "ValidationError",
    "apply_channel", "bipartite_state", "brute_force_chi",
    "chi_constrained_additivity_gap", "chi_strong_additivity_gap",
    "compose_channel", "concurrence", "constrained_capacity",
    "convex_closure_output_entropy", "decomposition_from_stiefel",
    "density_matrix", "dephasing_channel", "depolarizing_channel",
    "donald_residual", "double_fenchel", "duality_check", "ensemble",
    "ensemble_holevo_value", "ensemble_output_entropy", "entropy", "eof",
    "fenchel_conjugate", "hermitian_matrix", "holevo_chi",
    "identity_channel", "maximally_entangled_state", "min_output_entropy",
    "output_entropy", "output_purity", "partial_trace",
    "partial_trace_channel", "product_state_gap", "pure_state",
    "purity_additivity_gap", "random_channel", "random_hermitian",
    "random_pure", "random_state", "random_stiefel", "read_channel",
    "read_hermitian", "read_state", "relative_entropy", "run_suite",
    "schmidt_pure_state", "separability_scan", "spectral_truncation",
    "stiefel_from_ensemble", "stiefel_point", "subchannel_min_entropy_gap",
    "superadditivity_gap", "tensor_channel", "transport_ensemble",
    "truncated_entropy_sequence", "truncation_sequence", "validate_channel",
    "wootters_eof", "write_channel", "write_csv", "write_hermitian",
    "write_state",
]
