"""Optimal fidelities for converting bipartite pure states without communication.

States are handled through their squared Schmidt coefficients. The package
covers local unitaries (``lu``), local operations with shared randomness
(``losr``), upper and communication bounds (``bounds``), many-copy dilution
and distillation (``iid``) and embezzling catalysts (``embezzle``).
"""

from .bounds import (BoundBundle, DeltaResult, compute_bounds, delta_epsilon,
                     dp_bernoulli_bound, dp_manual_bound, hayden_winter_bound,
                     ordered_block_relaxation, sdp_relaxation_bound)
from .embezzle import (EmbezzlerSearchResult, HarmonicState, embezzler_objective,
                       embezzler_search_losr, embezzler_search_lu, fig5_sweep, harmonic_dist,
                       load_catalyst_tables, randomness_embezzle_curve, randomness_embezzle_fidelity,
                       vdh_order_for_fidelity, vdh_required_rank)
from .errors import (ConvergenceError, DimensionError, DomainError, SchmidtBenchError,
                     SizeError, ValidationError)
from .iid import distillation_lo, distillation_lu, dilution_lo, dilution_lu
from .losr import (LosrResult, exact_convertible, f_losr, f_losr_grid,
                   iid_two_qubit_target_lu_optimal, losr_objective)
from .lu import (LuResult, f_lu, f_lu_iid_general, f_lu_iid_two_qubit,
                 f_lu_mixed_unitary_equals_lu, lu_decay_curve)
from .simplex import (ProbVector, SchmidtState, SortedProbVector, bhattacharyya, embed,
                      fidelity_classical, kp_quasi_norm, sort_desc, tensor, uniform)

__version__ = "0.1.0"
