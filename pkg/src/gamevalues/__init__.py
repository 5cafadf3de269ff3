"""Values and bounds for finite two-player cooperative games."""

from .algebra import (ConvergenceError, FiniteGroup, ValidationError, commutator,
                      cyclic_group, eig_sym, group_from_name, polar_unitary,
                      psd_project, symmetric_group)
from .classical import SearchReport, det_value, perfect_sync_group_strategy, sync_det_value
from .digraphs import (Digraph, dcut, directed_cycle, game_from_digraph,
                       has_perfect_strategy, net_length)
from .games import (Correlation, DeterministicStrategy, GroupGame, InputDensity,
                    UniqueGame, expected_value, make_chsh, make_commutator_game,
                    perfect_ns_correlation, symmetrize, uniform_density)
from .quantum_bounds import (CostFreeBasis, CostMatrix, Frame, cost_free_basis,
                             cost_matrix, cycle_q1_bipartite_value,
                             cycle_qc_closed_form, cycle_rotation_frame,
                             q1_bipartite_search, q1_search, q1_sync_value,
                             qc_sync_upper_bound, unitary_value_z3)
from .vect_sdp import (GramSolution, VectProgram, build_program,
                       c4_certified_construction, check_gram, extract_vectors,
                       project_to_feasible, round_to_deterministic,
                       rounding_threshold, solve_vect)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
