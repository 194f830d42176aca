"""Linear interference alignment for multicell multiuser MIMO uplinks.

Plans the alignment parameters that maximize total degrees of freedom,
builds the precoders on concrete channel draws and verifies them by
measuring subspace dimensions.
"""
__version__ = "0.1.0"

from .dofcalc import (Plan, SchemeParams, baseline_dofs, ici_count, kappa_candidates,
                      optimal_bounds, per_user_dof, plan, upper_bound)
from .estimators import IASystemSolver, UplinkIADesigner
from .ia_core import (IAScenario, IASystem, PrecoderSet, build_ia_system,
                      solve_precoders, verify_alignment, zero_force_precoders)
from .netmodel import ChannelRealization, NetworkConfig, make_config, sample_channel
from .orchestrator import (NetworkDesign, VerificationReport, assign_targets,
                           design_network, lemma1_check, lemma2_check, verify_design)
from .subspace import (Tolerance, null_space_basis, numerical_rank,
                       orth_complement, span_dim)
