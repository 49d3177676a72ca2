"""Multi-frame Lie groups, group-affine dynamics classification, and
invariant Kalman filtering for multi-sensor navigation."""

from .errors import (BranchCutError, ConvergenceError, InvalidSpecError,
                     RankError, SignatureMismatchError)
from .rotations import gamma, hat, so_dim, so_exp, so_log, vee
from .twoframe import (SimElement, SimTangent, TfgElement, TfgTangent,
                       sim_conjugate, sim_identity, tfg_adjoint, tfg_compose,
                       tfg_embed, tfg_exp, tfg_from_embedding, tfg_identity,
                       tfg_inverse, tfg_log)
from .multiframe import (MfgAutomorphism, MfgElement, MfgTangent,
                         left_error_recover, mfg_aut_apply, mfg_compose,
                         mfg_embed, mfg_exp, mfg_from_embedding, mfg_identity,
                         mfg_inverse, mfg_log, right_error_recover)
from .dynamics import (DynamicsSpec, MfgVelocity, assemble_velocity,
                       block_ode_rhs, component_ode_rhs, embedding_field,
                       error_autonomy_check, exact_flow_step,
                       group_affine_residual)
from .observations import (ObservationSpec, build_output, innovation_jacobian,
                           twisted_action)
from .filters import (DcioState, FilterState, ImperfectIekf, Mekf, MfgIekf,
                      NoiseConfig, build_filters, landmark_measurement,
                      propagate_mean)

__version__ = "0.1.0"
