"""Capacity of multispan optical links with quantum-limited amplification."""

from .quadmodel import (
    QuadState,
    conventional_input,
    general_input,
    mean_photon_number,
    symmetric_coherent_input,
    vacuum_state,
)
from .linkchain import (
    AmpKind,
    AmpSpec,
    ChannelMap,
    LinkPlan,
    PropagationTrace,
    SpanSpec,
    apply_loss,
    apply_pia,
    apply_psa,
    attenuation_to_natural,
    channel_checkpoints,
    check_power_constraint,
    max_feasible_pia_gain,
    max_feasible_psa_gain,
    propagate,
)
from .capacity import (
    CapacityResult,
    GHSearchError,
    Scenario,
    entropy_g,
    gaussian_state_entropy,
    gh_capacity,
    holevo_chi,
    plan_capacity,
    shannon_single_quadrature,
    shannon_two_quadrature,
)
from .optimizer import (
    PlanCandidate,
    SweepRow,
    SweepTable,
    equidistant_saturating_plan,
    optimize_plan,
    sweep_distance,
)
from .distributed import (
    IntegrationError,
    OdeProfile,
    approx_capacity_pia,
    approx_capacity_psa,
    closed_form_psa,
    feedback_gain_pia,
    feedback_gain_psa,
    gh_capacity_at,
    integrate_pia,
    integrate_psa,
    state_at_position,
)

__all__ = [
    "AmpKind",
    "AmpSpec",
    "CapacityResult",
    "ChannelMap",
    "GHSearchError",
    "IntegrationError",
    "LinkPlan",
    "OdeProfile",
    "PlanCandidate",
    "PropagationTrace",
    "QuadState",
    "Scenario",
    "SpanSpec",
    "SweepRow",
    "SweepTable",
    "apply_loss",
    "apply_pia",
    "apply_psa",
    "approx_capacity_pia",
    "approx_capacity_psa",
    "attenuation_to_natural",
    "channel_checkpoints",
    "check_power_constraint",
    "closed_form_psa",
    "conventional_input",
    "entropy_g",
    "equidistant_saturating_plan",
    "feedback_gain_pia",
    "feedback_gain_psa",
    "gaussian_state_entropy",
    "general_input",
    "gh_capacity",
    "gh_capacity_at",
    "holevo_chi",
    "integrate_pia",
    "integrate_psa",
    "max_feasible_pia_gain",
    "max_feasible_psa_gain",
    "mean_photon_number",
    "optimize_plan",
    "plan_capacity",
    "propagate",
    "shannon_single_quadrature",
    "shannon_two_quadrature",
    "state_at_position",
    "sweep_distance",
    "symmetric_coherent_input",
    "vacuum_state",
]

__version__ = "0.1.0"
