"""Discord-type correlation measures and numerical checks of their behaviour
under local channels on the unmeasured party."""

from .channels import (
    POVM,
    Channel,
    MeasurementBasis,
    apply,
    apply_local,
    embed,
    gamma_sigma,
    measure_and_prepare_example,
    povm_channel,
    projective_channel,
    random_channel,
    stinespring,
)
from .measures import (
    ChannelClass,
    MeasureReport,
    cond_mutual_info,
    discord,
    geometric_discord,
    geometric_discord_qubit_closed_form,
    info_loss,
    mutual_info,
    scaling_demo,
    tilde_geometric_discord,
    vn_entropy,
)
from .optimize import OptimizerConfig
from .qmat import DimPair, hs_norm, partial_trace, purity, tensor, validate_density
from .states import (
    BipartiteState,
    CQSpec,
    bell_state,
    cq_state,
    example_cc_state,
    example_post_channel_state,
    random_cq_state,
    random_state,
)

__version__ = "0.1.0"
