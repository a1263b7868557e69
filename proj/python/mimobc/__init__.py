"""Threshold-based eigenmode selection for MIMO broadcast channels.

The compiled extension exposes the channel, distribution, selection,
precoding and baseline operations; see the project README for the CLI and
experiment harness.
"""

from ._core import (  # noqa: F401
    ChannelMatrix,
    EigenMode,
    RngStream,
    SelectionResult,
    ThresholdMode,
    ThresholdPreset,
    __version__,
    channel_stream,
    dpc_sum_capacity,
    effective_noise_gammas_of,
    exhaustive_select,
    frobenius_tail,
    greedy_select,
    incomplete_beta,
    interactive_select,
    lambda_max_tail,
    no_csi_rate,
    orthogonality,
    orthogonality_defect,
    overlap_pdf,
    preselect_modes,
    projection_beta_pdf,
    random_dpc_rate,
    random_select,
    sample_channel,
    single_user_capacity,
    sum_rate_of_selection,
    svd_modes,
    task_stream,
    tdma_rate,
    threshold_value,
    waterfill_powers,
    wishart_unordered_eig_pdf,
    zero_forcing_precode_of,
)
