"""Simulator for optimal 1->2 cloning of d-level photonic states.

Covers the symmetrization cloning channel and its coincidence statistics,
mutually unbiased bases in prime dimensions, MUB tomography with shot noise,
and a d-level BB84 key-distribution simulation under a clone-and-resend
attack, plus a CLI that renders each experiment to CSV/JSON and figures.
"""

from .cloning import (
    CloneOutput,
    CoincidenceRecord,
    HomModel,
    clone_channel,
    clone_reduced_analytic,
    clone_reduced_density,
    coalescence_enhancement,
    estimated_clone_distribution,
    estimation_fidelity,
    fidelity_from_counts,
    hom_dip_curve,
    hom_effective_joint,
    joint_detection_prob,
    optimal_clone_fidelity,
    ordered_joint_probabilities,
    shrinking_factor,
    simulate_coincidences,
)
from .mubs import (
    MubSet,
    MubVerification,
    fourier_angle_basis,
    gaussian_state,
    mub_set,
    mub_vector,
    oam_index,
    oam_label,
    verify_mub,
)
from .qcore import (
    Ket,
    basis_ket,
    density_from_ket,
    fidelity_ket,
    fidelity_state,
    haar_random_ket,
    maximally_mixed,
    partial_trace,
    swap_operator,
    symmetric_projector,
    tensor,
)
from .qkd import (
    DitMessage,
    QkdConfig,
    QkdTranscript,
    dits_to_image,
    eve_clone_attack,
    image_to_dits,
    mutual_information,
    otp_decrypt,
    otp_encrypt,
    probability_matrix,
    qber,
    run_bb84,
    security_bound_coh,
)
from .tomography import (
    MeasurementCounts,
    TomographyResult,
    linear_inversion,
    project_to_physical,
    simulate_measurements,
    tomography_pipeline,
)

__version__ = "0.1.0"
