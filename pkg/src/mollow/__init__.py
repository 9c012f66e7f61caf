"""Resonance-fluorescence entanglement toolkit: a driven two-level
emitter cascaded into detector or polariton modes, with spectra,
frequency-resolved correlations, Monte Carlo click statistics, and
entanglement measures."""

__version__ = "0.1.0"

from .opalg import (  # noqa: F401
    DensityMatrix,
    Operator,
    SpaceLayout,
    StateVector,
    annihilation,
    basis_state,
    bell_state,
    embed,
    expectation,
    identity,
    layout,
    partial_trace,
)
from .modelkit import (  # noqa: F401
    CascadeSpec,
    Channel,
    LindbladModel,
    PolaritonSpec,
    TargetSpec,
    build_driven_2ls,
    cascade,
    check_truncation_health,
    detector_hamiltonian,
    polariton_hamiltonian,
)
from .liouville import (  # noqa: F401
    LiouvilleEigen,
    SpectrumTable,
    Superoperator,
    emission_spectrum,
    liouvillian_matrix,
    steady_state,
    transition_energies,
)
from .correlator import CorrelationCurve, evolve, g2_auto_zero, g2_cross  # noqa: F401
from .entglmeas import (  # noqa: F401
    BellReport,
    DetectionMatrix,
    bell_report,
    concurrence,
    csi_R,
    detection_matrix,
    fidelity,
    log_negativity,
    partial_transpose,
    postselect_remove_vacuum,
)
from .trajec import (  # noqa: F401
    ClickStats,
    TrajectoryBatch,
    TrajectoryRecord,
    click_statistics,
    delay_histogram,
    heralding_ratio,
    run_ensemble,
    run_trajectory,
)
from .scenarios import (  # noqa: F401
    MollowConfig,
    PolaritonStudy,
    SweepResultRow,
    build_system,
    default_polariton_spec,
    entanglement_map,
    optimal_detuning,
    optimal_drive,
    optimal_map,
    point_metrics,
    polariton_study,
    sideband_frequencies,
    write_sweep_csv,
)
