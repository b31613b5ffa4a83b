"""Fault-tolerant stabilizer error correction embedded in a single spin qudit.

Pipeline: molecular spin Hamiltonian -> dephasing Kraus hierarchy ->
Knill-Laflamme code words -> error-transparent pulse compilation ->
Lindblad-level protocol cycles -> threshold and scaling sweeps.
"""

from .config import RunConfig, default_config, load_config
from .dephasing import (
    DephasingSpec,
    KrausSet,
    RateMatrix,
    apply_dephasing,
    calibrate_to_t2,
    compute_rates,
    kraus_decompose,
)
from .code_synthesis import (
    CodeWords,
    ErrorBasis,
    build_error_basis,
    kl_residual,
    solve_codewords,
    stabilizer_observable,
)
from .et_compiler import (
    GeneratorMatrix,
    PulseSchedule,
    cu_unitary,
    embed_logical,
    generator_of,
    planar_generator,
    planar_rotation,
    recovery_unitary,
    schedule_pulses,
)
from .lindblad import (
    DensityMatrix,
    EvolutionSegment,
    IntegratorConfig,
    evolve_segment,
    free_decay,
)
from .protocol import (
    CARDINAL_STATES,
    PAPER_GATE_SET,
    CycleReport,
    LogicalQubitSystem,
    MeasurementModel,
    build_system,
    calibrated_rabi_max,
    decode,
    encode,
    entanglement_error,
    run_cycle,
    stabilize_and_measure,
    uncorrected_baseline,
)
from .spin_model import (
    EigenSystem,
    QuditBasis,
    SpinTopology,
    build_hamiltonian,
    diagonalize,
    select_qudit_basis,
    sz_diagonal_elements,
)

__version__ = "0.1.0"
