"""Hyperfine structure, ZEFOZ clock transitions and EIT spectra of
Kramers rare-earth ions in magnetic fields.

Units throughout: energies and frequencies in MHz, magnetic fields in mT,
curvatures in kHz/mT^2, with z along the crystal symmetry axis.
"""

__version__ = "0.1.0"

from .errors import ComputationError, ConfigError, InvalidParameterError
from .spins import (
    BOHR_MAGNETON_MHZ_PER_MT,
    FieldVector,
    IonParams,
    LevelSet,
    SpinParams,
    StateComponent,
    build_hamiltonian,
    diagonalize,
    ion_levels,
    state_composition,
)
from .fieldmap import (
    AxisGrid,
    FieldGrid,
    GradientResult,
    LevelDiagram,
    TransitionSelector,
    ZefozPoint,
    frequency_curvatures,
    frequency_gradient,
    level_diagram,
    quadratic_model,
    transition_frequency,
    zefoz_search,
)
from .transitions import (
    BOLTZMANN_MHZ_PER_K,
    LambdaSystem,
    SpectrumParams,
    TransitionLine,
    TransitionOperator,
    absorption_spectrum,
    boltzmann_weights,
    find_lambda_systems,
    transition_table,
)
from .eit import (
    CombModel,
    EitProfile,
    FLUORINE_GAMMA_MHZ_PER_MT,
    LambdaParams,
    NoiseModel,
    SweepPoint,
    amplitude_vs_field,
    averaged_susceptibility,
    binomial_weights,
    eit_amplitude,
    eit_profile,
    flat_weights,
    spin_linewidth,
    susceptibility,
)
from .config import (
    RunConfig,
    config_echo,
    format_ion_file,
    module_defaults,
    parse_config,
    parse_ion_file,
)
from .output import render_csv, render_json_records, write_table

__all__ = [
    "__version__",
    "BOHR_MAGNETON_MHZ_PER_MT",
    "BOLTZMANN_MHZ_PER_K",
    "FLUORINE_GAMMA_MHZ_PER_MT",
    "AxisGrid",
    "CombModel",
    "ComputationError",
    "ConfigError",
    "EitProfile",
    "FieldGrid",
    "FieldVector",
    "GradientResult",
    "InvalidParameterError",
    "IonParams",
    "LambdaParams",
    "LambdaSystem",
    "LevelDiagram",
    "LevelSet",
    "NoiseModel",
    "RunConfig",
    "SpectrumParams",
    "SpinParams",
    "StateComponent",
    "SweepPoint",
    "TransitionLine",
    "TransitionOperator",
    "TransitionSelector",
    "ZefozPoint",
    "absorption_spectrum",
    "amplitude_vs_field",
    "averaged_susceptibility",
    "binomial_weights",
    "boltzmann_weights",
    "build_hamiltonian",
    "config_echo",
    "diagonalize",
    "eit_amplitude",
    "eit_profile",
    "find_lambda_systems",
    "flat_weights",
    "format_ion_file",
    "frequency_curvatures",
    "frequency_gradient",
    "ion_levels",
    "level_diagram",
    "module_defaults",
    "parse_config",
    "parse_ion_file",
    "quadratic_model",
    "render_csv",
    "render_json_records",
    "spin_linewidth",
    "state_composition",
    "susceptibility",
    "transition_frequency",
    "transition_table",
    "write_table",
    "zefoz_search",
]
