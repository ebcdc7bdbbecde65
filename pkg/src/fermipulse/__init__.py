"""Light scattering of short 2*pi laser pulses from a trapped ideal Fermi gas.

Computes coherent and incoherent form functions, angular and frequency
photon distributions, and temperature-dependent total photon counts, with
Maxwell-Boltzmann comparison states and brute-force validation oracles.
All internals use trap units (hbar = omega_t = 1, lengths in the trap
ground-state size).
"""

__version__ = "0.1.0"

from ._kernels import USING_NUMBA
from .formfunc import (
    BudgetExceeded,
    FormFunctionError,
    FormFunctionRequest,
    Method,
    SeriesDivergence,
    ToleranceNotMet,
    coherent_form,
    incoherent_form,
    incoherent_weight,
)
from .model import ScatterPoint, TrapModel, kinematics
from .pulse import (
    PulseModel,
    PulseShape,
    S_COH_LINE_INTEGRAL,
    S_IN_LINE_INTEGRAL,
    pulse_area,
    rabi_evolve,
    single_atom_spectra,
)
from .quadrature import QuadratureFailure, adaptive_simpson
from .spectra import (
    AngularMode,
    SpectrumGrid,
    ThetaIntegrals,
    angular_distribution,
    angular_weight,
    differential,
    frequency_distribution,
    photon_norm,
    theta_integrals,
    total_photons,
)
from .specfun import (
    LaguerreTable,
    fc_matrix,
    franck_condon_sq,
    franck_condon_sq_loggamma,
    laguerre_addition_check,
    laguerre_scaled,
    laguerre_scaled_table,
)
from .statmech import (
    ConvergenceFailure,
    Statistics,
    ThermalState,
    degeneracy,
    fermi_energy,
    from_fugacity,
    occupation,
    occupation_variance,
    solve_fugacity,
)

__all__ = [
    "__version__",
    "USING_NUMBA",
    "AngularMode",
    "BudgetExceeded",
    "ConvergenceFailure",
    "FormFunctionError",
    "FormFunctionRequest",
    "LaguerreTable",
    "Method",
    "PulseModel",
    "PulseShape",
    "QuadratureFailure",
    "S_COH_LINE_INTEGRAL",
    "S_IN_LINE_INTEGRAL",
    "ScatterPoint",
    "SeriesDivergence",
    "SpectrumGrid",
    "Statistics",
    "ThermalState",
    "ThetaIntegrals",
    "ToleranceNotMet",
    "TrapModel",
    "adaptive_simpson",
    "angular_distribution",
    "angular_weight",
    "coherent_form",
    "degeneracy",
    "differential",
    "fc_matrix",
    "fermi_energy",
    "franck_condon_sq",
    "franck_condon_sq_loggamma",
    "frequency_distribution",
    "from_fugacity",
    "incoherent_form",
    "incoherent_weight",
    "kinematics",
    "laguerre_addition_check",
    "laguerre_scaled",
    "laguerre_scaled_table",
    "occupation",
    "occupation_variance",
    "photon_norm",
    "pulse_area",
    "rabi_evolve",
    "single_atom_spectra",
    "solve_fugacity",
    "theta_integrals",
    "total_photons",
]
