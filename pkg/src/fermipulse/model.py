"""Trap/laser geometry and scattering kinematics.

All computation uses trap units: hbar = omega_t = 1, lengths in units of
the ground-state size a, temperatures tau = k_B T / (hbar omega_t).
"""

import math
from dataclasses import dataclass

# Laser wavenumber times trap size for the default configuration
# (800 nm transition, ~1.6 um ground-state size).
DEFAULT_KLA = 12.5
# Pulse bandwidth over laser frequency for a 10 ps pulse at 800 nm.
DEFAULT_GAMMA_RATIO = 4.244e-5
# Natural linewidth over pulse bandwidth: 2*pi*2.5 MHz times 10 ps.
DEFAULT_NATURAL_WIDTH_RATIO = 1.5708e-4


@dataclass(frozen=True)
class TrapModel:
    """Dimensionless trap/laser parameters.

    kla                 -- laser wavenumber times trap size, k_L * a
    gamma_ratio         -- pulse bandwidth over laser frequency; controls how
                           the scattered wavenumber varies with detuning
    natural_width_ratio -- natural linewidth over pulse bandwidth; sets the
                           overall photon-number normalization
    """

    kla: float = DEFAULT_KLA
    gamma_ratio: float = DEFAULT_GAMMA_RATIO
    natural_width_ratio: float = DEFAULT_NATURAL_WIDTH_RATIO

    def __post_init__(self):
        for name in ("kla", "gamma_ratio", "natural_width_ratio"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {v!r}")
        # the narrow-band treatment breaks down once the pulse bandwidth is
        # not small against the carrier
        if self.gamma_ratio >= 0.1:
            raise ValueError(
                f"gamma_ratio must be < 0.1 for the narrow-band model, got {self.gamma_ratio}"
            )


@dataclass(frozen=True)
class ScatterPoint:
    """One (theta, varpi) evaluation point with momentum-transfer components.

    theta   -- polar angle between the scattered wavevector and the laser axis
    varpi   -- detuning of the scattered photon in units of the pulse bandwidth
    x_total -- (k - k_L)^2 a^2
    x_x     -- transverse component (dk_x a)^2 (k_y = 0 by azimuthal symmetry)
    x_z     -- longitudinal component (dk_z a)^2
    """

    theta: float
    varpi: float
    x_total: float
    x_x: float
    x_z: float


def kinematics(trap, theta, varpi):
    """Momentum transfer for a photon scattered to angle theta, detuning varpi.

    The scattered wavenumber is ka = kla * (1 + gamma_ratio * varpi); the
    laser propagates along z, so dk_z a = ka cos(theta) - kla and
    dk_x a = ka sin(theta).  theta may be signed in [-pi, pi]; everything is
    even in theta.
    """
    if not (math.isfinite(theta) and math.isfinite(varpi)):
        raise ValueError(f"non-finite kinematics input theta={theta!r} varpi={varpi!r}")
    if abs(theta) > math.pi + 1e-12:
        raise ValueError(f"theta must lie in [-pi, pi], got {theta}")
    ka = trap.kla * (1.0 + trap.gamma_ratio * varpi)
    if ka <= 0.0:
        raise ValueError(f"scattered wavenumber is not positive at varpi={varpi}")
    dkx = ka * math.sin(theta)
    dkz = ka * math.cos(theta) - trap.kla
    x_x = dkx * dkx
    x_z = dkz * dkz
    return ScatterPoint(theta=theta, varpi=varpi, x_total=x_x + x_z, x_x=x_x, x_z=x_z)
