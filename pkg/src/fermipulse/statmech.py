"""Ideal-gas statistical mechanics in an isotropic 3D harmonic trap.

Solves the fugacity of N fermions (or Maxwell-Boltzmann atoms) at reduced
temperature tau = k_B T / (hbar omega_t) from the number constraint
sum_n g(n) P(n) = N, and precomputes the shell-occupation table used by
every downstream sum.  The fugacity is carried in log form so that the
deeply degenerate regime (log z ~ E_F / tau, thousands) never overflows.
"""

import enum
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit


class ConvergenceFailure(Exception):
    """Fugacity solve failed to bracket or meet tolerance."""


class Statistics(enum.Enum):
    FERMI_DIRAC = "fd"
    MAXWELL_BOLTZMANN = "mb"

    @classmethod
    def parse(cls, text):
        key = str(text).strip().lower().replace("_", "-")
        aliases = {
            "fd": cls.FERMI_DIRAC,
            "fermi-dirac": cls.FERMI_DIRAC,
            "fermidirac": cls.FERMI_DIRAC,
            "mb": cls.MAXWELL_BOLTZMANN,
            "maxwell-boltzmann": cls.MAXWELL_BOLTZMANN,
            "maxwellboltzmann": cls.MAXWELL_BOLTZMANN,
        }
        if key not in aliases:
            raise ValueError(f"unknown statistics {text!r}")
        return aliases[key]


def degeneracy(n):
    """Number of oscillator states on shell n: (n+1)(n+2)/2."""
    if n < 0 or n != int(n):
        raise ValueError(f"shell index must be a non-negative integer, got {n!r}")
    n = int(n)
    return (n + 1) * (n + 2) // 2


def _degeneracy_array(n_max):
    n = np.arange(n_max + 1, dtype=np.float64)
    return (n + 1.0) * (n + 2.0) / 2.0


def fermi_energy(n_atoms):
    """Fermi energy in units of hbar omega_t.

    Exact shell filling (smallest n_F whose cumulative degeneracy reaches N)
    for N <= 1000, the continuum value (6N)^(1/3) above.
    """
    if n_atoms < 1:
        raise ValueError(f"n_atoms must be >= 1, got {n_atoms}")
    if n_atoms <= 1000:
        cum = 0
        n = 0
        while True:
            cum += degeneracy(n)
            if cum >= n_atoms:
                return float(n)
            n += 1
    return (6.0 * n_atoms) ** (1.0 / 3.0)


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Solved thermal state of the trapped gas.

    occupations[n] is the mean occupation P(n) of one state on shell n,
    for n = 0..n_max; occupations beyond n_max are treated as exactly zero
    everywhere in the package (the solver pushes the discarded tail below
    1e-12 of N).
    """

    n_atoms: float
    tau: float
    log_fugacity: float
    n_max: int
    statistics: Statistics
    occupations: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.occupations.flags.writeable = False

    @property
    def fugacity(self):
        # may overflow to inf for deeply degenerate states; log_fugacity is
        # the canonical field
        try:
            return math.exp(self.log_fugacity)
        except OverflowError:
            return math.inf

    @property
    def total_atoms(self):
        """sum_n g(n) P(n) over the stored table."""
        with self._lock:
            if "total_atoms" not in self._cache:
                g = _degeneracy_array(self.n_max)
                self._cache["total_atoms"] = float(g @ self.occupations)
            return self._cache["total_atoms"]

    def __repr__(self):
        return (
            f"ThermalState(n_atoms={self.n_atoms:g}, tau={self.tau:g}, "
            f"log_fugacity={self.log_fugacity:.6g}, n_max={self.n_max}, "
            f"statistics={self.statistics.value})"
        )


def occupation(n, state):
    """Mean occupation of one state on shell n (0 beyond the stored table)."""
    if n < 0 or n != int(n):
        raise ValueError(f"shell index must be a non-negative integer, got {n!r}")
    n = int(n)
    if n > state.n_max:
        return 0.0
    return float(state.occupations[n])


def occupation_variance(n, state):
    """Occupation variance P(n)(1 - P(n)); Fermi-Dirac only."""
    if state.statistics is not Statistics.FERMI_DIRAC:
        raise ValueError("occupation variance P(1-P) is defined for Fermi-Dirac states only")
    p = occupation(n, state)
    return p * (1.0 - p)


def _log_shell_tail(log_z, tau, n):
    """log of sum_{m>n} g(m) z e^{-m/tau}, the classical bound on the FD tail."""
    q = math.exp(-1.0 / tau)
    one_m_q = -math.expm1(-1.0 / tau)
    bracket = 0.5 * (
        q * (1.0 + q) / one_m_q**3
        + (2.0 * n + 5.0) * q / one_m_q**2
        + (n + 2.0) * (n + 3.0) / one_m_q
    )
    return log_z - (n + 1.0) / tau + math.log(bracket)


_N_MAX_CAP = 20_000_000


def _shell_cutoff(log_z, tau, n_atoms, n_floor):
    """Smallest n_max with the analytic tail bound below 1e-12 N, >= n_floor."""
    target = math.log(1e-12 * n_atoms)
    n = max(int(n_floor), 1)
    while _log_shell_tail(log_z, tau, n) >= target:
        n = int(n * 1.5) + 8
        if n > _N_MAX_CAP:
            raise ConvergenceFailure(
                f"shell cutoff exceeds {_N_MAX_CAP} at tau={tau} (log_z={log_z:.3g})"
            )
    lo, hi = max(int(n_floor), 1), n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _log_shell_tail(log_z, tau, mid) < target:
            hi = mid
        else:
            lo = mid
    return hi if _log_shell_tail(log_z, tau, lo) >= target else lo


def _fd_occupations(log_z, tau, n_max):
    n = np.arange(n_max + 1, dtype=np.float64)
    return expit(log_z - n / tau)


def _solve_fd_log_z(n_atoms, tau, n_max, log_z_mb, rel_tol, max_iter):
    g = _degeneracy_array(n_max)

    def shortfall(log_z):
        return float(g @ _fd_occupations(log_z, tau, n_max)) - n_atoms

    # FD occupations at fixed z are below MB ones, so the MB fugacity is a
    # lower bracket for the FD root
    lo = log_z_mb - 0.5
    guard = 0
    while shortfall(lo) > 0.0:
        lo -= max(1.0, abs(lo))
        guard += 1
        if guard > 100:
            raise ConvergenceFailure("could not establish lower fugacity bracket")
    hi = log_z_mb + 1.0
    step = 1.0
    guard = 0
    while shortfall(hi) < 0.0:
        hi += step
        step *= 2.0
        guard += 1
        if guard > 200:
            raise ConvergenceFailure("could not establish upper fugacity bracket")

    f_lo = shortfall(lo)
    f_hi = shortfall(hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = shortfall(mid)
        if abs(f_mid) <= 0.01 * rel_tol * n_atoms:
            return mid
        if f_mid < 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
    # secant polish on the final bracket
    mid = 0.5 * (lo + hi)
    if f_hi != f_lo:
        sec = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if lo <= sec <= hi and abs(shortfall(sec)) < abs(shortfall(mid)):
            mid = sec
    if abs(shortfall(mid)) > rel_tol * n_atoms:
        raise ConvergenceFailure(
            f"fugacity solve missed tolerance: |dN|/N = {abs(shortfall(mid)) / n_atoms:.3g}"
        )
    return mid


def solve_fugacity(n_atoms, tau, statistics=Statistics.FERMI_DIRAC, *, rel_tol=1e-10, max_iter=300):
    """Solve the fugacity for N atoms at reduced temperature tau.

    For Maxwell-Boltzmann atoms the closed form z = N (1 - e^{-1/tau})^3 is
    used; the Fermi-Dirac root is found by bisection in log z (the number
    constraint is strictly increasing in z) plus a secant polish.
    """
    if n_atoms < 1 or n_atoms != int(n_atoms):
        raise ValueError(f"n_atoms must be a positive integer, got {n_atoms!r}")
    if not (math.isfinite(tau) and tau > 0.0):
        raise ValueError(f"tau must be finite and positive, got {tau!r}")
    n_atoms = int(n_atoms)
    statistics = Statistics.parse(statistics) if isinstance(statistics, str) else statistics

    ef = fermi_energy(n_atoms)
    n_floor = int(math.ceil(ef + 40.0 * tau)) + 1
    log_z_mb = math.log(n_atoms) + 3.0 * math.log(-math.expm1(-1.0 / tau))

    if statistics is Statistics.MAXWELL_BOLTZMANN:
        n_max = _shell_cutoff(log_z_mb, tau, n_atoms, n_floor)
        n = np.arange(n_max + 1, dtype=np.float64)
        occ = np.exp(log_z_mb - n / tau)
        return ThermalState(
            n_atoms=float(n_atoms),
            tau=tau,
            log_fugacity=log_z_mb,
            n_max=n_max,
            statistics=statistics,
            occupations=occ,
        )

    # FD: the true z exceeds the MB estimate; pad the cutoff estimate and
    # verify against the solved value
    n_max = _shell_cutoff(log_z_mb + 0.5, tau, n_atoms, n_floor)
    for _ in range(4):
        log_z = _solve_fd_log_z(n_atoms, tau, n_max, log_z_mb, rel_tol, max_iter)
        needed = _shell_cutoff(log_z, tau, n_atoms, n_floor)
        if needed <= n_max:
            break
        n_max = needed
    else:
        raise ConvergenceFailure("shell cutoff failed to stabilize")

    occ = _fd_occupations(log_z, tau, n_max)
    g = _degeneracy_array(n_max)
    if abs(float(g @ occ) - n_atoms) > rel_tol * n_atoms:
        raise ConvergenceFailure("number constraint violated after solve")
    return ThermalState(
        n_atoms=float(n_atoms),
        tau=tau,
        log_fugacity=log_z,
        n_max=n_max,
        statistics=statistics,
        occupations=occ,
    )


def from_fugacity(log_z, tau, n_max, statistics=Statistics.FERMI_DIRAC):
    """State at prescribed fugacity with the level sums clamped at n_max.

    Intended for validation against the brute-force oracles, where both
    sides must run over exactly the same finite set of shells.  The atom
    number is whatever the clamped table sums to.
    """
    if not (math.isfinite(tau) and tau > 0.0):
        raise ValueError(f"tau must be finite and positive, got {tau!r}")
    if n_max < 0 or n_max != int(n_max):
        raise ValueError(f"n_max must be a non-negative integer, got {n_max!r}")
    statistics = Statistics.parse(statistics) if isinstance(statistics, str) else statistics
    n_max = int(n_max)
    if statistics is Statistics.MAXWELL_BOLTZMANN:
        n = np.arange(n_max + 1, dtype=np.float64)
        occ = np.exp(log_z - n / tau)
    else:
        occ = _fd_occupations(log_z, tau, n_max)
    g = _degeneracy_array(n_max)
    return ThermalState(
        n_atoms=float(g @ occ),
        tau=tau,
        log_fugacity=log_z,
        n_max=n_max,
        statistics=statistics,
        occupations=occ,
    )
