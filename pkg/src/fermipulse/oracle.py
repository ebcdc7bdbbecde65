"""Brute-force reference implementations for the test suite.

Everything here favors being obviously correct over being fast: explicit
occupation tables, factorial-series displacement elements (independent of
the recurrence kernels), and plain nested loops over all level triples.
Intended for per-axis cutoffs of at most 8.
"""

import math
from dataclasses import dataclass

import numpy as np

from .statmech import occupation


def diagonal_element(n, x):
    """<n| e^{-i dk R} |n> = e^{-x/2} L_n(x), by the explicit factorial series."""
    acc = 0.0
    for k in range(n + 1):
        acc += (-1.0) ** k * math.comb(n, n - k) * x**k / math.factorial(k)
    return math.exp(-0.5 * x) * acc


def displacement_prob(n, m, x):
    """|<n| e^{-i dk R} |m>|^2 by the explicit factorial series, x = (dk a)^2."""
    lo, hi = (n, m) if n <= m else (m, n)
    d = hi - lo
    series = 0.0
    for k in range(lo + 1):
        series += (-1.0) ** k * math.comb(hi, lo - k) * x**k / math.factorial(k)
    pref = math.factorial(lo) / math.factorial(hi) * x**d * math.exp(-x)
    return pref * series * series


@dataclass(frozen=True)
class SmallTrapBasis:
    """Explicit occupation table N_{nx,ny,nz} over a per-axis cutoff n_max."""

    n_max: int
    occupations: np.ndarray

    def __post_init__(self):
        if self.n_max > 8:
            raise ValueError("brute-force basis capped at per-axis n_max = 8")
        if self.occupations.shape != (self.n_max + 1,) * 3:
            raise ValueError("occupation table shape does not match n_max")
        self.occupations.flags.writeable = False

    @classmethod
    def from_thermal(cls, state, n_max):
        """Table N_{nx,ny,nz} = P(nx+ny+nz) from a thermal state.

        Shells beyond the state's own cutoff hold zero, so a state clamped
        at n_max and this basis cover exactly the same set of levels.
        """
        tab = np.zeros((n_max + 1,) * 3)
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                for k in range(n_max + 1):
                    tab[i, j, k] = occupation(i + j + k, state)
        return cls(n_max=n_max, occupations=tab)

    @classmethod
    def single_atom(cls, level, n_max):
        """One atom parked in the given (nx, ny, nz) level."""
        tab = np.zeros((n_max + 1,) * 3)
        tab[tuple(level)] = 1.0
        return cls(n_max=n_max, occupations=tab)


def _axis_xs(dk):
    dk = [float(v) for v in dk]
    if len(dk) != 3:
        raise ValueError("dk must have three components")
    return [v * v for v in dk]


def brute_coherent(basis, dk):
    """|sum_n N_n <n|e^{-i dk R}|n>|^2 by the unreduced triple sum."""
    xs = _axis_xs(dk)
    b = basis.n_max
    diags = [[diagonal_element(n, x) for n in range(b + 1)] for x in xs]
    acc = 0.0
    for i in range(b + 1):
        for j in range(b + 1):
            for k in range(b + 1):
                occ = basis.occupations[i, j, k]
                if occ != 0.0:
                    acc += occ * diags[0][i] * diags[1][j] * diags[2][k]
    return acc * acc


def _prob_tables(b, m_top, xs):
    return [
        [[displacement_prob(n, m, x) for m in range(m_top + 1)] for n in range(b + 1)]
        for x in xs
    ]


def brute_incoherent(basis, dk):
    """sum_{n, n'} N_n N_n' |eta_nn'|^2 by the unreduced six-fold sum."""
    xs = _axis_xs(dk)
    b = basis.n_max
    probs = _prob_tables(b, b, xs)
    occ = basis.occupations
    acc = 0.0
    for i in range(b + 1):
        for j in range(b + 1):
            for k in range(b + 1):
                w = occ[i, j, k]
                if w == 0.0:
                    continue
                for l in range(b + 1):
                    for m in range(b + 1):
                        for n in range(b + 1):
                            w2 = occ[l, m, n]
                            if w2 != 0.0:
                                acc += w * w2 * probs[0][i][l] * probs[1][j][m] * probs[2][k][n]
    return acc


def brute_incoherent_blocked(basis, dk, m_top):
    """sum_{n} sum_{n' <= m_top} N_n (1 - N_n') |eta_nn'|^2.

    The final-state sum runs over the enlarged per-axis cutoff m_top with
    vacuum occupations beyond the basis table; as m_top grows this converges
    to N - brute_incoherent by the displacement sum rule.
    """
    xs = _axis_xs(dk)
    b = basis.n_max
    probs = _prob_tables(b, m_top, xs)
    occ = basis.occupations

    def occ_at(l, m, n):
        if l <= b and m <= b and n <= b:
            return occ[l, m, n]
        return 0.0

    acc = 0.0
    for i in range(b + 1):
        for j in range(b + 1):
            for k in range(b + 1):
                w = occ[i, j, k]
                if w == 0.0:
                    continue
                for l in range(m_top + 1):
                    for m in range(m_top + 1):
                        for n in range(m_top + 1):
                            acc += (
                                w
                                * (1.0 - occ_at(l, m, n))
                                * probs[0][i][l]
                                * probs[1][j][m]
                                * probs[2][k][n]
                            )
    return acc


def sum_rule_residual(level, dk, m_top):
    """|1 - sum_{m <= m_top} |eta_{level,m}|^2| for a single initial level.

    The sum over final states factorizes per axis, so each axis row is
    summed independently and multiplied.
    """
    xs = _axis_xs(dk)
    total = 1.0
    for n_axis, x in zip(level, xs):
        total *= sum(displacement_prob(n_axis, m, x) for m in range(m_top + 1))
    return abs(1.0 - total)
