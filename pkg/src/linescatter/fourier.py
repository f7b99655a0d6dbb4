"""Exact scattering by ``delta(x) sum_n z_n exp(i alpha_n y)`` and by embedded Dirac combs.

The transmitted coefficient is a finite sum of plane-wave channels
``A+(p) = sum_s x_s delta(p - p0 - s Omega)`` over the propagating shifts
``|p0 + s Omega| < k``. Commensurate frequencies ``alpha_n = c_n Omega`` collapse
the tuple bookkeeping to the single integer lattice of shifts ``s``, and the
channel amplitudes solve

    A_{l,m} = delta_{l,m} + i Z(l - m) / (2 omega_l),    b_l = 2 pi delta_{l,0},

where ``Z(c)`` is the total coupling of the harmonics with multiplier ``c`` and
``omega_l = sqrt(k^2 - (p0 + l Omega)^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce as _fold
from typing import Optional, Union

import numpy as np

from .errors import (
    GrazingMode,
    IncommensurateFrequencies,
    OutOfCell,
    OutOfRegime,
    SingularMatrix,
    SpectralSingularity,
)
from .numerics import ScaledDeterminant, lu_determinant, solve_dense
from .potentials import (
    FourierLinePotential,
    IncidentWave,
    PeriodicComb,
    comb_to_fourier,
    required_truncation,
    validate,
)

GRAZING_RTOL = 1e-9
MAX_DENOMINATOR = 10**6


@dataclass(frozen=True)
class ModeSet:
    base: float
    shifts: tuple
    p: np.ndarray
    omega: np.ndarray

    def __len__(self):
        return len(self.shifts)

    def index(self, shift: int) -> int:
        return self.shifts.index(shift)


@dataclass(frozen=True)
class ModeSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    modes: ModeSet


@dataclass(frozen=True)
class Beam:
    shift: int
    theta: float
    coefficient: complex


@dataclass(frozen=True)
class DiscreteAmplitude:
    """Directional beams ``f = -i/sqrt(2 pi) sum_s y_s [delta(theta - theta_s) + delta(theta + theta_s - pi)]``.

    Coefficients are the dimensionless ``y_s``; each beam leaves once on the
    transmission side (``theta_s``) and once on the reflection side
    (``pi - theta_s``) with the same coefficient.
    """

    k: float
    theta0: float
    beams: tuple

    @property
    def shifts(self) -> tuple:
        return tuple(b.shift for b in self.beams)

    def coefficient(self, shift: int) -> complex:
        for beam in self.beams:
            if beam.shift == shift:
                return beam.coefficient
        return 0j

    def coefficients(self) -> np.ndarray:
        return np.array([b.coefficient for b in self.beams], dtype=complex)

    def directions(self):
        """``(shift, angle, y)`` for both the transmitted and the reflected copy of every beam."""
        rows = []
        for beam in self.beams:
            rows.append((beam.shift, beam.theta, beam.coefficient))
            rows.append((beam.shift, math.pi - beam.theta, beam.coefficient))
        return rows


def _smallest_denominator(r: Fraction, tolerance: float, max_denominator: int) -> Optional[int]:
    """Smallest ``q <= max_denominator`` with ``|q r - round(q r)| <= tolerance``.

    Such a ``q`` is a best approximation of the second kind, hence a
    continued-fraction convergent denominator.
    """
    h_prev, h = 0, 1
    q_prev, q = 1, 0
    x = r
    while True:
        a = math.floor(x)
        h_prev, h = h, a * h + h_prev
        q_prev, q = q, a * q + q_prev
        if q > max_denominator:
            return None
        if abs(float(q * r - h)) <= tolerance:
            return q
        frac = x - a
        if frac == 0:
            return None
        x = 1 / frac


def commensurate_base(potential: FourierLinePotential, tolerance: float = 1e-9, max_denominator: int = MAX_DENOMINATOR):
    """Largest ``Omega`` with every ``alpha_n / Omega`` within ``tolerance`` of an integer.

    Returns ``(Omega, multipliers)``. Frequencies without a rational relation
    of denominator at most ``max_denominator`` raise
    :class:`IncommensurateFrequencies`. A potential with no frequencies has no
    lattice; ``Omega`` is then ``inf``.
    """
    validate(potential)
    alphas = potential.frequencies
    if not alphas:
        return math.inf, ()
    first = alphas[0]
    denominators = []
    for alpha in alphas:
        q = _smallest_denominator(Fraction(alpha / first), tolerance, max_denominator)
        if q is None:
            raise IncommensurateFrequencies(
                f"alpha={alpha!r} has no rational relation to alpha_1={first!r} "
                f"with denominator <= {max_denominator}",
                frequencies=list(alphas),
            )
        denominators.append(q)
    big_q = _fold(math.lcm, denominators)
    if big_q > max_denominator:
        raise IncommensurateFrequencies(
            f"common denominator {big_q} exceeds {max_denominator}", frequencies=list(alphas)
        )
    multipliers = [round(big_q * alpha / first) for alpha in alphas]
    g = _fold(math.gcd, multipliers)
    multipliers = tuple(c // g for c in multipliers)
    return first * g / big_q, multipliers


def _grazing_eps(k: float) -> float:
    return GRAZING_RTOL * k


def _mode_set(base: float, shifts, wave: IncidentWave) -> ModeSet:
    shifts = tuple(int(s) for s in shifts)
    if math.isinf(base):
        p = np.array([wave.p0])
    else:
        p = wave.p0 + base * np.array(shifts, dtype=float)
    return ModeSet(base=base, shifts=shifts, p=p, omega=np.sqrt(wave.k**2 - p**2))


def enumerate_modes(base: float, wave: IncidentWave) -> ModeSet:
    """All shifts ``s`` with ``|p0 + s Omega| <= k - eps``, ``eps = 1e-9 k``, ascending.

    A shift landing within ``eps`` of the band edge has ``omega ~ 0`` and
    raises :class:`GrazingMode`.
    """
    if not base > 0:
        raise ValueError(f"base frequency must be positive, got {base!r}")
    k, p0 = wave.k, wave.p0
    if math.isinf(base):
        return _mode_set(base, (0,), wave)
    eps = _grazing_eps(k)
    shifts = []
    for s in range(math.floor((-k - p0) / base) - 1, math.ceil((k - p0) / base) + 2):
        p = p0 + s * base
        if abs(abs(p) - k) <= eps:
            raise GrazingMode(
                f"shift {s} is grazing: |p0 + s Omega| = {abs(p)!r} ~ k = {k!r}",
                shift=s,
                k=k,
                theta0=wave.theta0,
                base=base,
            )
        if abs(p) < k:
            shifts.append(s)
    return _mode_set(base, shifts, wave)


def mode_set_formula(j: int, q: int, base: float, wave: IncidentWave) -> ModeSet:
    """Closed-form mode set of the cell ``(j, q)`` for ``2k/(j+1) < Omega <= 2k/j``.

    Full cells ``-k + q Omega <= p0 <= k - (j - q) Omega`` hold ``j + 1`` shifts
    ``-q .. -q + j``; the gaps ``k - (j - q) Omega < p0 < -k + (q + 1) Omega``
    hold ``j`` shifts ``-q .. -q + j - 1``.
    """
    k, p0 = wave.k, wave.p0
    if j < 1 or not 0 <= q <= j:
        raise ValueError(f"need j >= 1 and 0 <= q <= j, got j={j}, q={q}")
    if not 2 * k / (j + 1) < base <= 2 * k / j:
        raise ValueError(f"Omega={base!r} is outside (2k/(j+1), 2k/j] for j={j}")
    if -k + q * base <= p0 <= k - (j - q) * base:
        return _mode_set(base, range(-q, -q + j + 1), wave)
    if k - (j - q) * base < p0 < -k + (q + 1) * base:
        return _mode_set(base, range(-q, -q + j), wave)
    raise OutOfCell(f"p0={p0!r} is not in cell (j={j}, q={q})", j=j, q=q, p0=p0)


def offset_couplings(potential: FourierLinePotential, multipliers) -> dict:
    """``Z(c)``: total coupling carried by lattice offset ``c``."""
    table = {}
    for n, z in potential.harmonics.items():
        c = 0 if n == 0 else (multipliers[abs(n) - 1] if n > 0 else -multipliers[abs(n) - 1])
        table[c] = table.get(c, 0j) + z
    return table


def build_mode_system(potential: FourierLinePotential, base: float, multipliers, modes: ModeSet, wave: IncidentWave) -> ModeSystem:
    z_of = offset_couplings(potential, multipliers)
    size = len(modes)
    matrix = np.eye(size, dtype=complex)
    for row, l in enumerate(modes.shifts):
        scale = 0.5j / modes.omega[row]
        for col, m in enumerate(modes.shifts):
            z = z_of.get(l - m)
            if z is not None:
                matrix[row, col] += scale * z
    rhs = np.zeros(size, dtype=complex)
    rhs[modes.index(0)] = 2 * math.pi
    return ModeSystem(matrix=matrix, rhs=rhs, modes=modes)


def mode_system(potential: FourierLinePotential, wave: IncidentWave) -> ModeSystem:
    base, multipliers = commensurate_base(potential)
    modes = enumerate_modes(base, wave)
    return build_mode_system(potential, base, multipliers, modes, wave)


def _beams(modes: ModeSet, x, wave: IncidentWave) -> DiscreteAmplitude:
    beams = []
    for s, p, xs in zip(modes.shifts, modes.p, x):
        y = xs - 2 * math.pi if s == 0 else xs
        beams.append(Beam(shift=s, theta=math.asin(p / wave.k), coefficient=complex(y)))
    return DiscreteAmplitude(k=wave.k, theta0=wave.theta0, beams=tuple(beams))


def solve_beams(potential: FourierLinePotential, wave: IncidentWave) -> DiscreteAmplitude:
    system = mode_system(potential, wave)
    try:
        report = solve_dense(system.matrix, system.rhs)
    except SingularMatrix as exc:
        raise SpectralSingularity(
            f"mode system is singular at k={wave.k!r}, theta0={wave.theta0!r}",
            k=wave.k,
            theta0=wave.theta0,
        ) from exc
    return _beams(system.modes, report.solution, wave)


def mode_determinant(potential: FourierLinePotential, wave: IncidentWave) -> ScaledDeterminant:
    return lu_determinant(mode_system(potential, wave).matrix)


# -- single harmonic closed forms ---------------------------------------------


def _case2_setup(potential: FourierLinePotential, wave: IncidentWave):
    validate(potential)
    if potential.order != 1:
        raise OutOfRegime("closed forms need a single harmonic z_0 + z_- e^{-i alpha y} + z_+ e^{i alpha y}")
    alpha = potential.frequencies[0]
    k, p0 = wave.k, wave.p0
    if not k < alpha <= 2 * k:
        raise OutOfRegime(f"need k < alpha <= 2k, got k={k!r}, alpha={alpha!r}", k=k, alpha=alpha)
    if p0 >= alpha - k:
        side = -1
    elif p0 <= k - alpha:
        side = 1
    else:
        raise OutOfRegime(f"|p0| < alpha - k: single-channel regime (p0={p0!r})", k=k, alpha=alpha, p0=p0)
    omega_side = math.sqrt(max(k * k - (p0 + side * alpha) ** 2, 0.0))
    if omega_side <= _grazing_eps(k):
        raise GrazingMode("side channel is grazing", shift=side, k=k, theta0=wave.theta0, base=alpha)
    omega0 = k * math.cos(wave.theta0)
    return side, omega0, omega_side


def case2_determinant(potential: FourierLinePotential, wave: IncidentWave) -> complex:
    """Closed-form ``det A`` for two open channels (shifts ``{-1, 0}`` or ``{0, 1}``).

    ``det = (z_- z_+ - z_0^2 + 2i(w_s + w_0) z_0 + 4 w_s w_0) / (4 w_s w_0)``,
    with ``w_s`` the longitudinal momentum of the side channel.
    """
    _, omega0, omega_side = _case2_setup(potential, wave)
    z0, zm, zp = potential.coupling(0), potential.coupling(-1), potential.coupling(1)
    numerator = zm * zp - z0 * z0 + 2j * (omega_side + omega0) * z0 + 4 * omega_side * omega0
    return numerator / (4 * omega_side * omega0)


def case2_amplitude(potential: FourierLinePotential, wave: IncidentWave) -> DiscreteAmplitude:
    """Closed-form beams for two open channels.

    ``y_0 = -2 pi (det - i z_0 / (2 w_s) - 1) / det`` and
    ``y_s = -2 pi (i z_s / (2 w_s)) / det``, where the side coupling ``z_s``
    is ``z_-`` for shifts ``{-1, 0}`` and ``z_+`` for ``{0, 1}``.
    """
    side, _, omega_side = _case2_setup(potential, wave)
    det = case2_determinant(potential, wave)
    if abs(det) < 1e-14:
        raise SpectralSingularity("closed-form determinant vanishes", k=wave.k, theta0=wave.theta0)
    z0, z_side = potential.coupling(0), potential.coupling(side)
    alpha = potential.frequencies[0]
    y0 = -2 * math.pi * (det - 1j * z0 / (2 * omega_side) - 1) / det
    y_side = -2 * math.pi * (1j * z_side / (2 * omega_side)) / det
    theta_side = math.asin(math.sin(wave.theta0) + side * alpha / wave.k)
    beams = [Beam(0, wave.theta0, complex(y0)), Beam(side, theta_side, complex(y_side))]
    beams.sort(key=lambda b: b.shift)
    return DiscreteAmplitude(k=wave.k, theta0=wave.theta0, beams=tuple(beams))


def single_channel_coefficient(z0: complex, wave: IncidentWave) -> complex:
    """``y_0 = -2 pi i z_0 / (2 k cos(theta0) + i z_0)`` when only the incident channel is open."""
    return -2j * math.pi * z0 / (2 * wave.k * math.cos(wave.theta0) + 1j * z0)


def directional_laser_condition(z0: complex, alpha: float, k: Optional[float] = None):
    """A real ``(k, theta0)`` where the single-channel denominator ``2k cos(theta0) + i z0`` vanishes.

    Exists for ``z0`` on the positive imaginary axis with ``|z0| < alpha``;
    ``k`` defaults to the midpoint of ``[|z0|/2, alpha/2)``. Returns ``None``
    otherwise.
    """
    z0 = complex(z0)
    g = abs(z0)
    if not (z0.imag > 0 and abs(z0.real) <= 1e-15 * g and g < alpha):
        return None
    lo, hi = g / 2, alpha / 2
    if k is None:
        k = 0.5 * (lo + hi)
    elif not lo <= k < hi:
        return None
    return k, math.acos(g / (2 * k))


def comb_beams(comb: PeriodicComb, wave: IncidentWave, truncation: Optional[int] = None) -> DiscreteAmplitude:
    """Beams of the embedded Dirac comb via its truncated Fourier form.

    Harmonics past ``required_truncation`` cannot reach a propagating channel,
    so any ``truncation`` at or above it gives the same beams.
    """
    needed = required_truncation(comb, wave)
    if truncation is None:
        truncation = needed
    elif truncation < needed:
        raise ValueError(f"truncation {truncation} is below the required {needed} for k={wave.k!r}")
    return solve_beams(comb_to_fourier(comb, truncation), wave)


def beams_for(potential: Union[FourierLinePotential, PeriodicComb], wave: IncidentWave, truncation: Optional[int] = None) -> DiscreteAmplitude:
    if isinstance(potential, PeriodicComb):
        return comb_beams(potential, wave, truncation)
    return solve_beams(potential, wave)
