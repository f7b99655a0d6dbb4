"""Exact scattering by a finite array of 2D delta interactions on the y-axis.

The field values ``x_n`` at the scatterer positions solve the Foldy system
``sum_n A_mn x_n = b_m`` with

    A_mn = delta_mn + (i/4) z_n J0(k (a_m - a_n)),    b_m = exp(i a_m p0),

and the scattering amplitude is ``f(theta) = -1/(2 sqrt(2 pi)) sum_n z_n x_n
exp(-i a_n k sin(theta))``. ``A`` never depends on the incidence angle, so
neither do the spectral singularities (zeros of ``det A``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeparation, SingularMatrix, SpectralSingularity
from .numerics import ScaledDeterminant, bessel_j0, bessel_j0_array, lu_determinant, solve_dense
from .potentials import DeltaLineArray, IncidentWave, validate

_AMPLITUDE_PREFACTOR = -1.0 / (2.0 * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class FoldySystem:
    matrix: np.ndarray
    rhs: np.ndarray
    k: float
    p0: float


@dataclass(frozen=True)
class SmoothAmplitude:
    """Scattering amplitude of a finite array, kept in coefficient form.

    ``weights[n] = z_n x_n``. Evaluation at any angle is exact; the amplitude
    depends on ``theta`` only through ``sin(theta)``.
    """

    k: float
    theta0: float
    couplings: np.ndarray
    positions: np.ndarray
    field: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return self.couplings * self.field

    def at_sine(self, sin_theta):
        s = np.asarray(sin_theta, dtype=float)
        phase = np.exp(-1j * self.k * np.multiply.outer(s, self.positions))
        return _AMPLITUDE_PREFACTOR * (phase @ self.weights)

    def __call__(self, theta):
        return self.at_sine(np.sin(theta))

    def near_field(self, y):
        """Inverse Fourier transform of the transmitted coefficient along the line x = 0."""
        y = np.asarray(y, dtype=float)
        p0 = self.k * math.sin(self.theta0)
        kernel = bessel_j0_array(self.k * np.subtract.outer(y, self.positions))
        return np.exp(1j * p0 * y) - 0.25j * (kernel @ self.weights)


def _arrays(array: DeltaLineArray):
    return np.array(array.couplings, dtype=complex), np.array(array.positions, dtype=float)


def coupling_kernel(positions, k: float) -> np.ndarray:
    """``J0(k (a_m - a_n))``; symmetric with unit diagonal."""
    positions = np.asarray(positions, dtype=float)
    return bessel_j0_array(k * np.subtract.outer(positions, positions))


def foldy_matrix(array: DeltaLineArray, k: float) -> np.ndarray:
    z, a = _arrays(array)
    return np.eye(len(z), dtype=complex) + 0.25j * coupling_kernel(a, k) * z[np.newaxis, :]


def build_system(array: DeltaLineArray, wave: IncidentWave) -> FoldySystem:
    validate(array)
    _, a = _arrays(array)
    return FoldySystem(
        matrix=foldy_matrix(array, wave.k),
        rhs=np.exp(1j * a * wave.p0),
        k=wave.k,
        p0=wave.p0,
    )


def solve_amplitude(array: DeltaLineArray, wave: IncidentWave) -> SmoothAmplitude:
    system = build_system(array, wave)
    try:
        report = solve_dense(system.matrix, system.rhs)
    except SingularMatrix as exc:
        raise SpectralSingularity(
            f"Foldy matrix is singular at k={wave.k!r}", k=wave.k, theta0=wave.theta0
        ) from exc
    z, a = _arrays(array)
    return SmoothAmplitude(k=wave.k, theta0=wave.theta0, couplings=z, positions=a, field=report.solution)


def _singular_scale(denominator: complex, scale: float, **parameters):
    if abs(denominator) < 1e-14 * scale:
        raise SpectralSingularity("closed-form denominator vanishes", **parameters)


def closed_form_single(z: complex, a1: float, wave: IncidentWave) -> SmoothAmplitude:
    """Single delta at ``(0, a1)``: ``x_1 = 4 exp(i a1 p0) / (4 + i z)``."""
    z = complex(z)
    _singular_scale(4 + 1j * z, 4 + abs(z), k=wave.k, coupling=z)
    x1 = 4 * cmath.exp(1j * a1 * wave.p0) / (4 + 1j * z)
    return SmoothAmplitude(
        k=wave.k,
        theta0=wave.theta0,
        couplings=np.array([z]),
        positions=np.array([float(a1)]),
        field=np.array([x1]),
    )


def double_delta_det(z1: complex, z2: complex, a1: float, a2: float, k: float) -> complex:
    j = bessel_j0(k * (a1 - a2))
    return (j * j - 1) * z1 * z2 / 16 + 0.25j * (z1 + z2) + 1


def closed_form_double(z1: complex, z2: complex, a1: float, a2: float, wave: IncidentWave) -> SmoothAmplitude:
    """Two deltas, with the 2x2 inverse written out by hand.

    Gathering the terms multiplying ``exp(-i a_n k sin(theta))`` gives
    ``z_1 x_1 = z_1 [(4 + i z_2) e_1 - i z_2 J e_2] / (4 det)`` and its mirror,
    where ``e_n = exp(i a_n p0)``.
    """
    z1, z2 = complex(z1), complex(z2)
    det = double_delta_det(z1, z2, a1, a2, wave.k)
    _singular_scale(det, 1 + (abs(z1) + abs(z2)) / 4 + abs(z1 * z2) / 16, k=wave.k, couplings=(z1, z2))
    j = bessel_j0(wave.k * (a1 - a2))
    e1, e2 = cmath.exp(1j * a1 * wave.p0), cmath.exp(1j * a2 * wave.p0)
    x1 = ((4 + 1j * z2) * e1 - 1j * z2 * j * e2) / (4 * det)
    x2 = ((4 + 1j * z1) * e2 - 1j * z1 * j * e1) / (4 * det)
    return SmoothAmplitude(
        k=wave.k,
        theta0=wave.theta0,
        couplings=np.array([z1, z2]),
        positions=np.array([float(a1), float(a2)]),
        field=np.array([x1, x2]),
    )


@dataclass(frozen=True)
class SymmetricPairAmplitude:
    """Identical deltas at ``(0, +-a/2)``: ``f = f_- cos(ak(s - s0)/2) + f_+ cos(ak(s + s0)/2)``."""

    z: complex
    a: float
    k: float
    theta0: float
    f_minus: complex
    f_plus: complex
    delta: complex

    def __call__(self, theta):
        s = np.sin(theta)
        s0 = math.sin(self.theta0)
        half = 0.5 * self.a * self.k
        return self.f_minus * np.cos(half * (s - s0)) + self.f_plus * np.cos(half * (s + s0))


def pair_delta(z: complex, a: float, k: float) -> complex:
    """``Delta(z, k) = (1 - J0(ak)^2) z^2 - 8 i z - 16``; equals ``-16 det A`` for the pair."""
    j = bessel_j0(a * k)
    return (1 - j * j) * z * z - 8j * z - 16


def symmetric_pair(z: complex, a: float, wave: IncidentWave) -> SymmetricPairAmplitude:
    z = complex(z)
    delta = pair_delta(z, a, wave.k)
    _singular_scale(delta, 16 + 8 * abs(z) + abs(z) ** 2, k=wave.k, coupling=z)
    norm = math.sqrt(2 * math.pi) * delta
    return SymmetricPairAmplitude(
        z=z,
        a=float(a),
        k=wave.k,
        theta0=wave.theta0,
        f_minus=4 * z * (4 + 1j * z) / norm,
        f_plus=-4j * z * z * bessel_j0(a * wave.k) / norm,
        delta=delta,
    )


def double_delta_singular_couplings(a: float, k: float) -> tuple:
    """Both couplings ``z`` of an identical pair at separation ``a`` with ``Delta(z, k) = 0``.

    ``Delta`` is quadratic in ``z`` with discriminant ``-64 J0(ak)^2``, so the
    roots are ``4i / (1 - J0(ak))`` and ``4i / (1 + J0(ak))``, purely imaginary.
    """
    ak = a * k
    if abs(ak) <= 1e-12:
        raise DegenerateSeparation("coincident pair: J0(ak) = 1 leaves a single root", a=a, k=k)
    j = bessel_j0(ak)
    return 4j / (1 - j), 4j / (1 + j)


@dataclass(frozen=True)
class SingularityCandidate:
    k: float
    abs_det: float
    grid_index: int


@dataclass(frozen=True)
class DeterminantScan:
    k: np.ndarray
    determinants: tuple
    candidates: tuple

    @property
    def abs_det(self) -> np.ndarray:
        return np.array([abs(d) for d in self.determinants])


def refine_minimum(xs, ys, i: int) -> float:
    """Vertex of the parabola through the three grid points around index ``i``."""
    if i == 0 or i == len(xs) - 1:
        return float(xs[i])
    x0, x1, x2 = xs[i - 1], xs[i], xs[i + 1]
    y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a <= 0 or not math.isfinite(a):
        return float(x1)
    vertex = -b / (2 * a)
    return float(min(max(vertex, x0), x2))


def local_minima(values, threshold: float):
    """Indices of (non-strict) local minima of ``values`` that do not exceed ``threshold``."""
    values = list(values)
    n = len(values)
    found = []
    for i, v in enumerate(values):
        if not math.isfinite(v) or v > threshold:
            continue
        left = values[i - 1] if i > 0 else math.inf
        right = values[i + 1] if i < n - 1 else math.inf
        if v <= left and v <= right:
            found.append(i)
    return found


def determinant_scan(array: DeltaLineArray, k_grid, threshold: float = 1e-8) -> DeterminantScan:
    """``det A`` along a wavenumber grid plus refined minima of ``|det A|``.

    A minimum is a candidate spectral singularity when ``|det|`` is at most
    ``threshold`` times the median ``|det|`` over the grid.
    """
    validate(array)
    ks = np.asarray(k_grid, dtype=float)
    if np.any(ks <= 0) or np.any(np.diff(ks) <= 0):
        raise ValueError("k grid must be positive and strictly increasing")
    dets = tuple(lu_determinant(foldy_matrix(array, k)) for k in ks)
    return scan_result(ks, dets, threshold)


def scan_result(ks, dets, threshold: float) -> DeterminantScan:
    mags = np.array([abs(d) if d is not None else math.nan for d in dets])
    finite = mags[np.isfinite(mags)]
    cutoff = threshold * float(np.median(finite)) if finite.size else 0.0
    candidates = tuple(
        SingularityCandidate(k=refine_minimum(ks, mags, i), abs_det=float(mags[i]), grid_index=i)
        for i in local_minima(mags, cutoff)
    )
    return DeterminantScan(k=ks, determinants=dets, candidates=candidates)


def matrix_determinant(array: DeltaLineArray, k: float) -> ScaledDeterminant:
    return lu_determinant(foldy_matrix(array, k))


def field_fixed_point_check(array: DeltaLineArray, wave: IncidentWave) -> float:
    """``max_m |A+(a_m) - x_m|`` with the near field rebuilt from the solved ``x``."""
    amplitude = solve_amplitude(array, wave)
    return float(np.max(np.abs(amplitude.near_field(amplitude.positions) - amplitude.field)))
