"""Bessel J0 and dense complex Gaussian elimination used by both solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, SingularMatrix

PIVOT_RTOL = 1e-14

_SERIES_LIMIT = 8.0
_MILLER_LIMIT = 20.0
_ASYMPTOTIC_TERMS = 9


def _j0_series(x: float) -> float:
    # ascending series, Kahan-compensated; cancellation stays below 1e-14 for |x| <= 8
    q = -0.25 * x * x
    term, total, carry = 1.0, 0.0, 0.0
    m = 0
    while True:
        y = term - carry
        t = total + y
        carry = (t - total) - y
        total = t
        m += 1
        term *= q / (m * m)
        if m > 2 and abs(term) < 1e-18:
            return total


def _j0_miller(x: float) -> float:
    # backward recurrence normalised by J0 + 2 * sum J_2k = 1
    start = 2 * ((int(x) + 40) // 2)
    j_next, j = 0.0, 1e-30
    norm = 0.0
    for n in range(start, 0, -1):
        j_next, j = j, (2.0 * n / x) * j - j_next
        if n > 1 and (n - 1) % 2 == 0:
            norm += 2.0 * j
    return j / (norm + j)


def _hankel_coefficients(count):
    a = [1.0]
    for k in range(1, count):
        a.append(-a[-1] * (2 * k - 1) ** 2 / (8.0 * k))
    return a


_HANKEL = _hankel_coefficients(2 * _ASYMPTOTIC_TERMS + 1)


def _j0_asymptotic(x: float) -> float:
    p = sum((-1) ** k * _HANKEL[2 * k] / x ** (2 * k) for k in range(_ASYMPTOTIC_TERMS))
    q = sum((-1) ** k * _HANKEL[2 * k + 1] / x ** (2 * k + 1) for k in range(_ASYMPTOTIC_TERMS))
    c, s = math.cos(x), math.sin(x)
    # cos/sin of (x - pi/4) without forming the shifted argument
    cos_chi = (c + s) / math.sqrt(2.0)
    sin_chi = (s - c) / math.sqrt(2.0)
    return math.sqrt(2.0 / (math.pi * x)) * (p * cos_chi - q * sin_chi)


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind, order zero.

    Absolute error is below 1e-14 on ``|x| <= 50``; the function is exactly even.
    """
    x = float(x)
    if not math.isfinite(x):
        raise NonFinite(f"bessel_j0 needs a finite argument, got {x!r}", x=x)
    x = abs(x)
    if x <= _SERIES_LIMIT:
        return _j0_series(x)
    if x <= _MILLER_LIMIT:
        return _j0_miller(x)
    return _j0_asymptotic(x)


bessel_j0_array = np.vectorize(bessel_j0, otypes=[float])


def band_integral_check(aval: float, k: float) -> float:
    """Deviation of ``int_{-k}^{k} cos(a p) / sqrt(k^2 - p^2) dp`` from ``pi J0(a k)``.

    The substitution ``p = k sin(u)`` turns the integrand into the smooth
    ``cos(a k sin u)`` on ``[-pi/2, pi/2]``, integrated here by Gauss-Legendre.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    ak = aval * k
    nodes, weights = np.polynomial.legendre.leggauss(48 + 2 * int(math.ceil(abs(ak))))
    u = 0.5 * math.pi * nodes
    integral = 0.5 * math.pi * float(np.dot(weights, np.cos(ak * np.sin(u))))
    return abs(integral - math.pi * bessel_j0(ak))


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray
    condition_estimate: float
    residual_norm: float


@dataclass(frozen=True)
class ScaledDeterminant:
    """Determinant stored as ``mantissa * 2**exponent`` with ``0.5 <= |mantissa| < 1``."""

    mantissa: complex
    exponent: int

    @property
    def value(self) -> complex:
        m = self.mantissa
        return complex(math.ldexp(m.real, self.exponent), math.ldexp(m.imag, self.exponent))

    def __abs__(self) -> float:
        return math.ldexp(abs(self.mantissa), self.exponent)

    @property
    def log2_abs(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return math.log2(abs(self.mantissa)) + self.exponent


def _as_square(A) -> np.ndarray:
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def _lu_factor(A: np.ndarray):
    """In-place LU with partial pivoting. Returns (lu, perm); raises on a tiny pivot."""
    n = A.shape[0]
    lu = A.copy()
    perm = np.arange(n)
    scale = float(np.max(np.abs(A))) if n else 0.0
    threshold = PIVOT_RTOL * scale
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= threshold:
            raise SingularMatrix(
                f"pivot {abs(lu[p, k]):.3e} at step {k} is below {threshold:.3e}",
                step=k,
                pivot=abs(lu[p, k]),
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm


def _lu_solve(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    y = np.array(b, dtype=complex)[perm]
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1 :] @ y[i + 1 :]) / lu[i, i]
    return y


def solve_dense(A, b) -> SolveReport:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Raises :class:`SingularMatrix` when a pivot falls below ``1e-14`` times the
    largest entry of ``A``. The condition estimate is the exact 1-norm
    condition number, affordable at the sizes these solvers produce.
    """
    A = _as_square(A)
    b = np.asarray(b, dtype=complex)
    if b.shape != (A.shape[0],):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({A.shape[0]},)")
    lu, perm = _lu_factor(A)
    x = _lu_solve(lu, perm, b)
    n = A.shape[0]
    inverse = np.column_stack([_lu_solve(lu, perm, e) for e in np.eye(n, dtype=complex)])
    cond = float(np.linalg.norm(A, 1) * np.linalg.norm(inverse, 1))
    residual = float(np.max(np.abs(A @ x - b))) if n else 0.0
    return SolveReport(solution=x, condition_estimate=cond, residual_norm=residual)


def lu_determinant(A) -> ScaledDeterminant:
    """Determinant as a product of pivots with row-swap sign tracking.

    Never raises on singular input; an exactly vanishing pivot column yields zero.
    """
    A = _as_square(A)
    n = A.shape[0]
    lu = A.copy()
    mantissa, exponent = 1.0 + 0j, 0
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = lu[p, k]
        if pivot == 0:
            return ScaledDeterminant(0j, 0)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            mantissa = -mantissa
        lu[k + 1 :, k] /= pivot
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
        mantissa *= pivot
        _, e = math.frexp(abs(mantissa))
        mantissa = complex(math.ldexp(mantissa.real, -e), math.ldexp(mantissa.imag, -e))
        exponent += e
    return ScaledDeterminant(mantissa, exponent)
