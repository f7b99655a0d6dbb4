"""Perturbative cross-checks for the direct solvers.

On the finite channel space both linear systems read ``(I + K) x = b``; the
Born (Neumann) series ``x = sum_l (-K)^l b`` is the fixed-point iteration
``x <- b - K x`` and converges when the spectral radius of ``K`` is below one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotConverged
from .foldy import build_system
from .fourier import mode_system
from .potentials import DeltaLineArray, FourierLinePotential, IncidentWave

POWER_STEPS = 20


@dataclass(frozen=True)
class BornSeriesResult:
    partial_sums: tuple
    converged: bool
    terms_used: int
    estimated_ratio: float

    @property
    def solution(self) -> np.ndarray:
        return self.partial_sums[-1]


def contraction_estimate(operator: np.ndarray, steps: int = POWER_STEPS) -> float:
    """Spectral radius of ``operator`` from the mean growth rate over ``steps`` power iterations."""
    n = operator.shape[0]
    if n == 0 or not np.any(operator):
        return 0.0
    v = np.ones(n, dtype=complex) + 0.5j * np.arange(n) / n
    v /= np.linalg.norm(v)
    log_growth = 0.0
    for _ in range(steps):
        v = operator @ v
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return 0.0
        log_growth += np.log(norm)
        v /= norm
    return float(np.exp(log_growth / steps))


def neumann_iterate(matrix: np.ndarray, rhs: np.ndarray, max_terms: int, tol: float) -> BornSeriesResult:
    if max_terms < 1:
        raise ValueError(f"max_terms must be at least 1, got {max_terms}")
    matrix = np.asarray(matrix, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    kernel = matrix - np.eye(matrix.shape[0])
    ratio = contraction_estimate(kernel)
    x = rhs.copy()
    iterates = [x]
    for _ in range(max_terms):
        with np.errstate(over="ignore", invalid="ignore"):
            x_next = rhs - kernel @ x
        step = float(np.max(np.abs(x_next - x))) if x.size else 0.0
        iterates.append(x_next)
        x = x_next
        if step < tol:
            return BornSeriesResult(tuple(iterates), True, len(iterates) - 1, ratio)
        if not np.isfinite(step):
            break
    raise NotConverged(
        f"Born series did not converge in {max_terms} terms (contraction estimate {ratio:.3g})",
        estimated_ratio=ratio,
        max_terms=max_terms,
    )


def born_series_foldy(array: DeltaLineArray, wave: IncidentWave, max_terms: int = 500, tol: float = 1e-12) -> BornSeriesResult:
    system = build_system(array, wave)
    return neumann_iterate(system.matrix, system.rhs, max_terms, tol)


def born_series_modes(potential: FourierLinePotential, wave: IncidentWave, max_terms: int = 500, tol: float = 1e-12) -> BornSeriesResult:
    system = mode_system(potential, wave)
    return neumann_iterate(system.matrix, system.rhs, max_terms, tol)


def residual_verify(system, solution) -> float:
    """``||A x - b||_inf / max(1, ||b||_inf)`` for a Foldy or mode system."""
    A = np.asarray(system.matrix, dtype=complex)
    b = np.asarray(system.rhs, dtype=complex)
    x = np.asarray(solution, dtype=complex)
    if x.shape != b.shape:
        raise ValueError(f"solution shape {x.shape} does not match rhs shape {b.shape}")
    if b.size == 0:
        return 0.0
    return float(np.max(np.abs(A @ x - b)) / max(1.0, float(np.max(np.abs(b)))))
