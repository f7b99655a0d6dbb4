"""Reduction of ``zeta delta(a x + b y) g(b x - a y)`` to the canonical ``delta(x) g'(y)``.

For ``b != 0`` the frame is rotated by ``phi = arctan(-a/b)``::

    x' = sin(phi) x - cos(phi) y,    y' = cos(phi) x + sin(phi) y

so that ``a x + b y = -sgn(b) s x'`` and ``b x - a y = sgn(b) s y'`` with
``s = sqrt(a^2 + b^2)``. The incident wave vector rotates with the frame, giving
the canonical incidence angle ``theta0 - phi + pi/2``. When that lands on the
right-incident side, an extra half-turn (``x'' = -x'``, ``y'' = -y'``) brings
it back to ``(-pi/2, pi/2)`` at the cost of reflecting the profile; the
potential ``delta(x)`` is even, so this is exact.

All stretching and reflection is pushed into the profile's parameters so the
solvers only ever see canonical descriptors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateLine, GrazingAfterRotation
from .potentials import (
    DeltaLineArray,
    FourierLinePotential,
    GeneralLinePotential,
    IncidentWave,
    PeriodicComb,
    Profile,
    validate,
)

GRAZING_ATOL = 1e-12


@dataclass(frozen=True)
class CanonicalReduction:
    """Bookkeeping of one reduction.

    ``profile_scale`` is the signed factor ``tau`` with ``g'(y') = g(tau y')``;
    ``stretch = |tau|``. A direction ``theta'`` in the canonical frame is the
    direction ``theta' + frame_angle`` in the original frame.
    """

    zeta_prime: complex
    stretch: float
    profile_scale: float
    theta0_prime: float
    frame_angle: float
    half_turn: bool
    potential: Profile
    wave: IncidentWave


def _scale_profile(profile: Profile, zeta_prime: complex, tau: float) -> Profile:
    """Canonical descriptor of ``zeta' g(tau y)``."""
    s = abs(tau)
    if isinstance(profile, DeltaLineArray):
        # delta(tau y - a_n) = delta(y - a_n / tau) / |tau|
        return DeltaLineArray(
            couplings=[zeta_prime * c / s for c in profile.couplings],
            positions=[a / tau for a in profile.positions],
        )
    if isinstance(profile, FourierLinePotential):
        sign = 1 if tau > 0 else -1
        return FourierLinePotential(
            harmonics={sign * n: zeta_prime * c for n, c in profile.harmonics.items()},
            frequencies=[s * alpha for alpha in profile.frequencies],
        )
    if isinstance(profile, PeriodicComb):
        # the lattice is symmetric under reflection; only the spacing and weight change
        return PeriodicComb(coupling=zeta_prime * profile.coupling / s, spacing=profile.spacing / s)
    raise TypeError(f"unsupported profile {type(profile).__name__}")


def reduce(potential: GeneralLinePotential, wave: IncidentWave) -> CanonicalReduction:
    """Map a tilted line potential and its incident wave to canonical form.

    Raises :class:`DegenerateLine` for ``a = b = 0`` and
    :class:`GrazingAfterRotation` when the wave runs parallel to the line.
    """
    a, b = potential.a, potential.b
    if a == 0.0 and b == 0.0:
        raise DegenerateLine("line coefficients a and b both vanish", a=a, b=b)
    validate(potential)
    s = math.hypot(a, b)
    zeta_prime = potential.zeta / s

    if b == 0.0:
        # zeta delta(a x) g(-a y) = (zeta / |a|) delta(x) g(-a y): no rotation needed
        tau, phi, theta = -a, 0.0, wave.theta0
        frame_angle = 0.0
        half_turn = False
    else:
        phi = math.atan(-a / b)
        sigma = 1.0 if b > 0 else -1.0
        tau = sigma * s
        theta = wave.theta0 - phi + math.pi / 2
        frame_angle = phi - math.pi / 2
        half_turn = theta > math.pi / 2
        if half_turn:
            theta -= math.pi
            tau = -tau
            frame_angle += math.pi

    if abs(abs(theta) - math.pi / 2) <= GRAZING_ATOL:
        raise GrazingAfterRotation(
            "incident wave is parallel to the line after rotation",
            theta0=wave.theta0,
            phi=phi,
            a=a,
            b=b,
        )
    canonical = _scale_profile(potential.profile, zeta_prime, tau)
    return CanonicalReduction(
        zeta_prime=zeta_prime,
        stretch=s,
        profile_scale=tau,
        theta0_prime=theta,
        frame_angle=frame_angle,
        half_turn=half_turn,
        potential=canonical,
        wave=IncidentWave(wave.k, theta),
    )


def canonical_general(profile: Profile) -> GeneralLinePotential:
    """The general-form wrapper whose reduction is ``profile`` itself (``a=-1, b=0``)."""
    return GeneralLinePotential(zeta=1.0, a=-1.0, b=0.0, profile=profile)
