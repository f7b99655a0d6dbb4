"""Potential descriptors for delta-function interactions supported on a line.

Four families are modelled, all of the form ``delta(x) g(y)`` after reduction:

* :class:`DeltaLineArray` -- finitely many point interactions at ``(0, a_n)``.
* :class:`FourierLinePotential` -- ``g(y) = sum_n z_n exp(i alpha_n y)``.
* :class:`PeriodicComb` -- ``z * sum_m delta(y - m a)``, an embedded Dirac comb.
* :class:`GeneralLinePotential` -- ``zeta delta(a x + b y) g(b x - a y)``, reduced
  to one of the above by :func:`linescatter.geometry.reduce`.

Descriptors are plain frozen dataclasses; construction normalises types but does
not check invariants, which is the job of :func:`validate`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import InvalidPotential, InvalidWave


@dataclass(frozen=True)
class IncidentWave:
    """Left-incident plane wave ``exp(i k (cos(theta0) x + sin(theta0) y))``.

    Grazing incidence ``|theta0| = pi/2`` is rejected: the single-channel
    denominators ``2 k cos(theta0) + i z0`` degenerate there.
    """

    k: float
    theta0: float = 0.0

    def __post_init__(self):
        k = float(self.k)
        theta0 = float(self.theta0)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "theta0", theta0)
        if not math.isfinite(k) or k <= 0.0:
            raise InvalidWave(f"wavenumber must be positive and finite, got k={k!r}", k=k)
        if not math.isfinite(theta0) or abs(theta0) >= math.pi / 2:
            raise InvalidWave(
                f"incidence angle must lie in (-pi/2, pi/2), got theta0={theta0!r}",
                theta0=theta0,
            )

    @classmethod
    def from_degrees(cls, k: float, theta0_deg: float) -> "IncidentWave":
        return cls(k, math.radians(theta0_deg))

    @property
    def p0(self) -> float:
        """Transverse (y) momentum of the incident wave."""
        return self.k * math.sin(self.theta0)


@dataclass(frozen=True)
class DeltaLineArray:
    couplings: tuple
    positions: tuple

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(complex(z) for z in self.couplings))
        object.__setattr__(self, "positions", tuple(float(a) for a in self.positions))

    def __len__(self):
        return len(self.couplings)


@dataclass(frozen=True)
class FourierLinePotential:
    """``delta(x) sum_{n=-N}^{N} z_n exp(i alpha_n y)`` with ``alpha_{-n} = -alpha_n``.

    ``harmonics`` is sparse: an index that is absent has coupling zero.
    ``frequencies[n-1]`` holds ``alpha_n`` for ``n = 1..N``.
    """

    harmonics: Mapping[int, complex] = field(default_factory=dict)
    frequencies: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "harmonics", {int(n): complex(z) for n, z in sorted(dict(self.harmonics).items())}
        )
        object.__setattr__(self, "frequencies", tuple(float(a) for a in self.frequencies))

    @property
    def order(self) -> int:
        return len(self.frequencies)

    def coupling(self, n: int) -> complex:
        return self.harmonics.get(n, 0j)

    def frequency(self, n: int) -> float:
        if n == 0:
            return 0.0
        alpha = self.frequencies[abs(n) - 1]
        return alpha if n > 0 else -alpha


@dataclass(frozen=True)
class PeriodicComb:
    coupling: complex
    spacing: float

    def __post_init__(self):
        object.__setattr__(self, "coupling", complex(self.coupling))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def base_frequency(self) -> float:
        return 2 * math.pi / self.spacing


Profile = Union[DeltaLineArray, FourierLinePotential, PeriodicComb]


@dataclass(frozen=True)
class GeneralLinePotential:
    """``zeta delta(a x + b y) g(b x - a y)``; ``profile`` plays the role of ``g``."""

    zeta: complex
    a: float
    b: float
    profile: Profile

    def __post_init__(self):
        object.__setattr__(self, "zeta", complex(self.zeta))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))


Descriptor = Union[DeltaLineArray, FourierLinePotential, PeriodicComb, GeneralLinePotential]


def _finite(z) -> bool:
    return cmath.isfinite(complex(z))


def _problems(potential) -> list:
    problems = []
    if isinstance(potential, DeltaLineArray):
        if len(potential.couplings) == 0:
            problems.append("couplings: at least one point interaction is required")
        if len(potential.couplings) != len(potential.positions):
            problems.append(
                f"positions: length {len(potential.positions)} does not match "
                f"couplings length {len(potential.couplings)}"
            )
        if not all(_finite(z) for z in potential.couplings):
            problems.append("couplings: entries must be finite")
        if not all(math.isfinite(a) for a in potential.positions):
            problems.append("positions: entries must be finite")
    elif isinstance(potential, FourierLinePotential):
        alphas = potential.frequencies
        if any(not math.isfinite(a) or a <= 0.0 for a in alphas):
            problems.append("frequencies: every alpha_n must be positive and finite")
        if any(a2 <= a1 for a1, a2 in zip(alphas, alphas[1:])):
            problems.append("frequencies: must be strictly increasing")
        order = len(alphas)
        stray = [n for n in potential.harmonics if abs(n) > order]
        if stray:
            problems.append(f"harmonics: indices {stray} exceed the number of frequencies ({order})")
        if not all(_finite(z) for z in potential.harmonics.values()):
            problems.append("harmonics: couplings must be finite")
    elif isinstance(potential, PeriodicComb):
        if not math.isfinite(potential.spacing) or potential.spacing <= 0.0:
            problems.append(f"spacing: must be positive, got {potential.spacing!r}")
        if not _finite(potential.coupling):
            problems.append("coupling: must be finite")
    elif isinstance(potential, GeneralLinePotential):
        if not (math.isfinite(potential.a) and math.isfinite(potential.b)):
            problems.append("a, b: must be finite")
        elif potential.a == 0.0 and potential.b == 0.0:
            problems.append("a, b: line coefficients must not both vanish")
        if not _finite(potential.zeta):
            problems.append("zeta: must be finite")
        if isinstance(potential.profile, GeneralLinePotential):
            problems.append("profile: must be a delta array, Fourier potential or comb")
        else:
            problems.extend("profile." + p for p in _problems(potential.profile))
    else:
        problems.append(f"unsupported descriptor type {type(potential).__name__}")
    return problems


def validate(potential: Descriptor) -> Descriptor:
    """Return ``potential`` unchanged, or raise :class:`InvalidPotential` listing every violation."""
    problems = _problems(potential)
    if problems:
        raise InvalidPotential(problems, kind=type(potential).__name__)
    return potential


def comb_to_fourier(comb: PeriodicComb, truncation: int) -> FourierLinePotential:
    """Truncated Fourier form of the comb: ``z/a`` on every harmonic ``|n| <= truncation``."""
    validate(comb)
    if truncation < 0:
        raise ValueError(f"truncation must be non-negative, got {truncation}")
    alpha = comb.base_frequency
    z = comb.coupling / comb.spacing
    return FourierLinePotential(
        harmonics={n: z for n in range(-truncation, truncation + 1)},
        frequencies=tuple(n * alpha for n in range(1, truncation + 1)),
    )


def required_truncation(potential: Union[PeriodicComb, FourierLinePotential], wave: IncidentWave) -> int:
    """Smallest harmonic cut-off ``N`` with ``k < alpha (N + 1) / 2``.

    Harmonics beyond ``N`` shift the transverse momentum out of the propagating
    band ``[-k, k]`` and cannot enter the scattering amplitude.
    """
    if isinstance(potential, PeriodicComb):
        validate(potential)
        alpha = potential.base_frequency
    else:
        from .fourier import commensurate_base

        if potential.order == 0:
            return 0
        alpha, _ = commensurate_base(potential)
    return int(math.floor(2 * wave.k / alpha))


# -- JSON documents -------------------------------------------------------


def complex_from_json(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidPotential(f"complex scalars are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    raise InvalidPotential(f"cannot read a complex scalar from {value!r}")


def complex_to_json(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def potential_from_dict(doc: Mapping) -> Descriptor:
    """Build and validate a descriptor from its JSON document."""
    try:
        kind = doc["kind"]
        if kind == "delta_array":
            potential = DeltaLineArray(
                couplings=[complex_from_json(z) for z in doc["couplings"]],
                positions=[float(a) for a in doc["positions"]],
            )
        elif kind == "fourier":
            potential = FourierLinePotential(
                harmonics={int(n): complex_from_json(z) for n, z in doc["harmonics"].items()},
                frequencies=[float(a) for a in doc.get("frequencies", [])],
            )
        elif kind == "comb":
            potential = PeriodicComb(complex_from_json(doc["coupling"]), float(doc["spacing"]))
        elif kind == "general":
            potential = GeneralLinePotential(
                zeta=complex_from_json(doc.get("zeta", 1.0)),
                a=float(doc["a"]),
                b=float(doc["b"]),
                profile=potential_from_dict(doc["profile"]),
            )
        else:
            raise InvalidPotential(f"kind: unknown potential kind {kind!r}")
    except KeyError as exc:
        raise InvalidPotential(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidPotential):
            raise
        raise InvalidPotential(f"malformed potential document: {exc}") from None
    return validate(potential)


def potential_to_dict(potential: Descriptor) -> dict:
    if isinstance(potential, DeltaLineArray):
        return {
            "kind": "delta_array",
            "couplings": [complex_to_json(z) for z in potential.couplings],
            "positions": list(potential.positions),
        }
    if isinstance(potential, FourierLinePotential):
        return {
            "kind": "fourier",
            "harmonics": {str(n): complex_to_json(z) for n, z in potential.harmonics.items()},
            "frequencies": list(potential.frequencies),
        }
    if isinstance(potential, PeriodicComb):
        return {"kind": "comb", "coupling": complex_to_json(potential.coupling), "spacing": potential.spacing}
    if isinstance(potential, GeneralLinePotential):
        return {
            "kind": "general",
            "zeta": complex_to_json(potential.zeta),
            "a": potential.a,
            "b": potential.b,
            "profile": potential_to_dict(potential.profile),
        }
    raise TypeError(f"not a potential descriptor: {potential!r}")


def wave_from_dict(doc: Mapping) -> IncidentWave:
    """Wave documents give the angle in degrees (``theta0_deg``)."""
    try:
        return IncidentWave.from_degrees(float(doc["k"]), float(doc.get("theta0_deg", 0.0)))
    except KeyError as exc:
        raise InvalidWave(f"missing field {exc.args[0]!r}") from None


def wave_to_dict(wave: IncidentWave) -> dict:
    return {"k": wave.k, "theta0_deg": math.degrees(wave.theta0)}
