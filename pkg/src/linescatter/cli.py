"""``line-scatter`` command-line front end.

Usage::

    line-scatter <task> --config run.json [--out result.csv] [--format csv|json]

Tasks: amplitude, beams, scan-k, scan-theta0, singularities, verify, equivalence.
Angles in config and output files are degrees. Numbers are written with 17
significant digits so repeated runs are byte-identical. Errors exit non-zero
after writing one JSON object ``{error_kind, message, parameters}`` to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Optional

import numpy as np

from . import foldy, fourier, oracle
from .errors import ScatteringError, SingularMatrix, SpectralSingularity
from .geometry import reduce
from .numerics import solve_dense
from .potentials import (
    DeltaLineArray,
    FourierLinePotential,
    GeneralLinePotential,
    IncidentWave,
    PeriodicComb,
    comb_to_fourier,
    complex_to_json,
    potential_from_dict,
    potential_to_dict,
    required_truncation,
    wave_from_dict,
)

TASKS = ("amplitude", "beams", "scan-k", "scan-theta0", "singularities", "verify", "equivalence")
BEAM_PREFACTOR = -1j / math.sqrt(2 * math.pi)


class ConfigError(ScatteringError):
    pass


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _jsonable(value):
    if isinstance(value, complex):
        return complex_to_json(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def potential_hash(potential) -> str:
    text = json.dumps(potential_to_dict(potential), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def grid(spec, name: str) -> np.ndarray:
    try:
        start, stop, count = float(spec["start"]), float(spec["stop"]), int(spec["count"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError(f"scan range {name!r} needs start, stop and count") from None
    if count < 1:
        raise ConfigError(f"scan range {name!r} needs a positive count", count=count)
    return np.linspace(start, stop, count)


# -- canonical form ------------------------------------------------------------


def canonicalize(potential, wave: IncidentWave):
    """Reduce general line potentials; returns (canonical potential, wave, frame angle)."""
    if isinstance(potential, GeneralLinePotential):
        reduction = reduce(potential, wave)
        return reduction.potential, reduction.wave, reduction.frame_angle
    return potential, wave, 0.0


def _fourier_at(potential, wave: IncidentWave, truncation: Optional[int]) -> FourierLinePotential:
    if isinstance(potential, PeriodicComb):
        n = required_truncation(potential, wave) if truncation is None else max(truncation, required_truncation(potential, wave))
        return comb_to_fourier(potential, n)
    return potential


def determinant_at(potential, truncation: Optional[int], k: float, theta0: float):
    """Scaled determinant of the canonical solver matrix, or ``None`` at a grazing channel."""
    wave = IncidentWave(k, theta0)
    canonical, wave, _ = canonicalize(potential, wave)
    if isinstance(canonical, DeltaLineArray):
        return foldy.matrix_determinant(canonical, wave.k)
    try:
        return fourier.mode_determinant(_fourier_at(canonical, wave, truncation), wave)
    except ScatteringError as exc:
        if exc.kind == "GrazingMode":
            return None
        raise


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
    return [fn(item) for item in items]


# -- tasks -----------------------------------------------------------------------


class Result:
    def __init__(self, columns, rows, metadata, extra=None):
        self.columns = columns
        self.rows = rows
        self.metadata = metadata
        self.extra = extra or {}


def _base_metadata(cfg, potential, wave: Optional[IncidentWave]):
    meta = {"task": cfg["task"], "potential_hash": potential_hash(potential)}
    if wave is not None:
        meta["k"] = wave.k
        meta["theta0_deg"] = math.degrees(wave.theta0)
    return meta


def task_amplitude(cfg, potential, wave, options):
    canonical, cwave, frame = canonicalize(potential, wave)
    if not isinstance(canonical, DeltaLineArray):
        raise ConfigError("amplitude needs a delta array; use beams for Fourier potentials and combs")
    amp = foldy.solve_amplitude(canonical, cwave)
    n = int(options.get("theta_samples", 360))
    if n < 1:
        raise ConfigError("theta_samples must be positive", theta_samples=n)
    theta_deg = -90.0 + 360.0 * np.arange(n) / n
    values = amp(np.radians(theta_deg))
    rows = [(t, f.real, f.imag, abs(f) ** 2) for t, f in zip(theta_deg, values)]
    meta = _base_metadata(cfg, potential, wave)
    meta["frame_angle_deg"] = math.degrees(frame)
    return Result(("theta_deg", "re_f", "im_f", "abs_f_sq"), rows, meta)


def _beam_rows(amp: fourier.DiscreteAmplitude):
    rows = []
    for shift, theta, y in amp.directions():
        value = BEAM_PREFACTOR * y
        rows.append((shift, math.degrees(theta), value.real, value.imag, abs(value) ** 2))
    return rows


def _beams(potential, wave, options):
    canonical, cwave, frame = canonicalize(potential, wave)
    if isinstance(canonical, DeltaLineArray):
        raise ConfigError("beams needs a Fourier potential or a comb; use amplitude for delta arrays")
    return fourier.beams_for(canonical, cwave, options.get("truncation")), frame


def task_beams(cfg, potential, wave, options):
    amp, frame = _beams(potential, wave, options)
    meta = _base_metadata(cfg, potential, wave)
    meta["frame_angle_deg"] = math.degrees(frame)
    meta["note"] = "re_y/im_y include the prefactor -i/sqrt(2 pi)"
    return Result(("shift", "theta_deg", "re_y", "im_y", "abs_y_sq"), _beam_rows(amp), meta)


def _scan(cfg, potential, options, axis: str):
    scan = cfg.get("scan") or {}
    threshold = float(options.get("threshold", 1e-8))
    workers = int(options.get("workers", 1))
    truncation = options.get("truncation")
    if axis == "k":
        wave = wave_from_dict(cfg["wave"]) if "wave" in cfg else None
        theta0 = wave.theta0 if wave else 0.0
        xs = grid(scan.get("k"), "k")
        points = [(float(k), theta0) for k in xs]
    else:
        wave = wave_from_dict(cfg["wave"])
        xs = grid(scan.get("theta0_deg"), "theta0_deg")
        points = [(wave.k, math.radians(t)) for t in xs]
    if np.any(np.diff(xs) <= 0):
        raise ConfigError(f"scan over {axis} must be strictly increasing")
    dets = _map(partial(_det_point, potential, truncation), points, workers)
    result = foldy.scan_result(xs, tuple(dets), threshold)
    rows = []
    for x, d in zip(xs, dets):
        if d is None:
            rows.append((x, math.nan, math.nan, math.nan))
        else:
            v = d.value
            rows.append((x, abs(d), v.real, v.imag))
    candidates = [
        {axis if axis == "k" else "theta0_deg": c.k, "abs_det": c.abs_det, "grid_index": c.grid_index}
        for c in result.candidates
    ]
    return xs, rows, candidates, wave


def _det_point(potential, truncation, point):
    k, theta0 = point
    return determinant_at(potential, truncation, k, theta0)


def task_scan(cfg, potential, wave, options, axis: str):
    _, rows, candidates, wave = _scan(cfg, potential, options, axis)
    meta = _base_metadata(cfg, potential, wave)
    first = "k" if axis == "k" else "theta0_deg"
    return Result((first, "abs_det", "re_det", "im_det"), rows, meta, {"candidates": candidates})


def task_singularities(cfg, potential, wave, options):
    _, _, candidates, wave = _scan(cfg, potential, options, "k")
    closed = {}
    if isinstance(potential, GeneralLinePotential):
        if wave is None:
            raise ConfigError("singularities for a general line potential need a 'wave'")
        canonical, wave, _ = canonicalize(potential, wave)
    else:
        canonical = potential
    if isinstance(canonical, DeltaLineArray) and len(canonical) == 2 and wave is not None:
        a = abs(canonical.positions[0] - canonical.positions[1])
        if a * wave.k > 1e-12:
            closed["pair_singular_couplings"] = list(foldy.double_delta_singular_couplings(a, wave.k))
    if isinstance(canonical, PeriodicComb):
        laser = fourier.directional_laser_condition(canonical.coupling / canonical.spacing, canonical.base_frequency)
        closed["directional_laser"] = None if laser is None else {"k": laser[0], "theta0_deg": math.degrees(laser[1])}
    elif isinstance(canonical, FourierLinePotential) and canonical.order >= 1:
        alpha, _ = fourier.commensurate_base(canonical)
        laser = fourier.directional_laser_condition(canonical.coupling(0), alpha)
        closed["directional_laser"] = None if laser is None else {"k": laser[0], "theta0_deg": math.degrees(laser[1])}
    rows = [(c["k"], c["abs_det"], c["grid_index"]) for c in candidates]
    meta = _base_metadata(cfg, potential, wave)
    return Result(("k", "abs_det", "grid_index"), rows, meta, {"closed_form": closed})


def task_verify(cfg, potential, wave, options):
    canonical, cwave, _ = canonicalize(potential, wave)
    tol = float(options.get("tolerance", 1e-12))
    max_terms = int(options.get("max_terms", 500))
    if isinstance(canonical, DeltaLineArray):
        system = foldy.build_system(canonical, cwave)
        label = "foldy"
    else:
        system = fourier.mode_system(_fourier_at(canonical, cwave, options.get("truncation")), cwave)
        label = "modes"
    try:
        direct = solve_dense(system.matrix, system.rhs).solution
    except SingularMatrix as exc:
        raise SpectralSingularity(f"{label} matrix is singular", k=cwave.k, theta0=cwave.theta0) from exc
    series = oracle.neumann_iterate(system.matrix, system.rhs, max_terms, tol)
    diff = float(np.max(np.abs(series.solution - direct)))
    rows = [
        ("system", label),
        ("size", len(direct)),
        ("contraction_estimate", series.estimated_ratio),
        ("converged", series.converged),
        ("terms_used", series.terms_used),
        ("max_abs_diff", diff),
        ("direct_residual", oracle.residual_verify(system, direct)),
        ("series_residual", oracle.residual_verify(system, series.solution)),
    ]
    meta = _base_metadata(cfg, potential, wave)
    return Result(("quantity", "value"), rows, meta)


def task_equivalence(cfg, potential, wave, options):
    if "reference" not in cfg:
        raise ConfigError("equivalence needs a 'reference' potential")
    reference = potential_from_dict(cfg["reference"])
    amp, _ = _beams(potential, wave, options)
    ref, _ = _beams(reference, wave, options)
    shifts = sorted(set(amp.shifts) | set(ref.shifts))
    rows = []
    worst = 0.0
    for s in shifts:
        y1, y2 = amp.coefficient(s), ref.coefficient(s)
        diff = abs(y1 - y2)
        worst = max(worst, diff)
        rows.append((s, y1.real, y1.imag, y2.real, y2.imag, diff))
    meta = _base_metadata(cfg, potential, wave)
    meta["reference_hash"] = potential_hash(reference)
    meta["max_discrepancy"] = worst
    return Result(("shift", "re_y", "im_y", "re_y_reference", "im_y_reference", "abs_diff"), rows, meta, {"max_discrepancy": worst})


# -- output --------------------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    return fmt(value)


def render_csv(result: Result) -> str:
    lines = [",".join(result.columns)]
    for key, value in result.metadata.items():
        lines.append(f"# {key}={_cell(value)}")
    for key, value in result.extra.items():
        lines.append(f"# {key}={json.dumps(_jsonable(value), sort_keys=True)}")
    for row in result.rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_number(value):
    if isinstance(value, bool) or isinstance(value, str) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(value)
    return v if math.isfinite(v) else None


def render_json(result: Result) -> str:
    doc = {
        "metadata": _jsonable(result.metadata),
        "columns": list(result.columns),
        "rows": [[_json_number(v) for v in row] for row in result.rows],
    }
    doc.update(_jsonable(result.extra))
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(cfg: dict, out: Optional[str] = None, fmt_name: str = "csv") -> int:
    task = cfg.get("task")
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}; expected one of {', '.join(TASKS)}", task=task)
    if "potential" not in cfg:
        raise ConfigError("config needs a 'potential' document")
    potential = potential_from_dict(cfg["potential"])
    options = cfg.get("options") or {}
    wave = wave_from_dict(cfg["wave"]) if "wave" in cfg else None
    if wave is None and task not in ("scan-k", "singularities"):
        raise ConfigError(f"task {task!r} needs a 'wave' with k and theta0_deg")
    if task == "amplitude":
        result = task_amplitude(cfg, potential, wave, options)
    elif task == "beams":
        result = task_beams(cfg, potential, wave, options)
    elif task == "scan-k":
        result = task_scan(cfg, potential, wave, options, "k")
    elif task == "scan-theta0":
        result = task_scan(cfg, potential, wave, options, "theta0")
    elif task == "singularities":
        result = task_singularities(cfg, potential, wave, options)
    elif task == "verify":
        result = task_verify(cfg, potential, wave, options)
    else:
        result = task_equivalence(cfg, potential, wave, options)

    if fmt_name == "json":
        _write(out, render_json(result))
    else:
        _write(out, render_csv(result))
        if result.extra and out is not None and task.startswith("scan"):
            _write(out + ".candidates.json", json.dumps(_jsonable(result.extra), sort_keys=True, indent=2) + "\n")
    return 0


def error_document(exc: ScatteringError) -> str:
    return json.dumps(
        {"error_kind": exc.kind, "message": exc.message, "parameters": _jsonable(exc.parameters)},
        sort_keys=True,
        default=repr,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="line-scatter", description=__doc__.splitlines()[0])
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (default: config or csv)")
    parser.add_argument("--workers", type=int, help="processes for scan tasks")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}", path=args.config) from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        cfg = dict(cfg, task=args.task)
        output = cfg.get("output") or {}
        if args.workers is not None:
            cfg["options"] = dict(cfg.get("options") or {}, workers=args.workers)
        return run(cfg, args.out or output.get("path"), args.format or output.get("format", "csv"))
    except ScatteringError as exc:
        sys.stderr.write(error_document(exc) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
