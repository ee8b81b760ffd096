"""Parameter sweeps and their CSV / JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analytic, oracle
from .errors import DomainError, InvalidGeometry, InvalidSweep
from .geom import CylinderGeometry, DiscGeometry, SpreadGeometry, validate
from .oracle import McConfig, QuadConfig

__all__ = [
    "SweepSpec",
    "SweepRecord",
    "run_sweep",
    "emit",
    "parse_csv",
    "write_records",
    "canonical_sweeps",
    "CANONICAL_DISTANCES",
    "CANONICAL_LENGTHS",
]

FIELDS = ("varying", "omega", "oracle", "oracle_stderr", "regime")

_PARAMS = {
    "total": {"r", "d", "l1", "l2", "length"},
    "circ": {"r", "d", "l"},
    "cyl0": {"r", "d", "l"},
    "spread": {"r_s", "r_d", "l"},
}
_VARYING = {"l1", "l2", "d", "r", "l", "r_s", "r_d"}
_ORACLES = {
    "total": {"mc", "quadrature", "direct2d"},
    "circ": {"mc", "quadrature", "direct2d"},
    "cyl0": {"quadrature"},
    "spread": {"mc", "quadrature"},
}
# regime tag for the single-formula quantities
_FIXED_REGIME = {"circ": "disc-only", "cyl0": "skew-half", "spread": "disc-only"}

CANONICAL_DISTANCES = (0.25, 0.5, 0.75, 1.5, 2.0, 3.0)
CANONICAL_LENGTHS = (5.0, 10.0)


@dataclass(frozen=True)
class SweepSpec:
    """One parameter varied over [start, stop] with the rest held in ``fixed``.

    For ``quantity="total"`` the detector position is given by any two of
    l1, l2 and length (e.g. fixed ``length`` while ``l1`` varies).
    """

    varying: str
    start: float
    stop: float
    steps: int
    fixed: dict = field(default_factory=dict)
    quantity: str = "total"
    oracle: Optional[str] = None
    spacing: str = "linear"
    mc: McConfig = McConfig()
    quad: QuadConfig = QuadConfig()

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepRecord:
    varying: float
    omega: Optional[float]
    oracle: Optional[float] = None
    oracle_stderr: Optional[float] = None
    regime: str = ""


def check_spec(spec: SweepSpec) -> SweepSpec:
    if spec.quantity not in _PARAMS:
        raise InvalidSweep(f"unknown quantity {spec.quantity!r}")
    allowed = _PARAMS[spec.quantity]
    if spec.varying not in _VARYING or spec.varying not in allowed:
        raise InvalidSweep(f"cannot vary {spec.varying!r} for quantity {spec.quantity!r}")
    if spec.varying in spec.fixed:
        raise InvalidSweep(f"{spec.varying!r} is both varying and fixed")
    unknown = set(spec.fixed) - allowed
    if unknown:
        raise InvalidSweep(f"unknown fixed parameters for {spec.quantity!r}: {sorted(unknown)}")
    given = set(spec.fixed) | {spec.varying}
    if spec.quantity == "total":
        missing = {"r", "d"} - given
        placement = given & {"l1", "l2", "length"}
        if missing or len(placement) != 2:
            raise InvalidSweep("total needs r, d and exactly two of l1, l2, length")
    elif given != allowed:
        raise InvalidSweep(f"{spec.quantity!r} needs exactly {sorted(allowed)}")
    for k, v in spec.fixed.items():
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise InvalidSweep(f"fixed parameter {k!r} must be a finite number")
    if not spec.start < spec.stop:
        raise InvalidSweep("start must be < stop")
    if spec.steps < 2:
        raise InvalidSweep("steps must be >= 2")
    if spec.spacing not in ("linear", "log"):
        raise InvalidSweep(f"unknown spacing {spec.spacing!r}")
    if spec.spacing == "log" and spec.start <= 0:
        raise InvalidSweep("log spacing needs start > 0")
    if spec.oracle is not None and spec.oracle not in _ORACLES[spec.quantity]:
        raise InvalidSweep(f"oracle {spec.oracle!r} is not available for {spec.quantity!r}")
    return spec


def geometry_at(spec: SweepSpec, value: float):
    """The geometry (or (l, r, d) triple for cyl0) with the varying parameter set to ``value``."""
    p = dict(spec.fixed)
    p[spec.varying] = float(value)
    if spec.quantity == "total":
        if "l1" not in p:
            p["l1"] = p["l2"] + p["length"]
        elif "l2" not in p:
            p["l2"] = p["l1"] - p["length"]
        return CylinderGeometry(p["r"], p["d"], p["l1"], p["l2"])
    if spec.quantity == "circ":
        return DiscGeometry(p["r"], p["d"], p["l"])
    if spec.quantity == "spread":
        return SpreadGeometry(p["r_s"], p["r_d"], p["l"])
    return (p["l"], p["r"], p["d"])


def _evaluate(spec, geom):
    q = spec.quantity
    if q == "total":
        return analytic.omega_total(geom).value, analytic.classify(geom)
    if q == "circ":
        return analytic.omega_circ(geom).value, _FIXED_REGIME[q]
    if q == "spread":
        return analytic.omega_spread(geom).value, _FIXED_REGIME[q]
    return analytic.omega_cyl0(*geom).value, _FIXED_REGIME[q]


def _oracle(spec, geom):
    kind, q = spec.oracle, spec.quantity
    if kind == "mc":
        res = oracle.mc_omega_spread(geom, spec.mc) if q == "spread" else oracle.mc_omega(geom, spec.mc)
    elif kind == "direct2d":
        res = oracle.direct_2d_omega(geom, spec.quad)
    elif q == "total":
        res = oracle.quad_total(geom, spec.quad)
    elif q == "spread":
        res = oracle.quad_spread(geom, spec.quad)
    elif q == "cyl0":
        res = oracle.quad_azimuthal("cyl0", *geom, spec.quad)
    else:
        target = "circ_dgr" if geom.d > geom.r else "circ_rgd"
        res = oracle.quad_azimuthal(target, geom.l, geom.r, geom.d, spec.quad)
    return res.value, res.stderr


def run_sweep(spec: SweepSpec) -> list[SweepRecord]:
    """Evaluate the sweep; invalid steps become ``regime="error"`` records."""
    check_spec(spec)
    records = []
    for v in spec.values():
        geom = geometry_at(spec, v)
        try:
            if not isinstance(geom, tuple):
                validate(geom)
            omega, regime = _evaluate(spec, geom)
        except (InvalidGeometry, DomainError):
            records.append(SweepRecord(float(v), None, regime="error"))
            continue
        ora = err = None
        if spec.oracle is not None:
            try:
                ora, err = _oracle(spec, geom)
            except DomainError:
                pass
        records.append(SweepRecord(float(v), omega, ora, err, regime))
    return records


def _fmt(x, precision):
    return "" if x is None else f"{x:.{precision}g}"


def _round(x, precision):
    return None if x is None else float(f"{x:.{precision}g}")


def emit(records, format: str = "csv", precision: int = 9) -> bytes:
    """Serialise records as UTF-8 CSV (LF line endings) or a JSON array."""
    records = list(records)
    if not records:
        raise ValueError("no records to emit")
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for rec in records:
            w.writerow([
                _fmt(rec.varying, precision),
                _fmt(rec.omega, precision),
                _fmt(rec.oracle, precision),
                _fmt(rec.oracle_stderr, precision),
                rec.regime,
            ])
        return buf.getvalue().encode("utf-8")
    if format == "json":
        rows = [
            {
                "varying": _round(rec.varying, precision),
                "omega": _round(rec.omega, precision),
                "oracle": _round(rec.oracle, precision),
                "oracle_stderr": _round(rec.oracle_stderr, precision),
                "regime": rec.regime,
            }
            for rec in records
        ]
        return (json.dumps(rows, indent=1) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {format!r}")


def parse_csv(data: bytes) -> list[SweepRecord]:
    """Inverse of :func:`emit` for CSV output."""
    rows = csv.DictReader(io.StringIO(data.decode("utf-8")))

    def num(s):
        return float(s) if s != "" else None

    return [
        SweepRecord(float(r["varying"]), num(r["omega"]), num(r["oracle"]), num(r["oracle_stderr"]), r["regime"])
        for r in rows
    ]


def write_records(path, records, format: str = "csv", precision: int = 9) -> None:
    """Write atomically: the data goes to a temporary file that is then renamed over ``path``."""
    payload = emit(records, format, precision)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sweep-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def canonical_sweeps(start=-2.0, stop=25.0, steps=271, distances=CANONICAL_DISTANCES, lengths=CANONICAL_LENGTHS):
    """l1 sweeps for unit-radius detectors of each length and source distance.

    Returns ``{(length, d): [SweepRecord, ...]}``; the grid step is 0.1 by default.
    """
    out = {}
    for length in lengths:
        for d in distances:
            spec = SweepSpec("l1", start, stop, steps, {"r": 1.0, "d": d, "length": length})
            out[(length, d)] = run_sweep(spec)
    return out
