import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosine_solid_angle import analytic as A
from cosine_solid_angle import sweep as S
from cosine_solid_angle.errors import InvalidSweep
from cosine_solid_angle.geom import DiscGeometry
from cosine_solid_angle.oracle import McConfig

PLATEAU_1_5 = math.asin(1 / 1.5) / math.pi


def l1_sweep(d, length=5.0, start=-2.0, stop=20.0, steps=221, **kw):
    return S.run_sweep(S.SweepSpec("l1", start, stop, steps, {"r": 1.0, "d": d, "length": length}, **kw))


def by_l1(records):
    return {round(rec.varying, 9): rec for rec in records}


# -- running ----------------------------------------------------------------


def test_skew_sweep_plateau():
    recs = l1_sweep(1.5)
    assert len(recs) == 221
    assert recs[0].varying == -2.0 and recs[-1].varying == 20.0
    mid = [rec.omega for rec in recs if 3 <= rec.varying <= 5]
    assert all(v < PLATEAU_1_5 for v in mid)
    assert max(mid) == pytest.approx(0.2322, abs=1e-2)
    tail = [rec.omega for rec in recs if rec.varying > 6]
    assert all(a > b for a, b in zip(tail, tail[1:]))


def test_inside_sweep_is_one_then_disc():
    recs = l1_sweep(0.5)
    for rec in recs:
        l2 = rec.varying - 5
        if rec.varying > 0 and l2 < 0:
            assert rec.omega == 1.0 and rec.regime == "enclosing"
        elif l2 > 0:
            assert rec.omega == pytest.approx(A.omega_circ(DiscGeometry(1, 0.5, l2)).value, abs=1e-15)
            assert rec.regime == "disc-only"


def test_inside_curves_coincide_after_shift():
    a = by_l1(l1_sweep(0.5, 5.0, -2, 30, 321))
    b = by_l1(l1_sweep(0.5, 10.0, -2, 30, 321))
    shared = [k for k in a if round(k + 5, 9) in b and k > 0]
    assert len(shared) > 200
    assert max(abs(a[k].omega - b[round(k + 5, 9)].omega) for k in shared) <= 1e-12


def test_skew_curves_coincide_while_both_straddle():
    a = by_l1(l1_sweep(2.0, 5.0))
    b = by_l1(l1_sweep(2.0, 10.0))
    for k, rec in a.items():
        if k <= 5:
            assert rec.omega == b[k].omega


@pytest.mark.parametrize("d", [0.5, 1.5])
def test_regime_transitions(d):
    recs = l1_sweep(d, 5.0, -2, 12, 141)
    tags = [rec.regime for rec in recs]
    changes = [recs[i].varying for i in range(1, len(recs)) if tags[i] != tags[i - 1]]
    # the transition lands on the first step past each boundary
    assert changes == pytest.approx([0.1, 5.1], abs=1e-9)
    assert [rec.regime for rec in recs if rec.varying == pytest.approx(0)] == ["below-plane"]


@pytest.mark.parametrize("d", [0.25, 0.75, 1.5, 3.0])
def test_continuous_across_l2_zero(d):
    recs = l1_sweep(d, 5.0, 4.0, 6.0, 201)
    omega = np.array([rec.omega for rec in recs])
    jumps = np.abs(np.diff(omega))
    # no isolated step: the largest jump is comparable to its neighbours
    i = int(np.argmax(jumps))
    neighbours = np.concatenate([jumps[max(i - 3, 0):i], jumps[i + 1:i + 4]])
    assert jumps[i] <= 3 * neighbours.max() + 1e-12


def test_error_records_do_not_abort():
    spec = S.SweepSpec("d", 0.5, 1.5, 3, {"r": 1.0, "l": 2.0}, quantity="cyl0")
    recs = S.run_sweep(spec)
    assert [rec.regime for rec in recs] == ["error", "error", "skew-half"]
    assert recs[0].omega is None and recs[2].omega == pytest.approx(A.omega_cyl0(2, 1, 1.5).value)


def test_invalid_geometry_step_is_error_record():
    spec = S.SweepSpec("r", -1.0, 1.0, 3, {"d": 0.0, "l": 1.0}, quantity="circ")
    recs = S.run_sweep(spec)
    assert [rec.regime for rec in recs] == ["error", "error", "disc-only"]


def test_log_spacing():
    spec = S.SweepSpec("l", 0.01, 100.0, 5, {"r": 1.0, "d": 2.0}, quantity="cyl0", spacing="log")
    assert [rec.varying for rec in S.run_sweep(spec)] == pytest.approx([0.01, 0.1, 1, 10, 100])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(varying="l1", fixed={"r": 1, "d": 2}),
        dict(varying="l1", fixed={"r": 1, "d": 2, "l2": 0, "length": 3}),
        dict(varying="l1", fixed={"r": 1, "l1": 2, "length": 3}),
        dict(varying="r_s", fixed={"r": 1, "d": 2, "length": 3}),
        dict(varying="l", fixed={"r": 1, "d": 2, "r_s": 1}, quantity="circ"),
        dict(varying="l", fixed={"r": 1}, quantity="circ"),
        dict(varying="l", fixed={"r": 1, "d": 2}, quantity="mass"),
        dict(varying="l", fixed={"r": 1, "d": 2}, quantity="cyl0", oracle="mc"),
        dict(varying="l", fixed={"r": 1, "d": 2}, quantity="circ", start=2.0, stop=1.0),
        dict(varying="l", fixed={"r": 1, "d": 2}, quantity="circ", steps=1),
        dict(varying="l", fixed={"r": 1, "d": 2}, quantity="circ", spacing="log", start=0.0),
        dict(varying="l", fixed={"r": 1, "d": math.nan}, quantity="circ"),
    ],
)
def test_invalid_specs(kwargs):
    base = dict(start=0.0, stop=1.0, steps=3)
    base.update(kwargs)
    with pytest.raises(InvalidSweep):
        S.run_sweep(S.SweepSpec(**base))


def test_sweep_with_oracle():
    spec = S.SweepSpec("l", 0.5, 2.0, 4, {"r": 1.0, "d": 2.0}, quantity="circ", oracle="quadrature")
    for rec in S.run_sweep(spec):
        assert abs(rec.oracle - rec.omega) <= 1e-9 and rec.oracle_stderr is None


def test_sweep_with_mc_oracle():
    spec = S.SweepSpec(
        "l", 0.5, 2.0, 3, {"r_s": 1.0, "r_d": 2.0}, quantity="spread", oracle="mc", mc=McConfig(100_000, 1)
    )
    for rec in S.run_sweep(spec):
        assert abs(rec.oracle - rec.omega) <= 4 * rec.oracle_stderr


# -- emission ---------------------------------------------------------------


RECS = [
    S.SweepRecord(1.0, 0.0527864045, None, None, "disc-only"),
    S.SweepRecord(2.0, 0.5, 0.4999, 0.0005, "skew-half"),
    S.SweepRecord(3.0, None, regime="error"),
]


def test_csv_shape():
    out = S.emit(RECS, "csv")
    text = out.decode("utf-8")
    assert b"\r" not in out
    lines = text.splitlines()
    assert len(lines) == 4
    assert lines[0] == "varying,omega,oracle,oracle_stderr,regime"
    assert lines[1] == "1,0.0527864045,,,disc-only"
    assert lines[3] == "3,,,,error"


def test_json_nulls():
    rows = json.loads(S.emit(RECS, "json"))
    assert rows[0]["oracle"] is None and rows[0]["oracle_stderr"] is None
    assert set(rows[0]) == set(S.FIELDS)
    assert rows[1]["oracle"] == 0.4999


def test_precision_rounding():
    text = S.emit([S.SweepRecord(1.0, 0.0527864, regime="disc-only")], "csv", precision=3).decode()
    assert text.splitlines()[1].split(",")[1] == "0.0528"


def test_emit_rejects():
    with pytest.raises(ValueError):
        S.emit([], "csv")
    with pytest.raises(ValueError):
        S.emit(RECS, "xml")


@settings(max_examples=100)
@given(
    st.lists(
        st.tuples(
            st.floats(-1e6, 1e6),
            st.one_of(st.none(), st.floats(0, 1)),
            st.one_of(st.none(), st.floats(0, 1)),
            st.sampled_from(A.REGIMES + ("error",)),
        ),
        min_size=1,
        max_size=20,
    ),
    st.integers(3, 17),
)
def test_csv_round_trip(rows, precision):
    recs = [S.SweepRecord(v, o, q, None, g) for v, o, q, g in rows]
    back = S.parse_csv(S.emit(recs, "csv", precision))
    assert len(back) == len(recs)
    for a, b in zip(recs, back):
        assert a.regime == b.regime
        for x, y in ((a.varying, b.varying), (a.omega, b.omega), (a.oracle, b.oracle)):
            if x is None:
                assert y is None
            else:
                assert y == float(f"{x:.{precision}g}")


def test_atomic_write(tmp_path):
    path = tmp_path / "out.csv"
    path.write_bytes(b"old")
    S.write_records(path, RECS)
    assert path.read_bytes() == S.emit(RECS)
    assert os.listdir(tmp_path) == ["out.csv"]


def test_failed_write_leaves_target(tmp_path):
    path = tmp_path / "out.csv"
    path.write_bytes(b"old")
    with pytest.raises(ValueError):
        S.write_records(path, RECS, "xml")
    assert path.read_bytes() == b"old"
    assert os.listdir(tmp_path) == ["out.csv"]


def test_canonical_set():
    sweeps = S.canonical_sweeps(steps=28)
    assert set(sweeps) == {(L, d) for L in (5.0, 10.0) for d in (0.25, 0.5, 0.75, 1.5, 2.0, 3.0)}
    assert all(len(v) == 28 for v in sweeps.values())
