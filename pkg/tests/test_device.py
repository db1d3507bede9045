import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demon_engine import device as dv
from demon_engine.engine import CycleConfig, run_cycle, work_closed_form
from demon_engine.states import QubitParams

n_g = st.floats(0.0, 1.0).filter(lambda x: abs(x - 0.5) > 1e-6)


def test_gap_examples():
    assert dv.gap_from_gate(dv.ChargeQubitParams(1e-23, 0.5, 1.0)) == 0.0
    assert dv.gap_from_gate(dv.ChargeQubitParams(1e-23, 0.492, 1.0)) == pytest.approx(8e-26, rel=1e-12)


def test_boltzmann_exponent_order_e_minus_one():
    assert 0.1 <= dv.boltzmann_exponent(dv.DeviceParams().s) <= 1.0


def test_coupling_examples():
    assert dv.coupling_from_flux(dv.CouplerParams(5e-26, 0.5)) == 0.0
    assert dv.coupling_from_flux(dv.CouplerParams(5e-26, 0.0)) == 5e-26
    assert dv.coupling_from_flux(dv.CouplerParams(5e-26, 1 / 3)) == pytest.approx(2.5e-26, rel=1e-12)


def test_device_efficiency_examples():
    assert dv.device_efficiency(0.492, 0.498) == pytest.approx(0.75, abs=1e-12)
    assert dv.device_efficiency(0.492, 0.492) == 0.0
    with pytest.warns(UserWarning):
        assert dv.device_efficiency(0.492, 0.5) == 1.0
    with pytest.raises(ValueError):
        dv.device_efficiency(0.5, 0.498)


@settings(max_examples=100, deadline=None)
@given(n_g, n_g)
def test_device_efficiency_is_mirror_symmetric(a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert dv.device_efficiency(a, b) == pytest.approx(dv.device_efficiency(1 - a, 1 - b), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1.0), st.floats(1e-4, 1e-1))
def test_device_efficiency_does_not_depend_on_temperature(ts, td):
    dev = dv.DeviceParams(s=dv.ChargeQubitParams(1e-23, 0.492, ts), d=dv.ChargeQubitParams(1e-23, 0.498, td))
    assert dv.device_report(dev).eta_device == pytest.approx(0.75, abs=1e-12)


def test_native_window_unit_contrivance():
    assert dv.iswap_duration(math.pi * dv.HBAR / 4) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        dv.iswap_duration(0.0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        dv.ChargeQubitParams(1e-23, 1.2, 1e-2)
    with pytest.raises(ValueError):
        dv.ChargeQubitParams(-1.0, 0.4, 1e-2)
    with pytest.raises(ValueError):
        dv.CouplerParams(5e-26, 1.5)


def test_schedule_structure():
    dev = dv.DeviceParams()
    sched = dv.pulse_schedule(dv.to_cycle_config(dev), dev)
    assert 1e-9 <= sched.gate_time <= 1e-7
    assert sched.warnings == ()
    for a, b in zip(sched.entries, sched.entries[1:]):
        assert a.t_end == pytest.approx(b.t_start, rel=1e-15)
        assert a.t_start <= a.t_end
    windows = [e for e in sched.entries if e.channel == "flux" and e.value.startswith("0 (")]
    assert len(windows) == 4
    t0 = dv.iswap_duration(dev.coupler.e_0)
    assert all(w.t_end - w.t_start == pytest.approx(t0) for w in windows)
    assert sched.entries[-1].value.startswith("0.5")
    assert sched.entries[0].t_end == pytest.approx(dev.thermalization_factor * dev.relaxation_time)


def test_schedule_serializations():
    dev = dv.DeviceParams()
    sched = dv.pulse_schedule(dv.to_cycle_config(dev), dev)
    assert json.loads(sched.to_json())["total_time"] == pytest.approx(sched.total_time)
    lines = sched.to_csv().splitlines()
    assert lines[0] == "t_start,t_end,channel,value"
    assert len(lines) == len(sched.entries) + 1


def test_schedule_timing_warning():
    dev = dv.DeviceParams(relaxation_time=1e-8)
    sched = dv.pulse_schedule(dv.to_cycle_config(dev), dev)
    assert any("relaxation" in w for w in sched.warnings)


def test_schedule_notes_general_feedback():
    dev = dv.DeviceParams(theta=1.0)
    sched = dv.pulse_schedule(dv.to_cycle_config(dev), dev)
    assert any("CEV" in w for w in sched.warnings)


def test_otto_limit_claim_warns_when_violated():
    dev = dv.DeviceParams(otto_limit=True)
    with pytest.warns(UserWarning):
        status = dv.otto_limit_status(dev)
    assert not status.holds
    cold = dv.DeviceParams(d=dv.ChargeQubitParams(1e-23, 0.498, 1e-5), otto_limit=True)
    assert dv.otto_limit_status(cold).holds


def test_power_is_work_over_cycle_time():
    cfg = dv.to_cycle_config(dv.DeviceParams())
    w, p = dv.power_estimate(cfg, 1e-5)
    assert p == pytest.approx(w / 1e-5, rel=1e-15)
    with pytest.raises(ValueError):
        dv.power_estimate(cfg, 0.0)


def test_power_vanishes_at_positive_work_boundary():
    # Bisect T_S for W = 0 with the other device parameters fixed.
    base = dv.to_cycle_config(dv.DeviceParams())
    lo, hi = base.d.temperature * base.s.gap / base.d.gap, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if work_closed_form(base.with_(s=QubitParams(base.s.gap, mid))) > 0:
            hi = mid
        else:
            lo = mid
    w, p = dv.power_estimate(base.with_(s=QubitParams(base.s.gap, hi)), 1e-5)
    assert abs(w) < 1e-40 and abs(p) < 1e-35


def test_si_result_matches_natural_units():
    # Same cycle expressed with Delta_S = 1 as the energy unit.
    dev = dv.DeviceParams(d=dv.ChargeQubitParams(1e-23, 0.498, 1e-5))
    gs, gd = dv.gap_from_gate(dev.s), dv.gap_from_gate(dev.d)
    natural = CycleConfig(QubitParams(1.0, dv.K_B * dev.s.temperature / gs),
                          QubitParams(gd / gs, dv.K_B * dev.d.temperature / gs))
    w_si, _ = dv.power_estimate(dv.to_cycle_config(dev), 1e-5)
    assert w_si == pytest.approx(run_cycle(natural).work * gs, rel=1e-10)
    assert math.exp(-gd / (dv.K_B * dev.d.temperature)) < 1e-8
    assert dv.device_report(dev).eta_cycle == pytest.approx(0.75, abs=1e-8)


def test_device_report_fields():
    rep = dv.device_report(dv.DeviceParams())
    d = rep.to_dict()
    assert d["E_L_J"] == 0.0 and d["coupling_on"] is False
    assert d["eta_device"] == pytest.approx(0.75)
    assert d["t0_s"] == pytest.approx(math.pi * dv.HBAR / (4 * 5e-26))
    assert rep.otto_work_estimate > rep.work > 0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_gap_and_coupling_symmetries(n, r):
    q, mirrored = dv.ChargeQubitParams(1e-23, n, 1.0), dv.ChargeQubitParams(1e-23, 1 - n, 1.0)
    assert dv.gap_from_gate(q) == pytest.approx(dv.gap_from_gate(mirrored), rel=1e-9, abs=1e-40)
    assert dv.coupling_from_flux(dv.CouplerParams(5e-26, r)) == pytest.approx(
        -dv.coupling_from_flux(dv.CouplerParams(5e-26, 1 - r)), abs=1e-40)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.3, 0.49), st.floats(0.01, 1.0))
def test_device_efficiency_matches_engine_closed_form(n_s, frac):
    from demon_engine.engine import efficiency_closed_form

    n_d = 0.5 - frac * (0.5 - n_s) * 0.999
    gs = dv.gap_from_gate(dv.ChargeQubitParams(1e-23, n_s, 1.0))
    gd = dv.gap_from_gate(dv.ChargeQubitParams(1e-23, n_d, 1.0))
    cfg = CycleConfig(QubitParams(gs / dv.K_B, 1e3 * gs / dv.K_B), QubitParams(gd / dv.K_B, gd / (20 * dv.K_B)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert dv.device_efficiency(n_s, n_d) == pytest.approx(efficiency_closed_form(cfg)[0], abs=1e-6)


def test_device_efficiency_reads_no_temperature():
    etas = {dv.device_report(dv.DeviceParams(s=dv.ChargeQubitParams(1e-23, 0.492, t))).eta_device
            for t in (1e-3, 1e-2, 0.5)}
    assert len(etas) == 1
