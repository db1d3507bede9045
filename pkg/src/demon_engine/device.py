"""Charge-qubit device layer.

Maps gate charges and coupler flux to the engine's level spacings and coupling,
and builds the control timeline for one cycle. Inputs and outputs are SI. The
engine is fed energies in kelvin (``E / k_B``) so its natural-unit cutoffs stay
meaningful; results are converted back to joules here.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

from . import gates
from .engine import CycleConfig, efficiency_closed_form, work_closed_form
from .states import QubitParams, gibbs_populations

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
OTTO_LIMIT_THRESHOLD = 1e-6
TIMING_FRACTION = 0.1


@dataclass(frozen=True)
class ChargeQubitParams:
    e_c: float
    n_g: float
    temperature: float

    def __post_init__(self):
        if not self.e_c > 0:
            raise ValueError(f"charging energy must be > 0, got {self.e_c}")
        if not 0.0 <= self.n_g <= 1.0:
            raise ValueError(f"reduced gate charge must lie in [0, 1], got {self.n_g}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")


@dataclass(frozen=True)
class CouplerParams:
    e_0: float
    flux_ratio: float = 0.5

    def __post_init__(self):
        if not self.e_0 > 0:
            raise ValueError(f"E_0 must be > 0, got {self.e_0}")
        if not 0.0 <= self.flux_ratio <= 1.0:
            raise ValueError(f"flux ratio must lie in [0, 1], got {self.flux_ratio}")


@dataclass(frozen=True)
class DeviceParams:
    s: ChargeQubitParams = ChargeQubitParams(1e-23, 0.492, 1e-2)
    d: ChargeQubitParams = ChargeQubitParams(1e-23, 0.498, 1e-3)
    coupler: CouplerParams = CouplerParams(5e-26, 0.5)
    theta: float = math.pi / 2
    rotation_time: float = 0.2e-9
    relaxation_time: float = 2e-6
    thermalization_factor: float = 5.0
    cycle_time: float = 1e-5
    otto_limit: bool = False


def gap_from_gate(q: ChargeQubitParams) -> float:
    """Level spacing ``E_c |n_g - 1/2|`` in joules."""
    return q.e_c * abs(q.n_g - 0.5)


def coupling_from_flux(c: CouplerParams) -> float:
    """``E_0 cos(pi Phi_x / Phi_0)``; exactly zero at half a flux quantum."""
    if c.flux_ratio == 0.5:
        return 0.0
    return c.e_0 * math.cos(math.pi * c.flux_ratio)


def device_efficiency(n_g_s: float, n_g_d: float) -> float:
    """Otto-limit efficiency for equal charging energies: ``1 - |2n_gD - 1| / |2n_gS - 1|``."""
    num = abs(2.0 * n_g_d - 1.0)
    den = abs(2.0 * n_g_s - 1.0)
    if den == 0.0:
        raise ValueError("n_g_s = 1/2 gives a zero working-substance gap")
    if num == 0.0:
        warnings.warn("n_g_d = 1/2: demon gap is zero, efficiency limit is unreachable", stacklevel=2)
    return 1.0 - num / den


def otto_efficiency(gap_s: float, gap_d: float) -> float:
    return 1.0 - gap_d / gap_s


def iswap_duration(e_0: float) -> float:
    """Native-window length ``pi hbar / (4 E_0)`` in seconds."""
    if not e_0 > 0:
        raise ValueError(f"E_0 must be > 0, got {e_0}")
    return math.pi * HBAR / (4.0 * e_0)


def qubit_params(q: ChargeQubitParams) -> QubitParams:
    """Engine parameters in kelvin energy units."""
    return QubitParams(gap=gap_from_gate(q) / K_B, temperature=q.temperature)


def to_cycle_config(dev: DeviceParams) -> CycleConfig:
    feedback = "cnot" if dev.theta == math.pi / 2 else "cev"
    return CycleConfig(qubit_params(dev.s), qubit_params(dev.d), theta=dev.theta, feedback=feedback)


def boltzmann_exponent(q: ChargeQubitParams) -> float:
    """``exp(-Delta / (k_B T))``."""
    return math.exp(-gap_from_gate(q) / (K_B * q.temperature))


@dataclass(frozen=True)
class OttoLimitStatus:
    exp_s: float
    exp_d: float
    holds: bool
    claimed: bool

    @property
    def warning(self) -> str | None:
        if self.claimed and not self.holds:
            return (f"Otto-limit mode claimed but exp(-beta_D Delta_D) = {self.exp_d:.3e} "
                    f">= {OTTO_LIMIT_THRESHOLD:g}")
        return None


def otto_limit_status(dev: DeviceParams) -> OttoLimitStatus:
    exp_d = boltzmann_exponent(dev.d)
    status = OttoLimitStatus(boltzmann_exponent(dev.s), exp_d, exp_d < OTTO_LIMIT_THRESHOLD, dev.otto_limit)
    if status.warning:
        warnings.warn(status.warning, stacklevel=2)
    return status


def power_estimate(cfg: CycleConfig, cycle_time: float = 1e-5) -> tuple[float, float]:
    """Work per cycle (J) and mean output power (W) for a config in kelvin energy units."""
    if not cycle_time > 0:
        raise ValueError("cycle time must be > 0")
    w = work_closed_form(cfg) * K_B
    return w, w / cycle_time


def otto_work_estimate(dev: DeviceParams) -> float:
    """Back-of-envelope ``eta_Otto * Delta_S * p_S(1)``, assuming an erased demon."""
    s = qubit_params(dev.s)
    eta = otto_efficiency(gap_from_gate(dev.s), gap_from_gate(dev.d))
    return eta * gap_from_gate(dev.s) * gibbs_populations(s)[1]


# --- control timeline -------------------------------------------------------

@dataclass(frozen=True)
class ScheduleEntry:
    t_start: float
    t_end: float
    channel: str
    value: str


@dataclass(frozen=True)
class Schedule:
    entries: tuple[ScheduleEntry, ...]
    gate_time: float
    thermalization_time: float
    relaxation_time: float
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def total_time(self) -> float:
        return self.entries[-1].t_end if self.entries else 0.0

    def to_dict(self) -> dict:
        return {
            "gate_time": self.gate_time,
            "thermalization_time": self.thermalization_time,
            "relaxation_time": self.relaxation_time,
            "total_time": self.total_time,
            "warnings": list(self.warnings),
            "entries": [
                {"t_start": e.t_start, "t_end": e.t_end, "channel": e.channel, "value": e.value}
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_start", "t_end", "channel", "value"])
        for e in self.entries:
            w.writerow([f"{e.t_start:.12g}", f"{e.t_end:.12g}", e.channel, e.value])
        return buf.getvalue()


def _rotation_label(step: gates.GateStep) -> str:
    axis = "X" if step.kind == "rot_x" else "Z"
    frac = step.angle / math.pi
    return f"{axis}({frac:+g}pi)"


def pulse_schedule(cfg: CycleConfig, dev: DeviceParams) -> Schedule:
    """Square-pulse timeline: thermalization wait, CNOT(S->D), CNOT(D->S), flux off.

    Pulses are laid end to end on a single timeline. The two CNOTs use the
    sequences certified by ``gates.verify_decomposition``.
    """
    e_l = dev.coupler.e_0  # coupling with the SQUID flux set to zero
    t_native = iswap_duration(dev.coupler.e_0)
    wait = dev.thermalization_factor * dev.relaxation_time
    entries = [ScheduleEntry(0.0, wait, "bath",
                             f"thermalize T_S={dev.s.temperature:g}K T_D={dev.d.temperature:g}K; flux=0.5")]
    t = wait
    gate_start = t
    for label, target in (("measure", gates.cnot("S")), ("feedback", gates.cnot("D"))):
        report = gates.verify_decomposition(e_l, target)
        for step in report.sequence.steps:
            if step.kind == "native_evolve":
                entries.append(ScheduleEntry(t, t + t_native, "flux", f"0 ({label}; n_g=1/2)"))
                t += t_native
            elif step.kind in ("rot_x", "rot_z"):
                entries.append(ScheduleEntry(t, t + dev.rotation_time, f"drive_{step.target}",
                                             f"{_rotation_label(step)} ({label})"))
                t += dev.rotation_time
    gate_time = t - gate_start
    entries.append(ScheduleEntry(t, t, "flux", "0.5 (coupling off)"))
    notes = []
    if gate_time >= TIMING_FRACTION * dev.relaxation_time:
        notes.append(f"gate time {gate_time:.3e} s is not << relaxation time {dev.relaxation_time:.3e} s")
    if cfg.feedback != "cnot":
        notes.append("feedback is a general CEV; its window is timed as a CNOT")
    return Schedule(tuple(entries), gate_time, wait, dev.relaxation_time, tuple(notes))


@dataclass(frozen=True)
class DeviceReport:
    gap_s: float
    gap_d: float
    coupling: float
    native_time: float
    eta_device: float
    eta_cycle: float | None
    work: float
    power: float
    otto: OttoLimitStatus
    schedule: Schedule
    otto_work_estimate: float

    @property
    def coupling_on(self) -> bool:
        return self.coupling != 0.0

    def to_dict(self) -> dict:
        return {
            "Delta_S_J": self.gap_s,
            "Delta_D_J": self.gap_d,
            "E_L_J": self.coupling,
            "coupling_on": self.coupling_on,
            "t0_s": self.native_time,
            "eta_device": self.eta_device,
            "eta_cycle": self.eta_cycle,
            "W_J": self.work,
            "P_W": self.power,
            "W_otto_estimate_J": self.otto_work_estimate,
            "exp_beta_gap_S": self.otto.exp_s,
            "exp_beta_gap_D": self.otto.exp_d,
            "otto_limit_holds": self.otto.holds,
            "otto_limit_warning": self.otto.warning,
            "schedule": self.schedule.to_dict(),
        }


def device_report(dev: DeviceParams) -> DeviceReport:
    gap_s, gap_d = gap_from_gate(dev.s), gap_from_gate(dev.d)
    if gap_s == 0.0:
        raise ValueError("n_g_s = 1/2 gives a zero working-substance gap")
    if dev.s.e_c == dev.d.e_c:
        eta_dev = device_efficiency(dev.s.n_g, dev.d.n_g)
    else:
        eta_dev = otto_efficiency(gap_s, gap_d)
    cfg = to_cycle_config(dev)
    w, p = power_estimate(cfg, dev.cycle_time)
    try:
        eta_cycle = efficiency_closed_form(cfg)[0]
    except ValueError:
        eta_cycle = None
    return DeviceReport(
        gap_s=gap_s,
        gap_d=gap_d,
        coupling=coupling_from_flux(dev.coupler),
        native_time=iswap_duration(dev.coupler.e_0),
        eta_device=eta_dev,
        eta_cycle=eta_cycle,
        work=w,
        power=p,
        otto=otto_limit_status(dev),
        schedule=pulse_schedule(cfg, dev),
        otto_work_estimate=otto_work_estimate(dev),
    )
