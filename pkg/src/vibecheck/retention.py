"""Session velocities, complexity weighting, and skill-retention scoring.

A session log is a time-ordered event stream plus the final source unit the
session produced.  Active time is the union of windows ``[t, t + idle_gap]``
around events (default gap 120 s), so a pause longer than the gap does not
count as work.  Velocity is the final unit's Halstead volume per active
minute (or lines per active minute with the ``loc`` unit).

The retention score for a student is

    m_csr = (v_rec / v_build) * omega(target)

where ``omega = alpha * ln(cc) + beta * volume`` weights the refactor target
by its structural complexity (natural log; ``cc >= 1`` always, and cc = 1
with beta = 0 makes omega exactly 0, which is reported as degenerate).  The
weights come from an expert calibration chosen so that experts who rebuild
unassisted at their assisted pace score 1.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from vibecheck.codemetrics import CodeMetrics, metrics, parse
from vibecheck.codemetrics.nodes import SourceUnit
from vibecheck.errors import (
    CalibrationError,
    DegenerateOmegaWarning,
    FitError,
    UndefinedVelocityError,
    ValidationError,
)

DEFAULT_IDLE_GAP = 120.0  # seconds

EVENT_KINDS = frozenset({"edit", "prompt", "paste", "run", "test_pass", "test_fail"})
PHASES = ("ai_build", "cold_refactor")
_ASSISTED_ONLY_KINDS = frozenset({"prompt", "paste"})


@dataclass(frozen=True)
class SessionEvent:
    t: float  # seconds on the study clock
    kind: str
    payload: Optional[str] = None


@dataclass(frozen=True)
class SessionLog:
    student: str
    phase: str  # "ai_build" | "cold_refactor"
    events: tuple[SessionEvent, ...]
    final_unit: SourceUnit

    def validate(self) -> None:
        if self.phase not in PHASES:
            raise ValidationError(f"unknown phase {self.phase!r}")
        last = None
        for event in self.events:
            if event.kind not in EVENT_KINDS:
                raise ValidationError(f"unknown event kind {event.kind!r}")
            if last is not None and event.t < last:
                raise ValidationError("event timestamps must be non-decreasing")
            last = event.t
            if self.phase == "cold_refactor" and event.kind in _ASSISTED_ONLY_KINDS:
                raise ValidationError(
                    f"cold_refactor session contains assisted event {event.kind!r}"
                )


@dataclass(frozen=True)
class OmegaCalibration:
    alpha: float
    beta: float
    baseline_source: str
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "baseline_source": self.baseline_source,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OmegaCalibration":
        try:
            return cls(
                alpha=float(data["alpha"]),
                beta=float(data["beta"]),
                baseline_source=str(data["baseline_source"]),
                degenerate=bool(data.get("degenerate", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed calibration record: {exc}") from exc


UNCALIBRATED = OmegaCalibration(alpha=1.0, beta=0.0, baseline_source="uncalibrated")


@dataclass(frozen=True)
class RetentionResult:
    student: str
    v_build: float
    v_rec: float
    omega: float
    m_csr: float
    delta_t_hours: float
    omega_build: float
    omega_refactor: float
    calibration_source: str


@dataclass(frozen=True)
class DecayFit:
    s0: float
    lam: float
    rms_residual: float
    n_used: int
    n_excluded: int


# --- time accounting -------------------------------------------------------


def active_minutes(log: SessionLog, idle_gap: float = DEFAULT_IDLE_GAP) -> float:
    """Minutes covered by the union of per-event windows ``[t, t + idle_gap]``."""
    if idle_gap <= 0:
        raise ValidationError(f"idle_gap must be positive, got {idle_gap!r}")
    log.validate()
    if not log.events:
        return 0.0
    total = 0.0
    window_start = log.events[0].t
    window_end = window_start + idle_gap
    for event in log.events[1:]:
        if event.t <= window_end:
            window_end = event.t + idle_gap
        else:
            total += window_end - window_start
            window_start = event.t
            window_end = event.t + idle_gap
    total += window_end - window_start
    return total / 60.0


def lines_of_code(unit: SourceUnit) -> int:
    """Non-blank, non-comment source lines."""
    count = 0
    for line in unit.text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("//"):
            count += 1
    return count


def velocity(
    log: SessionLog, idle_gap: float = DEFAULT_IDLE_GAP, unit: str = "volume"
) -> float:
    """Output per active minute: Halstead volume (default) or lines."""
    if unit not in ("volume", "loc"):
        raise ValidationError(f"unknown velocity unit {unit!r}")
    minutes = active_minutes(log, idle_gap=idle_gap)
    if minutes <= 0.0:
        raise UndefinedVelocityError(
            f"session for {log.student!r} has no events, so velocity is undefined"
        )
    if unit == "loc":
        return lines_of_code(log.final_unit) / minutes
    return metrics(log.final_unit).halstead.volume_v / minutes


# --- complexity weighting --------------------------------------------------


def omega(m: CodeMetrics, calibration: OmegaCalibration) -> float:
    """Complexity weight ``alpha * ln(cc) + beta * volume_v``."""
    if m.halstead is None:
        raise ValidationError("omega needs Halstead volume; a bare graph has none")
    value = calibration.alpha * math.log(m.cc) + calibration.beta * m.halstead.volume_v
    if value == 0.0:
        warnings.warn(
            "complexity weight is exactly 0 (cc = 1 and no volume term); "
            "retention ratios built on it collapse to 0",
            DegenerateOmegaWarning,
            stacklevel=2,
        )
    return value


def csr_ratio(v_rec: float, v_build: float, omega_value: float) -> float:
    """The pure retention kernel ``(v_rec / v_build) * omega``."""
    if v_build <= 0.0:
        raise ValidationError(f"build velocity must be positive, got {v_build!r}")
    if v_rec < 0.0:
        raise ValidationError(f"recall velocity must be non-negative, got {v_rec!r}")
    return (v_rec / v_build) * omega_value


def calibrate_omega(
    pairs: Sequence[tuple[SessionLog, SessionLog]],
    idle_gap: float = DEFAULT_IDLE_GAP,
    baseline_source: str = "expert-baseline",
) -> OmegaCalibration:
    """Least-squares (alpha, beta) making expert retention scores hit 1.

    Minimizes ``sum((r_i * omega_i - 1)^2)`` with ``r_i`` the expert's
    velocity ratio and ``omega_i`` evaluated on the i-th refactor target.
    A rank-deficient but consistent system (e.g. a single complexity class)
    returns the minimum-norm solution flagged ``degenerate``; an
    inconsistent rank-deficient system is a calibration error naming the
    collinear rows.
    """
    if len(pairs) < 2:
        raise ValidationError("calibration needs at least two expert pairs")
    rows = []
    for build, refactor in pairs:
        _check_pair(build, refactor)
        ratio = velocity(refactor, idle_gap=idle_gap) / velocity(build, idle_gap=idle_gap)
        m = metrics(refactor.final_unit)
        rows.append((ratio * math.log(m.cc), ratio * m.halstead.volume_v))
    design = np.array(rows, dtype=float)
    target = np.ones(len(rows))
    solution, residual_list, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    fitted = design @ solution
    residual = float(np.linalg.norm(fitted - target))
    if rank < 2:
        if residual > 1e-9 * math.sqrt(len(rows)):
            detail = ", ".join(f"({a:.6g}, {b:.6g})" for a, b in rows)
            raise CalibrationError(
                "calibration design is rank-deficient and inconsistent; "
                f"collinear (ln cc, volume) rows: {detail}"
            )
        return OmegaCalibration(
            alpha=float(solution[0]),
            beta=float(solution[1]),
            baseline_source=baseline_source,
            degenerate=True,
        )
    return OmegaCalibration(
        alpha=float(solution[0]), beta=float(solution[1]), baseline_source=baseline_source
    )


def calibration_mean_score(
    calibration: OmegaCalibration,
    pairs: Sequence[tuple[SessionLog, SessionLog]],
    idle_gap: float = DEFAULT_IDLE_GAP,
) -> float:
    """Mean retention score of the calibration's own baseline pairs."""
    scores = [
        m_csr(build, refactor, calibration, idle_gap=idle_gap).m_csr
        for build, refactor in pairs
    ]
    return float(np.mean(scores))


def _check_pair(build: SessionLog, refactor: SessionLog) -> None:
    build.validate()
    refactor.validate()
    if build.phase != "ai_build":
        raise ValidationError(f"build log has phase {build.phase!r}, expected 'ai_build'")
    if refactor.phase != "cold_refactor":
        raise ValidationError(
            f"refactor log has phase {refactor.phase!r}, expected 'cold_refactor'"
        )
    if build.student != refactor.student:
        raise ValidationError(
            f"phase logs belong to different students: {build.student!r} vs {refactor.student!r}"
        )


# --- scoring ---------------------------------------------------------------


def m_csr(
    build: SessionLog,
    refactor: SessionLog,
    calibration: OmegaCalibration,
    idle_gap: float = DEFAULT_IDLE_GAP,
    velocity_unit: str = "volume",
) -> RetentionResult:
    """Retention score for one student's build/refactor pair.

    The complexity weight is evaluated on the refactor target (the unit the
    student had to reconstruct); the build-side weight is also reported so
    the two variants can be compared.
    """
    _check_pair(build, refactor)
    if not build.events or not refactor.events:
        raise ValidationError("both sessions need at least one event")
    delta_seconds = refactor.events[0].t - build.events[-1].t
    if delta_seconds < 0:
        raise ValidationError("refactor session starts before the build session ends")
    v_build = velocity(build, idle_gap=idle_gap, unit=velocity_unit)
    v_rec = velocity(refactor, idle_gap=idle_gap, unit=velocity_unit)
    omega_refactor = omega(metrics(refactor.final_unit), calibration)
    omega_build = omega(metrics(build.final_unit), calibration)
    return RetentionResult(
        student=build.student,
        v_build=v_build,
        v_rec=v_rec,
        omega=omega_refactor,
        m_csr=csr_ratio(v_rec, v_build, omega_refactor),
        delta_t_hours=delta_seconds / 3600.0,
        omega_build=omega_build,
        omega_refactor=omega_refactor,
        calibration_source=calibration.baseline_source,
    )


# --- decay fits ------------------------------------------------------------


def fit_decay(observations: Sequence[tuple[float, float]]) -> DecayFit:
    """Least-squares exponential decay fit ``s(t) = s0 * exp(-lam * t)``.

    Fitted in log space (``ln s = ln s0 - lam * t``); observations with
    ``s <= 0`` cannot enter the log fit and are excluded but counted.
    """
    usable = [(t, s) for t, s in observations if s > 0.0]
    excluded = len(observations) - len(usable)
    if len(usable) < 2:
        raise FitError("decay fit needs at least two observations with s > 0")
    times = np.array([t for t, _ in usable], dtype=float)
    if np.ptp(times) == 0.0:
        raise FitError("decay fit needs observations at two distinct times")
    log_scores = np.log(np.array([s for _, s in usable], dtype=float))
    design = np.column_stack([np.ones_like(times), -times])
    coeffs, _, _, _ = np.linalg.lstsq(design, log_scores, rcond=None)
    fitted = design @ coeffs
    rms = float(np.sqrt(np.mean((fitted - log_scores) ** 2)))
    return DecayFit(
        s0=float(math.exp(coeffs[0])),
        lam=float(coeffs[1]),
        rms_residual=rms,
        n_used=len(usable),
        n_excluded=excluded,
    )


# --- session-log files -----------------------------------------------------


def read_session_log(path: Union[str, Path]) -> SessionLog:
    """Read a session-log file.

    Line 1 is a header ``{"student", "phase"}``; middle lines are events
    ``{"t", "kind", "payload"?}``; the last line is a trailer
    ``{"final_unit": <path relative to the log file>}``.
    """
    path = Path(path)
    lines = [line for line in path.read_text().splitlines() if line.strip()]
    if len(lines) < 2:
        raise ValidationError(f"{path}: session log needs a header and a trailer")
    try:
        header = json.loads(lines[0])
        trailer = json.loads(lines[-1])
        student = str(header["student"])
        phase = str(header["phase"])
        unit_rel = str(trailer["final_unit"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: bad session-log header/trailer: {exc}") from exc
    events = []
    for lineno, line in enumerate(lines[1:-1], start=2):
        try:
            rec = json.loads(line)
            payload = rec.get("payload")
            events.append(
                SessionEvent(
                    t=float(rec["t"]),
                    kind=str(rec["kind"]),
                    payload=None if payload is None else str(payload),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}:{lineno}: bad event record: {exc}") from exc
    unit_path = path.parent / unit_rel
    try:
        source = unit_path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read final unit {unit_rel!r}: {exc}") from exc
    log = SessionLog(
        student=student,
        phase=phase,
        events=tuple(events),
        final_unit=parse(source, name=unit_path.name),
    )
    log.validate()
    return log


def write_session_log(log: SessionLog, path: Union[str, Path], unit_rel: str) -> None:
    """Write a session log and its final unit next to each other."""
    path = Path(path)
    lines = [json.dumps({"student": log.student, "phase": log.phase}, sort_keys=True)]
    for event in log.events:
        rec: dict = {"t": event.t, "kind": event.kind}
        if event.payload is not None:
            rec["payload"] = event.payload
        lines.append(json.dumps(rec, sort_keys=True))
    lines.append(json.dumps({"final_unit": unit_rel}, sort_keys=True))
    path.write_text("\n".join(lines) + "\n")
    (path.parent / unit_rel).write_text(log.final_unit.text)
