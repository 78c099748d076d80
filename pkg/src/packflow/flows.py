"""Time integration of the curvature flows in the log scale factors.

Four velocity fields share one integrator:

    calabi        du/dt = laplacian(K - target)
    fractional(s) du/dt = -(dK/du)^s (K - target)
    p_calabi(p)   du/dt = p-laplacian(K - target)
    ricci         du/dt = -(K - target)            (fractional with s = 0)

Steps are explicit Euler followed by an exact zero-sum projection, so the
total of the scale factors is conserved to machine precision.  A trial
step is accepted only if the state stays admissible, surgery (when on)
succeeds, and the monitored quantities do not increase: the squared
curvature deviation for the s-family, and the trapezoidal potential
increment for every flow.  Rejected trials halve the step, up to 30 times;
clean steps let the next trial grow, which is what makes the slow p != 2
flows reach tight tolerances in a bounded number of steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import nan

import numpy as np

from .errors import (
    GeometryError,
    InvalidExponent,
    MetricError,
    NonAdmissibleTarget,
    StepCollapse,
    SurgeryError,
)
from .metric import DecoratedMetric, validate_triangles
from .operators import (
    apply_fractional,
    apply_laplacian,
    apply_p_laplacian,
    calabi_energy,
    curvature,
    jacobian,
)
from .surgery import delaunay_violations, make_delaunay

logger = logging.getLogger(__name__)

KINDS = ("calabi", "fractional", "p_calabi", "ricci")
DEFAULT_STEP_BY_KIND = {"ricci": 0.1}
DEFAULT_STEP = 0.01
MAX_HALVINGS = 30
STEP_GROWTH_CAP = 1e8
TARGET_SUM_TOL = 1e-9


@dataclass
class FlowConfig:
    """Everything a run needs besides the metric itself.

    ``h = None`` picks the per-kind default (0.1 for ricci, 0.01 for the
    rest).  ``growth`` is the factor the trial step gains after a step
    that needed no halving; set it to 1.0 for a constant trial step.
    """

    kind: str
    target: np.ndarray
    s: float = 0.0
    p: float = 2.0
    h: float | None = None
    tol: float = 1e-8
    max_steps: int = 1_000_000
    surgery: bool = True
    surgery_budget: int | None = None
    growth: float = 2.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}; expected one of {KINDS}")
        self.target = np.asarray(self.target, dtype=float)
        if self.kind == "p_calabi" and not self.p > 1.0:
            raise InvalidExponent(f"p_calabi needs p > 1, got {self.p}")
        if self.h is not None and not self.h > 0:
            raise ValueError(f"step size must be positive, got {self.h}")
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")

    @property
    def initial_step(self) -> float:
        if self.h is not None:
            return self.h
        return DEFAULT_STEP_BY_KIND.get(self.kind, DEFAULT_STEP)


@dataclass
class StepRecord:
    """One accepted step (or the initial snapshot, with h = 0)."""

    step: int
    t: float
    h: float
    halvings: int
    max_curv_err: float
    calabi_energy: float
    w_increment: float
    w_est: float
    flips: int
    flips_total: int
    min_margin: float
    curvature_jump: float
    sum_u: float


@dataclass
class FlowTrace:
    """Accepted-step history plus the final state of a run."""

    records: list[StepRecord]
    termination: str
    metric: DecoratedMetric
    target: np.ndarray
    kind: str
    flips_total: int
    initial_violations: int = 0

    @property
    def converged(self) -> bool:
        return self.termination == "converged"

    @property
    def steps(self) -> int:
        return self.records[-1].step if self.records else 0

    @property
    def final_max_curv_err(self) -> float:
        return self.records[-1].max_curv_err if self.records else nan


def potential_increment(curv: np.ndarray, target: np.ndarray, du: np.ndarray) -> float:
    """Integrand sample dot(K - target, du) of the flow potential.

    The engine averages this at both step endpoints for the trapezoidal
    potential estimate accumulated into the trace.
    """
    diff = np.asarray(curv, dtype=float) - np.asarray(target, dtype=float)
    return float(diff @ np.asarray(du, dtype=float))


def velocity(metric: DecoratedMetric, config: FlowConfig) -> np.ndarray:
    """du/dt at the current state for the configured flow."""
    deviation = curvature(metric) - config.target
    if config.kind == "ricci" or (config.kind == "fractional" and config.s == 0.0):
        return -deviation
    if config.kind == "calabi":
        return apply_laplacian(jacobian(metric), deviation)
    if config.kind == "fractional":
        return apply_fractional(jacobian(metric), config.s, deviation)
    return apply_p_laplacian(metric, config.p, deviation)


def _monotone_ok(config: FlowConfig, energy_before: float, energy_after: float, w_inc: float) -> bool:
    if w_inc > 0.0:
        return False
    if config.kind == "p_calabi":
        return True
    return energy_after <= energy_before


def step(
    metric: DecoratedMetric,
    config: FlowConfig,
    h: float,
    *,
    target_sum: float | None = None,
    flow_time: float = 0.0,
    flip_ordinal: int = 0,
) -> tuple[DecoratedMetric, StepRecord]:
    """One accepted Euler step with projection, surgery, and backtracking.

    Does not mutate ``metric``; returns the new state and a record with
    the run-level fields (step index, t, cumulative sums) left at their
    per-step values for the caller to stamp.
    """
    u0 = np.array(metric.conformal_factors)
    if target_sum is None:
        target_sum = float(np.sum(u0))
    k0 = curvature(metric)
    e0 = calabi_energy(k0, config.target)
    v = velocity(metric, config)
    n = u0.size

    last_reason = "no admissible step"
    h_try = h
    for halvings in range(MAX_HALVINGS + 1):
        u1 = u0 + h_try * v
        u1 -= (np.sum(u1) - target_sum) / n
        du = u1 - u0
        trial = metric.copy()
        try:
            trial.set_conformal_factors(u1)
            report = validate_triangles(trial)
            if not report.admissible:
                last_reason = (
                    f"triangle margin {report.margins[report.worst_triangle]:.3e}"
                    f" at face {report.worst_triangle}"
                )
                h_try *= 0.5
                continue
            k_mid = None
            events = []
            if config.surgery:
                k_mid = curvature(trial)
                _, events = make_delaunay(
                    trial,
                    config.surgery_budget,
                    flow_time=flow_time + h_try,
                    start_ordinal=flip_ordinal,
                )
        except (MetricError, GeometryError, SurgeryError) as exc:
            last_reason = f"{type(exc).__name__}: {exc}"
            h_try *= 0.5
            continue

        k1 = curvature(trial)
        e1 = calabi_energy(k1, config.target)
        w_inc = 0.5 * (
            potential_increment(k0, config.target, du)
            + potential_increment(k1, config.target, du)
        )
        if not _monotone_ok(config, e0, e1, w_inc):
            last_reason = (
                f"monotonicity rejected h={h_try:.3e}"
                f" (energy {e0:.6e} -> {e1:.6e}, potential increment {w_inc:.3e})"
            )
            h_try *= 0.5
            continue

        jump = 0.0
        if events:
            jump = float(np.max(np.abs(k1 - k_mid)))
        report = validate_triangles(trial)
        record = StepRecord(
            step=0,
            t=flow_time + h_try,
            h=h_try,
            halvings=halvings,
            max_curv_err=float(np.max(np.abs(k1 - config.target))),
            calabi_energy=e1,
            w_increment=w_inc,
            w_est=w_inc,
            flips=len(events),
            flips_total=flip_ordinal + len(events),
            min_margin=float(np.min(report.margins)),
            curvature_jump=jump,
            sum_u=float(np.sum(u1)),
        )
        return trial, record

    raise StepCollapse(
        f"no acceptable step after {MAX_HALVINGS} halvings from h={h:.3e}; last failure: {last_reason}"
    )


def _require_admissible_target(metric: DecoratedMetric, config: FlowConfig) -> None:
    target = config.target
    n = metric.mesh.num_vertices
    if target.shape != (n,):
        raise NonAdmissibleTarget(f"target shape {target.shape} != ({n},)")
    if not np.all(np.isfinite(target)):
        raise NonAdmissibleTarget("target curvature has non-finite entries")
    if np.any(target >= 2.0 * np.pi):
        bad = np.where(target >= 2.0 * np.pi)[0]
        raise NonAdmissibleTarget(
            f"target curvature must stay below 2*pi; vertices {bad.tolist()[:8]}"
        )
    total = float(np.sum(target))
    expected = 2.0 * np.pi * metric.mesh.euler_characteristic
    if abs(total - expected) > TARGET_SUM_TOL:
        raise NonAdmissibleTarget(
            f"target sum {total:.12g} differs from 2*pi*chi = {expected:.12g}"
        )


def run(metric: DecoratedMetric, config: FlowConfig) -> FlowTrace:
    """Integrate until max|K - target| < tol or the step budget runs out.

    Operates on a copy of the input metric.  With surgery enabled the
    triangulation is made weighted Delaunay before the first step and
    after every Euler update; with it disabled the triangulation is fixed
    and violations are only counted.
    """
    _require_admissible_target(metric, config)
    state = metric.copy()
    validate_triangles(state).require()

    target_sum = float(np.sum(state.conformal_factors))
    flips_total = 0
    initial_violations = 0
    jump0 = 0.0
    if config.surgery:
        k_before = curvature(state)
        _, events = make_delaunay(state, config.surgery_budget, flow_time=0.0)
        flips_total = len(events)
        if events:
            jump0 = float(np.max(np.abs(curvature(state) - k_before)))
    else:
        initial_violations = len(delaunay_violations(state))
        if initial_violations:
            logger.info(
                "surgery disabled: %d weighted Delaunay violations at the start",
                initial_violations,
            )

    k = curvature(state)
    report = validate_triangles(state)
    records = [
        StepRecord(
            step=0,
            t=0.0,
            h=0.0,
            halvings=0,
            max_curv_err=float(np.max(np.abs(k - config.target))),
            calabi_energy=calabi_energy(k, config.target),
            w_increment=0.0,
            w_est=0.0,
            flips=flips_total,
            flips_total=flips_total,
            min_margin=float(np.min(report.margins)),
            curvature_jump=jump0,
            sum_u=float(np.sum(state.conformal_factors)),
        )
    ]

    t = 0.0
    w_cum = 0.0
    h_try = config.initial_step
    steps_taken = 0
    while True:
        if records[-1].max_curv_err < config.tol:
            termination = "converged"
            break
        if steps_taken >= config.max_steps:
            termination = "budget"
            break
        state, rec = step(
            state,
            config,
            h_try,
            target_sum=target_sum,
            flow_time=t,
            flip_ordinal=flips_total,
        )
        steps_taken += 1
        t += rec.h
        w_cum += rec.w_increment
        flips_total += rec.flips
        rec.step = steps_taken
        rec.t = t
        rec.w_est = w_cum
        rec.flips_total = flips_total
        records.append(rec)
        if rec.halvings == 0:
            h_try = min(h_try * config.growth, STEP_GROWTH_CAP)
        else:
            h_try = rec.h

    return FlowTrace(
        records=records,
        termination=termination,
        metric=state,
        target=config.target,
        kind=config.kind,
        flips_total=flips_total,
        initial_violations=initial_violations,
    )
