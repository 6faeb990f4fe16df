"""Time integration of the profile-curve flow, monitoring, and singularity
classification.

One explicit RK4 step uses dt = cfl * h_min^2 / (1 + max|f| h_min) with
h_min the smallest chord.  Tangential drift is controlled by periodic
arclength resampling (applied at the resample cadence only when the chord
spread actually exceeds `resample_ratio`; on curves that keep uniform
spacing, such as shrinking circles, resampling is a no-op and is skipped).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import _kernels
from .curve import DiscreteCurve, chord_lengths, from_complex, resample_arclength
from .errors import (BadHorizon, BlowUp, InsufficientBlowup, InvalidSpec,
                     OriginContact, StepUnderflow)
from .geometry import TWO_PI, GeometryField, geometry
from .topology import TopologyInfo, predicates, topology

FLAG_NAMES = ("starshaped", "tamed", "austere", "embedded")


@dataclass(frozen=True)
class FlowConfig:
    n: int = 2
    cfl: float = 0.2
    resample_every: int = 5
    resample_ratio: float = 1.02   # chord max/min spread that triggers resampling
    stop_min_r: float | None = None   # default resolved to 1e-3 * initial max r
    stop_max_f: float = 1e6
    t_max: float | None = None
    record_every: int = 50

    def __post_init__(self):
        if not (0.0 < self.cfl <= 0.5):
            raise InvalidSpec(f"cfl must lie in (0, 0.5], got {self.cfl}")
        if self.n < 1 or self.resample_every < 1 or self.record_every < 1:
            raise InvalidSpec("n, resample_every, record_every must be positive")
        if self.stop_min_r is not None and self.stop_min_r <= 0:
            raise InvalidSpec("stop_min_r must be positive")
        if self.stop_max_f <= 0 or self.resample_ratio <= 1.0:
            raise InvalidSpec("stop_max_f must be positive and resample_ratio > 1")
        if self.t_max is not None and self.t_max <= 0:
            raise InvalidSpec("t_max must be positive")


@dataclass(frozen=True)
class FlowState:
    curve: DiscreteCurve
    t: float = 0.0
    dt_last: float = 0.0
    steps: int = 0


@dataclass
class TrajectoryRecord:
    """Time series of monitored invariants, aligned by sample index."""

    n: int
    times: list = dataclass_field(default_factory=list)
    area: list = dataclass_field(default_factory=list)
    eps_t: list = dataclass_field(default_factory=list)
    min_r: list = dataclass_field(default_factory=list)
    max_r: list = dataclass_field(default_factory=list)
    max_abs_f: list = dataclass_field(default_factory=list)
    max_abs_k: list = dataclass_field(default_factory=list)
    harnack_ratio: list = dataclass_field(default_factory=list)
    a_proxy_sq: list = dataclass_field(default_factory=list)
    flags: dict = dataclass_field(default_factory=lambda: {k: [] for k in FLAG_NAMES})
    snapshots: list = dataclass_field(default_factory=list)   # (index, DiscreteCurve)
    stop_reason: str = ""
    t_stop: float = 0.0

    def sample(self, state: FlowState, fld: GeometryField, topo: TopologyInfo, preds: dict):
        self.times.append(state.t)
        self.area.append(topo.area)
        self.eps_t.append(topo.eps_monotone)
        self.min_r.append(float(fld.r.min()))
        self.max_r.append(float(fld.r.max()))
        self.max_abs_f.append(float(np.abs(fld.f).max()))
        self.max_abs_k.append(float(np.abs(fld.k).max()))
        self.harnack_ratio.append(float(fld.r.max() / fld.r.min()) if fld.r.min() > 0 else np.inf)
        a2 = fld.k ** 2
        if self.n > 1:
            a2 = a2 + (self.n - 1) * (fld.nu_dot_er / fld.r) ** 2
        self.a_proxy_sq.append(float(a2.max()))
        for name in FLAG_NAMES:
            self.flags[name].append(bool(preds[name]))
        self.snapshots.append((len(self.times) - 1, state.curve))

    def asarray(self, key):
        return np.asarray(getattr(self, key), dtype=float)

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class SingularityReport:
    T_est: float
    fit_c: float
    sing_class: str          # one of C1, C2, C3, none
    type1: bool
    rescaled_sup: np.ndarray  # m(t) = A_proxy^2 * (T_est - t) over the fit tail
    tail_times: np.ndarray

    def as_dict(self) -> dict:
        return {
            "T_est": self.T_est,
            "fit_c": self.fit_c if np.isfinite(self.fit_c) else None,
            "class": self.sing_class,
            "type1": bool(self.type1),
            "m_tail": [float(v) for v in self.rescaled_sup],
        }


def _advance(zbuf, config, nsteps, t, dt_fixed=0.0, stop_min_r=0.0):
    h = TWO_PI / len(zbuf)
    return _kernels.advance(zbuf, config.n, h, config.cfl, stop_min_r,
                            config.stop_max_f, nsteps, t, dt_fixed)


def step(state: FlowState, config: FlowConfig, dt: float | None = None,
         resample: bool = True) -> FlowState:
    """One explicit RK4 step of dz/dt = -f nu.

    Raises BlowUp when max|f| exceeds config.stop_max_f, StepUnderflow when
    the stable dt is below 1e-15, OriginContact when a node reaches the
    origin with n >= 2.  Every `resample_every` steps the curve is put back
    on (near) uniform arclength spacing.
    """
    zbuf = state.curve.z
    t, done, reason, dt_last = _advance(zbuf, config, 1, state.t,
                                        dt_fixed=0.0 if dt is None else dt,
                                        stop_min_r=0.0 if config.n >= 2 else -1.0)
    if reason == _kernels.HIT_MIN_R:
        raise OriginContact("curve node reached the origin during a step")
    if reason == _kernels.HIT_MAX_F:
        raise BlowUp(f"max|f| exceeded {config.stop_max_f}")
    if reason == _kernels.UNDERFLOW:
        raise StepUnderflow("stable time step below 1e-15")
    curve = from_complex(zbuf, state.curve.n_ambient)
    steps = state.steps + 1
    if resample and steps % config.resample_every == 0:
        curve = _maybe_resample(curve, config.resample_ratio)
    return FlowState(curve=curve, t=t, dt_last=dt_last, steps=steps)


def _maybe_resample(curve: DiscreteCurve, ratio: float) -> DiscreteCurve:
    c = chord_lengths(curve)
    if c.max() / c.min() > ratio:
        return resample_arclength(curve)
    return curve


def run(initial: DiscreteCurve, config: FlowConfig):
    """Integrate until a stop condition; record invariants along the way.

    Returns (TrajectoryRecord, SingularityReport or None, final FlowState).
    The report is None when the trajectory never blew up enough to classify
    (e.g. a t_max stop long before the singularity).
    """
    curve = _maybe_resample(initial, 1.0 + 1e-9)
    if curve.n_ambient != config.n:
        curve = DiscreteCurve(points=curve.points, n_ambient=config.n)
    stop_min_r = config.stop_min_r
    if stop_min_r is None:
        stop_min_r = 1e-3 * float(curve.r.max())
        if config.n == 1 and float(curve.r.min()) <= stop_min_r:
            stop_min_r = -1.0  # n=1 curves may pass through the origin

    record = TrajectoryRecord(n=config.n)
    state = FlowState(curve=curve)
    _record_sample(record, state)

    zbuf = curve.z
    steps = 0
    t = state.t
    reason = None
    while True:
        if config.t_max is not None and t >= config.t_max:
            reason = "t_max"
            break
        chunk = config.resample_every
        until_record = config.record_every - (steps % config.record_every)
        chunk = min(chunk, until_record)
        t, done, code, dt_last = _advance(zbuf, config, chunk, t, stop_min_r=stop_min_r)
        steps += done
        state = FlowState(curve=from_complex(zbuf, config.n), t=t,
                          dt_last=dt_last, steps=steps)
        if code == _kernels.HIT_MIN_R:
            reason = "min_r"
            break
        if code == _kernels.HIT_MAX_F:
            reason = "max_f"
            break
        if code == _kernels.UNDERFLOW:
            reason = "underflow"
            break
        if steps % config.resample_every == 0:
            newc = _maybe_resample(state.curve, config.resample_ratio)
            if newc is not state.curve:
                state = FlowState(curve=newc, t=t, dt_last=dt_last, steps=steps)
                zbuf = newc.z
        if steps % config.record_every == 0:
            _record_sample(record, state)

    if len(record) == 0 or record.times[-1] < state.t:
        _record_sample(record, state)
    record.stop_reason = reason
    record.t_stop = state.t

    report = None
    try:
        report = estimate_singularity(record)
    except InsufficientBlowup:
        pass
    return record, report, state


def _record_sample(record: TrajectoryRecord, state: FlowState):
    fld = geometry(state.curve, record.n)
    topo = topology(state.curve, fld, record.n)
    preds = predicates(state.curve, fld, lagrangian=False)
    record.sample(state, fld, topo, preds)


def estimate_singularity(record: TrajectoryRecord, tail_fraction: float = 0.25) -> SingularityReport:
    """Estimate T_sing from the blow-up proxy and classify the singularity.

    A_proxy^2(t) = max_j (k^2 + (n-1)(<nu,e_r>/r)^2) is fit to c/(T - t) by
    least squares on 1/A_proxy^2 over the trajectory tail.  T_est is clamped
    to stay beyond the last recorded time.  The type-1 verdict holds when
    m(t) = A_proxy^2 (T_est - t) stays bounded over the tail (max <= 2x median).
    """
    if len(record) < 20:
        raise InsufficientBlowup(f"need >= 20 samples, have {len(record)}")
    t = record.asarray("times")
    a2 = record.asarray("a_proxy_sq")
    maxf = record.asarray("max_abs_f")
    if maxf.max() < 10.0 * maxf[0]:
        raise InsufficientBlowup("max|f| never exceeded 10x its initial value")

    m = max(20, int(np.ceil(tail_fraction * len(t))))
    m = min(m, len(t))
    tt = t[-m:]
    yy = 1.0 / a2[-m:]
    design = np.vstack([tt, np.ones_like(tt)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, yy, rcond=None)
    if slope < 0:
        T_fit = -intercept / slope
        fit_c = -1.0 / slope
    else:
        T_fit = -np.inf
        fit_c = np.inf
    if T_fit > t[-1]:
        T_est = T_fit
    else:
        # type-2 fits can cross zero before the last sample; keep the horizon
        # ahead of the data by one typical sample spacing
        dt_med = float(np.median(np.diff(tt))) if m > 1 else 0.0
        T_est = max(t[-1] + dt_med, np.nextafter(t[-1], np.inf))
    sigma_T = _intercept_stderr(design, yy, slope, intercept)

    k_blows = bool(record.asarray("max_abs_k").max() > 10.0 * record.max_abs_k[0])
    r_vanishes = bool(record.stop_reason == "min_r"
                      or record.min_r[-1] <= 0.05 * record.min_r[0])
    if k_blows and r_vanishes:
        sing_class = "C1"
    elif k_blows:
        sing_class = "C2"
    elif r_vanishes:
        sing_class = "C3"   # heuristic: curvature stayed tame while r -> 0
    else:
        sing_class = "none"

    m_tail = a2[-m:] * (T_est - tt)
    # samples whose remaining time is inside the fit's own T-uncertainty
    # carry no rate information; judge boundedness on the resolved ones
    keep = (T_est - tt) >= 5.0 * sigma_T
    if keep.sum() < 8:
        keep = np.ones_like(keep, dtype=bool)
    type1 = bool(np.max(m_tail[keep]) <= 2.0 * np.median(m_tail[keep]))
    return SingularityReport(T_est=float(T_est), fit_c=float(fit_c),
                             sing_class=sing_class, type1=type1,
                             rescaled_sup=m_tail[keep], tail_times=tt[keep])


def _intercept_stderr(design, yy, slope, intercept) -> float:
    """Standard error of the x-intercept -b/s of a least-squares line."""
    if slope >= 0:
        return np.inf
    m = len(yy)
    if m <= 2:
        return np.inf
    resid = yy - design @ np.array([slope, intercept])
    sigma2 = float(resid @ resid) / (m - 2)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    T = -intercept / slope
    var_T = (cov[1, 1] + T * T * cov[0, 0] + 2.0 * T * cov[0, 1]) / slope ** 2
    return float(np.sqrt(max(var_T, 0.0)))


def rescale_huisken(state: FlowState, T_est: float):
    """Huisken-rescaled curve (2(T-t))^{-1/2} z and the slow time s."""
    if T_est <= state.t:
        raise BadHorizon(f"T_est={T_est} is not beyond t={state.t}")
    lam = (2.0 * (T_est - state.t)) ** -0.5
    s = -0.5 * np.log(T_est - state.t)
    return state.curve.with_points(state.curve.points * lam), float(s)


def invariant_monitor(record: TrajectoryRecord, topo0: TopologyInfo,
                      T_est: float | None = None) -> dict:
    """Residuals of the conservation laws along a recorded trajectory.

    area_law_residual   max_t |A(t) - A(0) + 2 pi (rot + (n-1) wind0) t|
    eps_law_residual    max relative deviation of eps_t from eps0/(1 - eps0 t)
                        over t <= 0.9/eps0 (None for non-monotone seeds)
    hamiltonian_residual max_t |2 pi (rot + (n-1) wind0) - A(t)/(T_est - t)|,
                        needs T_est (None otherwise)
    preservation_violations  samples where a t=0 predicate was later lost
    """
    t = record.asarray("times")
    area = record.asarray("area")
    P = topo0.class_sum(record.n)
    out = {"area_law_residual": None, "eps_law_residual": None,
           "hamiltonian_residual": None, "preservation_violations": []}
    if P is not None:
        out["area_law_residual"] = float(np.max(np.abs(area - area[0] + TWO_PI * P * t)))
    eps0 = topo0.eps_monotone
    if eps0 is not None and P is not None:
        sel = eps0 * t <= 0.9
        eps_t = np.array([e if e is not None else np.nan for e in record.eps_t])[sel]
        pred = eps0 / (1.0 - eps0 * t[sel])
        good = ~np.isnan(eps_t)
        if np.any(good):
            out["eps_law_residual"] = float(np.max(np.abs(eps_t[good] / pred[good] - 1.0)))
    if T_est is not None and P is not None:
        sel = t < T_est
        out["hamiltonian_residual"] = float(
            np.max(np.abs(TWO_PI * P - area[sel] / (T_est - t[sel]))))
    for name in FLAG_NAMES:
        vals = record.flags[name]
        if vals and vals[0]:
            for i, v in enumerate(vals):
                if not v:
                    out["preservation_violations"].append({"sample": i, "property": name,
                                                           "t": float(t[i])})
    return out


def evolution_residuals(state: FlowState, config: FlowConfig) -> dict:
    """Check the evolution equations by central time differences.

    Two fixed-dt steps (no resampling) give states at t, t+dt, t+2dt with
    node correspondence by index; left sides are centered differences at
    t+dt, right sides are evaluated spatially there.
    """
    z0 = state.curve.z
    h = TWO_PI / len(z0)
    c = chord_lengths(z0)
    fld_probe = geometry(state.curve, config.n)
    maxf = float(np.abs(fld_probe.f).max())
    dt = config.cfl * c.min() ** 2 / (1.0 + maxf * c.min())
    if maxf * dt >= 0.1:
        raise InvalidSpec("state too close to blow-up for residual checks")

    states = [state]
    for _ in range(2):
        states.append(step(states[-1], config, dt=dt, resample=False))
    f0 = fld_probe
    f1 = geometry(states[1].curve, config.n)
    f2 = geometry(states[2].curve, config.n)
    n = config.n
    inv2dt = 1.0 / (2.0 * dt)

    lhs_k = (f2.k - f0.k) * inv2dt
    lhs_f = (f2.f - f0.f) * inv2dt
    lhs_r = (f2.r - f0.r) * inv2dt
    lhs_ne = (f2.nu_dot_er - f0.nu_dot_er) * inv2dt
    lhs_dmu = (f2.dmu - f0.dmu) * inv2dt

    g1 = f1
    lap_f = g1.lap(g1.f)
    grad_f = g1.grad(g1.f)
    grad_r = g1.grad(g1.r)
    grad_ne = g1.grad(g1.nu_dot_er)
    lap_r = g1.lap(g1.r)
    lap_ne = g1.lap(g1.nu_dot_er)
    r = g1.r
    ne = g1.nu_dot_er
    k = g1.k
    fd = g1.f

    rhs_k = lap_f + fd * k ** 2
    rhs_f = lap_f + (n - 1) / r * grad_f * grad_r \
        + fd * (k ** 2 + (n - 1) / r ** 2 * (2.0 * ne ** 2 - 1.0))
    rhs_r = lap_r + (n - 1) / r * grad_r ** 2 - ne ** 2 / r - (n - 1) / r
    rhs_ne = lap_ne + (n - 1) / r * grad_ne * grad_r \
        - 2.0 * n * ne / r ** 2 * (1.0 - ne ** 2) + (k - ne / r) ** 2 * ne
    rhs_dmu = -k * fd * g1.dmu

    area = []
    for s, f_ in zip(states, (f0, f1, f2)):
        zz = s.curve.z
        zdn = zz.real * f_.nu.real + zz.imag * f_.nu.imag
        area.append(0.5 * np.sum(zdn * f_.dmu))
    lhs_dA = (area[2] - area[0]) * inv2dt
    rhs_dA = -float(np.sum(g1.f * g1.dmu))

    return {
        "res_k": float(np.max(np.abs(lhs_k - rhs_k))),
        "res_f": float(np.max(np.abs(lhs_f - rhs_f))),
        "res_r": float(np.max(np.abs(lhs_r - rhs_r))),
        "res_nuer": float(np.max(np.abs(lhs_ne - rhs_ne))),
        "res_dmu": float(np.max(np.abs(lhs_dmu - rhs_dmu))),
        "res_dA": float(abs(lhs_dA - rhs_dA)),
    }
