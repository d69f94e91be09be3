"""Fixed-step RK4 and embedded adaptive integration with safety aborts.

Both integrators work on plain tuples in scalar arithmetic.  Every accepted
step is checked three ways: the chart guard (coordinates pulling within
guard_eps of a chart boundary), energy drift against the initial value, and
singularity errors raised from inside the right-hand side.  A tripped check
stops the run and stamps the trace with a flag instead of raising, so partial
traces stay usable and reportable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .charts import ChartGuardError, PhaseState, SingularityError

_DRIFT_FLOOR = 1e-30


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    method is "rk4" (fixed step h) or "adaptive" (embedded pair started at h,
    controlled by the relative/absolute tolerance pair).  t0 = None starts
    from the state's own time.  drift_abort is the relative energy drift that
    stops a run; guard_eps the chart-boundary margin.
    """

    method: str = "rk4"
    h: float = 0.002
    t0: float = None
    t1: float = 50.0
    rtol: float = 1e-10
    atol: float = 1e-10
    drift_abort: float = 1e-5
    guard_eps: float = 1e-6
    max_steps: int = 5_000_000
    record_every: int = 1


@dataclass
class OrbitTrace:
    """Recorded orbit: times, phase rows (q then p), and per-sample energy."""

    system: object
    times: np.ndarray
    states: np.ndarray
    hamiltonians: np.ndarray
    energy0: float
    rel_drift: float
    steps: int
    flag: str = None
    message: str = ""

    @property
    def dof(self):
        return self.states.shape[1] // 2

    def state_at(self, index):
        row = self.states[index]
        d = self.dof
        return PhaseState(chart=self.system.chart, q=tuple(row[:d]),
                          p=tuple(row[d:]), t=float(self.times[index]))

    @property
    def final_state(self):
        return self.state_at(-1)


def rk4_step(rhs, t, y, h):
    """One classical Runge-Kutta step."""
    k1 = rhs(t, y)
    y2 = tuple(a + 0.5 * h * b for a, b in zip(y, k1))
    k2 = rhs(t + 0.5 * h, y2)
    y3 = tuple(a + 0.5 * h * b for a, b in zip(y, k2))
    k3 = rhs(t + 0.5 * h, y3)
    y4 = tuple(a + h * b for a, b in zip(y, k3))
    k4 = rhs(t + h, y4)
    sixth = h / 6.0
    return tuple(a + sixth * (b1 + 2.0 * (b2 + b3) + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


# Fehlberg embedded 4(5) pair.  The fourth-order solution is the one
# propagated, so the embedded difference estimates the error actually made.
_A = (
    (),
    (0.25,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_C = (0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5)
_B4 = (25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0)
_B5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0,
       2.0 / 55.0)


def rkf45_step(rhs, t, y, h):
    """One Fehlberg step: returns (fourth-order solution, error estimate)."""
    k = [rhs(t, y)]
    for i in range(1, 6):
        row = _A[i]
        yi = tuple(a + h * sum(row[j] * k[j][m] for j in range(i))
                   for m, a in enumerate(y))
        k.append(rhs(t + _C[i] * h, yi))
    y4 = tuple(a + h * sum(_B4[j] * k[j][m] for j in range(6))
               for m, a in enumerate(y))
    err = tuple(h * sum((_B5[j] - _B4[j]) * k[j][m] for j in range(6))
                for m in range(len(y)))
    return y4, err


def _error_ratio(err, y_old, y_new, rtol, atol, h):
    # error-per-unit-time control: the budget scales with the step taken, so
    # accumulated error over a fixed horizon tracks the tolerance itself
    worst = 0.0
    width = abs(h)
    for e, a, b in zip(err, y_old, y_new):
        scale = width * (atol + rtol * max(abs(a), abs(b)))
        worst = max(worst, abs(e) / scale)
    return worst


def integrate(sys, state, cfg):
    """Run one orbit and return its trace.

    The run ends at cfg.t1, or earlier with a flag: "guard-tripped" when the
    chart guard fires or a metric factor vanishes, "singular" when the
    potential's singular set is hit (or the state stops being finite, or the
    adaptive step underflows), "drift-exceeded" when relative energy drift
    passes cfg.drift_abort.  Backward runs just need t1 < t0.
    """
    dof = sys.dof
    if isinstance(state, PhaseState):
        t = state.t if cfg.t0 is None else cfg.t0
        y = state.q + state.p
    else:
        t = 0.0 if cfg.t0 is None else cfg.t0
        y = tuple(float(v) for v in state)
    if len(y) != 2 * dof:
        raise ValueError(f"state has {len(y)} entries, system needs {2 * dof}")

    h0 = sys.hamiltonian(y[:dof], y[dof:])
    if not math.isfinite(h0):
        raise SingularityError("initial state has non-finite energy")
    denom = max(abs(h0), _DRIFT_FLOOR)

    t1 = cfg.t1
    forward = t1 >= t
    h = abs(cfg.h) if forward else -abs(cfg.h)
    adaptive = cfg.method == "adaptive"
    if cfg.method not in ("rk4", "adaptive"):
        raise ValueError(f"unknown method {cfg.method!r}")

    times = [t]
    rows = [y]
    hams = [h0]
    flag = None
    message = ""
    worst_drift = 0.0
    steps = 0
    rhs = sys.rhs
    chart = sys.chart
    span = abs(t1 - t) or 1.0

    while (t < t1) if forward else (t > t1):
        if steps >= cfg.max_steps:
            flag = "singular"
            message = f"step budget {cfg.max_steps} exhausted at t={t:.6g}"
            break
        remaining = t1 - t
        if abs(h) > abs(remaining):
            h = remaining
        try:
            if adaptive:
                y_new, err = rkf45_step(rhs, t, y, h)
                ratio = _error_ratio(err, y, y_new, cfg.rtol, cfg.atol, h)
                if ratio > 1.0:
                    if abs(h) < 1e-14 * span:
                        flag = "singular"
                        message = f"step size underflow at t={t:.6g}"
                        break
                    h *= max(0.2, 0.9 * ratio ** -0.25)
                    continue
                t_new = t + h
                grow = 5.0 if ratio == 0.0 else min(5.0, max(0.2, 0.9 * ratio ** -0.25))
                h *= grow
            else:
                y_new = rk4_step(rhs, t, y, h)
                t_new = t + h
        except ChartGuardError as exc:
            flag = "guard-tripped"
            message = f"{exc} at t={t:.6g}"
            break
        except (SingularityError, OverflowError, ZeroDivisionError) as exc:
            flag = "singular"
            message = f"{exc} at t={t:.6g}"
            break

        if not all(math.isfinite(v) for v in y_new):
            flag = "singular"
            message = f"state left the finite range at t={t_new:.6g}"
            break
        violation = chart.violation(y_new[:dof], cfg.guard_eps)
        if violation is not None:
            flag = "guard-tripped"
            message = f"{violation} at t={t_new:.6g}"
            break
        try:
            h_now = sys.hamiltonian(y_new[:dof], y_new[dof:])
        except (SingularityError, OverflowError, ZeroDivisionError) as exc:
            flag = "singular"
            message = f"{exc} at t={t_new:.6g}"
            break
        drift = abs(h_now - h0) / denom
        worst_drift = max(worst_drift, drift)
        t, y = t_new, y_new
        steps += 1
        if drift > cfg.drift_abort:
            times.append(t)
            rows.append(y)
            hams.append(h_now)
            flag = "drift-exceeded"
            message = (f"relative energy drift {drift:.3e} passed "
                       f"{cfg.drift_abort:.1e} at t={t:.6g}")
            break
        if steps % cfg.record_every == 0 or (t >= t1 if forward else t <= t1):
            times.append(t)
            rows.append(y)
            hams.append(h_now)

    return OrbitTrace(system=sys, times=np.asarray(times, dtype=float),
                      states=np.asarray(rows, dtype=float),
                      hamiltonians=np.asarray(hams, dtype=float),
                      energy0=h0, rel_drift=worst_drift, steps=steps,
                      flag=flag, message=message)


def write_orbit_csv(orbit, path):
    """Write a trace as delimited text: t, coordinates, momenta, H, rel_drift."""
    chart = orbit.system.chart
    header = ["t", *chart.coords, *("p_" + c for c in chart.coords), "H",
              "rel_drift"]
    denom = max(abs(orbit.energy0), _DRIFT_FLOOR)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for t, row, ham in zip(orbit.times, orbit.states, orbit.hamiltonians):
            drift = abs(ham - orbit.energy0) / denom
            cells = [f"{t:.17g}", *(f"{v:.17g}" for v in row),
                     f"{ham:.17g}", f"{drift:.17g}"]
            fh.write(",".join(cells) + "\n")
