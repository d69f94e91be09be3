"""Surface-of-section extraction from integrated orbits.

A section is defined by a trigger coordinate crossing a fixed value in a
chosen direction.  Crossings are located between consecutive trace samples by
sign change of the (angle-aware) residual, then refined by bisecting the step
length and re-integrating single steps from the bracketing sample, so the
refined point lies on the same numerical trajectory as the trace itself.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .charts import PhaseState, SingularityError, STATE_GUARD, wrap_angle
from .integrators import integrate, rk4_step

_REFINE_TOL = 1e-13
_REFINE_MAX = 80


@dataclass(frozen=True)
class SectionSpec:
    """Trigger coordinate, crossing value, direction and recording plane.

    direction +1 keeps crossings with rising trigger, -1 falling, 0 both.
    record names the two variables written out per crossing; None picks the
    first non-trigger coordinate and its momentum.
    """

    trigger: str
    value: float
    direction: int = 1
    record: tuple = None


@dataclass
class SectionPointSet:
    """Crossings of one orbit (or one merged pair of time directions)."""

    spec: SectionSpec
    record: tuple
    ic_id: int
    energy: float
    times: np.ndarray
    points: np.ndarray
    discarded: int = 0
    flag: str = None
    message: str = ""
    steps: int = 0

    @property
    def n(self):
        return len(self.times)


def resolve_record(chart, spec):
    """The pair of variables a section records, applying the default rule."""
    if spec.record is not None:
        rec = tuple(spec.record)
        if len(rec) != 2:
            raise ValueError(f"record needs exactly two variables, got {rec}")
        return rec
    for c in chart.coords:
        if c != spec.trigger:
            return (c, "p_" + c)
    raise ValueError("no recordable coordinate besides the trigger")


def _residual_fn(chart, spec):
    if spec.trigger not in chart.coords:
        raise ValueError(f"trigger {spec.trigger!r} is not a coordinate of "
                         f"chart {chart.kind}")
    i = chart.coords.index(spec.trigger)
    value = spec.value
    if spec.trigger in chart.angles:
        return i, lambda x: wrap_angle(x - value), True
    return i, lambda x: x - value, False


def refine_crossing(sys, s_before, s_after, spec):
    """Bisect the step between two bracketing states down to the crossing.

    Each trial re-integrates a single fixed step of shrinking length from
    s_before, so the returned state sits on the discrete trajectory rather
    than on a secant through it.  The bracket must actually straddle the
    trigger value.
    """
    chart = sys.chart
    i, resid, _ = _residual_fn(chart, spec)
    y = s_before.q + s_before.p
    t0 = s_before.t
    g0 = resid(y[i])
    h = s_after.t - t0
    if h == 0.0:
        raise ValueError("bracketing states coincide in time")
    lo, hi = 0.0, h
    y_best = s_after.q + s_after.p
    h_best = h
    positive = g0 > 0.0
    for _ in range(_REFINE_MAX):
        hm = 0.5 * (lo + hi)
        ym = rk4_step(sys.rhs, t0, y, hm)
        gm = resid(ym[i])
        y_best, h_best = ym, hm
        if abs(gm) <= _REFINE_TOL:
            break
        if (gm > 0.0) == positive:
            lo = hm
        else:
            hi = hm
    d = sys.dof
    return PhaseState(chart=chart, q=tuple(y_best[:d]), p=tuple(y_best[d:]),
                      t=t0 + h_best)


def section_from_trace(trace, spec):
    """Extract, refine and filter the crossings of an already-run trace."""
    sys = trace.system
    chart = sys.chart
    i, resid, is_angle = _residual_fn(chart, spec)
    record = resolve_record(chart, spec)
    d = sys.dof

    col = trace.states[:, i]
    g = col - spec.value
    if is_angle:
        g = g - 2.0 * math.pi * np.floor((g + math.pi) / (2.0 * math.pi))

    times = []
    points = []
    discarded = 0

    def admit(state):
        nonlocal discarded
        if spec.direction:
            deriv = sys.rhs(state.t, state.q + state.p)[i]
            if deriv * spec.direction <= 0.0:
                return
        if chart.violation(state.q, STATE_GUARD) is not None:
            discarded += 1
            return
        times.append(state.t)
        points.append((state.var(record[0]), state.var(record[1])))

    exact = np.nonzero(g == 0.0)[0]
    for idx in exact:
        try:
            admit(trace.state_at(int(idx)))
        except SingularityError:
            discarded += 1

    mask = g[:-1] * g[1:] < 0.0
    if is_angle:
        # a sign change through the +-pi branch cut is not a crossing
        mask &= np.abs(g[:-1]) + np.abs(g[1:]) < math.pi
    for idx in np.nonzero(mask)[0]:
        idx = int(idx)
        try:
            state = refine_crossing(sys, trace.state_at(idx),
                                    trace.state_at(idx + 1), spec)
            admit(state)
        except SingularityError:
            discarded += 1

    return SectionPointSet(
        spec=spec, record=record, ic_id=0, energy=trace.energy0,
        times=np.asarray(times, dtype=float),
        points=np.asarray(points, dtype=float).reshape(len(times), 2),
        discarded=discarded, flag=trace.flag, message=trace.message,
        steps=trace.steps)


def compute_section(sys, s0, cfg, spec):
    """Integrate from s0 under cfg and return the section point set."""
    trace = integrate(sys, s0, cfg)
    return section_from_trace(trace, spec)


def compute_section_both(sys, s0, cfg, spec, ic_id=0):
    """Sections over both time directions from one state, merged.

    cfg.t1 gives the (positive) horizon used both forward and backward.
    A crossing exactly at the start time is reported once.
    """
    horizon = abs(cfg.t1)
    fwd = compute_section(sys, s0, replace(cfg, t0=0.0, t1=horizon), spec)
    bwd = compute_section(sys, s0, replace(cfg, t0=0.0, t1=-horizon), spec)

    bw_times, bw_points = bwd.times, bwd.points
    if fwd.n and bwd.n and 0.0 in fwd.times and 0.0 in bw_times:
        keep = bw_times != 0.0
        bw_times, bw_points = bw_times[keep], bw_points[keep]

    times = np.concatenate([bw_times, fwd.times])
    points = np.concatenate([bw_points.reshape(len(bw_times), 2),
                             fwd.points.reshape(fwd.n, 2)])
    order = np.argsort(times, kind="stable")
    flag = fwd.flag or bwd.flag
    message = fwd.message if fwd.flag else bwd.message
    return SectionPointSet(
        spec=spec, record=fwd.record, ic_id=ic_id, energy=fwd.energy,
        times=times[order], points=points[order],
        discarded=fwd.discarded + bwd.discarded,
        flag=flag, message=message, steps=fwd.steps + bwd.steps)


def write_section_csv(path, point_sets):
    """Write crossings as delimited text: ic_id, t_cross, rec1, rec2, energy.

    Rows are sorted by (ic_id, t_cross) so merged sweeps are reproducible.
    """
    rows = []
    for ps in point_sets:
        for t, (a, b) in zip(ps.times, ps.points):
            rows.append((ps.ic_id, t, a, b, ps.energy))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ic_id,t_cross,rec1,rec2,energy\n")
        for ic, t, a, b, e in rows:
            fh.write(f"{ic},{t:.17g},{a:.17g},{b:.17g},{e:.17g}\n")
