"""Integrability evidence: dimension estimates, regions, confinement, integrals.

The chaos test is operational rather than visual: the box-counting dimension
of a section's point cloud, classified against fixed thresholds.  Region
handling rasterizes the sign of a potential's angular factor and flood-fills
the connected component around a seed; samplers, confinement checks and the
critical-point search all work inside such a component.
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .charts import PhaseState, SingularityError, wrap_angle
from .dynamics import fiber_momenta, integrals

# default box sizes, as fractions of the bounding box
DEFAULT_SCALES = tuple(np.geomspace(0.25, 1.0 / 128.0, 8))

MIN_SECTION_POINTS = 100
DIMENSION_THRESHOLDS = (1.3, 1.6)


@dataclass(frozen=True)
class SectionVerdict:
    """Outcome of classifying one section point cloud."""

    label: str
    dimension: float
    n_points: int
    scale_range: tuple


def box_counting_dimension(points, scales=None):
    """Least-squares box-counting dimension of a planar point cloud.

    The cloud is rescaled to its unit bounding box; each scale is a box size
    as a fraction of that box.  Callers must supply at least two distinct
    points and at least three scales spanning a decade (the default grid
    does).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    if scales is None:
        scales = DEFAULT_SCALES
    scales = np.asarray(sorted(scales, reverse=True), dtype=float)
    if len(scales) < 3 or scales[0] / scales[-1] < 10.0 - 1e-9:
        raise ValueError("need at least three scales spanning a decade")
    mins = pts.min(axis=0)
    span = pts.max(axis=0) - mins
    if np.all(span < 1e-12):
        raise ValueError("need at least two distinct points")
    span = np.where(span < 1e-12, 1.0, span)
    unit = (pts - mins) / span

    counts = []
    for s in scales:
        n = max(1, int(round(1.0 / s)))
        ij = np.minimum((unit * n).astype(int), n - 1)
        counts.append(len(np.unique(ij[:, 0] * n + ij[:, 1])))
    slope = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)[0]
    return float(slope)


def classification_scales(n_points):
    """Scale grid matched to the cloud size.

    The fine end is capped near sqrt(n/3) boxes per side: finer grids have
    fewer points than cells, the count saturates at the number of points, and
    the fitted slope collapses toward log(n)/log(1/s) regardless of geometry.
    The coarse end stretches to 1/2 so the grid always spans a decade.
    """
    fine = max(20, min(128, int(math.sqrt(n_points / 3.0))))
    return tuple(np.geomspace(0.5, 1.0 / fine, 8))


def classify_section(points, thresholds=DIMENSION_THRESHOLDS,
                     min_points=MIN_SECTION_POINTS):
    """Label a section point cloud curve-like, scattered, or in between."""
    pts = getattr(points, "points", points)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n < min_points or len(np.unique(pts, axis=0)) < 2:
        return SectionVerdict("insufficient", float("nan"), n, (0.0, 0.0))
    scales = classification_scales(n)
    dim = box_counting_dimension(pts, scales)
    lo, hi = thresholds
    if dim <= lo:
        label = "curve-like"
    elif dim >= hi:
        label = "scattered"
    else:
        label = "ambiguous-curve-like"
    return SectionVerdict(label, dim, n, (scales[0], scales[-1]))


# ---------------------------------------------------------------------------
# regions of constant angular-factor sign

_REGION_BOUNDS = {
    "sphere": ((1e-3, math.pi - 1e-3), (-math.pi, math.pi)),
    "plane-polar": ((0.02, 4.0), (-math.pi, math.pi)),
    "plane-cartesian": ((-4.0, 4.0), (-4.0, 4.0)),
}


@dataclass(frozen=True)
class RegionReport:
    """Connected sign-constant component of an angular factor, rasterized."""

    chart_kind: str
    bounds: tuple
    resolution: int
    sign: int
    seed: tuple
    mask: np.ndarray
    fraction: float

    def cell_center(self, i, j):
        (alo, ahi), (blo, bhi) = self.bounds
        n = self.resolution
        return (alo + (i + 0.5) * (ahi - alo) / n,
                blo + (j + 0.5) * (bhi - blo) / n)


def find_region(spec, seed, resolution=512, bounds=None):
    """Flood-fill the sign-constant component of spec's angular factor at seed.

    The raster is resolution x resolution over per-chart default bounds; an
    angle axis spanning the full circle is treated as periodic.
    """
    factor = spec.region_factor
    if factor is None:
        raise ValueError(f"{spec.name} has no angular factor to rasterize")
    chart = spec.chart
    if len(chart.coords) != 2:
        raise ValueError("region rasterization works on two-coordinate charts")
    if bounds is None:
        bounds = _REGION_BOUNDS[chart.kind]
    (alo, ahi), (blo, bhi) = bounds
    n = resolution

    # sign at cell centers and at cell corners: a cell joins the region only
    # when all five agree, otherwise two components touching at a point (the
    # zero set crossing itself inside one cell) can merge through the raster
    da = (ahi - alo) / n
    db = (bhi - blo) / n

    def sgn(value):
        if not math.isfinite(value) or value == 0.0:
            return 0
        return 1 if value > 0.0 else -1

    corner = np.zeros((n + 1, n + 1), dtype=np.int8)
    for i in range(n + 1):
        a = alo + i * da
        for j in range(n + 1):
            corner[i, j] = sgn(factor(a, blo + j * db))
    signs = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        a = alo + (i + 0.5) * da
        for j in range(n):
            s = sgn(factor(a, blo + (j + 0.5) * db))
            if (s != 0 and corner[i, j] == s and corner[i + 1, j] == s
                    and corner[i, j + 1] == s and corner[i + 1, j + 1] == s):
                signs[i, j] = s

    f_seed = factor(*seed)
    if f_seed == 0.0 or not math.isfinite(f_seed):
        raise ValueError(f"seed {seed} sits on the zero set of the factor")
    target = 1 if f_seed > 0.0 else -1
    i0 = int((seed[0] - alo) / (ahi - alo) * n)
    j0 = int((seed[1] - blo) / (bhi - blo) * n)
    if not (0 <= i0 < n and 0 <= j0 < n):
        raise ValueError(f"seed {seed} is outside the raster bounds {bounds}")
    if signs[i0, j0] != target:
        # seed cell center may sit on the wrong side of a nearby border
        hits = np.argwhere(signs == target)
        if not len(hits):
            raise ValueError("no raster cell matches the seed's sign")
        d2 = (hits[:, 0] - i0) ** 2 + (hits[:, 1] - j0) ** 2
        i0, j0 = map(int, hits[np.argmin(d2)])

    wrap_a = chart.coords[0] in chart.angles and (ahi - alo) >= 2 * math.pi - 1e-9
    wrap_b = chart.coords[1] in chart.angles and (bhi - blo) >= 2 * math.pi - 1e-9

    mask = np.zeros((n, n), dtype=bool)
    mask[i0, j0] = True
    queue = deque([(i0, j0)])
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii, jj = i + di, j + dj
            if wrap_a:
                ii %= n
            elif not 0 <= ii < n:
                continue
            if wrap_b:
                jj %= n
            elif not 0 <= jj < n:
                continue
            if not mask[ii, jj] and signs[ii, jj] == target:
                mask[ii, jj] = True
                queue.append((ii, jj))

    return RegionReport(chart_kind=chart.kind, bounds=tuple(map(tuple, bounds)),
                        resolution=n, sign=target, seed=tuple(seed), mask=mask,
                        fraction=float(mask.sum()) / (n * n))


def sample_initial_conditions(sys, region, energy, n, seed=0):
    """Draw n states uniformly over the region at the given total energy.

    Positions are uniform over the region's raster cells (rejecting points
    where the potential already exceeds the energy); the remaining kinetic
    energy is split by a uniformly random momentum direction.
    """
    if sys.dof != 2:
        raise ValueError("the 2D sampler needs a two-degree system")
    rng = np.random.default_rng(seed)
    cells = np.argwhere(region.mask)
    if not len(cells):
        raise ValueError("empty region")
    (alo, ahi), (blo, bhi) = region.bounds
    da = (ahi - alo) / region.resolution
    db = (bhi - blo) / region.resolution
    zero = (0.0, 0.0)
    states = []
    attempts = 0
    while len(states) < n:
        attempts += 1
        if attempts > 200 * n + 1000:
            raise ValueError(
                f"could not place {n} states below energy {energy}; the "
                "region may be energetically closed")
        i, j = cells[rng.integers(len(cells))]
        q = (alo + (i + rng.random()) * da, blo + (j + rng.random()) * db)
        try:
            v = sys.hamiltonian(q, zero)
        except SingularityError:
            continue
        if not math.isfinite(v) or v >= energy:
            continue
        kinetic = energy - v
        chi = rng.uniform(0.0, 2.0 * math.pi)
        m = math.sqrt(2.0 * kinetic)
        p = fiber_momenta(sys.chart, q, (m * math.cos(chi), m * math.sin(chi)))
        states.append(PhaseState(chart=sys.chart, q=q, p=p))
    return states


def confinement_check(orbit, spec, expected_sign=None):
    """True when the angular-factor sign never changes along the orbit."""
    factor = spec.region_factor
    if factor is None:
        raise ValueError(f"{spec.name} has no angular factor to check")
    coords = orbit.system.chart.coords
    nfac = factor.__code__.co_argcount
    # a lifted system carries the factor of its sphere base on (theta, psi)
    offset = len(coords) - nfac
    dof = len(coords)
    sign0 = expected_sign
    for row in orbit.states:
        f = factor(*row[offset:dof])
        s = 0 if f == 0.0 else (1 if f > 0.0 else -1)
        if sign0 is None:
            sign0 = s
        elif s != sign0:
            return False
    return True


# ---------------------------------------------------------------------------
# critical points

@dataclass(frozen=True)
class CriticalPoint:
    location: tuple
    value: float
    kind: str
    grad_norm: float


def _fd_hessian(grad, q, h=1e-5):
    d = len(q)
    H = np.zeros((d, d))
    for i in range(d):
        plus = list(q)
        minus = list(q)
        plus[i] += h
        minus[i] -= h
        gp = grad(*plus)
        gm = grad(*minus)
        H[i] = [(a - b) / (2.0 * h) for a, b in zip(gp, gm)]
    return 0.5 * (H + H.T)


def _hessian_kind(H):
    eig = np.linalg.eigvalsh(H)
    tol = 1e-6 * max(1.0, float(np.max(np.abs(eig))))
    if np.all(eig > tol):
        return "min"
    if np.all(eig < -tol):
        return "max"
    if np.any(np.abs(eig) <= tol):
        return "degenerate"
    return "saddle"


def find_critical_points(V, region_seed, multistart_count=24, resolution=256):
    """Damped-Newton search for grad V = 0 inside one region.

    Starts are spread over the region's raster cells; converged points are
    kept only when the gradient norm is at most 1e-9, deduplicated within
    1e-6, and typed by a finite-difference Hessian of the analytic gradient.
    """
    region = find_region(V, region_seed, resolution=resolution)
    factor = V.region_factor
    cells = np.argwhere(region.mask)
    picks = np.unique(np.linspace(0, len(cells) - 1, multistart_count,
                                  dtype=int))
    (alo, ahi), (blo, bhi) = region.bounds
    is_angle = [c in V.chart.angles for c in V.chart.coords]

    def separation(a, b):
        # a region wrapping an angle axis reaches one point from both ends
        return max(abs(wrap_angle(x - y)) if ang else abs(x - y)
                   for x, y, ang in zip(a, b, is_angle))

    def inside(q):
        if not (alo < q[0] < ahi and blo < q[1] < bhi):
            return False
        f = factor(*q)
        return f != 0.0 and (f > 0.0) == (region.sign > 0)

    found = []
    for idx in picks:
        q = np.array(region.cell_center(*cells[idx]))
        try:
            g = np.array(V.gradient(*q))
        except SingularityError:
            continue
        ok = False
        for _ in range(60):
            gnorm = float(np.max(np.abs(g)))
            if gnorm <= 1e-11:
                ok = True
                break
            try:
                H = _fd_hessian(V.gradient, q)
                step = np.linalg.solve(H, -g)
            except (SingularityError, np.linalg.LinAlgError):
                step = -g
            lam = 1.0
            moved = False
            while lam >= 1.0 / 1024.0:
                q_new = q + lam * step
                if inside(q_new):
                    try:
                        g_new = np.array(V.gradient(*q_new))
                    except SingularityError:
                        lam *= 0.5
                        continue
                    if np.max(np.abs(g_new)) < gnorm:
                        q, g = q_new, g_new
                        moved = True
                        break
                lam *= 0.5
            if not moved:
                break
        if not ok:
            continue
        if any(separation(q, c.location) <= 1e-6 for c in found):
            continue
        H = _fd_hessian(V.gradient, q)
        found.append(CriticalPoint(location=tuple(float(x) for x in q),
                                   value=float(V.evaluate(*q)),
                                   kind=_hessian_kind(H),
                                   grad_norm=float(np.max(np.abs(g)))))
    found.sort(key=lambda c: c.location)
    return found


# ---------------------------------------------------------------------------
# first-integral drift

def integral_drift(orbit, which):
    """Max |I(t) - I(0)| / (1 + |I(0)|) of a named integral along a trace."""
    table = integrals(orbit.system)
    try:
        fn = table[which]
    except KeyError:
        raise KeyError(f"system exposes {sorted(table)}, not {which!r}") from None
    d = orbit.dof
    rows = orbit.states
    i0 = fn(tuple(rows[0][:d]), tuple(rows[0][d:]))
    denom = 1.0 + abs(i0)
    worst = 0.0
    for row in rows[1:]:
        val = fn(tuple(row[:d]), tuple(row[d:]))
        worst = max(worst, abs(val - i0) / denom)
    return worst
