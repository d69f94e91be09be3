"""Natural Hamiltonian systems over the catalog charts.

A system couples a kinetic form (determined by the chart) with a potential
entry.  Four levels are supported:

  H1-sphere    H = (p_theta^2 + p_psi^2/sin^2 theta)/2 + V(theta, psi)
  H2D-plane    H = (p_r^2 + p_psi^2/r^2)/2 + V(r, psi)  (or Cartesian kinetic)
  H3-euclid3   H = p_rho^2/2 + H1/rho^2 + (k/2) rho^2   (or Cartesian kinetic + V)
  H4-euclid4   H = p_u^2/2 + H3

A sphere entry can be lifted to H3 or H4 by supplying the harmonic coefficient
k; the confined W_* catalog entries unfold back to their sphere base so that
the angular block is shared.  The right-hand sides are written in plain scalar
arithmetic: they sit in the innermost integration loop.
"""

import math
from dataclasses import dataclass

from .charts import CHARTS, ChartGuardError, PhaseState
from .potentials import PotentialSingularityError

LEVELS = ("H1-sphere", "H2D-plane", "H3-euclid3", "H4-euclid4")

# metric denominators below this are treated as a chart failure inside the
# right-hand side, before any guarded step-level check can run
_METRIC_FLOOR = 1e-12


@dataclass(frozen=True)
class HamiltonianSystem:
    """A flow: chart, level, potential content, and compiled callables."""

    level: str
    chart: object
    potential: object
    angular: object
    k: float
    hamiltonian: callable
    rhs: callable

    @property
    def dof(self):
        return len(self.chart.coords)

    def energy(self, state):
        q, p = _split(state, self.dof)
        return self.hamiltonian(q, p)


def _split(state, dof):
    if isinstance(state, PhaseState):
        return state.q, state.p
    q = tuple(state[:dof])
    p = tuple(state[dof:2 * dof])
    return q, p


def _metric(value, name):
    if abs(value) < _METRIC_FLOOR:
        raise ChartGuardError(f"metric factor {name} vanished ({value!r})")
    return value


def _finite_potential(v):
    if not math.isfinite(v):
        raise PotentialSingularityError("potential infinite on the singular set")
    return v


def _infer_level(kind):
    if kind == "sphere":
        return "H1-sphere"
    if kind.startswith("plane"):
        return "H2D-plane"
    if kind.startswith("euclid3"):
        return "H3-euclid3"
    return "H4-euclid4"


def natural_system(spec, level=None, k=0.0):
    """Build the canonical flow for a potential entry.

    level defaults to the entry's own chart.  A sphere entry given level
    "H3-euclid3" or "H4-euclid4" is lifted radially with harmonic coefficient
    k; a confined lift entry (one with a base) unfolds to its base and the
    trap strength stored in its parameters.
    """
    if spec.hamiltonian is not None:
        raise ValueError(
            f"{spec.name} is stored as a verbatim full Hamiltonian (no 1/2 on "
            "the kinetic terms) and has no canonical-flow form here; evaluate "
            "its hamiltonian field directly or use its sphere reduction")
    kind = spec.chart.kind
    if level is None:
        level = _infer_level(kind)
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; know {LEVELS}")

    if level == "H1-sphere":
        if kind != "sphere":
            raise ValueError(f"H1-sphere needs a sphere entry, got {kind}")
        return _sphere_system(spec)
    if level == "H2D-plane":
        if kind == "plane-polar":
            return _polar_system(spec)
        if kind == "plane-cartesian":
            return _cartesian_system(spec, level)
        raise ValueError(f"H2D-plane needs a plane entry, got {kind}")
    # radial levels
    if kind == "euclid3-cartesian":
        if level != "H3-euclid3":
            raise ValueError(f"{kind} supports only H3-euclid3, not {level}")
        return _cartesian_system(spec, level)
    if kind == "euclid3-spherical":
        if spec.base is None:
            raise ValueError(
                f"{spec.name} has no sphere base to unfold; lift a sphere "
                "entry instead")
        return _radial_system(spec.base, level, float(spec.params["k"]))
    if kind == "sphere":
        return _radial_system(spec, level, float(k))
    raise ValueError(f"cannot build {level} from a {kind} entry")


def _sphere_system(spec):
    V, dV = spec.evaluate, spec.gradient

    def hamiltonian(q, p):
        theta, psi = q
        p_th, p_ps = p
        s = _metric(math.sin(theta), "sin(theta)")
        return 0.5 * (p_th * p_th + (p_ps / s) ** 2) + V(theta, psi)

    def rhs(t, y):
        theta, psi, p_th, p_ps = y
        s = _metric(math.sin(theta), "sin(theta)")
        g_th, g_ps = dV(theta, psi)
        inv2 = 1.0 / (s * s)
        return (p_th,
                p_ps * inv2,
                p_ps * p_ps * math.cos(theta) * inv2 / s - g_th,
                -g_ps)

    return HamiltonianSystem("H1-sphere", spec.chart, spec, spec, 0.0,
                             hamiltonian, rhs)


def _polar_system(spec):
    V, dV = spec.evaluate, spec.gradient

    def hamiltonian(q, p):
        r, psi = q
        p_r, p_ps = p
        rr = _metric(r, "r")
        return 0.5 * (p_r * p_r + (p_ps / rr) ** 2) + V(r, psi)

    def rhs(t, y):
        r, psi, p_r, p_ps = y
        rr = _metric(r, "r")
        g_r, g_ps = dV(r, psi)
        inv2 = 1.0 / (rr * rr)
        return (p_r,
                p_ps * inv2,
                p_ps * p_ps * inv2 / rr - g_r,
                -g_ps)

    return HamiltonianSystem("H2D-plane", spec.chart, spec, None, 0.0,
                             hamiltonian, rhs)


def _cartesian_system(spec, level):
    V, dV = spec.evaluate, spec.gradient
    n = len(spec.chart.coords)

    def hamiltonian(q, p):
        return 0.5 * sum(pi * pi for pi in p) + V(*q)

    def rhs(t, y):
        q = y[:n]
        grad = dV(*q)
        return tuple(y[n:2 * n]) + tuple(-g for g in grad)

    return HamiltonianSystem(level, spec.chart, spec, None, 0.0,
                             hamiltonian, rhs)


def _radial_system(angular, level, k):
    """Lift a sphere entry: H3 on (rho, theta, psi) or H4 on (u, rho, theta, psi)."""
    V, dV = angular.evaluate, angular.gradient
    four = level == "H4-euclid4"
    chart = CHARTS["euclid4-cylindrical" if four else "euclid3-spherical"]

    def hamiltonian(q, p):
        if four:
            u, rho, theta, psi = q
            p_u, p_rho, p_th, p_ps = p
        else:
            rho, theta, psi = q
            p_rho, p_th, p_ps = p
        rr = _metric(rho, "rho")
        s = _metric(math.sin(theta), "sin(theta)")
        h1 = 0.5 * (p_th * p_th + (p_ps / s) ** 2) + V(theta, psi)
        h3 = 0.5 * p_rho * p_rho + h1 / (rr * rr) + 0.5 * k * rr * rr
        return h3 + 0.5 * p_u * p_u if four else h3

    def rhs(t, y):
        if four:
            u, rho, theta, psi, p_u, p_rho, p_th, p_ps = y
        else:
            rho, theta, psi, p_rho, p_th, p_ps = y
        rr = _metric(rho, "rho")
        s = _metric(math.sin(theta), "sin(theta)")
        v = _finite_potential(V(theta, psi))
        g_th, g_ps = dV(theta, psi)
        ir2 = 1.0 / (rr * rr)
        is2 = 1.0 / (s * s)
        ang_kin = p_th * p_th + p_ps * p_ps * is2
        core = (p_rho,
                p_th * ir2,
                p_ps * ir2 * is2,
                (ang_kin + 2.0 * v) * ir2 / rr - k * rr,
                (p_ps * p_ps * math.cos(theta) * is2 / s - g_th) * ir2,
                -g_ps * ir2)
        if four:
            # H4 never depends on u, so p_u is exactly constant for every k
            return (p_u,) + core[:3] + (0.0,) + core[3:]
        return core

    return HamiltonianSystem(level, chart, angular, angular, k,
                             hamiltonian, rhs)


# ---------------------------------------------------------------------------
# conserved quantities

def integrals(sys):
    """Named first-integral candidates for a system, as callables of (q, p).

    "H" is always present.  Radial lifts expose "H1" (the angular block) and,
    at the four dimensional level, "p_u" and "H6"; H6 is a genuine integral
    only at k = 0 and is exposed for every k so its failure can be measured.
    "Q4" = p_psi^2 + 2 F(psi) appears whenever the potential carries an
    azimuthal profile, "p_psi" whenever it is axisymmetric.
    """
    table = {"H": sys.hamiltonian}
    src = sys.angular if sys.angular is not None else sys.potential
    coords = sys.chart.coords
    four = sys.level == "H4-euclid4"
    radial = sys.level == "H3-euclid3" and "rho" in coords

    if (radial or four) and sys.angular is not None:
        V = sys.angular.evaluate
        off = 1 if four else 0

        def h1(q, p):
            theta, psi = q[off + 1], q[off + 2]
            p_th, p_ps = p[off + 1], p[off + 2]
            s = math.sin(theta)
            return 0.5 * (p_th * p_th + (p_ps / s) ** 2) + V(theta, psi)

        table["H1"] = h1

    if four:
        table["p_u"] = lambda q, p: p[0]
        V = sys.angular.evaluate

        def h6(q, p):
            u, rho, theta, psi = q
            p_u, p_rho, p_th, p_ps = p
            s = math.sin(theta)
            h1v = 0.5 * (p_th * p_th + (p_ps / s) ** 2) + V(theta, psi)
            ell = u * p_rho - rho * p_u
            return 0.5 * ell * ell + (u * u) / (rho * rho) * h1v

        table["H6"] = h6

    if src.F is not None and "psi" in coords:
        i_psi = coords.index("psi")
        F = src.F

        def q4(q, p):
            return p[i_psi] ** 2 + 2.0 * F(q[i_psi])

        table["Q4"] = q4

    if src.axisymmetric and "psi" in coords:
        i_psi = coords.index("psi")
        table["p_psi"] = lambda q, p: p[i_psi]

    return table


def radial_consistency(orbit, h2, h3, k):
    """Max residual of p_rho^2 = 2 h3 - k rho^2 - 2 h2 / rho^2 along an orbit.

    h2 is the conserved angular block (H1 value) and h3 the radial energy;
    for a four dimensional orbit pass h3 = H - p_u^2/2.
    """
    coords = orbit.system.chart.coords
    if "rho" not in coords:
        raise ValueError("radial consistency needs a flow with a rho coordinate")
    i = coords.index("rho")
    dof = len(coords)
    worst = 0.0
    for row in orbit.states:
        rho = row[i]
        p_rho = row[dof + i]
        worst = max(worst, abs(p_rho * p_rho
                               - (2.0 * h3 - k * rho * rho - 2.0 * h2 / (rho * rho))))
    return worst


# ---------------------------------------------------------------------------
# initial conditions

def fiber_momenta(chart, q, unit):
    """Map orthonormal-frame momentum components to canonical momenta at q.

    unit holds the components in an orthonormal frame of the kinetic metric,
    so kinetic energy comes out as sum(unit^2)/2 regardless of chart.
    """
    kind = chart.kind
    if kind in ("plane-cartesian", "euclid3-cartesian"):
        return tuple(unit)
    if kind == "sphere":
        theta = q[0]
        return (unit[0], unit[1] * math.sin(theta))
    if kind == "plane-polar":
        return (unit[0], unit[1] * q[0])
    if kind == "euclid3-spherical":
        rho, theta = q[0], q[1]
        return (unit[0], unit[1] * rho, unit[2] * rho * math.sin(theta))
    if kind == "euclid4-cylindrical":
        rho, theta = q[1], q[2]
        return (unit[0], unit[1], unit[2] * rho, unit[3] * rho * math.sin(theta))
    raise ValueError(f"no kinetic frame for chart {kind}")


_DEFAULT_DIRECTION = (0.8, 0.5, 0.3, 0.2)


def default_state(spec, level=None, k=0.0, energy=None, direction=None):
    """A ready-to-integrate (system, state) pair for a catalog entry.

    Position comes from the entry's default start (lifted with rho = 1 and
    u = 0 when needed); kinetic energy is energy - V there, defaulting to
    half the local potential scale; direction fixes how that energy is split
    across the orthonormal momentum components.
    """
    sys = natural_system(spec, level=level, k=k)
    q0 = spec.default_start
    if q0 is None:
        raise ValueError(f"{spec.name} has no default start")
    if len(q0) != sys.dof:
        if sys.dof == len(q0) + 1 and sys.level == "H3-euclid3":
            q0 = (1.0,) + tuple(q0)
        elif sys.dof == len(q0) + 2 and sys.level == "H4-euclid4":
            q0 = (0.0, 1.0) + tuple(q0)
        elif sys.level == "H4-euclid4" and len(q0) == sys.dof - 1:
            q0 = (0.0,) + tuple(q0)
        else:
            raise ValueError(f"default start of {spec.name} does not fit {sys.level}")
    v0 = sys.hamiltonian(q0, (0.0,) * sys.dof)
    if not math.isfinite(v0):
        raise ValueError(f"default start of {spec.name} sits on the singular set")
    if energy is None:
        kinetic = 0.5 * max(1.0, abs(v0))
    else:
        kinetic = energy - v0
        if kinetic <= 0.0:
            raise ValueError(
                f"energy {energy} is below the potential value {v0:.6g} at the "
                "default start")
    if direction is None:
        direction = _DEFAULT_DIRECTION[:sys.dof]
    norm = math.sqrt(sum(d * d for d in direction))
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    scale = math.sqrt(2.0 * kinetic) / norm
    unit = tuple(scale * d for d in direction)
    p0 = fiber_momenta(sys.chart, q0, unit)
    return sys, PhaseState(chart=sys.chart, q=q0, p=p0)
