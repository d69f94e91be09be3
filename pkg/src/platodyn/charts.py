"""Coordinate charts, phase states, and the four-points-on-a-line correspondence.

Six charts cover every configuration space used by the catalog: the plane in
polar or Cartesian coordinates, the unit sphere, Euclidean 3-space in spherical
or Cartesian coordinates, and Euclidean 4-space in cylindrical coordinates
(u, rho, theta, psi).  The cylindrical chart doubles as the reduced description
of four interacting points on a line through an orthogonal (Jacobi) change of
variables, materialized here as an explicit 4x4 matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np


class SingularityError(ValueError):
    """A state or input sits on (or too close to) a singular set."""


class ChartGuardError(SingularityError):
    """State within the guard distance of a chart's coordinate singularity."""


# Dynamics rejects states closer than this to rho = 0, r = 0 or theta in {0, pi}.
STATE_GUARD = 1e-8


@dataclass(frozen=True)
class Chart:
    """A named coordinate chart.

    coords lists position coordinate names in canonical order; the conjugate
    momentum of coordinate "x" is named "p_x".  angles wrap modulo 2*pi,
    positive coordinates must stay strictly positive, and open_interval maps a
    coordinate to strict bounds (theta lives in (0, pi)).
    """

    kind: str
    coords: tuple
    angles: frozenset = frozenset()
    positive: frozenset = frozenset()
    open_interval: dict = field(default_factory=dict)

    @property
    def momenta(self):
        return tuple("p_" + c for c in self.coords)

    @property
    def dof(self):
        return len(self.coords)

    def violation(self, q, guard=STATE_GUARD):
        """Message naming the coordinate that breaches the guard, else None."""
        for name, value in zip(self.coords, q):
            if name in self.positive and value < guard:
                return f"{name}={value!r} inside guard of {name}=0"
            if name in self.open_interval:
                lo, hi = self.open_interval[name]
                if value < lo + guard or value > hi - guard:
                    return f"{name}={value!r} inside guard of ({lo}, {hi})"
        return None


CHARTS = {
    "plane-polar": Chart("plane-polar", ("r", "psi"),
                         angles=frozenset({"psi"}), positive=frozenset({"r"})),
    "plane-cartesian": Chart("plane-cartesian", ("x", "y")),
    "sphere": Chart("sphere", ("theta", "psi"),
                    angles=frozenset({"psi"}),
                    open_interval={"theta": (0.0, math.pi)}),
    "euclid3-spherical": Chart("euclid3-spherical", ("rho", "theta", "psi"),
                               angles=frozenset({"psi"}),
                               positive=frozenset({"rho"}),
                               open_interval={"theta": (0.0, math.pi)}),
    "euclid3-cartesian": Chart("euclid3-cartesian", ("x", "y", "z")),
    "euclid4-cylindrical": Chart("euclid4-cylindrical", ("u", "rho", "theta", "psi"),
                                 angles=frozenset({"psi"}),
                                 positive=frozenset({"rho"}),
                                 open_interval={"theta": (0.0, math.pi)}),
}


def chart(kind):
    try:
        return CHARTS[kind]
    except KeyError:
        raise KeyError(f"unknown chart {kind!r}; know {sorted(CHARTS)}") from None


@dataclass(frozen=True)
class PhaseState:
    """Point of phase space: chart, positions q, conjugate momenta p, time t."""

    chart: Chart
    q: tuple
    p: tuple
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        n = len(self.chart.coords)
        if len(self.q) != n or len(self.p) != n:
            raise ValueError(f"chart {self.chart.kind} needs {n} coordinates, "
                             f"got q[{len(self.q)}], p[{len(self.p)}]")

    def var(self, name):
        """Value of one phase variable by name ("theta", "p_psi", ...)."""
        try:
            if name.startswith("p_"):
                return self.p[self.chart.coords.index(name[2:])]
            return self.q[self.chart.coords.index(name)]
        except ValueError:
            raise KeyError(f"chart {self.chart.kind} has no variable "
                           f"{name!r}") from None

    def names(self):
        return self.chart.coords + self.chart.momenta


def spherical_to_cartesian(rho, theta, psi):
    """(rho, theta, psi) -> (x, y, z) with x = rho sin(theta) cos(psi), etc."""
    s = math.sin(theta)
    return (rho * s * math.cos(psi), rho * s * math.sin(psi), rho * math.cos(theta))


# Orthogonal change of variables for four points x^1..x^4 on a line:
#   u^j = (x^1 + ... + x^j - j x^(j+1)) / sqrt(j (j+1))   for j = 1..3
#   u^4 = (x^1 + x^2 + x^3 + x^4) / 2
# Row j is the j-th relative mode; the last row is the center-of-mass mode.
JACOBI_MATRIX = np.array([
    [1 / math.sqrt(2), -1 / math.sqrt(2), 0.0, 0.0],
    [1 / math.sqrt(6), 1 / math.sqrt(6), -2 / math.sqrt(6), 0.0],
    [1 / math.sqrt(12), 1 / math.sqrt(12), 1 / math.sqrt(12), -3 / math.sqrt(12)],
    [0.5, 0.5, 0.5, 0.5],
])


def jacobi_forward(x):
    """Positions of four collinear points -> orthogonal mode tuple (u1..u4)."""
    return tuple(JACOBI_MATRIX @ np.asarray(x, dtype=float))


def jacobi_inverse(u):
    """Mode tuple -> positions; the matrix is orthogonal so the inverse is its transpose."""
    return tuple(JACOBI_MATRIX.T @ np.asarray(u, dtype=float))


def r4_state_to_line(state):
    """Positions of the four equivalent collinear points for a cylindrical-chart state.

    The chart coordinates map to modes as u1 = x, u2 = y, u3 = z, u4 = u with
    (x, y, z) = spherical_to_cartesian(rho, theta, psi).  The center-of-mass
    identity x^1 + x^2 + x^3 + x^4 = 2u follows from the last matrix row.
    """
    if state.chart.kind != "euclid4-cylindrical":
        raise ValueError(f"need euclid4-cylindrical chart, got {state.chart.kind}")
    u, rho, theta, psi = state.q
    x, y, z = spherical_to_cartesian(rho, theta, psi)
    return jacobi_inverse((x, y, z, u))


def wrap_angle(a):
    """Reduce an angle to (-pi, pi]."""
    w = math.fmod(a, 2 * math.pi)
    if w > math.pi:
        w -= 2 * math.pi
    elif w <= -math.pi:
        w += 2 * math.pi
    return w
