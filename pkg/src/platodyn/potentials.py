"""Catalog of symmetric potentials and the invariant polynomials behind them.

The catalog collects every potential the package studies: the Calogero three
body potential and its dihedral reductions, the four polyhedral potentials on
the sphere built as reciprocals of invariant-polynomial angular factors, the
six-center cuboctahedral potential, the trigonometric product families on the
plane, in space, and on the sphere, the F(psi)/sin^2(theta) family, a verbatim
full-Hamiltonian entry, and harmonically confined radial lifts.

Every entry carries an analytic gradient (validated against finite differences
by the test suite), a textual description of its singular set, and where it
applies a signed angular factor whose zero lines bound the dynamically
separated regions.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .charts import CHARTS, SingularityError, spherical_to_cartesian

CATALOG_VERSION = "1.0"

# Denominators smaller than this produce infinity markers (and gradient errors).
SINGULAR_TOL = 1e-14


class PotentialSingularityError(SingularityError):
    """Input within the singularity tolerance of a potential's singular set."""


def _reciprocal(den):
    # signed-infinity marker instead of overflow when the denominator vanishes
    if abs(den) <= SINGULAR_TOL:
        return math.copysign(math.inf, den)
    return 1.0 / den


def _require(den, name, q):
    if abs(den) <= SINGULAR_TOL:
        raise PotentialSingularityError(f"{name} singular at {tuple(q)}")


# ---------------------------------------------------------------------------
# invariant polynomials

@dataclass(frozen=True)
class InvariantPolynomial:
    """Homogeneous polynomial on R^3 fixed by one of the rotation groups."""

    name: str
    degree: int
    group: str
    evaluate: callable


def _poly_tetra(x, y, z):
    return x * y * z


def _poly_octa(x, y, z):
    w = x * y * z
    return w * w


def _poly_tetra_octa(x, y, z):
    return x * x * y * y + x * x * z * z + y * y * z * z


def _poly_icosa(x, y, z):
    quartic = (x**4 - x**2 * z**2 + z**4 + 2 * (x**3 * z - x * z**3)
               + 5 * (y**4 - y**2 * z**2) + 10 * (x * y**2 * z - x**2 * y**2))
    return -z * (2 * x + z) * quartic


POLYNOMIALS = {
    "T": InvariantPolynomial("T", 3, "T12", _poly_tetra),
    "O": InvariantPolynomial("O", 6, "O24", _poly_octa),
    "I": InvariantPolynomial("I", 6, "I60", _poly_icosa),
    "TO": InvariantPolynomial("TO", 4, "O24", _poly_tetra_octa),
}


def angular_factor(poly, theta, psi):
    """Restriction of a homogeneous polynomial to the unit sphere.

    Because the polynomial is homogeneous of its stated degree, this equals
    P(x)/rho^degree at any radius.
    """
    return poly.evaluate(*spherical_to_cartesian(1.0, theta, psi))


# ---------------------------------------------------------------------------
# potential specifications

@dataclass(frozen=True)
class PotentialSpec:
    """One catalog entry.

    evaluate maps unpacked chart coordinates to an extended real (an infinity
    marker signals the singular set); gradient returns the analytic partials
    and raises PotentialSingularityError on the singular set.  region_factor,
    when present, is a signed function of the chart coordinates whose zero set
    bounds the dynamically separated regions; F/dF are set for entries of the
    form F(psi)/(metric factor) and feed the quadratic first integral
    p_psi^2 + 2 F(psi).  base links a confined radial lift back to the entry it
    was built from.
    """

    name: str
    chart: object
    params: dict
    evaluate: callable
    gradient: callable
    symmetry: str = None
    singular_set: str = ""
    factor_sign: int = 1
    polynomial: str = None
    region_factor: callable = None
    axisymmetric: bool = False
    F: callable = None
    dF: callable = None
    hamiltonian: callable = None
    base: object = None
    default_start: tuple = None
    notes: str = ""


def eval_potential(spec, q):
    """Potential value at coordinates q (tuple), infinity marker on the singular set."""
    return spec.evaluate(*q)


def grad_potential(spec, q):
    """Analytic gradient at q; raises PotentialSingularityError on the singular set."""
    return spec.gradient(*q)


# ---------------------------------------------------------------------------
# sphere entries built from invariant polynomials

def _make_v_t():
    """Tetrahedral potential: reciprocal of the angular factor of T = xyz.

    V(theta, psi) = 1 / (sin^2(theta) cos(theta) cos(psi) sin(psi)).
    """
    def evaluate(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        return _reciprocal(s * s * c * math.cos(psi) * math.sin(psi))

    def gradient(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        sp, cp = math.sin(psi), math.cos(psi)
        f = s * s * c * cp * sp
        _require(f, "V_T", (theta, psi))
        w = -1.0 / (f * f)
        return (w * s * (2 * c * c - s * s) * cp * sp,
                w * s * s * c * math.cos(2 * psi))

    def factor(theta, psi):
        s = math.sin(theta)
        return s * s * math.cos(theta) * math.cos(psi) * math.sin(psi)

    return PotentialSpec(
        name="V_T", chart=CHARTS["sphere"], params={},
        evaluate=evaluate, gradient=gradient,
        symmetry="T12", polynomial="T", region_factor=factor,
        singular_set="coordinate great circles x=0, y=0, z=0 (eight spherical octants)",
        default_start=(math.atan(math.sqrt(2.0)), math.pi / 4),
    )


def _make_v_o():
    """Octahedral potential: V_O = V_T^2 = 1 / (x y z)^2 on the unit sphere."""
    def evaluate(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        f = s * s * c * math.cos(psi) * math.sin(psi)
        return _reciprocal(f * f)

    def gradient(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        sp, cp = math.sin(psi), math.cos(psi)
        f = s * s * c * cp * sp
        _require(f, "V_O", (theta, psi))
        w = -2.0 / (f * f * f)
        return (w * s * (2 * c * c - s * s) * cp * sp,
                w * s * s * c * math.cos(2 * psi))

    def factor(theta, psi):
        # signed generator of the (nonnegative) squared factor; its zero lines
        # are the region borders, and its sign tells the octants apart
        s = math.sin(theta)
        return s * s * math.cos(theta) * math.cos(psi) * math.sin(psi)

    return PotentialSpec(
        name="V_O", chart=CHARTS["sphere"], params={},
        evaluate=evaluate, gradient=gradient,
        symmetry="O24", polynomial="O", region_factor=factor,
        singular_set="coordinate great circles x=0, y=0, z=0 (squared reciprocal)",
        default_start=(math.atan(math.sqrt(2.0)), math.pi / 4),
    )


def _icosa_bracket(theta, psi):
    # azimuthal quintic written out term by term, exactly as transcribed
    s, c = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(psi), math.cos(psi)
    term = 32 * cp * sp**4 - 24 * cp * sp**2 + 2 * cp
    return c**5 - 5 * s**2 * c**3 + 5 * s**4 * c + s**5 * term


def _make_v_i():
    """Icosahedral potential: V_I = -1 / (cos(theta) * B(theta, psi)) with

        B = cos^5 - 5 sin^2 cos^3 + 5 sin^4 cos
            + sin^5 (32 cos(psi) sin^4(psi) - 24 cos(psi) sin^2(psi) + 2 cos(psi)),

    all trig of theta unless marked.  -cos(theta) B equals the restriction of
    the degree-6 icosahedral polynomial to the unit sphere; the factorization
    test cross-checks the two transcriptions against each other.
    """
    def evaluate(theta, psi):
        return _reciprocal(-math.cos(theta) * _icosa_bracket(theta, psi))

    def gradient(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        sp, cp = math.sin(psi), math.cos(psi)
        term = 32 * cp * sp**4 - 24 * cp * sp**2 + 2 * cp
        dterm = -32 * sp**5 + 128 * cp**2 * sp**3 + 24 * sp**3 - 48 * cp**2 * sp - 2 * sp
        B = c**5 - 5 * s**2 * c**3 + 5 * s**4 * c + s**5 * term
        B_th = -15 * s * c**4 + 35 * s**3 * c**2 - 5 * s**5 + 5 * s**4 * c * term
        f = -c * B
        _require(f, "V_I", (theta, psi))
        f_th = s * B - c * B_th
        f_ps = -c * s**5 * dterm
        w = -1.0 / (f * f)
        return (w * f_th, w * f_ps)

    def factor(theta, psi):
        return -math.cos(theta) * _icosa_bracket(theta, psi)

    return PotentialSpec(
        name="V_I", chart=CHARTS["sphere"], params={},
        evaluate=evaluate, gradient=gradient,
        symmetry="I60", polynomial="I", region_factor=factor,
        singular_set="six great circles polar to the icosahedral vertex axes "
                     "(icosidodecahedral tiling: 20 triangles and 12 pentagons)",
        # center of a triangular well: f peaks at 5/27 there, so V bottoms
        # out at 27/5
        default_start=(math.atan(3.0 - math.sqrt(5.0)), math.pi / 5),
    )


def _make_v_to():
    """Reciprocal of the angular factor of TO = x^2 y^2 + x^2 z^2 + y^2 z^2.

    The factor sin^4(theta) cos^2(psi) sin^2(psi) + sin^2(theta) cos^2(theta)
    is nonnegative and vanishes only at six isolated points, so nothing
    confines the motion: this is the catalog's chaotic reference.
    """
    def evaluate(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        sp, cp = math.sin(psi), math.cos(psi)
        return _reciprocal(s**4 * cp * cp * sp * sp + s * s * c * c)

    def gradient(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        sp, cp = math.sin(psi), math.cos(psi)
        a = cp * cp * sp * sp
        f = s**4 * a + s * s * c * c
        _require(f, "V_TO", (theta, psi))
        f_th = 4 * s**3 * c * a + 2 * s * c * (c * c - s * s)
        f_ps = s**4 * 0.5 * math.sin(4 * psi)
        w = -1.0 / (f * f)
        return (w * f_th, w * f_ps)

    def factor(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        sp, cp = math.sin(psi), math.cos(psi)
        return s**4 * cp * cp * sp * sp + s * s * c * c

    return PotentialSpec(
        name="V_TO", chart=CHARTS["sphere"], params={},
        evaluate=evaluate, gradient=gradient,
        symmetry="O24", polynomial="TO", region_factor=factor,
        singular_set="six isolated infinite maxima: both poles and the four "
                     "equator points psi = n pi/2",
        default_start=(0.955317, math.pi / 4),
    )


def _make_v_co():
    """Six-center cuboctahedral potential.

    Evaluated in a form multiplied through by powers of cos(theta), which is
    algebraically identical to the tangent form

        9 (8 - tan^2)^2 / (2 A^2) + 12 / A + 9 / (4 sin^2(theta) (1 + cos(6 psi)))

    with A = 3 tan^2(theta) - 8 + tan^3(theta) cos(3 psi), but stays finite at
    theta = pi/2 where the tangent overflows.  Its three-fold axis lies along
    z, so the octahedral symmetry is in a different frame than the stored O24
    group; no group pairing is declared.
    """
    def evaluate(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        A = 3 * s * s * c - 8 * c**3 + s**3 * math.cos(3 * psi)
        C6 = 1.0 + math.cos(6 * psi)
        if abs(A) <= SINGULAR_TOL or abs(s * s * C6) <= SINGULAR_TOL:
            return math.inf
        n1 = c * c * (8 * c * c - s * s) ** 2
        return 4.5 * n1 / (A * A) + 12 * c**3 / A + 9.0 / (4 * s * s * C6)

    def gradient(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        c3, s3 = math.cos(3 * psi), math.sin(3 * psi)
        A = 3 * s * s * c - 8 * c**3 + s**3 * c3
        C6 = 1.0 + math.cos(6 * psi)
        _require(A, "V_CO", (theta, psi))
        _require(s * s * C6, "V_CO", (theta, psi))
        A_th = 6 * s * c * c - 3 * s**3 + 24 * c * c * s + 3 * s * s * c * c3
        A_ps = -3 * s**3 * s3
        q8 = 8 * c * c - s * s
        n1 = c * c * q8 * q8
        n1_th = -2 * s * c * q8 * (26 * c * c - s * s)
        g_th = (4.5 * (n1_th * A - 2 * n1 * A_th) / A**3
                + (-36 * c * c * s * A - 12 * c**3 * A_th) / (A * A)
                - 9 * c / (2 * s**3 * C6))
        g_ps = (-9 * n1 * A_ps / A**3
                - 12 * c**3 * A_ps / (A * A)
                + 27 * math.sin(6 * psi) / (2 * s * s * C6 * C6))
        return (g_th, g_ps)

    return PotentialSpec(
        name="V_CO", chart=CHARTS["sphere"], params={},
        evaluate=evaluate, gradient=gradient,
        singular_set="walls 3 tan^2(theta) - 8 + tan^3(theta) cos(3 psi) = 0, "
                     "the lines cos(6 psi) = -1, and both poles",
        default_start=(2.2, 0.0),
    )


# ---------------------------------------------------------------------------
# Calogero and dihedral entries

def _make_ca1():
    """Three-body inverse-square potential on a line.

    V(x, y, z) = 1/(x - y)^2 + 1/(y - z)^2 + 1/(z - x)^2 for the three particle
    positions; chart coordinates are the positions themselves.
    """
    def evaluate(x, y, z):
        d12, d23, d31 = x - y, y - z, z - x
        if min(abs(d12), abs(d23), abs(d31)) <= SINGULAR_TOL:
            return math.inf
        return 1.0 / d12**2 + 1.0 / d23**2 + 1.0 / d31**2

    def gradient(x, y, z):
        d12, d23, d31 = x - y, y - z, z - x
        for d in (d12, d23, d31):
            _require(d, "Ca1", (x, y, z))
        return (-2.0 / d12**3 + 2.0 / d31**3,
                2.0 / d12**3 - 2.0 / d23**3,
                2.0 / d23**3 - 2.0 / d31**3)

    def factor(x, y, z):
        return (x - y) * (y - z) * (z - x)

    return PotentialSpec(
        name="Ca1", chart=CHARTS["euclid3-cartesian"], params={},
        evaluate=evaluate, gradient=gradient, region_factor=factor,
        singular_set="pairwise collisions x=y, y=z, z=x",
        default_start=(-1.0, 0.0, 1.0),
    )


def _dihedral_entry(name, k, trap=0.0):
    # V = 1/(r^2 sin^2(k psi)) [+ (trap/2) r^2], F(psi) = 1/sin^2(k psi)
    k = int(k)

    def F(psi):
        return _reciprocal(math.sin(k * psi) ** 2)

    def dF(psi):
        sk = math.sin(k * psi)
        _require(sk, name + ".F", (psi,))
        return -2.0 * k * math.cos(k * psi) / sk**3

    def evaluate(r, psi):
        v = _reciprocal(r * r * math.sin(k * psi) ** 2)
        return v + 0.5 * trap * r * r if trap else v

    def gradient(r, psi):
        sk = math.sin(k * psi)
        _require(r * r * sk * sk, name, (r, psi))
        g_r = -2.0 / (r**3 * sk * sk)
        if trap:
            g_r += trap * r
        return (g_r, -2.0 * k * math.cos(k * psi) / (r * r * sk**3))

    def factor(r, psi):
        return math.sin(k * psi)

    # "k" is the dihedral order for the bare family, the trap strength for
    # the confined entry (whose angular order is fixed at 3)
    params = {"k": trap} if trap else ({"k": k} if name == "dihedral" else {})
    return PotentialSpec(
        name=name, chart=CHARTS["plane-polar"], params=params,
        evaluate=evaluate, gradient=gradient,
        symmetry=f"dihedral({k})", region_factor=factor, F=F, dF=dF,
        singular_set=f"origin r = 0 and the {2 * k} spokes sin({k} psi) = 0",
        default_start=(1.0, math.pi / (2 * k)),
    )


def _make_ca2():
    """Calogero potential after center-of-mass and radius reduction.

    V(r, psi) = 1 / (r^2 sin^2(3 psi)): the planar shadow of the three body
    inverse-square interaction, with hexagonal (dihedral k=3) symmetry.
    """
    return _dihedral_entry("Ca2", 3)


def _make_dihedral(k=3):
    """Dihedral family V = 1/(r^2 sin^2(k psi)) for integer k."""
    if int(k) != k or int(k) < 1:
        raise ValueError(f"dihedral k must be a positive integer, got {k!r}")
    spec = _dihedral_entry("dihedral", int(k))
    return spec


def _make_w_ca2_harmonic(k=1.0):
    """Harmonically confined Ca2: W = 1/(r^2 sin^2(3 psi)) + (k/2) r^2.

    The added radial term keeps orbits bounded and leaves the quadratic
    integral p_psi^2 + 2/sin^2(3 psi) exactly conserved.
    """
    spec = _dihedral_entry("W_Ca2_harmonic", 3, trap=float(k))
    return replace(spec, base=_make_ca2(),
                   singular_set="origin r = 0 and the six spokes sin(3 psi) = 0",
                   default_start=(1.0, math.pi / 6))


# ---------------------------------------------------------------------------
# trigonometric product families

def _int_exponent(name, value):
    if int(value) != value or int(value) < 0:
        raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
    return int(value)


def _make_v_1(a=2, b=2, h=1.0, k=1.0):
    """Plane-Cartesian product family V = 1 / (sin^a(h x) cos^b(k y)).

    Periodic in both coordinates; translation by pi/h in x is a symmetry for
    even a, by 2 pi/h for odd a.
    """
    a = _int_exponent("a", a)
    b = _int_exponent("b", b)
    h, k = float(h), float(k)

    def evaluate(x, y):
        return _reciprocal(math.sin(h * x) ** a * math.cos(k * y) ** b)

    def gradient(x, y):
        sx, cy = math.sin(h * x), math.cos(k * y)
        den = sx**a * cy**b
        _require(den, "V_1", (x, y))
        v = 1.0 / den
        gx = -v * a * h * math.cos(h * x) / sx if a else 0.0
        gy = v * b * k * math.sin(k * y) / cy if b else 0.0
        return (gx, gy)

    def factor(x, y):
        return math.sin(h * x) * math.cos(k * y)

    return PotentialSpec(
        name="V_1", chart=CHARTS["plane-cartesian"],
        params={"a": a, "b": b, "h": h, "k": k},
        evaluate=evaluate, gradient=gradient, region_factor=factor,
        singular_set=f"grid lines sin({h} x) = 0 and cos({k} y) = 0",
        default_start=(math.pi / (2 * h), 0.0),
    )


def _make_w_1(a=2, b=2, c=2, h=1.0, k=1.0, l=1.0):
    """Euclidean 3-space product family W = 1 / (sin^a(h x) sin^b(k y) sin^c(l z))."""
    a = _int_exponent("a", a)
    b = _int_exponent("b", b)
    c = _int_exponent("c", c)
    h, k, l = float(h), float(k), float(l)

    def evaluate(x, y, z):
        return _reciprocal(math.sin(h * x) ** a * math.sin(k * y) ** b
                           * math.sin(l * z) ** c)

    def gradient(x, y, z):
        sx, sy, sz = math.sin(h * x), math.sin(k * y), math.sin(l * z)
        den = sx**a * sy**b * sz**c
        _require(den, "W_1", (x, y, z))
        v = 1.0 / den
        return (-v * a * h * math.cos(h * x) / sx if a else 0.0,
                -v * b * k * math.cos(k * y) / sy if b else 0.0,
                -v * c * l * math.cos(l * z) / sz if c else 0.0)

    def factor(x, y, z):
        return math.sin(h * x) * math.sin(k * y) * math.sin(l * z)

    return PotentialSpec(
        name="W_1", chart=CHARTS["euclid3-cartesian"],
        params={"a": a, "b": b, "c": c, "h": h, "k": k, "l": l},
        evaluate=evaluate, gradient=gradient, region_factor=factor,
        singular_set=f"planes sin({h} x) = 0, sin({k} y) = 0, sin({l} z) = 0",
        default_start=(math.pi / (2 * h), math.pi / (2 * k), math.pi / (2 * l)),
    )


def _make_v_2(a=2, b=2, h=1.0, k=1.0):
    """Sphere product family V = 1 / (sin^a(h theta) sin^b(k psi)).

    With b = 0 the potential is axisymmetric and p_psi is conserved; with
    a = 2, h = 1 the entry is of the F(psi)/sin^2(theta) form and carries the
    quadratic integral p_psi^2 + 2 F(psi).
    """
    a = _int_exponent("a", a)
    b = _int_exponent("b", b)
    h, k = float(h), float(k)

    def evaluate(theta, psi):
        return _reciprocal(math.sin(h * theta) ** a * math.sin(k * psi) ** b)

    def gradient(theta, psi):
        st, sp = math.sin(h * theta), math.sin(k * psi)
        den = st**a * sp**b
        _require(den, "V_2", (theta, psi))
        v = 1.0 / den
        return (-v * a * h * math.cos(h * theta) / st if a else 0.0,
                -v * b * k * math.cos(k * psi) / sp if b else 0.0)

    if b:
        def factor(theta, psi):
            return math.sin(h * theta) * math.sin(k * psi)
    else:
        def factor(theta, psi):
            return math.sin(h * theta)

    F = dF = None
    if a == 2 and h == 1.0:
        def F(psi):
            return _reciprocal(math.sin(k * psi) ** b) if b else 1.0

        def dF(psi):
            if not b:
                return 0.0
            sp = math.sin(k * psi)
            _require(sp, "V_2.F", (psi,))
            return -b * k * math.cos(k * psi) / sp ** (b + 1)

    return PotentialSpec(
        name="V_2", chart=CHARTS["sphere"],
        params={"a": a, "b": b, "h": h, "k": k},
        evaluate=evaluate, gradient=gradient, region_factor=factor,
        axisymmetric=(b == 0), F=F, dF=dF,
        singular_set=f"circles sin({h} theta) = 0 and meridians sin({k} psi) = 0",
        default_start=(math.pi / 2, math.pi / (2 * k) if b else 1.0),
    )


def _make_v_3(a=2, b=2, h=1.0, k=1.0):
    """Plane-polar product family V = 1 / (sin^a(h r) cos^b(k psi))."""
    a = _int_exponent("a", a)
    b = _int_exponent("b", b)
    h, k = float(h), float(k)

    def evaluate(r, psi):
        return _reciprocal(math.sin(h * r) ** a * math.cos(k * psi) ** b)

    def gradient(r, psi):
        sr, cp = math.sin(h * r), math.cos(k * psi)
        den = sr**a * cp**b
        _require(den, "V_3", (r, psi))
        v = 1.0 / den
        return (-v * a * h * math.cos(h * r) / sr if a else 0.0,
                v * b * k * math.sin(k * psi) / cp if b else 0.0)

    def factor(r, psi):
        return math.sin(h * r) * math.cos(k * psi)

    return PotentialSpec(
        name="V_3", chart=CHARTS["plane-polar"],
        params={"a": a, "b": b, "h": h, "k": k},
        evaluate=evaluate, gradient=gradient, region_factor=factor,
        singular_set=f"rings sin({h} r) = 0 and rays cos({k} psi) = 0",
        default_start=(math.pi / (2 * h), 0.0),
    )


# ---------------------------------------------------------------------------
# the F(psi)/sin^2(theta) family

def _v4_profile(F, dF, m):
    """Resolve the azimuthal profile of a V_4 entry.

    Accepts either a pair of callables (F, dF) or the built-in profile
    1/sin^2(m psi); returns (F, dF, params, region_factor, axisymmetric).
    """
    if callable(F):
        if not callable(dF):
            raise ValueError("custom F requires a matching dF callable")
        return F, dF, {"F": "custom"}, None, False
    if F in (None, "inv-sin2"):
        m = int(m)

        def F_(psi):
            return _reciprocal(math.sin(m * psi) ** 2)

        def dF_(psi):
            sm = math.sin(m * psi)
            _require(sm, "V_4.F", (psi,))
            return -2.0 * m * math.cos(m * psi) / sm**3

        def factor(theta, psi):
            return math.sin(m * psi)

        return F_, dF_, {"F": "inv-sin2", "m": m}, factor, False
    if F == "const":
        value = float(m)

        def F_(psi):
            return value

        def dF_(psi):
            return 0.0

        return F_, dF_, {"F": "const", "m": value}, None, True
    raise ValueError(f"unknown F profile {F!r}")


def _make_v_4(F=None, dF=None, m=3):
    """Family V = F(psi) / sin^2(theta) for a pluggable azimuthal profile F.

    Every member conserves Q4 = p_psi^2 + 2 F(psi) exactly.  The default
    profile is F = 1/sin^2(3 psi); F="const" with m=c gives the axisymmetric
    member V = c/sin^2(theta).
    """
    F_, dF_, params, factor, axisym = _v4_profile(F, dF, m)

    def evaluate(theta, psi):
        s = math.sin(theta)
        fv = F_(psi)
        if not math.isfinite(fv):
            return fv
        if abs(s * s) <= SINGULAR_TOL:
            return math.copysign(math.inf, fv)
        return fv / (s * s)

    def gradient(theta, psi):
        s, c = math.sin(theta), math.cos(theta)
        _require(s * s, "V_4", (theta, psi))
        fv = F_(psi)
        if not math.isfinite(fv):
            raise PotentialSingularityError(f"V_4 profile singular at psi={psi!r}")
        return (-2.0 * c * fv / s**3, dF_(psi) / (s * s))

    sector = math.pi / (2 * params["m"]) if params.get("F") == "inv-sin2" else 1.0
    return PotentialSpec(
        name="V_4", chart=CHARTS["sphere"], params=params,
        evaluate=evaluate, gradient=gradient, region_factor=factor,
        axisymmetric=axisym, F=F_, dF=dF_,
        singular_set="poles sin(theta) = 0, plus the zero set of the profile F",
        default_start=(math.pi / 2, sector),
    )


# ---------------------------------------------------------------------------
# verbatim full-Hamiltonian entry

def _make_km2(alpha=1.0, beta1=1.0, beta2=1.0, beta3=1.0, h=1.0, k=1.0):
    """Superintegrable full Hamiltonian, transcribed verbatim:

        H = p_rho^2 + p_theta^2/rho^2 + p_psi^2/(rho^2 sin^2(h theta))
            + alpha/rho + (1/rho^2) (beta1/cos^2(h theta)
            + beta2/(sin^2(h theta) cos^2(k psi))
            + beta3/(sin^2(h theta) sin^2(k psi)))

    Note the kinetic terms carry no 1/2 factor: this entry keeps the source
    convention and is stored as a full Hamiltonian, distinct from the natural
    Hamiltonians used everywhere else.  It is therefore not eligible for the
    canonical-flow builder; its dynamical content is exercised through the
    V_4 reduction on rho = const spheres (alpha = beta1 = 0, h = 1).
    """
    alpha, beta1, beta2, beta3 = map(float, (alpha, beta1, beta2, beta3))
    h, k = float(h), float(k)

    def evaluate(rho, theta, psi):
        st, ct = math.sin(h * theta), math.cos(h * theta)
        sp, cp = math.sin(k * psi), math.cos(k * psi)
        if min(abs(rho), abs(ct), abs(st), abs(cp), abs(sp)) <= SINGULAR_TOL:
            return math.inf
        return (alpha / rho
                + (beta1 / ct**2 + beta2 / (st * st * cp * cp)
                   + beta3 / (st * st * sp * sp)) / (rho * rho))

    def gradient(rho, theta, psi):
        st, ct = math.sin(h * theta), math.cos(h * theta)
        sp, cp = math.sin(k * psi), math.cos(k * psi)
        for den in (rho, ct, st, cp, sp):
            _require(den, "KM2", (rho, theta, psi))
        ang = beta1 / ct**2 + beta2 / (st * st * cp * cp) + beta3 / (st * st * sp * sp)
        g_rho = -alpha / rho**2 - 2.0 * ang / rho**3
        g_theta = (2 * h * beta1 * st / ct**3
                   - 2 * h * beta2 * ct / (st**3 * cp * cp)
                   - 2 * h * beta3 * ct / (st**3 * sp * sp)) / (rho * rho)
        g_psi = (2 * k * beta2 * sp / (st * st * cp**3)
                 - 2 * k * beta3 * cp / (st * st * sp**3)) / (rho * rho)
        return (g_rho, g_theta, g_psi)

    def hamiltonian(q, p):
        rho, theta, psi = q
        p_rho, p_theta, p_psi = p
        st = math.sin(h * theta)
        return (p_rho**2 + p_theta**2 / rho**2 + p_psi**2 / (rho**2 * st * st)
                + evaluate(rho, theta, psi))

    return PotentialSpec(
        name="KM2", chart=CHARTS["euclid3-spherical"],
        params={"alpha": alpha, "beta1": beta1, "beta2": beta2, "beta3": beta3,
                "h": h, "k": k},
        evaluate=evaluate, gradient=gradient, hamiltonian=hamiltonian,
        singular_set="rho = 0, cos(h theta) = 0, sin(h theta) = 0, "
                     "cos(k psi) = 0, sin(k psi) = 0",
        default_start=(1.0, math.pi / 4, math.pi / 4),
        notes="verbatim transcription; kinetic terms carry no 1/2 factor",
    )


# ---------------------------------------------------------------------------
# harmonically confined radial lifts

def _make_w_harmonic(base_name, k=1.0):
    """Radial lift W = V(theta, psi)/rho^2 + (k/2) rho^2 of a sphere entry."""
    base = make(base_name)
    if base.chart.kind != "sphere":
        raise ValueError(f"radial lift needs a sphere entry, got {base_name}")
    k = float(k)
    b_eval, b_grad = base.evaluate, base.gradient

    def evaluate(rho, theta, psi):
        if abs(rho) <= SINGULAR_TOL:
            return math.inf
        return b_eval(theta, psi) / (rho * rho) + 0.5 * k * rho * rho

    def gradient(rho, theta, psi):
        _require(rho, base_name, (rho, theta, psi))
        v = b_eval(theta, psi)
        if not math.isfinite(v):
            raise PotentialSingularityError(
                f"W_{base_name}_harmonic singular at {(rho, theta, psi)}")
        g_th, g_ps = b_grad(theta, psi)
        r2 = rho * rho
        return (-2.0 * v / (rho * r2) + k * rho, g_th / r2, g_ps / r2)

    b_factor = base.region_factor

    def factor(rho, theta, psi):
        return b_factor(theta, psi)

    q0 = base.default_start
    return PotentialSpec(
        name=f"W_{base_name.replace('_', '')}_harmonic",
        chart=CHARTS["euclid3-spherical"],
        params={"k": k}, evaluate=evaluate, gradient=gradient,
        symmetry=base.symmetry, region_factor=factor, base=base,
        singular_set=f"rho = 0 plus the angular set of {base_name}: "
                     + base.singular_set,
        default_start=(1.0,) + q0,
    )


# ---------------------------------------------------------------------------
# catalog assembly

_FACTORIES = {
    "V_T": _make_v_t,
    "V_O": _make_v_o,
    "V_I": _make_v_i,
    "V_TO": _make_v_to,
    "V_CO": _make_v_co,
    "Ca1": _make_ca1,
    "Ca2": _make_ca2,
    "dihedral": _make_dihedral,
    "V_1": _make_v_1,
    "W_1": _make_w_1,
    "V_2": _make_v_2,
    "V_3": _make_v_3,
    "V_4": _make_v_4,
    "KM2": _make_km2,
    "W_VT_harmonic": lambda **kw: _make_w_harmonic("V_T", **kw),
    "W_VO_harmonic": lambda **kw: _make_w_harmonic("V_O", **kw),
    "W_VI_harmonic": lambda **kw: _make_w_harmonic("V_I", **kw),
    "W_Ca2_harmonic": _make_w_ca2_harmonic,
}

CATALOG_NAMES = tuple(_FACTORIES)


def make(name, negate=False, **params):
    """Build one catalog entry, optionally with parameter overrides or negated."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown potential {name!r}; know {list(CATALOG_NAMES)}") from None
    try:
        spec = factory(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name}: {exc}") from None
    return negated(spec) if negate else spec


def negated(spec):
    """The entry for -V: motion in the complementary-sign regions."""
    if spec.hamiltonian is not None:
        raise ValueError(f"{spec.name} is a verbatim full Hamiltonian; "
                         "negation is not defined for it")
    ev, gr = spec.evaluate, spec.gradient

    def evaluate(*q):
        return -ev(*q)

    def gradient(*q):
        return tuple(-g for g in gr(*q))

    F = dF = None
    if spec.F is not None:
        bF, bdF = spec.F, spec.dF
        F = lambda psi: -bF(psi)
        dF = lambda psi: -bdF(psi)
    return replace(spec, evaluate=evaluate, gradient=gradient,
                   factor_sign=-spec.factor_sign, F=F, dF=dF,
                   params={**spec.params, "negate": True})


def catalog():
    """All catalog entries with their default parameters."""
    return [make(name) for name in CATALOG_NAMES]


def free(chart_kind):
    """Zero potential on any chart (geodesic flow); not a catalog entry."""
    ch = CHARTS[chart_kind]
    n = len(ch.coords)

    def evaluate(*q):
        return 0.0

    def gradient(*q):
        return (0.0,) * n

    return PotentialSpec(name="free", chart=ch, params={}, evaluate=evaluate,
                         gradient=gradient, axisymmetric=True)


# ---------------------------------------------------------------------------
# cross-checks

def factorization_check(spec, poly, samples=1000, seed=2):
    """Max residual |V(theta,psi) * f(theta,psi) - s| over nonsingular samples.

    f is the restriction of the polynomial to the unit sphere and s is the
    entry's stored sign; points are rejection-sampled away from the zero set
    of f.  For the icosahedral pair this residual arbitrates between the two
    independently transcribed forms (trigonometric potential vs Cartesian
    polynomial), so it is reported rather than assumed small.
    """
    if spec.chart.kind != "sphere":
        raise ValueError(f"factorization check needs a sphere entry, got {spec.name}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    accepted = 0
    while accepted < samples:
        theta = rng.uniform(0.05, math.pi - 0.05)
        psi = rng.uniform(0.0, 2 * math.pi)
        f = angular_factor(poly, theta, psi)
        if abs(f) < 1e-2:
            continue
        v = spec.evaluate(theta, psi)
        if not math.isfinite(v):
            continue
        worst = max(worst, abs(v * f - spec.factor_sign))
        accepted += 1
    return worst


_SAMPLE_BOX = {
    "sphere": ((0.15, math.pi - 0.15), (0.0, 2 * math.pi)),
    "plane-polar": ((0.3, 2.5), (0.0, 2 * math.pi)),
    "plane-cartesian": ((-3.0, 3.0), (-3.0, 3.0)),
    "euclid3-cartesian": ((-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)),
    "euclid3-spherical": ((0.4, 2.5), (0.15, math.pi - 0.15), (0.0, 2 * math.pi)),
    "euclid4-cylindrical": ((-2.0, 2.0), (0.4, 2.5), (0.15, math.pi - 0.15),
                            (0.0, 2 * math.pi)),
}


def gradient_check(spec, samples=1000, seed=3, step=1e-4, value_cap=150.0,
                   slope_cap=2000.0):
    """Max relative mismatch of the analytic gradient against finite differences.

    Uses a fourth-order central stencil, sampled at nonsingular points with
    |V| below value_cap and |grad V| below slope_cap (difference quality
    degrades against the walls); the residual is
    max|analytic - fd| / (1 + max|analytic|) per point.
    """
    rng = np.random.default_rng(seed)
    box = _SAMPLE_BOX[spec.chart.kind]
    worst = 0.0
    accepted = 0
    while accepted < samples:
        q = tuple(rng.uniform(lo, hi) for lo, hi in box)
        v = spec.evaluate(*q)
        if not (math.isfinite(v) and abs(v) <= value_cap):
            continue
        try:
            analytic = spec.gradient(*q)
        except SingularityError:
            continue
        if max(abs(g) for g in analytic) > slope_cap:
            continue
        fd = []
        ok = True
        for i in range(len(q)):
            probes = []
            for offset in (2 * step, step, -step, -2 * step):
                point = list(q)
                point[i] += offset
                probes.append(spec.evaluate(*point))
            if not all(math.isfinite(p) for p in probes):
                ok = False
                break
            p2, p1, m1, m2 = probes
            fd.append((-p2 + 8 * p1 - 8 * m1 + m2) / (12 * step))
        if not ok:
            continue
        scale = 1.0 + max(abs(g) for g in analytic)
        worst = max(worst, max(abs(a - b) for a, b in zip(analytic, fd)) / scale)
        accepted += 1
    return worst
