"""Numerical laboratory for Hamiltonian motion in symmetric potentials.

The package integrates natural Hamiltonians on the sphere, the plane, and
Euclidean 3/4-space for a catalog of potentials with polyhedral or dihedral
symmetry, extracts surfaces of section, and turns the curve-versus-scatter
picture into reproducible verdicts: box-counting dimension estimates,
confinement checks, critical-point counts, and first-integral drift reports.
"""

__version__ = "0.1.0"

from .charts import (CHARTS, Chart, ChartGuardError, PhaseState,
                     SingularityError, jacobi_forward, jacobi_inverse,
                     r4_state_to_line, spherical_to_cartesian, wrap_angle)
from .diagnostics import (CriticalPoint, RegionReport, SectionVerdict,
                          box_counting_dimension, classify_section,
                          confinement_check, find_critical_points, find_region,
                          integral_drift, sample_initial_conditions)
from .dynamics import (HamiltonianSystem, default_state, fiber_momenta,
                       integrals, natural_system, radial_consistency)
from .groups import (SymmetryGroup, check_invariance, dihedral_group,
                     group_checks, icosahedral_group, octahedral_group,
                     rotation_matrix, symmetry_group, tetrahedral_group)
from .integrators import (IntegratorConfig, OrbitTrace, integrate, rk4_step,
                          rkf45_step, write_orbit_csv)
from .potentials import (CATALOG_NAMES, CATALOG_VERSION, POLYNOMIALS,
                         InvariantPolynomial, PotentialSingularityError,
                         PotentialSpec, angular_factor, catalog,
                         factorization_check, free, gradient_check, make,
                         negated)
from .sections import (SectionPointSet, SectionSpec, compute_section,
                       compute_section_both, refine_crossing,
                       section_from_trace, write_section_csv)

__all__ = [name for name in dir() if not name.startswith("_")]
