"""Invertibility certification and constructions for planar harmonic maps.

The harmonic extension U of boundary data Phi on the unit circle is a
diffeomorphism onto its (simple, positively traversed) image exactly when
its boundary Jacobian is positive, and that Jacobian is computable from the
boundary data alone through the conjugate-function operator.  This package
certifies the criterion, builds harmonic diffeomorphisms by the shear
construction, maps disks onto starlike domains, and constructs fold-type
counterexamples over nonconvex targets.
"""

__version__ = "0.1.0"

from . import (certify, choquet, cli, conformal, curves, dirichlet, errors,
               shear, spectral, topology)
from .certify import (CertificateReport, ConvexPartition, RegularityReport,
                      boundary_jacobian, certify_full, certify_nonconvex,
                      check_regularity, convex_partition,
                      is_convex_in_direction)
from .choquet import (ChoquetScaffold, CounterexampleBundle, base_map_F,
                      build_counterexample, build_scaffold, eta_curve,
                      F_inverse_branch)
from .conformal import (ConformalMap, StarlikeBoundary, eval_conformal,
                        invert_boundary, invert_point, theodorsen)
from .dirichlet import (BoundaryCurve, HarmonicMap, JacobianField, analytic_f,
                        boundary_trace, eval_jacobian, evaluate, f_alpha,
                        jacobian_field, solve)
from .shear import (DilatationSpec, EquivalenceReport, PowerSeries, dilatation,
                    shear_construct, verify_equivalences)
from .spectral import (FourierCoeffs, PeriodicSamples, diff_theta, from_fourier,
                       hilbert, to_fourier)
from .topology import (SampledLoop, WindingReport, critical_count,
                       winding_number, wn_identity_check, zeros_in_disk)

__all__ = [
    "__version__",
    "certify", "choquet", "cli", "conformal", "curves", "dirichlet", "errors",
    "shear", "spectral", "topology",
    "CertificateReport", "ConvexPartition", "RegularityReport",
    "boundary_jacobian", "certify_full", "certify_nonconvex",
    "check_regularity", "convex_partition", "is_convex_in_direction",
    "ChoquetScaffold", "CounterexampleBundle", "base_map_F",
    "build_counterexample", "build_scaffold", "eta_curve", "F_inverse_branch",
    "ConformalMap", "StarlikeBoundary", "eval_conformal", "invert_boundary",
    "invert_point", "theodorsen",
    "BoundaryCurve", "HarmonicMap", "JacobianField", "analytic_f",
    "boundary_trace", "eval_jacobian", "evaluate", "f_alpha", "jacobian_field",
    "solve",
    "DilatationSpec", "EquivalenceReport", "PowerSeries", "dilatation",
    "shear_construct", "verify_equivalences",
    "FourierCoeffs", "PeriodicSamples", "diff_theta", "from_fourier", "hilbert",
    "to_fourier",
    "SampledLoop", "WindingReport", "critical_count", "winding_number",
    "wn_identity_check", "zeros_in_disk",
]
