"""Exact cubical associahedra and A-infinity forms on path spaces of R^d."""

from .associahedron import (DomainError, FaceIndex, build_complex, contains, d_face, degeneracy,
                            face_indices, facet_decompose, interior_point, vertices)
from .cubic import CubicComplex, CubicSet, empty, join, point, product, verify_complex
from .engine import (M, AInftyReport, ConcatWeights, M_stable, StableConcatWeights, alpha, beta, d, dD,
                     dE, e, mu, mu_eps, phi, psi)
from .geometry import AffineSubspace, RatVec, UsageError, affine_hull, convex_membership, rv
from .paths import (ComposabilityError, Curve, SmoothPath, bump, clamp, finite_diff, flatness_probe,
                    iota, make_path, smoothness_probe, src, tgt)

__version__ = "0.1.0"
