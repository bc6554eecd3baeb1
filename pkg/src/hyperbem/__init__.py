"""Adaptive Galerkin boundary element solver for 2D transmission problems
between hyperbolic metamaterials and isotropic or hyperbolic media.

The solver discretizes the coupled boundary integral system on the
interface with P1/P0 elements, integrates the anisotropic kernels with a
cone-aware adaptive Lobatto scheme, and drives mesh refinement with a
two-level a posteriori error estimator and Doerfler marking.
"""

from .adapt import (AdaptiveRun, ErrorIndicators, LevelReport, SolutionPair,
                    adaptive_solve, dorfler_mark, local_indicators,
                    project_p0, project_p1, solve_on_mesh)
from .assembly import (AssemblyStats, BlockSystem, OperatorMatrices,
                       assemble_operators, assemble_rhs, build_block_system,
                       read_matrix, write_matrix)
from .config import (ConfigError, GridSpec, ProblemConfig, format_complex,
                     parse_complex, parse_config, serialize_config)
from .geometry import (Curve, Ellipse, ElementFrame, Mesh, Polygon,
                       bisect_elements, build_initial_mesh, element_frame,
                       uniform_refine)
from .kernels import (KernelContext, PointSource, dphi_dnu_x, dphi_dnu_y,
                      eval_field, phi, phi_static, source_trace)
from .linalg import SolveError, lu_solve, solve_system
from .medium import (ConeData, MaterialPair, cone_boundary_distance,
                     deformed_distance, deformed_normal, half_cone_angle)
from .quadrature import (AdaptiveBudget, AdaptiveResult, QuadratureRule,
                         adaptive_lobatto_2d, gauss_rule, lobatto_rule,
                         needs_adaptive)
from .reference import ReferenceSolution, reference_solve, relative_errors
from .specfun import SpecfunDomainError, branch_sqrt, hankel1_0, hankel1_1

__version__ = "1.0.0"
