"""Conformal navigation transformations for planar workspaces."""
from .exceptions import (CacheFormatError, CircleFitError, ConfNavError,
                         ConstructionError, DegenerateCurveError, DomainError,
                         InvalidCurveError, NearBoundaryWarning,
                         NonConvergenceError, SingularConfigurationError,
                         SolverError, StaleCacheError)
from .geometry import (CurveSpec, ParametricCurve, Workspace, clearance,
                       point_in_free_space, sample_curve, validate_workspace,
                       workspace_from_dict)
from .maps import (MapStage, build_exterior_map, build_interior_map,
                   evaluate_stage, stage_derivative)
from .koebe import (CompositeMap, IterationReport, SphereWorld, composite_derivative,
                    evaluate_composite, fit_circles, jacobian_2x2, run_koebe)
from .cache import load_cache, save_cache
from .navigation import (NavParams, beta, grad_phi_kr, make_params, phi_kr,
                         pullback_gradient, saddle_residual)
from .simulation import (ControlParams, Trajectory, batch_simulate, frechet_distance,
                         simulate_dynamic, simulate_kinematic)

__version__ = "0.1.0"
