"""lagflow: equivariant Lagrangian mean curvature flow of profile curves.

A desk-scale simulator and verification lab for the reduced flow
dz/dt = -f nu, f = k + (n-1) <z, nu> / |z|^2, of closed curves in the
punctured plane, together with its conserved quantities, preserved
predicates, self-similar profiles, and singularity classification.
"""

from .curve import (DiscreteCurve, from_complex, read_curve_csv, read_curve_json,
                    resample_arclength, write_curve_csv, write_curve_json)
from .errors import (BadHorizon, BlowUp, DegenerateSegment, ExitEmptyGrid,
                     InsufficientBlowup, InvalidSpec, LagflowError, NonIntegerWinding,
                     NoReturn, NoRoot, NotClosed, NotStarshaped, OriginContact,
                     RefineGrid, StepUnderflow)
from .flow import (FlowConfig, FlowState, SingularityReport, TrajectoryRecord,
                   estimate_singularity, evolution_residuals, invariant_monitor,
                   rescale_huisken, run, step)
from .geometry import GeometryField, geometry, identity_residuals, near_origin_ratio
from .scenarios import ScenarioSpec, generate, random_fourier_seed
from .shrinker import (ProfileODEState, ShrinkerSpec, integrate_profile,
                       shoot_closed, shrinker_curvature)
from .topology import TopologyInfo, hausdorff_distance, predicates, topology

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
