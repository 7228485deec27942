"""Sampling point sets and certified norm-discretization constants for
finite-dimensional function subspaces on gridded probability spaces.

The package builds trigonometric and polynomial subspaces, selects sampling
points (random, Christoffel-reweighted, optimal-design based, or
deterministically sparsified), and certifies the constants of the induced
norm comparisons: two-sided L2/Lq bounds, the uniform-norm constant, kernel
L1 numbers, entropy lower bounds, and Remez constants for excluded sets.
"""

__version__ = "0.1.0"

from .config import DEFAULT_TOLS, Tolerances
from .errors import (ConfigError, DegeneracyError, NumericalError,
                     ResolutionError, SchemaMismatchError)
from .subspace import (ChristoffelProfile, DesignMeasure, FrequencySet,
                       GriddedSpace, NikolskiiEstimate, Subspace,
                       build_poly_subspace, build_trig_subspace, christoffel,
                       design_subspace, dirichlet_eval, g_optimal_design,
                       nikolskii_constant, orthonormalize)
from .pointset import (PointSet, SampleSizeQuery, SAMPLE_SIZE_RULES,
                       augment_constant, bss_condition_bound, bss_select,
                       required_m, sample_christoffel, sample_iid,
                       sparse_weighted_factor)
from .certify import (ChainReport, MZReport, UniformReport, certify_l2,
                      certify_lq, certify_uniform, mc_success_probability,
                      success_curve, uniform_chain_check)
from .kernels import (KernelReport, VPRecord, VPSearchResult,
                      bilinear_point_budget, dirichlet_l1, kernel_report,
                      vp_classical, vp_search)
from .entropy import (EntropyEstimate, GrowthCheck, check_entropy_growth,
                      estimate_entropy, level_size)
from .remez import (DiscretizationRemezCheck, ExcludedSet, RemezReport,
                    adversarial_excluded, remez_constant,
                    remez_from_discretization, remez_thresholds)

__all__ = [name for name in dir() if not name.startswith("_")]
