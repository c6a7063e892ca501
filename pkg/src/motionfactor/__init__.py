"""Motion polynomial factorization over dual quaternions and linkage synthesis."""

from .config import Config, DEFAULT_TOL
from .dualquat import (
    DualNumber,
    DualQuaternion,
    Pose,
    Quaternion,
    Rotation,
    Translation,
    act_on_point,
    classify_generator,
    dq_mul,
    dq_norm,
    normalize_pose,
    pose_distance,
    projective_residual,
    quat_mul,
    study_form,
)
from .polyring import (
    DQPoly,
    MotionPolynomial,
    RealPoly,
    eval_at,
    max_real_factor,
    norm_poly,
    poly_mul,
    quadratic_factors,
    real_roots_complex,
    right_divide,
    right_eval,
    validate_motion,
)
from .factorization import (
    Factorization,
    FactorizationReport,
    NoSolution,
    SearchSettings,
    SolutionFamily,
    UniqueSolution,
    all_factorizations,
    factor_bounded_with_multiplier,
    factor_generic,
    factor_quaternion,
    factor_with_backtracking,
    is_bounded,
    linear_zero,
    right_multiply_and_factor,
    solve_linear_factor,
)
from .synthesis import (
    BennettLinkage,
    FlipResult,
    bennett_flip,
    interpolate_three_poses,
    kempe_linkage_for_curve,
    six_bar_from_cubic,
    synthesize_bennett,
    translation_motion_from_curve,
)
from .linkage import (
    ConfigurationSample,
    Joint,
    Link,
    LinkGraph,
    Linkage,
    assemble,
    export,
    import_linkage,
    rigidity_check,
    sample_configuration,
    trajectory,
)

__version__ = "0.1.0"
