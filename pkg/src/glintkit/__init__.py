"""glintkit: model-based 3D eye geometry toolkit.

Forward glint simulation on a two-sphere eye, inverse corneal/eyeball
estimation, kappa calibration, fixation and vergence computation, central
and non-central camera geometry with Plucker-style pixel embeddings, and
the Accuracy/Precision/Origin/Convergence evaluation harness, all
verifiable against a built-in synthetic scene oracle.
"""

from .backend import backend_name
from .camera import (
    CameraModel,
    CentralIntrinsics,
    GenericRayGrid,
    PixelEmbedding,
    Pose,
    Ray,
    central_camera,
    epipolar_samples,
    grid_from_central,
    look_at_pose,
    pixel_embedding,
    project,
    unproject,
)
from .eye import (
    EyeParams,
    GazeRay,
    Kappa,
    apply_kappa,
    convergence_distance,
    diopter_error,
    estimate_kappa,
    fixation_point,
    optical_axis,
    triangulate_fixation,
)
from .glint import (
    CorneaEstimate,
    FrameObservation,
    GlintObservation,
    Led,
    RigSide,
    annotate_sequence,
    estimate_cornea,
    fit_eyeball,
    match_glints,
    reflect,
    simulate_frame,
    simulate_glint,
)
from .metrics import (
    EvaluationReport,
    GazePrediction,
    angular_error,
    evaluate_report,
    p90,
)
from .scene import (
    EyeAnatomy,
    GroundTruthRecord,
    Rig,
    SceneConfig,
    add_noise,
    default_rig,
    generate_session,
    pose_eye_at_target,
    sample_eye_anatomy,
    sample_target,
)

__version__ = "0.1.0"
