"""blendforge: blending-artifact dataset synthesis and evaluation.

Composites faces with alpha, Laplacian-pyramid, or Poisson blending;
generates self-blended pseudo-fakes and Real-on-Real brightness probes
from real frames plus landmarks; scores blending seams with a classical
detector; and evaluates score tables with video-level AUROC, label-mix,
and ensemble protocols.
"""

from .errors import (
    BlendforgeError,
    ConvergenceError,
    DegenerateGeometryError,
    InvalidParameterError,
    InvalidRegionError,
    ManifestIntegrityError,
    ScoreJoinError,
    ShapeMismatchError,
    UndefinedMetricError,
)
from .image import (
    ColorJitter,
    ImageBuffer,
    adjust_brightness,
    apply_color_jitter,
    gaussian_blur,
    load_image,
    resize_bilinear,
    save_image,
)
from .geometry import (
    FaceBox,
    LandmarkSet,
    Mask,
    convex_hull,
    elastic_deform_mask,
    expand_and_crop,
    landmarks_face_box,
    load_landmarks,
    load_mask,
    rasterize_polygon,
    save_landmarks,
    save_mask,
    soften_mask,
)
from .blending import (
    AlphaMode,
    BlendMode,
    LaplacianPyramidMode,
    PoissonMode,
    alpha_blend,
    blend_with_mode,
    laplacian_blend,
    poisson_blend,
)
from .sbi import (
    ColorJitterRanges,
    SbiDraw,
    SbiParams,
    SbiSample,
    apply_sbi_draw,
    generate_sbi,
    generate_sbi_batch,
)
from .probes import (
    ProbePair,
    ProbeSpec,
    generate_probe_dataset,
    generate_probe_pair,
    probe_mask,
)
from .seam import SeamScore, score_frame, score_video
from .manifest import Label, Manifest, SampleRecord, ScoreTable
from .evaluate import (
    aggregate_video,
    auroc,
    ensemble_mean,
    mix_manifests,
    render_report,
    write_report,
)
from .seeding import derive_seed

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "BlendforgeError",
    "ConvergenceError",
    "DegenerateGeometryError",
    "InvalidParameterError",
    "InvalidRegionError",
    "ManifestIntegrityError",
    "ScoreJoinError",
    "ShapeMismatchError",
    "UndefinedMetricError",
    # image core
    "ImageBuffer",
    "ColorJitter",
    "adjust_brightness",
    "apply_color_jitter",
    "gaussian_blur",
    "resize_bilinear",
    "load_image",
    "save_image",
    # geometry
    "FaceBox",
    "LandmarkSet",
    "Mask",
    "convex_hull",
    "rasterize_polygon",
    "soften_mask",
    "elastic_deform_mask",
    "landmarks_face_box",
    "expand_and_crop",
    "load_landmarks",
    "save_landmarks",
    "load_mask",
    "save_mask",
    # blending
    "AlphaMode",
    "LaplacianPyramidMode",
    "PoissonMode",
    "BlendMode",
    "alpha_blend",
    "laplacian_blend",
    "poisson_blend",
    "blend_with_mode",
    # generators
    "ColorJitterRanges",
    "SbiParams",
    "SbiDraw",
    "SbiSample",
    "generate_sbi",
    "apply_sbi_draw",
    "generate_sbi_batch",
    "ProbeSpec",
    "ProbePair",
    "probe_mask",
    "generate_probe_pair",
    "generate_probe_dataset",
    # detector + evaluation
    "SeamScore",
    "score_frame",
    "score_video",
    "Label",
    "SampleRecord",
    "Manifest",
    "ScoreTable",
    "auroc",
    "aggregate_video",
    "ensemble_mean",
    "mix_manifests",
    "render_report",
    "write_report",
    "derive_seed",
]
