"""f-MICL: contrastive learning with f-mutual-information objectives.

Library plus CLI implementing the f-divergence calculus, the f-Gaussian
similarity, the contrastive objective and its InfoNCE-family baselines, a
small numpy encoder with exact reverse-mode gradients, a deterministic
trainer on synthetic data, and diagnostics that verify the theory behind
the loss (Fenchel identities, simplex uniformity, collapse detection,
Gaussian-kernel linearity) at desk scale.
"""

from .errors import (
    BatchTooSmall,
    ConfigError,
    DegenerateEmbedding,
    DomainError,
    FmiclError,
    NormalizationError,
    NumericalDivergence,
    ParameterError,
)
from .fdiv import (
    Convexity,
    Divergence,
    Family,
    FunctionKind,
    WeightedDivergence,
    apply_weighting,
    classify_h_convexity,
    evaluate,
    fenchel_residual,
    h_value,
    lambert_w,
)

__version__ = "0.1.0"
