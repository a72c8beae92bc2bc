"""Fusion frames: potential, minimization and structure verification."""

from framekit.core import (
    DimProfile,
    FusionFrame,
    Subspace,
    distance,
    ffp,
    ffp_lower_bound,
    frame_operator,
    is_tight,
    orthonormalize,
    projection,
    random_frame,
    random_unitary,
    reconstruct,
)
from framekit.irregularity import (
    check_IJ_prediction,
    decompose,
    fundamental_inequality,
    irregularity,
    minimum_value,
)
from framekit.optimizer import OptimizerConfig, minimize, multistart
from framekit.spectral import (
    eigenstructure,
    index_sets,
    synthesis,
    verify_minimizer_structure,
    verify_theorem31,
)

__version__ = "0.1.0"
