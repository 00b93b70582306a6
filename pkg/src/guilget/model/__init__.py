"""Three-stage layout model: token predictor, mixture generator, box refiner."""

from guilget.model.config import LossWeights, ModelConfig, TrainConfig
from guilget.model.stages import GuilgetModel
from guilget.model.sampling import generate_layout, sample_bbox

__all__ = [
    "LossWeights",
    "ModelConfig",
    "TrainConfig",
    "GuilgetModel",
    "generate_layout",
    "sample_bbox",
]
