"""Dense float64 tensors with reverse-mode autodiff and transformer blocks."""

from guilget.nn.tensor import Tensor
from guilget.nn.optim import Adam, grad_check

__all__ = ["Tensor", "Adam", "grad_check"]
