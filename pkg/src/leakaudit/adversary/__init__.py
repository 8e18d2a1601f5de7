"""Finite adversaries: two-layer networks and their training."""

from .net import (
    NetGradient,
    TwoLayerNet,
    empirical_loss,
    forward,
    gradient,
    load_net,
    predict,
    save_net,
    sigma,
)
from .train import (
    AllRestartsDivergedError,
    ErmResult,
    TrainConfig,
    VacuousCertificateWarning,
    train_erm,
)

__all__ = [
    "NetGradient",
    "TwoLayerNet",
    "empirical_loss",
    "forward",
    "gradient",
    "load_net",
    "predict",
    "save_net",
    "sigma",
    "AllRestartsDivergedError",
    "ErmResult",
    "TrainConfig",
    "VacuousCertificateWarning",
    "train_erm",
]
