"""Certified lower bounds on privacy leakage from finite adversaries.

A two-layer network trained to predict a sensitive bit ``S`` from a released
value ``T`` has some minimal empirical loss.  Subtracting a sample-size and
network-size dependent slack gives a number that, with probability at least
``1 - delta``, no adversary of any kind can beat in expectation.
"""

__version__ = "0.1.0"

from .analytic import MixtureParams, minimal_true_loss, mixture_bound, representation_bound
from .audit import AuditReport, certify_classification, certify_representation
from .synthdata import Dataset, Scenario, read_dataset, sample_dataset, write_dataset

__all__ = [
    "__version__",
    "AuditReport",
    "Dataset",
    "MixtureParams",
    "Scenario",
    "certify_classification",
    "certify_representation",
    "minimal_true_loss",
    "mixture_bound",
    "read_dataset",
    "representation_bound",
    "sample_dataset",
    "write_dataset",
]
