"""Exact simulation of entanglement-breaking multiple-access channels and a quantum butterfly network."""

from ebnet.capacity import (
    Ensemble,
    RateRegion,
    RateVector,
    ea_capacity_depolarizing,
    h_d,
    holevo_capacity_depolarizing,
    holevo_quantity,
    superadditivity_ratio,
)
from ebnet.channels import ChoiMatrix, QuantumChannel, apply, apply_on_factors, choi
from ebnet.qcore import QuantumState, UnitaryOperator

__version__ = "0.1.0"

__all__ = [
    "ChoiMatrix",
    "Ensemble",
    "QuantumChannel",
    "QuantumState",
    "RateRegion",
    "RateVector",
    "UnitaryOperator",
    "apply",
    "apply_on_factors",
    "choi",
    "ea_capacity_depolarizing",
    "h_d",
    "holevo_capacity_depolarizing",
    "holevo_quantity",
    "superadditivity_ratio",
]
