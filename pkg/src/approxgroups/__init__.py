"""Exact computations with approximate groups: product sets, witnesses,
covering and control certificates, expansion and free-pair certificates."""

from __future__ import annotations

from .errors import (
    ApproxGroupError,
    BudgetExceeded,
    CertificateError,
    ContextMismatch,
    ElementError,
    GroupSpecError,
    NotSymmetricError,
    PipelineInconsistency,
    PreconditionError,
)
from .groups import FiniteTable, FreeAbelian, FreeGroup, Group, Heisenberg, MatrixGroup, group_from_spec
from .oracles import SubgroupOracle, subgroup_oracle
from .sets import ElementSet, ball, budget, doubling, intersect_coset, power, product, symmetrize

__version__ = "0.1.0"

__all__ = [
    "ApproxGroupError",
    "BudgetExceeded",
    "CertificateError",
    "ContextMismatch",
    "ElementError",
    "ElementSet",
    "FiniteTable",
    "FreeAbelian",
    "FreeGroup",
    "Group",
    "GroupSpecError",
    "Heisenberg",
    "MatrixGroup",
    "NotSymmetricError",
    "PipelineInconsistency",
    "PreconditionError",
    "SubgroupOracle",
    "ball",
    "budget",
    "doubling",
    "group_from_spec",
    "intersect_coset",
    "power",
    "product",
    "subgroup_oracle",
    "symmetrize",
]
