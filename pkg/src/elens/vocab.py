"""Closed vocabularies shared across the case model, checklist, and workflow."""

from __future__ import annotations

from enum import Enum


class StakeholderRole(str, Enum):
    """The seven stakeholder groups; closed at runtime."""

    AI_SUPPLIER = "AiSupplier"
    AI_SUPPLIER_ADMIN = "AiSupplierAdmin"
    REGULATOR = "Regulator"
    SYSTEM_ADMIN = "SystemAdmin"
    ETHICS_VALIDATOR = "EthicsValidator"
    AI_USER = "AiUser"
    VISITOR = "Visitor"


# AI lifecycle stages, in pipeline order.
LIFECYCLE_STAGES = (
    "BusinessUseCase",
    "Design",
    "DataCollection",
    "ModelBuildingTesting",
    "Deployment",
    "Monitoring",
)

# Question quality tags; author-assigned metadata.
DESIDERATA = ("Relevant", "Complete", "Balanced", "Accurate")

# Algorithmic assessor metrics available to checklist questions.
METRIC_NAMES = (
    "demographic_parity",
    "disparate_impact",
    "faithfulness",
    "monotonicity",
)

# Principles shipped by default; the registry stays open at authoring time.
DEFAULT_PRINCIPLES = ("transparency", "fairness", "accountability", "privacy")
