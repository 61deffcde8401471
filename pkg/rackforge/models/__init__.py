"""Pydantic models for rackforge records, reports and input files."""

from .input_models import AlgebraFile, AugmentationSpec, MatrixLocalParameters, ModelSpec
from .integration_models import IntegrationConfig
from .report_models import (
    CheckRecord,
    CheckStatus,
    ProbeVerdict,
    Report,
    ReportBody,
    ReportHeader,
    StripVerdict,
    VerificationReport,
)

__all__ = [
    "AlgebraFile", "AugmentationSpec", "MatrixLocalParameters", "ModelSpec", "IntegrationConfig",
    "CheckRecord", "CheckStatus", "Report", "ReportBody", "ReportHeader",
    "VerificationReport", "StripVerdict", "ProbeVerdict",
]
