"""
Pydantic models for verification records and CLI reports.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..algebra.scalars import jsonable


class CheckStatus(str, Enum):
    """Outcome of a single check."""
    PASS = "pass"
    FAIL = "fail"


class CheckRecord(BaseModel):
    """One named check with its worst defect and first counterexample."""
    name: str
    status: CheckStatus
    max_defect: float = 0.0
    counterexample: Optional[Any] = None
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    @classmethod
    def build(
        cls,
        name: str,
        passed: bool,
        max_defect: float = 0.0,
        counterexample: Any = None,
        **details: Any,
    ) -> "CheckRecord":
        return cls(
            name=name,
            status=CheckStatus.PASS if passed else CheckStatus.FAIL,
            max_defect=float(max_defect),
            counterexample=None if passed else jsonable(counterexample),
            details=jsonable(details),
        )


class VerificationReport(BaseModel):
    """Ordered collection of check records about one subject."""
    subject: str = ""
    checks: List[CheckRecord] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def max_defect(self) -> float:
        return max((check.max_defect for check in self.checks), default=0.0)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def extend(self, other: "VerificationReport", prefix: str = "") -> "VerificationReport":
        for check in other.checks:
            name = f"{prefix}{check.name}" if prefix else check.name
            self.checks.append(check.model_copy(update={"name": name}))
        return self

    def check(self, name: str) -> CheckRecord:
        for record in self.checks:
            if record.name == name:
                return record
        raise KeyError(name)

    def first_failure(self) -> Optional[CheckRecord]:
        for record in self.checks:
            if not record.passed:
                return record
        return None


class ReportHeader(BaseModel):
    """Run metadata kept out of the deterministic body."""
    generated_at: str
    wall_time_s: float
    version: str


class ReportBody(BaseModel):
    """Deterministic part of a CLI report."""
    format: int = 1
    command: str
    input_digest: str
    seed: Optional[int] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    checks: List[CheckRecord] = Field(default_factory=list)
    results: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class Report(BaseModel):
    """CLI report: header plus body."""
    header: ReportHeader
    body: ReportBody


class StripVerdict(BaseModel):
    """Eigenvalue strip test: all |Im mu| < tau, with the margin tau - max |Im mu|."""
    member: bool
    margin: float
    beta: float
    tau: float


class ProbeVerdict(BaseModel):
    """Outcome of comparing exp(X), exp(Y) against X, Y."""
    violation: bool
    exp_distance: float
    distance: float
