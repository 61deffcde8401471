"""
Input files and report output for the rackforge command line.
"""

import hashlib
import json
import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Tuple
from pydantic import ValidationError

from .. import __version__
from ..algebra.augmented import AugmentedLeibnizAlgebra
from ..algebra.leibniz import LeibnizAlgebra
from ..algebra.scalars import ScalarMode, as_array, jsonable
from ..exceptions import ConfigError, InputError
from ..integration.groups import GroupModel, load_model
from ..models.input_models import AlgebraFile
from ..models.report_models import Report, ReportBody, ReportHeader, VerificationReport

logger = logging.getLogger(__name__)


def read_algebra_file(path: str) -> Tuple[AlgebraFile, str]:
    """Parse and validate an algebra file; returns it with the sha256 of its bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: not valid JSON ({e})") from e
    try:
        spec = AlgebraFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise InputError(f"{path}: {location}: {first['msg']}") from e
    logger.info(f"Loaded {path} (dimension {spec.dimension}, {spec.scalars})")
    return spec, digest


def file_stem(path: str) -> str:
    return Path(path).stem


def build_algebra(spec: AlgebraFile, name: str = "") -> LeibnizAlgebra:
    mode = ScalarMode(spec.scalars)
    return LeibnizAlgebra.from_table(spec.bracket, mode, spec.labels, name, spec.dimension)


def build_augmentation(spec: AlgebraFile, name: str = "") -> Optional[AugmentedLeibnizAlgebra]:
    aug = spec.augmentation
    if aug is None:
        return None
    return AugmentedLeibnizAlgebra.from_tables(
        aug.g_bracket,
        aug.p,
        aug.action,
        ScalarMode(spec.scalars),
        g_dim=aug.g_dimension,
        h_dim=spec.dimension,
        g_labels=aug.g_labels,
        h_labels=spec.labels,
        name=name,
    )


def build_model(
    spec: AlgebraFile,
    algebra: LeibnizAlgebra,
    name: Optional[str] = None,
) -> GroupModel:
    """Group model named on the command line, else the one declared in the file."""
    declared = spec.model
    model_name = name or (declared.name if declared else None)
    if model_name is None:
        raise ConfigError("no group model: pass --model or declare one in the file")
    parameters: Dict[str, Any] = {}
    if declared is not None and declared.name == model_name:
        parameters = dict(declared.parameters)
    return load_model(model_name, algebra, parameters)


def element_vectors(spec: AlgebraFile) -> list:
    """Algebra elements listed in the file, always read as float64."""
    return [as_array(v, ScalarMode.FLOAT64) for v in spec.elements or []]


def raw_matrices(spec: AlgebraFile) -> list:
    return [as_array(m, ScalarMode(spec.scalars)) for m in spec.matrices or []]


def subspace_json(subspace) -> Dict[str, Any]:
    return {"dim": subspace.dim, "basis": jsonable(subspace.basis), "pivots": list(subspace.pivots)}


class ReportBuilder:
    """Collects check records and results for one command run."""

    def __init__(self, command: str, digest: str, seed: Optional[int], parameters: Dict[str, Any]):
        self.started = time.perf_counter()
        self.body = ReportBody(command=command, input_digest=digest, seed=seed, parameters=jsonable(parameters))

    def add(self, report: VerificationReport, prefix: str = "") -> VerificationReport:
        for check in report.checks:
            name = f"{prefix}{check.name}" if prefix else check.name
            self.body.checks.append(check.model_copy(update={"name": name}))
            level = logging.INFO if check.passed else logging.WARNING
            logger.log(level, f"{name}: {check.status.value} (max defect {check.max_defect:.3e})")
        return report

    def result(self, key: str, value: Any):
        self.body.results[key] = jsonable(value)

    def finish(self) -> Report:
        header = ReportHeader(
            generated_at=datetime.now(timezone.utc).isoformat(),
            wall_time_s=round(time.perf_counter() - self.started, 6),
            version=__version__,
        )
        return Report(header=header, body=self.body)


def body_json(report: Report) -> str:
    """Deterministic serialization of the report body."""
    return json.dumps(report.body.model_dump(mode="json"), sort_keys=True, indent=2)


def write_report(report: Report, output: Optional[str] = None) -> str:
    payload = {"header": report.header.model_dump(mode="json"), "body": report.body.model_dump(mode="json")}
    text = json.dumps(payload, sort_keys=True, indent=2)
    if output:
        Path(output).write_text(text + "\n")
        logger.info(f"Report written to {output}")
    else:
        print(text)
    return text


def exit_code(report: Report) -> int:
    return 0 if report.body.passed else 1
