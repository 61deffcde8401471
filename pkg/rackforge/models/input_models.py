"""
Pydantic models for algebra description files.
"""

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, StrictFloat, StrictInt, model_validator

ScalarEntry = Union[StrictInt, StrictFloat, str]
Vector = List[ScalarEntry]
Matrix = List[List[ScalarEntry]]
Table = List[List[List[ScalarEntry]]]


def _check_table(table: Table, dim: int, what: str):
    if len(table) != dim:
        raise ValueError(f"{what}: expected {dim} rows, got {len(table)}")
    for i, row in enumerate(table):
        if len(row) != dim:
            raise ValueError(f"{what}[{i}]: expected {dim} entries, got {len(row)}")
        for j, vec in enumerate(row):
            if len(vec) != dim:
                raise ValueError(f"{what}[{i}][{j}]: expected vector of length {dim}, got {len(vec)}")


def _check_matrix(matrix: Matrix, rows: int, cols: int, what: str):
    if len(matrix) != rows:
        raise ValueError(f"{what}: expected {rows} rows, got {len(matrix)}")
    for i, row in enumerate(matrix):
        if len(row) != cols:
            raise ValueError(f"{what}[{i}]: expected {cols} columns, got {len(row)}")


class AugmentationSpec(BaseModel):
    """Explicit augmentation (h, p, g, [,]_g, action) of an algebra file."""
    g_dimension: int = Field(..., ge=0)
    g_bracket: Table
    g_labels: Optional[List[str]] = None
    p: Matrix
    action: Table


class ModelSpec(BaseModel):
    """Group model name and its parameters."""
    name: str
    parameters: Dict[str, Any] = Field(default_factory=dict)


class AlgebraFile(BaseModel):
    """Input file: structure constants plus optional augmentation, nilradical and model."""
    format: int = 1
    dimension: int = Field(0, ge=0)
    scalars: Literal["rational", "float64"] = "rational"
    labels: Optional[List[str]] = None
    bracket: Table = Field(default_factory=list)
    augmentation: Optional[AugmentationSpec] = None
    nilradical: Optional[List[Vector]] = None
    model: Optional[ModelSpec] = None
    elements: Optional[List[Vector]] = None
    matrices: Optional[List[Matrix]] = None
    expected: Optional[Dict[str, Any]] = Field(None, description="Reference values for bundled fixtures")

    @model_validator(mode="after")
    def check_shapes(self) -> "AlgebraFile":
        if self.format != 1:
            raise ValueError(f"unsupported format {self.format}, expected 1")
        dim = self.dimension
        _check_table(self.bracket, dim, "bracket")
        if self.labels is not None and len(self.labels) != dim:
            raise ValueError(f"labels: expected {dim} names, got {len(self.labels)}")

        aug = self.augmentation
        if aug is not None:
            _check_table(aug.g_bracket, aug.g_dimension, "augmentation.g_bracket")
            _check_matrix(aug.p, aug.g_dimension, dim, "augmentation.p")
            if len(aug.action) != aug.g_dimension:
                raise ValueError(
                    f"augmentation.action: expected {aug.g_dimension} matrices, got {len(aug.action)}"
                )
            for a, rho in enumerate(aug.action):
                _check_matrix(rho, dim, dim, f"augmentation.action[{a}]")
            if aug.g_labels is not None and len(aug.g_labels) != aug.g_dimension:
                raise ValueError("augmentation.g_labels: wrong length")

        for name in ("nilradical", "elements"):
            vectors = getattr(self, name)
            for k, vec in enumerate(vectors or []):
                if len(vec) != dim:
                    raise ValueError(f"{name}[{k}]: expected length {dim}, got {len(vec)}")

        for k, matrix in enumerate(self.matrices or []):
            _check_matrix(matrix, len(matrix), len(matrix), f"matrices[{k}]")
            if not matrix:
                raise ValueError(f"matrices[{k}]: empty matrix")
        return self


class MatrixLocalParameters(BaseModel):
    """Parameters of the matrix-local group model."""
    basis_matrices: List[Matrix] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_square(self) -> "MatrixLocalParameters":
        for k, matrix in enumerate(self.basis_matrices):
            if not matrix:
                raise ValueError(f"basis_matrices[{k}]: empty matrix")
            _check_matrix(matrix, len(matrix), len(matrix), f"basis_matrices[{k}]")
        return self
