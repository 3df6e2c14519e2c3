"""
Versioned JSON model files.

    {"format_version": 1, "dims": [3, 3], "c_re": [...], "c_im": [...],
     "metadata": {"method": "ml", "loglik": -1234.5, "n_obs": 2017,
                  "var_names": ["a", "b"]}}

Floats are written with the shortest representation that reads back as the
same double, so a save/load cycle reproduces c bit for bit.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .config import MODEL_FORMAT_VERSION
from .core import DimVector, MnntsParams
from .errors import ArgumentError, DataError

logger = logging.getLogger(__name__)


class ModelMetadata(BaseModel):
    model_config = ConfigDict(extra="allow")

    method: Optional[str] = None
    loglik: Optional[float] = None
    n_obs: Optional[int] = None
    var_names: Optional[List[str]] = None


class ModelFile(BaseModel):
    format_version: int = MODEL_FORMAT_VERSION
    dims: List[int]
    c_re: List[float]
    c_im: List[float]
    metadata: ModelMetadata = Field(default_factory=ModelMetadata)

    @field_validator("format_version")
    @classmethod
    def _known_version(cls, value: int) -> int:
        if value != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {value}, expected {MODEL_FORMAT_VERSION}")
        return value

    @field_validator("dims")
    @classmethod
    def _valid_dims(cls, value: List[int]) -> List[int]:
        if not value or any(m < 0 for m in value):
            raise ValueError("dims must be a nonempty list of nonnegative integers")
        return value

    @model_validator(mode="after")
    def _lengths_match(self) -> "ModelFile":
        expected = DimVector(tuple(self.dims)).total_length
        if len(self.c_re) != expected or len(self.c_im) != expected:
            raise ValueError(
                f"c_re/c_im have {len(self.c_re)}/{len(self.c_im)} entries, dims need {expected}"
            )
        names = self.metadata.var_names
        if names is not None and len(names) != len(self.dims):
            raise ValueError(f"{len(names)} var_names for {len(self.dims)} variables")
        return self

    @classmethod
    def from_params(cls, p: MnntsParams, **metadata) -> "ModelFile":
        return cls(
            dims=list(p.dims.dims),
            c_re=p.c.real.tolist(),
            c_im=p.c.imag.tolist(),
            metadata=ModelMetadata(**metadata),
        )

    def to_params(self) -> MnntsParams:
        c = np.array(self.c_re, dtype=np.float64) + 1j * np.array(self.c_im, dtype=np.float64)
        return MnntsParams(DimVector(tuple(self.dims)), c)


def save_model(p: MnntsParams, path: Union[str, Path], **metadata) -> ModelFile:
    """Write p with the given metadata (method, loglik, n_obs, var_names, ...)."""
    model = ModelFile.from_params(p, **metadata)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model.model_dump(exclude_none=True), indent=2) + "\n", encoding="utf-8")
    logger.debug("saved model dims %s to %s", p.dims, path)
    return model


def load_model(path: Union[str, Path]) -> ModelFile:
    """Read and validate a model file; any defect is a data error."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        model = ModelFile.model_validate(raw)
        model.to_params()
    except FileNotFoundError:
        raise DataError(f"model file not found: {path}") from None
    except (OSError, json.JSONDecodeError, ValidationError, ArgumentError) as e:
        raise DataError(f"invalid model file {path}: {e}") from e
    return model


def load_params(path: Union[str, Path]) -> MnntsParams:
    return load_model(path).to_params()
