"""
Angular datasets: CSV ingestion and export, synthetic wind-direction data.

Angles are radians in [0, 2pi) internally. Degrees are accepted on input
and converted on ingestion.
"""

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .config import UNITS
from .config_default import load_settings
from .core import TWO_PI, wrap_angles
from .errors import ArgumentError, DataError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def check_unit(unit: Optional[str]) -> str:
    unit = (unit or load_settings().default_unit).lower()
    if unit not in UNITS:
        raise ArgumentError(f"unknown unit {unit!r}, expected one of {', '.join(UNITS)}")
    return unit


@dataclass(frozen=True, eq=False)
class AngularDataset:
    """n_obs x n_vars angles (radians, [0, 2pi)) with variable names."""

    var_names: Tuple[str, ...]
    rows: np.ndarray
    source_unit: str = "radians"
    dropped: int = 0

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ArgumentError(f"dataset rows must be 2-D, got shape {rows.shape}")
        names = tuple(str(name) for name in self.var_names)
        if len(names) != rows.shape[1]:
            raise ArgumentError(f"{len(names)} variable names for {rows.shape[1]} columns")
        if len(set(names)) != len(names):
            raise ArgumentError(f"duplicate variable names in {names}")
        if not np.all(np.isfinite(rows)):
            raise DataError("dataset contains non-finite angles")
        rows = wrap_angles(rows)
        rows.setflags(write=False)
        object.__setattr__(self, "var_names", names)
        object.__setattr__(self, "rows", rows)

    @property
    def n_obs(self) -> int:
        return self.rows.shape[0]

    @property
    def n_vars(self) -> int:
        return self.rows.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.var_names.index(name)]
        except ValueError:
            raise ArgumentError(f"no variable named {name!r}") from None

    def select(self, indices: Iterable[int]) -> "AngularDataset":
        """Columns at the given 1-based positions, in the given order."""
        indices = [int(i) for i in indices]
        for i in indices:
            if not 1 <= i <= self.n_vars:
                raise ArgumentError(f"variable index {i} outside 1..{self.n_vars}")
        return AngularDataset(
            tuple(self.var_names[i - 1] for i in indices),
            self.rows[:, [i - 1 for i in indices]],
            self.source_unit,
            self.dropped,
        )

    def ranges(self) -> Dict[str, Tuple[float, float]]:
        """(min, max) of every column in radians."""
        if self.n_obs == 0:
            return {}
        return {
            name: (float(self.rows[:, i].min()), float(self.rows[:, i].max()))
            for i, name in enumerate(self.var_names)
        }

    def to_frame(self, unit: str = "radians") -> pd.DataFrame:
        values = np.rad2deg(self.rows) if check_unit(unit) == "degrees" else self.rows
        return pd.DataFrame(values, columns=list(self.var_names))


def _to_float(cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        return np.nan


def _bad_cell(frame: pd.DataFrame, bad: pd.DataFrame) -> Tuple[int, str, str]:
    row = int(np.flatnonzero(bad.to_numpy().any(axis=1))[0])
    col = bad.columns[int(np.flatnonzero(bad.iloc[row].to_numpy())[0])]
    return row, str(col), frame.iloc[row][col]


def ingest_csv(
    path: PathLike, unit: Optional[str] = None, missing_token: Optional[str] = None
) -> AngularDataset:
    """
    Read a CSV with a header row of variable names and numeric angle cells.

    Rows containing missing_token are dropped and counted. Any other cell
    that is not a finite number is an error reported with its file line
    and column.
    """
    unit = check_unit(unit)
    missing_token = load_settings().missing_token if missing_token is None else missing_token
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read {path}: {e}") from e
    if frame.shape[1] == 0:
        raise DataError(f"{path} has no columns")

    frame = frame.apply(lambda col: col.str.strip())
    missing = frame == missing_token
    values = frame.apply(lambda col: col.map(_to_float)).astype(np.float64)
    unparsed = (values.isna() | ~np.isfinite(values)) & ~missing
    if unparsed.to_numpy().any():
        row, col, cell = _bad_cell(frame, unparsed)
        # data row 0 sits on file line 2, below the header
        raise DataError(f"{path}:{row + 2}: column {col!r}: cannot parse {cell!r} as an angle")

    keep = ~missing.to_numpy().any(axis=1)
    dropped = int(np.count_nonzero(~keep))
    rows = values.to_numpy()[keep]
    if rows.shape[0] == 0:
        raise DataError(f"{path}: no complete rows after dropping {dropped} with missing values")
    if unit == "degrees":
        rows = np.deg2rad(np.mod(rows, 360.0))

    dataset = AngularDataset(tuple(frame.columns), wrap_angles(rows), unit, dropped)
    logger.info("ingested %s: %d rows, %d dropped", path, dataset.n_obs, dropped)
    for name, (lo, hi) in dataset.ranges().items():
        logger.debug("  %s: [%.6f, %.6f] rad", name, lo, hi)
    return dataset


def write_frame(frame: pd.DataFrame, path: Optional[PathLike]) -> None:
    """CSV with a header row, LF line endings and 17 significant digits; None writes to stdout."""
    if path is None:
        frame.to_csv(sys.stdout, index=False, float_format="%.17g", lineterminator="\n")
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")


def write_csv(
    dataset: AngularDataset,
    path: Optional[PathLike],
    unit: str = "radians",
    missing: Optional[np.ndarray] = None,
    missing_token: str = "NA",
) -> None:
    """Write a dataset; cells flagged in the boolean `missing` mask are written as missing_token."""
    frame = dataset.to_frame(unit)
    if missing is not None:
        mask = np.asarray(missing, dtype=bool)
        if mask.shape != frame.shape:
            raise ArgumentError(f"missing mask has shape {mask.shape}, data {frame.shape}")
        frame = frame.astype(object).mask(mask, missing_token)
        frame = frame.apply(lambda col: col.map(lambda v: v if isinstance(v, str) else f"{v:.17g}"))
    write_frame(frame, path)


def synthetic_wind_dataset(
    n_obs: int = 2017,
    seed: int = 0,
    names: Optional[Sequence[str]] = None,
) -> AngularDataset:
    """
    Dependent daily wind directions at seven stations.

    A regional direction alternates between two von Mises regimes; each
    station follows it with its own offset and local von Mises noise, so
    nearby stations are positively correlated and one station sits
    mostly opposite the regional flow.
    """
    if n_obs < 1:
        raise ArgumentError("n_obs must be >= 1")
    names = tuple(names) if names else tuple(f"station{i}" for i in range(1, 8))
    n_vars = len(names)
    rng = np.random.default_rng(seed)

    regime = rng.random(n_obs) < 0.65
    regional = np.where(
        regime,
        rng.vonmises(np.deg2rad(20.0), 2.5, n_obs),
        rng.vonmises(np.deg2rad(200.0), 1.5, n_obs),
    )
    offsets = np.deg2rad(np.linspace(-30.0, 30.0, n_vars))
    offsets[-1] = np.pi
    concentration = np.linspace(6.0, 1.5, n_vars)

    rows = np.empty((n_obs, n_vars))
    for s in range(n_vars):
        rows[:, s] = regional + offsets[s] + rng.vonmises(0.0, concentration[s], n_obs)
    return AngularDataset(names, np.mod(rows, TWO_PI), "radians")


def missing_mask(shape: Tuple[int, int], rate: float, seed: int = 0) -> np.ndarray:
    """Random cell mask with the given missing rate."""
    if not 0.0 <= rate < 1.0:
        raise ArgumentError("missing rate must be in [0, 1)")
    return np.random.default_rng(seed + 1).random(shape) < rate
