"""Dataset container, validation, CSV I/O and seeded simulation.

The data model is binary probit regression: responses y_i in {0, 1},
covariate rows x_i, coefficient prior beta ~ N_p(0, nu2 * I).  The CSV
layout is one row per observation, first column y, remaining columns
the covariates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr


class DataError(ValueError):
    """Base class for dataset validation failures."""


class DimensionMismatch(DataError):
    pass


class NonBinaryResponse(DataError):
    pass


class NonFiniteCovariate(DataError):
    pass


class ParseError(DataError):
    """CSV parse failure; carries 1-based row/column location."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.row = row
        self.column = column


@dataclass(frozen=True)
class Dataset:
    """Validated design matrix and binary response vector."""

    X: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class PriorConfig:
    """Isotropic Gaussian prior N_p(0, nu2 * I)."""

    nu2: float

    def __post_init__(self):
        if not (math.isfinite(self.nu2) and self.nu2 > 0):
            raise ValueError(f"nu2 must be finite and positive, got {self.nu2}")


@dataclass(frozen=True)
class SimConfig:
    """Synthetic-data configuration; beta_gen is 'prior' or 'fixed_unit'."""

    n: int
    p: int
    seed: int
    beta_gen: str = field(default="prior")

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError(f"n and p must be >= 1, got n={self.n}, p={self.p}")
        if self.beta_gen not in ("prior", "fixed_unit"):
            raise ValueError(f"unknown beta_gen {self.beta_gen!r}")


def validate(raw_X, raw_y) -> Dataset:
    """Coerce raw arrays into a Dataset, checking every invariant."""
    X = np.asarray(raw_X, dtype=float)
    y = np.asarray(raw_y)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
    if y.ndim != 1:
        raise DimensionMismatch(f"y must be 1-d, got shape {y.shape}")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
        )
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionMismatch(f"need n >= 1 and p >= 1, got X shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteCovariate("X contains NaN or Inf")
    if not np.all(np.isin(y, (0, 1))):
        bad = y[~np.isin(y, (0, 1))][0]
        raise NonBinaryResponse(f"y entries must be 0 or 1, found {bad!r}")
    y = y.astype(np.int64)
    X = np.ascontiguousarray(X)
    X.setflags(write=False)
    y.setflags(write=False)
    return Dataset(X=X, y=y)


def load_csv(path, has_header: bool = False) -> Dataset:
    """Read a dataset CSV: column 1 is y, columns 2..p+1 are covariates."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if lineno == 1 and has_header:
                continue
            if not cells:
                continue
            rows.append((lineno, cells))
    if not rows:
        raise ParseError(f"no data rows in {path}")
    width = len(rows[0][1])
    if width < 2:
        raise ParseError("need at least one covariate column", row=rows[0][0])
    y_raw = []
    X_rows = []
    for lineno, cells in rows:
        if len(cells) != width:
            raise ParseError(
                f"expected {width} columns, got {len(cells)}", row=lineno
            )
        try:
            yval = float(cells[0])
        except ValueError:
            raise ParseError(f"bad response value {cells[0]!r}", row=lineno, column=1)
        if yval not in (0.0, 1.0):
            raise NonBinaryResponse(
                f"y entries must be 0 or 1, found {cells[0]!r} at row {lineno}"
            )
        x_row = []
        for j, cell in enumerate(cells[1:], start=2):
            try:
                x_row.append(float(cell))
            except ValueError:
                raise ParseError(f"bad covariate value {cell!r}", row=lineno, column=j)
        y_raw.append(int(yval))
        X_rows.append(x_row)
    return validate(np.array(X_rows, dtype=float), np.array(y_raw))


def save_csv(data: Dataset, path) -> None:
    """Write a dataset in the load_csv layout, round-trip exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for i in range(data.n):
            # 17 significant digits round-trips any double exactly
            writer.writerow(
                [str(int(data.y[i]))] + [f"{v:.17g}" for v in data.X[i]]
            )


def simulate(cfg: SimConfig, prior: PriorConfig) -> tuple[Dataset, np.ndarray]:
    """Draw a synthetic probit dataset; deterministic given cfg.seed.

    X entries are i.i.d. standard normal.  beta is drawn from the prior
    (beta_gen='prior') or set to alternating +/-1 ('fixed_unit').  Each
    stream (X, beta, y) gets its own child of the seed so changing one
    dimension of the problem never shifts another stream.
    """
    ss_x, ss_beta, ss_y = np.random.SeedSequence(cfg.seed).spawn(3)
    rng_x = np.random.default_rng(ss_x)
    rng_beta = np.random.default_rng(ss_beta)
    rng_y = np.random.default_rng(ss_y)

    X = rng_x.standard_normal((cfg.n, cfg.p))
    if cfg.beta_gen == "prior":
        beta = rng_beta.standard_normal(cfg.p) * math.sqrt(prior.nu2)
    else:
        beta = np.where(np.arange(cfg.p) % 2 == 0, 1.0, -1.0)
    y = (rng_y.random(cfg.n) < ndtr(X @ beta)).astype(np.int64)
    return validate(X, y), beta
