"""Dataset container shared by the screeners, generators and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

__all__ = ["Dataset"]


@dataclass(frozen=True)
class Dataset:
    """A response vector, covariate matrix and optional exposure vector.

    Parameters
    ----------
    y : ndarray, shape (n,)
        Response (continuous or discrete).
    x : ndarray, shape (n, p)
        Covariate matrix, one predictor per column.
    z : ndarray, shape (n,), optional
        Exposure / conditioning variable used by the partial-correlation
        screeners.
    x_names : list of str, optional
        Column labels; defaults to ``x0001 ...`` when omitted.
    """

    y: np.ndarray
    x: np.ndarray
    z: np.ndarray | None = None
    y_name: str = "y"
    z_name: str | None = None
    x_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 2:
            raise InvalidInput("covariate matrix must be two-dimensional")
        if y.ndim != 1:
            raise InvalidInput("response must be one-dimensional")
        if y.shape[0] != x.shape[0]:
            raise InvalidInput(
                f"response length {y.shape[0]} != number of rows {x.shape[0]}"
            )
        if x.shape[1] < 1:
            raise InvalidInput("dataset has no covariate columns")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        if self.z is not None:
            z = np.asarray(self.z, dtype=float)
            if z.shape != y.shape:
                raise InvalidInput("exposure must match the response length")
            object.__setattr__(self, "z", z)
        if not self.x_names:
            width = max(4, len(str(x.shape[1])))
            object.__setattr__(
                self, "x_names", [f"x{j + 1:0{width}d}" for j in range(x.shape[1])]
            )
        elif len(self.x_names) != x.shape[1]:
            raise InvalidInput("x_names length does not match number of columns")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def require_finite(self):
        """Raise InvalidInput naming the first offending column."""
        if not np.all(np.isfinite(self.y)):
            raise InvalidInput(f"response column '{self.y_name}' contains "
                               "NaN or infinite values")
        bad = ~np.all(np.isfinite(self.x), axis=0)
        if np.any(bad):
            j = int(np.flatnonzero(bad)[0])
            raise InvalidInput(
                f"covariate column '{self.x_names[j]}' contains NaN or "
                "infinite values"
            )
        if self.z is not None and not np.all(np.isfinite(self.z)):
            raise InvalidInput(
                f"exposure column '{self.z_name or 'z'}' contains NaN or "
                "infinite values"
            )
