"""Shared dataclasses for module maps into functions-on-units."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModuleMap:
    """Linear map from arrow functions to unit functions, with a module side.

    ``matrix`` has shape (n_units, n_arrows); column x is the image of the
    point mass at arrow x.  A right map satisfies alpha(f b) = alpha(f) b for
    unit functions b acting on the range side; a left map satisfies
    beta(b f) = b beta(f) for the source-side action.
    """

    matrix: np.ndarray
    side: str

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    def __call__(self, f) -> np.ndarray:
        return self.matrix @ np.asarray(f, dtype=complex)
