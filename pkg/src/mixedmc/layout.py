"""Column-block typing of the data matrix and observation-mask generation.

The ``n1 x n2`` matrix is partitioned column-wise into contiguous typed
blocks, each carrying one exponential-family model.  Observation masks are
independent Bernoulli draws per entry, either at a uniform rate or from a
per-entry probability matrix.

Masks are plain boolean ndarrays of shape ``(n1, n2)``; they serialize as
0/1 CSV.  Layouts serialize as text with one block per line::

    gaussian 10
    gamma:2.0 100
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expfam import ExpFamModel


@dataclass(frozen=True)
class ColumnBlockLayout:
    """Ordered, contiguous partition of the columns into typed blocks."""

    n1: int
    blocks: tuple[tuple[ExpFamModel, int], ...]

    def __post_init__(self):
        if self.n1 < 1:
            raise ValueError(f"n1 must be >= 1, got {self.n1}")
        blocks = tuple((m, int(w)) for m, w in self.blocks)
        if not blocks or any(w < 1 for _, w in blocks):
            raise ValueError("layout needs at least one block, all widths >= 1")
        object.__setattr__(self, "blocks", blocks)
        offsets = np.concatenate([[0], np.cumsum([w for _, w in blocks])])
        object.__setattr__(self, "_offsets", offsets)

    @property
    def n2(self) -> int:
        """Total number of columns across blocks."""
        return int(self._offsets[-1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    def block_of(self, j: int) -> tuple[int, ExpFamModel]:
        """Block index and model owning column ``j``; O(log blocks)."""
        if not 0 <= j < self.n2:
            raise IndexError(f"column {j} out of range [0, {self.n2})")
        idx = int(np.searchsorted(self._offsets, j, side="right")) - 1
        return idx, self.blocks[idx][0]

    def block_slices(self):
        """Yield (block index, model, column slice) per block, in order."""
        for idx, (model, _) in enumerate(self.blocks):
            yield idx, model, slice(int(self._offsets[idx]), int(self._offsets[idx + 1]))

    def to_text(self) -> str:
        return "".join(f"{m.token} {w}\n" for m, w in self.blocks)

    @classmethod
    def from_text(cls, text: str, n1: int) -> "ColumnBlockLayout":
        blocks = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"layout line {lineno}: expected '<kind>[:<nuisance>] <width>'")
            blocks.append((ExpFamModel.from_token(parts[0]), int(parts[1])))
        return cls(n1, tuple(blocks))


@dataclass(frozen=True)
class SamplingScheme:
    """Per-entry Bernoulli observation probabilities.

    Either uniform at ``rate`` or non-uniform with a full probability
    matrix; all probabilities must lie in (0, 1].  ``p_floor`` is the
    minimum observation probability, the quantity the recovery theory
    depends on.
    """

    rate: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if (self.rate is None) == (self.matrix is None):
            raise ValueError("exactly one of rate / matrix must be given")
        if self.rate is not None and not (0 < self.rate <= 1):
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")
        if self.matrix is not None:
            m = np.asarray(self.matrix, float)
            if m.ndim != 2 or np.any(m <= 0) or np.any(m > 1):
                raise ValueError("probability matrix must be 2-D with entries in (0, 1]")
            object.__setattr__(self, "matrix", m)

    @classmethod
    def uniform(cls, p: float) -> "SamplingScheme":
        return cls(rate=p)

    @classmethod
    def non_uniform(cls, pi) -> "SamplingScheme":
        return cls(matrix=np.asarray(pi, float))

    @property
    def p_floor(self) -> float:
        return float(self.rate) if self.rate is not None else float(self.matrix.min())

    def probabilities(self, n1: int, n2: int) -> np.ndarray:
        if self.rate is not None:
            return np.full((n1, n2), self.rate)
        if self.matrix.shape != (n1, n2):
            raise ValueError(f"probability matrix shape {self.matrix.shape} != ({n1}, {n2})")
        return self.matrix


def make_mask(scheme: SamplingScheme, n1: int, n2: int, rng: np.random.Generator):
    """Independent Bernoulli observation indicators, one coin per entry."""
    probs = scheme.probabilities(n1, n2)
    return rng.random((n1, n2)) < probs


def apply_mask(x, mask):
    """Zero out unobserved entries, keeping observed ones unchanged."""
    x = np.asarray(x, float)
    mask = np.asarray(mask, bool)
    if x.shape != mask.shape:
        raise ValueError(f"shape mismatch: data {x.shape} vs mask {mask.shape}")
    return np.where(mask, x, 0.0)
