"""Synthetic low-rank mixed-type instances and error metrics.

Truth matrices are rank-``r`` Gaussian factor products rescaled to a target
sup-norm; column blocks with a negative canonical domain (gamma, negbin)
are affinely remapped into ``[-gamma, -eps]``, which can raise the rank by
one (the shift is rank-one).  Observations sample each entry from its
block's distribution at the true canonical parameter and zero out entries
the mask hides.

Instances serialize to a directory: ``theta.csv``, ``y.csv``, ``mask.csv``,
``layout.txt`` and a ``meta`` file of ``key=value`` lines.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import expfam
from .expfam import DOMAIN_EPS, NEGATIVE_DOMAIN_KINDS
from .fileio import read_matrix, write_matrix
from .layout import ColumnBlockLayout, SamplingScheme, apply_mask, make_mask


@dataclass(frozen=True)
class SyntheticInstance:
    """One generated problem: truth, layout, sampled data, and mask."""

    theta_true: np.ndarray
    layout: ColumnBlockLayout
    y_full: np.ndarray
    mask: np.ndarray
    seed: int
    rank_target: int
    gamma: float
    shifted_blocks: tuple[int, ...] = ()

    @property
    def y_observed(self) -> np.ndarray:
        return apply_mask(self.y_full, self.mask)


def gen_low_rank_theta(n1: int, n2: int, rank: int, gamma: float,
                       layout: ColumnBlockLayout, rng: np.random.Generator):
    """Random rank-``rank`` canonical truth with sup-norm ``gamma``.

    Builds ``A @ B.T`` with i.i.d. standard-normal factors, rescales to
    ``||theta||_inf == gamma``, then maps each negative-domain block
    affinely onto ``[-gamma, -DOMAIN_EPS]``.  Returns the matrix and the
    indices of shifted blocks.
    """
    if rank > min(n1, n2):
        raise ValueError(f"rank {rank} exceeds min(n1, n2) = {min(n1, n2)}")
    if layout.shape != (n1, n2):
        raise ValueError(f"layout shape {layout.shape} != ({n1}, {n2})")
    a = rng.standard_normal((n1, rank))
    b = rng.standard_normal((n2, rank))
    theta = a @ b.T
    theta *= gamma / np.abs(theta).max()

    shifted = []
    eps = 1.001 * DOMAIN_EPS  # margin keeps fp rounding below -DOMAIN_EPS
    for idx, model, cols in layout.block_slices():
        if model.kind not in NEGATIVE_DOMAIN_KINDS:
            continue
        block = theta[:, cols]
        m = np.abs(block).max()
        if m == 0.0:
            theta[:, cols] = -0.5 * (gamma + eps)
        else:
            # affine [-m, m] -> [-gamma, -eps]; the shift is rank one
            scale = (gamma - eps) / (2.0 * m)
            theta[:, cols] = scale * block - 0.5 * (gamma + eps)
        shifted.append(idx)
    return theta, tuple(shifted)


def gen_observed(theta_true, layout: ColumnBlockLayout, mask, rng: np.random.Generator):
    """Sample each entry from its block's model, zeroing unobserved entries."""
    theta_true = np.asarray(theta_true, float)
    y = np.empty_like(theta_true)
    for _, model, cols in layout.block_slices():
        y[:, cols] = expfam.sample(model, theta_true[:, cols], rng)
    return apply_mask(y, mask)


def make_instance(layout: ColumnBlockLayout, rank: int, gamma: float,
                  scheme: SamplingScheme, seed: int) -> SyntheticInstance:
    """Generate truth, mask, and observations from one seed."""
    rng = np.random.default_rng(seed)
    n1, n2 = layout.shape
    theta, shifted = gen_low_rank_theta(n1, n2, rank, gamma, layout, rng)
    mask = make_mask(scheme, n1, n2, rng)
    y = gen_observed(theta, layout, mask, rng)
    return SyntheticInstance(
        theta_true=theta, layout=layout, y_full=y, mask=mask,
        seed=seed, rank_target=rank, gamma=gamma, shifted_blocks=shifted,
    )


def relative_error(theta_hat, theta_true, layout: ColumnBlockLayout):
    """Per-block and overall relative Frobenius error on the canonical scale.

    Returns ``(overall, per_block)`` where each entry is
    ``||hat - true||_F / ||true||_F`` over the corresponding columns.
    """
    theta_hat = np.asarray(theta_hat, float)
    theta_true = np.asarray(theta_true, float)
    if theta_hat.shape != theta_true.shape or theta_hat.shape != layout.shape:
        raise ValueError("shape mismatch between estimates, truth, and layout")
    per_block = []
    for _, _, cols in layout.block_slices():
        denom = np.linalg.norm(theta_true[:, cols])
        num = np.linalg.norm(theta_hat[:, cols] - theta_true[:, cols])
        per_block.append(float(num / denom) if denom > 0 else float(num > 0))
    overall = float(np.linalg.norm(theta_hat - theta_true) / np.linalg.norm(theta_true))
    return overall, per_block


def weighted_frobenius(a, scheme: SamplingScheme) -> float:
    """Frobenius norm weighted by observation probabilities:
    sqrt(sum pi_ij a_ij^2)."""
    a = np.asarray(a, float)
    probs = scheme.probabilities(*a.shape)
    return float(np.sqrt((probs * a**2).sum()))


def save_instance(inst: SyntheticInstance, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    write_matrix(os.path.join(directory, "theta.csv"), inst.theta_true)
    write_matrix(os.path.join(directory, "y.csv"), inst.y_observed)
    write_matrix(os.path.join(directory, "mask.csv"), inst.mask.astype(int), fmt="%d")
    with open(os.path.join(directory, "layout.txt"), "w") as fh:
        fh.write(inst.layout.to_text())
    meta = {
        "seed": inst.seed,
        "rank": inst.rank_target,
        "gamma": inst.gamma,
        "n1": inst.layout.n1,
        "shifted_blocks": ",".join(map(str, inst.shifted_blocks)),
    }
    with open(os.path.join(directory, "meta"), "w") as fh:
        for key, value in meta.items():
            fh.write(f"{key}={value}\n")


def load_instance(directory: str) -> SyntheticInstance:
    meta = {}
    with open(os.path.join(directory, "meta")) as fh:
        for line in fh:
            key, _, value = line.strip().partition("=")
            meta[key] = value
    with open(os.path.join(directory, "layout.txt")) as fh:
        layout = ColumnBlockLayout.from_text(fh.read(), int(meta["n1"]))
    theta = read_matrix(os.path.join(directory, "theta.csv"))
    y = read_matrix(os.path.join(directory, "y.csv"))
    mask = read_matrix(os.path.join(directory, "mask.csv")).astype(bool)
    shifted = tuple(int(s) for s in meta["shifted_blocks"].split(",") if s)
    return SyntheticInstance(
        theta_true=theta, layout=layout, y_full=y, mask=mask,
        seed=int(meta["seed"]), rank_target=int(meta["rank"]),
        gamma=float(meta["gamma"]), shifted_blocks=shifted,
    )
