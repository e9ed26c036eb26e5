"""Classical multidimensional scaling of optimized parameter vectors.

Angles are periodic, so the dissimilarity between two parameter vectors is
d(a, b) = sum_i (1 - cos(a_i - b_i)), which vanishes iff every component
agrees modulo 2 pi.
"""

from dataclasses import dataclass

import numpy as np

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class Embedding:
    points: np.ndarray  # (m, 2)
    eigenvalues: np.ndarray  # top two eigenvalues of the centered Gram matrix
    degenerate: bool


def periodic_dissimilarity(thetas):
    thetas = np.asarray(thetas, dtype=float)
    diff = thetas[:, None, :] - thetas[None, :, :]
    return np.sum(1.0 - np.cos(diff), axis=-1)


def classical_mds(dissimilarity, dims=2):
    """Embed a symmetric dissimilarity matrix with Torgerson's method.

    The matrix is treated as distances, squared and double centered. Negative
    eigenvalues (non-Euclidean residue) are clipped to zero.
    """
    d = np.asarray(dissimilarity, dtype=float)
    m = d.shape[0]
    if d.shape != (m, m):
        raise ValueError("dissimilarity matrix must be square")
    j = np.eye(m) - 1.0 / m
    b = -0.5 * j @ (d**2) @ j
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(vals)[::-1][:dims]
    vals = np.clip(vals[order], 0.0, None)
    coords = vecs[:, order] * np.sqrt(vals)
    if coords.shape[1] < dims:
        coords = np.hstack([coords, np.zeros((m, dims - coords.shape[1]))])
    return coords, vals


def mds_embed(thetas, dims=2):
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2:
        raise ValueError("expected a list of equal-length parameter vectors")
    if thetas.shape[0] < 3:
        raise ValueError("need at least 3 points")
    d = periodic_dissimilarity(thetas)
    if np.max(d) < DEGENERATE_TOL:
        return Embedding(np.zeros((len(thetas), dims)), np.zeros(dims), True)
    coords, vals = classical_mds(d, dims)
    return Embedding(coords, vals, False)
