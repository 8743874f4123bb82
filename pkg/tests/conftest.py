"""Shared generators for seeded-random property tests."""

import numpy as np
import pytest

from tensionkit import Alphabet, Channel, JointPMF


def random_joint(rng, nx=None, ny=None, sparsity=0.0, concentration=1.0) -> JointPMF:
    """A random joint p.m.f.; ``sparsity`` zeroes cells (support stays nonempty)."""
    nx = nx or int(rng.integers(2, 5))
    ny = ny or int(rng.integers(2, 5))
    m = rng.gamma(concentration, size=(nx, ny))
    if sparsity > 0.0:
        m[rng.random((nx, ny)) < sparsity] = 0.0
        if m.sum() == 0.0:
            m[int(rng.integers(nx)), int(rng.integers(ny))] = 1.0
    m /= m.sum()
    return JointPMF(Alphabet.of_size(nx, "x"), Alphabet.of_size(ny, "y"), m)


def random_channel(rng, joint: JointPMF, nq=None) -> Channel:
    nq = nq or int(rng.integers(1, joint.nx * joint.ny + 3))
    k = rng.gamma(1.0, size=(joint.nx * joint.ny, nq))
    k /= k.sum(axis=1, keepdims=True)
    return Channel(Alphabet.of_size(nq, "q"), k)


def random_block_joint(rng, resolvable: bool) -> JointPMF:
    """Block-diagonal joint; resolvable iff blocks are internally independent."""
    n_blocks = int(rng.integers(1, 4))
    blocks = []
    for i in range(n_blocks):
        if resolvable:
            bx, by = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            block = np.outer(rng.random(bx) + 0.1, rng.random(by) + 0.1)
        elif i == 0:
            # force genuine within-block dependence so the pair cannot resolve
            block = np.array([[0.4, 0.1], [0.1, 0.4]]) + 0.05 * rng.random((2, 2))
        else:
            bx, by = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            block = rng.random((bx, by)) + 0.05
        blocks.append(block / block.sum())
    weights = rng.random(n_blocks) + 0.2
    weights /= weights.sum()
    nx = sum(b.shape[0] for b in blocks)
    ny = sum(b.shape[1] for b in blocks)
    m = np.zeros((nx, ny))
    ox = oy = 0
    for w, b in zip(weights, blocks):
        m[ox : ox + b.shape[0], oy : oy + b.shape[1]] = w * b
        ox += b.shape[0]
        oy += b.shape[1]
    m /= m.sum()
    return JointPMF(Alphabet.of_size(nx, "x"), Alphabet.of_size(ny, "y"), m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
