"""Brute-force certification on tiny instances.

Channels are enumerated on a grid: every kernel row (one per joint cell) is
a composition of ``steps`` mass quanta into ``q_cardinality`` parts.  The
sweep yields grid minima of scalarized objectives and of the z = 0 slice
sum, which certify the true support only up to grid granularity; they are
reported "certified at resolution 1/steps" and validated empirically by
refinement (halving the quantum) rather than by analytic error bars.

The reductions exploit one exact symmetry: tension is invariant under
relabeling the q symbols, so the first positive-mass row can be restricted
to non-increasing compositions.  Point listings do not prune.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels
from .errors import BudgetExceededError, ValidationError
from .prob import Alphabet, Channel, JointPMF, TensionPoint
from .regions import CertifiedFact

#: enumeration guard defaults: cells, q letters, grid steps
DEFAULT_MAX_CELLS = 4
DEFAULT_MAX_Q = 4
DEFAULT_MAX_STEPS = 8


@dataclass(frozen=True)
class GridSpec:
    """Grid resolution for exhaustive channel enumeration.

    ``budget`` bounds the full enumeration size m**cells, where m is the
    number of compositions of ``steps`` into ``q_cardinality`` parts.
    """

    q_cardinality: int
    steps: int
    budget: int = 1_200_000_000
    max_points: int = 2_000_000

    def __post_init__(self) -> None:
        if self.q_cardinality < 1:
            raise ValidationError("q_cardinality must be >= 1")
        if self.steps < 1:
            raise ValidationError("steps must be >= 1")

    @property
    def n_compositions(self) -> int:
        return comb(self.steps + self.q_cardinality - 1, self.q_cardinality - 1)

    def enumeration_size(self, n_cells: int) -> int:
        return self.n_compositions**n_cells

    @property
    def resolution(self) -> str:
        return f"1/{self.steps}"


def compositions(steps: int, parts: int) -> np.ndarray:
    """All integer vectors of length ``parts`` summing to ``steps``, in
    lexicographic order (first coordinate ascending)."""
    if parts == 1:
        return np.array([[steps]], dtype=np.int64)
    rows = []
    for first in range(steps + 1):
        rest = compositions(steps - first, parts - 1)
        block = np.empty((rest.shape[0], parts), dtype=np.int64)
        block[:, 0] = first
        block[:, 1:] = rest
        rows.append(block)
    return np.vstack(rows)


def _comp_table(g: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composition rows as probabilities, their entropies, and the canonical
    head indices (non-increasing rows) for the relabeling symmetry."""
    raw = compositions(g.steps, g.q_cardinality)
    table = raw.astype(np.float64) / g.steps
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(table > 0.0, np.log2(np.where(table > 0.0, table, 1.0)), 0.0)
    rowent = -(table * logs).sum(axis=1)
    heads = np.nonzero((np.diff(raw, axis=1) <= 0).all(axis=1))[0].astype(np.int64)
    return table, rowent, heads


def _check_budget(j: JointPMF, g: GridSpec) -> None:
    size = g.enumeration_size(j.nx * j.ny)
    if size > g.budget:
        raise BudgetExceededError(
            f"enumeration of {g.n_compositions}^{j.nx * j.ny} = {size:.3e} grid "
            f"channels exceeds the budget {g.budget:.3e}"
        )


@dataclass(frozen=True)
class OracleBound:
    """A grid minimum with its witness; certified at the grid resolution."""

    lam: tuple[float, float, float]
    value: float
    witness: Channel
    resolution: str
    n_channels: int

    def as_certified_fact(self, source: str = "oracle grid") -> CertifiedFact:
        return CertifiedFact(
            kind="halfspace",
            value=max(self.value, 0.0),
            lam=self.lam,
            source=source,
            resolution=self.resolution,
        )


def _expand_witness(
    j: JointPMF, g: GridSpec, table: np.ndarray, choice: np.ndarray
) -> Channel:
    """Grid channel from per-positive-row composition indices.

    Zero-mass rows (skipped by the sweep, irrelevant to the tension) get the
    first composition so the kernel stays row-stochastic.
    """
    flat = j.mass.ravel()
    rows = np.nonzero(flat > 0.0)[0]
    kernel = np.tile(table[0], (j.nx * j.ny, 1))
    for r, c in zip(rows, choice):
        kernel[r] = table[int(c)]
    return Channel(Alphabet.of_size(g.q_cardinality, prefix="q"), kernel)


def brute_force_support(
    j: JointPMF,
    lams: list[tuple[float, float, float]] | tuple[float, float, float],
    g: GridSpec,
) -> list[OracleBound] | OracleBound:
    """Grid minima of lam . T over all grid channels, with witnesses.

    Accepts one direction or a batch (one sweep covers all directions).
    """
    single = isinstance(lams, tuple)
    lam_list = [lams] if single else list(lams)
    _check_budget(j, g)
    table, rowent, heads = _comp_table(g)
    lam_arr = np.array(lam_list, dtype=np.float64)
    minima, argmin, _smin, _sarg, n_leaves = _kernels.oracle_sweep(
        j.mass, table, rowent, heads, lam_arr, -1.0
    )
    out = [
        OracleBound(
            lam=tuple(lam_list[i]),
            value=float(minima[i]),
            witness=_expand_witness(j, g, table, argmin[i]),
            resolution=g.resolution,
            n_channels=int(n_leaves),
        )
        for i in range(len(lam_list))
    ]
    return out[0] if single else out


@dataclass(frozen=True)
class OracleSliceBound:
    """Grid minimum of r1+r2 over channels with r3 <= z_tol."""

    value: float
    z_tol: float
    witness: Channel | None
    resolution: str
    n_channels: int

    def as_certified_fact(self, source: str = "oracle grid") -> CertifiedFact:
        return CertifiedFact(
            kind="slice_sum",
            value=max(self.value, 0.0),
            source=source,
            resolution=f"{self.resolution}, z_tol={self.z_tol}",
        )


def brute_force_slice_min(j: JointPMF, g: GridSpec, z_tol: float = 0.01) -> OracleSliceBound:
    """Certified-at-resolution slice target: min r1+r2 subject to r3 <= z_tol."""
    _check_budget(j, g)
    table, rowent, heads = _comp_table(g)
    lam_arr = np.zeros((0, 3))
    _minima, _argmin, smin, sarg, n_leaves = _kernels.oracle_sweep(
        j.mass, table, rowent, heads, lam_arr, z_tol
    )
    witness = None if not np.isfinite(smin) else _expand_witness(j, g, table, sarg)
    return OracleSliceBound(
        value=float(smin),
        z_tol=z_tol,
        witness=witness,
        resolution=g.resolution,
        n_channels=int(n_leaves),
    )


def brute_force_points(j: JointPMF, g: GridSpec) -> np.ndarray:
    """Tension points of every grid channel, in enumeration order.

    Materializes the full (unpruned) listing, so it refuses beyond
    ``g.max_points`` channels; use the streaming reductions for large grids.
    """
    n_cells = j.nx * j.ny
    size = g.enumeration_size(n_cells)
    if size > g.max_points:
        raise BudgetExceededError(
            f"listing {g.n_compositions}^{n_cells} = {size:.3e} grid channels "
            f"exceeds max_points {g.max_points:.3e}; use brute_force_support "
            f"or brute_force_slice_min instead"
        )
    table, _rowent, _heads = _comp_table(g)
    m = g.n_compositions
    points = np.empty((size, 3))
    chunk = max(1, min(size, 1 << 14))
    for start in range(0, size, chunk):
        stop = min(start + chunk, size)
        idxs = np.arange(start, stop, dtype=np.int64)
        rem = idxs.copy()
        cidx = np.empty((n_cells, idxs.size), dtype=np.int64)
        for r in range(n_cells - 1, -1, -1):
            cidx[r] = rem % m
            rem //= m
        points[start:stop] = _points_block(j, table, cidx)
    return points


def _points_block(j: JointPMF, table: np.ndarray, cidx: np.ndarray) -> np.ndarray:
    """Vectorized tension triples for a block of channels (indices per cell)."""
    nx, ny = j.nx, j.ny
    nq = table.shape[1]
    b = cidx.shape[1]
    flat = j.mass.ravel()

    def phi2(t):
        out = np.zeros_like(t)
        mask = t > 0.0
        out[mask] = -t[mask] * np.log2(t[mask])
        return out

    pxq = np.zeros((b, nx, nq))
    pyq = np.zeros((b, ny, nq))
    hof = np.zeros(b)
    rowent = phi2(table).sum(axis=1)
    for r in range(nx * ny):
        pr = flat[r]
        if pr <= 0.0:
            continue
        wc = table[cidx[r]] * pr
        pxq[:, r // ny, :] += wc
        pyq[:, r % ny, :] += wc
        hof += pr * rowent[cidx[r]]
    h_xy = phi2(flat).sum()
    h_x = phi2(j.x_marginal).sum()
    h_y = phi2(j.y_marginal).sum()
    h_xq = phi2(pxq).sum(axis=(1, 2))
    h_yq = phi2(pyq).sum(axis=(1, 2))
    h_q = phi2(pxq.sum(axis=1)).sum(axis=1)
    h_xyq = h_xy + hof
    i1 = (h_xy - h_x) + h_xq - h_xyq
    i2 = (h_xy - h_y) + h_yq - h_xyq
    i3 = h_xq + h_yq - h_q - h_xyq
    return np.clip(np.column_stack([i1, i2, i3]), 0.0, None)


def grid_channel(j: JointPMF, g: GridSpec, flat_index: int) -> Channel:
    """The channel at a given position of the (unpruned) enumeration order."""
    n_cells = j.nx * j.ny
    size = g.enumeration_size(n_cells)
    if not 0 <= flat_index < size:
        raise ValidationError(f"flat_index {flat_index} outside [0, {size})")
    table, _rowent, _heads = _comp_table(g)
    m = g.n_compositions
    rows = np.empty((n_cells, g.q_cardinality))
    rem = flat_index
    for r in range(n_cells - 1, -1, -1):
        rows[r] = table[rem % m]
        rem //= m
    return Channel(Alphabet.of_size(g.q_cardinality, prefix="q"), rows)


def tension_points_match(j: JointPMF, g: GridSpec, points: np.ndarray, indices: list[int]) -> bool:
    """Spot-check that listed points reproduce through the tension evaluation."""
    from .prob import tension_of

    for i in indices:
        expect = TensionPoint(*points[i])
        got = tension_of(j, grid_channel(j, g, i))
        if np.max(np.abs(got.as_array() - expect.as_array())) > 1e-9:
            return False
    return True
