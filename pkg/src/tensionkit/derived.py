"""Quantities derived from the tension region and from channels.

Includes the Gray-Wyner coordinates (H(X|Q), H(Y|Q), I(XY;Q)) and the
assisted-common-information coordinates (I(Y;Q|X), I(X;Q|Y), I(XY;Q)) of a
channel, the two affine maps carrying those rate regions onto the tension
region, Wyner common information through the z = 0 slice, and the two
corner rates of coding with a fully informed helper.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .optimize import OptimizerConfig, SlicePoint, slice_min_sum
from .prob import (
    AnyChannel,
    JointPMF,
    TensionPoint,
    _entropy_bits,
    joint_entropy,
    mutual_information,
)
from .structure import intercepts_exact

#: slack allowed on the lower-bound inequalities of Gray-Wyner points
GW_LOWER_SLACK = 1e-6


@dataclass(frozen=True)
class GrayWynerPoint:
    """(R_A, R_B, R_C): private rates and common rate, in bits."""

    ra: float
    rb: float
    rc: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.ra, self.rb, self.rc)


@dataclass(frozen=True)
class ACIPoint:
    """(r1, r2, r_CI): genie link rates and enabled common-information rate."""

    r1: float
    r2: float
    rci: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r1, self.r2, self.rci)


def _channel_marginal_entropies(j: JointPMF, c: AnyChannel) -> tuple[float, float, float]:
    """H(X|Q), H(Y|Q), I(XY;Q) without materializing the 3-tensor."""
    from .prob import DeterministicChannel

    if c.n_rows != j.nx * j.ny:
        raise DimensionMismatchError(
            f"channel has {c.n_rows} rows; joint has {j.nx * j.ny} cells"
        )
    if isinstance(c, DeterministicChannel):
        a = c.assignment
        pxq = np.zeros((j.nx, c.nq))
        np.add.at(pxq, (np.repeat(np.arange(j.nx), j.ny), a.ravel()), j.mass.ravel())
        pyq = np.zeros((j.ny, c.nq))
        np.add.at(pyq, (np.tile(np.arange(j.ny), j.nx), a.ravel()), j.mass.ravel())
        h_xyq = _entropy_bits(j.mass)  # Q is a function of (X, Y)
    else:
        w3 = c.kernel.reshape(j.nx, j.ny, c.nq)
        m3 = j.mass[:, :, None] * w3
        pxq = m3.sum(axis=1)
        pyq = m3.sum(axis=0)
        h_xyq = _entropy_bits(m3)
    h_q = _entropy_bits(pxq.sum(axis=0))
    h_x_given_q = _entropy_bits(pxq) - h_q
    h_y_given_q = _entropy_bits(pyq) - h_q
    i_xy_q = _entropy_bits(j.mass) + h_q - h_xyq
    return h_x_given_q, h_y_given_q, i_xy_q


def gray_wyner_point(j: JointPMF, c: AnyChannel) -> GrayWynerPoint:
    """The Gray-Wyner operating point (H(X|Q), H(Y|Q), I(XY;Q)) of a channel."""
    hx_q, hy_q, ixy_q = _channel_marginal_entropies(j, c)
    return GrayWynerPoint(ra=max(hx_q, 0.0), rb=max(hy_q, 0.0), rc=max(ixy_q, 0.0))


def aci_point(j: JointPMF, c: AnyChannel) -> ACIPoint:
    """The assisted-common-information point (I(Y;Q|X), I(X;Q|Y), I(XY;Q))."""
    from .prob import tension_of

    t = tension_of(j, c)
    _hx_q, _hy_q, ixy_q = _channel_marginal_entropies(j, c)
    return ACIPoint(r1=t.r1, r2=t.r2, rci=max(ixy_q, 0.0))


def affine_f(p: ACIPoint, j: JointPMF) -> TensionPoint:
    """(r1, r2, rci) -> (r1, r2, I(X;Y) + r1 + r2 - rci).

    Composing with ``aci_point`` reproduces the tension triple exactly (the
    four-term identity between the conditional informations and I(XY;Q)).
    """
    i_xy = mutual_information(j)
    return TensionPoint(p.r1, p.r2, i_xy + p.r1 + p.r2 - p.rci)


def affine_g(p: GrayWynerPoint, j: JointPMF) -> TensionPoint:
    """(ra, rb, rc) -> (ra+rc-H(X), rb+rc-H(Y), ra+rb+rc-H(X,Y)).

    The gap of a Gray-Wyner point to the simple entropy lower bounds;
    composing with ``gray_wyner_point`` reproduces the tension triple.
    """
    h_x = _entropy_bits(j.x_marginal)
    h_y = _entropy_bits(j.y_marginal)
    h_xy = joint_entropy(j)
    return TensionPoint(
        p.ra + p.rc - h_x, p.rb + p.rc - h_y, p.ra + p.rb + p.rc - h_xy
    )


def gray_wyner_lower_bound_violations(j: JointPMF, p: GrayWynerPoint) -> list[str]:
    """Violations of R_A+R_C >= H(X), R_B+R_C >= H(Y), sum >= H(X,Y)."""
    h_x = _entropy_bits(j.x_marginal)
    h_y = _entropy_bits(j.y_marginal)
    h_xy = joint_entropy(j)
    problems = []
    if p.ra + p.rc < h_x - GW_LOWER_SLACK:
        problems.append(f"R_A+R_C = {p.ra + p.rc} < H(X) = {h_x}")
    if p.rb + p.rc < h_y - GW_LOWER_SLACK:
        problems.append(f"R_B+R_C = {p.rb + p.rc} < H(Y) = {h_y}")
    if p.ra + p.rb + p.rc < h_xy - GW_LOWER_SLACK:
        problems.append(f"sum = {p.ra + p.rb + p.rc} < H(X,Y) = {h_xy}")
    return problems


@dataclass(frozen=True)
class WynerResult:
    """Wyner common information computed through the tension region."""

    value: float  # I(X;Y) + min of r1+r2 over the z = 0 slice
    slice_sum: float
    residual: float  # achieved I(X;Y|Q) of the slice witness
    feasible: bool  # residual within the slice tolerance
    slice_point: SlicePoint
    cross_check_gap: float | None = None


def wyner_common_information(
    j: JointPMF, cfg: OptimizerConfig, cross_check: bool = False
) -> WynerResult:
    """Wyner common information via the z = 0 slice of the tension region.

    Computed as I(X;Y) plus the slice minimum of r1 + r2 (which reuses the
    penalized slice machinery); always >= I(X;Y) by construction.  With
    ``cross_check=True`` the direct minimization of I(XY;Q) subject to
    X-Q-Y is also run; by the four-term identity it reduces to the same
    scalarized family with the penalty shifted by one, so the gap between
    the two routes measures optimizer consistency, not modeling differences.
    """
    sp = slice_min_sum(j, cfg)
    i_xy = mutual_information(j)
    value = i_xy + sp.rate_sum
    gap = None
    if cross_check:
        from .optimize import DirectionWeights, scalarized_min

        m = cfg.penalty_weights[-1]
        direct = scalarized_min(j, DirectionWeights(1.0, 1.0, m - 1.0), cfg)
        from .prob import tension_of

        t = tension_of(j, direct.witness)
        gap = abs((i_xy + t.r1 + t.r2) - value)
    return WynerResult(
        value=value,
        slice_sum=sp.rate_sum,
        residual=sp.residual,
        feasible=sp.feasible,
        slice_point=sp,
        cross_check_gap=gap,
    )


@dataclass(frozen=True)
class CornerRates:
    """Smallest helper rates in lossless coding with a fully informed helper."""

    g_y_to_x: float
    g_x_to_y: float

    @property
    def max_rate(self) -> float:
        return max(self.g_y_to_x, self.g_x_to_y)


def corner_quantities(j: JointPMF) -> CornerRates:
    """G(Y->X) = I(X;Y) + tx and G(X->Y) = I(X;Y) + ty from exact intercepts."""
    i_xy = mutual_information(j)
    ints = intercepts_exact(j)
    return CornerRates(g_y_to_x=i_xy + ints.tx, g_x_to_y=i_xy + ints.ty)
