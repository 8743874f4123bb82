"""Region approximations: certified inner points, per-direction support
estimates, and certified half-spaces for one tension region.

A ``RegionApprox`` is a two-sided sandwich of a (convex, upward-closed)
tension region:

  * ``inner_points`` are achieved points.  Each carries its witness channel
    when one exists, so achievability is re-checkable; evidence without a
    reproducible witness (scaled regions, Minkowski sums, figure-read
    values) carries an explanatory note instead.
  * ``support_upper`` maps a normalized direction to the best scalarized
    value found by the optimizer: an upper bound on the true support
    h(lam) = inf {lam . t : t in region}.
  * ``certified`` holds lower-bound evidence: half-spaces lam . t >= b and
    slice facts (minimum of r1+r2 over the z = 0 slice), each with a source
    descriptor and, for grid-certified facts, the grid resolution they hold
    at.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import ValidationError
from .prob import AnyChannel, TensionPoint, channel_from_dict, channel_to_dict

#: rounding used to key directions (and to break value ties deterministically)
KEY_DECIMALS = 12


def direction_key(lam: tuple[float, float, float]) -> tuple[float, float, float]:
    total = lam[0] + lam[1] + lam[2]
    if total <= 0.0:
        raise ValidationError("direction must have a positive component")
    return tuple(round(v / total, KEY_DECIMALS) for v in lam)  # type: ignore[return-value]


@dataclass(frozen=True)
class CertifiedFact:
    """A lower-bound certificate for a region.

    kinds:
      * ``halfspace``: lam . t >= value for every region point t (lam is
        stored normalized to unit 1-norm);
      * ``slice_sum``: r1 + r2 >= value for every region point with r3 = 0;
      * ``origin``: the region contains the origin (value is 0).

    ``resolution`` records the grid granularity for oracle-certified facts
    ("exact" facts have none); ``m_weight`` records the finite penalty
    weight when a slice fact was certified through the (1,1,M) half-space
    family.
    """

    kind: str
    value: float
    source: str
    lam: tuple[float, float, float] | None = None
    resolution: str | None = None
    m_weight: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("halfspace", "slice_sum", "origin"):
            raise ValidationError(f"unknown certified fact kind {self.kind!r}")
        if self.kind == "halfspace":
            if self.lam is None:
                raise ValidationError("halfspace fact requires a direction")
            object.__setattr__(self, "lam", direction_key(self.lam))
        if self.value < 0.0:
            raise ValidationError("certified values are nonnegative")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "value": self.value, "source": self.source}
        if self.lam is not None:
            d["lambda"] = list(self.lam)
        if self.resolution is not None:
            d["resolution"] = self.resolution
        if self.m_weight is not None:
            d["m_weight"] = self.m_weight
        return d

    @staticmethod
    def from_dict(d: dict) -> "CertifiedFact":
        return CertifiedFact(
            kind=d["kind"],
            value=float(d["value"]),
            source=d.get("source", ""),
            lam=tuple(d["lambda"]) if "lambda" in d else None,
            resolution=d.get("resolution"),
            m_weight=d.get("m_weight"),
        )


@dataclass(frozen=True)
class InnerPoint:
    """An achieved region point, with its witness channel when available."""

    point: TensionPoint
    witness: AnyChannel | None = None
    note: str = ""

    def to_dict(self, compact: bool = False) -> dict:
        d: dict = {"point": [self.point.r1, self.point.r2, self.point.r3]}
        if compact:
            d["witness"] = "present" if self.witness is not None else None
        else:
            d["witness"] = (
                channel_to_dict(self.witness) if self.witness is not None else None
            )
        if self.note:
            d["note"] = self.note
        return d

    @staticmethod
    def from_dict(d: dict) -> "InnerPoint":
        w = d.get("witness")
        return InnerPoint(
            point=TensionPoint(*d["point"]),
            witness=channel_from_dict(w) if w is not None else None,
            note=d.get("note", ""),
        )


@dataclass(frozen=True)
class RegionApprox:
    """Inner evidence plus certified outer evidence for one tension region."""

    label: str
    inner_points: tuple[InnerPoint, ...]
    support_upper: tuple[tuple[tuple[float, float, float], float], ...] = ()
    certified: tuple[CertifiedFact, ...] = ()
    flags: tuple[str, ...] = ()

    # -- evidence access ----------------------------------------------------
    def points_array(self) -> np.ndarray:
        if not self.inner_points:
            raise ValidationError(f"region {self.label!r} has no inner points")
        return np.array([ip.point.as_tuple() for ip in self.inner_points])

    def support_upper_for(self, lam: tuple[float, float, float]) -> float:
        """Best (smallest) achieved value of lam . t: a sound upper bound on
        the support h(lam).  Uses the stored inner points only; no
        interpolation is attempted."""
        key = np.array(direction_key(lam))
        pts = self.points_array()
        return float(np.min(pts @ key))

    def best_point_for(self, lam: tuple[float, float, float]) -> InnerPoint:
        key = np.array(direction_key(lam))
        pts = self.points_array()
        return self.inner_points[int(np.argmin(pts @ key))]

    def slice_evidence(self, z_tol: float) -> InnerPoint | None:
        """The inner point of smallest r1+r2 among those with r3 <= z_tol."""
        best = None
        best_sum = np.inf
        for ip in self.inner_points:
            if ip.point.r3 <= z_tol and ip.point.r1 + ip.point.r2 < best_sum:
                best = ip
                best_sum = ip.point.r1 + ip.point.r2
        return best

    def stored_support(self) -> dict[tuple[float, float, float], float]:
        return dict(self.support_upper)

    def certified_origin(self) -> bool:
        return any(f.kind == "origin" for f in self.certified)

    def with_certified(self, facts: Iterable[CertifiedFact]) -> "RegionApprox":
        return replace(self, certified=self.certified + tuple(facts))

    def with_flags(self, *flags: str) -> "RegionApprox":
        return replace(self, flags=self.flags + flags)

    # -- consistency --------------------------------------------------------
    def check_consistency(self, slack: float = 1e-6) -> list[str]:
        """Certified lower bounds must not exceed matching upper evidence."""
        problems = []
        stored = self.stored_support()
        for fact in self.certified:
            if fact.kind != "halfspace":
                continue
            upper = stored.get(fact.lam)
            if upper is not None and fact.value > upper + slack:
                problems.append(
                    f"certified bound {fact.value} exceeds support upper {upper} "
                    f"for direction {fact.lam}"
                )
        return problems

    # -- serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "inner_points": [ip.to_dict() for ip in self.inner_points],
            "support_upper": [
                {"lambda": list(lam), "value": value} for lam, value in self.support_upper
            ],
            "certified": [f.to_dict() for f in self.certified],
            "flags": list(self.flags),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @staticmethod
    def from_dict(d: dict) -> "RegionApprox":
        return RegionApprox(
            label=d.get("label", ""),
            inner_points=tuple(InnerPoint.from_dict(x) for x in d["inner_points"]),
            support_upper=tuple(
                (tuple(e["lambda"]), float(e["value"])) for e in d.get("support_upper", [])
            ),
            certified=tuple(CertifiedFact.from_dict(x) for x in d.get("certified", [])),
            flags=tuple(d.get("flags", ())),
        )

    @staticmethod
    def from_json(text: str) -> "RegionApprox":
        return RegionApprox.from_dict(json.loads(text))
