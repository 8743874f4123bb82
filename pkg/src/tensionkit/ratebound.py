"""Secure-sampling rate bounds by region calculus.

A protocol can only grow the tension region of the parties' views toward
the origin, and regions of independent copies add (Minkowski), so if a
target pair is sampled from a setup pair at rate r, the setup region is
contained in r times the target region.  Scaling that containment along a
certified half-space of the target gives a sound upper bound on r:

    r <= (achieved setup support along lam) / (certified target bound b).

The numerator is an upper bound on the setup support (achieved evidence)
and b is a certified lower bound for the target, so the reported ratio can
only over-estimate the rate, never under-estimate it.  Bounds are refused
outright when no certified target evidence exists.

Slice-type evidence (minimum of r1+r2 over the z = 0 slice) is the limit of
the half-space family lam = (1, 1, M); it is only ever paired with setup
points whose third coordinate is zero within tolerance, which keeps the
pairing sound without appealing to the limit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .errors import RefusalError, ValidationError
from .prob import TensionPoint, binary_entropy
from .regions import CertifiedFact, InnerPoint, RegionApprox

#: numerical slack used in evidence comparisons
EVIDENCE_SLACK = 1e-6
#: a setup point may pair with slice evidence if its r3 is below this
SLICE_ZERO_TOL = 2e-4


# ---------------------------------------------------------------------------
# region algebra
# ---------------------------------------------------------------------------


def _scale_point(ip: InnerPoint, factor: float) -> InnerPoint:
    p = ip.point
    return InnerPoint(
        point=TensionPoint(p.r1 * factor, p.r2 * factor, p.r3 * factor),
        witness=None,
        note=(ip.note + "; " if ip.note else "") + f"scaled x{factor:g}, witness dropped",
    )


def scale_region(r: RegionApprox, factor: float) -> RegionApprox:
    """r -> factor * r pointwise (valid for the convex region).

    Witness channels are dropped: scaled points are no longer tensions of
    any channel of the same joint.
    """
    if factor <= 0.0:
        raise ValidationError("scale factor must be positive")
    if factor == 1.0:
        return r
    inner = tuple(_scale_point(ip, factor) for ip in r.inner_points)
    support = tuple((lam, v * factor) for lam, v in r.support_upper)
    certified = tuple(
        replace(f, value=f.value * factor) if f.kind != "origin" else f
        for f in r.certified
    )
    return RegionApprox(
        label=f"{factor:g}*({r.label})",
        inner_points=inner,
        support_upper=support,
        certified=certified,
        flags=r.flags + ("scaled-witnesses-dropped",),
    )


def minkowski_sum(r1: RegionApprox, r2: RegionApprox) -> RegionApprox:
    """Pairwise sums of inner evidence; matching certified bounds add."""
    inner = []
    for a in r1.inner_points:
        for b in r2.inner_points:
            pa, pb = a.point, b.point
            inner.append(
                InnerPoint(
                    point=TensionPoint(pa.r1 + pb.r1, pa.r2 + pb.r2, pa.r3 + pb.r3),
                    witness=None,
                    note="minkowski sum, witness dropped",
                )
            )
    s1 = dict(r1.support_upper)
    s2 = dict(r2.support_upper)
    support = tuple((lam, s1[lam] + s2[lam]) for lam in sorted(s1) if lam in s2)

    certified: list[CertifiedFact] = []
    facts2 = list(r2.certified)
    for f1 in r1.certified:
        for f2 in facts2:
            if f1.kind != f2.kind:
                continue
            if f1.kind == "halfspace" and f1.lam == f2.lam:
                certified.append(
                    CertifiedFact(
                        kind="halfspace",
                        value=f1.value + f2.value,
                        lam=f1.lam,
                        source=f"sum: {f1.source} + {f2.source}",
                        resolution=_merge_resolution(f1, f2),
                    )
                )
            elif f1.kind == "slice_sum":
                # both third coordinates are nonnegative, so a z = 0 point of
                # the sum splits into z = 0 points of the parts: values add
                certified.append(
                    CertifiedFact(
                        kind="slice_sum",
                        value=f1.value + f2.value,
                        source=f"sum: {f1.source} + {f2.source}",
                        resolution=_merge_resolution(f1, f2),
                        m_weight=f1.m_weight,
                    )
                )
            elif f1.kind == "origin" and f2.kind == "origin":
                certified.append(
                    CertifiedFact(kind="origin", value=0.0, source=f1.source)
                )
    return RegionApprox(
        label=f"({r1.label})+({r2.label})",
        inner_points=tuple(inner),
        support_upper=support,
        certified=tuple(certified),
        flags=tuple(sorted(set(r1.flags + r2.flags))) + ("minkowski-witnesses-dropped",),
    )


def _merge_resolution(f1: CertifiedFact, f2: CertifiedFact) -> str | None:
    parts = [r for r in (f1.resolution, f2.resolution) if r]
    return "; ".join(parts) if parts else None


def statistical_shift(epsilon: float, x_size: int, y_size: int) -> float:
    """The guaranteed region displacement under total-variation distance
    epsilon: 2*H2(epsilon) + epsilon*log2(max alphabet size)."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon {epsilon} outside [0, 1]")
    if x_size < 1 or y_size < 1:
        raise ValidationError("alphabet sizes must be >= 1")
    return 2.0 * binary_entropy(epsilon) + epsilon * math.log2(max(x_size, y_size))


def shifted_region(r: RegionApprox, delta: float) -> RegionApprox:
    """Translate all evidence by -delta per coordinate (clamped at zero).

    Used to transport a region across an epsilon-perturbation of the
    underlying joint: the perturbed region is contained in the shifted one.
    Half-space bounds move to b - delta (directions are normalized to unit
    1-norm); slice facts do not survive a shift soundly and are dropped
    with a flag.
    """
    if delta < 0.0:
        raise ValidationError("shift must be nonnegative")
    if delta == 0.0:
        return r
    inner = tuple(
        InnerPoint(
            point=TensionPoint(
                max(ip.point.r1 - delta, 0.0),
                max(ip.point.r2 - delta, 0.0),
                max(ip.point.r3 - delta, 0.0),
            ),
            witness=None,
            note=(ip.note + "; " if ip.note else "") + f"shifted by -{delta:g}",
        )
        for ip in r.inner_points
    )
    support = tuple((lam, max(v - delta, 0.0)) for lam, v in r.support_upper)
    certified = []
    dropped = 0
    for f in r.certified:
        if f.kind == "halfspace":
            certified.append(replace(f, value=max(f.value - delta, 0.0)))
        elif f.kind == "origin":
            certified.append(f)
        else:
            dropped += 1
    flags = r.flags + (f"shifted-by-{delta:g}",)
    if dropped:
        flags = flags + (f"dropped-{dropped}-slice-facts-on-shift",)
    return RegionApprox(
        label=f"({r.label})-{delta:g}",
        inner_points=inner,
        support_upper=support,
        certified=tuple(certified),
        flags=flags,
    )


# ---------------------------------------------------------------------------
# rate bounds and containment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateBoundReport:
    """A sound upper bound on the secure-sampling rate, with its evidence."""

    bound: float  # may be math.inf
    binding_direction: tuple[float, float, float] | str | None
    setup_evidence: dict | None
    target_evidence: dict | None
    caveats: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "bound": "inf" if math.isinf(self.bound) else self.bound,
            "binding_direction": (
                list(self.binding_direction)
                if isinstance(self.binding_direction, tuple)
                else self.binding_direction
            ),
            "setup_evidence": self.setup_evidence,
            "target_evidence": self.target_evidence,
            "caveats": list(self.caveats),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)


def rate_upper_bound(
    setup: RegionApprox,
    target: RegionApprox,
    slice_zero_tol: float = SLICE_ZERO_TOL,
) -> RateBoundReport:
    """min over certified target evidence of (setup achieved)/(target bound).

    Requires at least one certified target fact; refuses otherwise, because
    without a lower bound on the target region no ratio is sound.  A target
    certified to contain the origin admits no finite bound.
    """
    if target.certified_origin():
        return RateBoundReport(
            bound=math.inf,
            binding_direction=None,
            setup_evidence=None,
            target_evidence=next(
                f.to_dict() for f in target.certified if f.kind == "origin"
            ),
            caveats=(
                "target region contains the origin (perfectly resolvable): "
                "no finite rate bound",
            ),
        )
    usable = [f for f in target.certified if f.kind != "origin" and f.value > 0.0]
    if not usable:
        raise RefusalError(
            f"target region {target.label!r} carries no certified evidence with a "
            "positive bound; a sound rate bound cannot be established"
        )
    best: RateBoundReport | None = None
    caveats: list[str] = []
    for fact in usable:
        if fact.kind == "halfspace":
            numerator = setup.support_upper_for(fact.lam)  # type: ignore[arg-type]
            evidence = setup.best_point_for(fact.lam).to_dict(compact=True)  # type: ignore[arg-type]
            direction: tuple[float, float, float] | str = fact.lam  # type: ignore[assignment]
        else:  # slice_sum
            ip = setup.slice_evidence(slice_zero_tol)
            if ip is None:
                caveats.append(
                    "slice fact skipped: setup has no inner point with r3 <= "
                    f"{slice_zero_tol}"
                )
                continue
            numerator = ip.point.r1 + ip.point.r2
            evidence = ip.to_dict(compact=True)
            direction = "z=0 slice"
            if ip.point.r3 > 0.0:
                caveats.append(
                    f"slice pairing used a setup point with residual r3 = "
                    f"{ip.point.r3:.3g}"
                )
        ratio = numerator / fact.value
        if best is None or ratio < best.bound:
            best = RateBoundReport(
                bound=ratio,
                binding_direction=direction,
                setup_evidence=evidence,
                target_evidence=fact.to_dict(),
                caveats=(),
            )
    if best is None:
        raise RefusalError(
            "no usable target evidence could be paired with setup evidence"
        )
    res_caveats = [
        f"target evidence certified at grid resolution {best.target_evidence.get('resolution')}"
        for _ in [0]
        if best.target_evidence and best.target_evidence.get("resolution")
    ]
    return replace(best, caveats=tuple(caveats + res_caveats))


def containment_check(
    a: RegionApprox,
    b: RegionApprox,
    factor: float,
    slice_zero_tol: float = SLICE_ZERO_TOL,
) -> tuple[str, list[str]]:
    """Refute or stay consistent with "a is contained in factor * b".

    Refuted iff some inner point of ``a`` violates some certified half-space
    (or slice fact, for near-z=0 points) of ``factor * b`` by more than the
    evidence slack.  "consistent" is not a proof of containment; the details
    list says which evidence was checked.  Note that a region containing the
    origin genuinely refutes containment in any positively certified region.
    """
    if factor <= 0.0:
        raise ValidationError("containment factor must be positive")
    details = []
    verdict = "consistent"
    for fact in b.certified:
        if fact.kind == "origin" or fact.value <= 0.0:
            continue
        threshold = factor * fact.value - EVIDENCE_SLACK
        for ip in a.inner_points:
            p = ip.point
            if fact.kind == "halfspace":
                lam = fact.lam  # type: ignore[assignment]
                value = lam[0] * p.r1 + lam[1] * p.r2 + lam[2] * p.r3
                if value < threshold:
                    verdict = "refuted"
                    details.append(
                        f"point ({p.r1:.6g}, {p.r2:.6g}, {p.r3:.6g}) has "
                        f"lam.t = {value:.6g} < {factor:g} * {fact.value:.6g}"
                    )
            elif fact.kind == "slice_sum" and p.r3 <= slice_zero_tol:
                value = p.r1 + p.r2
                if value < threshold:
                    verdict = "refuted"
                    details.append(
                        f"z=0 point ({p.r1:.6g}, {p.r2:.6g}) has sum "
                        f"{value:.6g} < {factor:g} * {fact.value:.6g}"
                    )
    if not details:
        details.append(
            "no certified evidence of the scaled region is violated "
            "(not a proof of containment)"
        )
    return verdict, details
