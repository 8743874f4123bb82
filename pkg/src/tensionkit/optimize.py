"""Numerical tension-region computation.

The region is convex, closed and upward-closed but has no closed-form
boundary in general, so it is approached by scalarized minimization over
channels: for a nonnegative direction lam, minimize

    lam1*I(Y;Q|X) + lam2*I(X;Q|Y) + lam3*I(X;Y|Q)

over row-stochastic kernels Q|XY of bounded cardinality.  The minimizer is
multi-restart exponentiated-gradient descent (multiplicative steps preserve
the simplex rows; restarts handle non-convexity), warm-started from a set of
canonical exact channels (constant, Q=X, Q=Y, Q=(X,Y), the common part and
the two dependent parts) in addition to the random draws.  Every reported
value is achieved by its stored witness, hence a certified upper bound on
the true support; correctness is cross-checked against the exhaustive grid
oracle on tiny instances rather than assumed.

Randomness is split per (direction, restart) from the root seed, so results
are deterministic and independent of scheduling or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError
from .prob import Alphabet, Channel, JointPMF, TensionPoint, tension_of
from .regions import InnerPoint, RegionApprox, direction_key
from .structure import common_part, dependent_part, Direction, is_perfectly_resolvable

#: default penalty escalation for the z = 0 slice
DEFAULT_PENALTIES = (1.0, 4.0, 16.0, 64.0, 256.0)


@dataclass(frozen=True)
class DirectionWeights:
    """Nonnegative scalarization weights; at least one must be positive."""

    l1: float
    l2: float
    l3: float

    def __post_init__(self) -> None:
        for name in ("l1", "l2", "l3"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise ValidationError(f"direction weight {name}={v} must be finite and >= 0")
            object.__setattr__(self, name, v)
        if self.l1 + self.l2 + self.l3 <= 0.0:
            raise ValidationError("direction weights must have a positive component")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l1, self.l2, self.l3)

    def normalized(self) -> "DirectionWeights":
        s = self.l1 + self.l2 + self.l3
        return DirectionWeights(self.l1 / s, self.l2 / s, self.l3 / s)

    def key(self) -> tuple[float, float, float]:
        return direction_key(self.as_tuple())


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of the scalarized minimizer.

    ``q_cardinality`` defaults to the sufficient cap |X||Y|+2 and may be
    lowered for speed.  The random stream is split from ``seed`` per
    (direction, restart), so identical configs give identical results.
    """

    q_cardinality: int | None = None
    restarts: int = 32
    max_iterations: int = 2000
    step_tolerance: float = 1e-10
    seed: int = 0
    penalty_weights: tuple[float, ...] = DEFAULT_PENALTIES
    slice_tolerance: float = 1e-4

    def __post_init__(self) -> None:
        if self.restarts < 0:
            raise ValidationError("restarts must be >= 0")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if self.step_tolerance <= 0.0:
            raise ValidationError("step_tolerance must be > 0")
        if not self.penalty_weights or any(w <= 0 for w in self.penalty_weights):
            raise ValidationError("penalty_weights must be positive")
        if self.slice_tolerance <= 0.0:
            raise ValidationError("slice_tolerance must be > 0")


def resolve_q_cardinality(j: JointPMF, cfg: OptimizerConfig) -> int:
    cap = j.nx * j.ny + 2
    q = cfg.q_cardinality if cfg.q_cardinality is not None else cap
    if q < 1:
        raise ValidationError("q_cardinality must be >= 1")
    if q > cap:
        raise ValidationError(
            f"q_cardinality {q} exceeds the sufficient cap |X||Y|+2 = {cap}"
        )
    return q


@dataclass(frozen=True)
class ScalarizedResult:
    value: float
    witness: Channel
    converged: bool
    n_starts: int
    flags: tuple[str, ...] = ()


def _pad_kernel(kernel: np.ndarray, nq: int) -> np.ndarray:
    rows, cols = kernel.shape
    if cols > nq:
        raise ValidationError(f"kernel with {cols} letters does not fit q_cardinality {nq}")
    if cols == nq:
        return np.ascontiguousarray(kernel, dtype=np.float64)
    out = np.zeros((rows, nq))
    out[:, :cols] = kernel
    return out


def canonical_starts(j: JointPMF, nq: int) -> list[tuple[str, np.ndarray]]:
    """Exact channels worth trying before any random restart."""
    nx, ny = j.nx, j.ny
    nxy = nx * ny
    starts: list[tuple[str, np.ndarray]] = []
    starts.append(("constant", _pad_kernel(np.ones((nxy, 1)), nq)))
    if nx <= nq:
        k = np.zeros((nxy, nq))
        k[np.arange(nxy), np.repeat(np.arange(nx), ny)] = 1.0
        starts.append(("q=x", k))
    if ny <= nq:
        k = np.zeros((nxy, nq))
        k[np.arange(nxy), np.tile(np.arange(ny), nx)] = 1.0
        starts.append(("q=y", k))
    if nxy <= nq:
        k = np.zeros((nxy, nq))
        k[np.arange(nxy), np.arange(nxy)] = 1.0
        starts.append(("q=xy", k))
    cp = common_part(j)
    if cp.graph.n_components <= nq:
        starts.append(("common-part", _pad_kernel(cp.channel().dense_kernel(), nq)))
    for name, direction in (("y-to-x", Direction.Y_TO_X), ("x-to-y", Direction.X_TO_Y)):
        dp = dependent_part(j, direction)
        if dp.n_classes <= nq:
            starts.append((f"dependent-{name}", _pad_kernel(dp.channel().dense_kernel(), nq)))
    return starts


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _random_start(rng: np.random.Generator, nxy: int, nq: int) -> np.ndarray:
    # symmetric Dirichlet(1) per row: uniform draw from each simplex
    w = rng.gamma(1.0, size=(nxy, nq))
    w /= w.sum(axis=1, keepdims=True)
    return np.ascontiguousarray(w)


def _minimize(
    j: JointPMF,
    lam: tuple[float, float, float],
    cfg: OptimizerConfig,
    nq: int,
    stream_key: tuple[int, ...],
    extra_starts: list[tuple[str, np.ndarray]] | None = None,
) -> tuple[float, np.ndarray, bool]:
    """Run all starts, return (best value, best kernel, converged-at-best).

    Ties within 1e-12 bits are broken by the lexicographically smallest
    serialized kernel so reruns and worker schedules cannot change the pick.
    """
    l1, l2, l3 = lam
    starts = canonical_starts(j, nq)
    if extra_starts:
        starts = starts + [(n, _pad_kernel(k, nq)) for n, k in extra_starts]
    for r in range(cfg.restarts):
        rng = _rng(cfg.seed, *stream_key, r)
        starts.append((f"random-{r}", _random_start(rng, j.nx * j.ny, nq)))

    best: tuple[float, bytes] | None = None
    best_kernel: np.ndarray | None = None
    best_converged = False
    for _, w0 in starts:
        w = np.ascontiguousarray(w0, dtype=np.float64).copy()
        value, _iters, converged = _kernels.descend(
            j.mass, w, l1, l2, l3, cfg.max_iterations, cfg.step_tolerance
        )
        key = (round(value, 12), w.tobytes())
        if best is None or key < best:
            best = key
            best_kernel = w
            best_converged = converged
    assert best is not None and best_kernel is not None
    return max(best[0], 0.0), best_kernel, best_converged


def _witness_channel(kernel: np.ndarray) -> Channel:
    return Channel(Alphabet.of_size(kernel.shape[1], prefix="q"), kernel)


def scalarized_min(
    j: JointPMF,
    lam: DirectionWeights,
    cfg: OptimizerConfig,
    stream_key: tuple[int, ...] = (),
) -> ScalarizedResult:
    """Certified upper bound on the support h(lam), with its witness.

    The value is the scalarized objective of the best witness over all
    canonical and random starts; non-convergence within the iteration budget
    returns the best iterate, flagged.
    """
    nq = resolve_q_cardinality(j, cfg)
    value, kernel, converged = _minimize(j, lam.as_tuple(), cfg, nq, stream_key)
    flags = () if converged else ("non-convergence",)
    witness = _witness_channel(kernel)
    return ScalarizedResult(
        value=value,
        witness=witness,
        converged=converged,
        n_starts=len(canonical_starts(j, nq)) + cfg.restarts,
        flags=flags,
    )


# ---------------------------------------------------------------------------
# region tracing
# ---------------------------------------------------------------------------


def fibonacci_directions(n: int = 64) -> list[DirectionWeights]:
    """Fibonacci-style grid of n directions on the nonnegative octant."""
    if n < 1:
        raise ValidationError("need at least one direction")
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    out = []
    for i in range(n):
        z = (i + 0.5) / n
        r = math.sqrt(max(1.0 - z * z, 0.0))
        phi = ((i * golden) % 1.0) * (math.pi / 2.0)
        out.append(DirectionWeights(r * math.cos(phi), r * math.sin(phi), z))
    return out


def _intercept_inner_points(j: JointPMF) -> list[InnerPoint]:
    from .structure import intercept_witnesses

    points = []
    for name, channel in sorted(intercept_witnesses(j).items()):
        points.append(
            InnerPoint(
                point=tension_of(j, channel),
                witness=channel,
                note=f"axis-intercept witness ({name}, exact)",
            )
        )
    return points


def _trace_one(args: tuple) -> tuple[int, float, np.ndarray, bool]:
    j, lam_tuple, cfg, nq, idx = args
    value, kernel, converged = _minimize(j, lam_tuple, cfg, nq, (idx,))
    return idx, value, kernel, converged


def trace_region(
    j: JointPMF,
    directions: list[DirectionWeights],
    cfg: OptimizerConfig,
    workers: int = 1,
    label: str = "region",
) -> RegionApprox:
    """Sweep supporting directions and collect inner/upper evidence.

    One inner point per direction (the witness's tension triple) plus the
    three exact intercept witnesses.  A perfectly resolvable pair
    short-circuits: the region contains the origin and every support is 0.
    """
    if not directions:
        raise ValidationError("directions must be non-empty")
    resolvable, cp = is_perfectly_resolvable(j)
    inner = _intercept_inner_points(j)
    if resolvable:
        origin = InnerPoint(
            point=tension_of(j, cp.channel()),
            witness=cp.channel(),
            note="common-part witness (perfectly resolvable)",
        )
        support = tuple((d.key(), 0.0) for d in directions)
        return RegionApprox(
            label=label,
            inner_points=(origin, *inner),
            support_upper=support,
            flags=("perfectly-resolvable-short-circuit",),
        )

    nq = resolve_q_cardinality(j, cfg)
    jobs = [(j, d.normalized().as_tuple(), cfg, nq, i) for i, d in enumerate(directions)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = sorted(pool.map(_trace_one, jobs), key=lambda t: t[0])
    else:
        results = [_trace_one(job) for job in jobs]

    support = []
    flags: list[str] = []
    for idx, value, kernel, converged in results:
        witness = _witness_channel(kernel)
        point = tension_of(j, witness)
        inner.append(
            InnerPoint(point=point, witness=witness, note=f"direction-{idx} witness")
        )
        support.append((directions[idx].key(), value))
        if not converged:
            flags.append(f"non-convergence:direction-{idx}")
    return RegionApprox(
        label=label,
        inner_points=tuple(inner),
        support_upper=tuple(support),
        flags=tuple(flags),
    )


def support_upper(region: RegionApprox, lam: DirectionWeights) -> float:
    """Minimum of the normalized lam over the stored inner points."""
    return region.support_upper_for(lam.as_tuple())


# ---------------------------------------------------------------------------
# the z = 0 slice
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlicePoint:
    """One traced point of the z = 0 slice curve."""

    alpha: float
    r1: float
    r2: float
    residual: float  # achieved I(X;Y|Q), should be <= the slice tolerance
    penalty_weight: float
    feasible: bool
    witness: Channel | None = None

    @property
    def rate_sum(self) -> float:
        return self.r1 + self.r2


def _slice_for_alpha(
    j: JointPMF,
    alpha: float,
    cfg: OptimizerConfig,
    nq: int,
    stream_key: tuple[int, ...],
    warm: np.ndarray | None,
) -> SlicePoint:
    """Escalate the penalty on r3 until the residual meets the tolerance."""
    best_kernel = warm
    result: tuple[float, np.ndarray, bool] | None = None
    penalty_used = cfg.penalty_weights[-1]
    for level, m_weight in enumerate(cfg.penalty_weights):
        extra = [("warm", best_kernel)] if best_kernel is not None else None
        value, kernel, converged = _minimize(
            j,
            (alpha, 1.0 - alpha, m_weight),
            cfg,
            nq,
            stream_key + (level,),
            extra_starts=extra,
        )
        best_kernel = kernel
        result = (value, kernel, converged)
        point = tension_of(j, _witness_channel(kernel))
        penalty_used = m_weight
        if point.r3 <= cfg.slice_tolerance:
            break
    assert result is not None and best_kernel is not None
    witness = _witness_channel(best_kernel)
    point = tension_of(j, witness)
    return SlicePoint(
        alpha=alpha,
        r1=point.r1,
        r2=point.r2,
        residual=point.r3,
        penalty_weight=penalty_used,
        feasible=point.r3 <= cfg.slice_tolerance,
        witness=witness,
    )


def slice_z(j: JointPMF, grid: int, cfg: OptimizerConfig) -> list[SlicePoint]:
    """Trace the z = 0 slice over a grid of mixing weights alpha.

    For each alpha, minimize alpha*I(Y;Q|X) + (1-alpha)*I(X;Q|Y) with an
    escalating penalty on I(X;Y|Q) until the residual is within the slice
    tolerance; points that saturate the penalty schedule are flagged
    infeasible-at-tolerance.  The sweep runs in ascending alpha order so each
    point warm-starts the next (a deterministic continuation).
    """
    if grid < 2:
        raise ValidationError("slice grid must have at least 2 points")
    resolvable, cp = is_perfectly_resolvable(j)
    if resolvable:
        witness = cp.channel()
        point = tension_of(j, witness)
        return [
            SlicePoint(
                alpha=0.5,
                r1=point.r1,
                r2=point.r2,
                residual=point.r3,
                penalty_weight=0.0,
                feasible=True,
                witness=witness,
            )
        ]
    nq = resolve_q_cardinality(j, cfg)
    out: list[SlicePoint] = []
    warm: np.ndarray | None = None
    for i, alpha in enumerate(np.linspace(0.0, 1.0, grid)):
        sp = _slice_for_alpha(j, float(alpha), cfg, nq, (i,), warm)
        warm = np.asarray(sp.witness.kernel, dtype=np.float64).copy() if sp.witness else None
        out.append(sp)
    return out


def slice_min_sum(j: JointPMF, cfg: OptimizerConfig) -> SlicePoint:
    """The minimum of r1 + r2 over the z = 0 slice (the alpha = 1/2 solve)."""
    resolvable, cp = is_perfectly_resolvable(j)
    if resolvable:
        witness = cp.channel()
        point = tension_of(j, witness)
        return SlicePoint(0.5, point.r1, point.r2, point.r3, 0.0, True, witness)
    nq = resolve_q_cardinality(j, cfg)
    return _slice_for_alpha(j, 0.5, cfg, nq, (0,), None)
