"""Exact finite-alphabet probability core.

Joint distributions over finite alphabets, conditional channels Q|XY,
entropies and (conditional) mutual information in bits, total variation
distance, independent products, and the tension triple

    (I(Y;Q|X), I(X;Q|Y), I(X;Y|Q))

of a joint distribution paired with a channel.

Conventions used throughout the package:
  * all logarithms are base 2; every information quantity is in bits;
  * 0*log 0 = 0 and conditioning on zero-probability events contributes 0;
  * inputs are validated against tolerances and rejected, never silently
    renormalized (probabilities are plain float64; the documented error
    budget is ~1e-9 bits per mutual-information evaluation).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import AlphabetMismatchError, DimensionMismatchError, ValidationError

#: absolute tolerance for "sums to one" checks on input distributions
NORMALIZATION_TOL = 1e-12
#: absolute tolerance for marginalization consistency of extended joints
MARGINAL_TOL = 1e-10
#: information quantities may come out this far below zero before we error
CLAMP_TOL = 1e-9

_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# alphabets and distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    """An ordered list of distinct, opaque symbol names."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) == 0:
            raise ValidationError("alphabet must contain at least one symbol")
        if len(set(labels)) != len(labels):
            raise ValidationError("alphabet labels must be distinct")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @staticmethod
    def of_size(n: int, prefix: str = "s") -> "Alphabet":
        return Alphabet(tuple(f"{prefix}{i}" for i in range(n)))


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class JointPMF:
    """A joint p.m.f. over a pair of finite alphabets.

    ``mass[i, j]`` is the probability of (x_alphabet.labels[i],
    y_alphabet.labels[j]).  Entries must be nonnegative and sum to one
    within ``NORMALIZATION_TOL``.  Symbols with zero marginal probability
    are allowed; they are exposed via ``zero_x_symbols``/``zero_y_symbols``
    so callers can flag them.
    """

    x_alphabet: Alphabet
    y_alphabet: Alphabet
    mass: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.mass, dtype=np.float64)
        if m.ndim != 2:
            raise ValidationError("mass must be a 2-D matrix")
        if m.shape != (self.x_alphabet.size, self.y_alphabet.size):
            raise DimensionMismatchError(
                f"mass shape {m.shape} does not match alphabet sizes "
                f"({self.x_alphabet.size}, {self.y_alphabet.size})"
            )
        if np.any(m < 0.0):
            i, j = np.unravel_index(int(np.argmin(m)), m.shape)
            raise ValidationError(f"negative probability at cell ({i}, {j}): {m[i, j]}")
        total = float(m.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValidationError(
                f"joint mass sums to {total!r}, off by more than {NORMALIZATION_TOL}"
            )
        object.__setattr__(self, "mass", _as_readonly(m))

    # -- shapes ------------------------------------------------------------
    @property
    def nx(self) -> int:
        return self.x_alphabet.size

    @property
    def ny(self) -> int:
        return self.y_alphabet.size

    # -- marginals ----------------------------------------------------------
    @cached_property
    def x_marginal(self) -> np.ndarray:
        return _as_readonly(self.mass.sum(axis=1))

    @cached_property
    def y_marginal(self) -> np.ndarray:
        return _as_readonly(self.mass.sum(axis=0))

    @cached_property
    def zero_x_symbols(self) -> tuple[str, ...]:
        return tuple(
            self.x_alphabet.labels[i] for i in np.nonzero(self.x_marginal <= 0.0)[0]
        )

    @cached_property
    def zero_y_symbols(self) -> tuple[str, ...]:
        return tuple(
            self.y_alphabet.labels[j] for j in np.nonzero(self.y_marginal <= 0.0)[0]
        )

    def swapped(self) -> "JointPMF":
        """The same pair with the roles of X and Y exchanged."""
        return JointPMF(self.y_alphabet, self.x_alphabet, self.mass.T.copy())


@dataclass(frozen=True)
class Channel:
    """A conditional p.m.f. Q|XY as a row-stochastic kernel.

    Rows are indexed by the cell (x, y) in row-major order (``r = x*ny + y``),
    columns by the symbols of ``q_alphabet``.  Every row must sum to one
    within ``NORMALIZATION_TOL``.
    """

    q_alphabet: Alphabet
    kernel: np.ndarray

    def __post_init__(self) -> None:
        k = np.asarray(self.kernel, dtype=np.float64)
        if k.ndim != 2:
            raise ValidationError("kernel must be a 2-D matrix")
        if k.shape[1] != self.q_alphabet.size:
            raise DimensionMismatchError(
                f"kernel has {k.shape[1]} columns but q alphabet has size "
                f"{self.q_alphabet.size}"
            )
        if np.any(k < 0.0):
            raise ValidationError("kernel entries must be nonnegative")
        sums = k.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > NORMALIZATION_TOL)[0]
        if bad.size:
            r = int(bad[0])
            raise ValidationError(f"kernel row {r} sums to {sums[r]!r}, not 1")
        object.__setattr__(self, "kernel", _as_readonly(k))

    @property
    def n_rows(self) -> int:
        return self.kernel.shape[0]

    @property
    def nq(self) -> int:
        return self.q_alphabet.size

    def dense_kernel(self) -> np.ndarray:
        return self.kernel

    @staticmethod
    def constant(n_rows: int) -> "Channel":
        """The trivial channel Q = 0 (a single symbol)."""
        return Channel(Alphabet(("q0",)), np.ones((n_rows, 1)))


@dataclass(frozen=True)
class DeterministicChannel:
    """A channel where Q is a deterministic function of the cell (x, y).

    Stored as an integer assignment matrix of shape (nx, ny); the one-hot
    kernel is only materialized on demand.  Tension evaluation has a
    dedicated memory-light path for this class, used for witness channels
    over large alphabets where the dense XYQ tensor would be prohibitive.
    """

    q_alphabet: Alphabet
    assignment: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.assignment)
        if a.ndim != 2 or not np.issubdtype(a.dtype, np.integer):
            raise ValidationError("assignment must be a 2-D integer matrix")
        if a.size and (int(a.min()) < 0 or int(a.max()) >= self.q_alphabet.size):
            raise ValidationError("assignment refers to symbols outside the q alphabet")
        a = np.ascontiguousarray(a.astype(np.int64))
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    @property
    def n_rows(self) -> int:
        return self.assignment.size

    @property
    def nq(self) -> int:
        return self.q_alphabet.size

    def dense_kernel(self) -> np.ndarray:
        kernel = np.zeros((self.assignment.size, self.q_alphabet.size))
        kernel[np.arange(self.assignment.size), self.assignment.ravel()] = 1.0
        return kernel

    def to_dense(self) -> Channel:
        return Channel(self.q_alphabet, self.dense_kernel())

    @staticmethod
    def from_assignment(
        assignment: np.ndarray, q_alphabet: Alphabet | None = None
    ) -> "DeterministicChannel":
        a = np.asarray(assignment)
        if q_alphabet is None:
            n = int(a.max()) + 1 if a.size else 1
            q_alphabet = Alphabet.of_size(n, prefix="q")
        return DeterministicChannel(q_alphabet, a)


#: anything accepted where a conditional p.m.f. Q|XY is expected
AnyChannel = Channel | DeterministicChannel


@dataclass(frozen=True)
class ExtendedJoint:
    """The joint p.m.f. of (X, Y, Q) induced by a base joint and a channel.

    Materializes the full (nx, ny, nq) tensor; intended for the small
    alphabets where identity checks and generic conditional informations
    are evaluated.
    """

    base: JointPMF
    channel: "AnyChannel"
    mass3: np.ndarray = field(default=None, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        nx, ny = self.base.nx, self.base.ny
        if self.channel.n_rows != nx * ny:
            raise DimensionMismatchError(
                f"channel has {self.channel.n_rows} rows; joint has {nx * ny} cells"
            )
        m3 = self.base.mass[:, :, None] * self.channel.dense_kernel().reshape(
            nx, ny, self.channel.nq
        )
        recovered = m3.sum(axis=2)
        if np.max(np.abs(recovered - self.base.mass)) > MARGINAL_TOL:
            raise ValidationError("marginalizing q does not recover the base joint")
        object.__setattr__(self, "mass3", _as_readonly(m3))


@dataclass(frozen=True)
class TensionPoint:
    """The triple (I(Y;Q|X), I(X;Q|Y), I(X;Y|Q)), in bits."""

    r1: float
    r2: float
    r3: float

    def __post_init__(self) -> None:
        for name in ("r1", "r2", "r3"):
            v = float(getattr(self, name))
            if v < -CLAMP_TOL:
                raise ValidationError(f"tension coordinate {name}={v} below -{CLAMP_TOL}")
            object.__setattr__(self, name, max(v, 0.0))

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r1, self.r2, self.r3)

    @property
    def coordinate_sum(self) -> float:
        return self.r1 + self.r2 + self.r3

    def dominates(self, other: "TensionPoint", tol: float = 0.0) -> bool:
        """Coordinate-wise >= within ``tol`` (membership in the other's upward cone)."""
        return (
            self.r1 >= other.r1 - tol
            and self.r2 >= other.r2 - tol
            and self.r3 >= other.r3 - tol
        )


# ---------------------------------------------------------------------------
# entropy and information quantities
# ---------------------------------------------------------------------------


def _entropy_bits(weights: np.ndarray) -> float:
    """Entropy in bits of a nonnegative weight array (no validation)."""
    w = np.asarray(weights, dtype=np.float64).ravel()
    nz = w[w > 0.0]
    if nz.size == 0:
        return 0.0
    return float(-np.dot(nz, np.log2(nz))) + 0.0  # +0.0 normalizes -0.0


def entropy(p: Sequence[float] | np.ndarray) -> float:
    """Shannon entropy H(p) in bits of a validated distribution."""
    arr = np.asarray(p, dtype=np.float64).ravel()
    if np.any(arr < 0.0):
        raise ValidationError("distribution has a negative entry")
    total = float(arr.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"distribution sums to {total!r}, not 1")
    return _entropy_bits(arr)


def binary_entropy(p: float) -> float:
    """H2(p) = p log2(1/p) + (1-p) log2(1/(1-p)), with H2(0) = H2(1) = 0."""
    p = float(p)
    if p < 0.0 or p > 1.0:
        raise ValidationError(f"binary_entropy argument {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


_AXIS_OF_VARIABLE = {"x": 0, "y": 1, "q": 2}


def _marginal_entropy(mass3: np.ndarray, axes: tuple[int, ...]) -> float:
    """Entropy in bits of the marginal of ``mass3`` on the given axes."""
    drop = tuple(a for a in range(3) if a not in axes)
    return _entropy_bits(mass3.sum(axis=drop) if drop else mass3)


def conditional_mutual_information(ext: ExtendedJoint, a: str, b: str, c: str) -> float:
    """I(A;B|C) in bits for distinct A, B, C among {"x", "y", "q"}.

    Computed as H(AC) + H(BC) - H(C) - H(ABC) from the marginals of the
    extended joint tensor; all-zero slices contribute nothing.
    """
    names = (a.lower(), b.lower(), c.lower())
    if set(names) != {"x", "y", "q"}:
        raise ValidationError(f"variables must be a permutation of x, y, q; got {names}")
    ax, bx, cx = (_AXIS_OF_VARIABLE[n] for n in names)
    m3 = ext.mass3
    value = (
        _marginal_entropy(m3, tuple(sorted((ax, cx))))
        + _marginal_entropy(m3, tuple(sorted((bx, cx))))
        - _marginal_entropy(m3, (cx,))
        - _entropy_bits(m3)
    )
    if value < -CLAMP_TOL:
        raise ValidationError(f"conditional mutual information {value} below -{CLAMP_TOL}")
    return max(value, 0.0)


def mutual_information(j: JointPMF) -> float:
    """I(X;Y) in bits."""
    return (
        _entropy_bits(j.x_marginal) + _entropy_bits(j.y_marginal) - _entropy_bits(j.mass)
    )


def joint_entropy(j: JointPMF) -> float:
    """H(X, Y) in bits."""
    return _entropy_bits(j.mass)


def tension_of(j: JointPMF, c: AnyChannel) -> TensionPoint:
    """The tension triple of the pair extended by the channel.

    Deterministic channels take a memory-light path that never materializes
    the (nx, ny, nq) tensor; dense channels go through the compiled kernels.
    """
    if isinstance(c, DeterministicChannel):
        return _tension_of_deterministic(j, c)
    if c.n_rows != j.nx * j.ny:
        raise DimensionMismatchError(
            f"channel has {c.n_rows} rows; joint has {j.nx * j.ny} cells"
        )
    from . import _kernels

    i1, i2, i3 = _kernels.tension_terms(j.mass, c.kernel)
    return TensionPoint(i1, i2, i3)


def _tension_of_deterministic(j: JointPMF, c: DeterministicChannel) -> TensionPoint:
    a = c.assignment
    if a.shape != (j.nx, j.ny):
        raise DimensionMismatchError(
            f"assignment shape {a.shape} does not match joint shape {(j.nx, j.ny)}"
        )
    nq = c.nq
    mass = j.mass
    # Q is a function of (X, Y): H(XYQ) = H(XY) and the conditional
    # informations collapse to entropy differences of small contingency
    # tables accumulated per q symbol.
    pxq = np.zeros((j.nx, nq))
    np.add.at(pxq, (np.repeat(np.arange(j.nx), j.ny), a.ravel()), mass.ravel())
    pyq = np.zeros((j.ny, nq))
    np.add.at(pyq, (np.tile(np.arange(j.ny), j.nx), a.ravel()), mass.ravel())
    h_xq = _entropy_bits(pxq)
    h_yq = _entropy_bits(pyq)
    h_q = _entropy_bits(pxq.sum(axis=0))
    h_xy = _entropy_bits(mass)
    i1 = h_xq - _entropy_bits(j.x_marginal)
    i2 = h_yq - _entropy_bits(j.y_marginal)
    i3 = h_xq + h_yq - h_q - h_xy
    return TensionPoint(i1, i2, i3)


def total_variation(p: JointPMF, q: JointPMF) -> float:
    """Total variation distance (half L1) between two joints on the same alphabets."""
    if (
        p.x_alphabet.labels != q.x_alphabet.labels
        or p.y_alphabet.labels != q.y_alphabet.labels
    ):
        raise AlphabetMismatchError("total variation requires identical alphabets")
    return float(0.5 * np.abs(p.mass - q.mass).sum())


def product(j1: JointPMF, j2: JointPMF) -> JointPMF:
    """The independent product pair ((X1,X2), (Y1,Y2))."""
    x_labels = tuple(f"({a},{b})" for a in j1.x_alphabet.labels for b in j2.x_alphabet.labels)
    y_labels = tuple(f"({a},{b})" for a in j1.y_alphabet.labels for b in j2.y_alphabet.labels)
    mass = np.einsum("ij,kl->ikjl", j1.mass, j2.mass).reshape(
        j1.nx * j2.nx, j1.ny * j2.ny
    )
    # guard against accumulated rounding pushing the total outside tolerance
    mass /= mass.sum()
    return JointPMF(Alphabet(x_labels), Alphabet(y_labels), mass)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------


def joint_to_dict(j: JointPMF) -> dict:
    return {
        "x_alphabet": list(j.x_alphabet.labels),
        "y_alphabet": list(j.y_alphabet.labels),
        "pmf": [[float(v) for v in row] for row in j.mass],
    }


def joint_from_dict(d: dict) -> JointPMF:
    try:
        x_labels = d["x_alphabet"]
        y_labels = d["y_alphabet"]
        pmf = d["pmf"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"joint object missing field: {exc}") from exc
    if not isinstance(pmf, list) or not all(isinstance(r, list) for r in pmf):
        raise ValidationError("pmf must be a list of rows")
    if len(pmf) != len(x_labels):
        raise ValidationError(
            f"pmf has {len(pmf)} rows but x alphabet has {len(x_labels)} symbols"
        )
    for i, row in enumerate(pmf):
        if len(row) != len(y_labels):
            raise ValidationError(
                f"pmf row {i} has {len(row)} entries but y alphabet has "
                f"{len(y_labels)} symbols"
            )
    return JointPMF(
        Alphabet(tuple(x_labels)), Alphabet(tuple(y_labels)), np.array(pmf, dtype=np.float64)
    )


def joint_to_json(j: JointPMF) -> str:
    """Serialize; float round-trip is bit-exact (shortest-repr JSON floats)."""
    return json.dumps(joint_to_dict(j), sort_keys=True)


def joint_from_json(text: str) -> JointPMF:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    return joint_from_dict(d)


def channel_to_dict(c: AnyChannel) -> dict:
    if isinstance(c, DeterministicChannel):
        return {
            "type": "deterministic",
            "q_alphabet": list(c.q_alphabet.labels),
            "assignment": [[int(v) for v in row] for row in c.assignment],
        }
    return {
        "type": "dense",
        "q_alphabet": list(c.q_alphabet.labels),
        "kernel": [[float(v) for v in row] for row in c.kernel],
    }


def channel_from_dict(d: dict) -> AnyChannel:
    try:
        kind = d["type"]
        q_alphabet = Alphabet(tuple(d["q_alphabet"]))
        if kind == "deterministic":
            return DeterministicChannel(q_alphabet, np.array(d["assignment"]))
        if kind == "dense":
            return Channel(q_alphabet, np.array(d["kernel"], dtype=np.float64))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"channel object missing field: {exc}") from exc
    raise ValidationError(f"unknown channel type {kind!r}")
