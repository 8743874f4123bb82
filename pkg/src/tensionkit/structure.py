"""Exact combinatorial structure of a correlated pair.

Characteristic bipartite graph and its connected components, the common part
(whose entropy is the Gacs-Korner common information), the dependent parts
(quotients by equality of conditional rows), perfect resolvability, and the
three closed-form axis intercepts of the tension region:

    tx = H(Y'|X)   where Y' quotients Y by the rows p(X|Y=y),
    ty = H(X'|Y)   where X' quotients X by the rows p(Y|X=x),
    tz = I(X;Y|C)  where C is the connected-component variable.

Each intercept comes with a deterministic witness channel that achieves the
corresponding boundary point ((tx,0,0), (0,ty,0), (0,0,tz)) exactly.

All component and class ids are deterministic (ordered by smallest member
index) so downstream outputs are reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError
from .prob import (
    DeterministicChannel,
    JointPMF,
    _entropy_bits,
    mutual_information,
)

#: joint mass above this counts as an edge of the characteristic graph
#: (strict positivity, with a cutoff below the input normalization tolerance)
EDGE_THRESHOLD = 1e-12
#: relative per-entry tolerance for merging equal conditional rows
MERGE_TOLERANCE = 1e-9
#: bits of residual conditional mutual information tolerated by resolvability
RESOLVE_TOLERANCE = 1e-9


class Direction(enum.Enum):
    """Which variable is quotiented by its conditional rows."""

    Y_TO_X = "y_to_x"  # classes of y under equality of p(X|Y=y)
    X_TO_Y = "x_to_y"  # classes of x under equality of p(Y|X=x)


# ---------------------------------------------------------------------------
# characteristic graph and common part
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as the root so ids are canonical
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass(frozen=True)
class CharacteristicGraph:
    """Bipartite graph on the symbols with edges at positive joint mass."""

    joint: JointPMF
    edges: np.ndarray  # (E, 2) of (x index, y index)
    x_component: np.ndarray  # component id per x symbol
    y_component: np.ndarray  # component id per y symbol
    n_components: int

    def x_degree(self, i: int) -> int:
        return int((self.edges[:, 0] == i).sum())

    def y_degree(self, j: int) -> int:
        return int((self.edges[:, 1] == j).sum())


def characteristic_graph(j: JointPMF, edge_threshold: float = EDGE_THRESHOLD) -> CharacteristicGraph:
    """Connected components via union-find, ids ordered by smallest member."""
    nx, ny = j.nx, j.ny
    edges = np.argwhere(j.mass > edge_threshold)
    uf = _UnionFind(nx + ny)
    for xi, yi in edges:
        uf.union(int(xi), nx + int(yi))
    roots = np.array([uf.find(i) for i in range(nx + ny)])
    # canonical consecutive ids in increasing order of the smallest node index
    order = {r: k for k, r in enumerate(sorted(set(roots.tolist())))}
    comp = np.array([order[r] for r in roots], dtype=np.int64)
    return CharacteristicGraph(
        joint=j,
        edges=edges,
        x_component=comp[:nx],
        y_component=comp[nx:],
        n_components=len(order),
    )


@dataclass(frozen=True)
class CommonPart:
    """The connected-component variable: a function of X alone and of Y alone
    on the support, with its induced distribution."""

    graph: CharacteristicGraph
    distribution: np.ndarray  # mass per component id

    @property
    def x_component(self) -> np.ndarray:
        return self.graph.x_component

    @property
    def y_component(self) -> np.ndarray:
        return self.graph.y_component

    @property
    def entropy_bits(self) -> float:
        return _entropy_bits(self.distribution)

    def component_of_x(self, label: str) -> int:
        return int(self.x_component[self.graph.joint.x_alphabet.index(label)])

    def component_of_y(self, label: str) -> int:
        return int(self.y_component[self.graph.joint.y_alphabet.index(label)])

    def channel(self) -> DeterministicChannel:
        """Witness channel Q = component(X); achieves (0, 0, tz)."""
        j = self.graph.joint
        assignment = np.broadcast_to(
            self.x_component[:, None], (j.nx, j.ny)
        ).copy()
        return DeterministicChannel.from_assignment(
            assignment, q_alphabet=_component_alphabet(self.graph.n_components)
        )


def _component_alphabet(n: int):
    from .prob import Alphabet

    return Alphabet.of_size(max(n, 1), prefix="c")


def common_part(j: JointPMF) -> CommonPart:
    g = characteristic_graph(j)
    dist = np.zeros(g.n_components)
    np.add.at(dist, g.x_component, j.x_marginal)
    return CommonPart(graph=g, distribution=dist)


def gk_common_information(j: JointPMF) -> float:
    """Entropy of the connected-component variable, in bits."""
    return common_part(j).entropy_bits


def resolvability_residual(j: JointPMF) -> float:
    """I(X;Y | common part) in bits: the mutual information left unexplained
    by the component variable.  Equals I(X;Y) - H(component distribution)
    because the common part is a deterministic function of each side."""
    cp = common_part(j)
    return max(mutual_information(j) - cp.entropy_bits, 0.0)


def is_perfectly_resolvable(
    j: JointPMF, tolerance: float = RESOLVE_TOLERANCE
) -> tuple[bool, CommonPart]:
    """Whether some Q that is a function of each side kills I(X;Y|Q).

    The connected-component variable is the canonical witness: it achieves
    the minimum residual among all such Q, so the verdict only requires
    checking it.
    """
    cp = common_part(j)
    residual = max(mutual_information(j) - cp.entropy_bits, 0.0)
    return residual <= tolerance, cp


# ---------------------------------------------------------------------------
# dependent parts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DependentPart:
    """Quotient of one variable by equality of its conditional rows."""

    joint: JointPMF
    direction: Direction
    class_of: np.ndarray  # class id per symbol of the quotiented variable
    n_classes: int
    flagged_symbols: tuple[str, ...]  # zero-marginal symbols (singleton classes)

    def channel(self) -> DeterministicChannel:
        """Witness channel Q = class(quotiented variable).

        Achieves (H(Q|X), 0, 0) for Y_TO_X and (0, H(Q|Y), 0) for X_TO_Y.
        """
        j = self.joint
        if self.direction is Direction.Y_TO_X:
            assignment = np.broadcast_to(self.class_of[None, :], (j.nx, j.ny)).copy()
        else:
            assignment = np.broadcast_to(self.class_of[:, None], (j.nx, j.ny)).copy()
        from .prob import Alphabet

        return DeterministicChannel.from_assignment(
            assignment, q_alphabet=Alphabet.of_size(self.n_classes, prefix="k")
        )

    @cached_property
    def conditional_entropy_bits(self) -> float:
        """H(class | other variable): tx for Y_TO_X, ty for X_TO_Y."""
        j = self.joint
        if self.direction is Direction.Y_TO_X:
            table = np.zeros((self.n_classes, j.nx))
            np.add.at(table, self.class_of, j.mass.T)
            other_marginal = j.x_marginal
        else:
            table = np.zeros((self.n_classes, j.ny))
            np.add.at(table, self.class_of, j.mass)
            other_marginal = j.y_marginal
        return _entropy_bits(table) - _entropy_bits(other_marginal)


def _group_rows(rows: np.ndarray, positive: np.ndarray, tolerance: float) -> np.ndarray:
    """Group near-equal rows; zero-marginal rows become singleton classes.

    Rows are lexicographically sorted and scanned, merging each row into the
    current group when every entry is within ``tolerance`` (relative) of the
    group representative.  Exactly equal rows always land in one class; rows
    straddling the tolerance boundary may not (the quotient is genuinely
    discontinuous in the input, so a knife-edge knob is unavoidable).
    """
    n = rows.shape[0]
    class_of = np.full(n, -1, dtype=np.int64)
    idx = np.nonzero(positive)[0]
    if idx.size:
        sub = rows[idx]
        order = np.lexsort(sub.T[::-1])
        rep_row = None
        rep_class = -1
        next_class = 0
        for pos in order:
            row = sub[pos]
            if rep_row is not None and np.all(
                np.abs(row - rep_row) <= tolerance * np.maximum(row, rep_row)
            ):
                class_of[idx[pos]] = rep_class
            else:
                rep_row = row
                rep_class = next_class
                next_class += 1
                class_of[idx[pos]] = rep_class
    next_class = int(class_of.max()) + 1 if idx.size else 0
    for i in np.nonzero(~positive)[0]:
        class_of[i] = next_class
        next_class += 1
    # canonical relabeling: classes numbered by their smallest member index
    first_member: dict[int, int] = {}
    for i, c in enumerate(class_of.tolist()):
        first_member.setdefault(c, i)
    ranked = sorted(first_member, key=lambda c: first_member[c])
    relabel = {c: k for k, c in enumerate(ranked)}
    return np.array([relabel[c] for c in class_of], dtype=np.int64)


def dependent_part(
    j: JointPMF, direction: Direction, tolerance: float = MERGE_TOLERANCE
) -> DependentPart:
    """Equivalence classes of one variable under equality of conditional rows."""
    if direction is Direction.Y_TO_X:
        marginal = j.y_marginal
        positive = marginal > 0.0
        rows = np.zeros((j.ny, j.nx))
        rows[positive] = (j.mass[:, positive] / marginal[positive]).T
        flagged = j.zero_y_symbols
    elif direction is Direction.X_TO_Y:
        marginal = j.x_marginal
        positive = marginal > 0.0
        rows = np.zeros((j.nx, j.ny))
        rows[positive] = j.mass[positive] / marginal[positive][:, None]
        flagged = j.zero_x_symbols
    else:
        raise ValidationError(f"unknown direction {direction!r}")
    class_of = _group_rows(rows, positive, tolerance)
    return DependentPart(
        joint=j,
        direction=direction,
        class_of=class_of,
        n_classes=int(class_of.max()) + 1,
        flagged_symbols=flagged,
    )


# ---------------------------------------------------------------------------
# intercepts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Intercepts:
    """The three axis intercepts of the tension region, in bits."""

    tx: float
    ty: float
    tz: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.tx, self.ty, self.tz)

    def max_norm(self) -> float:
        return max(self.tx, self.ty, self.tz)


def intercepts_exact(j: JointPMF) -> Intercepts:
    """All three intercepts from the exact combinatorial constructions."""
    tx = dependent_part(j, Direction.Y_TO_X).conditional_entropy_bits
    ty = dependent_part(j, Direction.X_TO_Y).conditional_entropy_bits
    tz = resolvability_residual(j)
    return Intercepts(tx=max(tx, 0.0), ty=max(ty, 0.0), tz=tz)


def intercept_witnesses(j: JointPMF) -> dict[str, DeterministicChannel]:
    """Deterministic channels achieving (tx,0,0), (0,ty,0) and (0,0,tz)."""
    return {
        "tx": dependent_part(j, Direction.Y_TO_X).channel(),
        "ty": dependent_part(j, Direction.X_TO_Y).channel(),
        "tz": common_part(j).channel(),
    }
