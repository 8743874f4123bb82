"""Built-in correlated pairs with attached certified region facts.

Each constructor builds the joint distribution with explicit, human-auditable
tuple labels, attaches whatever region evidence is exact for it (axis
intercepts are always recomputed, witness channels re-checked at
construction), and records certified lower-bound facts only where they are
proved in closed form.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .prob import (
    Alphabet,
    AnyChannel,
    DeterministicChannel,
    JointPMF,
    joint_from_json,
    mutual_information,
    product,
    tension_of,
)
from .regions import CertifiedFact, InnerPoint, RegionApprox
from .structure import Intercepts, intercept_witnesses, intercepts_exact, is_perfectly_resolvable

#: string length guard: the joint tensor has 2^(3L+1) symbols per side
STRING_OT_MAX_L = 4


@dataclass(frozen=True)
class WitnessRecord:
    """A named witness channel with the tension point it must achieve."""

    name: str
    channel: AnyChannel
    expected: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    parameters: dict
    joint: JointPMF
    certified_facts: tuple[CertifiedFact, ...] = ()
    witnesses: tuple[WitnessRecord, ...] = ()
    notes: tuple[str, ...] = ()
    intercepts: Intercepts = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.intercepts is None:
            object.__setattr__(self, "intercepts", intercepts_exact(self.joint))
        self._verify()

    def _verify(self) -> None:
        """Re-verify shipped evidence through the exact modules."""
        for rec in self.witnesses:
            point = tension_of(self.joint, rec.channel)
            if rec.expected is not None:
                err = np.max(np.abs(point.as_array() - np.array(rec.expected)))
                if err > 1e-9:
                    raise ValidationError(
                        f"{self.name}: witness {rec.name!r} achieves {point.as_tuple()}, "
                        f"expected {rec.expected} (err {err:.2e})"
                    )
        for fact in self.certified_facts:
            if fact.kind == "origin":
                ok, _ = is_perfectly_resolvable(self.joint)
                if not ok:
                    raise ValidationError(
                        f"{self.name}: origin fact shipped but pair is not resolvable"
                    )

    @property
    def mutual_information(self) -> float:
        return mutual_information(self.joint)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "parameters": self.parameters,
            "x_size": self.joint.nx,
            "y_size": self.joint.ny,
            "mutual_information": self.mutual_information,
            "intercepts": list(self.intercepts.as_tuple()),
            "certified_facts": [f.to_dict() for f in self.certified_facts],
            "witnesses": [w.name for w in self.witnesses],
            "notes": list(self.notes),
        }


def catalog_region(entry: CatalogEntry) -> RegionApprox:
    """Region evidence from exact witnesses only (no optimization).

    Inner points: the three axis-intercept witnesses, the shipped witness
    channels, and the trivial constant-channel point (0, 0, I(X;Y)).
    """
    j = entry.joint
    inner = []
    for name, channel in sorted(intercept_witnesses(j).items()):
        inner.append(
            InnerPoint(
                point=tension_of(j, channel),
                witness=channel,
                note=f"axis-intercept witness ({name}, exact)",
            )
        )
    constant = DeterministicChannel.from_assignment(
        np.zeros((j.nx, j.ny), dtype=np.int64), Alphabet.of_size(1, prefix="q")
    )
    inner.append(
        InnerPoint(
            point=tension_of(j, constant),
            witness=constant,
            note="constant-channel point (0, 0, I(X;Y))",
        )
    )
    for rec in entry.witnesses:
        inner.append(
            InnerPoint(
                point=tension_of(j, rec.channel),
                witness=rec.channel,
                note=f"catalog witness {rec.name!r}",
            )
        )
    return RegionApprox(
        label=entry.name,
        inner_points=tuple(inner),
        certified=entry.certified_facts,
        flags=("catalog-exact-evidence",),
    )


# ---------------------------------------------------------------------------
# oblivious transfer
# ---------------------------------------------------------------------------


def bit_ot() -> CatalogEntry:
    """One bit oblivious transfer: A = (S1, S2), B = (C, S_C).

    S1, S2 are i.i.d. uniform bits, the choice bit C is uniform on {1, 2}
    and independent of them; the support is an 8-cycle and the mass is
    uniform over it.
    """
    x_labels = tuple(f"(s1={s1},s2={s2})" for s1 in (0, 1) for s2 in (0, 1))
    y_labels = tuple(f"(c={c},s={s})" for c in (1, 2) for s in (0, 1))
    mass = np.zeros((4, 4))
    for i, (s1, s2) in enumerate(itertools.product((0, 1), repeat=2)):
        for k, (c, s) in enumerate(itertools.product((1, 2), (0, 1))):
            if (s1 if c == 1 else s2) == s:
                mass[i, k] = 1.0 / 8.0
    facts = (
        CertifiedFact(
            kind="slice_sum",
            value=1.0,
            source="exact: closed-form minimum of r1+r2 on the z=0 slice of "
            "the bit oblivious-transfer pair",
        ),
    )
    return CatalogEntry(
        name="bit-ot",
        parameters={},
        joint=JointPMF(Alphabet(x_labels), Alphabet(y_labels), mass),
        certified_facts=facts,
        notes=("axis intercepts (1, 1, 1); z=0 slice is the increasing hull "
               "of the segment (1,0,0)-(0,1,0)",),
    )


def two_bit_ot() -> CatalogEntry:
    """Two independent bit-OTs (per-copy slice minima add over products)."""
    base = bit_ot()
    pair = product(base.joint, base.joint)
    facts = (
        CertifiedFact(
            kind="slice_sum",
            value=2.0,
            source="exact: additivity of the per-copy z=0 slice minimum over "
            "independent bit oblivious-transfer pairs",
        ),
    )
    return CatalogEntry(
        name="two-bit-ot",
        parameters={},
        joint=pair,
        certified_facts=facts,
    )


def string_ot_pair(length: int) -> CatalogEntry:
    """Two L-bit string-OTs in opposite directions, projected to one pair.

    Six independent uniform variables: choice bits cA, cB and strings
    sA1, sA2, sB1, sB2 of ``length`` bits.  One side sees
    X = (cA, sA1, sA2, sB[cA]), the other Y = (cB, sB1, sB2, sA[cB]).
    The shipped witness Q = (cA, cB, sA[cB], sB[cA]) achieves (1, 1, 0)
    for every L; the axis intercepts are (1+L, 1+L, 2L).
    """
    if not 1 <= length <= STRING_OT_MAX_L:
        raise ValidationError(
            f"string length {length} outside guard [1, {STRING_OT_MAX_L}] "
            f"(the joint has 2^{3 * length + 1} symbols per side)"
        )
    n_str = 1 << length  # strings encoded as integers in [0, 2^L)
    side_labels = []
    side_index: dict[tuple[int, int, int, int], int] = {}
    for c in (1, 2):
        for s1 in range(n_str):
            for s2 in range(n_str):
                for so in range(n_str):
                    side_index[(c, s1, s2, so)] = len(side_labels)
                    side_labels.append(
                        f"(c={c},s1={s1:0{length}b},s2={s2:0{length}b},so={so:0{length}b})"
                    )
    n = len(side_labels)
    mass = np.zeros((n, n))
    weight = 1.0 / (4.0 * n_str**4)
    for ca in (1, 2):
        for cb in (1, 2):
            for sa1 in range(n_str):
                for sa2 in range(n_str):
                    for sb1 in range(n_str):
                        for sb2 in range(n_str):
                            x = (ca, sa1, sa2, sb1 if ca == 1 else sb2)
                            y = (cb, sb1, sb2, sa1 if cb == 1 else sa2)
                            mass[side_index[x], side_index[y]] += weight
    joint = JointPMF(Alphabet(tuple(side_labels)), Alphabet(tuple(side_labels)), mass)

    # witness Q = (cA, cB, sA[cB], sB[cA]): every component is visible to at
    # least one side, so Q is a deterministic function of the pair (x, y);
    # the transferred strings are the fourth label component of each side
    keys = np.array(list(side_index), dtype=np.int64)
    c_of = keys[:, 0] - 1
    s4_of = keys[:, 3]
    assignment = (
        ((c_of[:, None] * 2 + c_of[None, :]) * n_str + s4_of[None, :]) * n_str
        + s4_of[:, None]
    )
    witness = DeterministicChannel.from_assignment(
        assignment, Alphabet.of_size(4 * n_str * n_str, prefix="q")
    )
    entry = CatalogEntry(
        name="string-ot",
        parameters={"L": length},
        joint=joint,
        witnesses=(WitnessRecord("choice-and-transferred-strings", witness, (1.0, 1.0, 0.0)),),
        notes=(f"axis intercepts (1+L, 1+L, 2L) = {(1 + length, 1 + length, 2 * length)}",),
    )
    expect = (1.0 + length, 1.0 + length, 2.0 * length)
    err = np.max(np.abs(np.array(entry.intercepts.as_tuple()) - np.array(expect)))
    if err > 1e-9:
        raise ValidationError(
            f"string-ot intercepts {entry.intercepts.as_tuple()} differ from the "
            f"closed form {expect}"
        )
    return entry


# ---------------------------------------------------------------------------
# binary and block examples
# ---------------------------------------------------------------------------


def z_source(p: float) -> CatalogEntry:
    """Binary pair with masses p(0,0) = p(1,1) = p, p(1,0) = 1-2p, p(0,1) = 0."""
    p = float(p)
    if not 0.0 < p < 0.5:
        raise ValidationError(f"z-source parameter p={p} outside (0, 1/2)")
    mass = np.array([[p, 0.0], [1.0 - 2.0 * p, p]])
    return CatalogEntry(
        name="z-source",
        parameters={"p": p},
        joint=JointPMF(Alphabet(("0", "1")), Alphabet(("0", "1")), mass),
        notes=("single connected component for every p in (0, 1/2)",),
    )


def connected_example(delta: float) -> CatalogEntry:
    """Two 2x2 blocks with heavy within-block mass (1-delta)/8 and light
    cross-block mass delta/8; nearly resolvable for small delta, but the
    common part collapses as soon as delta > 0."""
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise ValidationError(f"delta={delta} outside [0, 1]")
    labels = tuple(f"({bit},{block})" for bit in (0, 1) for block in (0, 1))
    blocks = np.array([0, 1, 0, 1])  # block id per label index
    heavy = (1.0 - delta) / 8.0
    light = delta / 8.0
    mass = np.where(blocks[:, None] == blocks[None, :], heavy, light)
    return CatalogEntry(
        name="connected",
        parameters={"delta": delta},
        joint=JointPMF(Alphabet(labels), Alphabet(labels), mass),
        notes=(
            "at delta=0 the pair is perfectly resolvable with a 1-bit common "
            "part; any delta>0 makes the graph connected",
        ),
    )


def uniform_common(k: int, x_extra: int = 1, y_extra: int = 1) -> CatalogEntry:
    """X = (X', Q0), Y = (Y', Q0) with independent uniform parts.

    The shared uniform k-ary Q0 is the common part; the pair is perfectly
    resolvable with common information log2(k) (which also equals the Wyner
    value)."""
    if k < 1 or x_extra < 1 or y_extra < 1:
        raise ValidationError("k, x_extra, y_extra must be >= 1")
    x_labels = tuple(f"(x{i},q{q})" for i in range(x_extra) for q in range(k))
    y_labels = tuple(f"(y{i},q{q})" for i in range(y_extra) for q in range(k))
    mass = np.zeros((len(x_labels), len(y_labels)))
    w = 1.0 / (k * x_extra * y_extra)
    for xi in range(x_extra):
        for yi in range(y_extra):
            for q in range(k):
                mass[xi * k + q, yi * k + q] = w
    facts = (
        CertifiedFact(
            kind="origin",
            value=0.0,
            source="exact: perfectly resolvable (the shared uniform part is a "
            "function of each side and kills the conditional dependence)",
        ),
    )
    return CatalogEntry(
        name="uniform-common",
        parameters={"k": k, "x_extra": x_extra, "y_extra": y_extra},
        joint=JointPMF(Alphabet(x_labels), Alphabet(y_labels), mass),
        certified_facts=facts,
        notes=(f"common information = Wyner value = log2({k})",),
    )


def from_file(path: str | os.PathLike) -> CatalogEntry:
    """Load a joint from the JSON schema; no certified facts attached."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    joint = joint_from_json(text)
    return CatalogEntry(
        name=os.path.basename(str(path)),
        parameters={"path": str(path)},
        joint=joint,
    )


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_BUILDERS = {
    "bit-ot": (bit_ot, ()),
    "two-bit-ot": (two_bit_ot, ()),
    "string-ot": (string_ot_pair, ("L",)),
    "z-source": (z_source, ("p",)),
    "connected": (connected_example, ("delta",)),
    "uniform-common": (uniform_common, ("k", "x_extra", "y_extra")),
}


def catalog_names() -> list[str]:
    return sorted(_BUILDERS)


def get_entry(name: str, **params) -> CatalogEntry:
    if name not in _BUILDERS:
        raise ValidationError(
            f"unknown catalog entry {name!r}; available: {', '.join(catalog_names())}"
        )
    builder, accepted = _BUILDERS[name]
    unknown = set(params) - set(accepted)
    if unknown:
        raise ValidationError(
            f"catalog entry {name!r} does not take parameters {sorted(unknown)}"
        )
    args = []
    for key in accepted:
        if key in params:
            args.append(params[key])
        else:
            break
    try:
        return builder(*args)
    except TypeError as exc:
        raise ValidationError(
            f"catalog entry {name!r} needs parameters {list(accepted)}: {exc}"
        ) from exc
