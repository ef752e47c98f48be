"""Decidable desk models of oracle sets and quantifier-prefix conditions.

An :class:`OracleSpec` of depth ``m`` describes, for every branch
``(k_m, ..., k_1)``, whether the innermost condition
``(forall l) <k_m, ..., k_1, l> in O`` holds. Each level carries a *mark*:
a default boolean plus a finite list of exceptional prefixes. Level ``j``
(outermost first, ``j = 0`` is ``k_m``) marks the prefix
``(k_m, ..., k_{m-j})``; the mark is ``default XOR (prefix in exceptions)``.
A leaf condition holds iff every level marks its prefix.

Because exception lists are finite, all but finitely many ``k`` at any level
behave like a single *generic* value, and every ``exists-infinitely`` /
``forall`` question is decided by looking at the exceptions plus one generic
representative.

A refuted leaf has a witness stage ``w``: ``<..., w> not in O`` and every other
``l`` is in ``O``. Budgeted queries see refutations only once ``w <= budget``.

Pairing
-------
``encode`` uses the Cantor pairing ``pi(a, b) = (a + b)(a + b + 1)/2 + b``,
folded right: ``encode(()) = 0``, ``encode((x,)) = x`` and
``encode((x, *rest)) = pi(x, encode(rest))``. So ``encode((0, 0)) == 0``;
decoding needs the arity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

__all__ = [
    "ForallAnswer",
    "Level",
    "OracleSpec",
    "PrefixFormula",
    "Quantifier",
    "TargetSet",
    "Truth",
    "build_oracle_for_target",
    "decode",
    "empty_oracle",
    "encode",
    "eval_prefix",
    "forall_holds",
    "full_oracle",
    "pair",
    "unpair",
]


# -- tupling ---------------------------------------------------------------


def pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    s = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - s * (s + 1) // 2
    return s - b, b


def encode(t: Sequence[int]) -> int:
    if any(x < 0 for x in t):
        raise ValueError("tuple components must be natural numbers")
    if not t:
        return 0
    code = t[-1]
    for x in reversed(t[:-1]):
        code = pair(x, code)
    return code


def decode(n: int, arity: int) -> tuple[int, ...]:
    if n < 0 or arity < 0:
        raise ValueError("code and arity must be natural numbers")
    if arity == 0:
        if n != 0:
            raise ValueError("only 0 encodes the empty tuple")
        return ()
    out = []
    for _ in range(arity - 1):
        head, n = unpair(n)
        out.append(head)
    out.append(n)
    return tuple(out)


# -- three-valued answers ---------------------------------------------------


class Truth(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: bool) -> "Truth":
        return cls.TRUE if value else cls.FALSE


class ForallAnswer(NamedTuple):
    """Answer to ``(forall l) <branch, k, l> in O``.

    ``truth`` is FALSE exactly when a refuting ``witness`` was found.
    """

    truth: Truth
    witness: int | None = None

    @property
    def refuted(self) -> bool:
        return self.truth is Truth.FALSE


# -- oracle model -----------------------------------------------------------


@dataclass(frozen=True)
class Level:
    default: bool = True
    exceptions: frozenset[tuple[int, ...]] = frozenset()

    def marks(self, prefix: tuple[int, ...]) -> bool:
        return self.default != (prefix in self.exceptions)


@dataclass(frozen=True)
class OracleSpec:
    depth: int
    levels: tuple[Level, ...]
    witness_stages: Mapping[tuple[int, ...], int] = field(default_factory=dict)
    default_witness: int = 0

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("oracle depth must be >= 1")
        if len(self.levels) != self.depth:
            raise ValueError(f"expected {self.depth} levels, got {len(self.levels)}")
        for j, level in enumerate(self.levels):
            for exc in level.exceptions:
                if len(exc) != j + 1 or any(x < 0 for x in exc):
                    raise ValueError(f"level {j} exception {exc} must be a natural {j + 1}-tuple")
        for key, w in self.witness_stages.items():
            if len(key) != self.depth or w < 0:
                raise ValueError(f"bad witness stage entry {key}: {w}")
        if self.default_witness < 0:
            raise ValueError("default witness stage must be >= 0")
        object.__setattr__(self, "witness_stages", dict(self.witness_stages))

    def __hash__(self) -> int:
        return hash((self.depth, self.levels, tuple(sorted(self.witness_stages.items())), self.default_witness))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OracleSpec):
            return NotImplemented
        return (
            self.depth == other.depth
            and self.levels == other.levels
            and self.witness_stages == other.witness_stages
            and self.default_witness == other.default_witness
        )

    # ground truth -------------------------------------------------------

    def leaf_holds(self, leaf: Sequence[int]) -> bool:
        """Exact truth of ``(forall l) <leaf, l> in O``."""
        leaf = tuple(leaf)
        if len(leaf) != self.depth:
            raise ValueError(f"branch of length {len(leaf)} for depth-{self.depth} oracle")
        return all(level.marks(leaf[: j + 1]) for j, level in enumerate(self.levels))

    def witness(self, leaf: Sequence[int]) -> int | None:
        """Refuting ``l`` of a refuted leaf, ``None`` if the leaf holds."""
        leaf = tuple(leaf)
        if self.leaf_holds(leaf):
            return None
        return self.witness_stages.get(leaf, self.default_witness)

    def member(self, leaf: Sequence[int], ell: int) -> bool:
        """Is ``<leaf, ell>`` in O?"""
        return self.witness(leaf) != ell

    def generic(self, prefix: Sequence[int]) -> int:
        """A value at position ``len(prefix)`` not named by any exception or
        witness entry; all such values behave identically."""
        pos = len(prefix)
        used = [key[pos] for level in self.levels for key in level.exceptions if len(key) > pos]
        used += [key[pos] for key in self.witness_stages]
        return max(used, default=-1) + 1

    def special_values(self, prefix: Sequence[int]) -> list[int]:
        """Values at position ``len(prefix)`` named by some exception extending
        ``prefix`` (witness entries included), ascending."""
        prefix = tuple(prefix)
        pos = len(prefix)
        keys = [key for level in self.levels for key in level.exceptions if len(key) > pos]
        keys += list(self.witness_stages)
        return sorted({key[pos] for key in keys if key[:pos] == prefix})

    def restrict(self, prefix: Sequence[int]) -> "OracleSpec":
        """The oracle seen below a fixed outer ``prefix`` (branch restriction)."""
        prefix = tuple(prefix)
        p = len(prefix)
        if p == 0:
            return self
        if p >= self.depth:
            raise ValueError("restriction must leave at least one level")
        outer_ok = all(self.levels[j].marks(prefix[: j + 1]) for j in range(p))
        levels = []
        for j in range(p, self.depth):
            level = self.levels[j]
            exc = frozenset(k[p:] for k in level.exceptions if k[:p] == prefix)
            levels.append(Level(level.default, exc))
        if not outer_ok:
            # every leaf below is refuted
            levels = [Level(True, frozenset()) for _ in levels[:-1]] + [Level(False, frozenset())]
        witnesses = {k[p:]: w for k, w in self.witness_stages.items() if k[:p] == prefix}
        return OracleSpec(self.depth - p, tuple(levels), witnesses, self.default_witness)

    # json ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "levels": [
                {"default": lv.default, "exceptions": [list(e) for e in sorted(lv.exceptions)]}
                for lv in self.levels
            ],
            "witness_stages": {
                ",".join(map(str, k)): w for k, w in sorted(self.witness_stages.items())
            },
            "default_witness_stage": self.default_witness,
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "OracleSpec":
        try:
            depth = int(payload["depth"])
            levels = tuple(
                Level(bool(lv["default"]), frozenset(tuple(int(x) for x in e) for e in lv.get("exceptions", [])))
                for lv in payload["levels"]
            )
            witnesses = {
                tuple(int(x) for x in key.split(",")): int(w)
                for key, w in payload.get("witness_stages", {}).items()
            }
            default_witness = int(payload.get("default_witness_stage", 0))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ValueError(f"bad oracle payload: {exc}") from exc
        return cls(depth, levels, witnesses, default_witness)


def full_oracle(depth: int) -> OracleSpec:
    """Every innermost condition holds (the oracle ``N``)."""
    return OracleSpec(depth, tuple(Level(True) for _ in range(depth)))


def empty_oracle(depth: int, witness: int = 0) -> OracleSpec:
    """Every innermost condition is refuted at stage ``witness``."""
    levels = tuple(Level(True) for _ in range(depth - 1)) + (Level(False),)
    return OracleSpec(depth, levels, {}, witness)


def forall_holds(
    o: OracleSpec, branch: Sequence[int], k: int, budget: int | None = None
) -> ForallAnswer:
    """Decide ``(forall l) <branch, k, l> in O``.

    ``budget=None`` is exact mode. With a finite budget only ``l <= budget``
    is searched, so the answer is FALSE (with the witness) or UNKNOWN, never
    TRUE.
    """
    leaf = (*branch, k)
    w = o.witness(leaf)
    if budget is None:
        return ForallAnswer(Truth.TRUE) if w is None else ForallAnswer(Truth.FALSE, w)
    if w is not None and w <= budget:
        return ForallAnswer(Truth.FALSE, w)
    return ForallAnswer(Truth.UNKNOWN)


# -- quantifier prefixes ----------------------------------------------------


class Quantifier(enum.Enum):
    EXISTS_INF = "exists_inf"
    FORALL = "forall"
    EXISTS = "exists"


@dataclass(frozen=True)
class PrefixFormula:
    """``(Q_1 v_1) ... (Q_n v_n) <fixed, v_1, ..., v_n> in O``.

    The last variable ranges over ``l``; the others over branch positions of
    the oracle below the fixed outer values.
    """

    quantifiers: tuple[tuple[Quantifier, str], ...]
    fixed: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        names = [name for _, name in self.quantifiers]
        if len(set(names)) != len(names):
            raise ValueError("each variable must be bound exactly once")
        if not self.quantifiers:
            raise ValueError("a prefix needs at least the l quantifier")

    @property
    def depth(self) -> int:
        return len(self.fixed) + len(self.quantifiers) - 1

    @classmethod
    def standard(cls, depth: int, fixed: Sequence[int] = ()) -> "PrefixFormula":
        """``(exists-inf k_d) ... (exists-inf k_1)(forall l)``."""
        qs = tuple((Quantifier.EXISTS_INF, f"k{i}") for i in range(depth, 0, -1))
        return cls(qs + ((Quantifier.FORALL, "l"),), tuple(fixed))


def eval_prefix(f: PrefixFormula, o: OracleSpec, budget: int | None = None) -> Truth:
    """Evaluate a prefix formula exactly (``budget=None``) or at a budget.

    Exact mode uses the finite-exception structure: a generic value stands for
    all cofinitely many unnamed values, so ``exists-inf`` is decided by the
    generic value alone.

    Budget mode restricts every quantifier to values ``<= budget`` and uses
    Kleene logic: a bounded ``exists`` or ``forall`` over ``k`` only decides
    when a single witness settles it. ``exists-inf`` is a heuristic there: it
    answers TRUE when at least ``budget / 2`` of the values ``<= budget`` are
    TRUE, and otherwise UNKNOWN.
    """
    if f.depth != o.depth:
        raise ValueError(f"formula depth {f.depth} does not match oracle depth {o.depth}")

    def ell_step(q: Quantifier, leaf: tuple[int, ...]) -> Truth:
        w = o.witness(leaf)
        if q is Quantifier.FORALL:
            if budget is None:
                return Truth.of(w is None)
            return Truth.FALSE if w is not None and w <= budget else Truth.UNKNOWN
        # some l is always a member: at most one l is excluded
        return Truth.TRUE

    def step(i: int, prefix: tuple[int, ...]) -> Truth:
        q, _ = f.quantifiers[i]
        if i == len(f.quantifiers) - 1:
            return ell_step(q, prefix)
        if budget is None:
            generic = o.generic(prefix)
            if q is Quantifier.EXISTS_INF:
                return step(i + 1, prefix + (generic,))
            values = [*o.special_values(prefix), generic]
            results = [step(i + 1, prefix + (v,)) for v in values]
            if q is Quantifier.FORALL:
                return Truth.of(all(r is Truth.TRUE for r in results))
            return Truth.of(Truth.TRUE in results)
        results = [step(i + 1, prefix + (v,)) for v in range(budget + 1)]
        if q is Quantifier.FORALL:
            return Truth.FALSE if Truth.FALSE in results else Truth.UNKNOWN
        if q is Quantifier.EXISTS:
            return Truth.TRUE if Truth.TRUE in results else Truth.UNKNOWN
        hits = sum(r is Truth.TRUE for r in results)
        return Truth.TRUE if budget > 0 and 2 * hits >= budget else Truth.UNKNOWN

    return step(0, tuple(f.fixed))


# -- targets ----------------------------------------------------------------


@dataclass(frozen=True)
class TargetSet:
    """Desk description of a set ``A`` containing all even numbers.

    Odd numbers above ``bound`` are treated as non-members.
    """

    bound: int
    odd_members: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.bound < 0:
            raise ValueError("bound must be >= 0")
        bad = [m for m in self.odd_members if m % 2 == 0 or m < 0 or m > self.bound]
        if bad:
            raise ValueError(f"odd_members must be odd numbers <= bound, got {sorted(bad)}")

    def __contains__(self, m: int) -> bool:
        return m % 2 == 0 or m in self.odd_members

    def members(self) -> list[int]:
        return [m for m in range(self.bound + 1) if m in self]

    def to_json(self) -> dict:
        return {"bound": self.bound, "members": self.members()}

    @classmethod
    def from_json(cls, payload: Mapping) -> "TargetSet":
        try:
            bound = int(payload["bound"])
            members = {int(m) for m in payload["members"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad target payload: {exc}") from exc
        missing = [m for m in range(0, bound + 1, 2) if m not in members]
        if missing:
            raise ValueError(f"target must contain every even number; missing {missing}")
        if any(m > bound or m < 0 for m in members):
            raise ValueError("members must lie in [0, bound]")
        return cls(bound, frozenset(m for m in members if m % 2))


def build_oracle_for_target(target: TargetSet, m: int) -> OracleSpec:
    """Depth ``m + 1`` oracle whose standard prefix holds iff ``m`` is not in A.

    ``m`` not in A: every level defaults to true. ``m`` in A: the innermost
    level defaults to refuted, witnessed at stage 0.
    """
    if m < 0:
        raise ValueError("block index must be >= 0")
    depth = m + 1
    if m in target:
        return empty_oracle(depth, witness=0)
    return full_oracle(depth)
