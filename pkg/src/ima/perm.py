"""Sorts, objects and permutation symbols.

Objects are finite words over a set of abstract sorts; the empty word is
the unit object.  A permutation symbol is a word of objects (its blocks)
together with a permutation of the blocks.  Flattening a symbol yields the
induced bijection on letter positions, which is all that algebra instances
ever consume.  Two symbols with equal domain, codomain and flattening are
interchangeable everywhere, so ``PermSymbol.__eq__`` is exactly that
coarser equality; the block structure stays observable for composability
checks and for building the two readings of a grouped symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence

from .errors import NotComposable


@dataclass(frozen=True, order=True)
class Sort:
    """An abstract sort, identified by its (nonempty) name."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("sort name must be nonempty")

    def __repr__(self):
        return f"Sort({self.name!r})"


@dataclass(frozen=True)
class Obj:
    """A word of sorts; the unit object is the empty word."""

    word: tuple[Sort, ...] = ()

    @staticmethod
    def of(*sorts: Sort) -> "Obj":
        return Obj(tuple(sorts))

    @staticmethod
    def parse(text: str) -> "Obj":
        """One sort per character; ``()`` or the empty string is the unit."""
        if text in ("()", ""):
            return Obj()
        return Obj(tuple(Sort(c) for c in text))

    def __len__(self) -> int:
        return len(self.word)

    def __iter__(self) -> Iterator[Sort]:
        return iter(self.word)

    def __getitem__(self, i):
        got = self.word[i]
        return Obj(got) if isinstance(i, slice) else got

    def __add__(self, other: "Obj") -> "Obj":
        return Obj(self.word + other.word)

    def __bool__(self) -> bool:
        return bool(self.word)

    def __str__(self) -> str:
        return "".join(s.name for s in self.word) or "()"

    def __repr__(self):
        return f"Obj.parse({str(self)!r})"


UNIT = Obj()


def concat(objs: Sequence[Obj]) -> Obj:
    return reduce(lambda a, b: a + b, objs, UNIT)


@dataclass(frozen=True, eq=False)
class PermSymbol:
    """Blocks ``b_1 .. b_n`` plus a block permutation.

    ``pi[j]`` is the index of the block placed at target slot ``j``, so the
    codomain word is ``blocks[pi[0]] .. blocks[pi[n-1]]``.
    """

    blocks: tuple[Obj, ...]
    pi: tuple[int, ...]

    def __post_init__(self):
        n = len(self.blocks)
        if sorted(self.pi) != list(range(n)):
            raise ValueError(f"pi must be a permutation of 0..{n - 1}")

    @property
    def dom(self) -> Obj:
        return concat(self.blocks)

    @property
    def cod(self) -> Obj:
        return concat([self.blocks[i] for i in self.pi])

    def cod_blocks(self) -> tuple[Obj, ...]:
        return tuple(self.blocks[i] for i in self.pi)

    def flatten(self) -> tuple[int, ...]:
        """The induced position bijection: source letter ``i`` lands at
        target position ``flatten()[i]`` (0-based)."""
        n = len(self.blocks)
        dom_off = [0] * n
        for i in range(1, n):
            dom_off[i] = dom_off[i - 1] + len(self.blocks[i - 1])
        slot_of = [0] * n
        for j, i in enumerate(self.pi):
            slot_of[i] = j
        cod_off = [0] * n
        acc = 0
        for j, i in enumerate(self.pi):
            cod_off[j] = acc
            acc += len(self.blocks[i])
        out = [0] * len(self.dom)
        for i, block in enumerate(self.blocks):
            base = cod_off[slot_of[i]]
            for k in range(len(block)):
                out[dom_off[i] + k] = base + k
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, PermSymbol):
            return NotImplemented
        return (
            self.dom == other.dom
            and self.cod == other.cod
            and self.flatten() == other.flatten()
        )

    def __hash__(self):
        return hash((self.dom, self.cod, self.flatten()))

    def __repr__(self):
        body = ")(".join(str(b) for b in self.blocks)
        one_based = tuple(i + 1 for i in self.pi)
        return f"PermSymbol[({body}) # {one_based}]"


def identity(w: Obj) -> PermSymbol:
    """The identity symbol on ``w``; blocks are the single letters of ``w``."""
    return PermSymbol(tuple(Obj.of(s) for s in w), tuple(range(len(w))))


def block_transposition(v: Obj, w: Obj) -> PermSymbol:
    """The symbol ``vw => wv`` moving the first ``|v|`` positions past the
    last ``|w|``; stored as the two blocks ``(v)(w)`` swapped."""
    return PermSymbol((v, w), (1, 0))


def from_positions(word: Obj, sends: Sequence[int]) -> PermSymbol:
    """The singleton-block symbol on ``word`` whose flattening sends source
    position ``i`` to ``sends[i]`` (0-based)."""
    n = len(word)
    if sorted(sends) != list(range(n)):
        raise ValueError("sends must be a permutation of positions")
    pi = [0] * n
    for i, j in enumerate(sends):
        pi[j] = i
    return PermSymbol(tuple(Obj.of(s) for s in word), tuple(pi))


def compose(r1: PermSymbol, r2: PermSymbol) -> PermSymbol:
    """Diagrammatic composition: ``r1`` then ``r2``.

    The two symbols must be composable as block strings: the codomain
    blocks of ``r1`` must equal the blocks of ``r2`` verbatim.
    """
    if r1.cod_blocks() != r2.blocks:
        raise NotComposable(f"cannot compose {r1!r} with {r2!r}")
    pi = tuple(r1.pi[r2.pi[j]] for j in range(len(r1.blocks)))
    return PermSymbol(r1.blocks, pi)


def tensor(r1: PermSymbol, r2: PermSymbol) -> PermSymbol:
    """Side-by-side juxtaposition; the second symbol's blocks are shifted."""
    n1 = len(r1.blocks)
    pi = r1.pi + tuple(n1 + i for i in r2.pi)
    return PermSymbol(r1.blocks + r2.blocks, pi)


def tensor_all(symbols: Sequence[PermSymbol]) -> PermSymbol:
    return reduce(tensor, symbols, PermSymbol((), ()))


def equivalent(r1: PermSymbol, r2: PermSymbol) -> bool:
    """Equal domain and codomain objects and equal flattenings."""
    return r1 == r2


def from_groups_fine(groups: Sequence[Sequence[Obj]], alpha: Sequence[int]) -> PermSymbol:
    """Read a grouped symbol at the letter level: one block per inner
    object, the group permutation ``alpha`` lifted blockwise."""
    blocks: list[Obj] = []
    offsets = []
    for g in groups:
        offsets.append(len(blocks))
        blocks.extend(g)
    pi: list[int] = []
    for src in alpha:
        pi.extend(range(offsets[src], offsets[src] + len(groups[src])))
    return PermSymbol(tuple(blocks), tuple(pi))


def from_groups_coarse(groups: Sequence[Sequence[Obj]], alpha: Sequence[int]) -> PermSymbol:
    """Read a grouped symbol with each group collapsed to a single block."""
    blocks = tuple(concat(list(g)) for g in groups)
    return PermSymbol(blocks, tuple(alpha))
