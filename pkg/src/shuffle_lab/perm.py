"""Permutation algebra, deck states, and dense indexing of S_n.

Positions are 1-based everywhere in the public interface: position 1 is the
top of the deck, position n the bottom.  A :class:`Permutation` maps positions
to positions (``image[i-1]`` is where the occupant of position ``i`` goes); a
:class:`DeckState` maps card labels to positions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .rng import Stream

DEFAULT_CAP = 8


class SizeMismatchError(ValueError):
    pass


class CapExceededError(ValueError):
    pass


def _check_bijection(seq: tuple[int, ...], what: str) -> None:
    n = len(seq)
    if n == 0:
        raise ValueError(f"{what} must be non-empty")
    seen = [False] * n
    for v in seq:
        if not (1 <= v <= n) or seen[v - 1]:
            raise ValueError(f"{what} is not a bijection on 1..{n}: {seq}")
        seen[v - 1] = True


@dataclass(frozen=True)
class Permutation:
    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(v) for v in self.image))
        _check_bijection(self.image, "Permutation.image")

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, position: int) -> int:
        return self.image[position - 1]


@dataclass(frozen=True)
class DeckState:
    position_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "position_of", tuple(int(v) for v in self.position_of)
        )
        _check_bijection(self.position_of, "DeckState.position_of")

    @property
    def n(self) -> int:
        return len(self.position_of)

    @classmethod
    def identity(cls, n: int) -> "DeckState":
        """Card i at position i (card 1 on top)."""
        return cls(tuple(range(1, n + 1)))

    def position(self, card: int) -> int:
        return self.position_of[card - 1]

    def occupants(self) -> tuple[int, ...]:
        """Card at each position, top to bottom (inverse view)."""
        occ = [0] * self.n
        for card, pos in enumerate(self.position_of, start=1):
            occ[pos - 1] = card
        return tuple(occ)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """a after b: (a.b)(i) = a(b(i))."""
    if a.n != b.n:
        raise SizeMismatchError(f"compose: sizes differ ({a.n} vs {b.n})")
    return Permutation(tuple(a.image[b.image[i] - 1] for i in range(a.n)))


def invert(a: Permutation) -> Permutation:
    inv = [0] * a.n
    for i, v in enumerate(a.image, start=1):
        inv[v - 1] = i
    return Permutation(tuple(inv))


def apply_perm(a: Permutation, d: DeckState) -> DeckState:
    """Move every card through ``a``'s position map."""
    if a.n != d.n:
        raise SizeMismatchError(f"apply: sizes differ ({a.n} vs {d.n})")
    return DeckState(tuple(a.image[p - 1] for p in d.position_of))


def sample_uniform(n: int, stream: Stream) -> Permutation:
    """Uniform draw from S_n by Fisher-Yates (n-1 bounded draws)."""
    img = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        j = stream.below(i + 1)
        img[i], img[j] = img[j], img[i]
    return Permutation(tuple(img))


# --- dense S_n indexing (lexicographic / factorial number system) ---------


def _require_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceededError(
            f"n={n} exceeds the exact-enumeration cap {cap} "
            f"(pass a larger cap explicitly to override)"
        )


def enumerate_group(n: int, cap: int = DEFAULT_CAP) -> list[Permutation]:
    """All n! permutations in lexicographic order of their image words."""
    _require_cap(n, cap)
    return [Permutation(img) for img in itertools.permutations(range(1, n + 1))]


def perm_rank(p: Permutation) -> int:
    """Lexicographic rank of ``p`` in S_n (identity has rank 0)."""
    n = p.n
    rank = 0
    remaining = list(range(1, n + 1))
    for i, v in enumerate(p.image):
        idx = remaining.index(v)
        rank += idx * math.factorial(n - 1 - i)
        remaining.pop(idx)
    return rank


def perm_unrank(n: int, rank: int) -> Permutation:
    if not 0 <= rank < math.factorial(n):
        raise ValueError(f"rank {rank} out of range for S_{n}")
    remaining = list(range(1, n + 1))
    img = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        idx, rank = divmod(rank, f)
        img.append(remaining.pop(idx))
    return Permutation(tuple(img))


def images_array(n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """(n!, n) int array of image words in rank order."""
    _require_cap(n, cap)
    return np.array(
        list(itertools.permutations(range(1, n + 1))), dtype=np.int64
    )


def rank_lookup(images: np.ndarray) -> dict[bytes, int]:
    """bytes(image word) -> rank, for the output of :func:`images_array`."""
    return {row.tobytes(): r for r, row in enumerate(images)}
