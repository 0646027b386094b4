"""Binary linear codes on short bit-words.

Words are immutable fixed-length bit strings packed into a Python int.
Coordinate 1 is the leftmost (most significant) bit; hex rendering reads
the whole word MSB-first, so the 7-bit word 1111111 prints as ``7F`` and
9-bit words use three hex digits.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

__all__ = [
    "BitWord",
    "BinaryCode",
    "CODE_IDS",
    "DEFAULT_SUBCODE_SEED",
    "MAX_WORD_LEN",
    "build_code",
    "code_shape",
    "construct_hamming",
    "extend_code",
    "hamming_distance",
    "linear_subcode",
    "min_distance",
    "pairwise_min_distance",
    "shorten_code",
    "shorten_words",
]

MAX_WORD_LEN = 64

# Spans larger than 2^11 words are never materialized.
_ENUM_DIM_LIMIT = 11

# Parity-check column order for construct_hamming is alpha^(n-1) .. alpha^0
# over GF(2^r) with these primitive polynomials. The r=3 entry is the one
# that makes the 7-bit construction land on the canonical 16-word codebook;
# the others are the reciprocal-family polynomials of the same shape.
_PRIMITIVE_POLY = {
    2: 0b111,      # x^2 + x + 1
    3: 0b1101,     # x^3 + x^2 + 1
    4: 0b11001,    # x^4 + x^3 + 1
    5: 0b101001,   # x^5 + x^3 + 1
    6: 0b1100001,  # x^6 + x^5 + 1
}

DEFAULT_SUBCODE_SEED = 0


@dataclass(frozen=True)
class BitWord:
    """Fixed-length bit string; ``bits`` holds coordinate 1 in its MSB."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_WORD_LEN:
            raise ValueError(f"word length must be 1..{MAX_WORD_LEN}, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits:#x} do not fit in {self.n} bits")

    @classmethod
    def from_string(cls, s: str) -> "BitWord":
        """Parse a string of 0s and 1s, leftmost character = coordinate 1."""
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(int(s, 2), len(s))

    @classmethod
    def from_hex(cls, s: str, n: int) -> "BitWord":
        return cls(int(s, 16), n)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def coord(self, i: int) -> int:
        """Bit at coordinate i, 1-indexed from the left."""
        if not 1 <= i <= self.n:
            raise ValueError(f"coordinate {i} out of range 1..{self.n}")
        return (self.bits >> (self.n - i)) & 1

    def flip(self, i: int) -> "BitWord":
        if not 1 <= i <= self.n:
            raise ValueError(f"coordinate {i} out of range 1..{self.n}")
        return BitWord(self.bits ^ (1 << (self.n - i)), self.n)

    def __xor__(self, other: "BitWord") -> "BitWord":
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BitWord(self.bits ^ other.bits, self.n)

    def hex(self) -> str:
        return f"{self.bits:0{(self.n + 3) // 4}X}"

    def __str__(self) -> str:
        return f"{self.bits:0{self.n}b}"


def hamming_distance(u: BitWord, v: BitWord) -> int:
    """Number of coordinates where u and v differ."""
    if u.n != v.n:
        raise ValueError(f"length mismatch: {u.n} vs {v.n}")
    return (u.bits ^ v.bits).bit_count()


def _reduce(word: int, pivots: dict[int, int]) -> int:
    """Reduce a word against an int-row basis keyed by pivot bit position."""
    while word:
        top = word.bit_length() - 1
        if top not in pivots:
            break
        word ^= pivots[top]
    return word


def _independent_basis(rows: Iterable[int]) -> dict[int, int]:
    """Pivot-keyed basis of the span; raises if any input row is dependent."""
    pivots: dict[int, int] = {}
    for row in rows:
        reduced = _reduce(row, pivots)
        if reduced == 0:
            raise ValueError("generator rows are linearly dependent")
        pivots[reduced.bit_length() - 1] = reduced
    return pivots


def _span_basis(words: Iterable[int]) -> list[int]:
    """Basis of the span of an arbitrary word collection (dependents dropped)."""
    pivots: dict[int, int] = {}
    for word in words:
        reduced = _reduce(word, pivots)
        if reduced:
            pivots[reduced.bit_length() - 1] = reduced
    return [pivots[p] for p in sorted(pivots, reverse=True)]


@dataclass(frozen=True)
class BinaryCode:
    """Linear code over GF(2) given by independent generator rows.

    The codeword set is the full 2^k span of the generator; it is only
    materialized for dimensions up to 11 (2048 words).
    """

    n: int
    generator: tuple[BitWord, ...]

    def __post_init__(self) -> None:
        if not self.generator:
            raise ValueError("generator must have at least one row")
        if any(g.n != self.n for g in self.generator):
            raise ValueError("generator row length differs from code length")
        if len(self.generator) > self.n:
            raise ValueError("more generator rows than coordinates")
        _independent_basis(g.bits for g in self.generator)

    @property
    def dimension(self) -> int:
        return len(self.generator)

    @property
    def size(self) -> int:
        return 1 << self.dimension

    @cached_property
    def codewords(self) -> tuple[BitWord, ...]:
        """All 2^k codewords, ascending by unsigned value."""
        if self.dimension > _ENUM_DIM_LIMIT:
            raise ValueError(
                f"refusing to enumerate 2^{self.dimension} codewords"
            )
        span = [0]
        for g in self.generator:
            span += [w ^ g.bits for w in span]
        return tuple(BitWord(w, self.n) for w in sorted(span))

    @cached_property
    def _codeword_bits(self) -> frozenset[int]:
        return frozenset(w.bits for w in self.codewords)

    def __contains__(self, word: BitWord) -> bool:
        if word.n != self.n:
            return False
        if self.dimension <= _ENUM_DIM_LIMIT:
            return word.bits in self._codeword_bits
        pivots = _independent_basis(g.bits for g in self.generator)
        return _reduce(word.bits, pivots) == 0

    @cached_property
    def min_distance(self) -> int:
        """Certified minimum distance: least nonzero codeword weight."""
        return min(w.weight for w in self.codewords if w.bits)


def min_distance(c: BinaryCode) -> int:
    """Exact minimum distance of a linear code (brute force over the span)."""
    return c.min_distance


def pairwise_min_distance(words: Sequence[BitWord]) -> int:
    """Minimum distance over all distinct pairs of an arbitrary word set."""
    if len(words) < 2:
        raise ValueError("need at least two words")
    return min(
        hamming_distance(words[i], words[j])
        for i in range(len(words))
        for j in range(i + 1, len(words))
    )


def _gf2_times_x(a: int, poly: int, r: int) -> int:
    a <<= 1
    if a >> r:
        a ^= poly
    return a


def construct_hamming(r: int) -> BinaryCode:
    """Hamming code of redundancy r: a (2^r - 1, 2^(2^r - r - 1), 3) code.

    The parity-check columns are the powers alpha^(n-1) .. alpha^0 of a
    primitive element, so the code is cyclic and the column order is frozen
    by ``_PRIMITIVE_POLY``.
    """
    if r not in _PRIMITIVE_POLY:
        raise ValueError(f"redundancy must be 2..6, got {r}")
    poly = _PRIMITIVE_POLY[r]
    n = (1 << r) - 1
    cols = [1]
    for _ in range(n - 1):
        cols.append(_gf2_times_x(cols[-1], poly, r))
    cols.reverse()  # coordinate 1 carries alpha^(n-1)

    # Null space of H via elimination on its r rows.
    rows = []
    for bit in range(r - 1, -1, -1):
        row = 0
        for col in cols:
            row = (row << 1) | ((col >> bit) & 1)
        rows.append(row)
    pivot_cols: list[int] = []
    rank = 0
    for col in range(n):
        mask = 1 << (n - 1 - col)
        hit = next((i for i in range(rank, len(rows)) if rows[i] & mask), None)
        if hit is None:
            continue
        rows[rank], rows[hit] = rows[hit], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & mask:
                rows[i] ^= rows[rank]
        pivot_cols.append(col)
        rank += 1
    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        fmask = 1 << (n - 1 - f)
        word = fmask
        for i, p in enumerate(pivot_cols):
            if rows[i] & fmask:
                word |= 1 << (n - 1 - p)
        basis.append(BitWord(word, n))
    return BinaryCode(n, tuple(basis))


def extend_code(c: BinaryCode) -> BinaryCode:
    """Add an overall parity bit at coordinate 1; every codeword ends up
    with even weight. Extending a Hamming code raises the distance to 4."""
    if c.n >= MAX_WORD_LEN:
        raise ValueError("extension would exceed the 64-bit word limit")

    def ext(g: BitWord) -> BitWord:
        return BitWord(((g.weight & 1) << c.n) | g.bits, c.n + 1)

    # Parity is additive, so extending the generator rows extends the span.
    return BinaryCode(c.n + 1, tuple(ext(g) for g in c.generator))


def shorten_words(words: Iterable[BitWord], positions: Sequence[int]) -> tuple[BitWord, ...]:
    """Shorten an arbitrary word set: keep words with 0 at each position,
    then delete that coordinate.

    Applied one position at a time, highest index first, so ``positions``
    always refer to coordinates of the original words.
    """
    wlist = list(words)
    if not wlist:
        raise ValueError("empty word set")
    n = wlist[0].n
    if any(w.n != n for w in wlist):
        raise ValueError("words must share one length")
    if len(set(positions)) != len(positions):
        raise ValueError("duplicate shortening positions")
    if any(not 1 <= p <= n for p in positions):
        raise ValueError(f"positions must lie in 1..{n}")
    if len(positions) >= n:
        raise ValueError("cannot shorten away every coordinate")

    cur = [w.bits for w in wlist]
    width = n
    for p in sorted(positions, reverse=True):
        shift = width - p  # bit position of coordinate p
        kept = [w for w in cur if not (w >> shift) & 1]
        if not kept:
            raise ValueError(f"no words have 0 at coordinate {p}")
        cur = [((w >> (shift + 1)) << shift) | (w & ((1 << shift) - 1)) for w in kept]
        width -= 1
    return tuple(BitWord(w, width) for w in sorted(set(cur)))


def shorten_code(c: BinaryCode, positions: Sequence[int]) -> BinaryCode:
    """Shorten a linear code at the given original coordinates.

    Minimum distance never decreases; the size drops by at most a factor
    of 2 per position.
    """
    survivors = shorten_words(c.codewords, positions)
    basis = _span_basis(w.bits for w in survivors)
    if not basis:
        raise ValueError("shortening left only the zero word")
    width = c.n - len(positions)
    return BinaryCode(width, tuple(BitWord(b, width) for b in basis))


def linear_subcode(c: BinaryCode, dim: int, seed: int = DEFAULT_SUBCODE_SEED) -> BinaryCode:
    """Random linear subcode of dimension ``dim``, deterministic per seed.

    Generator rows are drawn by rejection sampling: uniform picks from the
    sorted nonzero codeword list, dependent picks discarded.
    """
    if not 1 <= dim <= c.dimension:
        raise ValueError(f"subcode dimension must be 1..{c.dimension}, got {dim}")
    words = c.codewords  # sorted; words[0] is the zero word
    rng = random.Random(seed)
    chosen: list[BitWord] = []
    pivots: dict[int, int] = {}
    while len(chosen) < dim:
        pick = words[rng.randrange(1, len(words))]
        reduced = _reduce(pick.bits, pivots)
        if reduced == 0:
            continue
        pivots[reduced.bit_length() - 1] = reduced
        chosen.append(pick)
    return BinaryCode(c.n, tuple(chosen))


# Identity strings shared by the CLI, the blob header, and the map registry.
CODE_IDS = ("C7_3", "C8_4", "C9_4", "C12_3", "C13_4", "C14_4")

# code id -> (quantizer bits b, codeword length n)
_CODE_SHAPE = {
    "C7_3": (4, 7),
    "C8_4": (4, 8),
    "C9_4": (4, 9),
    "C12_3": (8, 12),
    "C13_4": (8, 13),
    "C14_4": (8, 14),
}


def code_shape(code_id: str) -> tuple[int, int]:
    """(b, n) for one of the six frozen code ids."""
    try:
        return _CODE_SHAPE[code_id]
    except KeyError:
        raise ValueError(f"unknown code id {code_id!r}, expected one of {CODE_IDS}") from None


@lru_cache(maxsize=None)
def build_code(code_id: str) -> BinaryCode:
    """One of the six frozen constructions.

    C9_4, C13_4 and C14_4 derive from the extended r=4 Hamming code,
    C12_3 from the plain one; "last k locations" means the k highest
    coordinate indices.
    """
    code_shape(code_id)  # validates the id
    if code_id == "C7_3":
        return construct_hamming(3)
    if code_id == "C8_4":
        return extend_code(construct_hamming(3))
    if code_id == "C9_4":
        return shorten_code(extend_code(construct_hamming(4)), range(10, 17))
    if code_id == "C12_3":
        return shorten_code(construct_hamming(4), range(13, 16))
    if code_id == "C13_4":
        return shorten_code(extend_code(construct_hamming(4)), range(14, 17))
    # C14_4: dimension-8 subcode of the twice-shortened extended code
    parent = shorten_code(extend_code(construct_hamming(4)), range(15, 17))
    return linear_subcode(parent, 8, DEFAULT_SUBCODE_SEED)
