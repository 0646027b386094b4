"""Maps from b-bit quantized values onto codewords, plus distance tables.

A map's table is indexed by the unsigned value of the b-bit two's-complement
pattern (pattern bit 1 = MSB). The three 4-bit codebooks are frozen
constants; the 8-bit ones are derived by greedy basis assignment over the
frozen code constructions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

from .codes import BinaryCode, BitWord, build_code, code_shape, hamming_distance
from .quantize import flip_count

__all__ = [
    "DetectionReport",
    "DistanceMatrix",
    "EncodingMap",
    "build_from_basis",
    "canonical_map",
    "codebook_lines",
    "decode_value",
    "distance_matrix",
    "encode_value",
    "greedy_basis",
    "twos_complement_matrix",
]

# Frozen codebooks for the 4-bit codes, one hex word per value,
# ordered by signed value ascending from -8. The 8-bit codebooks are not
# frozen; they fall out of greedy_basis deterministically.
_CANONICAL_ROWS = {
    "C7_3": "7F 34 68 23 1A 51 0D 46 00 4B 17 5C 65 2E 72 39",
    "C8_4": "FF B4 E8 A3 9A D1 8D C6 00 4B 17 5C 65 2E 72 39",
    "C9_4": "1EF 1F0 193 18C 155 14A 129 136 000 01F 07C 063 0BA 0A5 0C6 0D9",
}


@dataclass(frozen=True)
class DetectionReport:
    """A non-codeword observation: what was read and how far off it is."""

    word: BitWord
    nearest_distance: int


@dataclass(frozen=True)
class EncodingMap:
    """Bijection between b-bit patterns and the codewords of ``code``.

    ``table[k]`` is the codeword for the pattern with unsigned value k.
    The map is GF(2)-linear: table[u ^ v] == table[u] ^ table[v].
    """

    code: BinaryCode
    b: int
    table: tuple[BitWord, ...]
    code_id: str = "custom"

    def __post_init__(self) -> None:
        if self.b != self.code.dimension:
            raise ValueError("map width must equal the code dimension")
        if len(self.table) != 1 << self.b:
            raise ValueError(f"table must have {1 << self.b} entries")
        if len({w.bits for w in self.table}) != len(self.table):
            raise ValueError("table entries are not distinct")
        if any(w not in self.code for w in self.table):
            raise ValueError("table entry is not a codeword")
        # Linearity: the whole table must be the span of the unit images.
        for k in range(1 << self.b):
            acc = 0
            for i in range(self.b):
                if (k >> (self.b - 1 - i)) & 1:
                    acc ^= self.basis_images[i].bits
            if acc != self.table[k].bits:
                raise ValueError("table is not GF(2)-linear")

    @cached_property
    def basis_images(self) -> tuple[BitWord, ...]:
        """Images of the unit patterns e1..eb, e1 being the MSB."""
        return tuple(self.table[1 << (self.b - 1 - i)] for i in range(self.b))

    @cached_property
    def inverse(self) -> dict[int, int]:
        """Codeword bits back to the unsigned pattern value."""
        return {w.bits: k for k, w in enumerate(self.table)}


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise bit-flip costs, rows and columns ascending by signed value."""

    b: int
    entries: tuple[tuple[int, ...], ...]

    def at(self, u: int, v: int) -> int:
        """Cost of changing signed value u into v."""
        half = 1 << (self.b - 1)
        if not (-half <= u < half and -half <= v < half):
            raise ValueError(f"values must lie in [{-half}, {half - 1}]")
        return self.entries[u + half][v + half]


def build_from_basis(
    code: BinaryCode, basis_images: Sequence[BitWord], code_id: str = "custom"
) -> EncodingMap:
    """Linear map sending unit pattern e_i to basis_images[i-1]."""
    b = code.dimension
    if len(basis_images) != b:
        raise ValueError(f"need {b} basis images, got {len(basis_images)}")
    for img in basis_images:
        if img not in code:
            raise ValueError(f"{img} is not a codeword")
    table = []
    for k in range(1 << b):
        acc = 0
        for i in range(b):
            if (k >> (b - 1 - i)) & 1:
                acc ^= basis_images[i].bits
        table.append(BitWord(acc, code.n))
    if len({w.bits for w in table}) != len(table):
        raise ValueError("basis images are linearly dependent")
    return EncodingMap(code, b, tuple(table), code_id)


def greedy_basis(code: BinaryCode) -> tuple[BitWord, ...]:
    """Max-weight-first basis: e1 gets the heaviest codeword, then each
    next unit pattern the heaviest codeword independent of those chosen.
    Ties break toward the smallest unsigned value."""
    candidates = sorted(
        (w for w in code.codewords if w.bits), key=lambda w: (-w.weight, w.bits)
    )
    chosen: list[BitWord] = []
    span = {0}
    for w in candidates:
        if w.bits in span:
            continue
        chosen.append(w)
        span |= {w.bits ^ s for s in span}
        if len(chosen) == code.dimension:
            return tuple(chosen)
    raise ValueError("code has no basis")  # unreachable for a valid code


def _map_from_row(code_id: str, code: BinaryCode, row: str) -> EncodingMap:
    b, n = code_shape(code_id)
    words = tuple(BitWord.from_hex(tok, n) for tok in row.split())
    half = 1 << (b - 1)
    # Row order is signed ascending; table order is unsigned pattern value.
    table = tuple(words[((k + half) % (2 * half))] for k in range(2 * half))
    return EncodingMap(code, b, table, code_id)


@lru_cache(maxsize=None)
def canonical_map(code_id: str) -> EncodingMap:
    """The frozen map for one of the six code ids.

    The 4-bit tables are constants. The published 9-bit codebook contains
    odd-weight words, so it spans its own (9, 16, 4) code rather than a
    subset of the even-weight shortened construction; its map is therefore
    built over the span of its images.
    """
    b, n = code_shape(code_id)
    if code_id in ("C7_3", "C8_4"):
        return _map_from_row(code_id, build_code(code_id), _CANONICAL_ROWS[code_id])
    if code_id == "C9_4":
        row = _CANONICAL_ROWS[code_id]
        words = [BitWord.from_hex(tok, n) for tok in row.split()]
        images = tuple(words[(((1 << (b - 1 - i)) + 8) % 16)] for i in range(b))
        span_code = BinaryCode(n, images)
        return _map_from_row(code_id, span_code, row)
    code = build_code(code_id)
    return build_from_basis(code, greedy_basis(code), code_id)


def encode_value(m: EncodingMap, v: int) -> BitWord:
    """Codeword for the signed value v."""
    half = 1 << (m.b - 1)
    if not -half <= v < half:
        raise ValueError(f"value {v} out of range [{-half}, {half - 1}]")
    return m.table[v & ((1 << m.b) - 1)]


def decode_value(m: EncodingMap, word: BitWord) -> int | DetectionReport:
    """Signed value for a codeword, or a detection report for anything else.

    Never corrects: a word at distance 1 from a codeword is still reported.
    """
    if word.n != m.code.n:
        raise ValueError(f"expected {m.code.n}-bit words, got {word.n}")
    k = m.inverse.get(word.bits)
    if k is None:
        nearest = min(hamming_distance(word, w) for w in m.table)
        return DetectionReport(word, nearest)
    half = 1 << (m.b - 1)
    return k - 2 * half if k >= half else k


def distance_matrix(m: EncodingMap) -> DistanceMatrix:
    """All pairwise codeword distances, signed-ascending on both axes."""
    half = 1 << (m.b - 1)
    order = [m.table[v & ((1 << m.b) - 1)] for v in range(-half, half)]
    entries = tuple(
        tuple(hamming_distance(u, v) for v in order) for u in order
    )
    return DistanceMatrix(m.b, entries)


def twos_complement_matrix(b: int) -> DistanceMatrix:
    """Baseline matrix: plain two's-complement flip counts, no code."""
    half = 1 << (b - 1)
    entries = tuple(
        tuple(flip_count(u, v, b) for v in range(-half, half))
        for u in range(-half, half)
    )
    return DistanceMatrix(b, entries)


def codebook_lines(m: EncodingMap) -> list[str]:
    """Hex codewords, one per line, signed values ascending from -2^(b-1)."""
    half = 1 << (m.b - 1)
    return [encode_value(m, v).hex() for v in range(-half, half)]
