"""Container format for code-protected weight tensors.

Wire layout, all integers big-endian:

    magic     8 bytes   b"DNCODE01"
    code_id   u8 length, then UTF-8 bytes
    bits      u8        quantizer width b
    n         u8        codeword length
    count     u64       number of encoded values
    layer_id  u16 length, then UTF-8 bytes
    payload   ceil(count*n/8) bytes

The payload is the codewords packed back to back, MSB-first: coordinate 1
of the first codeword sits in the most significant bit of payload byte 0,
and unused trailing bits of the last byte are zero.

Decoding is detection-only. A slice that is not a codeword is reported,
never silently corrected, and no values are returned for a dirty blob.
"""
from __future__ import annotations

import struct
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .codes import code_shape
from .encoding import EncodingMap, encode_value
from .quantize import QuantConfig, signed_value

__all__ = [
    "MAGIC",
    "CorruptBlobError",
    "EncodedBlob",
    "OverheadReport",
    "VerifyReport",
    "decode_tensor",
    "encode_tensor",
    "overhead_report",
    "pack_words",
    "read_sidecar",
    "timed_verify",
    "unpack_words",
    "verify_blob",
    "write_sidecar",
]

MAGIC = b"DNCODE01"


class CorruptBlobError(Exception):
    """The byte stream is not a structurally valid blob."""


def pack_words(words: Iterable[int], n: int) -> bytes:
    """Pack n-bit ints contiguously, MSB-first, zero-padding the last byte."""
    out = bytearray()
    acc = 0
    acc_bits = 0
    for w in words:
        acc = (acc << n) | w
        acc_bits += n
        while acc_bits >= 8:
            acc_bits -= 8
            out.append((acc >> acc_bits) & 0xFF)
    if acc_bits:
        out.append((acc << (8 - acc_bits)) & 0xFF)
    return bytes(out)


def unpack_words(payload: bytes, n: int, count: int) -> list[int]:
    """Inverse of pack_words; checks length and zero padding."""
    need = (count * n + 7) // 8
    if len(payload) < need:
        raise CorruptBlobError(f"payload truncated: {len(payload)} bytes, need {need}")
    if len(payload) > need:
        raise CorruptBlobError(f"payload has {len(payload) - need} trailing bytes")
    words = []
    acc = 0
    acc_bits = 0
    pos = 0
    for _ in range(count):
        while acc_bits < n:
            acc = (acc << 8) | payload[pos]
            pos += 1
            acc_bits += 8
        acc_bits -= n
        words.append((acc >> acc_bits) & ((1 << n) - 1))
        acc &= (1 << acc_bits) - 1
    if acc or any(payload[pos:]):
        raise CorruptBlobError("nonzero padding bits")
    return words


@dataclass(frozen=True)
class EncodedBlob:
    code_id: str
    bits: int
    n: int
    count: int
    layer_id: str
    payload: bytes

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        need = (self.count * self.n + 7) // 8
        if len(self.payload) != need:
            raise ValueError(f"payload must be {need} bytes, got {len(self.payload)}")

    def to_bytes(self) -> bytes:
        cid = self.code_id.encode()
        lid = self.layer_id.encode()
        if len(cid) > 0xFF:
            raise ValueError("code_id too long")
        if len(lid) > 0xFFFF:
            raise ValueError("layer_id too long")
        head = MAGIC + struct.pack(">B", len(cid)) + cid
        head += struct.pack(">BBQ", self.bits, self.n, self.count)
        head += struct.pack(">H", len(lid)) + lid
        return head + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedBlob":
        def take(k: int, what: str) -> bytes:
            nonlocal pos
            if pos + k > len(data):
                raise CorruptBlobError(f"truncated blob: missing {what}")
            chunk = data[pos : pos + k]
            pos += k
            return chunk

        pos = 0
        if take(len(MAGIC), "magic") != MAGIC:
            raise CorruptBlobError("bad magic")
        (cid_len,) = struct.unpack(">B", take(1, "code_id length"))
        code_id = take(cid_len, "code_id").decode()
        bits, n, count = struct.unpack(">BBQ", take(10, "header"))
        (lid_len,) = struct.unpack(">H", take(2, "layer_id length"))
        layer_id = take(lid_len, "layer_id").decode()
        payload = data[pos:]
        need = (count * n + 7) // 8
        if len(payload) != need:
            raise CorruptBlobError(
                f"payload is {len(payload)} bytes, header implies {need}"
            )
        return cls(code_id, bits, n, count, layer_id, payload)


@dataclass(frozen=True)
class VerifyReport:
    """Scan result; clean holds exactly when no index was flagged."""

    clean: bool
    corrupted_indices: tuple[int, ...]
    scanned: int

    def __post_init__(self) -> None:
        if self.clean != (not self.corrupted_indices):
            raise ValueError("clean flag contradicts corrupted_indices")


def encode_tensor(m: EncodingMap, values: Sequence[int], layer_id: str = "") -> EncodedBlob:
    """Encode quantized values into a blob under the given map."""
    words = [encode_value(m, v).bits for v in values]
    payload = pack_words(words, m.code.n)
    return EncodedBlob(m.code_id, m.b, m.code.n, len(values), layer_id, payload)


def _check_header(m: EncodingMap, blob: EncodedBlob) -> None:
    if (blob.code_id, blob.bits, blob.n) != (m.code_id, m.b, m.code.n):
        raise ValueError(
            f"blob header ({blob.code_id}, b={blob.bits}, n={blob.n}) does not "
            f"match map ({m.code_id}, b={m.b}, n={m.code.n})"
        )


def verify_blob(m: EncodingMap, blob: EncodedBlob) -> VerifyReport:
    """Flag every slice of the payload that is not a codeword."""
    _check_header(m, blob)
    words = unpack_words(blob.payload, blob.n, blob.count)
    lookup = m.inverse
    bad = tuple(i for i, w in enumerate(words) if w not in lookup)
    return VerifyReport(not bad, bad, blob.count)


def decode_tensor(m: EncodingMap, blob: EncodedBlob) -> list[int] | VerifyReport:
    """Values if every slice is a codeword, else the verify report.

    No partial output: one corrupted slice suppresses all values.
    """
    _check_header(m, blob)
    words = unpack_words(blob.payload, blob.n, blob.count)
    lookup = m.inverse
    bad = tuple(i for i, w in enumerate(words) if w not in lookup)
    if bad:
        return VerifyReport(False, bad, blob.count)
    return [signed_value(lookup[w], m.b) for w in words]


def timed_verify(m: EncodingMap, blob: EncodedBlob) -> tuple[VerifyReport, float]:
    """verify_blob plus its wall time in seconds."""
    t0 = time.perf_counter()
    report = verify_blob(m, blob)
    return report, time.perf_counter() - t0


@dataclass(frozen=True)
class OverheadReport:
    memory_overhead_percent: Fraction
    bits_per_weight: int


def overhead_report(code_id: str, b: int) -> OverheadReport:
    """Exact storage overhead of a code relative to b raw bits per weight."""
    cb, n = code_shape(code_id)
    if b != cb:
        raise ValueError(f"{code_id} protects {cb}-bit values, not {b}-bit")
    return OverheadReport(Fraction(100 * (n - b), b), n)


def write_sidecar(path, layers: dict[str, QuantConfig]) -> None:
    """One line per layer: layer_id, bits, delta, tab-separated."""
    lines = [f"{lid}\t{cfg.bits}\t{cfg.delta!r}\n" for lid, cfg in layers.items()]
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(lines)


def read_sidecar(path) -> dict[str, QuantConfig]:
    layers: dict[str, QuantConfig] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            lid, bits, delta = parts
            if lid in layers:
                raise ValueError(f"{path}:{lineno}: duplicate layer {lid!r}")
            layers[lid] = QuantConfig(int(bits), float(delta))
    return layers
