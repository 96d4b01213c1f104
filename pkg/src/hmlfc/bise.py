"""Bounded integer sequence encoding with O(1) random access.

Values in [0, N) are split into a low part of m bits and a high digit that
is either absent (plain layout), a trit (base 3) or a quint (base 5).
Trits pack five to a group: one 8-bit base-3 integer T = sum t_j * 3^j
followed by the five m-bit low parts. Quints pack three to a group: a
7-bit base-5 integer Q = sum q_j * 5^j followed by three m-bit low parts.
Groups have a fixed bit stride, so any value can be decoded by direct
indexing without scanning. Bits are packed LSB-first within each byte.
"""

from dataclasses import dataclass

import numpy as np

TRIT_GROUP = 5
QUINT_GROUP = 3
TRIT_HEADER_BITS = 8
QUINT_HEADER_BITS = 7

_POW3 = np.array([1, 3, 9, 27, 81], dtype=np.uint32)
_POW5 = np.array([1, 5, 25], dtype=np.uint32)


@dataclass(frozen=True)
class Layout:
    kind: str            # "plain" | "trit" | "quint"
    m: int               # low-part bits per value

    @property
    def group_size(self) -> int:
        return {"plain": 1, "trit": TRIT_GROUP, "quint": QUINT_GROUP}[self.kind]

    @property
    def group_bits(self) -> int:
        if self.kind == "plain":
            return self.m
        if self.kind == "trit":
            return TRIT_HEADER_BITS + TRIT_GROUP * self.m
        return QUINT_HEADER_BITS + QUINT_GROUP * self.m

    @property
    def bits_per_value(self) -> float:
        return self.group_bits / self.group_size


def choose_layout(n: int) -> Layout:
    """Cheapest layout able to represent values in [0, n)."""
    if n < 1:
        raise ValueError(f"alphabet size must be >= 1, got {n}")
    plain_m = max(n - 1, 0).bit_length()
    candidates = [Layout("plain", plain_m)]
    for kind, radix in (("trit", 3), ("quint", 5)):
        m = 0
        while radix << m < n:
            m += 1
        candidates.append(Layout(kind, m))
    return min(candidates, key=lambda c: (c.bits_per_value, c.group_size))


def encoded_bits(count: int, n: int) -> int:
    """Exact payload size in bits for ``count`` values with alphabet n."""
    layout = choose_layout(n)
    groups = -(-count // layout.group_size) if count else 0
    return groups * layout.group_bits


def _bits_lsb(values: np.ndarray, nbits: int) -> np.ndarray:
    """(len(values), nbits) array of bits, least significant first."""
    shifts = np.arange(nbits, dtype=np.uint32)
    return ((values[:, None].astype(np.uint64) >> shifts) & 1).astype(np.uint8)


def encode(values, n: int) -> bytes:
    """Pack a sequence of ints in [0, n) into a byte string."""
    vals = np.asarray(values, dtype=np.int64)
    if vals.size and (vals.min() < 0 or vals.max() >= n):
        bad = vals[(vals < 0) | (vals >= n)][0]
        raise ValueError(f"value {bad} outside [0, {n})")
    layout = choose_layout(n)
    count = vals.size
    if count == 0:
        return b""
    g = layout.group_size
    groups = -(-count // g)
    padded = np.zeros(groups * g, dtype=np.int64)
    padded[:count] = vals
    m = layout.m
    lows = (padded & ((1 << m) - 1)).astype(np.uint32)
    highs = (padded >> m).astype(np.uint32)
    if layout.kind == "plain":
        bits = _bits_lsb(padded.astype(np.uint32), m).reshape(-1)
    else:
        if layout.kind == "trit":
            header_bits, powers = TRIT_HEADER_BITS, _POW3
        else:
            header_bits, powers = QUINT_HEADER_BITS, _POW5
        headers = (highs.reshape(groups, g) * powers).sum(axis=1).astype(np.uint32)
        bits = np.zeros((groups, layout.group_bits), dtype=np.uint8)
        bits[:, :header_bits] = _bits_lsb(headers, header_bits)
        low_bits = _bits_lsb(lows, m).reshape(groups, g * m)
        bits[:, header_bits:] = low_bits
        bits = bits.reshape(-1)
    return np.packbits(bits, bitorder="little").tobytes()


def _read_bits(buf: bytes, bitpos: int, nbits: int) -> int:
    if nbits == 0:
        return 0
    first = bitpos >> 3
    last = (bitpos + nbits + 7) >> 3
    chunk = int.from_bytes(buf[first:last], "little")
    return (chunk >> (bitpos & 7)) & ((1 << nbits) - 1)


def decode_at(payload: bytes, index: int, n: int) -> int:
    """Decode the value at ``index`` without touching the rest."""
    layout = choose_layout(n)
    m = layout.m
    if layout.kind == "plain":
        return _read_bits(payload, index * m, m)
    g = layout.group_size
    group, j = divmod(index, g)
    base = group * layout.group_bits
    if layout.kind == "trit":
        header = _read_bits(payload, base, TRIT_HEADER_BITS)
        digit = (header // (3 ** j)) % 3
        low = _read_bits(payload, base + TRIT_HEADER_BITS + j * m, m)
    else:
        header = _read_bits(payload, base, QUINT_HEADER_BITS)
        digit = (header // (5 ** j)) % 5
        low = _read_bits(payload, base + QUINT_HEADER_BITS + j * m, m)
    return (digit << m) | low


def decode_all(payload: bytes, count: int, n: int) -> np.ndarray:
    """Decode the whole sequence; vectorized inverse of :func:`encode`."""
    layout = choose_layout(n)
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    m = layout.m
    g = layout.group_size
    groups = -(-count // g)
    nbits = groups * layout.group_bits
    raw = np.frombuffer(payload, dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[:nbits]
    weights = (1 << np.arange(m, dtype=np.uint64)) if m else np.zeros(0, dtype=np.uint64)
    if layout.kind == "plain":
        lows = bits.reshape(-1, m).astype(np.uint64) @ weights if m else \
            np.zeros(count, dtype=np.uint64)
        return lows[:count].astype(np.int64)
    if layout.kind == "trit":
        header_bits, radix, powers = TRIT_HEADER_BITS, 3, _POW3
    else:
        header_bits, radix, powers = QUINT_HEADER_BITS, 5, _POW5
    bits = bits.reshape(groups, layout.group_bits)
    hweights = (1 << np.arange(header_bits, dtype=np.uint64))
    headers = bits[:, :header_bits].astype(np.uint64) @ hweights
    digits = (headers[:, None] // powers.astype(np.uint64)) % radix
    if m:
        lows = bits[:, header_bits:].reshape(groups, g, m).astype(np.uint64) @ weights
    else:
        lows = np.zeros((groups, g), dtype=np.uint64)
    vals = (digits << np.uint64(m)) | lows
    return vals.reshape(-1)[:count].astype(np.int64)
