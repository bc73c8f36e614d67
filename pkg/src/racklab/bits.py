"""MSB-first bit packing: the first bit written is the high bit of the first byte."""

from __future__ import annotations

import math


class BitUnderflow(Exception):
    """Read past the end of the bit stream."""


class BitWriter:
    def __init__(self):
        self._buf = bytearray()
        self.nbits = 0

    def write(self, value: int, width: int) -> None:
        """Append value as exactly width bits, most significant bit first."""
        if width < 0:
            raise ValueError("negative width")
        if value < 0 or (width < value.bit_length()):
            raise ValueError(f"value {value} does not fit in {width} bits")
        for i in range(width - 1, -1, -1):
            if self.nbits % 8 == 0:
                self._buf.append(0)
            if (value >> i) & 1:
                self._buf[-1] |= 0x80 >> (self.nbits % 8)
            self.nbits += 1

    def write_bitmap(self, members, n: int) -> None:
        """n bits, bit i set iff i is a member; i = 0 comes first in the stream."""
        members = set(members)
        for i in range(n):
            self.write(1 if i in members else 0, 1)

    def getvalue(self) -> bytes:
        return bytes(self._buf)


class BitReader:
    def __init__(self, data: bytes):
        self._data = data
        self.pos = 0

    def read(self, width: int) -> int:
        if width < 0:
            raise ValueError("negative width")
        if self.pos + width > 8 * len(self._data):
            raise BitUnderflow(f"need {width} bits at position {self.pos}")
        value = 0
        for _ in range(width):
            byte = self._data[self.pos // 8]
            bit = (byte >> (7 - self.pos % 8)) & 1
            value = (value << 1) | bit
            self.pos += 1
        return value

    def read_bitmap(self, n: int) -> tuple:
        return tuple(i for i in range(n) if self.read(1))

    def bits_remaining(self) -> int:
        return 8 * len(self._data) - self.pos


def uint_width(count: int) -> int:
    """Bits needed to address `count` distinct values; 0 when count <= 1."""
    if count < 1:
        raise ValueError("count must be positive")
    return (count - 1).bit_length()


def perm_width(n: int) -> int:
    """Bits of a Lehmer rank for permutations of [n]: ceil(log2 n!)."""
    return uint_width(math.factorial(n))
