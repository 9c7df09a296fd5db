"""Two-universal hashing with Toeplitz matrices over GF(2).

A seed of m + r - 1 uniform bits defines the diagonal-constant matrix
T[i, j] = seed[m - 1 + i - j]; hashing is the matrix-vector product mod 2.
For any fixed nonzero input difference the r output parities are linearly
independent functions of the seed, so distinct inputs collide with
probability exactly 2^-r over the seed draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinearHash:
    """Keyed map {0,1}^input_bits -> {0,1}^output_bits."""

    input_bits: int
    output_bits: int
    seed: np.ndarray  # uint8 bits, length input_bits + output_bits - 1

    def __post_init__(self):
        if self.output_bits < 1 or self.input_bits < self.output_bits:
            raise ValueError("need 1 <= output_bits <= input_bits")
        seed = np.ascontiguousarray(self.seed, dtype=np.uint8)
        if seed.shape != (self.input_bits + self.output_bits - 1,):
            raise ValueError("seed length must be input_bits + output_bits - 1")
        if np.any(seed > 1):
            raise ValueError("seed must be a bit array")
        seed.flags.writeable = False
        object.__setattr__(self, "seed", seed)

    @classmethod
    def draw(cls, input_bits, output_bits, rng):
        seed = rng.integers(0, 2, size=input_bits + output_bits - 1, dtype=np.uint8)
        return cls(input_bits, output_bits, seed)

    def __call__(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        if bits.shape != (self.input_bits,):
            raise ValueError(f"expected {self.input_bits} input bits, got {bits.shape}")
        # out[i] = parity of sum_j bits[j] * seed[m-1+i-j]  (a convolution slice)
        conv = np.convolve(bits, self.seed.astype(np.int64))
        m = self.input_bits
        return (conv[m - 1: m - 1 + self.output_bits] % 2).astype(np.uint8)

    def matrix(self) -> np.ndarray:
        """Dense 0/1 matrix, for exhaustive family enumeration in tests."""
        m = self.input_bits
        i = np.arange(self.output_bits)[:, None]
        j = np.arange(m)[None, :]
        return self.seed[m - 1 + i - j]

    def seed_hex(self) -> str:
        return bits_to_hex(self.seed)

    @classmethod
    def from_seed_hex(cls, input_bits, output_bits, text):
        seed = hex_to_bits(text, input_bits + output_bits - 1)
        return cls(input_bits, output_bits, seed)


@dataclass(frozen=True)
class SymbolCodec:
    """Fixed-width big-endian bit encoding of symbols from a finite alphabet."""

    alphabet_size: int

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise ValueError("alphabet must have at least two symbols")

    @property
    def width(self):
        return max(1, math.ceil(math.log2(self.alphabet_size)))

    def encode(self, symbols) -> np.ndarray:
        symbols = np.asarray(symbols, dtype=np.int64)
        if symbols.size and (symbols.min() < 0 or symbols.max() >= self.alphabet_size):
            raise ValueError("symbol out of range")
        w = self.width
        shifts = np.arange(w - 1, -1, -1)
        return ((symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()

    def decode(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        w = self.width
        if bits.size % w:
            raise ValueError("bit string length is not a multiple of the width")
        weights = 1 << np.arange(w - 1, -1, -1)
        symbols = bits.reshape(-1, w) @ weights
        if symbols.size and symbols.max() >= self.alphabet_size:
            raise ValueError("decoded symbol out of range")
        return symbols.astype(np.int64)


def xor_bits(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError("bit strings differ in length")
    return np.bitwise_xor(a, b)


def bits_to_hex(bits) -> str:
    """Hex text for a bit array, most significant bit first; '' for empty."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return ""
    return np.packbits(bits).tobytes().hex()


def hex_to_bits(text, nbits) -> np.ndarray:
    """Inverse of bits_to_hex given the original bit count."""
    if nbits == 0:
        if text:
            raise ValueError("expected empty hex for zero bits")
        return np.zeros(0, dtype=np.uint8)
    raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
    bits = np.unpackbits(raw)
    if bits.size < nbits or np.any(bits[nbits:]):
        raise ValueError("hex text does not match the stated bit count")
    return bits[:nbits].copy()
