"""Completely multiplicative +-1 functions and their seeded construction.

Random signs come from a counter-based stream: the sign of the i-th prime
(0-based, so 2 is index 0) in trial ``t`` under master seed ``s`` is the top
bit of::

    key  = mix64(mix64(s ^ domain) + (t + 1) * GOLDEN)
    word = mix64(key + (i + 1) * GOLDEN)

where ``mix64`` is the SplitMix64 finalizer and GOLDEN = 0x9E3779B97F4A7C15,
all arithmetic mod 2^64. Top bit set means -1. No state is carried between
draws, so any trial can be rebuilt on its own.

Binary record layout (little-endian), see :meth:`SignFunction.to_bytes`::

    offset  size  field
    0       4     magic b"RMSF"
    4       1     layout version (1)
    5       1     provenance kind: 0 random, 1 character, 2 explicit
    6       2     reserved, zero
    8       8     N
    16      8     random: master seed; character: modulus p; explicit: 0
    24      8     random: trial index; otherwise 0
    32      4     number of primes <= N
    36      ...   bit vector, bit i (LSB first within each byte) set iff f(p_i) = -1
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .arith import cached_table, is_prime, legendre_symbol
from .kernels import fill_signs_kernel

__all__ = [
    "GOLDEN",
    "mix64",
    "stream_words",
    "Seed",
    "Provenance",
    "SignFunction",
    "sample_mult_function",
    "character_mult_function",
    "explicit_mult_function",
    "primes_upto",
]

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

DOMAIN_SIGNS = 0
DOMAIN_PRIME_CHOICE = 0x7475727970726D73  # arbitrary fixed tag

_MAGIC = b"RMSF"
_HEADER = struct.Struct("<4sBBHQQQI")
_KINDS = {"random": 0, "character": 1, "explicit": 2}
_KIND_NAMES = {v: k for k, v in _KINDS.items()}


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (reference path)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z):
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def trial_key(master: int, trial: int, domain: int = DOMAIN_SIGNS) -> int:
    return mix64((mix64(master ^ domain) + (trial + 1) * GOLDEN) & MASK64)


def stream_words(master: int, trial: int, count: int, domain: int = DOMAIN_SIGNS, start: int = 0):
    """Words ``start .. start+count-1`` of the (master, trial) stream as uint64."""
    key = np.uint64(trial_key(master, trial, domain))
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_array(key + idx * np.uint64(GOLDEN))


@dataclass(frozen=True)
class Seed:
    master: int

    def __post_init__(self):
        if not 0 <= self.master <= MASK64:
            raise ValueError("master seed must fit in 64 bits")


@dataclass(frozen=True)
class Provenance:
    kind: str
    master: int | None = None
    trial: int | None = None
    modulus: int | None = None

    def to_dict(self):
        d = {"kind": self.kind}
        for name in ("master", "trial", "modulus"):
            value = getattr(self, name)
            if value is not None:
                d[name] = value
        return d


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    return np.asarray(cached_table(max(n, 1024)).between(2, n), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class SignFunction:
    """A completely multiplicative f: {1..N} -> {-1, +1}.

    ``values[n]`` is f(n) for 1 <= n <= N (``values[0]`` is a 0 placeholder).
    """

    N: int
    primes: np.ndarray
    prime_signs: np.ndarray
    provenance: Provenance
    values: np.ndarray = field(repr=False)

    @classmethod
    def from_prime_signs(cls, N, primes, prime_signs, provenance):
        primes = np.asarray(primes, dtype=np.int64)
        prime_signs = np.asarray(prime_signs, dtype=np.int8)
        if primes.shape != prime_signs.shape:
            raise ValueError("one sign per prime required")
        if not np.all(np.abs(prime_signs) == 1):
            raise ValueError("prime signs must be +-1")
        table = np.ones(N + 1, dtype=np.int8)
        table[primes] = prime_signs
        values = fill_signs_kernel(N, table)
        for arr in (primes, prime_signs, values):
            arr.setflags(write=False)
        return cls(N, primes, prime_signs, provenance, values)

    def __call__(self, n: int) -> int:
        return self.evaluate(n)

    def evaluate(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise ValueError(f"n={n} outside 1..{self.N}")
        return int(self.values[n])

    def sign_vector(self) -> np.ndarray:
        """f(1), ..., f(N) as int8."""
        return self.values[1:]

    def __eq__(self, other):
        if not isinstance(other, SignFunction):
            return NotImplemented
        return (
            self.N == other.N
            and self.provenance == other.provenance
            and np.array_equal(self.prime_signs, other.prime_signs)
        )

    def __hash__(self):
        return hash((self.N, self.provenance, self.prime_signs.tobytes()))

    # -- serialization -----------------------------------------------------

    def to_bytes(self) -> bytes:
        prov = self.provenance
        if prov.kind == "random":
            a, b = prov.master, prov.trial
        elif prov.kind == "character":
            a, b = prov.modulus, 0
        else:
            a, b = 0, 0
        bits = np.packbits(self.prime_signs < 0, bitorder="little")
        head = _HEADER.pack(_MAGIC, 1, _KINDS[prov.kind], 0, self.N, a, b, len(self.primes))
        return head + bits.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SignFunction":
        magic, version, kind, _, N, a, b, count = _HEADER.unpack_from(data)
        if magic != _MAGIC or version != 1:
            raise ValueError("not an RMSF v1 record")
        bits = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        neg = np.unpackbits(bits, bitorder="little", count=count).astype(bool)
        primes = primes_upto(N)
        if len(primes) != count:
            raise ValueError("prime count does not match N")
        signs = np.where(neg, -1, 1).astype(np.int8)
        name = _KIND_NAMES[kind]
        if name == "random":
            prov = Provenance("random", master=a, trial=b)
        elif name == "character":
            prov = Provenance("character", modulus=a)
        else:
            prov = Provenance("explicit")
        return cls.from_prime_signs(N, primes, signs, prov)

    def to_record(self) -> dict:
        """JSON-friendly record: the binary layout's fields plus the bit vector in hex."""
        bits = np.packbits(self.prime_signs < 0, bitorder="little")
        return {
            "N": self.N,
            "provenance": self.provenance.to_dict(),
            "num_primes": int(len(self.primes)),
            "prime_sign_bits": bits.tobytes().hex(),
        }


def sample_mult_function(seed, trial: int, N: int) -> SignFunction:
    """Random completely multiplicative f on 1..N for the given (seed, trial)."""
    master = seed.master if isinstance(seed, Seed) else int(seed)
    if N < 1:
        raise ValueError("N must be >= 1")
    if trial < 0:
        raise ValueError("trial index must be nonnegative")
    primes = primes_upto(N)
    words = stream_words(master, trial, len(primes))
    signs = np.where(words >> np.uint64(63), -1, 1).astype(np.int8)
    return SignFunction.from_prime_signs(N, primes, signs, Provenance("random", master=master, trial=trial))


def character_mult_function(p: int, N: int) -> SignFunction:
    """f(n) = (n/p) on 1..N; requires an odd prime p > N so that no zeros occur."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    if p <= N:
        raise ValueError(f"modulus p={p} must exceed N={N}")
    primes = primes_upto(N)
    signs = [legendre_symbol(int(q), p) for q in primes]
    return SignFunction.from_prime_signs(N, primes, signs, Provenance("character", modulus=p))


def explicit_mult_function(N: int, prime_signs: Mapping[int, int] | None = None, default: int = 1) -> SignFunction:
    """f with prescribed prime values; primes not mentioned get ``default``."""
    prime_signs = dict(prime_signs or {})
    primes = primes_upto(N)
    extra = set(prime_signs) - set(primes.tolist())
    if extra:
        raise ValueError(f"not primes <= N: {sorted(extra)}")
    signs = [prime_signs.get(int(q), default) for q in primes]
    return SignFunction.from_prime_signs(N, primes, signs, Provenance("explicit"))
