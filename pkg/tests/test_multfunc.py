import numpy as np
import pytest

from rmpoly.arith import legendre_symbol
from rmpoly.multfunc import (
    GOLDEN,
    SignFunction,
    character_mult_function,
    explicit_mult_function,
    mix64,
    primes_upto,
    sample_mult_function,
    stream_words,
    trial_key,
)


def test_mix64_reference_vector():
    # SplitMix64 with state 0: first output is mix64(GOLDEN)
    assert mix64(GOLDEN) == 0xE220A8397B1DCDAF


def test_stream_matches_scalar_reference():
    words = stream_words(123, 4, 10)
    key = trial_key(123, 4)
    ref = [mix64(key + (i + 1) * GOLDEN) for i in range(10)]
    assert [int(w) for w in words] == ref
    tail = stream_words(123, 4, 3, start=7)
    assert [int(w) for w in tail] == ref[7:]


def test_trivial_examples():
    assert sample_mult_function(5, 0, 1).sign_vector().tolist() == [1]
    for t in range(20):
        f = sample_mult_function(99, t, 9)
        assert f.evaluate(9) == 1 and f.evaluate(4) == 1 and f.evaluate(1) == 1


def test_reproducible():
    a = sample_mult_function(0, 0, 100)
    b = sample_mult_function(0, 0, 100)
    assert a.sign_vector().tobytes() == b.sign_vector().tobytes()
    assert a.to_bytes() == b.to_bytes()


def test_prime_signs_do_not_depend_on_n():
    small = sample_mult_function(7, 3, 50)
    big = sample_mult_function(7, 3, 500)
    assert np.array_equal(big.sign_vector()[:50], small.sign_vector())


def test_evaluate_product_rule():
    f = explicit_mult_function(10, {2: -1, 3: 1})
    assert f.evaluate(6) == -1
    assert f.evaluate(4) == 1
    assert f.evaluate(8) == -1
    with pytest.raises(ValueError):
        f.evaluate(11)
    with pytest.raises(ValueError):
        f.evaluate(0)


def test_character_examples():
    assert character_mult_function(7, 6).sign_vector().tolist() == [1, 1, -1, 1, -1, -1]
    assert character_mult_function(3, 2).sign_vector().tolist() == [1, -1]
    assert character_mult_function(101, 1).sign_vector().tolist() == [1]
    with pytest.raises(ValueError):
        character_mult_function(7, 7)
    with pytest.raises(ValueError):
        character_mult_function(9, 4)


def test_character_matches_legendre_directly():
    for p in (101, 211, 997):
        f = character_mult_function(p, 90)
        assert [f(n) for n in range(1, 91)] == [legendre_symbol(n, p) for n in range(1, 91)]


def _audit(f, rng, pairs=1000):
    N = f.N
    for _ in range(pairs):
        m = int(rng.integers(1, N + 1))
        n = int(rng.integers(1, N // m + 1))
        assert f(m * n) == f(m) * f(n)


def test_multiplicativity_audit_random_and_character():
    rng = np.random.default_rng(1)
    _audit(sample_mult_function(3, 17, 5000), rng)
    _audit(character_mult_function(10007, 5000), rng)


def test_prime_powers():
    f = sample_mult_function(1, 1, 1000)
    for p in primes_upto(31):
        q, k = int(p), 1
        while q <= 1000:
            assert f(q) == f(int(p)) ** k
            q *= int(p)
            k += 1


def test_prime_sign_marginals_and_correlations():
    T, N = 10_000, 1000
    primes = primes_upto(N)
    signs = np.empty((T, len(primes)), dtype=np.int8)
    for t in range(T):
        w = stream_words(2024, t, len(primes))
        signs[t] = np.where(w >> np.uint64(63), -1, 1)
    # the stream is what sample_mult_function uses
    assert np.array_equal(signs[5], sample_mult_function(2024, 5, N).prime_signs)
    tol = 4 / np.sqrt(T)
    assert np.all(np.abs(signs.mean(axis=0)) < tol)
    rng = np.random.default_rng(0)
    for _ in range(50):
        i, j = rng.choice(len(primes), size=2, replace=False)
        corr = np.mean(signs[:, i].astype(np.int64) * signs[:, j])
        assert abs(corr) < tol


def test_binary_round_trip_and_layout():
    f = sample_mult_function(0xDEADBEEF, 42, 60)
    data = f.to_bytes()
    assert data[:4] == b"RMSF" and data[4] == 1 and data[5] == 0
    assert int.from_bytes(data[8:16], "little") == 60
    assert int.from_bytes(data[16:24], "little") == 0xDEADBEEF
    assert int.from_bytes(data[24:32], "little") == 42
    assert int.from_bytes(data[32:36], "little") == 17  # primes <= 60
    assert len(data) == 36 + 3
    g = SignFunction.from_bytes(data)
    assert g == f and np.array_equal(g.sign_vector(), f.sign_vector())
    c = character_mult_function(61, 60)
    assert SignFunction.from_bytes(c.to_bytes()) == c
    rec = f.to_record()
    assert rec["num_primes"] == 17 and rec["provenance"] == {"kind": "random", "master": 0xDEADBEEF, "trial": 42}
    bits = np.unpackbits(np.frombuffer(bytes.fromhex(rec["prime_sign_bits"]), dtype=np.uint8), bitorder="little")[:17]
    assert np.array_equal(np.where(bits, -1, 1), f.prime_signs)
