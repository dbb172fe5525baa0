"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

Both flavours take and return the same numpy arrays and must agree
bit-for-bit; ``tests/test_kernels.py`` checks that. The module-level names
(``shift_mod_kernel`` and friends) are bound to the flavour chosen by
``RMPOLY_BACKEND`` at import time.

Polynomials over F_p are int64 arrays, constant term first, every entry in
``[0, p)``, trimmed so the last entry is nonzero; the zero polynomial is the
empty array.
"""

import numpy as np

from ._accel import BACKEND, njit

# ---------------------------------------------------------------------------
# Taylor shift X -> X + 1 modulo 2^m


# uint64 sums wrap modulo 2^64, a multiple of 2^m, so the mask is applied once
# at the end.


@njit
def _shift_mod_numba(c, mask):
    out = c.copy()
    deg = out.shape[0] - 1
    for i in range(deg):
        # running suffix sum kept in a register, not reloaded from out[j + 1]
        acc = out[deg]
        for j in range(deg - 1, i - 1, -1):
            acc += out[j]
            out[j] = acc
    m = np.uint64(mask)
    for j in range(deg + 1):
        out[j] &= m
    return out


def _shift_mod_numpy(c, mask):
    out = c.copy()
    deg = out.shape[0] - 1
    for i in range(deg):
        # pass i turns out[i:] into its suffix sums
        out[i:] = np.cumsum(out[i:][::-1])[::-1]
    return out & np.uint64(mask)


# ---------------------------------------------------------------------------
# completely multiplicative fill


@njit
def _fill_signs_numba(n_max, prime_sign):
    # prime_sign[p] holds f(p) for primes p <= n_max, anything elsewhere
    f = np.zeros(n_max + 1, dtype=np.int8)
    spf = np.zeros(n_max + 1, dtype=np.int64)
    primes = np.empty(n_max + 1, dtype=np.int64)
    n_primes = 0
    if n_max >= 1:
        f[1] = 1
    for i in range(2, n_max + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[n_primes] = i
            n_primes += 1
            f[i] = prime_sign[i]
        else:
            q = spf[i]
            f[i] = f[q] * f[i // q]
        for t in range(n_primes):
            p = primes[t]
            if p > spf[i] or p * i > n_max:
                break
            spf[p * i] = p
    return f


def _fill_signs_numpy(n_max, prime_sign):
    f = np.ones(n_max + 1, dtype=np.int8)
    f[0] = 0
    flips = np.flatnonzero(prime_sign[: n_max + 1] < 0)
    for p in flips:
        q = int(p)
        while q <= n_max:
            # each exact power q = p^k dividing n contributes one factor f(p)
            f[q::q] *= -1
            q *= int(p)
    return f


# ---------------------------------------------------------------------------
# polynomial arithmetic over F_p


@njit
def _trim_numba(a):
    d = a.shape[0] - 1
    while d >= 0 and a[d] == 0:
        d -= 1
    return a[: d + 1].copy()


@njit
def _rem_numba(a, b, p):
    r = a.copy()
    db = b.shape[0] - 1
    inv = 1
    # Fermat inverse of the leading coefficient
    e = p - 2
    base = b[db] % p
    while e > 0:
        if e & 1:
            inv = (inv * base) % p
        base = (base * base) % p
        e >>= 1
    for i in range(r.shape[0] - 1, db - 1, -1):
        q = (r[i] * inv) % p
        if q != 0:
            off = i - db
            for t in range(db + 1):
                r[off + t] = (r[off + t] - q * b[t]) % p
    if db < r.shape[0]:
        r = r[:db]
    return _trim_numba(r)


@njit
def _mulmod_numba(a, b, f, p):
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    prod = np.zeros(a.shape[0] + b.shape[0] - 1, dtype=np.int64)
    for i in range(a.shape[0]):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(b.shape[0]):
            prod[i + j] += ai * b[j]
    # entries stay below len(a) * p^2, far from int64 overflow for word-size p
    for t in range(prod.shape[0]):
        prod[t] %= p
    return _rem_numba(prod, f, p)


@njit
def _gcd_numba(a, b, p):
    x = _trim_numba(a)
    y = _trim_numba(b)
    while y.shape[0] > 0:
        x, y = y, _rem_numba(x, y, p)
    if x.shape[0] == 0:
        return x
    # normalise to monic
    inv = 1
    e = p - 2
    base = x[x.shape[0] - 1] % p
    while e > 0:
        if e & 1:
            inv = (inv * base) % p
        base = (base * base) % p
        e >>= 1
    for t in range(x.shape[0]):
        x[t] = (x[t] * inv) % p
    return x


@njit
def _powmod_numba(h, e, f, p):
    result = np.ones(1, dtype=np.int64)
    base = _rem_numba(h, f, p)
    while e > 0:
        if e & 1:
            result = _mulmod_numba(result, base, f, p)
        e >>= 1
        if e > 0:
            base = _mulmod_numba(base, base, f, p)
    return result


def _trim_numpy(a):
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return np.zeros(0, dtype=np.int64)
    return a[: nz[-1] + 1].copy()


def _rem_numpy(a, b, p):
    r = a.astype(np.int64, copy=True)
    db = b.shape[0] - 1
    inv = pow(int(b[db]), -1, p)
    for i in range(r.shape[0] - 1, db - 1, -1):
        q = (int(r[i]) * inv) % p
        if q:
            r[i - db : i + 1] = (r[i - db : i + 1] - q * b) % p
    return _trim_numpy(r[:db])


def _mulmod_numpy(a, b, f, p):
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return _rem_numpy(np.convolve(a, b) % p, f, p)


def _gcd_numpy(a, b, p):
    x, y = _trim_numpy(a), _trim_numpy(b)
    while y.shape[0] > 0:
        x, y = y, _rem_numpy(x, y, p)
    if x.shape[0] == 0:
        return x
    return (x * pow(int(x[-1]), -1, p)) % p


def _powmod_numpy(h, e, f, p):
    result = np.ones(1, dtype=np.int64)
    base = _rem_numpy(h, f, p)
    while e:
        if e & 1:
            result = _mulmod_numpy(result, base, f, p)
        e >>= 1
        if e:
            base = _mulmod_numpy(base, base, f, p)
    return result


# ---------------------------------------------------------------------------
# backend tables

KERNELS = {
    "numba": {
        "shift_mod": _shift_mod_numba,
        "fill_signs": _fill_signs_numba,
        "rem": _rem_numba,
        "mulmod": _mulmod_numba,
        "gcd": _gcd_numba,
        "powmod": _powmod_numba,
    },
    "numpy": {
        "shift_mod": _shift_mod_numpy,
        "fill_signs": _fill_signs_numpy,
        "rem": _rem_numpy,
        "mulmod": _mulmod_numpy,
        "gcd": _gcd_numpy,
        "powmod": _powmod_numpy,
    },
}

_active = KERNELS[BACKEND]
shift_mod_kernel = _active["shift_mod"]
fill_signs_kernel = _active["fill_signs"]
polyrem_kernel = _active["rem"]
mulmod_kernel = _active["mulmod"]
gcd_kernel = _active["gcd"]
powmod_kernel = _active["powmod"]
