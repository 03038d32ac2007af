"""Arbitrary-precision modular arithmetic primitives.

All values are plain Python integers; residues are kept canonical
(``0 <= value < modulus``).  Every randomized operation takes an explicit
``random.Random`` instance so results are reproducible from a seed.
"""

from __future__ import annotations

import random
from math import gcd

from .errors import Error

__all__ = [
    "NotAUnit",
    "EvenModulus",
    "NotCoprime",
    "ExhaustedRetries",
    "gcd",
    "mod_pow",
    "mod_inverse",
    "jacobi",
    "is_probable_prime",
    "random_prime_congruent",
    "crt_pair",
    "factorize",
    "mth_root_mod_prime",
    "mth_roots_of_unity",
]


class NotAUnit(Error):
    """Operand is not invertible modulo the modulus."""


class EvenModulus(Error):
    """The Jacobi symbol requires an odd modulus."""


class NotCoprime(Error):
    """Arguments that must be coprime are not."""


class ExhaustedRetries(Error):
    """A bounded random search ran out of attempts."""


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Return ``base ** exponent mod modulus`` for a nonnegative exponent."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(base % modulus, exponent, modulus)


def mod_inverse(a: int, modulus: int) -> int:
    """Return the inverse of ``a`` modulo ``modulus``.

    Raises NotAUnit when gcd(a, modulus) != 1.
    """
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    a %= modulus
    if gcd(a, modulus) != 1:
        raise NotAUnit(f"{a} is not a unit modulo {modulus}")
    return pow(a, -1, modulus)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1.

    Returns 0 exactly when gcd(a, n) > 1.
    """
    if n < 1 or n % 2 == 0:
        raise EvenModulus(f"Jacobi symbol undefined for modulus {n}")
    if a < 0:
        raise ValueError("a must be nonnegative")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int, rounds: int = 40, rng: random.Random | None = None) -> bool:
    """Miller-Rabin primality test.

    Never rejects a prime; accepts a composite with probability at most
    4**-rounds.  With ``rng=None`` the witness choice is a deterministic
    function of ``n``, so repeated calls agree.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if rng is None:
        rng = random.Random(n)
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime_congruent(bits: int, residue: int, modulus: int, rng: random.Random) -> int:
    """Random probable prime p in [2**bits, 2**(bits+1)] with p = residue (mod modulus).

    The search draws uniformly from the congruence class inside the interval
    and gives up (ExhaustedRetries) after 64*bits failed candidates.
    """
    if bits < 1:
        raise ValueError("bits must be at least 1")
    if modulus < 1:
        raise ValueError("modulus must be at least 1")
    residue %= modulus
    if gcd(residue, modulus) != 1:
        raise ValueError("residue must be coprime to the modulus")
    lo, hi = 1 << bits, 1 << (bits + 1)
    first = lo + (residue - lo) % modulus
    if first > hi:
        raise ExhaustedRetries(
            f"no integers = {residue} (mod {modulus}) in [{lo}, {hi}]")
    count = (hi - first) // modulus + 1
    budget = 64 * bits
    for _ in range(budget):
        candidate = first + modulus * rng.randrange(count)
        if is_probable_prime(candidate, rng=rng):
            return candidate
    raise ExhaustedRetries(
        f"no prime = {residue} (mod {modulus}) in [{lo}, {hi}] after {budget} attempts")


def crt_pair(a_p: int, p: int, a_q: int, q: int) -> int:
    """Combine residues mod p and mod q into the unique residue mod p*q."""
    if p < 2 or q < 2:
        raise ValueError("moduli must be at least 2")
    if gcd(p, q) != 1:
        raise NotCoprime(f"moduli {p} and {q} are not coprime")
    a_p %= p
    a_q %= q
    return (a_p + p * ((a_q - a_p) * pow(p, -1, q) % q)) % (p * q)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division.

    Only intended for small inputs (group orders and exponents); never call
    this on cryptographic-size integers.
    """
    if n < 1:
        raise ValueError("n must be positive")
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _sylow_dlog(value: int, base: int, ell: int, s: int, p: int) -> int:
    """Discrete log of ``value`` to ``base`` inside the cyclic ell-subgroup.

    ``base`` must have order ell**s mod p and ``value`` must lie in the
    subgroup it generates.  Pohlig-Hellman digit extraction; the per-digit
    search is linear in ell, which is fine for the small exponents used here.
    """
    result = 0
    gamma = pow(base, ell ** (s - 1), p)
    for k in range(s):
        shifted = value * pow(pow(base, result, p), -1, p) % p
        w = pow(shifted, ell ** (s - 1 - k), p)
        digit, cur = 0, 1
        while cur != w:
            cur = cur * gamma % p
            digit += 1
            if digit >= ell:
                raise Error("value is not in the expected cyclic subgroup")
        result += digit * ell ** k
    return result


def _prime_power_root(a: int, ell: int, e: int, p: int, rng: random.Random) -> int | None:
    """One solution of x**(ell**e) = a (mod p), or None if there is none."""
    order = p - 1
    t, s = order, 0
    while t % ell == 0:
        t //= ell
        s += 1
    if s == 0:
        # the power map is a bijection; invert the exponent
        inv = pow(pow(ell, e, order), -1, order)
        return pow(a, inv, p)
    c = min(e, s)
    if pow(a, order // ell ** c, p) != 1:
        return None
    # split off the part of the root outside the ell-subgroup
    if t > 1:
        u = pow(pow(ell, e, t), -1, t)
        x0 = pow(a, u, p)
    else:
        x0 = 1
    # generator of the ell-Sylow subgroup
    while True:
        z = rng.randrange(2, p)
        if pow(z, order // ell, p) != 1:
            break
    b = pow(z, t, p)
    defect = pow(x0, ell ** e, p) * pow(a, -1, p) % p
    edl = _sylow_dlog(defect, b, ell, s, p)
    if e >= s:
        if edl != 0:
            raise Error("m-th root solvability check disagrees with dlog")
        j = 0
    else:
        if edl % ell ** e != 0:
            raise Error("m-th root solvability check disagrees with dlog")
        j = (-(edl // ell ** e)) % ell ** (s - e)
    x = x0 * pow(b, j, p) % p
    if pow(x, ell ** e, p) != a % p:
        raise Error("internal root extraction failure")
    return x


def mth_root_mod_prime(g: int, m: int, p: int, rng: random.Random | None = None) -> int | None:
    """Some x with x**m = g (mod p), or None when no root exists.

    Treats one prime power of m at a time (Adleman-Manders-Miller style);
    the choice of root depends only on the rng stream.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if p < 2:
        raise ValueError("p must be prime")
    g %= p
    if g == 0:
        raise NotAUnit(f"{g} is not a unit modulo {p}")
    if p == 2 or m == 1:
        return g
    if rng is None:
        rng = random.Random(0xA77)
    current = g
    for ell, e in sorted(factorize(m).items()):
        current = _prime_power_root(current, ell, e, p, rng)
        if current is None:
            return None
    return current


def mth_roots_of_unity(m: int, p: int) -> list[int]:
    """All x mod p with x**m = 1, sorted.  The list has gcd(m, p-1) entries."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if p < 2:
        raise ValueError("p must be prime")
    if p == 2:
        return [1]
    d = gcd(m, p - 1)
    if d == 1:
        return [1]
    primes = list(factorize(d))
    # deterministic scan for an element of order exactly d
    for z in range(2, min(p, 1 << 20)):
        w = pow(z, (p - 1) // d, p)
        if all(pow(w, d // r, p) != 1 for r in primes):
            return sorted(pow(w, i, p) for i in range(d))
    raise Error(f"could not find an element of order {d} modulo {p}")
