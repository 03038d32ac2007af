import random
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghcrypt.numtheory import (
    EvenModulus,
    ExhaustedRetries,
    NotAUnit,
    NotCoprime,
    crt_pair,
    factorize,
    is_probable_prime,
    jacobi,
    mod_inverse,
    mod_pow,
    mth_root_mod_prime,
    mth_roots_of_unity,
    random_prime_congruent,
)

PRIMES_UNDER_100 = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                    53, 59, 61, 67, 71, 73, 79, 83, 89, 97]


def odd_primes_below(limit: int) -> list[int]:
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for p in range(2, int(limit ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(sieve[p * p::p]))
    return [p for p in range(3, limit) if sieve[p]]


def trial_division_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def euler_character(a: int, p: int) -> int:
    """Quadratic character oracle for odd primes."""
    r = pow(a % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


class TestModPow:
    def test_examples(self):
        assert mod_pow(2, 10, 1000) == 24
        assert mod_pow(3, 3, 7) == 6  # 27 mod 7

    def test_zero_exponent(self):
        for x in (1, 2, 6):
            assert mod_pow(x, 0, 7) == 1

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            mod_pow(2, 3, 1)
        with pytest.raises(ValueError):
            mod_pow(2, -1, 7)


class TestGcdInverse:
    def test_gcd_examples(self):
        assert gcd(12, 18) == 6
        assert gcd(5, 0) == 5
        assert gcd(0, 0) == 0
        assert gcd(3, 4) == 1

    def test_inverse_examples(self):
        assert mod_inverse(17, 35) == 33
        assert 17 * 33 % 35 == 1
        assert mod_inverse(1, 97) == 1
        assert mod_inverse(6, 77) == 13
        assert 6 * 13 % 77 == 1

    def test_not_a_unit(self):
        with pytest.raises(NotAUnit):
            mod_inverse(14, 77)

    @given(st.integers(2, 10**6), st.integers(1, 10**6))
    def test_inverse_property(self, n, a):
        a %= n
        if n < 2 or gcd(a, n) != 1:
            return
        assert a * mod_inverse(a, n) % n == 1


class TestJacobi:
    def test_examples(self):
        assert jacobi(1, 77) == 1
        assert jacobi(2, 77) == -1
        assert jacobi(6, 77) == 1

    def test_zero_iff_common_factor(self):
        assert jacobi(14, 77) == 0
        assert jacobi(0, 9) == 0

    def test_even_modulus(self):
        with pytest.raises(EvenModulus):
            jacobi(3, 10)

    def test_multiplicative_against_euler_oracle(self):
        # on a product of two odd primes the symbol splits into characters
        primes = odd_primes_below(10_000)
        rng = random.Random(7)
        for _ in range(500):
            p, q = rng.sample(primes, 2)
            n = p * q
            a = rng.randrange(n)
            assert jacobi(a, n) == euler_character(a, p) * euler_character(a, q)

    def test_prime_case_is_euler(self):
        for p in PRIMES_UNDER_100:
            for a in range(p):
                assert jacobi(a, p) == euler_character(a, p)


class TestPrimality:
    def test_examples(self):
        assert is_probable_prime(7)
        assert not is_probable_prime(35)
        assert is_probable_prime(2**31 - 1)
        assert trial_division_prime(2**31 - 1)

    def test_carmichael_numbers_rejected(self):
        for n in (561, 1105, 1729, 2465, 6601):
            assert not is_probable_prime(n)

    def test_agrees_with_trial_division(self):
        for n in range(2, 2000):
            assert is_probable_prime(n) == trial_division_prime(n)

    def test_rounds_guard(self):
        with pytest.raises(ValueError):
            is_probable_prime(7, rounds=0)


class TestRandomPrimeCongruent:
    def test_unique_candidate(self):
        # only prime = 1 (mod 3) in [8, 16] is 13
        assert random_prime_congruent(3, 1, 3, random.Random(0)) == 13

    def test_small_odd_primes(self):
        for seed in range(10):
            p = random_prime_congruent(2, 1, 2, random.Random(seed))
            assert p in (5, 7)

    def test_exhausted(self):
        with pytest.raises(ExhaustedRetries):
            random_prime_congruent(1, 1, 30, random.Random(0))

    def test_properties_and_determinism(self):
        rng1, rng2 = random.Random(5), random.Random(5)
        p1 = random_prime_congruent(24, 1, 6, rng1)
        p2 = random_prime_congruent(24, 1, 6, rng2)
        assert p1 == p2
        assert p1 % 6 == 1
        assert 2**24 <= p1 <= 2**25
        assert is_probable_prime(p1, rounds=40)

    def test_rejects_common_factor(self):
        with pytest.raises(ValueError):
            random_prime_congruent(8, 2, 4, random.Random(0))


class TestCrt:
    def test_examples(self):
        assert crt_pair(3, 7, 2, 5) == 17
        assert crt_pair(0, 7, 0, 5) == 0
        assert crt_pair(1, 7, 1, 11) == 1

    def test_not_coprime(self):
        with pytest.raises(NotCoprime):
            crt_pair(1, 6, 1, 9)

    @given(st.sampled_from(PRIMES_UNDER_100), st.sampled_from(PRIMES_UNDER_100),
           st.integers(0, 10**6))
    def test_roundtrip(self, p, q, x):
        if p == q:
            return
        x %= p * q
        assert crt_pair(x % p, p, x % q, q) == x


class TestFactorize:
    def test_small(self):
        assert factorize(1) == {}
        assert factorize(12) == {2: 2, 3: 1}
        assert factorize(97) == {97: 1}
        assert factorize(120) == {2: 3, 3: 1, 5: 1}


def brute_force_roots(g: int, m: int, p: int) -> list[int]:
    return [x for x in range(1, p) if pow(x, m, p) == g % p]


class TestMthRoot:
    def test_identity_case(self):
        for m in (1, 2, 3, 4, 6):
            assert pow(mth_root_mod_prime(1, m, 7), m, 7) == 1

    def test_cube_example(self):
        # cubes mod 7 are {1, 6}; the cube roots of 6 are {3, 5, 6}
        oracle = brute_force_roots(6, 3, 7)
        assert oracle == [3, 5, 6]
        assert mth_root_mod_prime(6, 3, 7) in oracle

    def test_absent(self):
        assert brute_force_roots(2, 3, 7) == []
        assert mth_root_mod_prime(2, 3, 7) is None

    def test_exhaustive_small_primes(self):
        rng = random.Random(9)
        for p in PRIMES_UNDER_100:
            for m in (2, 3, 4, 5, 6):
                for g in range(1, p):
                    oracle = brute_force_roots(g, m, p)
                    got = mth_root_mod_prime(g, m, p, rng)
                    if oracle:
                        assert got in oracle, (g, m, p)
                    else:
                        assert got is None, (g, m, p)

    def test_large_prime_power_modulus(self):
        # 2-adic valuation of p-1 is 5 here; exercises the correction walk
        p = 97  # 96 = 2^5 * 3
        for g in range(1, p):
            oracle = brute_force_roots(g, 8, p)
            got = mth_root_mod_prime(g, 8, p, random.Random(1))
            assert (got in oracle) if oracle else (got is None)

    def test_sampled_primes_to_ten_thousand(self):
        rng = random.Random(31)
        primes = [p for p in odd_primes_below(10_000) if p > 1000]
        for _ in range(20):
            p = rng.choice(primes)
            m = rng.choice([2, 3, 4, 5, 6])
            g = rng.randrange(1, p)
            oracle = set(brute_force_roots(g, m, p))
            got = mth_root_mod_prime(g, m, p, rng)
            if oracle:
                assert got in oracle
            else:
                assert got is None

    def test_not_a_unit(self):
        with pytest.raises(NotAUnit):
            mth_root_mod_prime(0, 3, 7)


class TestRootsOfUnity:
    def test_examples(self):
        assert mth_roots_of_unity(3, 7) == [1, 2, 4]
        assert mth_roots_of_unity(1, 13) == [1]
        assert mth_roots_of_unity(2, 7) == [1, 6]

    def test_count_and_membership(self):
        for p in PRIMES_UNDER_100:
            for m in (2, 3, 4, 5, 6, 12):
                roots = mth_roots_of_unity(m, p)
                assert len(roots) == gcd(m, p - 1)
                assert all(pow(x, m, p) == 1 for x in roots)
                assert roots == sorted(set(roots))
