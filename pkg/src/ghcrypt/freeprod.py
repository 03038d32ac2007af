"""Word calculus in a free product of residue groups.

Ciphertexts of the general cryptosystem are words whose letters are units
drawn from per-factor groups G_i inside Z_{n_i}^*.  A word is kept in
normal form: adjacent letters always belong to distinct factors, and
identity letters are never stored, so two words are equal in the group
exactly when they are equal as sequences.

Two epimorphisms are implemented on top of the words:

* ``phi_map`` sends each letter to its coset index in the factor (this
  needs the factor trapdoors) and lands in a free product of cyclic
  groups, represented by :class:`KWord`;
* ``psi_map`` collapses a KWord to a group element by rewriting its
  leading pair against the defining relations of the target group.

Membership of a word in the kernel of ``phi`` carries a *witness*: a word
over non-kernel letters and preimage letters, built from the empty word by
conjugated insertions.  ``p_phi`` evaluates witnesses, ``inverse_p_phi``
reconstructs a witness for any kernel word using per-factor inversion
oracles (the rotation recursion), and ``p_psi``/``combined_P`` complete
the proof system used by the general cryptosystem.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Sequence

from .errors import Error, FormatError
from .groupcore import FiniteGroup, GroupElement
from .numtheory import jacobi, mod_inverse
from .cyclic import (
    CyclicCiphertext,
    CyclicPublicKey,
    CyclicSecretKey,
    OracleFailure,
    decrypt_cyclic,
    inverse_P_cyclic,
    random_unit,
)

__all__ = [
    "LetterOutOfGroup",
    "MissingTrapdoor",
    "GLetter",
    "FactorFamily",
    "GWord",
    "KWord",
    "PhiLetter",
    "PhiWitness",
    "PsiLetter",
    "PsiWitness",
    "empty_word",
    "normalize",
    "g_multiply",
    "g_inverse",
    "phi_map",
    "k_multiply",
    "kword_from_runs",
    "psi_map",
    "p_phi",
    "random_phi_witness",
    "random_nonkernel_value",
    "inverse_p_phi",
    "p_psi",
    "combined_P",
    "trapdoor_oracles",
    "format_gword",
    "parse_gword",
]


class LetterOutOfGroup(Error):
    """A letter value is not a member of its factor group."""


class MissingTrapdoor(Error):
    """The operation needs factor secret keys that are not available."""


@dataclass(frozen=True)
class GLetter:
    factor: int  # 1-based factor index
    value: int   # residue mod n_factor, never 1


@dataclass(frozen=True)
class FactorFamily:
    """The factor groups G_1, ..., G_n, with optional trapdoors.

    Equality looks at the public factors only; attaching secrets does not
    change which family a word belongs to.
    """

    factors: tuple[CyclicPublicKey, ...]
    secrets: tuple[CyclicSecretKey, ...] | None = field(default=None, compare=False)

    @property
    def count(self) -> int:
        return len(self.factors)

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= len(self.factors):
            raise ValueError(f"factor index {i} out of range 1..{len(self.factors)}")

    def public(self, i: int) -> CyclicPublicKey:
        self._check_index(i)
        return self.factors[i - 1]

    def secret(self, i: int) -> CyclicSecretKey:
        self._check_index(i)
        if self.secrets is None:
            raise MissingTrapdoor("factor secret keys are not available")
        return self.secrets[i - 1]

    def modulus(self, i: int) -> int:
        return self.public(i).n

    def order(self, i: int) -> int:
        return self.public(i).m

    def f_value(self, i: int, value: int) -> int:
        """Coset index of a factor element (requires the trapdoor)."""
        return decrypt_cyclic(self.secret(i), self.public(i), CyclicCiphertext(value))

    def with_secrets(self, secrets: tuple[CyclicSecretKey, ...]) -> "FactorFamily":
        if len(secrets) != len(self.factors):
            raise ValueError("secret count does not match factor count")
        for pk, sk in zip(self.factors, secrets):
            if sk.p * sk.q != pk.n or sk.m != pk.m:
                raise ValueError("secret key does not match its factor")
        return FactorFamily(self.factors, tuple(secrets))


@dataclass(frozen=True)
class GWord:
    """Normal-form word; the empty word is the group identity."""

    family: FactorFamily
    letters: tuple[GLetter, ...]

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters


def empty_word(family: FactorFamily) -> GWord:
    return GWord(family, ())


def _check_letter(family: FactorFamily, i: int, v: int) -> None:
    n = family.modulus(i)
    if not 0 < v < n or gcd(v, n) != 1:
        raise LetterOutOfGroup(f"{v} is not a unit modulo {n} (factor {i})")
    if family.order(i) % 2 == 0 and jacobi(v, n) != 1:
        raise LetterOutOfGroup(
            f"{v} has Jacobi symbol -1 modulo {n} (factor {i}, even order)")


def normalize(family: FactorFamily,
              letters: Iterable[GLetter | tuple[int, int]],
              *, validate: bool = True) -> GWord:
    """Reduce a raw letter sequence to normal form.

    Adjacent same-factor letters are multiplied in their factor, identity
    letters are dropped, and newly adjacent pairs are re-merged (a stack
    pass, so the result is independent of merge order).
    """
    out: list[GLetter] = []
    for item in letters:
        if isinstance(item, GLetter):
            i, v = item.factor, item.value
        else:
            i, v = item
        family._check_index(i)
        v %= family.modulus(i)
        if validate:
            _check_letter(family, i, v)
        if v == 1:
            continue
        if out and out[-1].factor == i:
            merged = out.pop().value * v % family.modulus(i)
            if merged != 1:
                out.append(GLetter(i, merged))
        else:
            out.append(GLetter(i, v))
    return GWord(family, tuple(out))


def _require_same_family(u: GWord, v: GWord) -> None:
    if u.family.factors != v.family.factors:
        raise ValueError("words belong to different factor families")


def g_multiply(u: GWord, v: GWord) -> GWord:
    """Product of two normal-form words (concatenate, then re-merge)."""
    _require_same_family(u, v)
    return normalize(u.family, u.letters + v.letters, validate=False)


def g_inverse(u: GWord) -> GWord:
    """Reverse the word and invert each letter; stays in normal form."""
    fam = u.family
    inv = tuple(GLetter(l.factor, mod_inverse(l.value, fam.modulus(l.factor)))
                for l in reversed(u.letters))
    return GWord(fam, inv)


# ---------------------------------------------------------------------------
# KWords: the free product of the cyclic quotients

@dataclass(frozen=True)
class KWord:
    """Normal-form word over cyclic factors.

    Stored as runs (symbol, exponent, order) with 1 <= exponent < order and
    adjacent runs over distinct symbols; ``letters`` flattens each run into
    ``exponent`` repetitions of its symbol.
    """

    runs: tuple[tuple[int, int, int], ...]

    @property
    def letters(self) -> tuple[int, ...]:
        out: list[int] = []
        for symbol, exponent, _ in self.runs:
            out.extend([symbol] * exponent)
        return tuple(out)

    def __len__(self) -> int:
        return sum(exponent for _, exponent, _ in self.runs)

    @property
    def is_identity(self) -> bool:
        return not self.runs


def kword_from_runs(runs: Iterable[tuple[int, int, int]]) -> KWord:
    """Build a KWord from (symbol, exponent, order) runs, merging as needed."""
    out: list[tuple[int, int, int]] = []
    for symbol, exponent, order in runs:
        if order < 2:
            raise ValueError("run order must be at least 2")
        exponent %= order
        if exponent == 0:
            continue
        if out and out[-1][0] == symbol:
            prev_symbol, prev_exp, prev_order = out.pop()
            if prev_order != order:
                raise ValueError(f"conflicting orders for symbol {symbol}")
            merged = (prev_exp + exponent) % order
            if merged:
                out.append((symbol, merged, order))
        else:
            out.append((symbol, exponent, order))
    return KWord(tuple(out))


def k_multiply(u: KWord, v: KWord) -> KWord:
    return kword_from_runs(u.runs + v.runs)


def phi_map(g: GWord, *, family: FactorFamily | None = None,
            symbols: Sequence[int] | None = None) -> KWord:
    """Image of a word under the factor-wise coset epimorphism.

    Needs the factor trapdoors; pass ``family`` to supply a secret-bearing
    copy of the word's family.  ``symbols[i-1]`` names the cyclic factor of
    factor i in the image (defaults to the factor index itself).
    """
    fam = family if family is not None else g.family
    if family is not None and family.factors != g.family.factors:
        raise ValueError("family override does not match the word")
    runs = []
    for letter in g.letters:
        e = fam.f_value(letter.factor, letter.value)
        if e:
            symbol = symbols[letter.factor - 1] if symbols else letter.factor
            runs.append((symbol, e, fam.order(letter.factor)))
    return kword_from_runs(runs)


def psi_map(k: KWord, H: FiniteGroup) -> GroupElement:
    """Collapse a KWord (letters indexing H) to its element of H.

    Repeatedly rewrites the leading letter pair x1 x2 against a defining
    relation of H: a cancelling pair is dropped, a repeated letter run or a
    cross-subgroup pair contracts through the relation x1*x2*(x1*x2)^-1,
    and a pair with x2 a power of x1 contracts after expanding x2 into
    repetitions of x1.  Every case replaces the pair by the single letter
    x1*x2 evaluated in H, shrinking the word until at most one letter is
    left.  A plain fold over the multiplication table serves as the test
    oracle for this procedure.
    """
    word = list(k.letters)
    for x in word:
        if not 0 < x < H.order:
            raise ValueError(f"letter {x} does not index a nonidentity element")
    while len(word) >= 2:
        z = H.mul(word[0], word[1])
        word[:2] = [z] if z != H.identity else []
    return H.element(word[0] if word else H.identity)


# ---------------------------------------------------------------------------
# kernel witnesses for phi

@dataclass(frozen=True)
class PhiLetter:
    factor: int
    value: int
    is_a0: bool  # True: preimage letter ]value,factor[; False: plain letter


@dataclass(frozen=True)
class PhiWitness:
    """Witness word; reachable from the empty word by ``depth`` insertions."""

    letters: tuple[PhiLetter, ...]
    depth: int

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class PsiLetter:
    factor: int
    index: int  # index into the factor's transversal


@dataclass(frozen=True)
class PsiWitness:
    letters: tuple[PsiLetter, ...]

    def __len__(self) -> int:
        return len(self.letters)


def p_phi(family: FactorFamily, witness: PhiWitness) -> GWord:
    """Evaluate a witness: preimage letters are raised to their factor order,
    plain letters pass through; the result is normalized and lies in the
    kernel of ``phi_map`` by construction."""
    raw = []
    for letter in witness.letters:
        if letter.is_a0:
            n_i = family.modulus(letter.factor)
            raw.append((letter.factor, pow(letter.value, family.order(letter.factor), n_i)))
        else:
            raw.append((letter.factor, letter.value))
    return normalize(family, raw)


def random_nonkernel_value(family: FactorFamily, i: int, rng: random.Random) -> int:
    """Public sampling of a factor element outside the kernel: a random
    m-th power times a non-identity transversal representative."""
    pk = family.public(i)
    e = rng.randrange(1, pk.m)
    s = random_unit(pk.n, rng)
    return pow(s, pk.m, pk.n) * pk.transversal[e] % pk.n


def random_phi_witness(family: FactorFamily, steps: int, rng: random.Random) -> PhiWitness:
    """Grow a witness by ``steps`` random conjugated insertions.

    Each step turns w into x^-1 x0 w x where x is a random non-kernel
    letter (or skipped) and x0 a random preimage letter (or skipped).
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    n = family.count
    letters: list[PhiLetter] = []
    for _ in range(steps):
        x0_choice = rng.randrange(n + 1)  # 0 = skip
        x_choice = rng.randrange(n + 1)
        mid: list[PhiLetter] = []
        if x0_choice:
            a = random_unit(family.modulus(x0_choice), rng)
            mid.append(PhiLetter(x0_choice, a, True))
        if x_choice:
            v = random_nonkernel_value(family, x_choice, rng)
            v_inv = mod_inverse(v, family.modulus(x_choice))
            letters = ([PhiLetter(x_choice, v_inv, False)] + mid + letters
                       + [PhiLetter(x_choice, v, False)])
        else:
            letters = mid + letters
    return PhiWitness(tuple(letters), steps)


FactorOracle = Callable[[int], "int | None"]


def inverse_p_phi(g: GWord, oracles: Sequence[FactorOracle]) -> tuple[PhiWitness, GWord]:
    """Invert ``p_phi`` on a word using per-factor inversion oracles.

    ``oracles[i-1]`` answers factor-i queries: given a value it returns an
    m_i-th root when the value is a kernel element and None otherwise.

    Returns a pair (witness, t).  The word is in the kernel of ``phi``
    exactly when t is the identity, and then the witness evaluates back to
    the word under ``p_phi``.  Each round scans the current word for its
    first kernel letter, rotates the remaining letters around it and
    recurses; the witness is reassembled by conjugation on the way out.
    The oracle-call count is at most len(g)**2.
    """
    family = g.family
    if len(oracles) != family.count:
        raise ValueError("need one oracle per factor")
    frames: list[tuple[tuple[GLetter, ...], int, int]] = []
    current = g
    while True:
        if not current.letters:
            witness, t = PhiWitness((), 0), empty_word(family)
            break
        found = None
        for idx, letter in enumerate(current.letters):
            root = oracles[letter.factor - 1](letter.value)
            if root is not None:
                n_i = family.modulus(letter.factor)
                if pow(root, family.order(letter.factor), n_i) != letter.value % n_i:
                    raise OracleFailure(
                        f"oracle for factor {letter.factor} returned a non-root")
                found = (idx, letter.factor, root % n_i)
                break
        if found is None:
            witness, t = PhiWitness((), 0), current
            break
        idx, factor_j, root_j = found
        frames.append((current.letters[:idx], factor_j, root_j))
        rotated = current.letters[idx + 1:] + current.letters[:idx]
        current = normalize(family, rotated, validate=False)
    if not t.is_identity:
        # not a kernel element; the pending frames are discarded unchanged
        return witness, t
    letters = list(witness.letters)
    depth = witness.depth
    for prefix, factor_j, root_j in reversed(frames):
        pre = [PhiLetter(l.factor, l.value, False) for l in prefix]
        post = [PhiLetter(l.factor, mod_inverse(l.value, family.modulus(l.factor)), False)
                for l in reversed(prefix)]
        letters = pre + [PhiLetter(factor_j, root_j, True)] + letters + post
        depth += max(len(prefix), 1)
    return PhiWitness(tuple(letters), depth), empty_word(family)


def p_psi(family: FactorFamily, witness: PsiWitness) -> GWord:
    """Evaluate a transversal witness to the normalized product of its
    representatives."""
    raw = []
    for letter in witness.letters:
        pk = family.public(letter.factor)
        if not 0 <= letter.index < pk.m:
            raise ValueError(f"transversal index {letter.index} out of range")
        raw.append((letter.factor, pk.transversal[letter.index]))
    return normalize(family, raw, validate=False)


def combined_P(family: FactorFamily, a: PhiWitness, b: PsiWitness) -> GWord:
    """The full proof-system map: P(a, b) = p_phi(a) * p_psi(b)."""
    return g_multiply(p_phi(family, a), p_psi(family, b))


def trapdoor_oracles(family: FactorFamily, rng: random.Random) -> list[FactorOracle]:
    """Honest per-factor inversion oracles built from the trapdoors."""
    if family.secrets is None:
        raise MissingTrapdoor("factor secret keys are not available")
    oracles: list[FactorOracle] = []
    for i in range(1, family.count + 1):
        pk, sk = family.public(i), family.secret(i)

        def oracle(value: int, pk: CyclicPublicKey = pk, sk: CyclicSecretKey = sk) -> int | None:
            return inverse_P_cyclic(sk, pk, value, rng)

        oracles.append(oracle)
    return oracles


# ---------------------------------------------------------------------------
# text encoding

def format_gword(w: GWord) -> str:
    """Space-separated ``factor:value`` tokens; the empty word is ``e``."""
    if not w.letters:
        return "e"
    return " ".join(f"{l.factor}:{l.value}" for l in w.letters)


def parse_gword(text: str, family: FactorFamily) -> GWord:
    text = text.strip()
    if not text:
        raise FormatError("empty word encoding (use 'e' for the identity)")
    if text == "e":
        return empty_word(family)
    raw = []
    for token in text.split():
        factor_str, sep, value_str = token.partition(":")
        if not sep:
            raise FormatError(f"bad word token {token!r}")
        try:
            raw.append((int(factor_str), int(value_str)))
        except ValueError:
            raise FormatError(f"bad word token {token!r}") from None
    return normalize(family, raw)
