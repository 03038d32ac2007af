"""Homomorphic cryptosystem over an arbitrary finite nonidentity group H.

For cyclic H a single residue cryptosystem of order |H| is used directly
(ciphertexts are words of at most one letter over one factor).  Otherwise
one residue cryptosystem is generated per nonidentity element h_i of H,
with plaintext order equal to the order of h_i, and ciphertexts are
normal-form words over the resulting factor family.  Decryption composes
the factor-wise coset map with the relation rewriting of ``psi_map``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property

from .errors import Error, FormatError
from .groupcore import FiniteGroup, GroupElement, format_group, parse_group
from .numtheory import ExhaustedRetries
from .cyclic import (
    CyclicCiphertext,
    CyclicPublicKey,
    CyclicSecretKey,
    decrypt_cyclic,
    inverse_P_cyclic,
    keygen_cyclic,
    random_unit,
)
from .freeprod import (
    FactorFamily,
    GWord,
    PhiLetter,
    PhiWitness,
    PsiLetter,
    PsiWitness,
    combined_P,
    empty_word,
    g_inverse,
    g_multiply,
    inverse_p_phi,
    normalize,
    p_psi,
    phi_map,
    psi_map,
    random_phi_witness,
    format_gword,
    parse_gword,
    trapdoor_oracles,
)

__all__ = [
    "IdentityGroup",
    "MalformedWord",
    "GeneralPublicKey",
    "GeneralSecretKey",
    "GeneralCiphertext",
    "keygen_general",
    "encrypt_general",
    "decrypt_general",
    "mult_ciphertexts_general",
    "sample_A",
    "inverse_P_general",
    "secret_family",
    "format_general_pk",
    "parse_general_pk",
    "format_general_sk",
    "parse_general_sk",
]


class IdentityGroup(Error):
    """Cannot build a cryptosystem over the one-element group."""


class MalformedWord(Error):
    """A ciphertext word violates the structure the key implies."""


@dataclass(frozen=True)
class GeneralPublicKey:
    """Public key: the plaintext group, its generator list, and one residue
    cryptosystem per generator.

    ``generators`` holds element indices of H.  For non-cyclic H it is all
    of 1..|H|-1 (factor i encrypts powers of element i); for cyclic H it is
    a single generator whose exponents carry the whole group.
    """

    group: FiniteGroup
    generators: tuple[int, ...]
    family: FactorFamily = field(compare=False)

    @property
    def cyclic_mode(self) -> bool:
        return len(self.generators) == 1

    @cached_property
    def _power_index(self) -> tuple[int, ...]:
        # cyclic mode: element index of g*^e for each exponent e
        g = self.generators[0]
        out, acc = [0], g
        while acc != 0:
            out.append(acc)
            acc = self.group.mul(acc, g)
        return tuple(out)

    @cached_property
    def _dlog(self) -> dict[int, int]:
        return {el: e for e, el in enumerate(self._power_index)}

    @cached_property
    def _generator_position(self) -> dict[int, int]:
        return {el: i + 1 for i, el in enumerate(self.generators)}

    def transversal_word(self, element_index: int) -> GWord:
        """The public coset representative word for an element of H."""
        if element_index == 0:
            return empty_word(self.family)
        if self.cyclic_mode:
            e = self._dlog.get(element_index)
            if e is None:
                raise ValueError(f"element {element_index} unknown to the key")
            return normalize(self.family,
                             [(1, self.family.public(1).transversal[e])],
                             validate=False)
        i = self._generator_position.get(element_index)
        if i is None:
            raise ValueError(f"element {element_index} unknown to the key")
        return normalize(self.family,
                         [(i, self.family.public(i).transversal[1])],
                         validate=False)


@dataclass(frozen=True)
class GeneralSecretKey:
    factors: tuple[CyclicSecretKey, ...]


@dataclass(frozen=True)
class GeneralCiphertext:
    word: GWord

    def __len__(self) -> int:
        return len(self.word)


def secret_family(pk: GeneralPublicKey, sk: GeneralSecretKey) -> FactorFamily:
    """The key's factor family with the trapdoors attached (validated)."""
    return pk.family.with_secrets(sk.factors)


def _cyclic_generator(H: FiniteGroup) -> int | None:
    for i in range(1, H.order):
        if H.order_of(i) == H.order:
            return i
    return None


def keygen_general(H: FiniteGroup, bits: int, rng: random.Random
                   ) -> tuple[GeneralPublicKey, GeneralSecretKey]:
    """Generate a key pair for plaintext group H with |p_i| = |q_i| = bits.

    Cyclic H gets a single factor of order |H|; otherwise one factor per
    nonidentity element, with pairwise distinct moduli.
    """
    if H.order < 2:
        raise IdentityGroup("the plaintext group must have at least 2 elements")
    generator = _cyclic_generator(H)
    if generator is not None:
        pk1, sk1 = keygen_cyclic(H.order, bits, rng)
        pk = GeneralPublicKey(H, (generator,), FactorFamily((pk1,)))
        return pk, GeneralSecretKey((sk1,))
    publics: list[CyclicPublicKey] = []
    secrets: list[CyclicSecretKey] = []
    used: set[int] = set()
    for i in range(1, H.order):
        m_i = H.order_of(i)
        for _ in range(64):
            pk_i, sk_i = keygen_cyclic(m_i, bits, rng)
            if pk_i.n not in used:
                break
        else:
            raise ExhaustedRetries("could not find distinct factor moduli")
        used.add(pk_i.n)
        publics.append(pk_i)
        secrets.append(sk_i)
    pk = GeneralPublicKey(H, tuple(range(1, H.order)), FactorFamily(tuple(publics)))
    return pk, GeneralSecretKey(tuple(secrets))


def sample_A(pk: GeneralPublicKey, rng: random.Random, *,
             phi_steps: int | None = None,
             psi_length: int | None = None) -> tuple[PhiWitness, PsiWitness]:
    """Sample a random kernel proof pair (a, b).

    ``a`` grows by ``phi_steps`` conjugated insertions (default 2|H|).
    ``b`` is a random transversal word of ``psi_length`` letters (default
    |H|) closed off with one letter cancelling its running image, so the
    evaluated pair always maps to the identity of H.
    """
    H = pk.group
    if pk.cyclic_mode:
        if phi_steps == 0:
            return PhiWitness((), 0), PsiWitness(())
        a = random_unit(pk.family.public(1).n, rng)
        return PhiWitness((PhiLetter(1, a, True),), 1), PsiWitness(())
    steps = 2 * H.order if phi_steps is None else phi_steps
    length = H.order if psi_length is None else psi_length
    a = random_phi_witness(pk.family, steps, rng)
    letters: list[PsiLetter] = []
    acc = H.identity
    for _ in range(length):
        i = rng.randrange(1, H.order)
        e = rng.randrange(pk.family.order(i))
        letters.append(PsiLetter(i, e))
        acc = H.mul(acc, H.power(i, e))
    closing = H.inverse(acc)
    if closing != H.identity:
        letters.append(PsiLetter(closing, 1))
    return a, PsiWitness(tuple(letters))


def encrypt_general(pk: GeneralPublicKey, h: GroupElement, rng: random.Random, *,
                    phi_steps: int | None = None,
                    psi_length: int | None = None) -> GeneralCiphertext:
    """Encrypt an element of H as a random kernel word times its coset
    representative.

    ``phi_steps`` / ``psi_length`` tune the randomization size; zero for
    both gives the bare representative (useful only in tests).
    """
    if h.group is not pk.group:
        raise ValueError("plaintext element belongs to a different group")
    if pk.cyclic_mode:
        fpk = pk.family.public(1)
        e = pk._dlog[h.index]
        if phi_steps == 0 and psi_length == 0:
            a = 1
        else:
            a = random_unit(fpk.n, rng)
        value = pow(a, fpk.m, fpk.n) * (fpk.transversal[e] if e else 1) % fpk.n
        return GeneralCiphertext(normalize(pk.family, [(1, value)], validate=False))
    wa, wb = sample_A(pk, rng, phi_steps=phi_steps, psi_length=psi_length)
    kernel_word = combined_P(pk.family, wa, wb)
    return GeneralCiphertext(g_multiply(kernel_word, pk.transversal_word(h.index)))


def decrypt_general(sk: GeneralSecretKey, pk: GeneralPublicKey,
                    c: GeneralCiphertext) -> GroupElement:
    """Evaluate the trapdoor epimorphism on a ciphertext word."""
    word = c.word
    if word.family.factors != pk.family.factors:
        raise MalformedWord("ciphertext word does not match the key")
    fam = secret_family(pk, sk)
    if pk.cyclic_mode:
        if len(word) > 1:
            raise MalformedWord("single-factor ciphertexts have at most one letter")
        if not word.letters:
            return pk.group.element(0)
        e = decrypt_cyclic(sk.factors[0], pk.family.public(1),
                           CyclicCiphertext(word.letters[0].value))
        return pk.group.element(pk._power_index[e])
    k = phi_map(word, family=fam, symbols=pk.generators)
    return psi_map(k, pk.group)


def mult_ciphertexts_general(pk: GeneralPublicKey, c1: GeneralCiphertext,
                             c2: GeneralCiphertext) -> GeneralCiphertext:
    """Homomorphic combination: decrypts to the product in H."""
    return GeneralCiphertext(g_multiply(c1.word, c2.word))


def inverse_P_general(sk: GeneralSecretKey, pk: GeneralPublicKey, g: GWord,
                      rng: random.Random) -> tuple[PhiWitness, PsiWitness] | None:
    """Produce a kernel proof pair for g, or None when g is not a kernel
    element of the epimorphism onto H.

    On success ``combined_P`` maps the returned pair back to g.
    """
    fam = secret_family(pk, sk)
    if pk.cyclic_mode:
        if len(g) > 1:
            raise MalformedWord("single-factor words have at most one letter")
        if not g.letters:
            return PhiWitness((), 0), PsiWitness(())
        value = g.letters[0].value
        root = inverse_P_cyclic(sk.factors[0], pk.family.public(1), value, rng)
        if root is None:
            return None
        return PhiWitness((PhiLetter(1, root, True),), 1), PsiWitness(())
    k = phi_map(g, family=fam, symbols=pk.generators)
    if psi_map(k, pk.group).index != pk.group.identity:
        return None
    # lift the image word to transversal letters, one per run
    position = pk._generator_position
    r_letters = tuple(PsiLetter(position[symbol], exponent)
                      for symbol, exponent, _ in k.runs)
    r_word = p_psi(fam, PsiWitness(r_letters))
    kernel_part = g_multiply(GWord(fam, g.letters), g_inverse(r_word))
    witness, tail = inverse_p_phi(kernel_part, trapdoor_oracles(fam, rng))
    if not tail.is_identity:
        raise Error("internal inversion failure: residual non-kernel word")
    return witness, PsiWitness(r_letters)


# ---------------------------------------------------------------------------
# key files

def format_general_pk(pk: GeneralPublicKey) -> str:
    lines = ["GHC-GENERAL-PK v1"]
    lines.append(format_group(pk.group).rstrip("\n"))
    for i in range(1, len(pk.generators) + 1):
        fpk = pk.family.public(i)
        lines.append(f"FACTOR {i} {fpk.m} {fpk.n} R: "
                     + " ".join(str(r) for r in fpk.transversal))
    lines.append("TRANSVERSAL")
    for el in range(1, pk.group.order):
        lines.append(f"{el} {format_gword(pk.transversal_word(el))}")
    return "\n".join(lines) + "\n"


def parse_general_pk(text: str) -> GeneralPublicKey:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "GHC-GENERAL-PK v1":
        raise FormatError("expected header 'GHC-GENERAL-PK v1'")
    if len(lines) < 2 or not lines[1].startswith("GROUP v1 "):
        raise FormatError("missing embedded group table")
    try:
        order = int(lines[1].split()[2])
    except (IndexError, ValueError):
        raise FormatError("bad group header") from None
    # group section: header + order rows (+ optional LABELS block)
    idx = 2 + order
    if idx < len(lines) and lines[idx] == "LABELS":
        idx += 1 + order
    group_text = "\n".join(lines[1:idx])
    group = parse_group(group_text)
    factors: list[CyclicPublicKey] = []
    while idx < len(lines) and lines[idx].startswith("FACTOR "):
        parts = lines[idx].split()
        if len(parts) < 5 or parts[4] != "R:":
            raise FormatError(f"bad factor line {lines[idx]!r}")
        try:
            fi, m, n = int(parts[1]), int(parts[2]), int(parts[3])
            transversal = tuple(int(x) for x in parts[5:])
        except ValueError:
            raise FormatError(f"bad factor line {lines[idx]!r}") from None
        if fi != len(factors) + 1:
            raise FormatError("factor lines must be numbered consecutively")
        if len(transversal) != m:
            raise FormatError(f"factor {fi} transversal must list {m} elements")
        factors.append(CyclicPublicKey(m=m, n=n, transversal=transversal))
        idx += 1
    if not factors:
        raise FormatError("key lists no factors")
    if len(factors) == 1:
        generator = _cyclic_generator(group)
        if generator is None:
            raise FormatError("single-factor key over a non-cyclic group")
        generators: tuple[int, ...] = (generator,)
    elif len(factors) == group.order - 1:
        generators = tuple(range(1, group.order))
    else:
        raise FormatError(
            f"expected 1 or {group.order - 1} factors, found {len(factors)}")
    pk = GeneralPublicKey(group, generators, FactorFamily(tuple(factors)))
    for i, gen in enumerate(generators, start=1):
        expected_order = group.order if pk.cyclic_mode else group.order_of(gen)
        if pk.family.order(i) != expected_order:
            raise FormatError(f"factor {i} order does not match its generator")
    if idx >= len(lines) or lines[idx] != "TRANSVERSAL":
        raise FormatError("missing TRANSVERSAL section")
    entries = lines[idx + 1:]
    if len(entries) != group.order - 1:
        raise FormatError("TRANSVERSAL must list every nonidentity element")
    for entry in entries:
        el_str, _, word_text = entry.partition(" ")
        try:
            el = int(el_str)
        except ValueError:
            raise FormatError(f"bad transversal entry {entry!r}") from None
        if not 1 <= el < group.order:
            raise FormatError(f"bad transversal element {el}")
        expected = pk.transversal_word(el)
        if parse_gword(word_text, pk.family) != expected:
            raise FormatError(f"transversal entry for element {el} is inconsistent")
    return pk


def format_general_sk(sk: GeneralSecretKey) -> str:
    lines = ["GHC-GENERAL-SK v1"]
    for i, fsk in enumerate(sk.factors, start=1):
        lines.append(f"FACTOR {i} {fsk.p} {fsk.q}")
    return "\n".join(lines) + "\n"


def parse_general_sk(text: str, pk: GeneralPublicKey) -> GeneralSecretKey:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "GHC-GENERAL-SK v1":
        raise FormatError("expected header 'GHC-GENERAL-SK v1'")
    secrets: list[CyclicSecretKey] = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 4 or parts[0] != "FACTOR":
            raise FormatError(f"bad secret factor line {line!r}")
        try:
            fi, p, q = int(parts[1]), int(parts[2]), int(parts[3])
        except ValueError:
            raise FormatError(f"bad secret factor line {line!r}") from None
        if fi != len(secrets) + 1:
            raise FormatError("factor lines must be numbered consecutively")
        if fi > pk.family.count:
            raise FormatError("more secret factors than public factors")
        try:
            secrets.append(CyclicSecretKey.from_primes(p, q, pk.family.order(fi)))
        except ValueError as exc:
            raise FormatError(f"factor {fi}: {exc}") from None
    sk = GeneralSecretKey(tuple(secrets))
    try:
        secret_family(pk, sk)  # validates moduli against the public key
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return sk
