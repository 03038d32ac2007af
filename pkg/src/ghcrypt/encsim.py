"""Encrypted circuit simulation and the two interaction protocols.

An encrypted program replaces every instruction element of a group program
by a random encryption under a general public key; evaluating it on an
assignment needs only public word arithmetic, and decrypting the resulting
word with the trapdoor reveals target**B(x).

Both protocols run in-process as role objects that exchange the exact
serialized texts the CLI writes, so the transcripts are wire-ready:

* *evaluating an encrypted circuit*: Alice owns the keys and a secret
  boolean circuit, Bob owns the input bits;
* *evaluating at an encrypted input*: Alice owns a secret tuple of group
  elements, Bob owns a secret circuit of group operations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import Error, FormatError
from .groupcore import FiniteGroup, GroupElement
from .circuit import ArityMismatch, Circuit
from .barrington import GroupProgram, compile_barrington
from .freeprod import GWord, empty_word, format_gword, g_inverse, g_multiply, parse_gword
from .general import (
    GeneralCiphertext,
    GeneralPublicKey,
    GeneralSecretKey,
    decrypt_general,
    encrypt_general,
)

__all__ = [
    "GroupMismatch",
    "UnexpectedValue",
    "EncryptedProgram",
    "encrypt_program",
    "eval_encrypted",
    "decrypt_output",
    "GInput",
    "GConst",
    "GMul",
    "GInv",
    "GroupCircuit",
    "eval_group_circuit",
    "lift_group_circuit",
    "eval_lifted_circuit",
    "parse_group_circuit",
    "format_group_circuit",
    "Transcript",
    "format_transcript",
    "format_encrypted_program",
    "parse_encrypted_program",
    "CircuitAlice",
    "CircuitBob",
    "protocol_encrypted_circuit",
    "InputAlice",
    "InputBob",
    "protocol_encrypted_input",
]


class GroupMismatch(Error):
    """Program/circuit group differs from the key's plaintext group."""


class UnexpectedValue(Error):
    """Decryption produced neither the identity nor the expected target."""


# ---------------------------------------------------------------------------
# encrypted programs

@dataclass(frozen=True)
class EncryptedProgram:
    """Group program with each instruction element replaced by a ciphertext
    word; the target stays public in H."""

    pk: GeneralPublicKey
    instructions: tuple[tuple[GWord, int], ...]
    target: int
    input_count: int

    def __len__(self) -> int:
        return len(self.instructions)


def encrypt_program(pk: GeneralPublicKey, p: GroupProgram, rng: random.Random, *,
                    phi_steps: int | None = None,
                    psi_length: int | None = None) -> EncryptedProgram:
    """Encrypt each instruction element independently."""
    if p.group is not pk.group:
        raise GroupMismatch("program group differs from the key group")
    instructions = tuple(
        (encrypt_general(pk, pk.group.element(element), rng,
                         phi_steps=phi_steps, psi_length=psi_length).word, var)
        for element, var in p.instructions)
    return EncryptedProgram(pk=pk, instructions=instructions,
                            target=p.target, input_count=p.input_count)


def eval_encrypted(ep: EncryptedProgram, bits) -> GeneralCiphertext:
    """Public evaluation: product of the selected ciphertext words."""
    if len(bits) != ep.input_count:
        raise ArityMismatch(
            f"expected {ep.input_count} input bits, got {len(bits)}")
    extended = tuple(1 if b else 0 for b in bits) + (1,)
    acc = empty_word(ep.pk.family)
    for word, var in ep.instructions:
        if extended[var]:
            acc = g_multiply(acc, word)
    return GeneralCiphertext(acc)


def decrypt_output(sk: GeneralSecretKey, pk: GeneralPublicKey,
                   g: GeneralCiphertext, target: GroupElement) -> int:
    """1 when g decrypts to the target, 0 on the identity, error otherwise."""
    h = decrypt_general(sk, pk, g)
    if h.index == target.index:
        return 1
    if h.index == pk.group.identity:
        return 0
    raise UnexpectedValue(
        f"decryption gave {h.label!r}, expected identity or {target.label!r}")


def format_encrypted_program(ep: EncryptedProgram) -> str:
    lines = [f"EPROG v1 {ep.input_count} {ep.target}"]
    for word, var in ep.instructions:
        lines.append(f"{var} {format_gword(word)}")
    return "\n".join(lines) + "\n"


def parse_encrypted_program(text: str, pk: GeneralPublicKey) -> EncryptedProgram:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("empty encrypted program")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "EPROG" or header[1] != "v1":
        raise FormatError(f"bad encrypted program header {lines[0]!r}")
    try:
        input_count, target = int(header[2]), int(header[3])
    except ValueError:
        raise FormatError("bad encrypted program header fields") from None
    if not 0 < target < pk.group.order:
        raise FormatError(f"target {target} out of range")
    instructions = []
    for line in lines[1:]:
        var_str, _, word_text = line.partition(" ")
        try:
            var = int(var_str)
        except ValueError:
            raise FormatError(f"bad instruction line {line!r}") from None
        if not 0 <= var <= input_count:
            raise FormatError(f"variable {var} out of range")
        instructions.append((parse_gword(word_text, pk.family), var))
    return EncryptedProgram(pk=pk, instructions=tuple(instructions),
                            target=target, input_count=input_count)


# ---------------------------------------------------------------------------
# circuits of group operations

@dataclass(frozen=True)
class GInput:
    index: int


@dataclass(frozen=True)
class GConst:
    value: object  # element index in H-circuits, GWord after lifting


@dataclass(frozen=True)
class GMul:
    a: int
    b: int


@dataclass(frozen=True)
class GInv:
    a: int


@dataclass(frozen=True)
class GroupCircuit:
    """A straight-line sequence of group operations with n inputs."""

    input_count: int
    steps: tuple
    output: int


def eval_group_circuit(circ: GroupCircuit, inputs, H: FiniteGroup) -> GroupElement:
    """Evaluate in H on a tuple of GroupElements."""
    if len(inputs) != circ.input_count:
        raise ArityMismatch(
            f"expected {circ.input_count} inputs, got {len(inputs)}")
    values: list[int] = []
    for step in circ.steps:
        match step:
            case GInput(index):
                el = inputs[index]
                if el.group is not H:
                    raise GroupMismatch("input element from a different group")
                values.append(el.index)
            case GConst(value):
                values.append(int(value))
            case GMul(a, b):
                values.append(H.mul(values[a], values[b]))
            case GInv(a):
                values.append(H.inverse(values[a]))
            case _:
                raise Error(f"unhandled step {step!r}")
    return H.element(values[circ.output])


def lift_group_circuit(pk: GeneralPublicKey, circ: GroupCircuit,
                       rng: random.Random, *,
                       phi_steps: int | None = None,
                       psi_length: int | None = None) -> GroupCircuit:
    """Replace every constant by a fresh encryption; structure is unchanged.

    The lifted circuit evaluates over ciphertext words via
    :func:`eval_lifted_circuit`.
    """
    steps = []
    for step in circ.steps:
        if isinstance(step, GConst):
            element = pk.group.element(int(step.value))
            steps.append(GConst(encrypt_general(
                pk, element, rng,
                phi_steps=phi_steps, psi_length=psi_length).word))
        else:
            steps.append(step)
    return GroupCircuit(input_count=circ.input_count, steps=tuple(steps),
                        output=circ.output)


def eval_lifted_circuit(circ: GroupCircuit, inputs) -> GWord:
    """Evaluate a lifted circuit on a tuple of ciphertext words."""
    if len(inputs) != circ.input_count:
        raise ArityMismatch(
            f"expected {circ.input_count} inputs, got {len(inputs)}")
    values: list[GWord] = []
    for step in circ.steps:
        match step:
            case GInput(index):
                values.append(inputs[index])
            case GConst(value):
                if not isinstance(value, GWord):
                    raise GroupMismatch("circuit was not lifted (plain constant)")
                values.append(value)
            case GMul(a, b):
                values.append(g_multiply(values[a], values[b]))
            case GInv(a):
                values.append(g_inverse(values[a]))
            case _:
                raise Error(f"unhandled step {step!r}")
    return values[circ.output]


def format_group_circuit(circ: GroupCircuit) -> str:
    """Text form: 'GCIRC v1', INPUTS line, MUL/INV/CONST statements, OUTPUT."""
    names: dict[int, str] = {}
    lines = ["GCIRC v1"]
    lines.append("INPUTS " + " ".join(f"y{k + 1}" for k in range(circ.input_count)))
    counter = 0
    for i, step in enumerate(circ.steps):
        match step:
            case GInput(index):
                names[i] = f"y{index + 1}"
            case GConst(value):
                counter += 1
                names[i] = f"w{counter}"
                lines.append(f"{names[i]} = CONST {int(value)}")
            case GMul(a, b):
                counter += 1
                names[i] = f"w{counter}"
                lines.append(f"{names[i]} = MUL {names[a]} {names[b]}")
            case GInv(a):
                counter += 1
                names[i] = f"w{counter}"
                lines.append(f"{names[i]} = INV {names[a]}")
    lines.append(f"OUTPUT {names[circ.output]}")
    return "\n".join(lines) + "\n"


def parse_group_circuit(text: str, H: FiniteGroup) -> GroupCircuit:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "GCIRC v1":
        raise FormatError("expected header 'GCIRC v1'")
    if len(lines) < 2 or not lines[1].startswith("INPUTS"):
        raise FormatError("missing INPUTS line")
    input_names = lines[1].split()[1:]
    steps: list = []
    table: dict[str, int] = {}
    for k, name in enumerate(input_names):
        if name in table:
            raise FormatError(f"input {name!r} repeated")
        table[name] = len(steps)
        steps.append(GInput(k))
    output = None
    for line in lines[2:]:
        if output is not None:
            raise FormatError("content after OUTPUT")
        tokens = line.split()
        if tokens[0] == "OUTPUT":
            if len(tokens) != 2 or tokens[1] not in table:
                raise FormatError(f"bad OUTPUT line {line!r}")
            output = table[tokens[1]]
            continue
        if len(tokens) < 3 or tokens[1] != "=":
            raise FormatError(f"bad statement {line!r}")
        name, op, args = tokens[0], tokens[2], tokens[3:]
        if name in table:
            raise FormatError(f"wire {name!r} redefined")
        if op == "MUL":
            if len(args) != 2 or any(a not in table for a in args):
                raise FormatError(f"bad MUL statement {line!r}")
            steps.append(GMul(table[args[0]], table[args[1]]))
        elif op == "INV":
            if len(args) != 1 or args[0] not in table:
                raise FormatError(f"bad INV statement {line!r}")
            steps.append(GInv(table[args[0]]))
        elif op == "CONST":
            # labels may contain spaces (cycle notation), keep the rest whole
            token = " ".join(args)
            if not token:
                raise FormatError(f"bad CONST statement {line!r}")
            try:
                index = int(token)
            except ValueError:
                try:
                    index = H.element_by_label(token).index
                except ValueError:
                    raise FormatError(f"unknown constant {token!r}") from None
            if not 0 <= index < H.order:
                raise FormatError(f"constant {token!r} out of range")
            steps.append(GConst(index))
        else:
            raise FormatError(f"unknown operation {op!r}")
        table[name] = len(steps) - 1
    if output is None:
        raise FormatError("missing OUTPUT line")
    return GroupCircuit(input_count=len(input_names), steps=tuple(steps),
                        output=output)


# ---------------------------------------------------------------------------
# transcripts and protocols

@dataclass(frozen=True)
class Transcript:
    """Ordered protocol messages: (role, kind, payload text)."""

    entries: tuple[tuple[str, str, str], ...]


def format_transcript(t: Transcript) -> str:
    lines = ["TRANSCRIPT v1"]
    for role, kind, payload in t.entries:
        lines.append(f"MSG {role} {kind}")
        lines.extend(payload.rstrip("\n").splitlines())
        lines.append("END")
    return "\n".join(lines) + "\n"


class CircuitAlice:
    """Key owner in the encrypted-circuit protocol; keeps the circuit secret."""

    def __init__(self, sk: GeneralSecretKey, pk: GeneralPublicKey,
                 circuit: Circuit, rng: random.Random, *,
                 phi_steps: int | None = None, psi_length: int | None = None,
                 depth_cap: int = 12):
        self.sk, self.pk, self.circuit, self.rng = sk, pk, circuit, rng
        self.phi_steps, self.psi_length = phi_steps, psi_length
        self.depth_cap = depth_cap
        self._target: GroupElement | None = None

    def program_message(self) -> str:
        program = compile_barrington(self.circuit, self.pk.group,
                                     depth_cap=self.depth_cap)
        self._target = self.pk.group.element(program.target)
        encrypted = encrypt_program(self.pk, program, self.rng,
                                    phi_steps=self.phi_steps,
                                    psi_length=self.psi_length)
        return format_encrypted_program(encrypted)

    def result_message(self, word_text: str) -> tuple[str, int]:
        if self._target is None:
            raise Error("result requested before the program was sent")
        word = parse_gword(word_text.strip(), self.pk.family)
        h = decrypt_general(self.sk, self.pk, GeneralCiphertext(word))
        bit = decrypt_output(self.sk, self.pk, GeneralCiphertext(word), self._target)
        return f"bit: {bit}\nfg: {h.index}\n", bit


class CircuitBob:
    """Input owner in the encrypted-circuit protocol; sees only public data."""

    def __init__(self, pk: GeneralPublicKey, bits):
        self.pk = pk
        self.bits = tuple(1 if b else 0 for b in bits)

    def evaluation_message(self, program_text: str) -> str:
        ep = parse_encrypted_program(program_text, self.pk)
        return format_gword(eval_encrypted(ep, self.bits).word) + "\n"


def protocol_encrypted_circuit(alice: CircuitAlice, bob: CircuitBob
                               ) -> tuple[int, Transcript]:
    """Run the three-message encrypted-circuit protocol; returns
    (bit, transcript) where bit equals the circuit value on Bob's input."""
    msg1 = alice.program_message()
    msg2 = bob.evaluation_message(msg1)
    msg3, bit = alice.result_message(msg2)
    transcript = Transcript((
        ("alice", "program", msg1),
        ("bob", "word", msg2),
        ("alice", "result", msg3),
    ))
    return bit, transcript


class InputAlice:
    """Input owner in the encrypted-input protocol."""

    def __init__(self, sk: GeneralSecretKey, pk: GeneralPublicKey,
                 inputs, rng: random.Random, *,
                 phi_steps: int | None = None, psi_length: int | None = None):
        self.sk, self.pk, self.rng = sk, pk, rng
        self.inputs = tuple(inputs)
        self.phi_steps, self.psi_length = phi_steps, psi_length

    def inputs_message(self) -> str:
        lines = []
        for y in self.inputs:
            word = encrypt_general(self.pk, y, self.rng,
                                   phi_steps=self.phi_steps,
                                   psi_length=self.psi_length).word
            lines.append(format_gword(word))
        return "\n".join(lines) + "\n"

    def decrypt_message(self, word_text: str) -> tuple[str, GroupElement]:
        word = parse_gword(word_text.strip(), self.pk.family)
        h = decrypt_general(self.sk, self.pk, GeneralCiphertext(word))
        return f"element: {h.index}\n", h


class InputBob:
    """Circuit owner in the encrypted-input protocol; sees only public data."""

    def __init__(self, pk: GeneralPublicKey, circ: GroupCircuit,
                 rng: random.Random, *,
                 phi_steps: int | None = None, psi_length: int | None = None):
        self.pk, self.circ, self.rng = pk, circ, rng
        self.phi_steps, self.psi_length = phi_steps, psi_length

    def evaluation_message(self, inputs_text: str) -> str:
        words = [parse_gword(line, self.pk.family)
                 for line in inputs_text.strip().splitlines()]
        lifted = lift_group_circuit(self.pk, self.circ, self.rng,
                                    phi_steps=self.phi_steps,
                                    psi_length=self.psi_length)
        result = eval_lifted_circuit(lifted, tuple(words))
        return format_gword(result) + "\n"


def protocol_encrypted_input(alice: InputAlice, bob: InputBob
                             ) -> tuple[GroupElement, Transcript]:
    """Run the encrypted-input protocol; returns (element, transcript) where
    the element is Bob's circuit evaluated on Alice's plain inputs."""
    msg1 = alice.inputs_message()
    msg2 = bob.evaluation_message(msg1)
    msg3, element = alice.decrypt_message(msg2)
    transcript = Transcript((
        ("alice", "inputs", msg1),
        ("bob", "word", msg2),
        ("alice", "element", msg3),
    ))
    return element, transcript
