"""Sequence encoding and construction of the alignment initialisation circuit.

The full register is laid out as three blocks over ``2n + k`` qubits,
``k = ceil(log2(n + 1))``:

- data register, qubits ``[0, n)``: holds database entries in superposition
- sample register, qubits ``[n, 2n)``: holds the target, later XORed in place
- distance register, qubits ``[2n, 2n + k)``: holds the per-branch Hamming
  distance as a k-bit number

With qubit 0 the least-significant index bit, a full-register outcome
bitstring reads ``<distance bits><sample bits><data bits>``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .simcore import (
    Circuit,
    Gate,
    Statevector,
    cnot,
    concat,
    mcx,
    ry,
    rz,
    x,
)

logger = logging.getLogger(__name__)

_ZERO_PROB = 1e-14


@dataclass(frozen=True)
class Alphabet:
    """Ordered symbol set; symbols map to their position as a fixed-width code."""

    letters: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        if len(self.letters) < 2:
            raise ValueError("alphabet needs at least 2 letters")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("alphabet letters must be distinct")

    @property
    def bits_per_letter(self) -> int:
        return math.ceil(math.log2(len(self.letters)))

    def code(self, letter: str) -> str:
        try:
            i = self.letters.index(letter)
        except ValueError:
            raise ValueError(f"symbol {letter!r} not in alphabet {self.letters}") from None
        return format(i, f"0{self.bits_per_letter}b")

    @classmethod
    def from_text(cls, text: str) -> "Alphabet":
        """One symbol per line."""
        return cls(tuple(ln.strip() for ln in text.splitlines() if ln.strip()))


DNA = Alphabet(("A", "T", "G", "C"))


def encode_sequence(text: str, alphabet: Alphabet) -> str:
    """Concatenate the per-symbol codes; '' encodes to ''."""
    return "".join(alphabet.code(ch) for ch in text)


def subsequence_windows(genome: str, m: int) -> list[str]:
    """All consecutive length-m windows, in order, duplicates included."""
    if m < 1:
        raise ValueError("window length must be >= 1")
    if m > len(genome):
        raise ValueError(f"window length {m} exceeds sequence length {len(genome)}")
    return [genome[i : i + m] for i in range(len(genome) - m + 1)]


def _check_bits(s: str, what: str) -> None:
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"{what} must be a nonempty 0/1 string, got {s!r}")


@dataclass(frozen=True)
class Database:
    """Distinct n-bit strings to align against."""

    n: int
    entries: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("database must contain at least one entry")
        for e in self.entries:
            _check_bits(e, "database entry")
            if len(e) != self.n:
                raise ValueError(f"entry {e!r} is not {self.n} bits wide")
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("database entries must be distinct")

    @property
    def size(self) -> int:
        return len(self.entries)

    @classmethod
    def from_bitstrings(cls, entries: Iterable[str], n: int | None = None) -> "Database":
        """Build a database, collapsing duplicates (with a warning) first."""
        seen: dict[str, None] = {}
        dropped = 0
        for e in entries:
            if e in seen:
                dropped += 1
            else:
                seen[e] = None
        if dropped:
            logger.warning("collapsed %d duplicate database entries", dropped)
        distinct = tuple(seen)
        if n is None:
            if not distinct:
                raise ValueError("cannot infer width from an empty entry list")
            n = len(distinct[0])
        return cls(n, distinct)

    @classmethod
    def from_text(cls, text: str) -> "Database":
        """File format: first line 'n=<width>', then one bit string per line."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("n="):
            raise ValueError("database text must start with an 'n=<width>' header")
        n = int(lines[0].split("=", 1)[1])
        return cls.from_bitstrings(lines[1:], n=n)

    def to_text(self) -> str:
        return f"n={self.n}\n" + "\n".join(self.entries) + "\n"


@dataclass(frozen=True)
class TargetSequence:
    """The n-bit string to align the database against."""

    bits: str

    def __post_init__(self):
        _check_bits(self.bits, "target sequence")

    @property
    def n(self) -> int:
        return len(self.bits)


def hamming(a: str, b: str) -> int:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {a!r} vs {b!r}")
    return sum(p != q for p, q in zip(a, b))


@dataclass(frozen=True)
class RegisterLayout:
    """Index bookkeeping for the data / sample / distance blocks."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("data width must be >= 1")

    @property
    def k(self) -> int:
        return math.ceil(math.log2(self.n + 1))

    @property
    def total(self) -> int:
        return 2 * self.n + self.k

    @property
    def data(self) -> range:
        return range(0, self.n)

    @property
    def sample(self) -> range:
        return range(self.n, 2 * self.n)

    @property
    def distance(self) -> range:
        return range(2 * self.n, 2 * self.n + self.k)

    def pack_index(self, data_index: int, sample_index: int, distance_index: int) -> int:
        return data_index | (sample_index << self.n) | (distance_index << (2 * self.n))

    def split_index(self, index: int) -> tuple[int, int, int]:
        mask = (1 << self.n) - 1
        return index & mask, (index >> self.n) & mask, index >> (2 * self.n)

    def data_bits(self, outcome: str) -> str:
        """Data-register slice of a full-register outcome bitstring."""
        if len(outcome) != self.total:
            raise ValueError(f"outcome {outcome!r} is not {self.total} bits wide")
        return outcome[self.total - self.n :]

    def distance_bits(self, outcome: str) -> str:
        if len(outcome) != self.total:
            raise ValueError(f"outcome {outcome!r} is not {self.total} bits wide")
        return outcome[: self.k]


def database_state(db: Database) -> Statevector:
    """Uniform superposition over the database entries, on n qubits."""
    amps = np.zeros(1 << db.n, dtype=np.complex128)
    amps[[int(e, 2) for e in db.entries]] = 1.0 / math.sqrt(db.size)
    return Statevector(db.n, amps)


def state_preparation_circuit(state: Statevector) -> Circuit:
    """Exact circuit mapping |0...0> to the given state, up to global phase.

    Magnitudes come from a tree of prefix-controlled RY rotations (one
    multiplexor level per qubit, most-significant first); amplitude phases,
    if any, from a tree of prefix-controlled RZ gates. Gate count is linear
    in the number of nonzero amplitude branches, at most 2^(n+1).
    """
    n = state.num_qubits
    amps = state.amplitudes
    probs = np.abs(amps) ** 2
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"state is not normalized (sum of probabilities {total})")

    gates: list[Gate] = []
    for j in range(n - 1, -1, -1):
        # marginal[v, b] = P(top bits = v, bit j = b), lower bits summed out
        marginal = probs.reshape(1 << (n - 1 - j), 2, 1 << j).sum(axis=2)
        for v in range(marginal.shape[0]):
            p0, p1 = marginal[v]
            if p0 + p1 <= _ZERO_PROB or p1 <= _ZERO_PROB:
                continue
            theta = 2.0 * math.atan2(math.sqrt(p1), math.sqrt(p0))
            controls = [(j + 1 + t, (v >> t) & 1) for t in range(n - 1 - j)]
            gates.append(ry(j, theta, controls))

    phases = np.where(np.abs(amps) > 1e-12, np.angle(amps), 0.0)
    if np.max(np.abs(phases)) > 1e-12:
        level = phases.copy()
        for j in range(n):
            pairs = level.reshape(-1, 2)
            for v in range(pairs.shape[0]):
                delta = pairs[v, 1] - pairs[v, 0]
                if abs(delta) > 1e-12:
                    controls = [(j + 1 + t, (v >> t) & 1) for t in range(n - 1 - j)]
                    gates.append(rz(j, delta, controls))
            level = pairs.mean(axis=1)  # common phase, pushed one level up

    return Circuit(n, tuple(gates))


def exact_loader(db: Database) -> Circuit:
    """Circuit preparing the database superposition exactly from |0...0>."""
    return state_preparation_circuit(database_state(db))


def target_loader(target: TargetSequence, layout: RegisterLayout) -> Circuit:
    """X gates writing the target into the sample register."""
    if target.n != layout.n:
        raise ValueError(f"target is {target.n} bits but layout expects {layout.n}")
    gates = []
    for j in range(layout.n):
        # character position n-1-j of the bitstring lands on sample qubit n+j
        if target.bits[layout.n - 1 - j] == "1":
            gates.append(x(layout.n + j))
    return Circuit(layout.total, tuple(gates))


def entangler(layout: RegisterLayout) -> Circuit:
    """CNOTs from each data qubit onto its sample partner: |d>|s> -> |d>|s XOR d>."""
    gates = [cnot(j, layout.n + j) for j in range(layout.n)]
    return Circuit(layout.total, tuple(gates))


def popcount_operator(layout: RegisterLayout) -> Circuit:
    """Writes popcount(sample) into the distance register.

    One controlled +1 incrementer per sample qubit, each a descending
    carry-style chain of multi-controlled X gates. Assumes the distance
    register starts in |0>^k; the count never overflows since
    popcount <= n < 2^k.
    """
    gates = []
    dist = list(layout.distance)
    for s in layout.sample:
        for m in range(layout.k - 1, -1, -1):
            controls = [(s, 1)] + [(dist[t], 1) for t in range(m)]
            gates.append(mcx(controls, dist[m]))
    return Circuit(layout.total, tuple(gates))


def initialisation_unitary(
    db_loader: Circuit, target: TargetSequence, layout: RegisterLayout
) -> Circuit:
    """Full state preparation: database load, target load, XOR, popcount.

    ``db_loader`` acts on the n data qubits; it may prepare the database
    superposition exactly or approximately (a synthesized loader).
    """
    if db_loader.num_qubits != layout.n:
        raise ValueError(
            f"database loader acts on {db_loader.num_qubits} qubits, layout expects {layout.n}"
        )
    embedded = Circuit(layout.total, db_loader.gates)
    return concat(
        embedded,
        target_loader(target, layout),
        entangler(layout),
        popcount_operator(layout),
    )
