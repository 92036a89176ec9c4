"""Dense statevector simulator: gates, circuits, sampling, fidelity.

Conventions used throughout the package:

- Qubit 0 is the least-significant bit of the basis-state index.
- Bitstrings render most-significant qubit first, so for a 3-qubit state
  the string "101" names basis index 5 and qubit 0 holds the rightmost bit.
- Global phase is never observable; state comparisons go through
  ``fidelity`` rather than amplitude equality.

Statevectors and circuits are plain values. Every operation returns a new
object and never mutates its inputs, so independent instances can be used
concurrently without coordination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, sin
from typing import Iterable, Sequence

import numpy as np

ROTATION_KINDS = frozenset({"RX", "RY", "RZ"})
GATE_KINDS = frozenset({"X", "H", "Z", "RX", "RY", "RZ", "CNOT", "MCX", "MCZ"})

# X-like kinds permute amplitudes, Z-like kinds flip signs, the rest mix.
_X_LIKE = frozenset({"X", "CNOT", "MCX"})
_Z_LIKE = frozenset({"Z", "MCZ"})

_SQRT2_INV = 1.0 / np.sqrt(2.0)


def _normalize_controls(controls) -> tuple[tuple[int, int], ...]:
    """Accept ints (positive control) or (qubit, polarity) pairs."""
    out = []
    for c in controls:
        if isinstance(c, (tuple, list)):
            q, pol = int(c[0]), int(c[1])
        else:
            q, pol = int(c), 1
        if pol not in (0, 1):
            raise ValueError(f"control polarity must be 0 or 1, got {pol}")
        out.append((q, pol))
    return tuple(out)


@dataclass(frozen=True)
class Gate:
    """One gate: a kind, target qubits, optional polarity-aware controls.

    ``controls`` is a tuple of (qubit, polarity) pairs; the gate acts only
    on basis states where every control qubit matches its polarity. All
    kinds accept controls (rotations included, which the state-preparation
    circuits rely on). ``angle`` is required for RX/RY/RZ and forbidden
    otherwise.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", _normalize_controls(self.controls))
        if len(self.targets) != 1:
            raise ValueError(f"{self.kind} takes exactly one target, got {self.targets}")
        if self.kind == "CNOT" and len(self.controls) != 1:
            raise ValueError("CNOT takes exactly one control")
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValueError(f"{self.kind} does not take an angle")
        control_qubits = [q for q, _ in self.controls]
        touched = list(self.targets) + control_qubits
        if len(set(touched)) != len(touched):
            raise ValueError(f"controls and targets must be disjoint: {touched}")

    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    def inverse(self) -> "Gate":
        if self.kind in ROTATION_KINDS:
            return Gate(self.kind, self.targets, self.controls, -self.angle)
        return self  # X/H/Z/CNOT/MCX/MCZ are self-inverse


def x(target: int, controls=()) -> Gate:
    return Gate("X", (target,), _normalize_controls(controls))


def h(target: int) -> Gate:
    return Gate("H", (target,))


def z(target: int) -> Gate:
    return Gate("Z", (target,))


def rx(target: int, angle: float, controls=()) -> Gate:
    return Gate("RX", (target,), _normalize_controls(controls), angle)


def ry(target: int, angle: float, controls=()) -> Gate:
    return Gate("RY", (target,), _normalize_controls(controls), angle)


def rz(target: int, angle: float, controls=()) -> Gate:
    return Gate("RZ", (target,), _normalize_controls(controls), angle)


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (target,), ((control, 1),))


def mcx(controls, target: int) -> Gate:
    return Gate("MCX", (target,), _normalize_controls(controls))


def mcz(controls, target: int) -> Gate:
    return Gate("MCZ", (target,), _normalize_controls(controls))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a fixed qubit count."""

    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            bad = [q for q in g.qubits() if not 0 <= q < self.num_qubits]
            if bad:
                raise ValueError(f"gate {g.kind} touches qubits {bad} outside [0, {self.num_qubits})")

    def __len__(self) -> int:
        return len(self.gates)

    def extended(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.num_qubits, self.gates + tuple(gates))

    def depth(self) -> int:
        """Greedy-layered depth: gates sharing no qubit pack into one layer."""
        busy_until = [0] * self.num_qubits
        depth = 0
        for g in self.gates:
            layer = 1 + max(busy_until[q] for q in g.qubits())
            for q in g.qubits():
                busy_until[q] = layer
            depth = max(depth, layer)
        return depth


def concat(*circuits: Circuit) -> Circuit:
    """Join circuits acting on the same register, in order."""
    widths = {c.num_qubits for c in circuits}
    if len(widths) != 1:
        raise ValueError(f"cannot concatenate circuits of differing widths {sorted(widths)}")
    gates: list[Gate] = []
    for c in circuits:
        gates.extend(c.gates)
    return Circuit(circuits[0].num_qubits, tuple(gates))


def invert(circuit: Circuit) -> Circuit:
    """Exact adjoint: reversed order, each gate inverted."""
    return Circuit(circuit.num_qubits, tuple(g.inverse() for g in reversed(circuit.gates)))


@dataclass
class Statevector:
    """Dense complex amplitudes over the 2^num_qubits computational basis."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "Statevector":
        return Statevector(self.num_qubits, self.amplitudes.copy())


def zero_state(num_qubits: int) -> Statevector:
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> Statevector:
    if not 0 <= index < (1 << num_qubits):
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(num_qubits, amps)


def index_to_bits(index: int, num_qubits: int) -> str:
    return format(index, f"0{num_qubits}b")


def bits_to_index(bits: str) -> int:
    return int(bits, 2)


_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(num_qubits: int) -> np.ndarray:
    arr = _INDEX_CACHE.get(num_qubits)
    if arr is None:
        arr = np.arange(1 << num_qubits, dtype=np.int64)
        _INDEX_CACHE[num_qubits] = arr
    return arr


def _rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c, s = cos(angle / 2.0), sin(angle / 2.0)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    # RZ
    return np.array([[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=np.complex128)


def _control_mask(num_qubits: int, controls: Sequence[tuple[int, int]]) -> np.ndarray | None:
    """Boolean mask over all basis indices where every control matches, or None."""
    if not controls:
        return None
    idx = _indices(num_qubits)
    mask = np.ones(idx.shape, dtype=bool)
    for q, pol in controls:
        mask &= ((idx >> q) & 1) == pol
    return mask


def _apply_gate_inplace(amps: np.ndarray, num_qubits: int, gate: Gate) -> None:
    target = gate.targets[0]
    idx = _indices(num_qubits)
    cmask = _control_mask(num_qubits, gate.controls)

    if gate.kind in _Z_LIKE:
        mask = ((idx >> target) & 1) == 1
        if cmask is not None:
            mask &= cmask
        amps[mask] *= -1.0
        return

    mask0 = ((idx >> target) & 1) == 0
    if cmask is not None:
        mask0 &= cmask
    i0 = np.nonzero(mask0)[0]
    i1 = i0 | (1 << target)

    if gate.kind in _X_LIKE:
        tmp = amps[i0].copy()
        amps[i0] = amps[i1]
        amps[i1] = tmp
        return

    if gate.kind == "H":
        u = np.array([[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]], dtype=np.complex128)
    else:
        u = _rotation_matrix(gate.kind, gate.angle)
    a = amps[i0].copy()
    b = amps[i1]
    amps[i0] = u[0, 0] * a + u[0, 1] * b
    amps[i1] = u[1, 0] * a + u[1, 1] * b


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Apply one gate, returning a new statevector."""
    bad = [q for q in gate.qubits() if not 0 <= q < state.num_qubits]
    if bad:
        raise ValueError(f"gate {gate.kind} touches qubits {bad} outside [0, {state.num_qubits})")
    out = state.amplitudes.copy()
    _apply_gate_inplace(out, state.num_qubits, gate)
    return Statevector(state.num_qubits, out)


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    """Apply every gate in order, returning a new statevector."""
    if circuit.num_qubits != state.num_qubits:
        raise ValueError(
            f"circuit acts on {circuit.num_qubits} qubits but state has {state.num_qubits}"
        )
    out = state.amplitudes.copy()
    for gate in circuit.gates:
        _apply_gate_inplace(out, state.num_qubits, gate)
    return Statevector(state.num_qubits, out)


def run_circuit(circuit: Circuit) -> Statevector:
    """Apply the circuit to |0...0>."""
    return apply_circuit(zero_state(circuit.num_qubits), circuit)


def sample_counts(state: Statevector, shots: int, rng_seed: int) -> dict[str, int]:
    """Sample measurement outcomes; bitstring keys, counts summing to shots.

    Deterministic for a fixed seed. Only outcomes with nonzero count appear.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(rng_seed)
    drawn = rng.multinomial(shots, probs)
    hits = np.nonzero(drawn)[0]
    return {index_to_bits(int(i), state.num_qubits): int(drawn[i]) for i in hits}


def fidelity(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2, clipped to [0, 1] against roundoff."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))


# --- serialization -----------------------------------------------------------
# Line-oriented text: header "qubits=<q>", then one gate per line,
#   KIND targets=[...] controls=[(q,pol),...] angle=<radians>
# with the angle field present only on rotation gates.


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qubits={circuit.num_qubits}"]
    for g in circuit.gates:
        targets = "[" + ",".join(str(t) for t in g.targets) + "]"
        controls = "[" + ",".join(f"({q},{pol})" for q, pol in g.controls) + "]"
        line = f"{g.kind} targets={targets} controls={controls}"
        if g.angle is not None:
            line += f" angle={g.angle!r}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _parse_listish(text: str) -> tuple:
    import ast

    if text == "[]":
        return ()
    return tuple(ast.literal_eval(text.replace("[", "(").replace("]", ",)")))


def parse_circuit(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("qubits="):
        raise ValueError("circuit text must start with a 'qubits=<q>' header")
    num_qubits = int(lines[0].split("=", 1)[1])
    gates = []
    for ln in lines[1:]:
        fields = ln.split()
        kind = fields[0]
        parts = dict(f.split("=", 1) for f in fields[1:])
        targets = _parse_listish(parts["targets"])
        controls = _parse_listish(parts.get("controls", "[]"))
        angle = float(parts["angle"]) if "angle" in parts else None
        gates.append(Gate(kind, targets, controls, angle))
    return Circuit(num_qubits, tuple(gates))
