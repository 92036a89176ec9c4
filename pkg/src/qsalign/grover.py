"""Phase oracle, diffusion, layer assembly, and layer-count theory.

The oracle flips the sign of branches whose distance register equals the
probe distance delta; diffusion reflects about the full prepared state by
conjugating a reflection about |0...0> with the initialisation circuit.
Both are reflections, so each squares to the identity (up to global phase,
which nothing here observes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .registers import RegisterLayout
from .simcore import Circuit, Statevector, concat, invert, mcz, x


@dataclass(frozen=True)
class OracleSpec:
    """Probe distance and the register layout it applies to."""

    delta: int
    layout: RegisterLayout

    def __post_init__(self):
        if not 0 <= self.delta <= self.layout.n:
            raise ValueError(f"probe distance {self.delta} outside [0, {self.layout.n}]")


@dataclass(frozen=True)
class GroverPlan:
    """Layer budget for one search pass: N entries, c of them marked."""

    database_size: int
    matches: int
    layers: int
    theta: float

    def __post_init__(self):
        if not 1 <= self.matches <= self.database_size:
            raise ValueError(
                f"need 1 <= matches <= database size, got {self.matches}/{self.database_size}"
            )
        if self.layers < 1:
            raise ValueError("a plan always runs at least one layer")


def phase_oracle(spec: OracleSpec) -> Circuit:
    """Multiply by -1 exactly on basis states whose distance register is delta.

    Realized as one MCZ over the distance register with control polarities
    matching delta's bits; when delta is zero (no 1-bit to host the Z), the
    lowest distance qubit is X-conjugated to stand in.
    """
    layout = spec.layout
    if spec.delta >= (1 << layout.k):
        raise ValueError(f"distance {spec.delta} not representable in {layout.k} bits")
    dist = list(layout.distance)
    bits = [(spec.delta >> i) & 1 for i in range(layout.k)]
    if any(bits):
        t = bits.index(1)
        controls = [(dist[i], bits[i]) for i in range(layout.k) if i != t]
        return Circuit(layout.total, (mcz(controls, dist[t]),))
    controls = [(dist[i], 0) for i in range(1, layout.k)]
    return Circuit(layout.total, (x(dist[0]), mcz(controls, dist[0]), x(dist[0])))


def zero_reflection(num_qubits: int) -> Circuit:
    """Reflection about |0...0> as the X-conjugated MCZ over all qubits.

    Equals -(2|0><0| - I); the overall sign is an unobservable global phase.
    """
    wrap = tuple(x(q) for q in range(num_qubits))
    core = mcz([(q, 1) for q in range(1, num_qubits)], 0)
    return Circuit(num_qubits, wrap + (core,) + wrap)


def diffusion(prep: Circuit) -> Circuit:
    """Reflection about the state ``prep`` prepares from |0...0>.

    Built as: undo the preparation, reflect about |0...0>, redo it. Equals
    2|psi><psi| - I up to global phase.
    """
    return concat(invert(prep), zero_reflection(prep.num_qubits), prep)


def grover_layer(prep: Circuit, spec: OracleSpec) -> Circuit:
    """One amplification layer: oracle query, then diffusion."""
    if prep.num_qubits != spec.layout.total:
        raise ValueError(
            f"preparation circuit spans {prep.num_qubits} qubits, layout has {spec.layout.total}"
        )
    return concat(phase_oracle(spec), diffusion(prep))


def search_circuit(prep: Circuit, spec: OracleSpec, layers: int) -> Circuit:
    """Full pass: preparation followed by ``layers`` amplification layers."""
    if layers < 0:
        raise ValueError("layer count must be >= 0")
    layer = grover_layer(prep, spec)
    out = prep
    for _ in range(layers):
        out = concat(out, layer)
    return out


def marked_probability(state: Statevector, layout: RegisterLayout, delta: int) -> float:
    """Summed probability over basis states whose distance register is delta."""
    if state.num_qubits != layout.total:
        raise ValueError(
            f"state spans {state.num_qubits} qubits, layout has {layout.total}"
        )
    indices = np.arange(1 << layout.total)
    mask = (indices >> (2 * layout.n)) == delta
    return float(state.probabilities()[mask].sum())


def success_probability(p: int, database_size: int, matches: int) -> float:
    """Marked-subspace probability after p layers with exact preparation."""
    if p < 0:
        raise ValueError(f"layer count must be >= 0, got {p}")
    if not 1 <= matches <= database_size:
        raise ValueError(f"need 1 <= matches <= database size, got {matches}/{database_size}")
    theta = math.asin(math.sqrt(matches / database_size))
    return math.sin((2 * p + 1) * theta) ** 2


def optimal_layers(database_size: int, matches: int) -> int:
    """ceil((pi/4) * sqrt(N/c)) layers.

    The ceiling can overshoot the true integer optimum; see
    ``best_integer_layers`` for the argmax choice.
    """
    if not 1 <= matches <= database_size:
        raise ValueError(f"need 1 <= matches <= database size, got {matches}/{database_size}")
    return math.ceil(math.pi / 4.0 * math.sqrt(database_size / matches))


def best_integer_layers(database_size: int, matches: int) -> int:
    """The integer p maximizing success_probability, smallest on ties.

    For c/N <= 1/2 the scan stays inside the first oscillation of
    sin^2((2p+1)theta), whose peak is the canonical stopping point near
    pi/(4 theta) - 1/2. For coarser ratios that peak falls below p = 1, so
    the scan widens to later cycles, which can land much nearer a maximum
    (c/N = 2/3 reaches 0.998 at p = 2). May return 0 when no layer improves
    on the initial overlap: c = N, or the stationary ratio c/N = 1/2 where
    every layer count yields exactly 1/2.
    """
    return _scan_layers(database_size, matches, 0)


def _scan_layers(database_size: int, matches: int, start: int) -> int:
    theta = math.asin(math.sqrt(matches / database_size))
    if 2 * matches <= database_size:
        horizon = math.ceil(math.pi / (4.0 * theta)) + 1
    else:
        horizon = math.ceil(math.pi / (2.0 * theta)) + 8
    # probabilities equal to within 1e-12 count as tied, so the stationary
    # ratio picks the shallowest p regardless of last-ulp libm wiggle
    return max(
        range(start, max(start, horizon) + 1),
        key=lambda p: (round(success_probability(p, database_size, matches), 12), -p),
    )


def make_plan(database_size: int, matches: int, policy: str = "paper_ceil") -> GroverPlan:
    """Layer plan under a policy: 'paper_ceil' or 'best_integer'.

    Plans always run at least one layer, so under best_integer the search
    is restricted to p >= 1. Restricting matters: some ratios alternate
    between good and bad layer counts (c/N = 3/4 gives exactly 0.75 at
    even p and exactly 0 at odd p), so the plan must pick the best depth
    at or above one rather than depth one itself.
    """
    if policy == "paper_ceil":
        layers = optimal_layers(database_size, matches)
    elif policy == "best_integer":
        layers = _scan_layers(database_size, matches, 1)
    else:
        raise ValueError(f"unknown layer policy {policy!r}")
    theta = math.asin(math.sqrt(matches / database_size))
    return GroverPlan(database_size, matches, layers, theta)
