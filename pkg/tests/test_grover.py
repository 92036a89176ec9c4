"""Oracle and diffusion reflections, layer planning, closed-form agreement."""
import math

import numpy as np
import pytest

from qsalign.grover import (
    GroverPlan,
    OracleSpec,
    best_integer_layers,
    diffusion,
    grover_layer,
    make_plan,
    marked_probability,
    optimal_layers,
    phase_oracle,
    search_circuit,
    success_probability,
    zero_reflection,
)
from qsalign.registers import (
    Database,
    RegisterLayout,
    TargetSequence,
    exact_loader,
    hamming,
    initialisation_unitary,
)
from qsalign.simcore import (
    Circuit,
    Statevector,
    apply_circuit,
    basis_state,
    run_circuit,
)


def test_oracle_spec_validation():
    layout = RegisterLayout(3)
    OracleSpec(0, layout)
    OracleSpec(3, layout)
    with pytest.raises(ValueError):
        OracleSpec(-1, layout)
    with pytest.raises(ValueError):
        OracleSpec(4, layout)


def test_phase_oracle_flips_only_matching_distance():
    layout = RegisterLayout(3)
    for delta in range(4):
        circuit = phase_oracle(OracleSpec(delta, layout))
        for idx in (0, 1, 5, 64, 85, 170, 255):
            state = apply_circuit(basis_state(layout.total, idx), circuit)
            _, _, dist = layout.split_index(idx)
            sign = -1.0 if dist == delta else 1.0
            assert np.isclose(state.amplitudes[idx], sign), (delta, idx)


def test_zero_reflection_signs():
    circuit = zero_reflection(3)
    for idx in range(8):
        state = apply_circuit(basis_state(3, idx), circuit)
        sign = -1.0 if idx == 0 else 1.0
        assert np.isclose(state.amplitudes[idx], sign)


def test_diffusion_reflects_about_prepared_state():
    db = Database(3, ("101", "010", "000"))
    layout = RegisterLayout(3)
    prep = initialisation_unitary(exact_loader(db), TargetSequence("110"), layout)
    psi = run_circuit(prep).amplitudes
    reflected = apply_circuit(Statevector(layout.total, psi), diffusion(prep))
    # the prepared state itself is a -1 eigenvector of the reflection
    assert np.allclose(reflected.amplitudes, -psi, atol=1e-10)
    # anything orthogonal to it keeps its sign
    rng = np.random.default_rng(2)
    v = rng.normal(size=psi.size) + 1j * rng.normal(size=psi.size)
    v -= np.vdot(psi, v) * psi
    v /= np.linalg.norm(v)
    out = apply_circuit(Statevector(layout.total, v), diffusion(prep))
    assert np.allclose(out.amplitudes, v, atol=1e-10)


def test_grover_layer_width_check():
    layout = RegisterLayout(3)
    with pytest.raises(ValueError):
        grover_layer(Circuit(4, ()), OracleSpec(0, layout))


def test_search_circuit_zero_layers_is_preparation():
    db = Database(3, ("101", "010"))
    layout = RegisterLayout(3)
    prep = initialisation_unitary(exact_loader(db), TargetSequence("111"), layout)
    circuit = search_circuit(prep, OracleSpec(1, layout), 0)
    assert np.allclose(run_circuit(circuit).amplitudes, run_circuit(prep).amplitudes)


def test_success_probability_known_values():
    # theta = pi/6 for c/N = 1/4, so one layer reaches certainty
    assert np.isclose(success_probability(1, 4, 1), 1.0)
    # zero layers is the bare chance c/N
    assert np.isclose(success_probability(0, 10, 3), 0.3)
    # c = N stays at certainty regardless of layers
    for p in range(4):
        assert np.isclose(success_probability(p, 5, 5), 1.0)
    # the balanced ratio is stationary at one half
    for p in range(6):
        assert np.isclose(success_probability(p, 4, 2), 0.5)
    with pytest.raises(ValueError):
        success_probability(1, 4, 0)
    with pytest.raises(ValueError):
        success_probability(1, 4, 5)
    with pytest.raises(ValueError):
        success_probability(-1, 4, 1)


def test_optimal_layers_formula():
    assert optimal_layers(2, 1) == 2
    assert optimal_layers(4, 1) == 2
    assert optimal_layers(7, 1) == 3
    assert optimal_layers(64, 1) == 7
    assert optimal_layers(5, 5) == 1


def test_best_integer_layers_frozen_cases():
    cases = {
        (7, 1): 2,
        (4, 1): 1,
        (6, 1): 1,
        (10, 1): 2,
        (16, 1): 3,
        (3, 2): 2,
        (2, 1): 0,   # balanced ratio: every layer count gives 1/2
        (4, 2): 0,
        (6, 3): 0,
        (5, 5): 0,   # already certain
        (4, 3): 0,   # odd layer counts hit exactly zero
    }
    for (size, matches), expected in cases.items():
        assert best_integer_layers(size, matches) == expected, (size, matches)


def test_best_integer_quality_bounds():
    # the chosen count never loses to zero or one layer, and for sparse
    # matches it reaches the standard first-peak guarantee 1 - c/N
    for size in range(2, 21):
        for matches in range(1, size + 1):
            top = success_probability(best_integer_layers(size, matches), size, matches)
            assert top + 1e-9 >= success_probability(0, size, matches)
            assert top + 1e-9 >= success_probability(1, size, matches)
            assert top + 1e-9 >= 1 - matches / size


def test_make_plan_policies():
    plan = make_plan(7, 1, "paper_ceil")
    assert plan.layers == 3
    assert np.isclose(plan.theta, math.asin(math.sqrt(1 / 7)))
    # the plan never drops below one layer, so at the alternating ratio
    # c/N = 3/4 it must pick an even layer count rather than a zero-success one
    plan = make_plan(4, 3, "best_integer")
    assert plan.layers == 2
    assert np.isclose(success_probability(plan.layers, 4, 3), 0.75)
    with pytest.raises(ValueError):
        make_plan(4, 1, "greedy")
    with pytest.raises(ValueError):
        GroverPlan(4, 1, 0, 0.5)
    with pytest.raises(ValueError):
        GroverPlan(4, 5, 1, 0.5)


def test_marked_probability_hand_state():
    layout = RegisterLayout(3)
    amps = np.zeros(1 << layout.total, dtype=complex)
    amps[layout.pack_index(0b101, 0b010, 1)] = math.sqrt(0.25)
    amps[layout.pack_index(0b010, 0b101, 2)] = math.sqrt(0.75)
    state = Statevector(layout.total, amps)
    assert np.isclose(marked_probability(state, layout, 1), 0.25)
    assert np.isclose(marked_probability(state, layout, 2), 0.75)
    assert np.isclose(marked_probability(state, layout, 0), 0.0)


def test_layers_track_closed_form():
    # simulated marked probability equals sin^2((2p+1) asin(sqrt(c/N)))
    rng = np.random.default_rng(23)
    layout = RegisterLayout(3)
    for _ in range(5):
        values = rng.choice(8, size=3, replace=False)
        db = Database(3, tuple(format(int(v), "03b") for v in values))
        target = format(int(rng.integers(8)), "03b")
        counts = [
            sum(1 for e in db.entries if hamming(e, target) == d) for d in range(4)
        ]
        delta = next(d for d in range(4) if counts[d])
        prep = initialisation_unitary(exact_loader(db), TargetSequence(target), layout)
        spec = OracleSpec(delta, layout)
        state = run_circuit(prep)
        layer = grover_layer(prep, spec)
        for p in range(6):
            predicted = success_probability(p, 3, counts[delta])
            assert np.isclose(marked_probability(state, layout, delta), predicted, atol=1e-9)
            state = apply_circuit(state, layer)


def test_seven_entry_periodicity():
    # one match in seven entries: layer counts 1 and 2 are near-optimal,
    # 3 and 4 sink, and the pattern repeats with period four
    probs = [success_probability(p, 7, 1) for p in range(9)]
    assert probs[1] > 0.8 and probs[2] > 0.8
    assert probs[3] < 0.25 and probs[4] < 0.25
    for p in range(1, 5):
        assert abs(probs[p] - probs[p + 4]) < 0.06
