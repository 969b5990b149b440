import numpy as np
import pytest

from aqgan.ansatz import (
    DiscriminatorSpec,
    GeneratorSpec,
    build_discriminator,
    build_generator,
)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 3), (5, 2), (7, 9)])
def test_generator_parameter_count_formula(n, k):
    spec = GeneratorSpec(n, k)
    circ = build_generator(spec)
    assert spec.n_parameters == (k + 1) * n
    assert circ.n_parameters == (k + 1) * n


@pytest.mark.parametrize("n,k", [(2, 1), (3, 2), (7, 3)])
def test_discriminator_parameter_count_formula(n, k):
    spec = DiscriminatorSpec(n, k)
    circ = build_discriminator(spec)
    assert spec.n_parameters == 3 * (k * n + 1)
    assert circ.n_parameters == 3 * (k * n + 1)


def test_generator_structure_small():
    circ = build_generator(GeneratorSpec(2, 1))
    kinds = [g.kind for g in circ.gates]
    # H wall, RY layer, entangler, final RY layer; n=2 has a single CZ
    assert kinds == ["H", "H", "RY", "RY", "CZ", "RY", "RY"]


def test_entangler_ring_closes_only_for_three_plus_qubits():
    two = build_generator(GeneratorSpec(2, 1))
    assert sum(g.kind == "CZ" for g in two.gates) == 1
    three = build_generator(GeneratorSpec(3, 1))
    cz = [g.qubits for g in three.gates if g.kind == "CZ"]
    assert cz == [(0, 1), (1, 2), (2, 0)]


def test_discriminator_ends_with_three_rotations_on_last_qubit():
    circ = build_discriminator(DiscriminatorSpec(3, 2))
    tail = circ.gates[-3:]
    assert [g.kind for g in tail] == ["RX", "RY", "RZ"]
    assert all(g.qubits == (2,) for g in tail)


def test_discriminator_has_cnot_fan_in():
    circ = build_discriminator(DiscriminatorSpec(4, 1))
    cnots = [g.qubits for g in circ.gates if g.kind == "CNOT"]
    assert len(cnots) == 3
    assert all(t == 3 for _, t in cnots)


def test_prefixed_slots_do_not_collide():
    gen = build_generator(GeneratorSpec(3, 1), prefix="G.")
    disc = build_discriminator(DiscriminatorSpec(3, 1), prefix="D.")
    composed = gen.compose(disc)
    assert composed.n_parameters == gen.n_parameters + disc.n_parameters
    assert all(s.startswith("G.") for s in gen.parameter_slots)
    assert all(s.startswith("D.") for s in disc.parameter_slots)


def test_specs_validate():
    with pytest.raises(ValueError):
        GeneratorSpec(0, 1)
    with pytest.raises(ValueError):
        GeneratorSpec(2, -1)
    with pytest.raises(ValueError):
        DiscriminatorSpec(2, 0)


def test_each_slot_feeds_exactly_one_gate():
    circ = build_generator(GeneratorSpec(4, 2))
    for i in range(circ.n_parameters):
        assert len(circ.gates_for_slot(i)) == 1


def test_generator_at_zero_parameters_is_uniform_superposition():
    circ = build_generator(GeneratorSpec(3, 1))
    state = circ.run(np.zeros(circ.n_parameters))
    # all-zero angles leave only the H wall and CZs: uniform magnitudes
    np.testing.assert_allclose(np.abs(state.amplitudes),
                               np.full(8, 1 / np.sqrt(8)), atol=1e-12)
