"""Exact Pauli algebra against dense-matrix oracles."""

import numpy as np
import pytest

from mbqcsim.circuit import CNOT_MATRIX, H_MATRIX, T_MATRIX
from mbqcsim.numerics import basis_state, random_state
from mbqcsim.pauli import (
    PHASES,
    PauliLetter,
    PauliOperator,
    SignedPauliObservable,
    apply_pauli,
    as_pauli,
    conjugate_through_CNOT,
    conjugate_through_H,
    letter_matrix,
    multiply,
    observable_matrix,
)

L = PauliLetter
LETTERS = (L.I, L.X, L.Y, L.Z)


def test_from_char():
    assert PauliLetter.from_char("x") is L.X
    assert PauliLetter.from_char("I") is L.I
    with pytest.raises(ValueError, match="unknown Pauli letter"):
        PauliLetter.from_char("Q")


def test_letter_matrices_frozen():
    assert np.array_equal(letter_matrix(L.I), np.eye(2))
    assert np.array_equal(letter_matrix(L.X), [[0, 1], [1, 0]])
    assert np.array_equal(letter_matrix(L.Y), [[0, -1j], [1j, 0]])
    assert np.array_equal(letter_matrix(L.Z), [[1, 0], [0, -1]])


def test_phases_are_powers_of_i():
    assert PHASES == (1, 1j, -1, -1j)


def test_operator_constructors():
    p = PauliOperator.identity(3)
    assert p.is_identity_word and p.phase_exp == 0
    q = PauliOperator.single(3, 1, L.Y, phase_exp=2)
    assert q.letters == (L.I, L.Y, L.I)
    assert q.phase == -1
    assert q.with_letter(2, L.Z).letters == (L.I, L.Y, L.Z)


def test_operator_matrix_kron_order():
    # qubit 0 is the left kron factor
    p = PauliOperator(1, (L.X, L.Z))
    expect = 1j * np.kron(letter_matrix(L.X), letter_matrix(L.Z))
    assert np.array_equal(p.matrix(), expect)


def test_multiply_exact_all_single_letter_pairs():
    # every product must match the matrix oracle entry for entry
    for a in LETTERS:
        for b in LETTERS:
            for ka in range(4):
                for kb in range(4):
                    p = PauliOperator(ka, (a,))
                    q = PauliOperator(kb, (b,))
                    prod = multiply(p, q)
                    assert np.array_equal(
                        prod.matrix(), p.matrix() @ q.matrix()
                    ), f"{p} * {q}"


def test_multiply_is_letterwise_on_words():
    gen = np.random.default_rng(17)
    for _ in range(30):
        lp = tuple(L(int(i)) for i in gen.integers(0, 4, size=3))
        lq = tuple(L(int(i)) for i in gen.integers(0, 4, size=3))
        p = PauliOperator(int(gen.integers(0, 4)), lp)
        q = PauliOperator(int(gen.integers(0, 4)), lq)
        assert np.array_equal(multiply(p, q).matrix(), p.matrix() @ q.matrix())


def test_multiply_length_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        multiply(PauliOperator.identity(1), PauliOperator.identity(2))


def test_conjugate_through_h_matches_matrix_oracle():
    for letter in LETTERS:
        for k in range(4):
            p = PauliOperator.single(2, 1, letter, phase_exp=k)
            image = conjugate_through_H(p, 1)
            big_h = np.kron(np.eye(2), H_MATRIX)
            oracle = big_h @ p.matrix() @ big_h.conj().T
            assert np.allclose(image.matrix(), oracle, atol=1e-12), p


def test_conjugate_through_cnot_matches_matrix_oracle():
    # all 16 letter words, all 4 phases, both wire orders
    for a in LETTERS:
        for b in LETTERS:
            for k in range(4):
                p = PauliOperator(k, (a, b))
                image = conjugate_through_CNOT(p, 0, 1)
                oracle = CNOT_MATRIX @ p.matrix() @ CNOT_MATRIX
                assert np.allclose(image.matrix(), oracle, atol=1e-12), p
                flipped = conjugate_through_CNOT(PauliOperator(k, (a, b)), 1, 0)
                rev = np.array(
                    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]],
                    dtype=complex,
                )
                oracle = rev @ p.matrix() @ rev
                assert np.allclose(flipped.matrix(), oracle, atol=1e-12), p


def test_conjugations_preserve_identity():
    p = PauliOperator.identity(2)
    assert conjugate_through_H(p, 0) == p
    assert conjugate_through_CNOT(p, 0, 1) == p


def test_as_pauli_round_trips_every_two_qubit_operator():
    for a in LETTERS:
        for b in LETTERS:
            for k in range(4):
                p = PauliOperator(k, (a, b))
                assert as_pauli(p.matrix()) == p


def test_as_pauli_rejects_non_pauli():
    assert as_pauli(H_MATRIX) is None
    assert as_pauli(T_MATRIX) is None
    assert as_pauli(np.ones((2, 3))) is None
    assert as_pauli(np.zeros((2, 2))) is None


def test_t_conjugation_leaves_the_pauli_group():
    # T X Tdag = (X + Y)/sqrt(2), which is why the T gadget needs the
    # adapted measurement table instead of letter bookkeeping
    witness = T_MATRIX @ letter_matrix(L.X) @ T_MATRIX.conj().T
    expect = (letter_matrix(L.X) + letter_matrix(L.Y)) / np.sqrt(2.0)
    s = 1.0 / np.sqrt(2.0)
    explicit = np.array([[0, s - s * 1j], [s + s * 1j, 0]])
    assert np.max(np.abs(witness - expect)) < 1e-12
    assert np.max(np.abs(witness - explicit)) < 1e-12
    assert as_pauli(witness) is None


def test_t_commutes_with_z_but_not_x():
    t = T_MATRIX
    z = t @ letter_matrix(L.Z) @ t.conj().T
    assert as_pauli(z) == PauliOperator(0, (L.Z,))
    assert as_pauli(t @ letter_matrix(L.X) @ t.conj().T) is None


def test_signed_observable_validation():
    with pytest.raises(ValueError, match="sign"):
        SignedPauliObservable(0, (L.Z, L.Z))
    with pytest.raises(ValueError, match="two letters"):
        SignedPauliObservable(1, (L.Z,))
    with pytest.raises(ValueError, match="identity"):
        SignedPauliObservable(1, (L.I, L.I))


def test_signed_observable_retarget_and_render():
    o = SignedPauliObservable(-1, (L.Z, L.Z))
    assert str(o) == "-Z⊗Z"
    moved = o.retargeted((3, 1))
    assert moved.targets == (3, 1)
    assert moved.letters == o.letters and moved.sign == o.sign


def test_observable_matrix_squares_to_identity():
    for sign in (1, -1):
        for a in LETTERS:
            for b in LETTERS:
                if (a, b) == (L.I, L.I):
                    continue
                m = observable_matrix(SignedPauliObservable(sign, (a, b)))
                assert np.allclose(m @ m, np.eye(4), atol=1e-12)
                assert np.allclose(m, m.conj().T, atol=1e-12)


def test_apply_pauli_ignores_phase():
    s = basis_state("0")
    for k in range(4):
        out = apply_pauli(PauliOperator(k, (L.X,)), s)
        assert np.array_equal(out.amplitudes, basis_state("1").amplitudes)


def test_apply_pauli_matches_letter_matrices():
    gen = np.random.default_rng(23)
    for _ in range(20):
        s = random_state(2, gen)
        letters = tuple(L(int(i)) for i in gen.integers(0, 4, size=2))
        p = PauliOperator(0, letters)
        out = apply_pauli(p, s)
        expect = p.matrix() @ s.amplitudes
        assert np.allclose(out.amplitudes, expect, atol=1e-12)


def test_apply_pauli_length_check():
    with pytest.raises(ValueError, match="mismatch"):
        apply_pauli(PauliOperator.identity(1), basis_state("00"))
