"""Pauli operators with exact phase bookkeeping.

Operators are words of single-qubit letters {I, X, Y, Z} times a
phase i^k, k in {0, 1, 2, 3}.  All products and Clifford conjugations
here are exact integer bookkeeping; no floating tolerance is needed
until a matrix is materialized.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .numerics import _check_targets


class PauliLetter(enum.IntEnum):
    I = 0
    X = 1
    Y = 2
    Z = 3

    @classmethod
    def from_char(cls, c):
        try:
            return cls[c.upper()]
        except KeyError:
            raise ValueError(f"unknown Pauli letter {c!r}") from None


_L = PauliLetter

_LETTER_MATRICES = {
    _L.I: np.array([[1, 0], [0, 1]], dtype=complex),
    _L.X: np.array([[0, 1], [1, 0]], dtype=complex),
    _L.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    _L.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}

#: i^k for k = 0..3, exact
PHASES = (1 + 0j, 1j, -1 + 0j, -1j)

# single-letter products: (a, b) -> (letter, phase exponent delta)
# XY = iZ, YZ = iX, ZX = iY and anticommuted partners with -i.
_MUL = {
    (_L.I, _L.I): (_L.I, 0),
    (_L.I, _L.X): (_L.X, 0),
    (_L.I, _L.Y): (_L.Y, 0),
    (_L.I, _L.Z): (_L.Z, 0),
    (_L.X, _L.I): (_L.X, 0),
    (_L.Y, _L.I): (_L.Y, 0),
    (_L.Z, _L.I): (_L.Z, 0),
    (_L.X, _L.X): (_L.I, 0),
    (_L.Y, _L.Y): (_L.I, 0),
    (_L.Z, _L.Z): (_L.I, 0),
    (_L.X, _L.Y): (_L.Z, 1),
    (_L.Y, _L.X): (_L.Z, 3),
    (_L.Y, _L.Z): (_L.X, 1),
    (_L.Z, _L.Y): (_L.X, 3),
    (_L.Z, _L.X): (_L.Y, 1),
    (_L.X, _L.Z): (_L.Y, 3),
}


def letter_matrix(letter):
    """2x2 matrix of a single letter (copy; entries in {0, +-1, +-i})."""
    return _LETTER_MATRICES[PauliLetter(letter)].copy()


@dataclass(frozen=True)
class PauliOperator:
    """i^phase_exp times a tensor word of letters, one per qubit."""

    phase_exp: int
    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)
        object.__setattr__(
            self, "letters", tuple(PauliLetter(l) for l in self.letters)
        )

    @classmethod
    def identity(cls, num_qubits):
        return cls(0, (_L.I,) * num_qubits)

    @classmethod
    def single(cls, num_qubits, qubit, letter, phase_exp=0):
        """Embed one letter at ``qubit``, identity elsewhere."""
        letters = [_L.I] * num_qubits
        letters[qubit] = PauliLetter(letter)
        return cls(phase_exp, tuple(letters))

    @property
    def num_qubits(self):
        return len(self.letters)

    @property
    def phase(self):
        return PHASES[self.phase_exp]

    def is_identity_word(self):
        """True when every letter is I (phase ignored)."""
        return all(l is _L.I for l in self.letters)

    def matrix(self):
        m = np.ones((1, 1), dtype=complex)
        for l in self.letters:
            m = np.kron(m, _LETTER_MATRICES[l])
        return PHASES[self.phase_exp] * m

    def with_letter(self, qubit, letter):
        letters = list(self.letters)
        letters[qubit] = PauliLetter(letter)
        return PauliOperator(self.phase_exp, tuple(letters))

    def __str__(self):
        return render_pauli(self)


def render_letters(letters):
    return "⊗".join(PauliLetter(l).name for l in letters)


def render_pauli(p):
    """Text form like ``i^1 . X(x)I(x)Z`` (with real tensor glyphs)."""
    return f"i^{p.phase_exp} · {render_letters(p.letters)}"


def multiply(p, q):
    """Exact product of two operators on the same register."""
    if p.num_qubits != q.num_qubits:
        raise ValueError(
            f"qubit count mismatch: {p.num_qubits} vs {q.num_qubits}"
        )
    phase = p.phase_exp + q.phase_exp
    letters = []
    for a, b in zip(p.letters, q.letters):
        c, d = _MUL[(a, b)]
        letters.append(c)
        phase += d
    return PauliOperator(phase, tuple(letters))


# H sigma H: X <-> Z, Y -> -Y.
_H_IMAGE = {
    _L.I: (_L.I, 0),
    _L.X: (_L.Z, 0),
    _L.Y: (_L.Y, 2),
    _L.Z: (_L.X, 0),
}


def conjugate_through_H(p, qubit):
    """H_q p H_q as exact letter bookkeeping."""
    _check_targets(p.num_qubits, [qubit])
    new, delta = _H_IMAGE[p.letters[qubit]]
    return PauliOperator(
        p.phase_exp + delta,
        tuple(new if i == qubit else l for i, l in enumerate(p.letters)),
    )


# CNOT conjugation images of the generator letters, written as the
# exact 2-letter word (control slot, target slot); all are phase free.
_CNOT_CONTROL_IMAGE = {
    _L.I: (_L.I, _L.I),
    _L.X: (_L.X, _L.X),
    _L.Y: (_L.Y, _L.X),
    _L.Z: (_L.Z, _L.I),
}
_CNOT_TARGET_IMAGE = {
    _L.I: (_L.I, _L.I),
    _L.X: (_L.I, _L.X),
    _L.Y: (_L.Z, _L.Y),
    _L.Z: (_L.Z, _L.Z),
}


def conjugate_through_CNOT(p, control, target):
    """CNOT p CNOT with control/target at the given qubits, exact.

    Split the 2-qubit part as (L_c (x) I)(I (x) L_t), push each factor
    through (the generator images above are phase free), and multiply
    the images back together; any phase comes from that product.
    """
    _check_targets(p.num_qubits, [control, target])
    img_c = PauliOperator(0, _CNOT_CONTROL_IMAGE[p.letters[control]])
    img_t = PauliOperator(0, _CNOT_TARGET_IMAGE[p.letters[target]])
    combined = multiply(img_c, img_t)
    letters = list(p.letters)
    letters[control] = combined.letters[0]
    letters[target] = combined.letters[1]
    return PauliOperator(p.phase_exp + combined.phase_exp, tuple(letters))


def as_pauli(u, tol=1e-9):
    """Recognize ``u`` as i^k times a letter word, or return None.

    The matrix of an n-qubit Pauli has one nonzero entry per column,
    at row = column XOR flipmask.  The candidate word is read off from
    the flip mask (X component) and the sign pattern (Z component),
    then confirmed entrywise within ``tol``.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return None
    dim = u.shape[0]
    n = dim.bit_length() - 1
    if dim != 2**n:
        return None
    col0 = u[:, 0]
    flip = int(np.argmax(np.abs(col0)))
    anchor = col0[flip]
    if abs(anchor) < 0.5:
        return None
    letters = []
    for q in range(n):
        bit = 1 << (n - 1 - q)
        x = 1 if flip & bit else 0
        other = u[flip ^ bit, bit]
        # ratio of companion entry decides the Z component
        ratio = other / anchor
        if abs(ratio - 1.0) <= 0.5:
            z = 0
        elif abs(ratio + 1.0) <= 0.5:
            z = 1
        else:
            return None
        letters.append((_L.I, _L.X, _L.Z, _L.Y)[x + 2 * z])
    base = PauliOperator(0, tuple(letters)).matrix()
    for k in range(4):
        if np.max(np.abs(u - PHASES[k] * base)) <= tol:
            return PauliOperator(k, tuple(letters))
    return None


@dataclass(frozen=True)
class SignedPauliObservable:
    """Two-qubit observable ``sign * (letters[0] (x) letters[1])``.

    The first letter acts on ``targets[0]``.  Measurement outcomes are
    eigenvalues of the signed operator, so -Z(x)Z on |00> reports -1.
    """

    sign: int
    letters: tuple
    targets: tuple = (0, 1)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        letters = tuple(PauliLetter(l) for l in self.letters)
        if len(letters) != 2:
            raise ValueError("observable needs exactly two letters")
        if letters == (_L.I, _L.I):
            raise ValueError("observable letters must not both be identity")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "targets", tuple(self.targets))

    def retargeted(self, targets):
        return replace(self, targets=tuple(targets))

    def __str__(self):
        sign = "+" if self.sign > 0 else "-"
        return f"{sign}{render_letters(self.letters)}"


def observable_matrix(o):
    """4x4 matrix of a signed observable (squares to the identity)."""
    return o.sign * np.kron(
        _LETTER_MATRICES[o.letters[0]], _LETTER_MATRICES[o.letters[1]]
    )


def apply_pauli(p, s):
    """Apply an operator's letters to a state, qubit by qubit.

    The i^k phase is NOT applied; callers compare up to global phase.
    """
    from .numerics import apply_unitary

    if p.num_qubits != s.num_qubits:
        raise ValueError(
            f"qubit count mismatch: {p.num_qubits} vs {s.num_qubits}"
        )
    out = s
    for q, l in enumerate(p.letters):
        if l is not _L.I:
            out = apply_unitary(_LETTER_MATRICES[l], out, [q])
    return out
