"""Projective measurements, seeded sampling, and branch enumeration.

Two measurement kinds exist:

* :class:`BasisMeasurement`: four orthonormal 2-qubit vectors; the
  outcome is the vector's label and the measured pair collapses onto
  the labeled vector.
* :class:`~mbqcsim.pauli.SignedPauliObservable`: a +-1-valued 2-qubit
  observable; the outcome is the eigenvalue of the signed operator.

``enumerate_branches`` expands a measurement plan into every outcome
word with its exact Born probability and post-state.  It is the
brute-force oracle the test suite checks gadgets and engines against.

Outcome bookkeeping for the Bell basis: measuring +Z(x)Z then +X(x)X
is equivalent to a Bell-basis measurement under the fixed sign-to-label
mapping ``BELL_LABEL_FROM_SIGNS``:

    (+1, +1) -> 0    (-1, +1) -> 1    (-1, -1) -> 2    (+1, -1) -> 3

i.e. the first sign carries the X component of the label's Pauli and
the second sign its Z component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import StateVector, apply_unitary, require_unitary
from .pauli import (
    PauliLetter,
    SignedPauliObservable,
    letter_matrix,
    observable_matrix,
)

#: probability below which a branch is dropped by enumeration
PRUNE_TOL = 1e-12

#: (r1, r2) -> Bell label for the Z(x)Z then X(x)X decomposition
BELL_LABEL_FROM_SIGNS = {(1, 1): 0, (-1, 1): 1, (-1, -1): 2, (1, -1): 3}


class RandomSource:
    """Deterministic random stream from a single 64-bit seed.

    Substreams derive by hashing the seed together with integer
    indices (numpy SeedSequence spawn keys), so trial i of a run is
    reproducible in isolation: ``RandomSource(seed).substream(i)``.
    """

    __slots__ = ("seed", "key", "gen")

    def __init__(self, seed, key=()):
        self.seed = int(seed)
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        self.key = tuple(int(k) for k in key)
        self.gen = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=self.key)
        )

    def substream(self, *indices):
        """Independent stream for (seed, *key, *indices)."""
        return RandomSource(self.seed, self.key + indices)

    def choose(self, probabilities):
        """Sample an index; probabilities need not be exactly normalized."""
        p = np.asarray(probabilities, dtype=float)
        total = float(p.sum())
        if total < PRUNE_TOL:
            raise ValueError(
                "all outcome probabilities vanish; state is corrupted"
            )
        u = self.gen.random() * total
        acc = 0.0
        for i, pi in enumerate(p):
            acc += pi
            if u < acc:
                return i
        return len(p) - 1


def epr_state():
    """(|00> + |11>) / sqrt(2)."""
    return StateVector(2, np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))


@dataclass(frozen=True)
class BasisMeasurement:
    """Measurement of a qubit pair in an orthonormal 4-vector basis."""

    vectors: tuple
    targets: tuple = (0, 1)
    labels: tuple = (0, 1, 2, 3)

    def __post_init__(self):
        vectors = tuple(self.vectors)
        if len(vectors) != 4 or any(v.num_qubits != 2 for v in vectors):
            raise ValueError("need exactly four 2-qubit basis vectors")
        stacked = np.array([v.amplitudes for v in vectors])
        gram = stacked.conj() @ stacked.T
        if np.max(np.abs(gram - np.eye(4))) > 1e-9:
            raise ValueError("basis vectors are not orthonormal")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "labels", tuple(self.labels))

    def retargeted(self, targets):
        return BasisMeasurement(self.vectors, tuple(targets), self.labels)


def u_basis(u, targets=(0, 1)):
    """Basis {(I (x) u sigma_i)|EPR>} for i = 0..3; u must be unitary."""
    u = require_unitary(u)
    # (I (x) A)|EPR> laid out on (row, col) indices is A^T / sqrt(2)
    vectors = tuple(
        StateVector(
            2, (u @ letter_matrix(PauliLetter(i))).T.reshape(-1) / np.sqrt(2.0)
        )
        for i in range(4)
    )
    return BasisMeasurement(vectors, targets)


_BELL_AT_ORIGIN = None


def bell_basis(targets=(0, 1)):
    """Bell basis {(I (x) sigma_n)|EPR>}, the u_basis of the identity."""
    global _BELL_AT_ORIGIN
    if _BELL_AT_ORIGIN is None:
        _BELL_AT_ORIGIN = u_basis(np.eye(2))
    return _BELL_AT_ORIGIN.retargeted(targets)


@dataclass(frozen=True)
class OutcomeBranch:
    """One leaf of a measurement plan: outcome word, probability, state."""

    outcomes: tuple
    probability: float
    post_state: StateVector


def _pair_matrix(s, targets):
    """View the register as a (4, rest) matrix with ``targets`` in front."""
    n = s.num_qubits
    t0, t1 = targets
    rest = [i for i in range(n) if i not in (t0, t1)]
    order = [t0, t1, *rest]
    psi = np.transpose(s.amplitudes.reshape((2,) * n), order)
    inverse = np.argsort(order)
    return psi.reshape(4, -1), inverse, n


def _rebuild(mat, inverse, n):
    psi = np.transpose(mat.reshape((2,) * n), inverse)
    return StateVector(n, psi.reshape(-1), normalize=True)


def measurement_branches(s, m):
    """All outcome branches of a single measurement, exact probabilities.

    Accepts a BasisMeasurement or a SignedPauliObservable; branches
    with probability below ``PRUNE_TOL`` are dropped.  Post-states are
    renormalized; for a basis measurement the measured pair is left in
    the labeled basis vector.
    """
    if isinstance(m, BasisMeasurement):
        mat, inverse, n = _pair_matrix(s, m.targets)
        branches = []
        for label, v in zip(m.labels, m.vectors):
            amp = v.amplitudes.conj() @ mat
            p = float(np.real(np.vdot(amp, amp)))
            if p < PRUNE_TOL:
                continue
            post = np.outer(v.amplitudes, amp / np.sqrt(p))
            branches.append(
                OutcomeBranch((label,), p, _rebuild(post, inverse, n))
            )
        return branches
    if isinstance(m, SignedPauliObservable):
        obs = observable_matrix(m)
        applied = apply_unitary(obs, s, m.targets)
        branches = []
        for sign in (1, -1):
            amp = (s.amplitudes + sign * applied.amplitudes) / 2.0
            p = float(np.real(np.vdot(amp, amp)))
            if p < PRUNE_TOL:
                continue
            branches.append(
                OutcomeBranch(
                    (sign,), p, StateVector(s.num_qubits, amp, normalize=True)
                )
            )
        return branches
    raise TypeError(f"not a measurement: {m!r}")


def measure_basis(s, m, rng):
    """Sample one basis-measurement outcome. Returns (label, post_state)."""
    branches = measurement_branches(s, m)
    idx = rng.choose([b.probability for b in branches])
    b = branches[idx]
    return b.outcomes[0], b.post_state


def measure_observable(s, o, rng):
    """Sample a signed observable. Returns (eigenvalue, post_state)."""
    branches = measurement_branches(s, o)
    idx = rng.choose([b.probability for b in branches])
    b = branches[idx]
    return b.outcomes[0], b.post_state


def enumerate_branches(s, plan, prune=PRUNE_TOL):
    """Expand a measurement plan into all outcome words.

    ``plan`` is a sequence whose items are measurements or callables;
    a callable receives the outcome word so far and returns the next
    measurement, which lets plans adapt to earlier outcomes.  Returns
    OutcomeBranch leaves with joint probabilities; joint probabilities
    of the returned branches sum to 1 up to pruning.
    """
    leaves = []

    def walk(state, word, prob, remaining):
        if not remaining:
            leaves.append(OutcomeBranch(word, prob, state))
            return
        item = remaining[0]
        if callable(item):
            item = item(word)
        for b in measurement_branches(state, item):
            joint = prob * b.probability
            if joint < prune:
                continue
            walk(b.post_state, word + b.outcomes, joint, remaining[1:])

    walk(s, (), 1.0, list(plan))
    return leaves


def sample_plan(s, plan, rng):
    """Sample one path through a plan. Returns (word, state, probability)."""
    word = ()
    prob = 1.0
    state = s
    for item in plan:
        if callable(item):
            item = item(word)
        branches = measurement_branches(state, item)
        idx = rng.choose([b.probability for b in branches])
        b = branches[idx]
        word += b.outcomes
        prob *= b.probability
        state = b.post_state
    return word, state, prob


def computational_distribution(s):
    """Exact computational-basis probabilities, indexed like amplitudes."""
    a = s.amplitudes
    return a.real**2 + a.imag**2
