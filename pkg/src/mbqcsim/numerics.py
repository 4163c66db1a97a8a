"""Dense complex linear algebra on small qubit registers.

Basis convention used throughout the package: qubit 0 is the MOST
SIGNIFICANT bit of the basis index.  For a 2-qubit register the
amplitude order is |00>, |01>, |10>, |11>, and ``basis_state("10")``
is the vector with a 1 at index 2.

Everything here is straightforward dense arithmetic on complex128
arrays; registers stay small (a handful of qubits plus gadget
ancillas), so no sparse or compiled machinery is involved.
"""

from __future__ import annotations

import numpy as np

#: default tolerance for state equality / normalization checks
STATE_TOL = 1e-9
#: default tolerance for unitarity checks
UNITARY_TOL = 1e-9


class StateVector:
    """Normalized amplitude vector over ``num_qubits`` qubits.

    A 0-qubit state is the scalar 1 and acts as the identity for
    :func:`tensor`.  Instances are treated as immutable: every
    operation returns a fresh state.

    Args:
        num_qubits: number of qubits, >= 0.
        amplitudes: length ``2**num_qubits`` complex sequence.
        normalize: rescale to unit norm instead of requiring it.

    Raises:
        ValueError: wrong length, or norm not 1 within ``STATE_TOL``
            (when ``normalize`` is false), or zero vector.
    """

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits, amplitudes, *, normalize=False):
        if num_qubits < 0:
            raise ValueError(f"num_qubits must be nonnegative, got {num_qubits}")
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**num_qubits:
            raise ValueError(
                f"amplitude count {amps.size} does not match "
                f"2**{num_qubits} = {2**num_qubits}"
            )
        nrm = float(np.linalg.norm(amps))
        if normalize:
            if nrm < 1e-12:
                raise ValueError("cannot normalize a zero vector")
            amps = amps / nrm
        elif abs(nrm - 1.0) > STATE_TOL:
            raise ValueError(f"state vector is not normalized: norm = {nrm!r}")
        # shared freely (basis caches hand out the same instance), so
        # the buffer must not be writable through this handle
        amps.setflags(write=False)
        object.__setattr__(self, "num_qubits", num_qubits)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @property
    def dim(self):
        return self.amplitudes.size

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits})"


def basis_state(bits):
    """Computational basis state from a bitstring, e.g. ``"01"``.

    Bit i of the string is the value of qubit i (qubit 0 first, i.e.
    most significant).
    """
    if not all(b in "01" for b in bits):
        raise ValueError(f"bitstring may contain only 0 and 1, got {bits!r}")
    n = len(bits)
    amps = np.zeros(2**n, dtype=complex)
    amps[int(bits, 2) if n else 0] = 1.0
    return StateVector(n, amps)


def tensor(a, b):
    """Tensor product; ``a``'s qubits come first (more significant)."""
    return StateVector(
        a.num_qubits + b.num_qubits, np.kron(a.amplitudes, b.amplitudes)
    )


def _check_targets(num_qubits, targets):
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits: {targets}")
    for t in targets:
        if not 0 <= t < num_qubits:
            raise ValueError(
                f"target qubit {t} out of range for {num_qubits}-qubit register"
            )
    return targets


def apply_unitary(u, s, targets):
    """Apply a ``2**k x 2**k`` matrix to the ordered ``targets`` of ``s``.

    ``targets[0]`` is the most significant qubit of the matrix's own
    index space.  Returns a new StateVector; dimension mismatches and
    bad targets raise ValueError.
    """
    u = np.asarray(u, dtype=complex)
    targets = _check_targets(s.num_qubits, targets)
    k = len(targets)
    if u.shape != (2**k, 2**k):
        raise ValueError(
            f"matrix shape {u.shape} does not act on {k} qubit(s)"
        )
    n = s.num_qubits
    psi = s.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, targets, range(k))
    psi = u @ psi.reshape(2**k, -1)
    psi = np.moveaxis(psi.reshape((2,) * n), range(k), targets)
    return StateVector(n, psi.reshape(-1))


def inner_product(a, b):
    """``<a|b>`` with conjugation applied to ``a``."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(
            f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def overlap(a, b):
    """``|<a|b>|``, the fidelity between two pure states."""
    return abs(inner_product(a, b))


def equal_up_to_global_phase(a, b, tol=STATE_TOL):
    """True when the states differ only by a global phase.

    Test: ``|<a|b>| >= 1 - tol``.
    """
    return overlap(a, b) >= 1.0 - tol


def require_unitary(u, tol=UNITARY_TOL):
    """Validate unitarity and return the matrix as complex128.

    Raises ValueError when ``u`` is not square or ``u u† != I``
    within ``tol``.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    dev = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if dev > tol:
        raise ValueError(f"matrix is not unitary: deviation {dev:.3e}")
    return u


def embed_unitary(u, num_qubits, targets):
    """Expand a k-qubit matrix to the full ``2**num_qubits`` register."""
    u = np.asarray(u, dtype=complex)
    targets = _check_targets(num_qubits, targets)
    k = len(targets)
    if u.shape != (2**k, 2**k):
        raise ValueError(f"matrix shape {u.shape} does not act on {k} qubit(s)")
    dim = 2**num_qubits
    # columns of the embedded matrix are the images of basis states
    m = np.eye(dim, dtype=complex).reshape((2,) * num_qubits + (dim,))
    m = np.moveaxis(m, targets, range(k))
    m = u @ m.reshape(2**k, -1)
    m = np.moveaxis(m.reshape((2,) * num_qubits + (dim,)), range(k), targets)
    return m.reshape(dim, dim)


def reorder_qubits(s, perm):
    """Permute qubit wires: new qubit i is old qubit ``perm[i]``."""
    n = s.num_qubits
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm must be a permutation of 0..{n - 1}, got {perm}")
    psi = s.amplitudes.reshape((2,) * n)
    return StateVector(n, np.transpose(psi, perm).reshape(-1))


def factor_out(s, dead, tol=STATE_TOL):
    """Remove qubits that are in a pure state unentangled with the rest.

    Returns the state of the remaining qubits, in their original
    relative order.  Raises ValueError when the ``dead`` qubits are
    still entangled with the keep set (an ancilla leak), detected by a
    rank-1 residual check.
    """
    dead = sorted(set(dead))
    _check_targets(s.num_qubits, dead)
    keep = [q for q in range(s.num_qubits) if q not in dead]
    n = s.num_qubits
    psi = s.amplitudes.reshape((2,) * n)
    mat = np.transpose(psi, dead + keep).reshape(2 ** len(dead), -1)
    norms2 = np.einsum("ij,ij->i", mat, mat.conj()).real
    row = int(np.argmax(norms2))
    if norms2[row] < 1e-12:
        raise ValueError("cannot factor out qubits from a zero vector")
    live = mat[row] / np.sqrt(norms2[row])
    coeffs = mat @ live.conj()
    residual = float(np.linalg.norm(mat - np.outer(coeffs, live)))
    if residual > tol:
        raise ValueError(
            f"qubits {dead} remain entangled with the register "
            f"(rank-1 residual {residual:.3e})"
        )
    return StateVector(len(keep), live, normalize=True)


def random_state(num_qubits, gen):
    """Haar-like random pure state: normalized i.i.d. Gaussian components."""
    dim = 2**num_qubits
    amps = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return StateVector(num_qubits, amps, normalize=True)


def haar_unitary(dim, gen):
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
