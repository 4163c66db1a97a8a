"""Circuit description, text format, and the direct-unitary oracle.

The text format (extension ``.mbqc``) is line oriented:

    qubits 2        header, required first statement
    H 0             Hadamard on qubit 0
    T 1             T gate on qubit 1
    CNOT 0 1        controlled NOT, control 0, target 1
    # comment       '#' starts a comment, full line or trailing

Gate names are case insensitive.  Gates apply top to bottom; the
circuit's unitary is the right-to-left product G_l ... G_1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import StateVector, apply_unitary, embed_unitary

SQRT2 = np.sqrt(2.0)

H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
T_MATRIX = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

GATE_MATRICES = {"H": H_MATRIX, "T": T_MATRIX, "CNOT": CNOT_MATRIX}
GATE_ARITY = {"H": 1, "T": 1, "CNOT": 2}


class CircuitParseError(ValueError):
    """Parse failure; the message always names the offending line."""

    def __init__(self, message, line):
        super().__init__(f"{message} at line {line}")
        self.line = line


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        if len(qubits) != GATE_ARITY[self.kind]:
            raise ValueError(
                f"{self.kind} takes {GATE_ARITY[self.kind]} qubit(s), "
                f"got {qubits}"
            )
        if self.kind == "CNOT" and qubits[0] == qubits[1]:
            raise ValueError("control equals target")
        object.__setattr__(self, "qubits", qubits)

    def render(self):
        return " ".join([self.kind, *map(str, self.qubits)])


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple

    def __post_init__(self):
        if self.num_qubits < 0:
            raise ValueError("num_qubits must be nonnegative")
        gates = tuple(self.gates)
        for g in gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(
                        f"gate {g.render()} out of range for "
                        f"{self.num_qubits} qubit(s)"
                    )
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)


def parse_circuit(text):
    """Parse circuit text; raises CircuitParseError with a line number."""
    num_qubits = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        head = fields[0].upper()
        if num_qubits is None:
            if head != "QUBITS":
                raise CircuitParseError(
                    "expected 'qubits <n>' header before gates", lineno
                )
            if len(fields) != 2:
                raise CircuitParseError("malformed qubits header", lineno)
            try:
                num_qubits = int(fields[1])
            except ValueError:
                raise CircuitParseError(
                    f"invalid qubit count {fields[1]!r}", lineno
                ) from None
            if num_qubits < 0:
                raise CircuitParseError("qubit count must be nonnegative", lineno)
            continue
        if head == "QUBITS":
            raise CircuitParseError("duplicate qubits header", lineno)
        if head not in GATE_ARITY:
            raise CircuitParseError(f"unknown gate {fields[0]!r}", lineno)
        args = fields[1:]
        if len(args) != GATE_ARITY[head]:
            raise CircuitParseError(
                f"{head} takes {GATE_ARITY[head]} qubit argument(s)", lineno
            )
        try:
            qubits = tuple(int(a) for a in args)
        except ValueError:
            raise CircuitParseError(
                f"invalid qubit index in {line!r}", lineno
            ) from None
        for q in qubits:
            if not 0 <= q < num_qubits:
                raise CircuitParseError(f"qubit {q} out of range", lineno)
        if head == "CNOT" and qubits[0] == qubits[1]:
            raise CircuitParseError("control equals target", lineno)
        gates.append(Gate(head, qubits))
    if num_qubits is None:
        raise CircuitParseError("missing 'qubits <n>' header", 1)
    return Circuit(num_qubits, tuple(gates))


def render_circuit(c):
    """Canonical text form; parse(render(c)) round-trips."""
    lines = [f"qubits {c.num_qubits}"]
    lines.extend(g.render() for g in c.gates)
    return "\n".join(lines) + "\n"


def oracle_apply(c, s):
    """Apply the circuit directly as matrices: the reference evolution."""
    if s.num_qubits != c.num_qubits:
        raise ValueError(
            f"state has {s.num_qubits} qubit(s), circuit needs {c.num_qubits}"
        )
    out = s
    for g in c.gates:
        out = apply_unitary(GATE_MATRICES[g.kind], out, g.qubits)
    return out


def circuit_unitary(c, max_qubits=6):
    """Dense unitary of the whole circuit (right-to-left product)."""
    if c.num_qubits > max_qubits:
        raise ValueError(
            f"register too large: {c.num_qubits} qubits (limit {max_qubits})"
        )
    u = np.eye(2**c.num_qubits, dtype=complex)
    for g in c.gates:
        u = embed_unitary(GATE_MATRICES[g.kind], c.num_qubits, g.qubits) @ u
    return u
