"""Dense n-qubit linear algebra on density matrices.

Qubit 0 is the most significant bit of the basis index, matching ``np.kron``
ordering. All helpers return new arrays and never mutate their inputs.
"""
import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULIS = (I2, X, Y, Z)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PROJ0 = np.outer(KET0, KET0.conj())
PROJ1 = np.outer(KET1, KET1.conj())

# Control on the first qubit of the pair.
CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]],
    dtype=complex,
)


def n_qubits(rho: np.ndarray) -> int:
    """Number of qubits of a square 2^n matrix."""
    dim = rho.shape[0]
    n = int(round(np.log2(dim)))
    if 2 ** n != dim or rho.shape != (dim, dim):
        raise ValueError(f"Expected a square 2^n matrix, got shape {rho.shape}")
    return n


def expand_operator(op: np.ndarray, targets: list[int] | tuple[int, ...], n: int) -> np.ndarray:
    """Lift a k-qubit operator on ``targets`` to the full n-qubit space."""
    targets = list(targets)
    k = len(targets)
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError(f"Operator shape {op.shape} does not match {k} target qubits")
    rest = [q for q in range(n) if q not in targets]
    full = np.kron(op, np.eye(2 ** (n - k), dtype=complex))
    inverse = list(np.argsort(targets + rest))
    full = full.reshape([2] * (2 * n)).transpose(inverse + [n + i for i in inverse])
    return full.reshape(2 ** n, 2 ** n)


def conjugate(rho: np.ndarray, op: np.ndarray) -> np.ndarray:
    """op · rho · op†."""
    return op @ rho @ op.conj().T


def apply_unitary(rho: np.ndarray, op: np.ndarray, targets: list[int] | tuple[int, ...]) -> np.ndarray:
    """Conjugate rho by ``op`` acting on ``targets``."""
    return conjugate(rho, expand_operator(op, targets, n_qubits(rho)))


def partial_trace(rho: np.ndarray, keep: list[int] | tuple[int, ...]) -> np.ndarray:
    """Trace out every qubit not listed in ``keep`` (kept qubits stay in order)."""
    n = n_qubits(rho)
    keep = sorted(keep)
    tensor = rho.reshape([2] * (2 * n))
    remaining = n
    for q in sorted(set(range(n)) - set(keep), reverse=True):
        tensor = np.trace(tensor, axis1=q, axis2=q + remaining)
        remaining -= 1
    dim = 2 ** len(keep)
    return tensor.reshape(dim, dim)


def twirl_qubit(rho: np.ndarray, target: int) -> np.ndarray:
    """Replace the target qubit by I/2: tr_target(rho) ⊗ I/2 in place of that qubit."""
    n = n_qubits(rho)
    total = np.zeros_like(rho)
    for pauli in PAULIS:
        total = total + conjugate(rho, expand_operator(pauli, [target], n))
    return total / 4


def ket_to_density(ket: np.ndarray) -> np.ndarray:
    """|ψ⟩⟨ψ| of a (not necessarily normalized) ket."""
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    return np.outer(ket, ket.conj())


def basis_ket(bits: tuple[int, ...] | list[int]) -> np.ndarray:
    """Computational basis ket for a bit string, qubit 0 first."""
    index = 0
    for bit in bits:
        index = (index << 1) | int(bit)
    ket = np.zeros(2 ** len(bits), dtype=complex)
    ket[index] = 1.0
    return ket


def min_eigenvalue(rho: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part."""
    return float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())


def hermiticity_error(rho: np.ndarray) -> float:
    return float(np.max(np.abs(rho - rho.conj().T)))


def operator_norm(op: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(op, ord=2))
