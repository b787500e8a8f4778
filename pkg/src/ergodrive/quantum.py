"""Dense complex linear algebra for qubits and small Hermitian operators.

Everything downstream (passive states, drives, noisy evolution) is built on
the helpers here: Pauli arithmetic, Bloch-vector conversions, Hermitian
eigendecomposition with a deterministic ordering, closed-form SU(2)
exponentials, and the trace norm.

Matrices are plain ``numpy.ndarray`` objects of dtype complex128; Bloch
vectors and Pauli coefficient vectors are 1-D arrays. Validation helpers
raise ``ValueError`` when an input is outside its physical domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Centralized numerical tolerances. The physics fixes none of these, so they
# are pinned here and surfaced through the package config.
HERM_TOL = 1e-12   # max |A - A^dag| entry for "Hermitian"
PSD_TOL = 1e-10    # eigenvalue floor for "positive semidefinite"
TRACE_TOL = 1e-10  # |tr(rho) - 1| for density operators
UNIT_TOL = 1e-10   # | |v| - 1 | for unit vectors / Bloch norms

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)
for _m in PAULI:
    _m.setflags(write=False)


def as_square_matrix(m, name="matrix"):
    """Coerce to a complex square ndarray, raising on bad shape."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def require_hermitian(a, tol=HERM_TOL, name="operator"):
    """Validate Hermiticity within `tol`; returns the array unchanged."""
    a = as_square_matrix(a, name)
    dev = np.abs(a - a.conj().T).max()
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian: max |A - A^dag| = {dev:.3e} > {tol:.1e}")
    return a


def require_density(rho, name="state"):
    """Validate the density-operator invariants: Hermitian, unit trace, PSD."""
    rho = require_hermitian(rho, name=name)
    tr = rho.trace().real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} trace = {tr!r}, expected 1 within {TRACE_TOL:.1e}")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -PSD_TOL:
        raise ValueError(f"{name} has negative eigenvalue {evals.min():.3e}")
    return rho


def pauli_decompose(m):
    """Expand a 2x2 matrix in the Pauli basis.

    Returns the length-4 complex vector a with a[k] = tr(sigma_k m) / 2, so
    that m = sum_k a[k] sigma_k exactly.
    """
    m = as_square_matrix(m)
    if m.shape != (2, 2):
        raise ValueError(f"Pauli decomposition needs a 2x2 matrix, got {m.shape}")
    return np.array([0.5 * np.trace(s @ m) for s in PAULI])


def pauli_compose(a):
    """Inverse of :func:`pauli_decompose`: sum_k a[k] sigma_k."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (4,):
        raise ValueError(f"expected 4 Pauli coefficients, got shape {a.shape}")
    return sum(c * s for c, s in zip(a, PAULI))


def bloch_from_density(rho):
    """Bloch vector (x, y, z) of a qubit state: x_k = tr(rho sigma_k)."""
    rho = as_square_matrix(rho, "state")
    if rho.shape != (2, 2):
        raise ValueError(f"Bloch vector needs a 2x2 state, got {rho.shape}")
    return np.array([np.trace(rho @ s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


def density_from_bloch(v):
    """Qubit state (I + v . sigma) / 2 for a Bloch vector with |v| <= 1."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"Bloch vector must have 3 components, got shape {v.shape}")
    n = np.linalg.norm(v)
    if n > 1.0 + UNIT_TOL:
        raise ValueError(f"Bloch vector norm {n} > 1: not a physical state")
    return 0.5 * (SIGMA_0 + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and orthonormal eigenvectors of a Hermitian operator.

    ``vectors[:, k]`` is the eigenvector of ``values[k]``; ordering is
    "ascending" or "descending" by eigenvalue.
    """

    values: np.ndarray
    vectors: np.ndarray
    ordering: str

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


def _canonical_phase(vectors):
    # Fix each eigenvector's global phase: largest-magnitude component made
    # real positive. Keeps repeated factorizations reproducible.
    out = vectors.copy()
    for k in range(out.shape[1]):
        v = out[:, k]
        j = np.argmax(np.abs(v))
        ph = v[j] / abs(v[j]) if abs(v[j]) > 0 else 1.0
        out[:, k] = v / ph
    return out


def eig_hermitian(a, ordering="ascending"):
    """Eigendecomposition of a Hermitian matrix with deterministic ordering.

    Ties in the eigenvalues are broken by lexicographic comparison of the
    eigenvector components (real part of the first component, then imaginary
    part, then the second component, ...), so degenerate spectra still yield
    a reproducible decomposition.
    """
    if ordering not in ("ascending", "descending"):
        raise ValueError(f"ordering must be 'ascending' or 'descending', got {ordering!r}")
    a = require_hermitian(a)
    if a.shape[0] > 16:
        raise ValueError(f"dimension {a.shape[0]} exceeds the small-dense limit of 16")
    values, vectors = np.linalg.eigh(a)  # ascending
    vectors = _canonical_phase(vectors)
    # Secondary lexicographic key on eigenvector components for tied values.
    keys = [values]
    for i in range(vectors.shape[0] - 1, -1, -1):
        keys.append(vectors[i].imag)
        keys.append(vectors[i].real)
    order = np.lexsort(tuple(keys))
    values, vectors = values[order], vectors[:, order]
    if ordering == "descending":
        values, vectors = values[::-1], vectors[:, ::-1]
    return SpectralDecomposition(values=values, vectors=vectors, ordering=ordering)


def expm_su2(axis, angle):
    """Rotation exp(-i (angle/2) axis . sigma) via the closed SU(2) formula.

    `angle` is the Bloch-sphere rotation angle about the unit 3-vector
    `axis`; the result is exactly unitary with determinant 1.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise ValueError(f"axis must have 3 components, got shape {axis.shape}")
    n = np.linalg.norm(axis)
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"axis norm {n} != 1")
    half = 0.5 * angle
    ndots = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return np.cos(half) * SIGMA_0 - 1j * np.sin(half) * ndots


def trace_norm(a):
    """Sum of singular values tr sqrt(A A^dag)."""
    a = as_square_matrix(a)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def purity(rho):
    """tr(rho^2) as a real number."""
    rho = as_square_matrix(rho, "state")
    return float(np.trace(rho @ rho).real)
