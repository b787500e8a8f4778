"""Passive states, ergotropy, and the family of pacifying unitaries.

The maximum work a unitary cycle can extract from a state ``rho`` relative
to a reference Hamiltonian ``H`` is obtained in closed form: sort the
populations of ``rho`` in decreasing order onto the energy levels of ``H``
in increasing order. The resulting zero-work state is the passive state and
the extracted energy difference is the ergotropy. Any unitary mapping
``rho`` to its passive state is a "pacifying" unitary; they form a
phase-indexed family, all extracting the same work.
"""

from __future__ import annotations

import numpy as np

from .quantum import PSD_TOL, eig_hermitian, require_density, require_hermitian


def _spectral_pair(rho, H):
    rho = require_density(rho)
    H = require_hermitian(H, name="Hamiltonian")
    if rho.shape != H.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape} vs Hamiltonian {H.shape}")
    # Populations descending, energies ascending: the pairing that minimizes
    # the final energy over all unitaries.
    dec_rho = eig_hermitian(rho, "descending")
    dec_H = eig_hermitian(H, "ascending")
    return dec_rho, dec_H


def passive_state(rho, H):
    """State with the spectrum of `rho` arranged passively in the eigenbasis of `H`.

    Populations are nonincreasing with energy, so no unitary can extract
    further work. For degenerate spectra the decomposition's deterministic
    tie-break fixes one representative; the passive state is then not unique
    but its energy is.
    """
    dec_rho, dec_H = _spectral_pair(rho, H)
    v = dec_H.vectors
    return (v * dec_rho.values) @ v.conj().T


def passive_energy(rho, H):
    """tr(passive_state(rho, H) . H) without forming the state."""
    dec_rho, dec_H = _spectral_pair(rho, H)
    return float(np.dot(dec_rho.values, dec_H.values))


def ergotropy(rho, H):
    """Maximum unitarily extractable work tr(rho H) - tr(rho_p H), clamped at 0."""
    w = float(np.trace(rho @ H).real) - passive_energy(rho, H)
    if w < -1e-12:
        raise AssertionError(f"ergotropy computed as {w} < 0; spectral pairing is broken")
    return max(w, 0.0)


def qubit_ergotropy(r, theta0):
    """Closed-form qubit ergotropy r sin^2(theta0 / 2).

    `r` is the Bloch radius and `theta0` the polar angle of the initial
    state; the reference Hamiltonian is the excited-state projector
    ``|1><1|``. Independent of the azimuth.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"Bloch radius r = {r} outside [0, 1]")
    if not 0.0 <= theta0 <= np.pi:
        raise ValueError(f"polar angle theta0 = {theta0} outside [0, pi]")
    return r * np.sin(0.5 * theta0) ** 2


def pacifying_unitary(rho, H, phases):
    """Unitary sum_k e^{i mu_k} |eps_k><r_k| sending `rho` to its passive state.

    `phases` supplies mu_1 ... mu_{d-1} in [0, 2 pi); mu_0 is fixed to 0.
    Every choice of phases extracts the same work.
    """
    dec_rho, dec_H = _spectral_pair(rho, H)
    d = dec_rho.values.size
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (d - 1,):
        raise ValueError(f"expected {d - 1} phases for dimension {d}, got shape {phases.shape}")
    if np.any(phases < 0.0) or np.any(phases >= 2.0 * np.pi):
        raise ValueError("phases must lie in [0, 2*pi)")
    mu = np.concatenate(([0.0], phases))
    return (dec_H.vectors * np.exp(1j * mu)) @ dec_rho.vectors.conj().T


def qubit_pacifying_unitary(theta0, phi0, mu):
    """One-parameter qubit family |0><psi| + e^{i mu} |1><psi_perp|.

    ``|psi> = cos(theta0/2)|0> + e^{i phi0} sin(theta0/2)|1>`` is the
    majority eigenvector of the state being pacified. At theta0 = 0 the
    orthogonal complement's phase is gauge-fixed so that mu = 0 gives the
    identity.
    """
    if not 0.0 <= theta0 <= np.pi:
        raise ValueError(f"theta0 = {theta0} outside [0, pi]")
    if not 0.0 <= phi0 < 2.0 * np.pi:
        raise ValueError(f"phi0 = {phi0} outside [0, 2*pi)")
    if not 0.0 <= mu < 2.0 * np.pi:
        raise ValueError(f"mu = {mu} outside [0, 2*pi)")
    c, s = np.cos(0.5 * theta0), np.sin(0.5 * theta0)
    ph = np.exp(1j * phi0)
    psi = np.array([c, ph * s])
    if theta0 == 0.0:
        psi_perp = np.array([0.0, 1.0 + 0j])
    else:
        psi_perp = np.array([s, -ph * c])
    return np.outer([1.0, 0.0], psi.conj()) + np.exp(1j * mu) * np.outer([0.0, 1.0], psi_perp.conj())


def brute_force_ergotropy(rho, H):
    """Test oracle: minimize tr(P rho_diag P^T H) over eigenbasis permutations.

    Enumerates all d! pairings of the eigenvalues of `rho` with the
    eigenvectors of `H`. Exponential in d; it exists purely to cross-check
    :func:`ergotropy` and must never be used in the main computation path.
    """
    from itertools import permutations

    rho = require_density(rho)
    H = require_hermitian(H, name="Hamiltonian")
    if rho.shape != H.shape:
        raise ValueError("dimension mismatch")
    r = np.linalg.eigvalsh(rho)
    eps = np.linalg.eigvalsh(H)
    best = min(float(np.dot(r[list(p)], eps)) for p in permutations(range(r.size)))
    return max(float(np.trace(rho @ H).real) - best, 0.0)


def reference_hamiltonian():
    """The excited-state projector |1><1| = (I - sigma_z)/2 used throughout."""
    return np.diag([0.0, 1.0]).astype(complex)


def is_passive(rho, H, tol=PSD_TOL):
    """True when no unitary can extract work from `rho` relative to `H`."""
    return ergotropy(rho, H) <= tol
