"""Drive construction on the Bloch sphere.

A constant driving Hamiltonian K n . sigma rotates the Bloch vector about
the unit axis n at angular speed 2K. Under the energy budget
``trace_norm(K n . sigma) = 2K <= omega_max`` the fastest admissible drive
saturates K = omega_max / 2, so the Bloch vector moves at angular speed
omega_max and the shortest pacification - rotating the state onto its
passive state - follows the great-circle (geodesic) arc, taking time
theta0 / omega_max.

The family of pacification planes through a state and its passive state is
parametrized by a tilt angle beta in [-pi/2, pi/2]; beta = pi/2 is the
geodesic plane and beta = 0 the plane whose normal points at the midpoint
of the connecting arc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quantum import UNIT_TOL, expm_su2, pauli_decompose


@dataclass(frozen=True)
class DriveSpec:
    """Constant drive: rotation `axis` (unit 3-vector), coupling strength
    `coupling` (energy units, rotates the Bloch vector at angular speed
    2 * coupling), optional `duration` for fixed-length pulses."""

    axis: np.ndarray
    coupling: float
    duration: float | None = None

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (3,):
            raise ValueError(f"drive axis must have 3 components, got shape {axis.shape}")
        n = np.linalg.norm(axis)
        if abs(n - 1.0) > UNIT_TOL:
            raise ValueError(f"drive axis norm {n} != 1")
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)
        if self.coupling <= 0.0:
            raise ValueError(f"coupling K = {self.coupling} must be positive")
        if self.duration is not None and self.duration < 0.0:
            raise ValueError(f"duration {self.duration} must be nonnegative")

    @property
    def angular_speed(self):
        """Bloch-sphere rotation rate 2K of this drive."""
        return 2.0 * self.coupling

    def hamiltonian(self):
        """The 2x2 generator K axis . sigma."""
        from .quantum import SIGMA_X, SIGMA_Y, SIGMA_Z

        ax = self.axis
        return self.coupling * (ax[0] * SIGMA_X + ax[1] * SIGMA_Y + ax[2] * SIGMA_Z)

    def unitary(self, t):
        """Propagator exp(-i K t axis . sigma) after driving for time t."""
        return expm_su2(self.axis, self.angular_speed * t)


def _check_angles(theta0, phi0):
    if not 0.0 <= theta0 <= np.pi:
        raise ValueError(f"theta0 = {theta0} outside [0, pi]")
    if not 0.0 <= phi0 < 2.0 * np.pi:
        raise ValueError(f"phi0 = {phi0} outside [0, 2*pi)")


def geodesic_axis(theta0, phi0):
    """Unit normal (sin phi0, -cos phi0, 0) of the geodesic pacification plane.

    Orthogonal to the Bloch vectors of both the state and its passive
    state, and lying in the x-y plane. Rotating the state about this axis
    by theta0 reaches the passive state along the shortest arc.
    """
    _check_angles(theta0, phi0)
    if theta0 == 0.0:
        raise ValueError("theta0 = 0: state already passive, no geodesic to follow")
    return np.array([np.sin(phi0), -np.cos(phi0), 0.0])


def minimal_pacification_time(theta0, omega_max):
    """Speed limit theta0 / omega_max for rotating through polar angle theta0."""
    if not 0.0 <= theta0 <= np.pi:
        raise ValueError(f"theta0 = {theta0} outside [0, pi]")
    if omega_max <= 0.0:
        raise ValueError(f"omega_max = {omega_max} must be positive")
    return theta0 / omega_max


def beta_axis(beta):
    """Tilted-plane axis (cos b / sqrt2, -sin b, cos b / sqrt2) for the |+> state.

    The plane family connecting the Bloch points (1,0,0) and (0,0,1);
    beta = pi/2 recovers the geodesic normal (0,-1,0) and beta = 0 the axis
    (1,0,1)/sqrt2.
    """
    if not -np.pi / 2 <= beta <= np.pi / 2:
        raise ValueError(f"beta = {beta} outside [-pi/2, pi/2]")
    c = np.cos(beta) / np.sqrt(2.0)
    return np.array([c, -np.sin(beta), c])


def plane_axis(theta0, phi0, beta):
    """Tilted-plane axis for a general initial state (theta0, phi0).

    Constructed from the geodesic normal g and the chord direction c from
    the state's Bloch point to the passive point (0, 0, r):
    axis = sin(beta) g + cos(beta) (c x g). Reduces exactly to
    :func:`beta_axis` for the |+> state (theta0 = pi/2, phi0 = 0).
    """
    if not -np.pi / 2 <= beta <= np.pi / 2:
        raise ValueError(f"beta = {beta} outside [-pi/2, pi/2]")
    g = geodesic_axis(theta0, phi0)
    start = np.array([np.sin(theta0) * np.cos(phi0), np.sin(theta0) * np.sin(phi0), np.cos(theta0)])
    chord = np.array([0.0, 0.0, 1.0]) - start
    chord /= np.linalg.norm(chord)
    axis = np.sin(beta) * g + np.cos(beta) * np.cross(chord, g)
    return axis / np.linalg.norm(axis)


def drive_from_beta(beta, omega_max, theta0=np.pi / 2, phi0=0.0):
    """Budget-saturating drive (K = omega_max / 2) along the beta-plane axis.

    Defaults to the |+> instance; pass (theta0, phi0) for a general state.
    """
    if omega_max <= 0.0:
        raise ValueError(f"omega_max = {omega_max} must be positive")
    if theta0 == np.pi / 2 and phi0 == 0.0:
        axis = beta_axis(beta)
    else:
        axis = plane_axis(theta0, phi0, beta)
    return DriveSpec(axis=axis, coupling=0.5 * omega_max)


def geodesic_drive(theta0, phi0, omega_max):
    """Budget-saturating drive along the geodesic axis."""
    if omega_max <= 0.0:
        raise ValueError(f"omega_max = {omega_max} must be positive")
    return DriveSpec(axis=geodesic_axis(theta0, phi0), coupling=0.5 * omega_max)


def generator_from_unitary(u):
    """Recover (axis, rotation angle) of a 2x2 unitary up to global phase.

    The unitary is first rotated into special-unitary form with a real
    nonnegative identity component (when that component vanishes, the first
    nonzero Pauli coefficient is made purely -i times a positive real, which
    fixes the axis sign). The returned angle lies in [0, pi] and
    ``expm_su2(axis, angle)`` reproduces the input up to global phase.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 unitary, got shape {u.shape}")
    dev = np.abs(u @ u.conj().T - np.eye(2)).max()
    if dev > 1e-10:
        raise ValueError(f"matrix is not unitary: |U U^dag - I| = {dev:.3e}")
    a = pauli_decompose(u)
    vec = a[1:]
    if np.linalg.norm(vec) <= 1e-10:
        raise ValueError("no rotation axis: unitary is a global phase times the identity")
    if abs(a[0]) > 1e-10:
        phase = a[0] / abs(a[0])
    else:
        k = np.argmax(np.abs(vec))
        # -i * positive real convention for the leading Pauli coefficient
        phase = vec[k] / abs(vec[k]) * 1j
    a = a / phase
    cos_half = a[0].real
    n = (1j * a[1:]).real
    sin_half = np.linalg.norm(n)
    angle = 2.0 * np.arctan2(sin_half, cos_half)
    residue = np.abs((1j * a[1:]).imag).max()
    if residue > 1e-9:
        raise ValueError(f"inconsistent rotation form: imaginary residue {residue:.3e}")
    return n / sin_half, float(angle)


def noiseless_work_curve(r, theta0, omega_max, t):
    """Closed-form work r sin(w t / 2) sin(theta0 - w t / 2) under the geodesic drive.

    `t` may be a scalar or array; the maximum r sin^2(theta0 / 2) is
    attained at t = theta0 / omega_max.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"Bloch radius r = {r} outside [0, 1]")
    if not 0.0 <= theta0 <= np.pi:
        raise ValueError(f"theta0 = {theta0} outside [0, pi]")
    if omega_max <= 0.0:
        raise ValueError(f"omega_max = {omega_max} must be positive")
    half = 0.5 * omega_max * np.asarray(t, dtype=float)
    w = r * np.sin(half) * np.sin(theta0 - half)
    return w if w.ndim else float(w)
