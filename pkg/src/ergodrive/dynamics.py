"""Noisy work-extraction dynamics for a driven qubit.

The state evolves under a constant drive K n . sigma plus one of three
Markovian dissipators (amplitude damping, phase damping, depolarizing) or
an engineered "attractor" channel that rescales the drive by a probability
p(t) = 1 - exp(-zeta (1 - f_t)), where f_t is the overlap of the state with
a fixed pure attractor state. Work is always recorded against the undriven
reference Hamiltonian |1><1|.

Two integration paths are provided with identical semantics:

* :func:`integrate` - classic fixed-step 4th-order integration at the
  density-matrix level, with per-step positivity checks; returns a full
  :class:`WorkTrajectory`.
* :func:`work_series_batch` - the same dynamics in Bloch-vector form,
  vectorized over many drive axes at once. The qubit master equations above
  are exactly affine (Markovian) or axis-scaled (attractor) in the Bloch
  vector, so this path is equivalent to the matrix one; the test suite pins
  the two against each other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .quantum import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bloch_from_density,
    purity,
    require_density,
)

H_REF = np.diag([0.0, 1.0]).astype(complex)

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)   # |1><0|

MARKOVIAN_KINDS = ("adc", "pdc", "dpc")
NOISE_KINDS = ("none",) + MARKOVIAN_KINDS + ("attractor",)


class PositivityError(RuntimeError):
    """Raised when an integration step produces an unphysical state."""


@dataclass(frozen=True)
class NoiseSpec:
    """Tagged choice of noise channel with its rate parameters."""

    kind: str
    gamma: float = 0.0
    attractor_state: np.ndarray | None = None
    zeta: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}, expected one of {NOISE_KINDS}")
        if self.gamma < 0.0:
            raise ValueError(f"decay rate gamma = {self.gamma} must be nonnegative")
        if self.kind == "attractor":
            if self.attractor_state is None:
                raise ValueError("attractor noise needs an attractor state")
            sigma = require_density(self.attractor_state, name="attractor state")
            if abs(purity(sigma) - 1.0) > 1e-10:
                raise ValueError(f"attractor state must be pure, purity = {purity(sigma)}")
            sigma = sigma.copy()
            sigma.setflags(write=False)
            object.__setattr__(self, "attractor_state", sigma)
            if self.zeta <= 0.0:
                raise ValueError(f"zeta = {self.zeta} must be positive")
            if self.zeta < 1.0:
                warnings.warn(f"zeta = {self.zeta} < 1: outside the regime the channel was designed for")

    @classmethod
    def none(cls):
        return cls(kind="none")

    @classmethod
    def adc(cls, gamma):
        return cls(kind="adc", gamma=gamma)

    @classmethod
    def pdc(cls, gamma):
        return cls(kind="pdc", gamma=gamma)

    @classmethod
    def dpc(cls, gamma):
        return cls(kind="dpc", gamma=gamma)

    @classmethod
    def attractor(cls, sigma, zeta):
        return cls(kind="attractor", attractor_state=sigma, zeta=zeta)

    @classmethod
    def attractor_from_angle(cls, psi, zeta):
        """Attractor state cos(psi)|0> + sin(psi)|1> (Bloch polar angle 2 psi)."""
        ket = np.array([np.cos(psi), np.sin(psi)], dtype=complex)
        return cls.attractor(np.outer(ket, ket.conj()), zeta)

    def is_markovian(self):
        return self.kind in MARKOVIAN_KINDS

    def label(self):
        if self.kind == "none":
            return "noiseless"
        if self.kind == "attractor":
            return f"attractor(zeta={self.zeta:g})"
        return f"{self.kind.upper()}(gamma={self.gamma:g})"


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings."""

    dt: float = 1e-3
    t_max: float = 10.0
    record_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt = {self.dt} must be positive")
        if self.t_max < self.dt:
            raise ValueError(f"t_max = {self.t_max} must be at least one step dt = {self.dt}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride = {self.record_stride} must be >= 1")

    @property
    def n_steps(self):
        return int(round(self.t_max / self.dt))

    @classmethod
    def for_noise(cls, noise, dt=1e-3, record_stride=1):
        """Default horizon: 20 for the slow attractor channel, 10 otherwise."""
        t_max = 20.0 if noise.kind == "attractor" else 10.0
        return cls(dt=dt, t_max=t_max, record_stride=record_stride)


@dataclass(frozen=True)
class WorkTrajectory:
    """Recorded time series of one integration run.

    ``times[i]`` is the sample time, ``work[i]`` the extracted work
    tr(H rho_0) - tr(H rho_i), ``bloch[i]`` the Bloch vector and
    ``purity[i]`` = tr(rho_i^2).
    """

    times: np.ndarray
    work: np.ndarray
    bloch: np.ndarray
    purity: np.ndarray
    drive: "DriveSpec"
    noise: NoiseSpec
    config: IntegratorConfig

    def __len__(self):
        return self.times.size

    def validate(self):
        """Check recording invariants; used by tests."""
        if self.times.size == 0:
            raise ValueError("empty trajectory")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        if abs(self.work[0]) > 1e-12:
            raise ValueError(f"work must start at 0, got {self.work[0]}")
        norms = np.linalg.norm(self.bloch, axis=1)
        if norms.max() > 1.0 + 2e-8:
            raise ValueError(f"recorded state leaves the Bloch ball: |r| = {norms.max()}")
        return self


def _markov_dissipator(rho, kind, g):
    if kind == "adc":
        return g * (2.0 * SIGMA_MINUS @ rho @ SIGMA_PLUS
                    - SIGMA_PLUS @ SIGMA_MINUS @ rho - rho @ SIGMA_PLUS @ SIGMA_MINUS)
    if kind == "pdc":
        return g * (SIGMA_Z @ rho @ SIGMA_Z - rho)
    if kind == "dpc":
        return 0.5 * g * (SIGMA_X @ rho @ SIGMA_X + SIGMA_Y @ rho @ SIGMA_Y
                          + SIGMA_Z @ rho @ SIGMA_Z - 3.0 * rho)
    raise ValueError(f"no dissipator for kind {kind!r}")


def dissipator(rho, noise):
    """Lindblad dissipator of a Markovian channel applied to a qubit state."""
    if not noise.is_markovian():
        raise ValueError(f"noise kind {noise.kind!r} is not a Lindblad dissipator")
    rho = require_density(rho)
    if rho.shape != (2, 2):
        raise ValueError("dissipators are defined for qubits only")
    return _markov_dissipator(rho, noise.kind, noise.gamma)


def lindblad_rhs(rho, drive, noise):
    """Full master-equation right-hand side -i[K n.sigma, rho] + D(rho)."""
    if noise.kind == "attractor":
        raise ValueError("attractor noise is not Lindbladian; use attractor_rhs")
    rho = require_density(rho)
    h = drive.hamiltonian()
    out = -1j * (h @ rho - rho @ h)
    if noise.is_markovian():
        out = out + _markov_dissipator(rho, noise.kind, noise.gamma)
    return out


def attractor_probability(rho, noise):
    """Drive-scaling probability p = 1 - exp(-zeta (1 - f)), f = tr(rho sigma).

    p vanishes exactly at the attractor (f = 1) and grows toward 1 as the
    state moves away from it.
    """
    if noise.kind != "attractor":
        raise ValueError(f"noise kind {noise.kind!r} has no attractor probability")
    f = float(np.trace(rho @ noise.attractor_state).real)
    return 1.0 - np.exp(-noise.zeta * max(0.0, 1.0 - f))


def attractor_rhs(rho, drive, noise):
    """Drive commutator rescaled by the attractor probability: -i p [K n.sigma, rho]."""
    p = attractor_probability(rho, noise)
    h = drive.hamiltonian()
    return -1j * p * (h @ rho - rho @ h)


def attractor_step_discrete(rho, drive, noise, dt):
    """One step of the discrete attractor map p U rho U^dag + (1 - p) rho.

    Convex mixture of the unitarily advanced state with the current one;
    trace-preserving and positive by construction. The continuous
    :func:`attractor_rhs` is its dt -> 0 limit.
    """
    if dt <= 0.0:
        raise ValueError(f"dt = {dt} must be positive")
    p = attractor_probability(rho, noise)
    u = drive.unitary(dt)
    return p * (u @ rho @ u.conj().T) + (1.0 - p) * rho


def _bloch_of(rho):
    # Fast path: no validation, direct entries.
    return np.array([2.0 * rho[1, 0].real, 2.0 * rho[1, 0].imag, (rho[0, 0] - rho[1, 1]).real])


def integrate(rho0, drive, noise, config=None):
    """Fixed-step classic 4th-order integration of the applicable dynamics.

    Returns a :class:`WorkTrajectory` with samples every
    ``config.record_stride`` steps (plus the final step). Raises
    :class:`PositivityError` if the state acquires an eigenvalue below
    -1e-8 mid-run.
    """
    rho0 = require_density(rho0)
    if rho0.shape != (2, 2):
        raise ValueError("noisy integration is implemented for qubits only")
    if config is None:
        config = IntegratorConfig.for_noise(noise)

    if noise.kind == "attractor":
        sigma = noise.attractor_state
        zeta = noise.zeta
        h = drive.hamiltonian()

        def rhs(rho):
            f = np.trace(rho @ sigma).real
            p = 1.0 - np.exp(-zeta * max(0.0, 1.0 - f))
            return -1j * p * (h @ rho - rho @ h)
    else:
        h = drive.hamiltonian()
        kind, g = noise.kind, noise.gamma

        def rhs(rho):
            out = -1j * (h @ rho - rho @ h)
            if kind != "none":
                out = out + _markov_dissipator(rho, kind, g)
            return out

    dt = config.dt
    n = config.n_steps
    stride = config.record_stride
    e0 = rho0[1, 1].real

    times, work, blochs, purities = [], [], [], []

    def record(i, rho):
        times.append(i * dt)
        work.append(e0 - rho[1, 1].real)
        blochs.append(_bloch_of(rho))
        purities.append(np.trace(rho @ rho).real)

    rho = rho0.copy()
    record(0, rho)
    for i in range(1, n + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        # min eigenvalue of a qubit state is (1 - |r|)/2
        if np.linalg.norm(_bloch_of(rho)) > 1.0 + 2e-8:
            raise PositivityError(
                f"state eigenvalue below -1e-8 at step {i} (t = {i * dt:g}); "
                f"retry with a smaller dt than {dt:g}"
            )
        if i % stride == 0 or i == n:
            record(i, rho)

    return WorkTrajectory(
        times=np.array(times),
        work=np.array(work),
        bloch=np.array(blochs),
        purity=np.array(purities),
        drive=drive,
        noise=noise,
        config=config,
    )


# ---------------------------------------------------------------------------
# Bloch-vector fast path
# ---------------------------------------------------------------------------

def cross_matrix(n):
    """Matrix C with C r = n x r."""
    return np.array([
        [0.0, -n[2], n[1]],
        [n[2], 0.0, -n[0]],
        [-n[1], n[0], 0.0],
    ])


def bloch_noise_terms(noise):
    """Affine Bloch-space form (A, b) of a Markovian dissipator: dr/dt = A r + b."""
    g = noise.gamma
    if noise.kind == "none":
        return np.zeros((3, 3)), np.zeros(3)
    if noise.kind == "adc":
        return np.diag([-g, -g, -2.0 * g]), np.array([0.0, 0.0, 2.0 * g])
    if noise.kind == "pdc":
        return np.diag([-2.0 * g, -2.0 * g, 0.0]), np.zeros(3)
    if noise.kind == "dpc":
        return np.diag([-2.0 * g, -2.0 * g, -2.0 * g]), np.zeros(3)
    raise ValueError(f"noise kind {noise.kind!r} has no affine Bloch form")


def bloch_generator(drive, noise):
    """Full affine generator: drive precession at angular speed 2K plus noise."""
    a_noise, b = bloch_noise_terms(noise)
    return drive.angular_speed * cross_matrix(drive.axis) + a_noise, b


def _affine_rk4_map(a, b, dt):
    # One classic RK4 step of dr/dt = A r + b collapses to r' = R r + s.
    eye = np.eye(3)
    ha = dt * a
    ha2 = ha @ ha
    ha3 = ha2 @ ha
    r = eye + ha + ha2 / 2.0 + ha3 / 6.0 + ha3 @ ha / 24.0
    s = dt * (eye + ha / 2.0 + ha2 / 6.0 + ha3 / 24.0) @ b
    return r, s


def work_series_batch(bloch0, axes, coupling, noise, config):
    """Work time series for many drive axes at once.

    `bloch0` is the shared initial Bloch vector, `axes` an (N, 3) array of
    unit drive axes, `coupling` the common strength K. Returns
    ``(times, W)`` with ``W`` of shape (N, n_steps + 1); work is measured
    against the reference Hamiltonian |1><1|, i.e. W = (z - z_0) / 2.
    """
    bloch0 = np.asarray(bloch0, dtype=float)
    axes = np.atleast_2d(np.asarray(axes, dtype=float))
    n_traj = axes.shape[0]
    n = config.n_steps
    dt = config.dt
    times = np.arange(n + 1) * dt
    z = np.empty((n_traj, n + 1))
    z[:, 0] = bloch0[2]
    r = np.tile(bloch0, (n_traj, 1))

    if noise.kind == "attractor":
        s_vec = bloch_from_density(noise.attractor_state)
        zeta = noise.zeta
        w_speed = 2.0 * coupling
        ax, ay, az = axes[:, 0], axes[:, 1], axes[:, 2]

        def rhs(r):
            f = 0.5 * (1.0 + r @ s_vec)
            p = 1.0 - np.exp(-zeta * np.clip(1.0 - f, 0.0, None))
            scale = w_speed * p
            out = np.empty_like(r)
            out[:, 0] = scale * (ay * r[:, 2] - az * r[:, 1])
            out[:, 1] = scale * (az * r[:, 0] - ax * r[:, 2])
            out[:, 2] = scale * (ax * r[:, 1] - ay * r[:, 0])
            return out

        for i in range(1, n + 1):
            k1 = rhs(r)
            k2 = rhs(r + 0.5 * dt * k1)
            k3 = rhs(r + 0.5 * dt * k2)
            k4 = rhs(r + dt * k3)
            r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            z[:, i] = r[:, 2]
    else:
        a_noise, b = bloch_noise_terms(noise)
        step_r = np.empty((n_traj, 3, 3))
        step_s = np.empty((n_traj, 3))
        for j in range(n_traj):
            a = 2.0 * coupling * cross_matrix(axes[j]) + a_noise
            step_r[j], step_s[j] = _affine_rk4_map(a, b, dt)
        if n_traj == 1:
            r1, s1, rv = step_r[0], step_s[0], r[0]
            for i in range(1, n + 1):
                rv = r1 @ rv + s1
                z[0, i] = rv[2]
        else:
            for i in range(1, n + 1):
                r = np.einsum("nij,nj->ni", step_r, r) + step_s
                z[:, i] = r[:, 2]

    return times, 0.5 * (z - bloch0[2])


def work_series(bloch0, drive, noise, config):
    """Single-axis version of :func:`work_series_batch`."""
    times, w = work_series_batch(bloch0, drive.axis[None, :], drive.coupling, noise, config)
    return times, w[0]
