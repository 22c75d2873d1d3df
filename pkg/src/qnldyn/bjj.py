"""Two-site bosonic Josephson junction in the collective-spin picture.

N atoms on two sites map to a spin l = N/2; hopping enters as -J L_x and
on-site interaction as U L_z^2.  The (N+1)-dimensional Hamiltonian is
diagonalized once, after which evolution at any time is an exact phase
rotation in the eigenbasis.
"""

from __future__ import annotations

from dataclasses import dataclass
from warnings import warn

import numpy as np
from scipy.linalg import eigh
from scipy.special import gammaln

from .errors import NormalizationError
from .series import SamplingPlan, TimeSeries

_CHUNK = 16384


@dataclass(frozen=True)
class BJJParams:
    """Atom number, hopping J, on-site interaction U.

    The control parameter u = N U / J decides the dynamical regime; the
    Josephson window is 1 < u < N^2, and leaving it triggers a warning
    rather than an error.
    """

    n_atoms: int
    J: float = 1.0
    U: float = 0.0

    def __post_init__(self):
        if self.n_atoms < 2:
            raise ValueError("n_atoms must be >= 2")
        if not self.J > 0:
            raise ValueError("J must be positive")
        if self.U < 0:
            raise ValueError("U must be >= 0")
        u = self.u
        if not 1.0 < u < self.n_atoms**2:
            warn(
                f"u = {u:g} outside the Josephson window (1, N^2); "
                "regime labels in the analysis may not apply",
                stacklevel=2,
            )

    @classmethod
    def from_u(cls, n_atoms: int, u: float, J: float = 1.0) -> "BJJParams":
        """Build from the dimensionless coupling: U = u J / N."""
        return cls(n_atoms=n_atoms, J=J, U=u * J / n_atoms)

    @property
    def u(self) -> float:
        return self.n_atoms * self.U / self.J

    @property
    def spin(self) -> float:
        return self.n_atoms / 2.0

    @property
    def dim(self) -> int:
        return self.n_atoms + 1


@dataclass(frozen=True)
class SpinState:
    """Amplitudes over |l, m>, m = -l .. l (index 0 is m = -l)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise ValueError("amplitudes must be 1-d with >= 2 entries")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class BJJOperatorSet:
    """Spin operators and Hamiltonian for one parameter set.

    The eigendecomposition of H is computed lazily and cached, so long
    observable series reuse a single diagonalization.
    """

    def __init__(self, params: BJJParams):
        self.params = params
        l = params.spin
        m = np.arange(-l, l + 1.0)
        ladder = np.sqrt(l * (l + 1.0) - m[:-1] * (m[:-1] + 1.0))
        lp = np.diag(ladder, k=-1).astype(complex)  # L+ raises m (row index)
        lm = np.diag(ladder, k=1).astype(complex)
        self.lx = 0.5 * (lp + lm)
        self.ly = (lp - lm) / 2j
        self.lz = np.diag(m).astype(complex)
        self.hamiltonian = -params.J * self.lx + params.U * self.lz @ self.lz
        self._eig: tuple[np.ndarray, np.ndarray] | None = None

    def operator(self, name: str) -> np.ndarray:
        try:
            return {"lx": self.lx, "ly": self.ly, "lz": self.lz}[name]
        except KeyError:
            raise ValueError(f"unknown operator {name!r}") from None

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            energies, vectors = eigh(self.hamiltonian)
            self._eig = (energies, vectors)
        return self._eig


def build_bjj(params: BJJParams) -> BJJOperatorSet:
    return BJJOperatorSet(params)


def su2_coherent(theta: float, phi: float, n_atoms: int) -> SpinState:
    """Spin coherent state at polar angle theta, azimuth phi.

    Amplitudes are proportional to [tan(theta/2) e^{-i phi}]^{l+m} times
    sqrt(C(2l, l+m)); the prefactor is fixed by numerical normalization,
    and the poles theta = 0, pi are taken as their limits (single basis
    states).
    """
    if not 0.0 <= theta <= np.pi:
        raise ValueError("theta must lie in [0, pi]")
    dim = n_atoms + 1
    amps = np.zeros(dim, dtype=complex)
    if theta == 0.0:
        amps[0] = 1.0  # m = -l
        return SpinState(amps)
    if theta == np.pi:
        amps[-1] = 1.0
        return SpinState(amps)
    k = np.arange(dim, dtype=float)  # k = l + m
    log_mag = k * np.log(np.tan(theta / 2.0)) + 0.5 * (
        gammaln(n_atoms + 1.0) - gammaln(k + 1.0) - gammaln(n_atoms - k + 1.0)
    )
    log_mag -= log_mag.max()
    if phi == 0.0:
        phase = np.ones(dim)
    elif phi == np.pi:
        phase = np.where(k.astype(int) % 2 == 0, 1.0, -1.0)  # exact half turns
    else:
        phase = np.exp(-1j * k * phi)
    amps = np.exp(log_mag) * phase
    return SpinState(amps / np.linalg.norm(amps))


def make_initial(kind: str, n_atoms: int) -> SpinState:
    """Named starting states on the equator of the Bloch sphere.

    'pi' is the phase state at (theta, phi) = (pi/2, pi); 'even' is the
    balanced sum of the phi = 0 and phi = pi equatorial states, which are
    exactly orthogonal, so the 1/sqrt(2) prefactor normalizes it without
    numerical correction.
    """
    if n_atoms % 2 != 0:
        raise ValueError("these named states need an even atom number")
    if kind == "pi":
        return su2_coherent(np.pi / 2.0, np.pi, n_atoms)
    if kind == "even":
        a = su2_coherent(np.pi / 2.0, 0.0, n_atoms)
        b = su2_coherent(np.pi / 2.0, np.pi, n_atoms)
        return SpinState((a.amplitudes + b.amplitudes) / np.sqrt(2.0))
    raise ValueError(f"unknown initial state {kind!r}")


def evolve_bjj(state: SpinState, ops: BJJOperatorSet, t: float) -> SpinState:
    """Evolve through the cached eigendecomposition."""
    if state.dim != ops.params.dim:
        raise ValueError("state dimension does not match the operator set")
    if abs(state.norm() ** 2 - 1.0) > 1e-10:
        raise NormalizationError("evolve_bjj requires a normalized state")
    energies, vectors = ops.eigensystem()
    modes = vectors.conj().T @ state.amplitudes
    return SpinState(vectors @ (modes * np.exp(-1j * energies * t)))


def bloch_series(
    state: SpinState,
    ops: BJJOperatorSet,
    plan: SamplingPlan,
    observable: str = "lx",
    origin: dict | None = None,
) -> TimeSeries:
    """Sample the normalized Bloch component 2 <L_axis> / N along a grid.

    Work happens in the eigenbasis: each chunk of times is phased at once
    and contracted with the rotated operator, so 1e6 samples stay cheap.
    """
    if state.dim != ops.params.dim:
        raise ValueError("state dimension does not match the operator set")
    if abs(state.norm() ** 2 - 1.0) > 1e-10:
        raise NormalizationError("bloch_series requires a normalized state")
    params = ops.params
    energies, vectors = ops.eigensystem()
    op_eig = vectors.conj().T @ ops.operator(observable) @ vectors
    modes = vectors.conj().T @ state.amplitudes
    times = plan.times()
    vals = np.empty(plan.n_samples)
    for lo in range(0, plan.n_samples, _CHUNK):
        hi = min(lo + _CHUNK, plan.n_samples)
        block = modes[:, None] * np.exp(-1j * np.outer(energies, times[lo:hi]))
        vals[lo:hi] = np.sum(np.conj(block) * (op_eig @ block), axis=0).real
    vals *= 2.0 / params.n_atoms
    meta = {
        "system": "bjj",
        "observable": observable,
        "n_atoms": str(params.n_atoms),
        "J": repr(params.J),
        "U": repr(params.U),
        "u": repr(params.u),
        "t_start": repr(plan.t_start),
        "n_samples": str(plan.n_samples),
    }
    if origin:
        meta.update(origin)
    return TimeSeries(vals, plan.dt, meta)
