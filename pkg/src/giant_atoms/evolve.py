"""Split-step time evolution of the single-excitation state.

Each step applies the exact exponential of the atomic and interaction terms
(a small block acting on the atoms and the cavities they touch), then the
free hopping, which is diagonal in momentum space and applied through an
FFT. Strang splitting puts half a block step on either side of the hopping.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bath import BathParams
from .errors import InvalidLayoutError, NumericFailure, UnsupportedLayoutError, WrapAroundWarning
from .hamiltonian import SingleExcitationState
from .layout import Layout

__all__ = [
    "EvolveConfig",
    "DynamicsTrace",
    "SplitStepPropagator",
    "block_propagator",
    "coupled_sites",
    "step",
    "simulate",
    "default_lattice_size",
    "centred_layout",
    "max_population_transfer",
]

MIN_SAMPLES = 2000


@dataclass(frozen=True)
class EvolveConfig:
    """Integration settings.

    Parameters
    ----------
    t_max : float
        Final time in units of ``1/J``.
    dt : float
        Step size; ``dt * J <= 0.1`` unless ``allow_large_dt`` is set.
    record_stride : int, optional
        Steps between recorded samples. By default chosen so the trace has
        at least 2000 samples.
    splitting : {"lie", "strang"}
    """

    t_max: float
    dt: float = 0.05
    record_stride: int | None = None
    splitting: str = "lie"
    allow_large_dt: bool = False

    def __post_init__(self):
        if not self.dt > 0 or not np.isfinite(self.dt):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not self.t_max >= self.dt:
            raise ValueError(f"t_max must be >= dt, got t_max={self.t_max!r}, dt={self.dt!r}")
        if self.dt > 0.1 and not self.allow_large_dt:
            raise ValueError(f"dt*J = {self.dt} exceeds 0.1; pass allow_large_dt=True to force it")
        if self.record_stride is not None and (int(self.record_stride) != self.record_stride
                                               or self.record_stride < 1):
            raise ValueError(f"record_stride must be a positive integer, got {self.record_stride!r}")
        split = str(self.splitting).lower()
        if split not in ("lie", "strang"):
            raise ValueError(f"splitting must be 'lie' or 'strang', got {self.splitting!r}")
        object.__setattr__(self, "splitting", split)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def stride(self) -> int:
        if self.record_stride is not None:
            return int(self.record_stride)
        return max(1, self.n_steps // MIN_SAMPLES)


@dataclass
class DynamicsTrace:
    """Recorded atomic amplitudes.

    ``atom_amplitudes`` and ``atom_populations`` have shape ``(n_atoms, n_samples)``.
    """

    times: np.ndarray
    atom_amplitudes: np.ndarray
    total_norm: np.ndarray
    N: int
    offset: int = 0
    wrap_warning: bool = False
    final_state: SingleExcitationState | None = None
    config: EvolveConfig | None = None
    extra: dict = field(default_factory=dict)

    @property
    def atom_populations(self) -> np.ndarray:
        return np.abs(self.atom_amplitudes) ** 2

    @property
    def n_atoms(self) -> int:
        return self.atom_amplitudes.shape[0]


def coupled_sites(layout: Layout) -> np.ndarray:
    """Sorted cavities touched by any atom; the order used in the block."""
    return np.asarray(layout.points, dtype=int)


def block_propagator(layout: Layout, dt: float) -> np.ndarray:
    """Exact ``exp(-i (H_A + H_int) dt)`` on atoms plus coupled cavities.

    The basis is the atoms in layout order followed by :func:`coupled_sites`.
    """
    sites = coupled_sites(layout)
    if len(set(sites.tolist())) != len(sites):
        raise UnsupportedLayoutError("atoms sharing a cavity give overlapping blocks")
    na = layout.n_atoms
    col = {p: na + i for i, p in enumerate(sites)}
    H = np.zeros((na + len(sites),) * 2)
    for i, atom in enumerate(layout.atoms):
        H[i, i] = atom.detuning
        for p in atom.coupling_points:
            H[i, col[p]] = H[col[p], i] = atom.g
    w, v = np.linalg.eigh(H)
    return (v * np.exp(-1j * w * dt)) @ v.T


def default_lattice_size(t_max: float, span: int, J: float = 1.0) -> int:
    """Smallest power of two that keeps the emitted fronts from wrapping around."""
    need = 2.0 * (2.0 * J * t_max) + span + 32
    return 1 << int(np.ceil(np.log2(need)))


def centred_layout(layout: Layout, N: int) -> Layout:
    """Layout shifted so its coupling points sit in the middle of an ``N``-site ring."""
    pts = layout.points
    return layout.shifted(N // 2 - (pts[0] + pts[-1]) // 2)


class SplitStepPropagator:
    """Precomputed factors for repeated split steps on a fixed lattice."""

    def __init__(self, bath: BathParams, layout: Layout, dt: float, splitting: str = "lie"):
        sites = coupled_sites(layout)
        if sites.min() < 0 or sites.max() >= bath.N:
            raise InvalidLayoutError(f"coupling points {sites.tolist()} outside [0, {bath.N - 1}]")
        self.bath = bath
        self.layout = layout
        self.sites = sites
        self.n_atoms = layout.n_atoms
        self.splitting = splitting
        block_dt = dt / 2 if splitting == "strang" else dt
        self.block = block_propagator(layout, block_dt)
        k = 2.0 * np.pi * np.fft.fftfreq(bath.N)
        self.hop_phase = np.exp(2j * bath.J * np.cos(k) * dt)

    def _apply_block(self, atoms, cav):
        v = self.block @ np.concatenate([atoms, cav[self.sites]])
        cav[self.sites] = v[self.n_atoms:]
        return v[:self.n_atoms]

    def advance(self, atoms: np.ndarray, cav: np.ndarray, n: int = 1):
        """``n`` steps in place on the cavity array; returns the new atom amplitudes."""
        for _ in range(n):
            atoms = self._apply_block(atoms, cav)
            cav[:] = np.fft.ifft(self.hop_phase * np.fft.fft(cav))
            if self.splitting == "strang":
                atoms = self._apply_block(atoms, cav)
        return atoms


def step(state: SingleExcitationState, bath: BathParams, layout: Layout,
         config: EvolveConfig) -> SingleExcitationState:
    """One split step of size ``config.dt``."""
    prop = SplitStepPropagator(bath, layout, config.dt, config.splitting)
    cav = state.cavity_amplitudes.copy()
    atoms = prop.advance(state.atom_amplitudes.copy(), cav)
    if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(cav))):
        raise NumericFailure("non-finite amplitudes after a split step")
    return SingleExcitationState(atoms, cav)


def simulate(bath: BathParams | None, layout: Layout, initial: SingleExcitationState | None,
             config: EvolveConfig) -> DynamicsTrace:
    """Integrate up to ``config.t_max`` and record the atomic amplitudes.

    Parameters
    ----------
    bath : BathParams or None
        ``None`` picks ``N`` with :func:`default_lattice_size` and centres the
        layout on the ring. With an explicit bath the layout is used as given.
    initial : SingleExcitationState or None
        Defaults to the first atom excited.

    Notes
    -----
    If the light-cone front (speed ``2J``) can travel half the free ring
    ``(N - span) / 2`` before ``t_max``, the trace carries ``wrap_warning``
    and a :class:`WrapAroundWarning` is emitted.
    """
    offset = 0
    if bath is None:
        N = default_lattice_size(config.t_max, layout.span)
        bath = BathParams(N)
        shifted = centred_layout(layout, N)
        offset = shifted.points[0] - layout.points[0]
        layout = shifted
    N = bath.N
    if initial is None:
        initial = SingleExcitationState.atom_excited(layout.n_atoms, N)
    if len(initial.atom_amplitudes) != layout.n_atoms or len(initial.cavity_amplitudes) != N:
        raise ValueError("initial state does not match the layout and lattice size")

    wrap = 2.0 * bath.J * config.t_max >= (N - layout.span) / 2.0
    if wrap:
        warnings.warn(f"N = {N} lets the emitted front wrap around before t = {config.t_max}",
                      WrapAroundWarning, stacklevel=2)

    prop = SplitStepPropagator(bath, layout, config.dt, config.splitting)
    n_steps, stride = config.n_steps, config.stride
    n_rec = n_steps // stride + 1
    times = np.arange(n_rec) * stride * config.dt
    amps = np.empty((layout.n_atoms, n_rec), dtype=complex)
    norms = np.empty(n_rec)

    atoms = initial.atom_amplitudes.copy()
    cav = initial.cavity_amplitudes.copy()
    amps[:, 0] = atoms
    norms[0] = np.sqrt(np.sum(np.abs(atoms) ** 2) + np.sum(np.abs(cav) ** 2))
    for r in range(1, n_rec):
        atoms = prop.advance(atoms, cav, stride)
        nrm = np.sqrt(np.sum(np.abs(atoms) ** 2) + np.sum(np.abs(cav) ** 2))
        if not np.isfinite(nrm):
            raise NumericFailure(f"non-finite amplitudes at t = {times[r]:.6g}")
        amps[:, r] = atoms
        norms[r] = nrm
    leftover = n_steps - (n_rec - 1) * stride
    if leftover:
        atoms = prop.advance(atoms, cav, leftover)
    return DynamicsTrace(times, amps, norms, N, offset, bool(wrap),
                         SingleExcitationState(atoms, cav), config)


def max_population_transfer(trace: DynamicsTrace, t_window: float | None = None) -> float:
    """Largest recorded population of the second atom (first atom initially excited)."""
    if trace.n_atoms < 2:
        raise UnsupportedLayoutError("population transfer needs a two-atom trace")
    pop = trace.atom_populations[1]
    if t_window is not None:
        pop = pop[trace.times <= t_window]
    return float(pop.max())
