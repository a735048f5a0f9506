"""Real-space single-excitation Hamiltonian and its exact diagonalisation.

Basis ordering: atom-excited states first (one per atom), followed by the
``N`` single-photon cavity states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathParams
from .errors import InvalidLayoutError, NotABoundStateError
from .layout import Layout

__all__ = [
    "SingleExcitationState",
    "SpectrumResult",
    "build_hamiltonian",
    "energy_spectrum",
    "bound_state_profile",
]


@dataclass
class SingleExcitationState:
    """Amplitudes of a state with exactly one excitation.

    Parameters
    ----------
    atom_amplitudes : complex array, shape (n_atoms,)
    cavity_amplitudes : complex array, shape (N,)
    """

    atom_amplitudes: np.ndarray
    cavity_amplitudes: np.ndarray

    def __post_init__(self):
        self.atom_amplitudes = np.asarray(self.atom_amplitudes, dtype=complex).ravel()
        self.cavity_amplitudes = np.asarray(self.cavity_amplitudes, dtype=complex).ravel()

    @classmethod
    def from_vector(cls, vec, n_atoms: int) -> "SingleExcitationState":
        vec = np.asarray(vec, dtype=complex)
        return cls(vec[:n_atoms].copy(), vec[n_atoms:].copy())

    @classmethod
    def atom_excited(cls, n_atoms: int, N: int, which: int = 0) -> "SingleExcitationState":
        """Atom ``which`` excited, all others and the field in the ground state."""
        atoms = np.zeros(n_atoms, dtype=complex)
        atoms[which] = 1.0
        return cls(atoms, np.zeros(N, dtype=complex))

    @classmethod
    def photon_at(cls, n_atoms: int, N: int, site: int) -> "SingleExcitationState":
        cav = np.zeros(N, dtype=complex)
        cav[site] = 1.0
        return cls(np.zeros(n_atoms, dtype=complex), cav)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.atom_amplitudes, self.cavity_amplitudes])

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.atom_amplitudes) ** 2)
                             + np.sum(np.abs(self.cavity_amplitudes) ** 2)))

    def normalized(self) -> "SingleExcitationState":
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalise the zero vector")
        return SingleExcitationState(self.atom_amplitudes / n, self.cavity_amplitudes / n)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    bound_state_indices: np.ndarray
    n_atoms: int
    J: float = 1.0


def _check_points(bath: BathParams, layout: Layout):
    for p in layout.points:
        if not 0 <= p < bath.N:
            raise InvalidLayoutError(f"coupling point {p} outside the lattice [0, {bath.N - 1}]")


def build_hamiltonian(bath: BathParams, layout: Layout, periodic: bool = True) -> np.ndarray:
    """Dense Hermitian matrix of the atoms plus cavity array in the rotating-wave form.

    Returns
    -------
    ndarray, shape (n_atoms + N, n_atoms + N), real.
    """
    _check_points(bath, layout)
    na, N = layout.n_atoms, bath.N
    H = np.zeros((na + N, na + N))
    idx = np.arange(N - 1)
    H[na + idx, na + idx + 1] = -bath.J
    H[na + idx + 1, na + idx] = -bath.J
    if periodic and N > 2:
        H[na, na + N - 1] = H[na + N - 1, na] = -bath.J
    for i, atom in enumerate(layout.atoms):
        H[i, i] = atom.detuning
        for p in atom.coupling_points:
            H[i, na + p] = H[na + p, i] = atom.g
    return H


def energy_spectrum(bath: BathParams, layout: Layout, periodic: bool = True) -> SpectrumResult:
    """Eigenvalues (ascending) and eigenvectors; states outside the band are flagged."""
    H = build_hamiltonian(bath, layout, periodic)
    w, v = np.linalg.eigh(H)
    # Continuum states of a finite lattice sit at or inside the band edges up
    # to rounding; give them a little room.
    bound = np.nonzero(np.abs(w) > 2.0 * bath.J * (1 + 1e-12))[0]
    return SpectrumResult(w, v, bound, layout.n_atoms, bath.J)


def bound_state_profile(spectrum: SpectrumResult, index: int) -> SingleExcitationState:
    """Normalised eigenvector of a bound state.

    Raises
    ------
    NotABoundStateError
        If the eigenvalue at ``index`` lies inside the band.
    """
    if index not in set(spectrum.bound_state_indices.tolist()):
        E = spectrum.eigenvalues[index]
        raise NotABoundStateError(f"eigenvalue {E:.6g} at index {index} is not a bound state")
    vec = spectrum.eigenvectors[:, index]
    return SingleExcitationState.from_vector(vec, spectrum.n_atoms).normalized()
