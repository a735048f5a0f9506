"""The coupled-cavity array: dispersion, density of states and momentum grid.

Energies are in units of the hopping ``J`` and times in units of ``1/J``
(hbar = 1). All functions accept ``J`` explicitly but default to 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandEdgeDivergence, DomainError

__all__ = [
    "BathParams",
    "MomentumGrid",
    "dispersion",
    "density_of_states",
    "group_velocity",
    "momentum_grid",
]


@dataclass(frozen=True)
class BathParams:
    """Lattice of ``N`` cavities with nearest-neighbour hopping ``J``.

    ``omega_B`` is the cavity frequency. Everything is written in the frame
    rotating at ``omega_B``, so it is kept only as metadata.
    """

    N: int
    J: float = 1.0
    omega_B: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        if not self.J > 0:
            raise ValueError(f"J must be positive, got {self.J!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "J", float(self.J))


@dataclass(frozen=True)
class MomentumGrid:
    k_values: np.ndarray

    def __len__(self):
        return len(self.k_values)

    @property
    def spacing(self) -> float:
        return 2 * np.pi / len(self.k_values)


def dispersion(k, J: float = 1.0):
    """Band energy ``-2J cos(k)``; works elementwise on arrays."""
    return -2.0 * J * np.cos(k)


def density_of_states(E: float, J: float = 1.0) -> float:
    """Density of states per unit energy, normalised to one over the band.

    Raises
    ------
    BandEdgeDivergence
        If ``|E| == 2J`` where the density has an inverse square-root
        singularity. Quadratures have to deal with the edges themselves.
    """
    E = float(E)
    edge = 2.0 * J
    if abs(E) == edge:
        raise BandEdgeDivergence(f"density of states diverges at E = {E}")
    if abs(E) > edge:
        return 0.0
    return 1.0 / (np.pi * np.sqrt(edge * edge - E * E))


def group_velocity(Delta: float, J: float = 1.0) -> float:
    """Group velocity of the band mode resonant with ``Delta``.

    Equals ``sqrt(4J^2 - Delta^2)``, in lattice sites per unit time.
    """
    Delta = float(Delta)
    if abs(Delta) > 2.0 * J:
        raise DomainError(f"no propagating mode at Delta = {Delta} (|Delta| > 2J)")
    return float(np.sqrt(max(4.0 * J * J - Delta * Delta, 0.0)))


def momentum_grid(N: int) -> MomentumGrid:
    """The ``N`` allowed momenta ``-pi, -pi + 2pi/N, ..., pi - 2pi/N``."""
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N!r}")
    N = int(N)
    return MomentumGrid(-np.pi + 2.0 * np.pi * np.arange(N) / N)
