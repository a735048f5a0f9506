"""Emitter configurations: coupling points, detunings and topology.

A layout holds one or two two-level atoms. Each atom couples with strength
``g`` to a set of distinct cavities. Two atoms with two coupling points each
come in three interleaving orders (separate, nested, braided). Those orders
and the equidistant spacing ``d`` between consecutive coupling points are
derived from the positions.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, InvalidLayoutError, ModelValidityWarning, UnsupportedLayoutError

__all__ = [
    "AtomSpec",
    "Layout",
    "Topology",
    "PhasePoint",
    "classify_topology",
    "phase_map",
    "dfi_candidate_points",
    "single_atom",
    "giant_atom",
    "braided_pair",
    "nested_pair",
    "separate_pair",
    "small_pair",
]


class Topology(str, enum.Enum):
    SINGLE = "single"
    SEPARATE = "separate"
    NESTED = "nested"
    BRAIDED = "braided"


@dataclass(frozen=True)
class AtomSpec:
    """One two-level emitter.

    Parameters
    ----------
    detuning : float
        Transition frequency minus the cavity frequency, in units of J.
    coupling_points : sequence of int
        Cavity indices the atom couples to, strictly increasing.
    g : float
        Coupling strength per point, in units of J.
    """

    detuning: float
    coupling_points: tuple
    g: float

    def __post_init__(self):
        pts = tuple(int(p) for p in self.coupling_points)
        if any(int(p) != p for p in self.coupling_points):
            raise InvalidLayoutError(f"coupling points must be integers: {self.coupling_points!r}")
        if len(pts) == 0:
            raise InvalidLayoutError("an atom needs at least one coupling point")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise InvalidLayoutError(f"coupling points must be strictly increasing: {pts}")
        if not np.isfinite(self.g) or self.g < 0:
            raise InvalidLayoutError(f"g must be a non-negative number, got {self.g!r}")
        if not np.isfinite(self.detuning):
            raise InvalidLayoutError(f"detuning must be finite, got {self.detuning!r}")
        if self.g > 1.0:
            warnings.warn(f"g/J = {self.g} > 1 lies outside the weak-coupling regime of the model",
                          ModelValidityWarning, stacklevel=3)
        object.__setattr__(self, "coupling_points", pts)
        object.__setattr__(self, "detuning", float(self.detuning))
        object.__setattr__(self, "g", float(self.g))

    @property
    def P(self) -> int:
        return len(self.coupling_points)

    def offsets(self) -> tuple:
        """Coupling points relative to the leftmost one."""
        p0 = self.coupling_points[0]
        return tuple(p - p0 for p in self.coupling_points)


@dataclass(frozen=True)
class Layout:
    """One or two atoms on the lattice; no two coupling points may share a cavity."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if not 1 <= len(atoms) <= 2:
            raise UnsupportedLayoutError(f"layouts hold one or two atoms, got {len(atoms)}")
        pts = [p for a in atoms for p in a.coupling_points]
        if len(set(pts)) != len(pts):
            raise InvalidLayoutError(f"atoms share a cavity: {sorted(pts)}")
        object.__setattr__(self, "atoms", atoms)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def points(self) -> list:
        """All coupling points, sorted."""
        return sorted(p for a in self.atoms for p in a.coupling_points)

    @property
    def span(self) -> int:
        pts = self.points
        return pts[-1] - pts[0]

    @property
    def equidistant(self) -> bool:
        pts = self.points
        if len(pts) < 2:
            return True
        gaps = np.diff(pts)
        return bool(np.all(gaps == gaps[0]))

    @property
    def spacing(self) -> int | None:
        """Common distance between consecutive coupling points, if equidistant."""
        pts = self.points
        if len(pts) < 2 or not self.equidistant:
            return None
        return int(pts[1] - pts[0])

    @property
    def topology(self) -> Topology:
        if self.n_atoms == 1:
            return Topology.SINGLE
        if all(a.P == 1 for a in self.atoms):
            return Topology.SEPARATE
        return classify_topology(self)

    @property
    def identical(self) -> bool:
        """Equal detuning, coupling and internal geometry for both atoms."""
        if self.n_atoms != 2:
            return False
        a, b = self.atoms
        return a.detuning == b.detuning and a.g == b.g and a.offsets() == b.offsets()

    def shifted(self, offset: int) -> "Layout":
        return Layout(tuple(AtomSpec(a.detuning, tuple(p + offset for p in a.coupling_points), a.g)
                            for a in self.atoms))

    def with_coupling(self, g: float) -> "Layout":
        return Layout(tuple(AtomSpec(a.detuning, a.coupling_points, g) for a in self.atoms))

    def with_detuning(self, Delta: float) -> "Layout":
        return Layout(tuple(AtomSpec(Delta, a.coupling_points, a.g) for a in self.atoms))


def classify_topology(layout: Layout) -> Topology:
    """Interleaving order of two atoms with two coupling points each."""
    if layout.n_atoms != 2 or any(a.P != 2 for a in layout.atoms):
        raise UnsupportedLayoutError("topology is defined for two atoms with two coupling points each")
    a, b = layout.atoms
    if a.coupling_points[0] > b.coupling_points[0]:
        a, b = b, a
    (n11, n12), (n21, n22) = a.coupling_points, b.coupling_points
    if n11 < n12 < n21 < n22:
        return Topology.SEPARATE
    if n11 < n21 < n22 < n12:
        return Topology.NESTED
    if n11 < n21 < n12 < n22:
        return Topology.BRAIDED
    raise InvalidLayoutError(f"coincident coupling points in {a.coupling_points}, {b.coupling_points}")


class PhasePoint(NamedTuple):
    d: int
    Delta: float
    varphi: float


def phase_map(d: int, Delta: float, J: float = 1.0) -> PhasePoint:
    """Propagation phase accumulated over ``d`` sites at detuning ``Delta``.

    Only meaningful inside the band, where the photon propagates with a
    pure phase per site.
    """
    if abs(Delta) > 2.0 * J:
        raise DomainError(f"phase mapping needs |Delta| <= 2J, got Delta = {Delta}")
    phi = float(np.arccos(np.clip(-Delta / (2.0 * J), -1.0, 1.0)))
    return PhasePoint(int(d), float(Delta), d * phi)


def dfi_candidate_points(d_max: int, tol: float = 1e-9, *, both_branches: bool = False,
                         J: float = 1.0) -> list:
    """Detunings where braided pairs meet the decoherence-free phase condition.

    For every ``d <= d_max`` solves ``phase_map(d, Delta).varphi = pi/2 (mod 2pi)``
    in closed form. With ``both_branches`` the ``3pi/2 (mod 2pi)`` solutions are
    included too.

    Returns
    -------
    list of (d, Delta) tuples, sorted by ``d`` and then ``Delta``.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    targets = (np.pi / 2, 3 * np.pi / 2) if both_branches else (np.pi / 2,)
    out = []
    for d in range(1, int(d_max) + 1):
        found = set()
        for base in targets:
            m = 0
            while base + 2 * np.pi * m <= d * np.pi + 1e-12:
                phi_star = base + 2 * np.pi * m
                Delta = float(-2.0 * J * np.cos(min(phi_star / d, np.pi)))
                varphi = phase_map(d, Delta, J).varphi
                if abs(np.mod(varphi - base + np.pi, 2 * np.pi) - np.pi) <= tol:
                    found.add(round(Delta, 14))
                m += 1
        out.extend((d, Delta) for Delta in sorted(found))
    return out


# Layout generators. Positions start at ``origin``.

def single_atom(Delta: float, g: float, position: int = 0) -> Layout:
    return Layout((AtomSpec(Delta, (position,), g),))


def giant_atom(Delta: float, g: float, d: int, P: int = 2, origin: int = 0) -> Layout:
    """One giant atom with ``P`` equidistant coupling points spaced by ``d``."""
    return Layout((AtomSpec(Delta, tuple(origin + d * p for p in range(P)), g),))


def braided_pair(Delta: float, g: float, d: int, origin: int = 0) -> Layout:
    """Points at 0, 2d (atom 1) and d, 3d (atom 2)."""
    return Layout((AtomSpec(Delta, (origin, origin + 2 * d), g),
                   AtomSpec(Delta, (origin + d, origin + 3 * d), g)))


def nested_pair(Delta: float, g: float, d: int, origin: int = 0) -> Layout:
    """Points at 0, 3d (atom 1) and d, 2d (atom 2)."""
    return Layout((AtomSpec(Delta, (origin, origin + 3 * d), g),
                   AtomSpec(Delta, (origin + d, origin + 2 * d), g)))


def separate_pair(Delta: float, g: float, d: int, origin: int = 0) -> Layout:
    """Points at 0, d (atom 1) and 2d, 3d (atom 2)."""
    return Layout((AtomSpec(Delta, (origin, origin + d), g),
                   AtomSpec(Delta, (origin + 2 * d, origin + 3 * d), g)))


def small_pair(Delta: float, g: float, d: int, origin: int = 0) -> Layout:
    """Two single-point atoms ``d`` sites apart."""
    return Layout((AtomSpec(Delta, (origin,), g), AtomSpec(Delta, (origin + d,), g)))


def layout_from_points(points: Sequence[Sequence[int]], Delta: float, g: float) -> Layout:
    return Layout(tuple(AtomSpec(Delta, tuple(p), g) for p in points))
