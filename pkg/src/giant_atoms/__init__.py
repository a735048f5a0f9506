"""Giant atoms in a coupled-cavity array, single-excitation sector.

Two independent engines compute the atomic dynamics: a split-step FFT
integrator in real space (:mod:`giant_atoms.evolve`) and a resolvent
expansion over poles and branch cuts (:mod:`giant_atoms.resolvent`).
"""
from . import bath, errors, evolve, hamiltonian, layout, metrics, resolvent
from .bath import BathParams
from .evolve import EvolveConfig, simulate
from .hamiltonian import energy_spectrum
from .layout import AtomSpec, Layout, braided_pair, giant_atom, nested_pair, separate_pair, single_atom, small_pair
from .metrics import dfi_scan, pair_metrics
from .resolvent import atomic_amplitudes, find_poles

__version__ = "0.1.0"

__all__ = [
    "bath",
    "errors",
    "evolve",
    "hamiltonian",
    "layout",
    "metrics",
    "resolvent",
    "AtomSpec",
    "BathParams",
    "EvolveConfig",
    "Layout",
    "braided_pair",
    "giant_atom",
    "nested_pair",
    "separate_pair",
    "single_atom",
    "small_pair",
    "simulate",
    "energy_spectrum",
    "find_poles",
    "atomic_amplitudes",
    "pair_metrics",
    "dfi_scan",
]
