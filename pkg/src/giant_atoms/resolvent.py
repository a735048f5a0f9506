r"""Frequency-domain engine: self-energies, Green's functions, poles and cuts.

All self-energies in the single-excitation sector share one structure. With
:math:`s(z) = \sqrt{z^2 - 4J^2}` and :math:`f(z) = (-z + s)/(2J)`,

.. math::

    \Sigma(z) = \frac{g^2}{s(z)} \sum_m c_m f(z)^{m},

where :math:`c_m` counts (with sign, for the antisymmetric channel) the
ordered pairs of coupling points a distance :math:`m` apart.

Branch convention: on the physical sheet :math:`s \sim z` at infinity with
a single cut on :math:`[-2J, 2J]`, so that :math:`|f| \le 1` and
:math:`\operatorname{Im} s > 0` just above the band. The second sheet flips
the sign of :math:`s` (and inverts :math:`f`). On the real axis inside the
band both sheets return the value seen from above the physical sheet, which
is also the limit from below on the second sheet. The imaginary axis is not
a cut, so there is no ambiguity at ``Re z = 0``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np
from scipy import integrate, optimize

from .errors import (
    BandEdgeDivergence,
    BranchPointError,
    DegeneratePoleError,
    DomainError,
    PoleEvaluationError,
    ToleranceWarning,
    UnsupportedLayoutError,
)
from .layout import AtomSpec, Layout, Topology

__all__ = [
    "PHYSICAL",
    "SECOND",
    "SelfEnergyEval",
    "MarkovSplit",
    "Pole",
    "PoleSet",
    "f_pm",
    "self_energy_single",
    "self_energy",
    "sigma_int",
    "sigma_int_equidistant",
    "self_energy_two",
    "markov_split",
    "green",
    "find_real_poles",
    "find_unstable_poles",
    "find_poles",
    "residue_at",
    "branch_cut_contribution",
    "amplitude_from_poles",
    "amplitude_direct",
    "combine_pm",
    "atomic_amplitudes",
    "channels_of",
]

PHYSICAL = "physical"
SECOND = "second"
CHANNELS = ("e", "plus", "minus")

POLE_TOL = 1e-10
DEDUP_TOL = 1e-8


def _check_sheet(sheet):
    if sheet not in (PHYSICAL, SECOND):
        raise ValueError(f"sheet must be {PHYSICAL!r} or {SECOND!r}, got {sheet!r}")


def _branch_root(z, sheet=PHYSICAL, J=1.0):
    """``sqrt(z^2 - 4J^2)`` on the requested sheet (vectorised, no checks)."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        s = z * np.sqrt(1.0 - 4.0 * J * J / (z * z))
    # Near the origin 4J^2/z^2 overflows; there i*sqrt(4J^2 - z^2) is analytic
    # in each half plane and matches the branch above.
    small = np.abs(z) < J
    if np.any(small):
        inner = 1j * np.where(z.imag < 0, -1.0, 1.0) * np.sqrt(4.0 * J * J - z * z)
        s = np.where(small, inner, s)
    if sheet == SECOND:
        s = -s
    on_band = (z.imag == 0) & (np.abs(z.real) < 2.0 * J)
    if np.any(on_band):
        s = np.where(on_band, 1j * np.sqrt(np.maximum(4.0 * J * J - z.real ** 2, 0.0)), s)
    return s


def f_pm(z, sheet: str = PHYSICAL, J: float = 1.0):
    """Root of ``J f^2 + z f + J = 0`` selected by the sheet.

    On the physical sheet the root with ``|f| <= 1``; on the second sheet its
    reciprocal.
    """
    _check_sheet(sheet)
    za = np.asarray(z, dtype=complex)
    if np.any((za.imag == 0) & (np.abs(za.real) == 2.0 * J)):
        raise BranchPointError(f"f is not analytic at the branch points z = +-2J (z = {z})")
    s = _branch_root(za, sheet, J)
    out = (-za + s) / (2.0 * J)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class _Terms:
    """``g^2 / s * sum_m weight_m f^m`` in compact form."""

    distances: np.ndarray
    weights: np.ndarray
    g2: float

    @classmethod
    def from_pairs(cls, pairs: dict, g2: float) -> "_Terms":
        items = sorted((m, w) for m, w in pairs.items() if w != 0)
        if not items:
            return cls(np.zeros(0, dtype=int), np.zeros(0), g2)
        m, w = zip(*items)
        return cls(np.asarray(m, dtype=int), np.asarray(w, dtype=float), g2)

    def evaluate(self, z, sheet=PHYSICAL, J=1.0, derivative=False):
        z = np.asarray(z, dtype=complex)
        s = _branch_root(z, sheet, J)
        f = (-z + s) / (2.0 * J)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            powers = f[..., None] ** self.distances
            S = powers @ self.weights
            sigma = self.g2 * S / s
            if not derivative:
                return sigma
            dS = powers @ (self.weights * self.distances)
            dsigma = self.g2 * (-z * S / s ** 3 - dS / s ** 2)
        return sigma, dsigma

    def edge_limit(self, E: float, J: float = 1.0) -> float:
        """Value at the band edge ``E = +-2J`` when the form factor vanishes there.

        With ``f -> f0 = -sign(E)`` and ``f - f0 = s / 2J`` the ratio ``S(f) / s``
        tends to ``S'(f0) / 2J``, which is real. A non-zero ``S(f0)`` means a
        genuine divergence.
        """
        f0 = -np.sign(E)
        S0 = float(np.sum(self.weights * f0 ** self.distances))
        if abs(S0) > 1e-12 * max(1.0, float(np.sum(np.abs(self.weights)))):
            raise BandEdgeDivergence(f"self-energy diverges at the band edge E = {E}")
        dS = float(np.sum(self.weights * self.distances * f0 ** (self.distances - 1.0)))
        return self.g2 * dS / (2.0 * J)


def _pair_counts(points_a, points_b) -> dict:
    counts: dict = {}
    for a in points_a:
        for b in points_b:
            m = abs(a - b)
            counts[m] = counts.get(m, 0) + 1
    return counts


def _combine(c1: dict, c2: dict, sign: int) -> dict:
    out = dict(c1)
    for m, w in c2.items():
        out[m] = out.get(m, 0) + sign * w
    return out


def _channel(layout: Layout, channel: str):
    """Detuning and self-energy terms of one diagonal channel."""
    if channel not in CHANNELS:
        raise ValueError(f"channel must be one of {CHANNELS}, got {channel!r}")
    a = layout.atoms[0]
    if layout.n_atoms == 1:
        if channel != "e":
            raise UnsupportedLayoutError("a single atom only has the 'e' channel")
        return a.detuning, _Terms.from_pairs(_pair_counts(a.coupling_points, a.coupling_points), a.g ** 2)
    if channel == "e":
        raise UnsupportedLayoutError("two-atom layouts are diagonal in the 'plus'/'minus' channels")
    if not layout.identical:
        raise UnsupportedLayoutError("the +/- decomposition needs two identical atoms "
                                     "(equal detuning, coupling and internal spacing)")
    b = layout.atoms[1]
    own = _pair_counts(a.coupling_points, a.coupling_points)
    cross = _pair_counts(a.coupling_points, b.coupling_points)
    sign = 1 if channel == "plus" else -1
    return a.detuning, _Terms.from_pairs(_combine(own, cross, sign), a.g ** 2)


def _guard_branch_point(z, J):
    z = complex(z)
    if z.imag == 0 and abs(z.real) == 2.0 * J:
        raise BranchPointError(f"z = {z} is a branch point")


# ---------------------------------------------------------------------------
# Self-energies
# ---------------------------------------------------------------------------

def self_energy_single(z, P: int, d: int, g: float, sheet: str = PHYSICAL, J: float = 1.0):
    """Self-energy of one giant atom with ``P`` equidistant points spaced by ``d``.

    Uses the closed form ``g^2/s [P + 2 sum_{p=1}^{P-1} p f^{(P-p)d}]``.
    """
    _check_sheet(sheet)
    if P < 1:
        raise ValueError("P must be >= 1")
    _guard_branch_point(z, J)
    s = _branch_root(z, sheet, J)
    f = (-np.asarray(z, dtype=complex) + s) / (2.0 * J)
    bracket = P + sum(2 * p * f ** ((P - p) * d) for p in range(1, P))
    return complex(g * g * bracket / s)


def self_energy(z, atom: AtomSpec, sheet: str = PHYSICAL, J: float = 1.0):
    """Self-energy of an atom with arbitrary coupling points."""
    _check_sheet(sheet)
    _guard_branch_point(z, J)
    terms = _Terms.from_pairs(_pair_counts(atom.coupling_points, atom.coupling_points), atom.g ** 2)
    return complex(terms.evaluate(z, sheet, J))


def sigma_int(z, layout: Layout, sheet: str = PHYSICAL, J: float = 1.0):
    """Exchange self-energy between the two atoms, summed over all point pairs."""
    _check_sheet(sheet)
    _guard_branch_point(z, J)
    if layout.n_atoms != 2:
        raise UnsupportedLayoutError("interaction self-energy needs two atoms")
    a, b = layout.atoms
    terms = _Terms.from_pairs(_pair_counts(a.coupling_points, b.coupling_points), a.g * b.g)
    return complex(terms.evaluate(z, sheet, J))


_EQUIDISTANT_INT = {
    Topology.SEPARATE: {1: 1, 2: 2, 3: 1},
    Topology.BRAIDED: {1: 3, 3: 1},
    Topology.NESTED: {1: 2, 2: 2},
}


def sigma_int_equidistant(z, topology: Topology, d: int, g: float, sheet: str = PHYSICAL,
                          J: float = 1.0):
    """Closed-form exchange self-energy of an equidistant two-atom arrangement."""
    _check_sheet(sheet)
    _guard_branch_point(z, J)
    coeffs = _EQUIDISTANT_INT[Topology(topology)]
    s = _branch_root(z, sheet, J)
    f = (-np.asarray(z, dtype=complex) + s) / (2.0 * J)
    return complex(g * g / s * sum(c * f ** (k * d) for k, c in coeffs.items()))


@dataclass(frozen=True)
class SelfEnergyEval:
    """Self-energies of a one- or two-atom layout at one complex energy.

    ``delta_e`` and ``gamma_e`` split ``sigma_e`` as
    ``sigma_e = delta_e - 1j * gamma_e / 2``.
    """

    sigma_e: complex
    sigma_int: complex
    delta_e: float
    gamma_e: float

    @property
    def sigma_plus(self) -> complex:
        return self.sigma_e + self.sigma_int

    @property
    def sigma_minus(self) -> complex:
        return self.sigma_e - self.sigma_int


def self_energy_two(z, layout: Layout, sheet: str = PHYSICAL, J: float = 1.0) -> SelfEnergyEval:
    """Individual and exchange self-energies of two identical atoms."""
    if layout.n_atoms != 2:
        raise UnsupportedLayoutError("self_energy_two needs a two-atom layout")
    if not layout.identical:
        raise UnsupportedLayoutError("self_energy_two needs two identical atoms")
    se = self_energy(z, layout.atoms[0], sheet, J)
    si = sigma_int(z, layout, sheet, J)
    return SelfEnergyEval(se, si, se.real, -2.0 * se.imag)


class MarkovSplit(NamedTuple):
    delta_e: float
    gamma_e: float
    exchange: float
    collective: float


def markov_split(E: float, layout: Layout, J: float = 1.0) -> MarkovSplit:
    """Frequency shift, decay rate, exchange and collective decay at ``E + i0``.

    For a two-atom layout the individual terms refer to the first atom.
    At ``E = +-2J`` the density of states diverges; the result is the finite
    edge limit when the coupling form factor vanishes there (for example
    two points at distance 1 at ``E = 2J``), else :class:`BandEdgeDivergence`.
    """
    E = float(E)
    if abs(E) == 2.0 * J:
        a = layout.atoms[0]
        own = _Terms.from_pairs(_pair_counts(a.coupling_points, a.coupling_points), a.g ** 2)
        se = own.edge_limit(E, J)
        si = 0.0
        if layout.n_atoms == 2:
            b = layout.atoms[1]
            si = _Terms.from_pairs(_pair_counts(a.coupling_points, b.coupling_points), a.g * b.g).edge_limit(E, J)
        return MarkovSplit(se, 0.0, si, 0.0)
    se = self_energy(E, layout.atoms[0], PHYSICAL, J)
    si = sigma_int(E, layout, PHYSICAL, J) if layout.n_atoms == 2 else 0j
    return MarkovSplit(se.real, -2.0 * se.imag, si.real, -2.0 * si.imag)


def green(z, channel: str, layout: Layout, sheet: str = PHYSICAL, J: float = 1.0) -> complex:
    """Diagonal resolvent element ``1 / (z - Delta - Sigma_channel(z))``."""
    _check_sheet(sheet)
    _guard_branch_point(z, J)
    Delta, terms = _channel(layout, channel)
    inverse = complex(z - Delta - terms.evaluate(z, sheet, J))
    if abs(inverse) < 1e-14 * J:
        raise PoleEvaluationError(f"G_{channel} evaluated on a pole at z = {z}")
    return 1.0 / inverse


# ---------------------------------------------------------------------------
# Poles and residues
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pole:
    """A zero of ``z - Delta - Sigma(z)``.

    ``kind`` is ``"real"`` for bound states outside the band (physical sheet)
    and ``"unstable"`` for second-sheet poles below the band.
    """

    z_pole: complex
    residue: complex
    kind: str
    channel: str

    @property
    def sheet(self) -> str:
        return PHYSICAL if self.kind == "real" else SECOND


@dataclass(frozen=True)
class PoleSet:
    channel: str
    poles: tuple = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.poles)

    def __len__(self):
        return len(self.poles)

    def __getitem__(self, i):
        return self.poles[i]

    def __add__(self, other: "PoleSet") -> "PoleSet":
        if other.channel != self.channel:
            raise ValueError("cannot merge pole sets of different channels")
        return PoleSet(self.channel, self.poles + other.poles)

    @property
    def real(self) -> "PoleSet":
        return PoleSet(self.channel, tuple(p for p in self.poles if p.kind == "real"))

    @property
    def unstable(self) -> "PoleSet":
        return PoleSet(self.channel, tuple(p for p in self.poles if p.kind == "unstable"))

    def by_weight(self, t_ref: float = 0.0) -> list:
        """Poles ordered by ``|R| exp(Im(z) t_ref)``, largest first."""
        return sorted(self.poles, key=lambda p: -abs(p.residue) * np.exp(p.z_pole.imag * t_ref))

    def dominant(self, t_ref: float = 0.0) -> Pole:
        if not self.poles:
            raise ValueError(f"empty pole set for channel {self.channel!r}")
        return self.by_weight(t_ref)[0]


def residue_at(z_pole, channel: str, layout: Layout, sheet: str | None = None, *,
               method: str = "analytic", J: float = 1.0) -> complex:
    """Residue ``1 / (1 - dSigma/dz)`` of a channel's Green's function at a pole.

    ``sheet`` defaults to physical for real poles outside the band and to the
    second sheet otherwise. ``method="fd"`` uses a central difference with
    step ``1e-6 J`` (five-point stencil) instead of the analytic derivative.
    """
    z_pole = complex(z_pole)
    if sheet is None:
        sheet = PHYSICAL if (abs(z_pole.real) > 2.0 * J and abs(z_pole.imag) < 1e-9) else SECOND
    _check_sheet(sheet)
    _guard_branch_point(z_pole, J)
    _, terms = _channel(layout, channel)
    if method == "analytic":
        _, dsigma = terms.evaluate(z_pole, sheet, J, derivative=True)
    elif method == "fd":
        h = 1e-6 * J
        # Step along the imaginary direction when sitting on the band.
        step = 1j * h if (abs(z_pole.real) < 2.0 * J and abs(z_pole.imag) < h) else h
        ev = lambda k: terms.evaluate(z_pole + k * step, sheet, J)
        dsigma = (8 * (ev(1) - ev(-1)) - (ev(2) - ev(-2))) / (12 * step)
    else:
        raise ValueError(f"unknown method {method!r}")
    denom = complex(1.0 - dsigma)
    if abs(denom) < 1e-12:
        raise DegeneratePoleError(f"1 - dSigma/dz vanishes at z = {z_pole}")
    return 1.0 / denom


def _default_gap_extent(Delta, terms, J):
    return 2.0 * J + abs(Delta) + 2.0 * np.sqrt(terms.g2 * np.abs(terms.weights).sum()) + 1.0


def find_real_poles(channel: str, layout: Layout, search_range=None, *,
                    points_per_gap: int = 10_000, J: float = 1.0) -> PoleSet:
    """Bound-state poles on the real axis outside the band.

    Each gap is scanned on a grid uniform in ``sqrt(|E| - 2J)``, which
    resolves weakly bound states hugging the band edge. Sign changes of
    ``E - Delta - Sigma(E)`` are refined with Brent's method and a final
    Newton step.

    Parameters
    ----------
    search_range : (lo, hi), optional
        Restrict the search to one real interval lying outside ``[-2J, 2J]``.
    """
    Delta, terms = _channel(layout, channel)
    extent = _default_gap_extent(Delta, terms, J)
    if search_range is None:
        intervals = [(-extent, -2.0 * J), (2.0 * J, extent)]
    else:
        lo, hi = sorted(map(float, search_range))
        if hi > -2.0 * J and lo < 2.0 * J:
            raise DomainError(f"search range {search_range} overlaps the band")
        intervals = [(lo, hi)]

    def g_inv(E):
        return (E - Delta - terms.evaluate(E, PHYSICAL, J)).real

    roots = []
    for lo, hi in intervals:
        upper = lo >= 2.0 * J
        near, far = (lo, hi) if upper else (hi, lo)
        u_near = np.sqrt(abs(near) - 2.0 * J)
        u_far = np.sqrt(abs(far) - 2.0 * J)
        u = np.linspace(max(u_near, 1e-7 * J), u_far, points_per_gap)
        E = (2.0 * J + u * u) if upper else -(2.0 * J + u * u)
        vals = g_inv(E)
        finite = np.isfinite(vals)
        for i in np.nonzero(finite[:-1] & finite[1:] & (np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))[0]:
            root = optimize.brentq(g_inv, E[i], E[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
            for _ in range(3):
                val, dval = terms.evaluate(root, PHYSICAL, J, derivative=True)
                F = root - Delta - val.real
                if abs(F) <= 1e-14:
                    break
                root -= F / (1.0 - dval.real)
            roots.append(float(root))
        roots.extend(float(E[i]) for i in np.nonzero(vals == 0)[0])
    poles = []
    for r in sorted(set(roots)):
        R = residue_at(r, channel, layout, PHYSICAL, J=J)
        poles.append(Pole(complex(r, 0.0), R, "real", channel))
    return PoleSet(channel, tuple(poles))


def _polynomial_seeds(Delta, terms, J):
    """All solutions of the pole equation, written as a polynomial in ``f``.

    With ``z = -J(f + 1/f)`` and ``s = J(f - 1/f)`` the pole condition becomes
    ``J(-(f^2+1) - (Delta/J) f)(f^2-1) - g^2/J f^2 S(f) = 0``.
    """
    max_m = int(terms.distances.max()) if len(terms.distances) else 0
    deg = max(4, max_m + 2)
    coeffs = np.zeros(deg + 1)
    quad = np.array([-1.0, -Delta / J, -1.0])
    coeffs[:5] += np.convolve(quad, [-1.0, 0.0, 1.0])
    for m, w in zip(terms.distances, terms.weights):
        coeffs[m + 2] -= terms.g2 / (J * J) * w
    roots = np.roots(coeffs[::-1])
    roots = roots[np.abs(roots) > 1e-12]
    return -J * (roots + 1.0 / roots)


def _newton(z, Delta, terms, sheet, J, iterations=80, max_step=0.5):
    z = np.array(z, dtype=complex)
    for _ in range(iterations):
        sigma, dsigma = terms.evaluate(z, sheet, J, derivative=True)
        F = z - Delta - sigma
        with np.errstate(divide="ignore", invalid="ignore"):
            step = F / (1.0 - dsigma)
        step = np.where(np.isfinite(step), step, 0.0)
        size = np.abs(step)
        step = np.where(size > max_step, step * (max_step / np.maximum(size, max_step)), step)
        z = z - step
        if np.all(np.abs(step) < 1e-15 * np.maximum(1.0, np.abs(z))):
            break
    sigma = terms.evaluate(z, sheet, J)
    return z, np.abs(z - Delta - sigma)


def default_unstable_seeds(layout: Layout, channel: str, J: float = 1.0) -> np.ndarray:
    """Seed grid: ``Re z`` across the band in steps of ``0.05 J`` and three depths,
    plus the Markovian estimate ``Delta + Sigma(Delta + i0)``."""
    Delta, terms = _channel(layout, channel)
    re = np.arange(-2.0 * J, 2.0 * J + 1e-12, 0.05 * J)
    im = np.array([-0.01, -0.1, -0.5]) * J
    seeds = (re[:, None] + 1j * im[None, :]).ravel()
    markov = Delta + complex(terms.evaluate(np.clip(Delta, -1.999 * J, 1.999 * J), PHYSICAL, J))
    return np.concatenate([seeds, [markov]])


def find_unstable_poles(channel: str, layout: Layout, seeds=None, *,
                        polynomial_seeds: bool = True, J: float = 1.0) -> PoleSet:
    """Second-sheet poles below the band, ``|Re z| < 2J`` and ``Im z <= 0``.

    Runs damped complex Newton iterations from every seed at once. Seeds that
    do not converge to ``|z - Delta - Sigma(z)| <= 1e-10 J`` are dropped
    silently. Poles closer than ``1e-8 J`` are merged. Besides the given
    (or default) seed grid, the roots of the equivalent polynomial in ``f``
    are used as seeds unless ``polynomial_seeds`` is false.
    """
    Delta, terms = _channel(layout, channel)
    seeds = default_unstable_seeds(layout, channel, J) if seeds is None else np.asarray(seeds, complex).ravel()
    if polynomial_seeds:
        seeds = np.concatenate([seeds, _polynomial_seeds(Delta, terms, J)])
    z, residual = _newton(seeds, Delta, terms, SECOND, J)
    keep = (np.isfinite(z) & (residual <= POLE_TOL * J) & (np.abs(z.real) < 2.0 * J)
            & (z.imag <= 1e-12 * J))
    found: list = []
    for zz in sorted(z[keep], key=lambda v: (v.real, v.imag)):
        if all(abs(zz - other) >= DEDUP_TOL * J for other in found):
            found.append(complex(zz.real, min(zz.imag, 0.0)))
    poles = []
    for zz in found:
        try:
            R = residue_at(zz, channel, layout, SECOND, J=J)
        except DegeneratePoleError:
            continue
        poles.append(Pole(zz, R, "unstable", channel))
    return PoleSet(channel, tuple(poles))


def find_poles(channel: str, layout: Layout, *, J: float = 1.0) -> PoleSet:
    """Every pole that contributes to the time evolution of a channel."""
    return find_real_poles(channel, layout, J=J) + find_unstable_poles(channel, layout, J=J)


# ---------------------------------------------------------------------------
# Time-domain reconstruction
# ---------------------------------------------------------------------------

def _cut_extent(Delta, terms, t_min, J):
    """Depth along the cut beyond which the integrand is below 1e-12."""
    max_m = int(terms.distances.max()) if len(terms.distances) else 1
    y_cap = min(1e9, 10.0 ** (250.0 / max(max_m, 1)))
    y = 10.0 * J
    while y < y_cap:
        bound = 0.0
        for edge in (-2.0 * J, 2.0 * J):
            z = edge - 1j * y
            diff = _green_values(z, Delta, terms, SECOND, J) - _green_values(z, Delta, terms, PHYSICAL, J)
            bound = max(bound, abs(diff) * np.exp(-y * t_min) / (2 * np.pi))
        if bound < 1e-12:
            break
        y *= 2.0
    return min(y, y_cap)


def _green_values(z, Delta, terms, sheet, J):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        g = 1.0 / (z - Delta - terms.evaluate(z, sheet, J))
    return np.where(np.isfinite(g), g, 0.0)


def branch_cut_contribution(t, channel: str, layout: Layout, *, edge: float | None = None,
                            epsabs: float = 1e-8, J: float = 1.0):
    """Detour integrals around the band-edge branch cuts.

    Integrates the jump of the Green's function between the two sheets along
    the vertical lines ``z = +-2J - iy``, ``y >= 0``. The substitution
    ``y = u^2`` removes the square-root behaviour at the branch points.

    Parameters
    ----------
    t : float or array_like
        Times, ``t >= 0``.
    edge : float, optional
        ``-2J`` or ``+2J`` for a single cut; both by default.

    Returns
    -------
    complex ndarray with the shape of ``t``.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("branch-cut contributions are defined for t >= 0")
    Delta, terms = _channel(layout, channel)
    edges = (-2.0 * J, 2.0 * J) if edge is None else (float(edge),)
    y_max = _cut_extent(Delta, terms, float(t_arr.min()), J)
    n = t_arr.size
    total = np.zeros(n, dtype=complex)
    for e in edges:
        sign = 1.0 if e > 0 else -1.0
        carrier = np.exp(-1j * e * t_arr)

        def integrand(u, e=e, sign=sign, carrier=carrier):
            y = u * u
            z = e - 1j * y
            jump = _green_values(z, Delta, terms, PHYSICAL, J) - _green_values(z, Delta, terms, SECOND, J)
            val = sign * jump * carrier * np.exp(-y * t_arr) * (2.0 * u) / (2.0 * np.pi)
            return np.concatenate([val.real, val.imag])

        res, err = integrate.quad_vec(integrand, 0.0, np.sqrt(y_max), epsabs=epsabs * 0.1,
                                      epsrel=1e-10, norm="max", limit=4000)
        if err > epsabs:
            warnings.warn(f"branch-cut integral at edge {e}: error estimate {err:.2e} > {epsabs:.0e}",
                          ToleranceWarning, stacklevel=2)
        total += res[:n] + 1j * res[n:]
    return total.reshape(np.shape(t)) if np.ndim(t) else total[0]


def amplitude_from_poles(t, channel: str, layout: Layout, poles: PoleSet | None = None, *,
                         include_cuts: bool = True, J: float = 1.0):
    """Channel amplitude as a sum of pole terms plus branch-cut detours."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if poles is None:
        poles = find_poles(channel, layout, J=J)
    amp = np.zeros(t_arr.shape, dtype=complex)
    for p in poles:
        amp += p.residue * np.exp(-1j * p.z_pole * t_arr)
    if include_cuts:
        amp += branch_cut_contribution(t_arr, channel, layout, J=J)
    return amp if np.ndim(t) else amp[0]


def amplitude_direct(t, channel: str, layout: Layout, *, epsabs: float = 1e-9, J: float = 1.0):
    """Channel amplitude from the spectral density, without complex poles.

    Integrates ``-Im G(E + i0) / pi * exp(-iEt)`` across the band (with
    ``E = -2J cos(theta)`` to soften the edges) and adds the bound states
    found on the real axis. Bound states embedded in the band (zero-width
    resonances) are not captured by this route.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    Delta, terms = _channel(layout, channel)
    n = t_arr.size

    def integrand(theta):
        E = -2.0 * J * np.cos(theta)
        if abs(E) >= 2.0 * J:
            return np.zeros(2 * n)
        g = 1.0 / (E - Delta - complex(terms.evaluate(E, PHYSICAL, J)))
        val = (-g.imag / np.pi) * np.exp(-1j * E * t_arr) * 2.0 * J * np.sin(theta)
        return np.concatenate([val.real, val.imag])

    res, _ = integrate.quad_vec(integrand, 0.0, np.pi, epsabs=epsabs, epsrel=1e-10, norm="max",
                                limit=4000)
    amp = res[:n] + 1j * res[n:]
    for p in find_real_poles(channel, layout, J=J):
        amp += p.residue * np.exp(-1j * p.z_pole * t_arr)
    return amp if np.ndim(t) else amp[0]


def combine_pm(C_plus, C_minus):
    """Atomic amplitudes ``(C_eg, C_ge)`` from the symmetric/antisymmetric channels."""
    C_plus = np.asarray(C_plus)
    C_minus = np.asarray(C_minus)
    if C_plus.shape != C_minus.shape:
        raise ValueError(f"shape mismatch: {C_plus.shape} vs {C_minus.shape}")
    return 0.5 * (C_plus + C_minus), 0.5 * (C_plus - C_minus)


def atomic_amplitudes(t, layout: Layout, *, include_cuts: bool = True, J: float = 1.0):
    """Amplitudes of the initially excited atom (and of the partner, for pairs).

    Returns ``C_e`` for one atom and ``(C_eg, C_ge)`` for two identical atoms
    with the first one initially excited.
    """
    if layout.n_atoms == 1:
        return amplitude_from_poles(t, "e", layout, include_cuts=include_cuts, J=J)
    plus = amplitude_from_poles(t, "plus", layout, include_cuts=include_cuts, J=J)
    minus = amplitude_from_poles(t, "minus", layout, include_cuts=include_cuts, J=J)
    return combine_pm(plus, minus)


def channels_of(layout: Layout) -> Iterable[str]:
    """Diagonal channels of a layout: ``e`` for one atom, ``plus``/``minus`` for pairs."""
    return ("e",) if layout.n_atoms == 1 else ("plus", "minus")
