"""Irreducible Rayleigh and Raman susceptibilities.

The order-l term is the operator product that enters the excited
self-energy Σ_e,0 with l single-molecule excursions to the first photon
block. Values carry the prefactor ``(ω_ph/2)^(l+1)`` unless `bare` is
requested, so that the negated sum over l is a series for Σ_e,0.
"""
import io
import csv
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from . import model
from . import engines
from .util import format_float
from .exceptions import DepthRangeError, SeriesDivergenceWarning

__all__ = [
    'SusceptibilityTerm', 'SeriesComparison', 'lorentzian', 'chi_term',
    'self_energy_from_series', 'resolvent_poles', 'chi_table', 'chi_csv',
    'MAX_CLOSED_ORDER', 'CONVERGENCE_RATIO']

log = logging.getLogger(__name__)

MAX_CLOSED_ORDER = 2
CONVERGENCE_RATIO = 0.3

CSV_HEADER = ('omega', 're_chi1', 'im_chi1', 're_chi3', 'im_chi3',
              're_chi5_a', 'im_chi5_a', 're_chi5_b', 'im_chi5_b')


def lorentzian(omega, omega_prime, gamma):
    """I(ω′, Γ) = 1/(ω − ω′ + iΓ/2)."""
    return 1.0 / (np.asarray(omega) - omega_prime + 0.5j * gamma)


@dataclass(frozen=True, eq=False)
class SusceptibilityTerm:
    """The χ^(2l+1) term on a frequency grid.

    `contributions` holds the separately evaluated parts whose sum is
    `value`: one part for l < 2, and for l = 2 the pure Raman chain
    (∝ 1/N²) followed by the cascade through the first-order
    polaritons (∝ 1/N).
    """
    order: int
    omegas: np.ndarray
    value: np.ndarray
    contributions: tuple
    prefactored: bool = True

    @property
    def l(self):
        return (self.order - 1) // 2

    @property
    def arguments(self):
        """The frequency bookkeeping ``{ω, ω − ω_ph}^l, ω``."""
        return (u'ω', u'ω-ω_ph') * self.l + (u'ω',)


def _check_order(l, high=MAX_CLOSED_ORDER):
    if isinstance(l, bool) or int(l) != l or not 0 <= l <= high:
        raise DepthRangeError(u'susceptibility order l', l, 0, high)
    return int(l)


def _grid(omega):
    return np.atleast_1d(np.asarray(omega, dtype=float))


def _operator_terms(spec, omegas, l):
    """The operator products of order l, without the leading minus."""
    kappa, gamma = spec.cavity.kappa, spec.gamma
    zeroth = model.build_block_operators(spec, 0)
    ge0 = engines.bare_resolvent(omegas, zeroth.h_e, gamma)
    weighted = zeroth.V * ge0[:, None, :]
    if l == 0:
        return [(weighted @ zeroth.V.conj().T)[:, 0, 0]]

    first = model.build_block_operators(spec, 1)
    gph1 = engines.bare_resolvent(omegas, first.h_ph, kappa)
    # V0 Ge0 v0 Gph1 and v0† Ge0 V0†; Gph1 enters once per excursion.
    row = (weighted @ zeroth.v) * gph1[:, None, :]
    back = zeroth.v.conj().T @ (ge0[:, :, None] * zeroth.V.conj().T)
    if l == 1:
        return [(row @ back)[:, 0, 0]]
    col = gph1[:, :, None] * back

    raman = zeroth.v.conj().T @ (ge0[:, :, None] * zeroth.v)
    ge1 = engines.bare_resolvent(omegas, first.h_e, gamma)
    cascade = (first.V * ge1[:, None, :]) @ first.V.conj().T
    return [(row @ raman @ col)[:, 0, 0], (row @ cascade @ col)[:, 0, 0]]


def chi_term(spec, omega, l, bare=False):
    """Evaluate the prefactored susceptibility ``(ω_ph/2)^(l+1)·χ^(2l+1)``
    at the frequencies `omega`, or the bare χ when `bare` is set.

    Orders above l = 2 have no closed form here; use
    `diagrams.irreducible_order`.
    """
    l = _check_order(l)
    omegas = _grid(omega)
    parts = [-term for term in _operator_terms(spec, omegas, l)]
    if bare:
        scale = (0.5 * spec.cavity.omega_ph) ** (l + 1)
        parts = [part / scale for part in parts]
    return SusceptibilityTerm(2 * l + 1, omegas, sum(parts), tuple(parts),
                              not bare)


@dataclass(frozen=True, eq=False)
class SeriesComparison:
    """Partial sums of the susceptibility series next to the
    continued-fraction self-energy.

    `partial_sums[l]` is the self-energy series through order l and
    `converging` marks the frequencies inside the heuristic
    convergence region.
    """
    omegas: np.ndarray
    series: np.ndarray
    reference: np.ndarray
    partial_sums: tuple
    converging: np.ndarray
    diverging: np.ndarray

    @property
    def residuals(self):
        return tuple(np.abs(s - self.reference) for s in self.partial_sums)


def self_energy_from_series(spec, omega, l_max):
    """Sum the irreducible susceptibilities through order `l_max` into a
    series for Σ_e,0 and return it with the full recursion's Σ_e,0.

    Orders l ≤ 2 use the closed forms; higher orders are the sums of
    irreducible chain walks with l + 1 round trips.
    """
    from . import diagrams

    if isinstance(l_max, bool) or int(l_max) != l_max or l_max < 0:
        raise DepthRangeError(u'series order', l_max, 0, u'∞')
    omegas = _grid(omega)
    terms = []
    for l in range(int(l_max) + 1):
        if l <= MAX_CLOSED_ORDER:
            terms.append(-chi_term(spec, omegas, l).value)
        else:
            terms.append(diagrams.irreducible_order(spec, omegas, l + 1))

    partial = tuple(np.cumsum(terms, axis=0))
    reference = engines.self_energy(spec, omegas)

    detuning = np.abs(omegas - spec.cavity.omega_ph
                      + 0.5j * spec.cavity.kappa)
    converging = np.abs(terms[0]) < CONVERGENCE_RATIO * detuning
    diverging = np.zeros(len(omegas), dtype=bool)
    for lower, upper in zip(terms, terms[1:]):
        diverging |= np.abs(upper) > np.abs(lower)
    if diverging.any():
        log.info(u'susceptibility series grows at %d of %d frequencies',
                 diverging.sum(), len(omegas))
        warnings.warn(
            u'susceptibility terms grow with order at {0} frequencies'.format(
                diverging.sum()),
            SeriesDivergenceWarning, stacklevel=2)
    return SeriesComparison(omegas, partial[-1], reference, partial,
                            converging, diverging)


def resolvent_poles(spec, l):
    """Poles of the bare resolvents entering the order-l term.

    The resolvent blocks are diagonal, so the poles are the diagonal
    energies shifted by ``−i·loss/2``.
    """
    l = _check_order(l)
    kappa, gamma = spec.cavity.kappa, spec.gamma
    zeroth = model.build_block_operators(spec, 0)
    poles = [zeroth.h_e - 0.5j * gamma]
    if l >= 1:
        first = model.build_block_operators(spec, 1)
        poles.append(first.h_ph - 0.5j * kappa)
        if l == 2:
            poles.append(first.h_e - 0.5j * gamma)
    return np.concatenate(poles)


def chi_table(spec, omegas):
    """Rows ``(ω, χ1, χ3, χ5a, χ5b)`` of prefactored values."""
    omegas = _grid(omegas)
    linear = chi_term(spec, omegas, 0).value
    third = chi_term(spec, omegas, 1).value
    fifth = chi_term(spec, omegas, 2).contributions
    return list(zip(omegas, linear, third, fifth[0], fifth[1]))


def chi_csv(rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for omega, *values in rows:
        line = [format_float(omega)]
        for value in values:
            line += [format_float(value.real), format_float(value.imag)]
        writer.writerow(line)
    return out.getvalue()
