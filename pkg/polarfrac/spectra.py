"""Spectra, peak tables and polariton modes derived from the photon
Green's function.
"""
import io
import csv
import json
import math
import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.signal
import scipy.integrate

from . import model
from .util import format_float
from .exceptions import GridTooNarrowWarning

__all__ = [
    'Grid', 'Spectrum', 'Peak', 'PeakTable', 'PolaritonModes',
    'compute_spectrum', 'find_peaks', 'polariton_modes', 'sum_rule',
    'default_grid', 'spectrum_csv', 'peaks_json', 'modes_json',
    'DEFAULT_POINTS', 'DEFAULT_PROMINENCE']

log = logging.getLogger(__name__)

DEFAULT_POINTS = 4001
DEFAULT_PROMINENCE = 1e-4
TAIL_WARNING = 0.1

CSV_HEADER = ('omega', 're_D', 'im_D', 'A', 'T', 'R')


@dataclass(frozen=True)
class Grid:
    """An evenly spaced frequency grid ``[low, high]`` of `points`
    samples.
    """
    low: float
    high: float
    points: int

    def omegas(self):
        return np.linspace(self.low, self.high, self.points)

    @property
    def step(self):
        return (self.high - self.low) / (self.points - 1)

    def to_dict(self):
        return {'min': self.low, 'max': self.high, 'points': self.points}


def default_grid(spec, points=DEFAULT_POINTS):
    """The grid for sideband studies: ``[ω_e0 − 2.5λ√N,
    ω_e0 + ω_v + 2.5λ√N]`` with ω_v the largest vibrational gap.
    """
    centre = spec.electronic_gap
    gaps = spec.vibrational_gaps()
    vibration = max(gaps) if gaps else 0.0
    margin = 2.5 * abs(spec.collective_coupling)
    if margin == 0:
        margin = max(10 * (spec.cavity.kappa + spec.gamma), 1e-3)
    return Grid(centre - margin, centre + vibration + margin, points)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Absorption, transmission and reflection on a grid."""
    omegas: np.ndarray
    absorption: np.ndarray
    transmission: np.ndarray
    reflection: np.ndarray
    engine: str

    def difference(self, other):
        """The spectrum difference ``self − other`` sample by sample."""
        if not np.array_equal(self.omegas, other.omegas):
            raise ValueError(u'spectra are sampled on different grids')
        return Spectrum(self.omegas,
                        self.absorption - other.absorption,
                        self.transmission - other.transmission,
                        self.reflection - other.reflection,
                        u'{0}-{1}'.format(self.engine, other.engine))


def compute_spectrum(green, kappa):
    """T = κ²/4·|D|², R = 1 + κ·Im D + κ²/4·|D|²,
    A = −κ/2·(κ|D|² + 2 Im D).
    """
    values = green.values
    power = np.abs(values) ** 2
    transmission = 0.25 * kappa ** 2 * power
    reflection = 1.0 + kappa * values.imag + transmission
    absorption = -0.5 * kappa * (kappa * power + 2.0 * values.imag)
    return Spectrum(green.omegas, absorption, transmission, reflection,
                    green.name)


@dataclass(frozen=True)
class Peak:
    position: float
    height: float
    fwhm: float
    engine: str

    def to_dict(self):
        return {'position': self.position, 'height': self.height,
                'fwhm': self.fwhm}


@dataclass(frozen=True)
class PeakTable:
    peaks: tuple
    engine: str

    def __iter__(self):
        return iter(self.peaks)

    def __len__(self):
        return len(self.peaks)

    @property
    def positions(self):
        return np.array([p.position for p in self.peaks])

    def nearest(self, omega):
        """The peak closest to `omega`, or None for an empty table."""
        if not self.peaks:
            return None
        return min(self.peaks, key=lambda p: abs(p.position - omega))

    def to_list(self):
        return [p.to_dict() for p in self.peaks]


def _refine(x, y, index):
    """Vertex of the parabola through the three samples around
    `index`.
    """
    xs = x[index - 1:index + 2] - x[index]
    a, b, c = np.polyfit(xs, y[index - 1:index + 2], 2)
    if a >= 0:
        return x[index], y[index]
    offset = min(max(-b / (2 * a), xs[0]), xs[2])
    return x[index] + offset, c - b * b / (4 * a)


def find_peaks(spectrum, min_height=0.0, min_prominence=DEFAULT_PROMINENCE):
    """Locate absorption maxima above `min_height` with at least
    `min_prominence`, refined by three-point parabolic interpolation.
    Widths are measured between the half-maximum crossings.
    """
    x = np.asarray(spectrum.omegas, dtype=float)
    y = np.asarray(spectrum.absorption, dtype=float)
    indices, _ = scipy.signal.find_peaks(
        y, height=max(min_height, 0.0), prominence=min_prominence)
    indices = indices[y[indices] > 0]
    if not len(indices):
        return PeakTable((), spectrum.engine)

    bases = (y[indices],
             np.zeros(len(indices), dtype=np.intp),
             np.full(len(indices), len(y) - 1, dtype=np.intp))
    _, _, left, right = scipy.signal.peak_widths(
        y, indices, rel_height=0.5, prominence_data=bases)
    samples = np.arange(len(x))
    fwhm = np.interp(right, samples, x) - np.interp(left, samples, x)

    peaks = []
    for index, width in zip(indices, fwhm):
        position, height = _refine(x, y, index)
        if height > min_height and height > 0:
            peaks.append(Peak(float(position), float(height), float(width),
                              spectrum.engine))
    log.debug(u'%s: %d peaks', spectrum.engine, len(peaks))
    return PeakTable(tuple(peaks), spectrum.engine)


@dataclass(frozen=True)
class PolaritonModes:
    """Complex mode frequencies of one chain depth, sorted by real
    part, with the photon weight of each eigenvector.
    """
    order: int
    eigenvalues: tuple
    photon_weights: tuple

    @property
    def frequencies(self):
        return np.array([z.real for z in self.eigenvalues])

    @property
    def linewidths(self):
        return np.array([-2 * z.imag for z in self.eigenvalues])

    def bright(self, threshold=0.05):
        """Eigenvalues whose photon weight reaches `threshold`."""
        return tuple(z for z, w in zip(self.eigenvalues, self.photon_weights)
                     if w >= threshold)

    def to_list(self):
        return [{'frequency': z.real, 'linewidth': -2 * z.imag,
                 'photon_weight': w}
                for z, w in zip(self.eigenvalues, self.photon_weights)]


def polariton_modes(spec, order):
    """Eigenvalues of ``[[H_ph,k − iκ/2, V_k], [V_k†, H_e,k − iγ/2]]``;
    order 0 gives the zeroth-order polaritons, order 1 the first-order
    polaritons displaced by one vibrational quantum.
    """
    block = model.build_block_operators(spec, order)
    n_ph = len(block.h_ph)
    matrix = np.block([
        [np.diag(block.h_ph - 0.5j * spec.cavity.kappa), block.V],
        [block.V.conj().T, np.diag(block.h_e - 0.5j * spec.gamma)],
    ])
    if not matrix.size:
        return PolaritonModes(order, (), ())
    values, vectors = scipy.linalg.eig(matrix)
    norms = np.sum(np.abs(vectors) ** 2, axis=0)
    weights = np.sum(np.abs(vectors[:n_ph]) ** 2, axis=0) / norms
    ranking = sorted(range(len(values)),
                     key=lambda i: (values[i].real, values[i].imag))
    return PolaritonModes(
        order,
        tuple(complex(values[i]) for i in ranking),
        tuple(float(weights[i]) for i in ranking))


def _tail(weight, delta, kappa, upper):
    if kappa == 0:
        return 0.0
    angle = math.atan(2 * delta / kappa)
    if upper:
        return weight * (0.5 - angle / math.pi)
    return weight * (0.5 + angle / math.pi)


def sum_rule(green, cavity):
    """−(1/π)∫Im D dω over the grid plus the analytic weight of the
    ``w/(ω − ω_ph + iκ/2)`` tails outside it, with the residue ``w``
    read off the grid ends.
    """
    x, values = green.omegas, green.values
    inside = -scipy.integrate.trapezoid(values.imag, x) / math.pi
    tails = 0.0
    for end, upper in ((0, False), (-1, True)):
        delta = x[end] - cavity.omega_ph
        weight = ((delta + 0.5j * cavity.kappa) * values[end]).real
        tails += _tail(weight, delta, cavity.kappa, upper)
    if abs(tails) > TAIL_WARNING:
        log.warning(u'%s: tails outside the grid carry %.3g of the weight',
                    green.name, tails)
        warnings.warn(
            u'grid too narrow: tail correction {0:.3g}'.format(tails),
            GridTooNarrowWarning, stacklevel=2)
    return float(inside + tails)


# Emitters.


def spectrum_csv(green, spectrum):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for row in zip(green.omegas, green.values.real, green.values.imag,
                   spectrum.absorption, spectrum.transmission,
                   spectrum.reflection):
        writer.writerow([format_float(x) for x in row])
    return out.getvalue()


def _dump(obj):
    return json.dumps(obj, indent=2) + '\n'


def peaks_json(tables):
    """JSON object mapping each run label to its peak array."""
    return _dump({label: table.to_list() for label, table in tables.items()})


def modes_json(modes):
    """JSON object mapping run labels to ``{order: [mode, ...]}``."""
    return _dump({label: {str(m.order): m.to_list() for m in entries}
                  for label, entries in modes.items()})
