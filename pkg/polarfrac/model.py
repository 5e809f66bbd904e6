"""Ensemble description and the block-tridiagonal chain that represents
the first excitation manifold of N molecules in a single-mode cavity.

The chain alternates photon blocks ``H_ph,n`` (one photon, ``n``
molecules carrying a ground-state phonon) and excited blocks ``H_e,n``
(no photon, one molecule electronically excited, ``n`` phonon-carrying
spectators). Collective couplings ``V_n`` connect ``H_ph,n`` to ``H_e,n``
and single-molecule couplings ``v_n`` connect ``H_e,n`` to ``H_ph,n+1``.
All energies are referenced to the all-ground initial state.
"""
import enum
import math
import logging
import functools
from dataclasses import dataclass, field, replace

import numpy as np

from . import util
from .exceptions import SpecError, DepthRangeError, SizingError

__all__ = [
    'BlockKind', 'CavitySpec', 'SpeciesSpec', 'EnsembleSpec', 'PhononConfig',
    'BlockBasis', 'BlockOperators', 'enumerate_block_basis',
    'build_block_operators', 'block_dimensions', 'dense_dimension',
    'assemble_dense_h1', 'DEFAULT_DIMENSION_LIMIT']

log = logging.getLogger(__name__)

DEFAULT_DIMENSION_LIMIT = 20000
FC_NORM_SLACK = 1e-12


class BlockKind(enum.Enum):
    PHOTON = 'photon'
    EXCITED = 'excited'


def _finite(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise SpecError(u'{0} must be a real number, not {1!r}'.format(
            name, value))
    if not math.isfinite(value):
        raise SpecError(u'{0} must be finite'.format(name))
    return value


def _increasing(levels, name):
    levels = tuple(_finite(x, name) for x in levels)
    if not levels:
        raise SpecError(u'{0} must not be empty'.format(name))
    for lower, upper in zip(levels, levels[1:]):
        if not upper > lower:
            raise SpecError(
                u'{0} must be strictly increasing'.format(name))
    return levels


@dataclass(frozen=True)
class CavitySpec:
    """The single cavity mode: frequency `omega_ph` and decay rate
    `kappa`.
    """
    omega_ph: float
    kappa: float = 0.0

    def __post_init__(self):
        omega_ph = _finite(self.omega_ph, 'omega_ph')
        kappa = _finite(self.kappa, 'kappa')
        if omega_ph <= 0:
            raise SpecError(u'omega_ph must be positive')
        if kappa < 0:
            raise SpecError(u'kappa must be non-negative')
        object.__setattr__(self, 'omega_ph', omega_ph)
        object.__setattr__(self, 'kappa', kappa)

    def to_dict(self):
        return {'omega_ph': self.omega_ph, 'kappa': self.kappa}


@dataclass(frozen=True)
class SpeciesSpec:
    """A population of identical molecules.

    `fc_overlaps[j'][j]` is the Franck-Condon overlap between excited
    vibrational level ``j'`` and ground vibrational level ``j``.
    """
    count: int
    ground_levels: tuple
    excited_levels: tuple
    fc_overlaps: tuple

    def __post_init__(self):
        if isinstance(self.count, bool) or int(self.count) != self.count:
            raise SpecError(u'count must be an integer')
        count = int(self.count)
        if count < 1:
            raise SpecError(u'count must be positive')
        ground = _increasing(self.ground_levels, 'ground_levels')
        excited = _increasing(self.excited_levels, 'excited_levels')

        rows = tuple(tuple(complex(x) for x in row)
                     for row in self.fc_overlaps)
        if len(rows) != len(excited):
            raise SpecError(
                u'fc_overlaps must have one row per excited level '
                u'({0}), not {1}'.format(len(excited), len(rows)))
        for index, row in enumerate(rows):
            if len(row) != len(ground):
                raise SpecError(
                    u'fc_overlaps row {0} must have one entry per ground '
                    u'level ({1}), not {2}'.format(
                        index, len(ground), len(row)))
            norm = math.sqrt(sum(abs(x) ** 2 for x in row))
            if norm > 1 + FC_NORM_SLACK:
                raise SpecError(
                    u'fc_overlaps row {0} has norm {1!r} > 1'.format(
                        index, norm))

        object.__setattr__(self, 'count', count)
        object.__setattr__(self, 'ground_levels', ground)
        object.__setattr__(self, 'excited_levels', excited)
        object.__setattr__(self, 'fc_overlaps', rows)

    @property
    def m_ground(self):
        return len(self.ground_levels)

    @property
    def m_excited(self):
        return len(self.excited_levels)

    @property
    def overlaps(self):
        return np.array(self.fc_overlaps, dtype=complex)

    def vibrational_gaps(self):
        """Ground-state phonon energies ``ε_g,j − ε_g,0`` for j ≥ 1."""
        base = self.ground_levels[0]
        return tuple(level - base for level in self.ground_levels[1:])

    def to_dict(self):
        return {
            'count': self.count,
            'ground_levels': list(self.ground_levels),
            'excited_levels': list(self.excited_levels),
            'fc_overlaps': [[util.complex_pair(x) for x in row]
                            for row in self.fc_overlaps],
        }


@dataclass(frozen=True)
class EnsembleSpec:
    """Cavity plus molecular species, the single source of every matrix
    element. `coupling` is the single-molecule strength λ; the collective
    coupling λ√N is derived.
    """
    cavity: CavitySpec
    species: tuple
    coupling: float
    gamma: float = 0.0

    def __post_init__(self):
        species = tuple(self.species)
        if not species:
            raise SpecError(u'species must not be empty')
        for item in species:
            if not isinstance(item, SpeciesSpec):
                raise SpecError(u'species entries must be SpeciesSpec')
        gamma = _finite(self.gamma, 'gamma')
        if gamma < 0:
            raise SpecError(u'gamma must be non-negative')
        object.__setattr__(self, 'species', species)
        object.__setattr__(self, 'coupling', _finite(self.coupling, 'lambda'))
        object.__setattr__(self, 'gamma', gamma)

    @property
    def n_molecules(self):
        return sum(s.count for s in self.species)

    @property
    def collective_coupling(self):
        return self.coupling * math.sqrt(self.n_molecules)

    @property
    def electronic_gap(self):
        """The lowest vertical transition ``ε_e,0 − ε_g,0`` over species."""
        return min(s.excited_levels[0] - s.ground_levels[0]
                   for s in self.species)

    def phonon_channels(self):
        """The ``(species, level)`` pairs that can carry a phonon, in
        basis order.
        """
        return [(index, level)
                for index, s in enumerate(self.species)
                for level in range(1, s.m_ground)]

    def vibrational_gaps(self):
        gaps = set()
        for s in self.species:
            gaps.update(s.vibrational_gaps())
        return tuple(sorted(gaps))

    def to_dict(self):
        return {
            'cavity': self.cavity.to_dict(),
            'lambda': self.coupling,
            'gamma': self.gamma,
            'species': [s.to_dict() for s in self.species],
        }

    @property
    def spec_hash(self):
        return util.digest(self.to_dict())

    def resized(self, total):
        """Return the same ensemble with `total` molecules, species
        proportions kept and the collective coupling λ√N held fixed.
        """
        total = int(total)
        current = self.n_molecules
        if total == current:
            return self
        counts = []
        for s in self.species:
            exact = s.count * total / current
            rounded = int(round(exact))
            if rounded < 1 or abs(exact - rounded) > 1e-9:
                raise SpecError(
                    u'cannot split N={0} over species in the ratio {1}'.format(
                        total, u':'.join(str(x.count) for x in self.species)))
            counts.append(rounded)
        species = tuple(replace(s, count=c)
                        for s, c in zip(self.species, counts))
        return replace(self, species=species,
                       coupling=self.collective_coupling / math.sqrt(total))


@dataclass(frozen=True)
class PhononConfig:
    """Ground-state phonon occupations: one tuple per species holding
    ``n^s_j`` for ``j = 1 .. M_g − 1``.
    """
    occupations: tuple

    @property
    def order(self):
        return sum(sum(o) for o in self.occupations)

    def load(self, species):
        """Molecules of `species` carrying a phonon."""
        return sum(self.occupations[species])

    def count(self, species, level):
        return self.occupations[species][level - 1]

    def added(self, species, level):
        occupations = list(self.occupations)
        row = list(occupations[species])
        row[level - 1] += 1
        occupations[species] = tuple(row)
        return PhononConfig(tuple(occupations))

    def energy(self, spec):
        total = 0.0
        for s, row in zip(spec.species, self.occupations):
            for gap, n in zip(s.vibrational_gaps(), row):
                total += gap * n
        return total

    def as_mapping(self):
        return {(s, j + 1): n
                for s, row in enumerate(self.occupations)
                for j, n in enumerate(row) if n}

    def sort_key(self):
        return tuple(-n for row in self.occupations for n in row)


@dataclass(frozen=True)
class BlockBasis:
    """The ordered basis of one chain block. Photon states are
    `PhononConfig` objects; excited states are ``(config, (s, j'))``
    pairs.
    """
    kind: BlockKind
    depth: int
    states: tuple

    def __len__(self):
        return len(self.states)

    @functools.cached_property
    def positions(self):
        return {state: index for index, state in enumerate(self.states)}


@dataclass(frozen=True, eq=False)
class BlockOperators:
    """Diagonal energies and couplings of the chain at one depth."""
    depth: int
    photon: BlockBasis
    excited: BlockBasis
    h_ph: np.ndarray
    h_e: np.ndarray
    V: np.ndarray
    v: np.ndarray = field(repr=False)


def _compositions(total, boxes):
    """Yield every tuple of `boxes` non-negative integers summing to
    `total`.
    """
    if boxes == 0:
        if total == 0:
            yield ()
        return
    if boxes == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, boxes - 1):
            yield (first,) + rest


def _configurations(spec, order):
    species = spec.species

    def distribute(index, remaining):
        if index == len(species):
            if remaining == 0:
                yield ()
            return
        boxes = species[index].m_ground - 1
        top = min(remaining, species[index].count) if boxes else 0
        for load in range(top, -1, -1):
            for occupation in _compositions(load, boxes):
                for rest in distribute(index + 1, remaining - load):
                    yield (occupation,) + rest

    configs = [PhononConfig(c) for c in distribute(0, order)]
    configs.sort(key=PhononConfig.sort_key)
    return configs


@functools.lru_cache(maxsize=4096)
def _basis(spec, depth, kind):
    # Out-of-chain depths give empty blocks.
    if depth < 0 or depth > spec.n_molecules:
        return BlockBasis(kind, depth, ())
    configs = _configurations(spec, depth)
    if kind is BlockKind.PHOTON:
        return BlockBasis(kind, depth, tuple(configs))

    states = []
    for config in configs:
        for s, species in enumerate(spec.species):
            if config.load(s) + 1 > species.count:
                continue
            for level in range(species.m_excited):
                states.append((config, (s, level)))
    return BlockBasis(kind, depth, tuple(states))


def _check_depth(spec, depth, kind):
    top = spec.n_molecules
    if kind is BlockKind.EXCITED:
        top -= 1
    if isinstance(depth, bool) or int(depth) != depth \
            or not 0 <= depth <= top:
        raise DepthRangeError(
            u'{0} block depth'.format(kind.value), depth, 0, top)
    return int(depth)


def enumerate_block_basis(spec, depth, kind):
    """List the basis states of the photon or excited block at chain
    depth `depth` in their deterministic order.

    Photon configurations are ordered lexicographically by occupation,
    species first, with larger occupations of earlier channels leading;
    excited states follow their configuration, then ``(s, j')``. An
    over-constrained block is returned empty.
    """
    kind = BlockKind(kind)
    depth = _check_depth(spec, depth, kind)
    return _basis(spec, depth, kind)


def block_dimensions(spec, depth):
    """Return ``(dim H_ph,n, dim H_e,n)`` without building matrices."""
    return (len(_basis(spec, depth, BlockKind.PHOTON)),
            len(_basis(spec, depth, BlockKind.EXCITED)))


def _frozen(array):
    array.setflags(write=False)
    return array


@functools.lru_cache(maxsize=1024)
def build_block_operators(spec, depth):
    """Build ``h_ph``, ``h_e``, ``V_n`` and ``v_n`` at chain depth
    `depth` (0 ≤ depth ≤ N; the excited block at depth N is empty).
    """
    depth = _check_depth(spec, depth, BlockKind.PHOTON)
    photon = _basis(spec, depth, BlockKind.PHOTON)
    excited = _basis(spec, depth, BlockKind.EXCITED)
    upper = _basis(spec, depth + 1, BlockKind.PHOTON)
    lam = spec.coupling
    overlaps = [s.overlaps for s in spec.species]

    h_ph = np.array([spec.cavity.omega_ph + c.energy(spec)
                     for c in photon.states], dtype=float)
    h_e = np.array([spec.species[s].excited_levels[level]
                    - spec.species[s].ground_levels[0] + c.energy(spec)
                    for c, (s, level) in excited.states], dtype=float)

    V = np.zeros((len(photon), len(excited)), dtype=complex)
    for col, (config, (s, level)) in enumerate(excited.states):
        row = photon.positions[config]
        ground = spec.species[s].count - config.load(s)
        V[row, col] = lam * math.sqrt(ground) * overlaps[s][level, 0]

    v = np.zeros((len(excited), len(upper)), dtype=complex)
    for row, (config, (s, level)) in enumerate(excited.states):
        for j in range(1, spec.species[s].m_ground):
            col = upper.positions[config.added(s, j)]
            v[row, col] = (lam * math.sqrt(config.count(s, j) + 1)
                           * np.conj(overlaps[s][level, j]))

    return BlockOperators(depth, photon, excited, _frozen(h_ph),
                          _frozen(h_e), _frozen(V), _frozen(v))


def dense_dimension(spec, max_depth=None):
    """Total dimension of the dense H₁ holding all blocks of depth at
    most `max_depth` (default: the whole chain).
    """
    top = spec.n_molecules if max_depth is None else max_depth
    return sum(sum(block_dimensions(spec, n)) for n in range(top + 1))


def assemble_dense_h1(spec, max_depth=None, limit=DEFAULT_DIMENSION_LIMIT):
    """Assemble the full non-Hermitian first-manifold Hamiltonian with
    ``−iκ/2`` on photon diagonals and ``−iγ/2`` on excited diagonals.

    Blocks are stacked ``ph0, e0, ph1, e1, ...`` up to depth `max_depth`.
    Returns the matrix and the row index of the photon vacuum state.
    """
    top = spec.n_molecules if max_depth is None else _check_depth(
        spec, max_depth, BlockKind.PHOTON)
    dimension = dense_dimension(spec, top)
    if dimension > limit:
        raise SizingError(dimension, limit)
    log.debug(u'assembling dense H1 of dimension %d', dimension)

    blocks = [build_block_operators(spec, n) for n in range(top + 1)]
    offsets = []
    start = 0
    for block in blocks:
        offsets.append((start, start + len(block.h_ph)))
        start += len(block.h_ph)
        offsets.append((start, start + len(block.h_e)))
        start += len(block.h_e)

    H = np.zeros((dimension, dimension), dtype=complex)
    kappa = spec.cavity.kappa
    for n, block in enumerate(blocks):
        (p0, p1), (e0, e1) = offsets[2 * n], offsets[2 * n + 1]
        H[range(p0, p1), range(p0, p1)] = block.h_ph - 0.5j * kappa
        H[range(e0, e1), range(e0, e1)] = block.h_e - 0.5j * spec.gamma
        H[p0:p1, e0:e1] = block.V
        H[e0:e1, p0:p1] = block.V.conj().T
        if n < top:
            q0, q1 = offsets[2 * n + 2]
            H[e0:e1, q0:q1] = block.v
            H[q0:q1, e0:e1] = block.v.conj().T
    return H, 0
