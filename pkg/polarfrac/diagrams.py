"""Closed walks on the chain and the Dyson series they enumerate.

Chain nodes are laid out on a line, ``ph0, e0, ph1, e1, ...``, so node
position ``2n`` is the photon block of depth n and ``2n + 1`` the
excited block. A walk of order m is a closed path of 2m unit steps from
``ph0`` back to ``ph0``; its value is the corresponding term of the
Dyson series for D(ω).
"""
import enum
import json
import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from . import model
from . import engines
from .util import complex_pair
from .exceptions import DepthRangeError

__all__ = [
    'ChainNode', 'Walk', 'WalkClass', 'WalkTerm', 'enumerate_walks',
    'count_walks', 'classify_walk', 'evaluate_walk', 'partial_sum',
    'dyson_partial_sum', 'walk_class_sum', 'irreducible_order',
    'irreducible_self_energy', 'resummed_green', 'dyson_json',
    'WALK_ORDER_LIMIT']

log = logging.getLogger(__name__)

WALK_ORDER_LIMIT = 8


class ChainNode(namedtuple('ChainNode', ['kind', 'depth'])):
    __slots__ = ()

    @classmethod
    def at(cls, position):
        kind = model.BlockKind.EXCITED if position % 2 else \
            model.BlockKind.PHOTON
        return cls(kind, position // 2)

    @property
    def position(self):
        return 2 * self.depth + (self.kind is model.BlockKind.EXCITED)

    @property
    def propagator(self):
        if self.kind is model.BlockKind.PHOTON:
            return u'Gph{0}'.format(self.depth)
        return u'Ge{0}'.format(self.depth)


def _coupling_label(lower, upward):
    """Name of the coupling for a step between positions `lower` and
    ``lower + 1``.
    """
    name = u'{0}{1}'.format('v' if lower % 2 else 'V', lower // 2)
    return name if upward else name + u'†'


class WalkClass(enum.Enum):
    REDUCIBLE = 'reducible'
    IRREDUCIBLE = 'irreducible'


@dataclass(frozen=True)
class Walk:
    nodes: tuple

    def __post_init__(self):
        nodes = tuple(n if isinstance(n, ChainNode) else ChainNode.at(n)
                      for n in self.nodes)
        if not nodes or nodes[0].position or nodes[-1].position:
            raise ValueError(u'a walk starts and ends at ph0')
        for a, b in zip(nodes, nodes[1:]):
            if abs(a.position - b.position) != 1:
                raise ValueError(u'{0} and {1} are not chain neighbours'
                                 .format(a.propagator, b.propagator))
        object.__setattr__(self, 'nodes', nodes)

    @property
    def positions(self):
        return tuple(n.position for n in self.nodes)

    @property
    def steps(self):
        p = self.positions
        return tuple(b - a for a, b in zip(p, p[1:]))

    @property
    def order(self):
        return len(self.steps) // 2

    @property
    def raman_pairs(self):
        """Round trips through single-molecule couplings v_n."""
        p = self.positions
        return sum(min(a, b) % 2 for a, b in zip(p, p[1:])) // 2

    @property
    def scaling_exponent(self):
        """The walk scales as N^-exponent at fixed λ√N."""
        return self.raman_pairs

    @property
    def max_depth(self):
        return max(self.positions) // 2

    @property
    def is_reducible(self):
        return 0 in self.positions[1:-1]

    @property
    def is_x2(self):
        """Two Raman excursions confined to depth 1 (no v1 step), the
        class resummed by the X² expansion term.
        """
        return self.raman_pairs == 2 and max(self.positions) <= 3

    @property
    def ladder(self):
        p = self.positions
        factors = [self.nodes[0].propagator]
        for a, b, node in zip(p, p[1:], self.nodes[1:]):
            factors.append(_coupling_label(min(a, b), b > a))
            factors.append(node.propagator)
        return u'·'.join(factors)

    def __str__(self):
        return self.ladder


def enumerate_walks(m, n_molecules):
    """All closed walks of 2m steps from ph0 for an N-molecule chain, in
    lexicographic order of their step sequences (down before up).
    """
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise DepthRangeError(u'walk order', m, 0, u'∞')
    if n_molecules < 1:
        raise ValueError(u'the chain needs at least one molecule')
    top = 2 * n_molecules
    found = []

    def extend(path, remaining):
        if not remaining:
            found.append(path)
            return
        here = path[-1]
        for step in (-1, 1):
            there = here + step
            if 0 <= there <= min(top, remaining - 1):
                extend(path + (there,), remaining - 1)

    extend((0,), 2 * int(m))
    return [Walk(path) for path in found]


def count_walks(m, n_molecules):
    """Closed 2m-step walks from ph0 counted as ``(A^2m)[0, 0]`` for the
    adjacency matrix A of the chain.
    """
    size = 2 * n_molecules + 1
    adjacency = np.eye(size, k=1, dtype=np.int64) + \
        np.eye(size, k=-1, dtype=np.int64)
    return int(np.linalg.matrix_power(adjacency, 2 * m)[0, 0])


def classify_walk(walk):
    if walk.is_reducible:
        return WalkClass.REDUCIBLE
    return WalkClass.IRREDUCIBLE


@dataclass(frozen=True, eq=False)
class WalkTerm:
    walk: Walk
    factors: str
    omegas: np.ndarray
    value: np.ndarray
    scaling_exponent: int
    reducible: bool

    @property
    def classification(self):
        return classify_walk(self.walk)


def _propagator(spec, node, omegas):
    block = model.build_block_operators(spec, node.depth)
    if node.kind is model.BlockKind.PHOTON:
        return engines.bare_resolvent(omegas, block.h_ph, spec.cavity.kappa)
    return engines.bare_resolvent(omegas, block.h_e, spec.gamma)


def _coupling(spec, a, b):
    lower = min(a, b)
    block = model.build_block_operators(spec, lower // 2)
    matrix = block.v if lower % 2 else block.V
    return matrix if b > a else matrix.conj().T


def _walk_values(spec, walk, omegas, stripped):
    positions = walk.positions
    last = len(positions) - 1
    row = np.ones((len(omegas), 1), dtype=complex)
    if not stripped:
        row = row * _propagator(spec, walk.nodes[0], omegas)
    for i, (a, b) in enumerate(zip(positions, positions[1:]), 1):
        row = row @ _coupling(spec, a, b)
        if i < last or not stripped:
            row = row * _propagator(spec, walk.nodes[i], omegas)
    return row[:, 0]


def evaluate_walk(spec, walk, omega, stripped=False):
    """Evaluate the Dyson-series term of `walk` at `omega`.

    The value is ``G_ph0·(coupling·G)···`` with V, V†, v, v† chosen by
    step direction; with `stripped` the two outer ``G_ph0`` factors are
    left out.
    """
    top = 2 * spec.n_molecules
    if max(walk.positions) > top:
        raise DepthRangeError(u'walk position', max(walk.positions), 0, top)
    omegas = np.atleast_1d(np.asarray(omega, dtype=float))
    return WalkTerm(walk, walk.ladder, omegas,
                    _walk_values(spec, walk, omegas, stripped),
                    walk.scaling_exponent, walk.is_reducible)


def _check_order(m_max, limit):
    if isinstance(m_max, bool) or int(m_max) != m_max \
            or not 0 <= m_max <= limit:
        raise DepthRangeError(u'Dyson order', m_max, 0, limit)
    return int(m_max)


def partial_sum(spec, omegas, m_max, select=None, threads=1,
                limit=WALK_ORDER_LIMIT):
    """Sum the walks of order ``0 .. m_max`` accepted by `select` on
    `omegas`, order by order in enumeration order.
    """
    m_max = _check_order(m_max, limit)
    walks = [w for m in range(m_max + 1)
             for w in enumerate_walks(m, spec.n_molecules)
             if select is None or select(w)]
    log.debug(u'summing %d walks through order %d', len(walks), m_max)

    def evaluate(chunk, solver):
        total = np.zeros(len(chunk), dtype=complex)
        for walk in walks:
            total += _walk_values(spec, walk, chunk, False)
        return solver.chunk(total)

    return engines.sweep(spec, omegas,
                         engines.Engine(engines.EngineKind.DYSON, m_max),
                         evaluate, threads)


def dyson_partial_sum(spec, omegas, m_max, threads=1,
                      limit=WALK_ORDER_LIMIT):
    """``G_ph0 + Σ_(m ≤ m_max)`` of every closed walk of order m."""
    return partial_sum(spec, omegas, m_max, threads=threads, limit=limit)


def walk_class_sum(spec, omegas, m_max, raman_pairs, threads=1,
                   limit=WALK_ORDER_LIMIT):
    """The partial Dyson sum restricted to walks with `raman_pairs`
    round trips through v couplings, i.e. the N^-raman_pairs class.
    """
    return partial_sum(spec, omegas, m_max,
                       lambda w: w.raman_pairs == raman_pairs,
                       threads, limit)


def irreducible_order(spec, omegas, m):
    """Σ over irreducible walks of order m of their stripped values,
    the λ^2m part of Σ_e,0.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    total = np.zeros(len(omegas), dtype=complex)
    for walk in enumerate_walks(m, spec.n_molecules):
        if walk.order and not walk.is_reducible:
            total += _walk_values(spec, walk, omegas, True)
    return total


def irreducible_self_energy(spec, omegas, m_max):
    """The self-energy built from irreducible walks through order
    `m_max`.
    """
    _check_order(m_max, WALK_ORDER_LIMIT)
    return sum(irreducible_order(spec, omegas, m)
               for m in range(1, int(m_max) + 1))


def resummed_green(spec, omegas, m_max):
    """``1/(ω − ω_ph + iκ/2 − Σ_irr)``: the geometric resummation of all
    reducible walks built from irreducible pieces up to `m_max`.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    sigma = irreducible_self_energy(spec, omegas, m_max)
    return 1.0 / (omegas - spec.cavity.omega_ph
                  + 0.5j * spec.cavity.kappa - sigma)


def dyson_json(spec, omegas, m_max):
    """Walks of every order through `m_max` with their ladders,
    classification, scaling exponent and values at `omegas`.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    _check_order(m_max, WALK_ORDER_LIMIT)
    orders = []
    for m in range(int(m_max) + 1):
        entries = []
        for walk in enumerate_walks(m, spec.n_molecules):
            term = evaluate_walk(spec, walk, omegas)
            entries.append({
                'ladder': term.factors,
                'class': term.classification.value,
                'scaling_exponent': term.scaling_exponent,
                'values': [complex_pair(v) for v in term.value],
            })
        orders.append({'m': m, 'count': len(entries), 'walks': entries})
    document = {'omegas': omegas.tolist(), 'orders': orders}
    return json.dumps(document, indent=2, ensure_ascii=False) + '\n'
