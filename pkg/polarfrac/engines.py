"""Engines for the retarded photon Green's function D(ω).

Every engine is a pure function of the ensemble and the frequency grid.
Grids are evaluated in contiguous chunks, optionally on a thread pool,
and the chunks are concatenated back in grid order.
"""
import re
import enum
import logging
import warnings
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import model
from .exceptions import DepthRangeError, SpecError, IllConditionedWarning

__all__ = [
    'EngineKind', 'Engine', 'GreenResult', 'CONDITION_LIMIT', 'dense_green',
    'cf_full', 'cf_truncated', 'd0', 'd1', 'd2_x2', 'expansion_sum',
    'evaluate', 'excited_self_energy', 'self_energy', 'sweep',
    'bare_resolvent']

log = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12

EXPANSION_TERMS = ('d0', 'd1', 'd2_x2')


class EngineKind(enum.Enum):
    DENSE = 'dense'
    CONTINUED_FRACTION = 'cf_full'
    TRUNCATED = 'cf_truncated'
    EXPANSION_TERM = 'term'
    EXPANSION_SUM = 'sum'
    DYSON = 'dyson'


_TRUNCATED = re.compile(r'cf_truncated(?:\((\d+)\)|:(\d+))$')
_DYSON = re.compile(r'dyson(?:\((\d+)\)|:(\d+))$')


@dataclass(frozen=True)
class Engine:
    """Identity of the method that produced a Green's function.

    `order` is the truncation depth, the expansion order or the Dyson
    order, depending on `kind`.
    """
    kind: EngineKind
    order: int = None

    @classmethod
    def parse(cls, text):
        """Parse labels such as ``cf_full``, ``cf_truncated(2)``,
        ``cf_truncated:2``, ``d1``, ``d0+d1`` or ``dyson(4)``.
        """
        label = str(text).strip().lower().replace(' ', '')
        if label == 'dense':
            return cls(EngineKind.DENSE)
        if label == 'cf_full':
            return cls(EngineKind.CONTINUED_FRACTION)
        for pattern, kind in ((_TRUNCATED, EngineKind.TRUNCATED),
                              (_DYSON, EngineKind.DYSON)):
            match = pattern.match(label)
            if match:
                return cls(kind, int(match.group(1) or match.group(2)))
        if label in EXPANSION_TERMS:
            return cls(EngineKind.EXPANSION_TERM,
                       EXPANSION_TERMS.index(label))
        parts = label.split('+')
        if len(parts) > 1 and tuple(parts) == EXPANSION_TERMS[:len(parts)]:
            return cls(EngineKind.EXPANSION_SUM, len(parts) - 1)
        raise ValueError(u'unknown engine {0!r}'.format(text))

    @property
    def label(self):
        if self.kind is EngineKind.TRUNCATED:
            return u'cf_truncated({0})'.format(self.order)
        if self.kind is EngineKind.DYSON:
            return u'dyson({0})'.format(self.order)
        if self.kind is EngineKind.EXPANSION_TERM:
            return EXPANSION_TERMS[self.order]
        if self.kind is EngineKind.EXPANSION_SUM:
            return u'+'.join(EXPANSION_TERMS[:self.order + 1])
        return self.kind.value

    @property
    def slug(self):
        """The label made safe for file names."""
        return (self.label.replace('(', '-').replace(')', '')
                .replace('+', '_'))

    @property
    def passive(self):
        """Whether the engine yields a full, causal Green's function."""
        return self.kind in (EngineKind.DENSE, EngineKind.CONTINUED_FRACTION,
                             EngineKind.TRUNCATED)

    def __str__(self):
        return self.label


@dataclass(frozen=True, eq=False)
class GreenResult:
    """Samples of D(ω) on an ascending grid.

    `ill_conditioned` and `failed` hold the grid indices flagged by the
    engine. `reference` names the engine subtracted from this one when
    the result is a difference of two engines.
    """
    omegas: np.ndarray
    values: np.ndarray
    engine: Engine
    spec_hash: str
    ill_conditioned: tuple = ()
    failed: tuple = ()
    reference: Engine = None

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if omegas.ndim != 1 or values.shape != omegas.shape:
            raise ValueError(u'values must match the one-dimensional grid')
        if np.any(np.diff(omegas) <= 0):
            raise ValueError(u'omegas must be strictly ascending')
        object.__setattr__(self, 'omegas', omegas)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.omegas)

    @property
    def name(self):
        if self.reference is None:
            return self.engine.label
        return u'{0}-{1}'.format(self.engine.label, self.reference.label)

    def _check_grid(self, other):
        if not np.array_equal(self.omegas, other.omegas):
            raise ValueError(u'results are sampled on different grids')

    def difference(self, other):
        """Return ``self − other`` as a difference result."""
        self._check_grid(other)
        return GreenResult(
            self.omegas, self.values - other.values, self.engine,
            self.spec_hash,
            tuple(sorted(set(self.ill_conditioned)
                         | set(other.ill_conditioned))),
            tuple(sorted(set(self.failed) | set(other.failed))),
            other.engine)

    def relative_difference(self, other):
        """``max|self − other| / max|other|`` over the grid."""
        self._check_grid(other)
        scale = np.max(np.abs(other.values))
        return float(np.max(np.abs(self.values - other.values)) / scale)


# Frequency sweeps.

_Chunk = namedtuple('_Chunk', ['values', 'ill', 'failed'])


class _Solver(object):
    """Applies inverses of stacked per-ω matrices through linear solves
    and records the frequencies whose condition estimate is too large.
    """
    def __init__(self, size, cond_limit):
        self.cond_limit = cond_limit
        self.ill = np.zeros(size, dtype=bool)
        self.failed = np.zeros(size, dtype=bool)

    def solve(self, matrices, rhs):
        """Solve ``matrices[i] x[i] = rhs[i]`` for every frequency."""
        count, dim = matrices.shape[0], matrices.shape[-1]
        rhs = np.broadcast_to(rhs, (count, dim) + rhs.shape[-1:])
        if dim == 0 or rhs.shape[-1] == 0:
            return np.zeros(rhs.shape, dtype=complex)
        if dim == 1:
            pivots = matrices[:, 0, 0]
            self.failed |= pivots == 0
            with np.errstate(divide='ignore', invalid='ignore'):
                return rhs / pivots[:, None, None]

        with np.errstate(divide='ignore', invalid='ignore'):
            self.ill |= np.linalg.cond(matrices) > self.cond_limit
        try:
            return np.linalg.solve(matrices, rhs)
        except np.linalg.LinAlgError:
            out = np.full(rhs.shape, np.nan, dtype=complex)
            for i in range(count):
                try:
                    out[i] = scipy.linalg.solve(matrices[i], rhs[i])
                except np.linalg.LinAlgError:
                    self.failed[i] = True
            return out

    def sandwich(self, left, matrices, right):
        """``left · matrices⁻¹ · right`` for every frequency."""
        return left @ self.solve(matrices, right)

    def chunk(self, values):
        return _Chunk(values, self.ill, self.failed | ~np.isfinite(values))


def _shifted(omegas, energies, loss, sigma=None):
    """Stack of ``ω − diag(energies) + i·loss/2 − Σ(ω)``."""
    dim = len(energies)
    out = np.zeros((len(omegas), dim, dim), dtype=complex)
    index = np.arange(dim)
    out[:, index, index] = omegas[:, None] - energies[None, :] + 0.5j * loss
    if sigma is not None:
        out -= sigma
    return out


def bare_resolvent(omegas, energies, loss):
    """Diagonal of the bare resolvent ``(ω − H + i·loss/2)⁻¹``."""
    return 1.0 / (omegas[:, None] - energies[None, :] + 0.5j * loss)


def sweep(spec, omegas, engine, evaluate, threads=1,
          cond_limit=CONDITION_LIMIT):
    """Run `evaluate(chunk, solver)` over the grid and collect the
    chunks into a `GreenResult` tagged with `engine`.
    """
    omegas = np.asarray(omegas, dtype=float)

    def run(chunk):
        return evaluate(chunk, _Solver(len(chunk), cond_limit))

    if threads is None or threads <= 1 or len(omegas) < 2 * threads:
        parts = [run(omegas)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, np.array_split(omegas, threads)))

    values = np.concatenate([p.values for p in parts])
    ill = np.concatenate([p.ill for p in parts])
    failed = np.concatenate([p.failed for p in parts])
    if ill.any():
        log.warning(u'%s: %d of %d frequencies are ill-conditioned',
                    engine.label, ill.sum(), len(omegas))
        warnings.warn(
            u'{0}: condition estimate above {1:g} at {2} frequencies'.format(
                engine.label, cond_limit, ill.sum()),
            IllConditionedWarning, stacklevel=3)
    if failed.any():
        log.error(u'%s: solve failed at %d frequencies',
                  engine.label, failed.sum())
    return GreenResult(omegas, values, engine, spec.spec_hash,
                       tuple(np.flatnonzero(ill).tolist()),
                       tuple(np.flatnonzero(failed).tolist()))


def _cavity_green(spec, omegas, sigma):
    """D = 1/(ω − ω_ph + iκ/2 − Σ_e,0)."""
    return 1.0 / (omegas - spec.cavity.omega_ph
                  + 0.5j * spec.cavity.kappa - sigma)


# Continued fractions.


def _phonon_capacity(spec):
    return sum(s.count for s in spec.species if s.m_ground > 1)


def excited_self_energy(spec, omegas, stop, solver):
    """Evaluate Σ_e,0(ω) of the chain cut after the excited block at
    depth `stop` by the backward recursion.

    When `stop` is the last excited block (N − 1) the terminal photon
    block H_ph,N is kept, so the recursion covers the whole chain.
    """
    n = spec.n_molecules
    kappa, gamma = spec.cavity.kappa, spec.gamma
    start = min(stop, _phonon_capacity(spec))

    sigma_ph = None
    if start == n - 1:
        top = model.build_block_operators(spec, n)
        below = model.build_block_operators(spec, n - 1)
        sigma_ph = solver.sandwich(
            below.v, _shifted(omegas, top.h_ph, kappa), below.v.conj().T)

    for depth in range(start, -1, -1):
        block = model.build_block_operators(spec, depth)
        sigma_e = solver.sandwich(
            block.V, _shifted(omegas, block.h_e, gamma, sigma_ph),
            block.V.conj().T)
        if depth == 0:
            return sigma_e[:, 0, 0]
        below = model.build_block_operators(spec, depth - 1)
        sigma_ph = solver.sandwich(
            below.v, _shifted(omegas, block.h_ph, kappa, sigma_e),
            below.v.conj().T)


def self_energy(spec, omegas, stop=None, cond_limit=CONDITION_LIMIT):
    """Σ_e,0 on `omegas` for the chain cut at excited depth `stop`
    (default: the whole chain).
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if stop is None:
        stop = spec.n_molecules - 1
    return excited_self_energy(spec, omegas, stop,
                               _Solver(len(omegas), cond_limit))


def cf_full(spec, omegas, threads=1, cond_limit=CONDITION_LIMIT):
    """D(ω) from the full matrix continued fraction."""
    stop = spec.n_molecules - 1

    def evaluate(chunk, solver):
        sigma = excited_self_energy(spec, chunk, stop, solver)
        return solver.chunk(_cavity_green(spec, chunk, sigma))

    return sweep(spec, omegas, Engine(EngineKind.CONTINUED_FRACTION),
                 evaluate, threads, cond_limit)


def cf_truncated(spec, omegas, k, threads=1, cond_limit=CONDITION_LIMIT):
    """D(ω) from the continued fraction terminated at the excited block
    of depth `k`, exact through O(N^-k).
    """
    top = spec.n_molecules - 1
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= top:
        raise DepthRangeError(u'truncation depth', k, 0, top)
    k = int(k)

    def evaluate(chunk, solver):
        sigma = excited_self_energy(spec, chunk, k, solver)
        return solver.chunk(_cavity_green(spec, chunk, sigma))

    return sweep(spec, omegas, Engine(EngineKind.TRUNCATED, k),
                 evaluate, threads, cond_limit)


# Closed-form 1/N expansion terms.


def _expansion_terms(spec, omegas, solver, order):
    """Return ``[d0, d1, d2_x2][:order + 1]`` on the grid."""
    gamma, kappa = spec.gamma, spec.cavity.kappa
    zeroth = model.build_block_operators(spec, 0)
    ge0 = bare_resolvent(omegas, zeroth.h_e, gamma)
    weighted = zeroth.V * ge0[:, None, :]
    rayleigh = (weighted @ zeroth.V.conj().T)[:, 0, 0]
    d_zero = _cavity_green(spec, omegas, rayleigh)
    terms = [d_zero]
    if order == 0:
        return terms

    first = model.build_block_operators(spec, 1)
    ge1 = bare_resolvent(omegas, first.h_e, gamma)
    # V0 Ge0 v0 and v0† Ge0 V0†.
    row = weighted @ zeroth.v
    col = zeroth.v.conj().T @ (ge0[:, :, None] * zeroth.V.conj().T)
    sigma1 = (first.V * ge1[:, None, :]) @ first.V.conj().T
    dressed = _shifted(omegas, first.h_ph, kappa, sigma1)
    inner = solver.solve(dressed, col)
    x1 = (row @ inner)[:, 0, 0]
    terms.append(d_zero ** 2 * x1)
    if order == 1:
        return terms

    # V0 Ge0 X² V0† with X = v0 P1 v0† Ge0.
    raman = zeroth.v.conj().T @ (ge0[:, :, None] * zeroth.v)
    x2 = (row @ solver.solve(dressed, raman @ inner))[:, 0, 0]
    terms.append(d_zero ** 3 * x1 ** 2 + d_zero ** 2 * x2)
    return terms


def _need_two(spec, what):
    if spec.n_molecules < 2:
        raise SpecError(u'{0} needs at least two molecules'.format(what))


def _term(spec, omegas, order, threads, cond_limit):
    def evaluate(chunk, solver):
        values = _expansion_terms(spec, chunk, solver, order)[order]
        return solver.chunk(values)

    return sweep(spec, omegas, Engine(EngineKind.EXPANSION_TERM, order),
                 evaluate, threads, cond_limit)


def d0(spec, omegas, threads=1, cond_limit=CONDITION_LIMIT):
    """Zeroth-order term: the bare polariton doublet of linear optics."""
    return _term(spec, omegas, 0, threads, cond_limit)


def d1(spec, omegas, threads=1, cond_limit=CONDITION_LIMIT):
    """O(1/N) term: sequential Stokes and anti-Stokes Raman scattering
    through the first-order polaritons.
    """
    _need_two(spec, 'd1')
    return _term(spec, omegas, 1, threads, cond_limit)


def d2_x2(spec, omegas, threads=1, cond_limit=CONDITION_LIMIT):
    """The part of the O(1/N²) term that is quadratic in the Raman
    excursion operator X; the remaining second-order part is only
    available through `cf_truncated` with k = 2.
    """
    _need_two(spec, 'd2_x2')
    return _term(spec, omegas, 2, threads, cond_limit)


def expansion_sum(spec, omegas, k, threads=1, cond_limit=CONDITION_LIMIT):
    """``d0 + ... + d_k`` for k ≤ 2 (k = 2 adds only the X² part)."""
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= 2:
        raise DepthRangeError(u'expansion order', k, 0, 2)
    k = int(k)
    if k:
        _need_two(spec, 'expansion order {0}'.format(k))

    def evaluate(chunk, solver):
        values = sum(_expansion_terms(spec, chunk, solver, k))
        return solver.chunk(values)

    return sweep(spec, omegas, Engine(EngineKind.EXPANSION_SUM, k),
                 evaluate, threads, cond_limit)


# Dense oracle.


def dense_green(spec, omegas, threads=1, cond_limit=CONDITION_LIMIT,
                limit=model.DEFAULT_DIMENSION_LIMIT, max_depth=None):
    """D(ω) = x[vac] with ``(ω − H₁) x = e_vac`` solved densely at every
    frequency; the reference every other engine is checked against.
    """
    hamiltonian, vacuum = model.assemble_dense_h1(spec, max_depth, limit)
    dim = hamiltonian.shape[0]
    rhs = np.zeros(dim, dtype=complex)
    rhs[vacuum] = 1.0
    identity = np.eye(dim)
    gecon, = scipy.linalg.get_lapack_funcs(('gecon',), (hamiltonian,))

    def evaluate(chunk, solver):
        values = np.empty(len(chunk), dtype=complex)
        for i, omega in enumerate(chunk):
            matrix = omega * identity - hamiltonian
            lu, piv = scipy.linalg.lu_factor(matrix, check_finite=False)
            rcond, _ = gecon(lu, np.linalg.norm(matrix, 1))
            if rcond == 0:
                solver.failed[i] = True
                values[i] = np.nan
                continue
            values[i] = scipy.linalg.lu_solve(
                (lu, piv), rhs, check_finite=False)[vacuum]
            if rcond * cond_limit < 1:
                solver.ill[i] = True
        return solver.chunk(values)

    return sweep(spec, omegas, Engine(EngineKind.DENSE), evaluate,
                 threads, cond_limit)


def evaluate(engine, spec, omegas, threads=1, cond_limit=CONDITION_LIMIT,
             limit=model.DEFAULT_DIMENSION_LIMIT):
    """Run the engine named by an `Engine` tag or its label."""
    if not isinstance(engine, Engine):
        engine = Engine.parse(engine)
    kind = engine.kind
    if kind is EngineKind.DENSE:
        return dense_green(spec, omegas, threads, cond_limit, limit)
    if kind is EngineKind.CONTINUED_FRACTION:
        return cf_full(spec, omegas, threads, cond_limit)
    if kind is EngineKind.TRUNCATED:
        return cf_truncated(spec, omegas, engine.order, threads, cond_limit)
    if kind is EngineKind.EXPANSION_TERM:
        return (d0, d1, d2_x2)[engine.order](spec, omegas, threads,
                                             cond_limit)
    if kind is EngineKind.EXPANSION_SUM:
        return expansion_sum(spec, omegas, engine.order, threads, cond_limit)

    from . import diagrams
    return diagrams.dyson_partial_sum(spec, omegas, engine.order,
                                      threads=threads)
