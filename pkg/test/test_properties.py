import cmath
import unittest
from dataclasses import replace

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from polarfrac import engines
from polarfrac import spectra
from . import random_spec, spec_grid


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
phases = st.lists(st.floats(min_value=-np.pi, max_value=np.pi),
                  min_size=4, max_size=4)


def _rephased(spec, row_phases, column_phases):
    """Multiply every overlap row and every vibrationally excited column
    by a unit phase.
    """
    species = []
    for s in spec.species:
        rows = []
        for i, row in enumerate(s.fc_overlaps):
            rows.append(tuple(
                c * cmath.exp(1j * row_phases[i % len(row_phases)])
                * (cmath.exp(1j * column_phases[j % len(column_phases)])
                   if j else 1.0)
                for j, c in enumerate(row)))
        species.append(replace(s, fc_overlaps=tuple(rows)))
    return replace(spec, species=tuple(species))


class RandomEnsembleTest(unittest.TestCase):
    @settings(max_examples=25, deadline=None)
    @given(seed=seeds)
    def test_energy_balance(self, seed):
        spec = random_spec(np.random.default_rng(seed), max_dimension=150)
        green = engines.cf_full(spec, spec_grid(spec, 48))
        spectrum = spectra.compute_spectrum(green, spec.cavity.kappa)
        total = (spectrum.absorption + spectrum.transmission
                 + spectrum.reflection)
        np.testing.assert_allclose(total, 1.0, atol=1e-10)
        self.assertTrue(np.all(spectrum.absorption > -1e-12))
        self.assertTrue(np.all(green.values.imag < 0))

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds, row_phases=phases, column_phases=phases)
    def test_overlap_phases_do_not_matter(self, seed, row_phases,
                                          column_phases):
        spec = random_spec(np.random.default_rng(seed), max_dimension=150)
        omegas = spec_grid(spec, 32)
        rephased = _rephased(spec, row_phases, column_phases)
        np.testing.assert_allclose(engines.cf_full(rephased, omegas).values,
                                   engines.cf_full(spec, omegas).values,
                                   rtol=1e-9, atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds)
    def test_full_depth_truncation(self, seed):
        spec = random_spec(np.random.default_rng(seed), max_dimension=150)
        omegas = spec_grid(spec, 32)
        np.testing.assert_allclose(
            engines.cf_truncated(spec, omegas, spec.n_molecules - 1).values,
            engines.cf_full(spec, omegas).values, rtol=1e-12)
