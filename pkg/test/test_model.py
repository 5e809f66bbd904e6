import math
import unittest

import numpy as np

from polarfrac import model
from polarfrac.model import BlockKind
from polarfrac.exceptions import SpecError, DepthRangeError, SizingError
from . import fig2a, fig2b, three_level, two_level


class SpeciesSpecTest(unittest.TestCase):
    def test_levels_must_increase(self):
        with self.assertRaises(SpecError):
            model.SpeciesSpec(1, (0.0, 0.0), (10.0,), ((1.0, 0.0),))

    def test_overlap_row_norm_checked(self):
        with self.assertRaises(SpecError):
            model.SpeciesSpec(1, (0.0, 1.0), (10.0,), ((0.9, 0.5),))

    def test_unit_norm_row_accepted(self):
        s = model.SpeciesSpec(1, (0.0, 1.0), (10.0,),
                              ((math.sqrt(0.5), math.sqrt(0.5)),))
        self.assertEqual(s.m_ground, 2)

    def test_overlap_shape_checked(self):
        with self.assertRaises(SpecError):
            model.SpeciesSpec(1, (0.0, 1.0), (10.0,), ((1.0,),))
        with self.assertRaises(SpecError):
            model.SpeciesSpec(1, (0.0,), (10.0, 11.0), ((1.0,),))

    def test_count_must_be_positive(self):
        with self.assertRaises(SpecError):
            model.SpeciesSpec(0, (0.0,), (10.0,), ((1.0,),))

    def test_vibrational_gaps(self):
        s = model.SpeciesSpec(1, (0.5, 1.5, 2.7), (10.0,),
                              ((0.5, 0.5, 0.5),))
        self.assertEqual(len(s.vibrational_gaps()), 2)
        self.assertAlmostEqual(s.vibrational_gaps()[0], 1.0)
        self.assertAlmostEqual(s.vibrational_gaps()[1], 2.2)


class EnsembleSpecTest(unittest.TestCase):
    def test_cavity_frequency_positive(self):
        with self.assertRaises(SpecError):
            model.CavitySpec(0.0, 0.1)

    def test_negative_kappa_rejected(self):
        with self.assertRaises(SpecError):
            model.CavitySpec(1.0, -0.1)

    def test_negative_gamma_rejected(self):
        spec = fig2a()
        with self.assertRaises(SpecError):
            model.EnsembleSpec(spec.cavity, spec.species, 0.1, -1.0)

    def test_collective_coupling(self):
        spec = fig2b()
        self.assertEqual(spec.n_molecules, 50)
        self.assertAlmostEqual(spec.collective_coupling, 0.6)

    def test_resized_keeps_collective_coupling(self):
        spec = fig2a(10).resized(250)
        self.assertEqual(spec.n_molecules, 250)
        self.assertAlmostEqual(spec.collective_coupling, 0.8)

    def test_resized_keeps_species_ratio(self):
        spec = fig2b().resized(10)
        self.assertEqual([s.count for s in spec.species], [5, 5])

    def test_resized_rejects_uneven_split(self):
        with self.assertRaises(SpecError):
            fig2b().resized(7)

    def test_spec_hash_depends_on_coupling(self):
        a = three_level(collective=0.8)
        b = three_level(collective=0.7)
        self.assertEqual(a.spec_hash, three_level(collective=0.8).spec_hash)
        self.assertNotEqual(a.spec_hash, b.spec_hash)
        self.assertEqual(len(a.spec_hash), 16)

    def test_to_dict_uses_pairs(self):
        d = fig2a().to_dict()
        self.assertEqual(d['species'][0]['fc_overlaps'],
                         [[[0.98, 0.0], [0.19899, 0.0]]])
        self.assertIn('lambda', d)


class BasisTest(unittest.TestCase):
    def test_single_mode_chain(self):
        spec = fig2a(3)
        for depth in range(4):
            self.assertEqual(
                len(model.enumerate_block_basis(spec, depth, 'photon')), 1)
        for depth in range(3):
            self.assertEqual(
                len(model.enumerate_block_basis(spec, depth, 'excited')), 1)

    def test_excited_depth_out_of_range(self):
        with self.assertRaises(DepthRangeError):
            model.enumerate_block_basis(fig2a(3), 3, BlockKind.EXCITED)

    def test_photon_depth_out_of_range(self):
        with self.assertRaises(DepthRangeError):
            model.enumerate_block_basis(fig2a(3), 4, BlockKind.PHOTON)

    def test_multi_level_order(self):
        species = model.SpeciesSpec(2, (0.0, 1.0, 2.0), (10.0,),
                                    ((0.8, 0.4, 0.2),))
        spec = model.EnsembleSpec(model.CavitySpec(10.0, 0.1), (species,),
                                  0.1, 0.1)
        basis = model.enumerate_block_basis(spec, 2, BlockKind.PHOTON)
        self.assertEqual([c.occupations for c in basis.states],
                         [((2, 0),), ((1, 1),), ((0, 2),)])

    def test_two_species_order(self):
        spec = fig2b(2)
        photon = model.enumerate_block_basis(spec, 1, BlockKind.PHOTON)
        self.assertEqual([c.occupations for c in photon.states],
                         [((1,), (0,)), ((0,), (1,))])
        excited = model.enumerate_block_basis(spec, 1, BlockKind.EXCITED)
        self.assertEqual(len(excited), 4)

    def test_saturated_species_excluded(self):
        # A species whose only molecule carries a phonon has nothing
        # left to excite.
        spec = fig2b(1)
        excited = model.enumerate_block_basis(spec, 1, BlockKind.EXCITED)
        self.assertEqual(len(excited), 2)
        for config, (s, _) in excited.states:
            self.assertEqual(config.load(s), 0)

    def test_block_dimensions(self):
        self.assertEqual(model.block_dimensions(fig2b(2), 1), (2, 4))
        self.assertEqual(model.block_dimensions(fig2a(3), 3), (1, 0))


class BlockOperatorsTest(unittest.TestCase):
    def setUp(self):
        self.spec = fig2a(10)
        self.lam = self.spec.coupling

    def test_zeroth_couplings(self):
        block = model.build_block_operators(self.spec, 0)
        self.assertAlmostEqual(block.V[0, 0],
                               self.lam * math.sqrt(10) * 0.98)
        self.assertAlmostEqual(block.v[0, 0], self.lam * 0.19899)

    def test_first_order_coupling(self):
        block = model.build_block_operators(self.spec, 1)
        self.assertAlmostEqual(block.V[0, 0],
                               self.lam * math.sqrt(9) * 0.98)

    def test_energies(self):
        block = model.build_block_operators(self.spec, 1)
        self.assertAlmostEqual(block.h_ph[0], 11.0)
        self.assertAlmostEqual(block.h_e[0], 11.0)

    def test_complex_overlap_conjugated_in_v(self):
        spec = three_level(4, overlaps=(0.9, 0.3j))
        block = model.build_block_operators(spec, 0)
        self.assertAlmostEqual(block.v[0, 0], -0.3j * spec.coupling)

    def test_phonon_number_enhancement(self):
        species = model.SpeciesSpec(3, (0.0, 1.0, 2.0), (10.0,),
                                    ((0.8, 0.4, 0.2),))
        spec = model.EnsembleSpec(model.CavitySpec(10.0, 0.1), (species,),
                                  0.1, 0.1)
        block = model.build_block_operators(spec, 1)
        photon = model.enumerate_block_basis(spec, 2, BlockKind.PHOTON)
        excited = block.excited.states
        row = [i for i, (c, _) in enumerate(excited)
               if c.occupations == ((1, 0),)][0]
        col = photon.positions[model.PhononConfig(((2, 0),))]
        self.assertAlmostEqual(block.v[row, col], 0.1 * math.sqrt(2) * 0.4)

    def test_arrays_read_only(self):
        block = model.build_block_operators(self.spec, 0)
        with self.assertRaises(ValueError):
            block.V[0, 0] = 1.0


class DenseTest(unittest.TestCase):
    def test_dimension(self):
        self.assertEqual(model.dense_dimension(fig2a(3)), 7)
        self.assertEqual(model.dense_dimension(fig2a(3), 1), 4)

    def test_limit(self):
        with self.assertRaises(SizingError) as cm:
            model.assemble_dense_h1(fig2a(3), limit=5)
        self.assertEqual(cm.exception.dimension, 7)

    def test_structure(self):
        spec = two_level(2)
        H, vacuum = model.assemble_dense_h1(spec)
        self.assertEqual(vacuum, 0)
        self.assertEqual(H.shape, (2, 2))
        self.assertAlmostEqual(H[0, 0], 1.0 - 0.05j)
        self.assertAlmostEqual(H[1, 1], 1.0 - 0.05j)
        self.assertAlmostEqual(H[0, 1], 0.1)

    def test_hermitian_part_off_diagonal(self):
        H, _ = model.assemble_dense_h1(fig2b(2))
        off = H - np.diag(np.diag(H))
        np.testing.assert_allclose(off, off.conj().T, atol=1e-15)
        np.testing.assert_allclose(np.diag(H).imag[0], -0.025)
