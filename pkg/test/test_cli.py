import os
import json
import unittest

from polarfrac import cli
from . import TempDir, fig2b
from .test_templates import ENSEMBLE


ENVIRON = os.environ

SPECTRUM_FILES = [
    'spectrum_d0_N10.csv',
    'spectrum_d0_d1_N10.csv',
    'spectrum_cf_full_N10.csv',
    'peaks.json',
    'modes.json',
    'manifest.json',
]


class CliTest(unittest.TestCase):
    def setUp(self):
        self.temp = TempDir()
        os.environ = {'POLARFRACDIR': self.temp.sub('appdir')}
        self.out = self.temp.sub('out')

    def tearDown(self):
        os.environ = ENVIRON
        self.temp.__exit__()

    def _main(self, *args):
        return cli.main(list(args) + ['--quiet'])

    def _read(self, name, out=None):
        with open(os.path.join(out or self.out, name), 'rb') as f:
            return f.read()

    def _fig2a(self, *extra):
        return self._main('spectrum', '--preset', 'fig2a', '--sweep-N', '10',
                          '--grid', '8:13:201', '--out', self.out, *extra)

    def test_spectrum_files(self):
        self.assertEqual(self._fig2a(), 0)
        self.assertEqual(sorted(os.listdir(self.out)), sorted(SPECTRUM_FILES))
        lines = self._read('spectrum_cf_full_N10.csv').decode().splitlines()
        self.assertEqual(lines[0], 'omega,re_D,im_D,A,T,R')
        self.assertEqual(len(lines), 202)

    def test_manifest(self):
        self._fig2a()
        document = json.loads(self._read('manifest.json'))
        manifest = document['manifest']
        self.assertEqual(manifest['preset'], 'fig2a')
        self.assertEqual(len(manifest['spec_hash']), 16)
        self.assertEqual(manifest['outputs'],
                         sorted(SPECTRUM_FILES[:-1]))
        self.assertIn('numpy', manifest['versions'])
        self.assertEqual(document['run']['sweep_N'], [10])
        self.assertEqual(document['run']['grid'],
                         {'min': 8.0, 'max': 13.0, 'points': 201})

    def test_repeat_run_is_identical(self):
        self._fig2a()
        first = {name: self._read(name) for name in SPECTRUM_FILES}
        self._fig2a()
        for name in SPECTRUM_FILES:
            self.assertEqual(self._read(name), first[name], name)

    def test_rerun_from_manifest(self):
        self._fig2a()
        first = {name: self._read(name) for name in SPECTRUM_FILES[:-1]}
        path = self.temp.sub('manifest.json', self._read('manifest.json'))
        self.assertEqual(self._main('spectrum', '--config', path), 0)
        for name in SPECTRUM_FILES[:-1]:
            self.assertEqual(self._read(name), first[name], name)

    def test_compare_needs_two_engines(self):
        code = self._main('compare', '--preset', 'fig2a', '--sweep-N', '10',
                          '--engines', 'cf_full', '--grid', '8:13:11',
                          '--out', self.out)
        self.assertEqual(code, cli.EXIT_CONFIG)

    def test_compare_dense_and_continued_fraction(self):
        path = self.temp.sub('ensemble.json',
                             json.dumps(fig2b(2).to_dict()))
        code = self._main('compare', '--config', path,
                          '--engines', 'dense,cf_full',
                          '--grid', '8.5:13.5:101', '--out', self.out)
        self.assertEqual(code, 0)
        report = json.loads(self._read('compare.json'))
        self.assertEqual(len(report['pairs']), 1)
        pair = report['pairs'][0]
        self.assertEqual(pair['engines'], ['cf_full', 'dense'])
        self.assertEqual(pair['N'], 4)
        self.assertLessEqual(pair['max_relative'], 1e-9)
        self.assertNotIn('scaling', report)

    def test_compare_scaling(self):
        code = self._main('compare', '--preset', 'fig2a',
                          '--sweep-N', '10,40', '--engines', 'd0,cf_full',
                          '--grid', '8:13:51', '--out', self.out)
        self.assertEqual(code, 0)
        report = json.loads(self._read('compare.json'))
        self.assertEqual(len(report['pairs']), 2)
        scaling = report['scaling'][0]
        self.assertEqual(scaling['N'], [10, 40])
        self.assertLess(scaling['exponent'], -0.5)

    def test_chi_and_dyson(self):
        code = self._main('chi', '--preset', 'fig2a', '--grid', '8:13:11',
                          '--out', self.out)
        self.assertEqual(code, 0)
        self.assertEqual(len(self._read('chi.csv').splitlines()), 12)

        code = self._main('dyson', '--preset', 'fig2a', '--grid', '8:13:3',
                          '--out', self.out)
        self.assertEqual(code, 0)
        document = json.loads(self._read('dyson.json'))
        self.assertEqual(document['omegas'], [8.0, 10.5, 13.0])
        self.assertEqual(len(document['orders']), 4)

    def test_modes(self):
        code = self._main('modes', '--preset', 'fig2a', '--sweep-N', '10,50',
                          '--out', self.out)
        self.assertEqual(code, 0)
        document = json.loads(self._read('modes.json'))
        self.assertEqual(sorted(document), ['N10', 'N50'])

    def test_output_path_is_a_file(self):
        blocked = self.temp.sub('blocked', 'not a directory')
        code = self._main('modes', '--preset', 'fig2a', '--out', blocked)
        self.assertEqual(code, cli.EXIT_IO)

    def test_bad_config(self):
        document = dict(ENSEMBLE, species=[dict(ENSEMBLE['species'][0],
                                                count=0)])
        path = self.temp.sub('bad.json', json.dumps(document))
        code = self._main('spectrum', '--config', path, '--out', self.out)
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertFalse(os.path.exists(self.out))

    def test_unknown_preset(self):
        code = self._main('spectrum', '--preset', 'fig9', '--out', self.out)
        self.assertEqual(code, cli.EXIT_CONFIG)

    def test_numeric_failure(self):
        path = self.temp.sub('pole.yaml', (
            'ensemble:\n'
            '  cavity: {omega_ph: 1.0, kappa: 0.0}\n'
            '  lambda: 0.0\n'
            '  gamma: 0.0\n'
            '  species:\n'
            '    - {count: 1, ground_levels: [0.0], excited_levels: [1.0],\n'
            '       fc_overlaps: [[1.0]]}\n'))
        code = self._main('spectrum', '--config', path,
                          '--grid', '0.5:1.5:3', '--out', self.out)
        self.assertEqual(code, cli.EXIT_NUMERIC)

    def test_preset_command(self):
        code = self._main('preset', 'fig2a', '--out', self.out)
        self.assertEqual(code, 0)
        path = os.path.join(self.out, 'fig2a.yaml')
        code = self._main('spectrum', '--config', path, '--sweep-N', '10',
                          '--grid', '8:13:21', '--out', self.out)
        self.assertEqual(code, 0)
        self.assertTrue(os.path.exists(
            os.path.join(self.out, 'spectrum_cf_full_N10.csv')))
