import os
import unittest

from polarfrac import util
from polarfrac.exceptions import OutputError
from . import _root, TempDir


class JsonPointerTest(unittest.TestCase):
    def test_root(self):
        self.assertEqual(util.json_pointer(_root({})), '')

    def test_nested(self):
        config = _root({'ensemble': {'species': [{'count': 0}]}})
        view = config['ensemble']['species'][0]['count']
        self.assertEqual(util.json_pointer(view),
                         '/ensemble/species/0/count')

    def test_escapes(self):
        config = _root({'a/b': {'c~d': 1}})
        self.assertEqual(util.json_pointer(config['a/b']['c~d']),
                         '/a~1b/c~0d')


class DigestTest(unittest.TestCase):
    def test_key_order_does_not_matter(self):
        self.assertEqual(util.digest({'a': 1, 'b': [0.5, 2]}),
                         util.digest({'b': [0.5, 2], 'a': 1}))

    def test_length(self):
        self.assertEqual(len(util.digest({'a': 1})), 16)
        self.assertEqual(len(util.digest({'a': 1}, 8)), 8)

    def test_values_matter(self):
        self.assertNotEqual(util.digest({'a': 0.1}),
                            util.digest({'a': 0.10000000000000002}))


class FormatTest(unittest.TestCase):
    def test_complex_pair(self):
        self.assertEqual(util.complex_pair(1 - 2j), [1.0, -2.0])
        self.assertEqual(util.complex_pair(0.5), [0.5, 0.0])

    def test_split_list(self):
        self.assertEqual(util.split_list('10, 50 250,'), ['10', '50', '250'])
        self.assertEqual(util.split_list(''), [])


class AtomicWriteTest(unittest.TestCase):
    def test_creates_directories(self):
        with TempDir() as temp:
            path = os.path.join(temp.path, 'a', 'b', 'out.csv')
            util.atomic_write(path, u'ω,1\n')
            self.assertEqual(temp.read(os.path.join('a', 'b', 'out.csv')),
                             u'ω,1\n'.encode('utf-8'))
            self.assertEqual(os.listdir(os.path.dirname(path)), ['out.csv'])

    def test_replaces_existing(self):
        with TempDir() as temp:
            path = temp.sub('out.json', 'old')
            util.atomic_write(path, 'new')
            self.assertEqual(temp.read('out.json'), b'new')

    def test_unwritable_destination(self):
        with TempDir() as temp:
            blocker = temp.sub('file', 'x')
            with self.assertRaises(OutputError) as cm:
                util.atomic_write(os.path.join(blocker, 'out.csv'), 'x')
            self.assertIsInstance(cm.exception, OSError)
            self.assertIn('could not be written', str(cm.exception))

    def test_reason_in_message(self):
        with TempDir() as temp:
            blocker = temp.sub('file', 'x')
            path = os.path.join(blocker, 'out.csv')
            with self.assertRaises(OutputError) as cm:
                util.atomic_write(path, 'x')
            self.assertEqual(cm.exception.path, path)
            self.assertIsNotNone(cm.exception.reason)
            self.assertIn(u'{0} could not be written: '.format(path),
                          str(cm.exception))


class OutputErrorTest(unittest.TestCase):
    def test_message(self):
        error = OutputError('/x/out.csv', 'Is a directory')
        self.assertEqual(str(error),
                         '/x/out.csv could not be written: Is a directory')
        self.assertEqual(error.path, '/x/out.csv')
        self.assertEqual(error.reason, 'Is a directory')

    def test_without_reason(self):
        self.assertEqual(str(OutputError('/x/out.csv')),
                         '/x/out.csv could not be written')
