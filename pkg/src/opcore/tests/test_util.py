import unittest

from opcore import util
from opcore.errors import OpcoreError, TemplateError, ScriptError


class UtilTestCase(unittest.TestCase):

    def test_removeOverlapsExtend(self):
        self.assertEqual(
            [(5, 12)],
            util.removeOverlaps([(5, 7), (6, 12)]))

    def test_removeOverlapsExtendEdge(self):
        self.assertEqual(
            [(5, 12)],
            util.removeOverlaps([(5, 7), (7, 12)]))

    def test_removeOverlapsSub(self):
        self.assertEqual(
            [(5, 12)],
            util.removeOverlaps([(5, 12), (10, 11)]))

    def test_removeOverlapsEmpty(self):
        self.assertEqual([], util.removeOverlaps([]))

    def test_removeOverlapsComplicated(self):
        sequence = [(20, 23), (5, 10), (7, 10), (7, 12), (14, 18)]
        self.assertEqual(
            [(5, 12), (14, 18), (20, 23)],
            util.removeOverlaps(sequence))


class DocumentTestCase(unittest.TestCase):

    def test_loadDocument(self):
        self.assertEqual({'a': 1}, util.loadDocument(b'{"a": 1}'))
        self.assertEqual({'a': 1}, util.loadDocument({'a': 1}))
        self.assertRaises(OpcoreError, util.loadDocument, b'\xff')
        self.assertRaises(OpcoreError, util.loadDocument, '[]')

    def test_duplicates(self):
        doc = util.loadDocument('{"a": 1, "a": 2}')
        self.assertEqual(['a'], doc.duplicates)
        self.assertRaises(TemplateError, util.checkKeys, doc, ('a',))

    def test_checkKeys(self):
        util.checkKeys({'a': 1}, ('a', 'b'), ('a',))
        self.assertRaises(TemplateError, util.checkKeys, {'c': 1}, ('a',))
        self.assertRaises(ScriptError, util.checkKeys, {}, ('a',), ('a',),
                          'let.0', ScriptError)
        try:
            util.checkKeys([], ('a',), (), 'let.3')
        except TemplateError as e:
            self.assertEqual('let.3', e.location)
        else:
            self.fail("TemplateError not raised")

    def test_checkVersion(self):
        util.checkVersion({})
        util.checkVersion({'version': 1})
        self.assertRaises(TemplateError, util.checkVersion, {'version': 3})

    def test_canonical(self):
        self.assertEqual('{"a":[1,2],"b":1}',
                         util.canonicalJSON({'b': 1, 'a': [1, 2]}))
        self.assertEqual(64, len(util.sha256('opcore')))
        self.assertEqual('let.2.compose', util.join('let', 2, 'compose'))
        self.assertEqual('colors', util.join('', 'colors'))


def test_suite():
    suite = unittest.TestSuite()
    suite.addTests([
        unittest.defaultTestLoader.loadTestsFromTestCase(UtilTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(DocumentTestCase),
        ])
    return suite

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
