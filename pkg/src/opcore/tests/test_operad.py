import doctest
import unittest

import numpy

from zope.interface.verify import verifyObject

from opcore.errors import OperationError, ShapeMismatchError
from opcore.errors import SlotCountError, TypeMismatchError
from opcore.errors import TemplateMismatchError, PermutationError
from opcore.interfaces import INetOperation
from opcore.monoid import BOOLEAN_OR, NAT_SUM, NAT_MAX, MOD2
from opcore.operad import EdgeKey, NetOperation, identity, isUnit
from opcore.operad import parallel, overlay, permute, permuteSlots
from opcore.operad import compose, invertPermutation, canonicalForm
from opcore.operad import serializeOperation, parseOperation
from opcore.operad import operationDigest
from opcore.template import Interaction, NetworkTemplate, generators

COLORS = ('a', 'b', 'c')


def lawTemplate():
    return NetworkTemplate(COLORS, [
        Interaction('carry', True, {'a': ['b', 'c'], 'b': ['c']}),
        Interaction('link', False, {'a': ['a', 'b', 'c'], 'b': ['b']},
                    NAT_SUM, loops=True),
        Interaction('peak', True, {'c': ['a', 'b', 'c']}, NAT_MAX),
        Interaction('parity', False, {'c': ['a', 'b', 'c']}, MOD2),
        ])


class RandomOperations(object):
    """Seeded source of random operations over the law template."""

    def __init__(self, template, seed):
        self.template = template
        self.rng = numpy.random.Generator(numpy.random.PCG64(seed))

    def word(self, low=0, high=5):
        n = int(self.rng.integers(low, high + 1))
        return tuple(COLORS[int(i)] for i in self.rng.integers(0, 3, n))

    def edges(self, word):
        edges = {}
        for g in generators(self.template, word):
            if self.rng.random() < 0.3:
                (key, value), = g.getEdgeItems()
                monoid = self.template.getMonoid(key)
                if monoid.kind in (NAT_SUM, NAT_MAX):
                    value = int(self.rng.integers(1, 4))
                edges[key] = value
        return edges

    def operation(self, word=None, slots=None):
        if word is None:
            word = self.word()
        if slots is None:
            slots = int(self.rng.integers(1, 4))
        n = len(word)
        order = [int(i) for i in self.rng.permutation(n)]
        cuts = sorted(int(c) for c in self.rng.integers(0, n + 1,
                                                        slots - 1))
        bounds = [0] + cuts + [n]
        inputs = []
        slot_map = [None] * n
        for s in range(slots):
            chunk = order[bounds[s]:bounds[s + 1]]
            inputs.append([word[y] for y in chunk])
            for p, y in enumerate(chunk):
                slot_map[y] = (s, p)
        return NetOperation(self.template, inputs, word, slot_map,
                            self.edges(word))

    def permutation(self, n):
        return [int(i) for i in self.rng.permutation(n)]


def blockPermutation(tau, sizes):
    """Slot permutation of a composite when the operations plugged into
    its outer slots are reordered by tau."""
    order = invertPermutation(tau)
    new_offsets = {}
    offset = 0
    for s in order:
        new_offsets[s] = offset
        offset += sizes[s]
    result = []
    for s, size in enumerate(sizes):
        result.extend(new_offsets[s] + i for i in range(size))
    return result


class EdgeKeyTestCase(unittest.TestCase):

    def test_undirectedSorted(self):
        self.assertEqual(EdgeKey('link', False, (3, 1)),
                         EdgeKey('link', False, (1, 3)))
        self.assertEqual((1, 3), EdgeKey('link', False, (3, 1)).endpoints)
        self.assertNotEqual(EdgeKey('carry', True, (3, 1)),
                            EdgeKey('carry', True, (1, 3)))

    def test_loop(self):
        key = EdgeKey('link', False, (2,))
        self.assertTrue(key.isLoop())
        self.assertRaises(OperationError, EdgeKey, 'link', False, (2, 2))
        self.assertRaises(OperationError, EdgeKey, 'link', False, ())

    def test_list(self):
        key = EdgeKey('carry', True, (0, 1))
        self.assertEqual(['carry', 'directed', [0, 1]], key.toList())
        self.assertEqual(key, EdgeKey.fromList(key.toList()))
        self.assertRaises(OperationError, EdgeKey.fromList,
                          ['carry', 'sideways', [0, 1]])

    def test_immutable(self):
        key = EdgeKey('carry', True, (0, 1))
        self.assertRaises(AttributeError, setattr, key, 'directed', False)


class NetOperationTestCase(unittest.TestCase):

    def setUp(self):
        self.template = lawTemplate()
        self.carry = EdgeKey('carry', True, (0, 1))

    def test_interface(self):
        f = identity(self.template, ('a', 'b'))
        self.assertTrue(verifyObject(INetOperation, f))

    def test_disallowedEdge(self):
        # b is never carried by a
        self.assertRaises(OperationError, NetOperation, self.template,
                          [('b', 'a')], edges={self.carry: 1})
        self.assertRaises(OperationError, NetOperation, self.template,
                          [('a', 'b')], edges={self.carry: 2})
        self.assertRaises(OperationError, NetOperation, self.template,
                          [('a',)], edges={self.carry: 1})

    def test_zerosPruned(self):
        f = NetOperation(self.template, [('a', 'b')], edges={self.carry: 0})
        self.assertEqual(0, f.getEdgeCount())
        self.assertEqual(identity(self.template, ('a', 'b')), f)

    def test_badSlotMap(self):
        self.assertRaises(OperationError, NetOperation, self.template,
                          [('a',), ('b',)], ('a', 'b'), [(0, 0), (0, 0)])
        self.assertRaises(OperationError, NetOperation, self.template,
                          [('a',), ('b',)], ('b', 'a'), [(0, 0), (1, 0)])

    def test_unit(self):
        unit = identity(self.template, ())
        self.assertTrue(isUnit(unit))
        f = identity(self.template, ('a', 'c'))
        self.assertEqual(f, parallel(unit, f))
        self.assertEqual(f, parallel(f, unit))

    def test_parallel(self):
        f = NetOperation(self.template, [('a', 'b')], edges={self.carry: 1})
        g = NetOperation(self.template, [('a', 'c')], edges={self.carry: 1})
        h = parallel(f, g)
        self.assertEqual(('a', 'b', 'a', 'c'), h.output)
        self.assertEqual(2, h.getSlotCount())
        self.assertEqual(1, h.getEdgeValue(EdgeKey('carry', True, (2, 3))))

    def test_overlay(self):
        key = EdgeKey('link', False, (0, 1))
        f = NetOperation(self.template, [('a', 'b')], edges={key: 2})
        g = NetOperation(self.template, [('a', 'b')], edges={key: 3})
        self.assertEqual(5, overlay(f, g).getEdgeValue(key))
        other = NetOperation(self.template, [('a',), ('b',)])
        self.assertRaises(ShapeMismatchError, overlay, f, other)

    def test_parityCancels(self):
        key = EdgeKey('parity', False, (0, 1))
        f = NetOperation(self.template, [('c', 'a')], edges={key: 1})
        self.assertEqual(0, overlay(f, f).getEdgeCount())

    def test_composeErrors(self):
        f = identity(self.template, ('a', 'b'))
        self.assertRaises(SlotCountError, compose, f, [])
        try:
            compose(f, [identity(self.template, ('b', 'a'))])
        except TypeMismatchError as e:
            self.assertEqual(0, e.slot)
            self.assertEqual(('a', 'b'), e.expected)
            self.assertEqual(('b', 'a'), e.got)
        else:
            self.fail("TypeMismatchError not raised")
        other = NetworkTemplate(COLORS)
        self.assertRaises(TemplateMismatchError, compose, f,
                          [identity(other, ('a', 'b'))])

    def test_permute(self):
        f = NetOperation(self.template, [('a', 'b')], edges={self.carry: 1})
        g = permute(f, [1, 0])
        self.assertEqual(('b', 'a'), g.output)
        self.assertEqual(1, g.getEdgeValue(EdgeKey('carry', True, (1, 0))))
        self.assertEqual(f, permute(g, invertPermutation([1, 0])))
        self.assertRaises(PermutationError, permute, f, [0, 0])

    def test_serialize(self):
        key = EdgeKey('link', False, (1, 0))
        f = NetOperation(self.template, [('a',), ('b',)],
                         edges={key: 2, self.carry: 1})
        text = serializeOperation(f)
        self.assertEqual(text, serializeOperation(canonicalForm(f)))
        self.assertEqual(f, parseOperation(self.template, text))
        self.assertEqual(operationDigest(f),
                         operationDigest(parseOperation(self.template,
                                                        text)))
        self.assertRaises(OperationError, parseOperation, self.template,
                          '{"inputs": []}')


class OperadLawsTestCase(unittest.TestCase):
    """Randomized checks of the operad laws over a seeded generator."""

    rounds = 250

    def setUp(self):
        self.template = lawTemplate()
        self.random = RandomOperations(self.template, 20201)

    def assertSameOperation(self, left, right):
        self.assertEqual(serializeOperation(left), serializeOperation(right))

    def test_associativity(self):
        r = self.random
        for _ in range(self.rounds):
            f = r.operation()
            gs = [r.operation(word) for word in f.inputs]
            hs = [[r.operation(word) for word in g.inputs] for g in gs]
            flat = [h for row in hs for h in row]
            left = compose(compose(f, gs), flat)
            right = compose(f, [compose(g, row) for g, row in zip(gs, hs)])
            self.assertSameOperation(left, right)

    def test_units(self):
        r = self.random
        for _ in range(self.rounds):
            f = r.operation()
            self.assertSameOperation(
                f, compose(identity(self.template, f.output), [f]))
            self.assertSameOperation(
                f, compose(f, [identity(self.template, word)
                               for word in f.inputs]))

    def test_outputEquivariance(self):
        r = self.random
        for _ in range(self.rounds):
            f = r.operation()
            gs = [r.operation(word) for word in f.inputs]
            sigma = r.permutation(f.getNodeCount())
            self.assertSameOperation(compose(permute(f, sigma), gs),
                                     permute(compose(f, gs), sigma))

    def test_slotEquivariance(self):
        r = self.random
        for _ in range(self.rounds):
            f = r.operation()
            gs = [r.operation(word) for word in f.inputs]
            tau = r.permutation(f.getSlotCount())
            inverse = invertPermutation(tau)
            moved = [gs[inverse[t]] for t in range(len(gs))]
            sizes = [g.getSlotCount() for g in gs]
            self.assertSameOperation(
                compose(permuteSlots(f, tau), moved),
                permuteSlots(compose(f, gs), blockPermutation(tau, sizes)))

    def test_overlayCommutes(self):
        r = self.random
        for _ in range(50):
            f = r.operation()
            g = NetOperation(self.template, f.inputs, f.output, f.slot_map,
                             r.edges(f.output))
            self.assertSameOperation(overlay(f, g), overlay(g, f))

    def test_parallelAssociative(self):
        r = self.random
        for _ in range(50):
            f, g, h = r.operation(), r.operation(), r.operation()
            self.assertSameOperation(parallel(parallel(f, g), h),
                                     parallel(f, parallel(g, h)))

    def test_seeded(self):
        first = RandomOperations(self.template, 5).operation()
        again = RandomOperations(self.template, 5).operation()
        self.assertEqual(first, again)


def test_suite():
    suite = unittest.TestSuite()
    suite.addTests([
        unittest.defaultTestLoader.loadTestsFromTestCase(EdgeKeyTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(NetOperationTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(OperadLawsTestCase),
        ])
    suite.addTests([doctest.DocFileSuite(
        '../../../doc/operad.txt',
        optionflags=doctest.ELLIPSIS | doctest.IGNORE_EXCEPTION_DETAIL)])
    return suite

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
