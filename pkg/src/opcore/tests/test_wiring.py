import doctest
import json
import unittest

from zope.interface.verify import verifyObject

from opcore.errors import WiringError, BoundaryMismatchError
from opcore.errors import RequirementError, GridError
from opcore.interfaces import IBoundary, IWiringOp, IRequirement
from opcore.wiring import OUTER, Port, Boundary, UnionFind, WiringOp
from opcore.wiring import identityWiring, nest, diagramsEqual, lint
from opcore.wiring import Requirement, jointValidity, soundnessCheck
from opcore.wiring import parseWiring, parseRequirements, parseGrid
from opcore.wiring import MAX_COUNTEREXAMPLES

from opcore.tests import readData

FLAT = ['Chassis', 'Optics', 'Intfr', 'Lab', 'Box', 'Bath']


class UnionFindTestCase(unittest.TestCase):

    def test_union(self):
        uf = UnionFind('abcd')
        self.assertTrue(uf.union('d', 'b'))
        self.assertFalse(uf.union('b', 'd'))
        uf.union('c', 'd')
        self.assertEqual('b', uf.find('c'))
        self.assertEqual('a', uf.find('a'))
        self.assertEqual(2, uf.unions)


class WiringOpTestCase(unittest.TestCase):

    def setUp(self):
        self.a = Boundary('A', [Port('x', 'volt', 'in'), Port('y', 'amp')])
        self.b = Boundary('B', [Port('x', 'volt', 'in')])
        self.outer = Boundary('Top', [Port('y', 'amp')])

    def test_interfaces(self):
        op = WiringOp([self.a, self.b], self.outer,
                      [[(0, 'x'), (1, 'x')], [(0, 'y'), (OUTER, 'y')]])
        self.assertTrue(verifyObject(IBoundary, self.a))
        self.assertTrue(verifyObject(IWiringOp, op))
        self.assertEqual(['A.y', 'A.x'], op.getVariables())

    def test_errors(self):
        self.assertRaises(WiringError, Port, 'x', 'volt', 'sideways')
        self.assertRaises(WiringError, Boundary, 'C',
                          [Port('x', 'volt'), Port('x', 'amp')])
        # unwired port
        self.assertRaises(WiringError, WiringOp, [self.a, self.b],
                          self.outer, [[(0, 'y'), (OUTER, 'y')]])
        # mixed spaces
        self.assertRaises(WiringError, WiringOp, [self.a, self.b],
                          self.outer, [[(0, 'x'), (1, 'x'), (0, 'y')],
                                       [(OUTER, 'y')]])
        # wired twice
        self.assertRaises(WiringError, WiringOp, [self.a, self.b],
                          self.outer, [[(0, 'x'), (1, 'x')],
                                       [(0, 'y'), (OUTER, 'y')],
                                       [(1, 'x')]])
        self.assertRaises(WiringError, WiringOp, [self.a], self.outer,
                          [[(0, 'z')]])

    def test_lint(self):
        op = WiringOp([self.a, self.b], self.outer,
                      [[(0, 'x'), (1, 'x')], [(0, 'y'), (OUTER, 'y')]])
        warnings = lint(op)
        self.assertEqual(1, len(warnings))
        self.assertTrue('{A.x, B.x}' in warnings[0])
        self.assertEqual([], lint(identityWiring(self.a)))

    def test_sameNamedInner(self):
        # one A feeds B and the outer boundary, the other A is idle
        first = WiringOp([self.a, self.a, self.b], self.outer,
                         [[(0, 'x'), (2, 'x')], [(1, 'x')],
                          [(0, 'y'), (OUTER, 'y')], [(1, 'y')]])
        listed_later = WiringOp([self.a, self.a, self.b], self.outer,
                                [[(1, 'x'), (2, 'x')], [(0, 'x')],
                                 [(1, 'y'), (OUTER, 'y')], [(0, 'y')]])
        self.assertTrue(diagramsEqual(first, listed_later))
        self.assertTrue(diagramsEqual(listed_later, first))
        split = WiringOp([self.a, self.a, self.b], self.outer,
                         [[(0, 'x'), (2, 'x')], [(1, 'x')],
                          [(1, 'y'), (OUTER, 'y')], [(0, 'y')]])
        comparison = diagramsEqual(first, split)
        self.assertFalse(comparison)
        self.assertEqual(('A#1.y',), comparison.witness)

    def test_identity(self):
        op = WiringOp([self.a, self.b], self.outer,
                      [[(0, 'x'), (1, 'x')], [(0, 'y'), (OUTER, 'y')]])
        self.assertTrue(diagramsEqual(
            op, nest(identityWiring(self.outer), [op])))
        self.assertTrue(diagramsEqual(op, nest(op, [
            identityWiring(self.a), identityWiring(self.b)])))


class LSITestCase(unittest.TestCase):

    def setUp(self):
        self.bundle = parseWiring(readData('lsi_wiring.json'))
        self.ops = self.bundle.operations
        self.functional = self.bundle.evaluate(
            self.bundle.equations[0]['left'])
        self.control = self.bundle.evaluate(
            self.bundle.equations[0]['right'])
        self.reqs = parseRequirements(readData('lsi_requirements.json'))
        self.grid = parseGrid(readData('lsi_grid.json'))

    def test_flatten(self):
        self.assertEqual(FLAT, [b.name for b in self.functional.inner])
        self.assertEqual('LSI', self.functional.outer.name)
        self.assertEqual(11, len(self.functional.wires))
        self.assertTrue('Box.laser' in self.functional.getVariables())
        laser = self.functional.getWireClass((0, 'laser'))
        self.assertEqual(['Box.laser', 'Chassis.laser', 'Intfr.laser'],
                         sorted(self.functional.getLabel(r) for r in laser))

    def test_equal(self):
        comparison = diagramsEqual(self.functional, self.control)
        self.assertTrue(comparison)
        self.assertEqual(None, comparison.witness)

    def test_perturbed(self):
        doc = json.loads(readData('lsi_wiring.json'))
        wires = doc['operations']['t']['wires']
        wires[1] = ['Box.heat1', 'Bath.heat2']
        wires[2] = ['Box.heat2', 'Lab.heat1']
        bundle = parseWiring(json.dumps(doc))
        perturbed = bundle.evaluate(bundle.equations[0]['left'])
        comparison = diagramsEqual(perturbed, self.control)
        self.assertFalse(comparison)
        self.assertEqual(('Bath.heat2', 'Box.heat1'), comparison.witness)
        self.assertEqual('left only', comparison.side)

    def test_innerMismatch(self):
        comparison = diagramsEqual(self.functional, self.ops['f'])
        self.assertFalse(comparison)
        self.assertEqual('inner boundaries', comparison.side)

    def test_nestMismatch(self):
        try:
            nest(self.ops['f'], [self.ops['t'], self.ops['l']])
        except BoundaryMismatchError as e:
            self.assertEqual(0, e.slot)
            self.assertEqual('intensity', e.port)
        else:
            self.fail("BoundaryMismatchError not raised")
        self.assertRaises(BoundaryMismatchError, nest, self.ops['f'],
                          [self.ops['l']])

    def test_nestAssociative(self):
        ids = [identityWiring(b) for b in self.ops['l'].inner]
        inner_first = nest(self.ops['f'], [nest(self.ops['l'], ids),
                                           self.ops['t']])
        self.assertTrue(diagramsEqual(self.functional, inner_first))

    def test_jointValidity(self):
        valid = jointValidity(self.functional, self.reqs[:2], self.grid)
        self.assertEqual(7776, valid.count())
        laser = list(valid.variables).index('Box.laser')
        self.assertEqual((20.0,), valid.domains[laser])
        state = next(iter(valid))
        self.assertTrue(state in valid)
        self.assertTrue(dict(zip(valid.variables, state)) in valid)
        states = valid.asDicts()
        self.assertEqual(7776, len(states))
        self.assertEqual(20.0, states[0]['Box.laser'])

    def test_sound(self):
        report = soundnessCheck(self.functional, self.reqs[:2],
                                self.reqs[2:], self.grid)
        self.assertTrue(report.sound)
        self.assertEqual(7776, report.valid.count())

    def test_unsound(self):
        tight = Requirement('LSI', 'tight_setpoint',
                            {'setpt': [[19.95, 20.05]]})
        report = soundnessCheck(self.functional, self.reqs[:2], [tight],
                                self.grid)
        self.assertFalse(report)
        self.assertEqual(2, len(report.counterexamples))
        state, name = report.counterexamples[0]
        self.assertEqual('tight_setpoint', name)
        self.assertEqual(19.9, state['Bath.setpt'])

    def test_threaded(self):
        outer = [Requirement('LSI', 'tight_setpoint',
                             {'setpt': [[19.95, 20.05]]}),
                 Requirement('LSI', 'cold_rooms',
                             {'temp_lab': [[19.0, 19.95]],
                              'temp_box': [[19.0, 19.95]]}),
                 Requirement('LSI', 'no_drive', {'drive': [[0, 0]]})]
        serial = soundnessCheck(self.functional, self.reqs[:2], outer,
                                self.grid)
        self.assertTrue(len(serial.counterexamples) > 2)
        for threads in (2, 3, 8):
            threaded = soundnessCheck(self.functional, self.reqs[:2], outer,
                                      self.grid, threads)
            self.assertEqual(serial.counterexamples,
                             threaded.counterexamples)
            self.assertEqual(serial.valid.count(), threaded.valid.count())

    def test_threadedTruncation(self):
        outer = [Requirement('LSI', 'tight_%d' % i,
                             {'setpt': [[19.95, 20.05]]}) for i in range(15)]
        serial = soundnessCheck(self.functional, self.reqs[:2], outer,
                                self.grid)
        threaded = soundnessCheck(self.functional, self.reqs[:2], outer,
                                  self.grid, 4)
        self.assertEqual(MAX_COUNTEREXAMPLES, len(serial.counterexamples))
        self.assertEqual(serial.counterexamples, threaded.counterexamples)
        self.assertEqual('tight_9', threaded.counterexamples[-1][1])

    def test_requirementErrors(self):
        self.assertTrue(verifyObject(IRequirement, self.reqs[0]))
        self.assertRaises(RequirementError, Requirement, 'Box', 'bad',
                          {'laser': [[20.1, 19.9]]})
        stray = Requirement('Pump', 'stray', {'flow': [[0, 1]]})
        self.assertRaises(RequirementError, jointValidity, self.functional,
                          [stray], self.grid)
        self.assertRaises(RequirementError, soundnessCheck, self.functional,
                          [], self.reqs[:1], self.grid)
        missing = Requirement('Box', 'missing', {'pressure': [[0, 1]]})
        self.assertRaises(RequirementError, jointValidity, self.functional,
                          [missing], self.grid)

    def test_gridErrors(self):
        self.assertRaises(GridError, jointValidity, self.functional, [],
                          {'celsius': [20.0]})
        self.assertRaises(GridError, parseGrid, '{"grid": {"celsius": []}}')

    def test_requirementAdmits(self):
        req = Requirement('Box', 'band', {'laser': [[1, 2], [1.5, 3]]})
        self.assertEqual(((1, 3),), req.intervals['laser'])
        self.assertTrue(req.admits('laser', 3))
        self.assertTrue(req.admits('heat1', 99))
        self.assertFalse(req.isSatisfied({'laser': 4}))

    def test_parseErrors(self):
        doc = json.loads(readData('lsi_wiring.json'))
        doc['operations']['f']['wires'][0] = ['Nowhere.laser',
                                              'TempSys.laser']
        self.assertRaises(WiringError, parseWiring, json.dumps(doc))
        doc = json.loads(readData('lsi_wiring.json'))
        doc['equations'].append({'left': 'f'})
        self.assertRaises(WiringError, parseWiring, json.dumps(doc))
        self.assertRaises(WiringError, self.bundle.evaluate, 'h')


def test_suite():
    suite = unittest.TestSuite()
    suite.addTests([
        unittest.defaultTestLoader.loadTestsFromTestCase(UnionFindTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(WiringOpTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(LSITestCase),
        ])
    suite.addTests([doctest.DocFileSuite(
        '../../../doc/lsi.txt',
        optionflags=doctest.ELLIPSIS | doctest.IGNORE_EXCEPTION_DETAIL)])
    return suite

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
