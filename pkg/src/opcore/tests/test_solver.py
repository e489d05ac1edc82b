import json
import unittest

import zope.event
from zope.interface.verify import verifyObject
from zope.schema.interfaces import ValidationError

from opcore.interfaces import ISolution, IInfeasible, IUndecided
from opcore.interfaces import ISolverConfig, IIncumbentFoundEvent
from opcore.planner import Agent, RiskModel, compileTimed, buildSystem
from opcore.planner import parseTaskingScenario, MAX_SURVIVAL
from opcore.planner import FEASIBILITY, PLAN, COUNTS
from opcore.solver import SolverConfig, solve, iterSolutions
from opcore.solver import Solution, Infeasible, Undecided
from opcore.solver import completeAssignment, OPTIMAL, FEASIBLE
from opcore.template import parseTaskingTemplate

from opcore.tests import readData


class SolverTestCase(unittest.TestCase):

    def setUp(self):
        self.template = parseTaskingTemplate(readData('sar_tasking.json'))
        self.mission = parseTaskingScenario(readData('sar_mission.json'))

    def test_config(self):
        config = SolverConfig()
        self.assertTrue(verifyObject(ISolverConfig, config))
        self.assertEqual(200000, config.node_limit)
        self.assertRaises(ValidationError, SolverConfig, 0)
        self.assertRaises(ValidationError, SolverConfig, fuel_rule=u'max')

    def test_rendezvous(self):
        result = solve(buildSystem(self.template, self.mission))
        self.assertTrue(isinstance(result, Solution))
        self.assertTrue(verifyObject(ISolution, result))
        self.assertEqual(OPTIMAL, result.status)
        self.assertEqual(4, result.getMakespan())
        self.assertEqual(4, result.objective)
        tasks = dict((t.transition, t) for t in result.getTasks())
        self.assertEqual(['tau1', 'tau2', 'tau4'], sorted(tasks))
        self.assertEqual((0, 2), (tasks['tau1'].start, tasks['tau1'].end))
        self.assertEqual(2, tasks['tau4'].start)
        self.assertEqual(('u1', 'u2'), tasks['tau4'].agents)
        self.assertEqual({'u1': 'a', 'u2': 'b'},
                         dict(result.getPositions(0)))
        self.assertEqual(None, result.getPositions(3)['u1'])
        self.assertEqual({'u1': 'd', 'u2': 'd'},
                         dict(result.getPositions(4)))
        self.assertEqual([], result.system.checkAssignment(result.values))

    def test_deterministic(self):
        system = buildSystem(self.template, self.mission)
        first = solve(system)
        self.assertEqual(first.values, solve(system).values)
        self.assertEqual(json.dumps(first.toDict(), sort_keys=True),
                         json.dumps(solve(system).toDict(), sort_keys=True))

    def test_incumbentEvents(self):
        events = []

        def subscriber(event):
            if IIncumbentFoundEvent.providedBy(event):
                events.append(event)
        zope.event.subscribers.append(subscriber)
        try:
            solve(buildSystem(self.template, self.mission))
        finally:
            zope.event.subscribers.remove(subscriber)
        self.assertTrue(events)
        self.assertEqual(4, events[-1].objective)

    def test_planLevel(self):
        result = solve(buildSystem(self.template, self.mission, PLAN))
        self.assertEqual(2, result.getMakespan())
        self.assertEqual(
            ((('tau1', ('u1',), 1), ('tau2', ('u2',), 1)),
             (('tau4', ('u1', 'u2'), 1),)),
            result.getKey())

    def test_countsLevel(self):
        result = solve(buildSystem(self.template, self.mission, COUNTS))
        self.assertEqual(FEASIBLE, result.status)
        self.assertEqual(2, result.getPositions(3)[('uh60', 'd')])
        self.assertEqual(1, result.getPositions(0)[('uh60', 'a')])

    def test_loneHelicopterInfeasible(self):
        doc = json.loads(readData('sar_mission.json'))
        doc['agents'] = doc['agents'][:1]
        doc['goal'] = {'agents': {'u1': 'd'}}
        result = solve(buildSystem(self.template,
                                   parseTaskingScenario(doc)))
        self.assertTrue(isinstance(result, Infeasible))
        self.assertTrue(verifyObject(IInfeasible, result))
        self.assertTrue('goal_u1' in result.getConflictNames())
        self.assertEqual('infeasible', result.toDict()['status'])

    def test_undecided(self):
        result = solve(buildSystem(self.template, self.mission),
                       config=SolverConfig(node_limit=1))
        self.assertTrue(isinstance(result, Undecided))
        self.assertTrue(verifyObject(IUndecided, result))
        self.assertEqual({'status': 'undecided', 'level': 'timed',
                          'nodes': 2}, result.toDict())

    def test_waitingOnly(self):
        empty = parseTaskingTemplate('{"colors": ["uh60"], '
                                     '"places": ["a", "b"]}')
        cs = compileTimed(empty, [Agent('u1', 'uh60', 'a')], 3)
        result = solve(cs)
        self.assertEqual(FEASIBLE, result.status)
        self.assertEqual([], result.getTasks())
        for t in range(4):
            self.assertEqual('a', result.getPositions(t)['u1'])

    def test_survival(self):
        risk = RiskModel(places={'a': 0.5})
        cs = compileTimed(self.template, [Agent('u1', 'uh60', 'a')], 2,
                          risk=risk)
        waiting = solve(cs, FEASIBILITY)
        self.assertEqual(None, waiting.getSurvival())
        result = solve(cs, MAX_SURVIVAL)
        self.assertAlmostEqual(1.0, result.getSurvival())
        self.assertEqual(['tau1'], [t.transition for t in result.getTasks()])
        self.assertEqual(0, result.getTasks()[0].start)

    def test_symmetry(self):
        agents = [Agent('u1', 'uh60', 'a'), Agent('u2', 'uh60', 'a')]
        plain = compileTimed(self.template, agents, 2)
        broken = compileTimed(self.template, agents, 2, symmetry=True)
        self.assertEqual([], plain.getRows('symmetry'))
        self.assertEqual(['symmetry_u1_u2'],
                         [r.name for r in broken.getRows('symmetry')])
        all_plain, truncated = iterSolutions(plain, 50)
        all_broken, truncated = iterSolutions(broken, 50)
        self.assertFalse(truncated)
        self.assertTrue(len(all_broken) < len(all_plain))

    def test_enumeration(self):
        cs = compileTimed(self.template, [Agent('u1', 'uh60', 'a')], 2)
        solutions, truncated = iterSolutions(cs, 10)
        self.assertFalse(truncated)
        # wait, or fly to c starting at 0
        self.assertEqual(2, len(solutions))
        solutions, truncated = iterSolutions(cs, 1)
        self.assertTrue(truncated)
        self.assertEqual(1, len(solutions))

    def test_completeAssignment(self):
        cs = buildSystem(self.template, self.mission)
        solution = completeAssignment(cs, {'s_tau1_0_d2_u1': 1,
                                           's_tau2_1_d1_u2': 1,
                                           's_tau4_2_d2_u1_u2': 1})
        self.assertEqual(4, solution.getMakespan())
        self.assertEqual('c', solution.getPositions(2)['u2'])


class FuelSolveTestCase(unittest.TestCase):

    def setUp(self):
        self.template = parseTaskingTemplate(readData('sar_tasking.json'))
        self.doc = json.loads(readData('sar_refuel.json'))

    def test_refuel(self):
        result = solve(buildSystem(self.template,
                                   parseTaskingScenario(self.doc)))
        self.assertTrue(isinstance(result, Solution))
        self.assertEqual(20, result.getFuel(0)['u1'])
        refuels = [t for t in result.getTasks() if t.transition == 'tau3']
        self.assertTrue(refuels)
        self.assertEqual(100, result.getFuel(refuels[0].end)['u1'])
        for t in range(1, 5):
            self.assertTrue(result.getFuel(t)['u1'] >= 10)
            self.assertEqual(100, result.getFuel(t)['h1'])

    def test_runsDry(self):
        self.doc['refuel'] = {}
        result = solve(buildSystem(self.template,
                                   parseTaskingScenario(self.doc)))
        self.assertTrue(isinstance(result, Infeasible))
        self.assertTrue([n for n in result.getConflictNames()
                         if n.startswith('fuel_min_f_')])

    def test_idleBurnsNothing(self):
        self.doc['burn_rates']['uh60'] = {'a': 0, 'b': 0, 'c': 0, 'd': 0}
        self.doc['refuel'] = {}
        result = solve(buildSystem(self.template,
                                   parseTaskingScenario(self.doc)))
        self.assertEqual([20] * 5,
                         [result.getFuel(t)['u1'] for t in range(5)])


def test_suite():
    suite = unittest.TestSuite()
    suite.addTests([
        unittest.defaultTestLoader.loadTestsFromTestCase(SolverTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(FuelSolveTestCase),
        ])
    return suite

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
