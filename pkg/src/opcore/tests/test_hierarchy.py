import json
import unittest

import numpy
import zope.event

from opcore.errors import PlanningError
from opcore.hierarchy import project, lift, keyAt, LiftResult
from opcore.interfaces import ILiftTruncatedEvent
from opcore.planner import TIMED, PLAN, COUNTS
from opcore.planner import buildSystem, parseTaskingScenario
from opcore.planner import Agent, compileTimed
from opcore.solver import solve, iterSolutions
from opcore.template import parseTaskingTemplate

from opcore.tests import readData


class HierarchyTestCase(unittest.TestCase):

    def setUp(self):
        self.template = parseTaskingTemplate(readData('sar_tasking.json'))
        self.mission = parseTaskingScenario(readData('sar_mission.json'))
        self.timed = solve(buildSystem(self.template, self.mission))
        self.plan = solve(buildSystem(self.template, self.mission, PLAN))

    def test_projectTimed(self):
        plan = project(self.timed, PLAN)
        self.assertEqual(PLAN, plan.system.level)
        self.assertEqual(
            sorted((t.transition, t.agents) for t in self.timed.getTasks()),
            sorted((t.transition, t.agents) for t in plan.getTasks()))
        self.assertEqual([], plan.system.checkAssignment(plan.values))

    def test_projectCounts(self):
        counts = project(self.timed, COUNTS)
        self.assertEqual(COUNTS, counts.system.level)
        self.assertEqual(1, counts.getPositions(0)[('uh60', 'a')])
        self.assertEqual(1, counts.getPositions(0)[('uh60', 'b')])
        last = counts.system.steps
        self.assertEqual(2, counts.getPositions(last)[('uh60', 'd')])
        self.assertEqual(keyAt(self.timed, COUNTS),
                         keyAt(project(self.timed, PLAN), COUNTS))

    def test_projectSame(self):
        self.assertTrue(project(self.plan, PLAN) is self.plan)

    def test_projectFiner(self):
        self.assertRaises(PlanningError, project, self.plan, TIMED)
        self.assertRaises(PlanningError, project, self.plan, 'weekly')

    def test_keyAt(self):
        key = keyAt(self.plan, COUNTS)
        self.assertEqual(((('tau1', (), 1), ('tau2', (), 1)),
                          (('tau4', (), 1),)), key)
        self.assertEqual(self.plan.getKey(), keyAt(self.plan, PLAN))

    def test_liftPlan(self):
        result = lift(self.plan, TIMED)
        self.assertTrue(isinstance(result, LiftResult))
        self.assertTrue(result)
        self.assertFalse(result.truncated)
        self.assertTrue(result.exhausted)
        for timed in result:
            self.assertEqual(TIMED, timed.system.level)
            self.assertEqual(self.plan.getKey(),
                             project(timed, PLAN).getKey())

    def test_liftCounts(self):
        counts = project(self.plan, COUNTS)
        plans = lift(counts, PLAN)
        self.assertTrue(self.plan.getKey() in [p.getKey() for p in plans])
        for plan in plans:
            self.assertEqual(counts.getKey(), keyAt(plan, COUNTS))

    def test_liftTwoLevels(self):
        counts = project(self.plan, COUNTS)
        for timed in lift(counts, TIMED):
            self.assertEqual(counts.getKey(), keyAt(timed, COUNTS))

    def test_liftSame(self):
        self.assertEqual([self.plan], list(lift(self.plan, PLAN)))

    def test_liftCoarser(self):
        self.assertRaises(PlanningError, lift, self.plan, COUNTS)

    def test_liftWrongSystem(self):
        system = buildSystem(self.template, self.mission, PLAN)
        self.assertRaises(PlanningError, lift, self.plan, TIMED,
                          system=system)

    def test_liftTruncated(self):
        events = []

        def subscriber(event):
            if ILiftTruncatedEvent.providedBy(event):
                events.append(event)
        zope.event.subscribers.append(subscriber)
        try:
            result = lift(self.plan, TIMED, cap=0)
        finally:
            zope.event.subscribers.remove(subscriber)
        self.assertEqual([], list(result))
        self.assertTrue(result.truncated)
        self.assertEqual(1, len(events))
        self.assertEqual(0, events[0].cap)
        self.assertEqual(TIMED, events[0].level)


def randomNet(rng):
    """A template with at most five places and a fleet of at most three
    agents, every transition moving tokens within their color."""
    colors = ['c%d' % i for i in range(rng.integers(1, 3))]
    places = ['p%d' % i for i in range(rng.integers(2, 6))]
    transitions = []
    for i in range(rng.integers(1, 4)):
        inputs, outputs = [], []
        for k in range(rng.integers(1, 3)):
            color = colors[rng.integers(len(colors))]
            inputs.append({'color': color,
                           'place': places[rng.integers(len(places))]})
            outputs.append({'color': color,
                            'place': places[rng.integers(len(places))]})
        transitions.append({'name': 't%d' % i, 'inputs': inputs,
                            'outputs': outputs,
                            'duration': int(rng.integers(1, 3))})
    template = parseTaskingTemplate(json.dumps({
        'colors': colors, 'places': places,
        'transitions': transitions}))
    agents = [Agent('u%d' % i, colors[rng.integers(len(colors))],
                    places[rng.integers(len(places))])
              for i in range(rng.integers(1, 4))]
    return template, agents


def timing(solution):
    return sorted((t.transition, t.agents, t.start)
                  for t in solution.getTasks())


class RandomNetTestCase(unittest.TestCase):

    schedules = 200

    def setUp(self):
        self.rng = numpy.random.Generator(numpy.random.PCG64(7))

    def timedSchedules(self):
        found = []
        nets = 0
        while len(found) < self.schedules:
            nets += 1
            self.assertTrue(nets < 1000, "too few schedules")
            template, agents = randomNet(self.rng)
            horizon = int(self.rng.integers(1, 6))
            cs = compileTimed(template, agents, horizon)
            solutions, truncated = iterSolutions(cs, 5)
            found.extend(solutions)
        return found[:self.schedules]

    def test_projectAndLift(self):
        for timed in self.timedSchedules():
            for level in (PLAN, COUNTS):
                coarse = project(timed, level)
                self.assertEqual(
                    [], coarse.system.checkAssignment(coarse.values))
                self.assertEqual(keyAt(timed, level), coarse.getKey())
            plan = project(timed, PLAN)
            lifted = lift(plan, TIMED, horizon=timed.system.steps, cap=1000)
            self.assertFalse(lifted.truncated)
            self.assertTrue(timing(timed) in [timing(s) for s in lifted],
                            timing(timed))


def test_suite():
    suite = unittest.TestSuite()
    suite.addTests([
        unittest.defaultTestLoader.loadTestsFromTestCase(HierarchyTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(RandomNetTestCase),
    ])
    return suite

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
