import doctest
import json
import unittest

from zope.interface.verify import verifyObject

from opcore.errors import PlanningError, FuelError, UnknownPlaceError
from opcore.errors import TemplateError
from opcore.interfaces import ITaskingModel, IConstraintSystem, IAgent
from opcore.planner import Agent, TaskingModel, Goal
from opcore.planner import compileUntimed, compileTimed, compileCounts
from opcore.planner import addFuelSemantics, parseTaskingScenario
from opcore.planner import buildSystem, TIMED, PLAN, COUNTS, LITERAL
from opcore.planner import MIN_MAKESPAN, FEASIBILITY
from opcore.template import parseTaskingTemplate
from opcore.lpformat import exportLP, parseLP, lpModel

from opcore.tests import readData

UH60 = [[-1, 0, 1, 0],
        [0, -1, 1, 0]]

UH60_SOURCE = [[1, 0, 0, 0],
               [0, 1, 0, 0]]

UH60_UH60 = [[-1, 0, 1, 0, 0, 0, 0, 0],
             [0, -1, 1, 0, 0, 0, 0, 0],
             [0, 0, 0, 0, -1, 0, 1, 0],
             [0, 0, 0, 0, 0, -1, 1, 0],
             [0, 0, -1, 1, 0, 0, -1, 1]]

UH60_HC130 = [[-1, 0, 1, 0, 0, 0, 0, 0],
              [0, -1, 1, 0, 0, 0, 0, 0],
              [0, 0, 0, 0, 0, 0, 0, 0]]

UH60_HC130_SOURCE = [[1, 0, 0, 0, 0, 0, 0, 0],
                     [0, 1, 0, 0, 0, 0, 0, 0],
                     [0, 0, 1, 0, 0, 0, 1, 0]]


class TaskingModelTestCase(unittest.TestCase):

    def setUp(self):
        self.template = parseTaskingTemplate(readData('sar_tasking.json'))

    def test_interfaces(self):
        model = TaskingModel(self.template, [Agent('u1', 'uh60', 'a')])
        self.assertTrue(verifyObject(ITaskingModel, model))
        self.assertTrue(verifyObject(IAgent, model.agents[0]))

    def test_singleHelicopter(self):
        model = TaskingModel(self.template, [Agent('u1', 'uh60', 'a')])
        self.assertEqual(UH60, model.M.tolist())
        self.assertEqual(UH60_SOURCE, model.Ms.tolist())
        self.assertEqual(['tau1_u1', 'tau2_u1'],
                         [i.name for i in model.instances])

    def test_twoHelicopters(self):
        model = TaskingModel(self.template, [Agent('u1', 'uh60', 'a'),
                                             Agent('u2', 'uh60', 'b')])
        self.assertEqual(UH60_UH60, model.M.tolist())
        self.assertEqual('tau4_u1_u2', model.instances[-1].name)
        self.assertEqual((model.Mt - model.Ms).tolist(), model.M.tolist())

    def test_helicopterAndTanker(self):
        model = TaskingModel(self.template, [Agent('u1', 'uh60', 'a'),
                                             Agent('h1', 'hc130', 'c')])
        self.assertEqual(UH60_HC130, model.M.tolist())
        self.assertEqual(UH60_HC130_SOURCE, model.Ms.tolist())
        self.assertEqual({'uh60': 1, 'hc130': 1}, dict(model.getFleet()))

    def test_byDuration(self):
        model = TaskingModel(self.template, [Agent('u1', 'uh60', 'a'),
                                             Agent('u2', 'uh60', 'b')])
        M2, Ms2 = model.getMatrices(2)
        self.assertEqual([UH60_UH60[0], UH60_UH60[2], UH60_UH60[4]],
                         M2.tolist())
        self.assertEqual(2, len(model.getInstances(1)))

    def test_badAgents(self):
        self.assertRaises(PlanningError, TaskingModel, self.template,
                          [Agent('u1', 'c17', 'a')])
        self.assertRaises(UnknownPlaceError, TaskingModel, self.template,
                          [Agent('u1', 'uh60', 'z')])
        self.assertRaises(PlanningError, TaskingModel, self.template,
                          [Agent('u1', 'uh60', 'a'),
                           Agent('u1', 'uh60', 'b')])
        self.assertRaises(FuelError, Agent, 'u1', 'uh60', 'a', 50, 40)


class CompileTestCase(unittest.TestCase):

    def setUp(self):
        self.template = parseTaskingTemplate(readData('sar_tasking.json'))
        self.one = [Agent('u1', 'uh60', 'a')]
        self.two = [Agent('u1', 'uh60', 'a'), Agent('u2', 'uh60', 'b')]

    def test_untimedLayout(self):
        cs = compileUntimed(self.template, self.one, 1)
        self.assertTrue(verifyObject(IConstraintSystem, cs))
        states = [v.name for v in cs.getVariables('state')]
        self.assertEqual(8, len(states))
        self.assertEqual('m_a_0_u1', states[0])
        self.assertEqual(['s_tau1_0_u1', 's_tau2_0_u1'],
                         [v.name for v in cs.getVariables('task')])
        self.assertEqual(1, cs.getRow('init_m_a_0_u1').rhs)
        self.assertEqual(0, cs.getRow('init_m_c_0_u1').rhs)

    def test_noTransitions(self):
        empty = parseTaskingTemplate('{"colors": ["uh60"], '
                                     '"places": ["a", "b"]}')
        cs = compileUntimed(empty, self.one, 2)
        self.assertEqual([], cs.getVariables('task'))
        values = dict((v.name, 0) for v in cs.getVariables())
        for t in range(3):
            values['m_a_%d_u1' % t] = 1
        self.assertEqual([], cs.checkAssignment(values))

    def test_timedDurations(self):
        cs = compileTimed(self.template, self.two, 6)
        names = [v.name for v in cs.getVariables('task', 0)]
        self.assertTrue('s_tau1_0_d2_u1' in names)
        self.assertTrue('s_tau4_0_d2_u1_u2' in names)
        # tasks that cannot finish by the horizon get no variables
        self.assertFalse('s_tau4_5_d2_u1_u2' in cs.variables)
        self.assertTrue('s_tau4_4_d2_u1_u2' in cs.variables)
        busy = cs.getRow('onehot_1_u1')
        self.assertTrue('s_tau1_0_d2_u1' in dict(busy.coeffs))

    def test_namesDoNotRunTogether(self):
        # "a" at tick 10 and "a1" at tick 0, "tau1" at 11 and "tau11" at 1
        template = parseTaskingTemplate(json.dumps({
            'colors': ['uh60'], 'places': ['a', 'a1'],
            'transitions': [
                {'name': 'tau1',
                 'inputs': [{'color': 'uh60', 'place': 'a'}],
                 'outputs': [{'color': 'uh60', 'place': 'a1'}]},
                {'name': 'tau11',
                 'inputs': [{'color': 'uh60', 'place': 'a1'}],
                 'outputs': [{'color': 'uh60', 'place': 'a'}]}]}))
        cs = compileTimed(template, self.one, 12)
        for name in ('m_a_10_u1', 'm_a1_0_u1', 's_tau1_11_d1_u1',
                     's_tau11_1_d1_u1'):
            self.assertTrue(name in cs.variables, name)
        self.assertEqual(lpModel(cs), parseLP(exportLP(cs)))
        counts = compileCounts(template, self.one, 11)
        self.assertTrue('s_tau1_10' in counts.variables)
        self.assertTrue('s_tau11_0' in counts.variables)

    def test_badNames(self):
        doc = {'colors': ['uh60'], 'places': ['a', 'a b']}
        self.assertRaises(TemplateError, parseTaskingTemplate,
                          json.dumps(doc))
        doc['places'] = ['a', 'b-c']
        self.assertRaises(TemplateError, parseTaskingTemplate,
                          json.dumps(doc))
        doc = {'colors': ['uh60'], 'places': ['a', 'b'],
               'transitions': [
                   {'name': 'go there',
                    'inputs': [{'color': 'uh60', 'place': 'a'}],
                    'outputs': [{'color': 'uh60', 'place': 'b'}]}]}
        self.assertRaises(TemplateError, parseTaskingTemplate,
                          json.dumps(doc))
        self.assertRaises(PlanningError, Agent, 'u 1', 'uh60', 'a')
        self.assertRaises(PlanningError, Agent, 'u1', 'uh60', 'a b')
        self.assertRaises(PlanningError, parseTaskingScenario,
                          '{"agents": [{"id": "u-1", "color": "uh60", '
                          '"start": "a"}], "horizon": 2}')

    def test_zeroHorizon(self):
        cs = compileTimed(self.template, self.two, 0)
        self.assertEqual([], cs.getVariables('task'))
        self.assertRaises(PlanningError, compileTimed, self.template,
                          self.two, -1)
        self.assertRaises(PlanningError, compileUntimed, self.template,
                          self.two, 0)

    def test_counts(self):
        cs = compileCounts(self.template, self.two, 2,
                           Goal({'u1': 'd', 'u2': 'd'}))
        self.assertEqual(COUNTS, cs.level)
        self.assertEqual(2, cs.getVariable('m_d_0_uh60').upper)
        self.assertEqual(2, cs.getRow('goal_uh60_d').rhs)
        self.assertEqual(1, cs.getVariable('s_tau4_0').upper)
        self.assertRaises(PlanningError, cs.withObjective, MIN_MAKESPAN)

    def test_goalErrors(self):
        self.assertRaises(PlanningError, compileUntimed, self.template,
                          self.one, 1, Goal({'u9': 'd'}))
        self.assertRaises(UnknownPlaceError, compileUntimed, self.template,
                          self.one, 1, Goal({'u1': 'z'}))
        self.assertRaises(PlanningError, compileCounts, self.template,
                          self.one, 1, Goal({'u9': 'd'}))
        model = TaskingModel(self.template, self.one)
        self.assertRaises(PlanningError, model.getAgentIndex, 'u9')
        self.assertEqual(0, model.getAgentIndex('u1'))

    def test_withFixed(self):
        cs = compileUntimed(self.template, self.one, 1)
        fixed = cs.withFixed('s_tau1_0_u1', 1)
        self.assertEqual(len(cs.rows) + 1, len(fixed.rows))
        self.assertEqual('fix', fixed.getRow('fix_s_tau1_0_u1').group)
        self.assertRaises(PlanningError, cs.withObjective, 'max_profit')


class FuelTestCase(unittest.TestCase):

    def setUp(self):
        self.template = parseTaskingTemplate(readData('sar_tasking.json'))
        self.scenario = parseTaskingScenario(readData('sar_refuel.json'))

    def test_fuelRows(self):
        cs = buildSystem(self.template, self.scenario)
        self.assertEqual(10, len(cs.getVariables('fuel')))
        self.assertEqual(20, cs.getRow('fuel_init_u1').rhs)
        self.assertEqual(10, cs.getRow('fuel_min_f_1_u1').rhs)
        self.assertTrue(cs.getRows('fuel_refuel'))
        self.assertEqual(100, cs.getVariable('f_2_u1').upper)

    def test_literalRule(self):
        doc = json.loads(readData('sar_refuel.json'))
        doc['fuel_rule'] = LITERAL
        cs = buildSystem(self.template, parseTaskingScenario(doc))
        self.assertEqual(LITERAL, cs.fuel.rule)
        self.assertTrue(cs.getRows('fuel_literal'))
        self.assertEqual([], cs.getRows('fuel_refuel'))

    def test_fuelErrors(self):
        cs = compileTimed(self.template, self.scenario.agents, 2)
        self.assertRaises(FuelError, addFuelSemantics, cs,
                          {'uh60': {'a': 1}})
        self.assertRaises(FuelError, addFuelSemantics, cs,
                          self.scenario.burn_rates, {'tau1': 'hc130'})
        self.assertRaises(FuelError, addFuelSemantics, cs,
                          self.scenario.burn_rates, {'tau9': 'uh60'})
        counts = compileCounts(self.template, self.scenario.agents, 2)
        self.assertRaises(FuelError, addFuelSemantics, counts,
                          self.scenario.burn_rates)
        fueled = addFuelSemantics(cs, self.scenario.burn_rates)
        self.assertRaises(FuelError, addFuelSemantics, fueled,
                          self.scenario.burn_rates)


class ScenarioTestCase(unittest.TestCase):

    def test_parse(self):
        scenario = parseTaskingScenario(readData('sar_mission.json'))
        self.assertEqual(['u1', 'u2'], [a.id for a in scenario.agents])
        self.assertEqual(6, scenario.horizon)
        self.assertEqual(3, scenario.steps)
        self.assertEqual(MIN_MAKESPAN, scenario.objective)
        self.assertEqual({'u1': 'd', 'u2': 'd'}, dict(scenario.goal.agents))
        self.assertEqual(30, scenario.tick_minutes)

    def test_defaults(self):
        scenario = parseTaskingScenario(
            '{"agents": [{"id": "u1", "color": "uh60", "start": "a"}], '
            '"horizon": 0}')
        self.assertEqual(FEASIBILITY, scenario.objective)
        self.assertEqual(1, scenario.steps)
        self.assertTrue(scenario.goal.isEmpty())

    def test_errors(self):
        for doc in ('{"agents": [], "horizon": -1}',
                    '{"agents": [], "horizon": true}',
                    '{"agents": [], "horizon": 2, "objective": "fastest"}',
                    '{"agents": [], "horizon": 2, "fuel_rule": "max"}',
                    '{"agents": [{"id": "u1"}], "horizon": 2}'):
            self.assertRaises(PlanningError, parseTaskingScenario, doc)

    def test_levels(self):
        template = parseTaskingTemplate(readData('sar_tasking.json'))
        scenario = parseTaskingScenario(readData('sar_mission.json'))
        self.assertEqual(TIMED, buildSystem(template, scenario).level)
        plan = buildSystem(template, scenario, PLAN)
        self.assertEqual((PLAN, 3), (plan.level, plan.steps))
        self.assertEqual(COUNTS, buildSystem(template, scenario,
                                             COUNTS).level)
        self.assertRaises(PlanningError, buildSystem, template, scenario,
                          'hourly')


def test_suite():
    suite = unittest.TestSuite()
    suite.addTests([
        unittest.defaultTestLoader.loadTestsFromTestCase(
            TaskingModelTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(CompileTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(FuelTestCase),
        unittest.defaultTestLoader.loadTestsFromTestCase(ScenarioTestCase),
        ])
    suite.addTests([doctest.DocFileSuite(
        '../../../doc/tasking.txt',
        optionflags=doctest.ELLIPSIS | doctest.IGNORE_EXCEPTION_DETAIL)])
    return suite

if __name__ == '__main__':
    unittest.main(defaultTest='test_suite')
