# (C) Copyright 2026 opcore contributors
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 2 as published
# by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 59 Temple Place - Suite 330, Boston, MA
# 02111-1307, USA.
#
# $Id$

"""Constraint programs from tasking templates.

Three levels of detail share one vocabulary. The timed level tracks every
agent at every tick and indexes task variables by start time and duration.
The plan level forgets time: every task takes one step. The counts level
also forgets identities and tracks how many agents of each color sit at
each place.

Variable names are stable and appear verbatim in LP exports:

  m_<place>_<t>_<agent>              agent at place at tick/step t
  m_<place>_<j>_<color>              count of a color at a place (counts)
  s_<transition>_<t>_d<d>_<binding>  task started at t lasting d (timed)
  s_<transition>_<j>_<binding>       task fired at step j (plan level)
  s_<transition>_<j>                 firings of a transition (counts)
  f_<t>_<agent>                      fuel of an agent at t
  makespan

A binding lists the agent ids in the order of the transition's moves.
"""

import math
from collections import OrderedDict
from itertools import combinations
from logging import getLogger

import numpy
from zope.interface import implementer

from opcore.errors import PlanningError, FuelError, UnknownPlaceError
from opcore.interfaces import IAgent, ITaskingModel, IConstraintSystem
from opcore.schema import isIdentifier
from opcore.util import loadDocument, checkKeys, checkVersion, join

logger = getLogger('opcore.planner')

TIMED = 'timed'
PLAN = 'plan'
COUNTS = 'counts'
LEVELS = (TIMED, PLAN, COUNTS)

MIN_MAKESPAN = 'min_makespan'
MAX_SURVIVAL = 'max_total_risk_survival'
FEASIBILITY = 'feasibility'
OBJECTIVES = (MIN_MAKESPAN, MAX_SURVIVAL, FEASIBILITY)

CLAMP = 'clamp'
LITERAL = 'literal'

MINIMIZE = 'minimize'
MAXIMIZE = 'maximize'

# rows whose variables the solver computes instead of branching on
DEFINITIONAL = ('init', 'update', 'fuel_init', 'fuel_update', 'fuel_refuel',
                'fuel_literal', 'makespan')
GROUPS = DEFINITIONAL + ('source', 'onehot', 'fleet', 'goal', 'fuel_min',
                         'symmetry', 'link', 'fix')

TOLERANCE = 1e-6


@implementer(IAgent)
class Agent(object):

    def __init__(self, id, color, start_place, fuel_init=0.0, fuel_max=0.0,
                 fuel_min=0.0):
        self.id = id
        self.color = color
        self.start_place = start_place
        self.fuel_init = fuel_init
        self.fuel_max = fuel_max
        self.fuel_min = fuel_min
        for value, what in ((id, 'id'), (color, 'color'),
                            (start_place, 'start')):
            if not isIdentifier(value):
                raise PlanningError("Bad agent %s %r" % (what, value),
                                    join('agents', str(id), what))
        if not fuel_min <= fuel_init <= fuel_max:
            raise FuelError("Agent %r needs fuel_min <= fuel_init <= "
                            "fuel_max, got %r, %r, %r" % (
                                id, fuel_min, fuel_init, fuel_max),
                            join('agents', id))

    def isInterchangeable(self, other):
        return ((self.color, self.start_place, self.fuel_init,
                 self.fuel_max, self.fuel_min)
                == (other.color, other.start_place, other.fuel_init,
                    other.fuel_max, other.fuel_min))

    def __repr__(self):
        return '<Agent %s (%s) at %s>' % (self.id, self.color,
                                          self.start_place)


class TaskInstance(object):
    """A transition with an agent bound to each of its moves.

    `moves` holds (agent index, color, source, target) in move order.
    """

    def __init__(self, transition, index, moves, agents):
        self.transition = transition
        self.index = index
        self.moves = tuple(moves)
        self.agents = tuple(sorted(set(m[0] for m in self.moves)))
        self.binding = '_'.join(agents[m[0]].id for m in self.moves)
        self.sortKey = (len(self.agents), self.agents, index,
                        tuple(m[0] for m in self.moves))

    @property
    def name(self):
        return '%s_%s' % (self.transition.name, self.binding)

    @property
    def duration(self):
        return self.transition.duration

    def getMove(self, agent):
        for move in self.moves:
            if move[0] == agent:
                return move
        raise KeyError(agent)

    def __repr__(self):
        return '<TaskInstance %s>' % self.name


def _bindings(groups, pools, used):
    """Assign distinct agents to each group of identical moves."""
    if not groups:
        yield ()
        return
    (move, count), rest = groups[0], groups[1:]
    candidates = [a for a in pools.get(move[0], ()) if a not in used]
    for chosen in combinations(candidates, count):
        for tail in _bindings(rest, pools, used | set(chosen)):
            yield tuple((a,) + move for a in chosen) + tail


@implementer(ITaskingModel)
class TaskingModel(object):
    """A tasking template bound to a fleet, with its incidence matrices.

    Rows of M, Ms and Mt are task instances ordered by (number of agents,
    agent indices, transition index); columns are (agent, place) pairs,
    agent-major.
    """

    def __init__(self, template, agents):
        self.template = template
        self.agents = tuple(agents)
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise PlanningError("Agent ids must be unique", 'agents')
        for agent in self.agents:
            if agent.color not in template.colors:
                raise PlanningError(
                    "Agent %r has color %r which the template does not "
                    "know" % (agent.id, agent.color),
                    join('agents', agent.id))
            if agent.start_place not in template.places:
                raise UnknownPlaceError(agent.start_place,
                                        join('agents', agent.id))
        self.places = template.places
        pools = OrderedDict()
        for index, agent in enumerate(self.agents):
            pools.setdefault(agent.color, []).append(index)
        instances = []
        for t_index, transition in enumerate(template.transitions):
            for moves in _bindings(transition.getMoveGroups(), pools,
                                   frozenset()):
                instances.append(TaskInstance(transition, t_index, moves,
                                              self.agents))
        instances.sort(key=lambda i: i.sortKey)
        self.instances = tuple(instances)
        self.columns = tuple((a.id, p) for a in self.agents
                             for p in self.places)
        self.M, self.Ms, self.Mt = self._matrices(self.instances)

    def _matrices(self, instances):
        n_places = len(self.places)
        shape = (len(instances), len(self.columns))
        source = numpy.zeros(shape, dtype=int)
        target = numpy.zeros(shape, dtype=int)
        for row, instance in enumerate(instances):
            for agent, color, src, dst in instance.moves:
                source[row, agent * n_places + self.places.index(src)] += 1
                target[row, agent * n_places + self.places.index(dst)] += 1
        return target - source, source, target

    def getColumn(self, agent, place):
        return agent * len(self.places) + self.places.index(place)

    def getInstances(self, duration=None):
        if duration is None:
            return list(self.instances)
        return [i for i in self.instances if i.duration == duration]

    def getMatrices(self, duration=None):
        """(M, Ms) restricted to instances of one duration."""
        M, Ms, Mt = self._matrices(self.getInstances(duration))
        return M, Ms

    def getFleet(self):
        fleet = OrderedDict()
        for agent in self.agents:
            fleet[agent.color] = fleet.get(agent.color, 0) + 1
        return fleet

    def getAgentIndex(self, agent_id):
        ids = [a.id for a in self.agents]
        if agent_id not in ids:
            raise PlanningError("Goal names unknown agent %r" % (agent_id,),
                                'goal')
        return ids.index(agent_id)


class Variable(object):
    """A decision or derived variable.

    `kind` is 'state', 'task', 'fuel' or 'makespan'; `step` is the tick
    or step the value belongs to (the start for tasks).
    """

    __slots__ = ('name', 'kind', 'lower', 'upper', 'integer', 'step', 'info')

    def __init__(self, name, kind, lower, upper, integer, step, info=None):
        self.name = name
        self.kind = kind
        self.lower = lower
        self.upper = upper
        self.integer = integer
        self.step = step
        self.info = info

    @property
    def binary(self):
        return self.integer and self.lower == 0 and self.upper == 1

    def __repr__(self):
        return '<Variable %s>' % self.name


class TaskRef(object):
    """What a task variable starts: an instance (or a transition at the
    counts level), when and for how long."""

    __slots__ = ('instance', 'transition', 'start', 'duration')

    def __init__(self, instance, transition, start, duration):
        self.instance = instance
        self.transition = transition
        self.start = start
        self.duration = duration

    @property
    def end(self):
        return self.start + self.duration


class LinearConstraint(object):

    __slots__ = ('name', 'coeffs', 'sense', 'rhs', 'group')

    def __init__(self, name, coeffs, sense, rhs, group):
        if sense not in ('<=', '>=', '='):
            raise PlanningError("Unknown sense %r" % (sense,))
        merged = OrderedDict()
        for var, coef in coeffs:
            merged[var] = merged.get(var, 0) + coef
        self.name = name
        self.coeffs = tuple((v, c) for v, c in merged.items() if c)
        self.sense = sense
        self.rhs = rhs
        self.group = group

    def evaluate(self, values):
        return math.fsum(c * values.get(v, 0) for v, c in self.coeffs)

    def isSatisfied(self, values, tolerance=TOLERANCE):
        lhs = self.evaluate(values)
        if self.sense == '<=':
            return lhs <= self.rhs + tolerance
        if self.sense == '>=':
            return lhs >= self.rhs - tolerance
        return abs(lhs - self.rhs) <= tolerance

    def __repr__(self):
        return '<LinearConstraint %s>' % self.name


class Objective(object):

    def __init__(self, name=FEASIBILITY, sense=MINIMIZE, coeffs=()):
        self.name = name
        self.sense = sense
        self.coeffs = tuple(coeffs)

    def evaluate(self, values):
        return math.fsum(c * values.get(v, 0) for v, c in self.coeffs)


class Goal(object):
    """Final places per agent and/or minimum counts per (color, place)."""

    def __init__(self, agents=None, counts=None):
        self.agents = OrderedDict(agents or {})
        self.counts = OrderedDict(counts or {})

    def isEmpty(self):
        return not self.agents and not self.counts

    def getCounts(self, model):
        """The goal as (color, place) minimum counts."""
        counts = OrderedDict(self.counts)
        for agent_id, place in self.agents.items():
            color = model.agents[model.getAgentIndex(agent_id)].color
            counts[(color, place)] = counts.get((color, place), 0) + 1
        return counts


class RiskModel(object):
    """Per-tick survival factors for agents waiting at places and for
    agents busy with a transition. Unlisted factors are 1."""

    def __init__(self, places=None, tasks=None):
        self.places = dict(places or {})
        self.tasks = dict(tasks or {})
        for factor in list(self.places.values()) + list(self.tasks.values()):
            for f in isinstance(factor, list) and factor or [factor]:
                if not 0.0 < f <= 1.0:
                    raise PlanningError("Survival factors must lie in "
                                        "(0, 1], got %r" % (f,), 'risk')

    def placeFactor(self, place, t):
        factor = self.places.get(place, 1.0)
        if isinstance(factor, list):
            factor = t < len(factor) and factor[t] or factor[-1]
        return factor

    def taskFactor(self, transition):
        return self.tasks.get(transition, 1.0)


class FuelModel(object):
    """How the solver derives fuel levels tick by tick.

    For every agent and tick, `delta[a][t]` lists (variable, coefficient)
    terms of the fuel change and `refuels[a][t]` the refuel task variables
    completing at t + 1.
    """

    def __init__(self, rule, variables, limits, delta, refuels):
        self.rule = rule
        self.variables = variables
        self.limits = limits
        self.delta = delta
        self.refuels = refuels

    def derive(self, values, agent, t):
        """Fuel of `agent` at t + 1."""
        f_min, f_max = self.limits[agent]
        level = values[self.variables[agent][t]] + math.fsum(
            c * values[v] for v, c in self.delta[agent][t])
        if self.rule == LITERAL:
            return max(level, f_max)
        if any(values[v] for v in self.refuels[agent][t]):
            return f_max
        return min(level, f_max)


@implementer(IConstraintSystem)
class ConstraintSystem(object):

    def __init__(self, level, model, steps, variables, rows, objective=None,
                 goal=None, fuel=None, risk=None):
        self.level = level
        self.model = model
        self.steps = steps
        self.variables = OrderedDict((v.name, v) for v in variables)
        self.rows = tuple(rows)
        self.objective = objective or Objective()
        self.goal = goal or Goal()
        self.fuel = fuel
        self.risk = risk or RiskModel()
        for row in self.rows:
            for var, coef in row.coeffs:
                if var not in self.variables:
                    raise PlanningError("Row %r uses undeclared variable %r"
                                        % (row.name, var))

    @property
    def horizon(self):
        return self.steps

    def _replace(self, **kw):
        args = dict(level=self.level, model=self.model, steps=self.steps,
                    variables=list(self.variables.values()), rows=self.rows,
                    objective=self.objective, goal=self.goal, fuel=self.fuel,
                    risk=self.risk)
        args.update(kw)
        return ConstraintSystem(**args)

    # ACCESSORS

    def getVariable(self, name):
        return self.variables[name]

    def getVariables(self, kind=None, step=None):
        return [v for v in self.variables.values()
                if (kind is None or v.kind == kind)
                and (step is None or v.step == step)]

    def getRows(self, group=None):
        return [r for r in self.rows if group is None or r.group == group]

    def getRow(self, name):
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)

    def checkAssignment(self, values, groups=None):
        """Rows violated by `values`, optionally limited to `groups`."""
        violated = []
        for row in self.rows:
            if groups is not None and row.group not in groups:
                continue
            if not row.isSatisfied(values):
                violated.append(row)
        for name, var in self.variables.items():
            value = values.get(name, 0)
            if value < var.lower - TOLERANCE or value > var.upper + TOLERANCE:
                violated.append(Variable(name, 'bound', var.lower,
                                         var.upper, var.integer, var.step))
        return violated

    # MANIPULATORS (returning new systems)

    def withRows(self, rows):
        return self._replace(rows=self.rows + tuple(rows))

    def withFixed(self, name, value):
        """Add a row pinning variable `name` to `value`."""
        return self.withRows([LinearConstraint(
            'fix_%s' % name, [(name, 1)], '=', value, 'fix')])

    def withObjective(self, name):
        if name not in OBJECTIVES:
            raise PlanningError("Unknown objective %r, expected one of %s" % (
                name, ', '.join(OBJECTIVES)))
        if name == FEASIBILITY:
            return self._replace(objective=Objective())
        if self.level == COUNTS:
            raise PlanningError("The counts level only checks feasibility")
        if name == MIN_MAKESPAN:
            return self._replace(objective=Objective(
                name, MINIMIZE, [('makespan', 1)]))
        return self._replace(objective=Objective(
            name, MAXIMIZE, _survivalCoefficients(self)))

    def __repr__(self):
        return '<ConstraintSystem %s, %d steps, %d variables, %d rows>' % (
            self.level, self.steps, len(self.variables), len(self.rows))


def _survivalCoefficients(cs):
    coeffs = OrderedDict()
    model, risk = cs.model, cs.risk

    def add(var, value):
        if value:
            coeffs[var] = coeffs.get(var, 0.0) + value

    for var in cs.getVariables('state'):
        agent, place = var.info
        if var.step < cs.steps:
            add(var.name, math.log(risk.placeFactor(place, var.step)))
    for var in cs.getVariables('task'):
        ref = var.info
        for agent, color, source, target in ref.instance.moves:
            # the departing agent does not wait at its source that tick
            add(var.name, -math.log(risk.placeFactor(source, ref.start)))
            add(var.name, ref.duration * math.log(
                risk.taskFactor(ref.transition.name)))
    return [(v, c) for v, c in coeffs.items() if c]


class _Builder(object):

    def __init__(self):
        self.variables = []
        self.names = set()
        self.rows = []
        self.row_names = set()

    def var(self, name, kind, lower, upper, integer, step, info=None):
        if name in self.names:
            raise PlanningError(
                "Variable name %r is ambiguous; rename places or agents so "
                "that names do not run together" % name)
        self.names.add(name)
        variable = Variable(name, kind, lower, upper, integer, step, info)
        self.variables.append(variable)
        return variable

    def row(self, name, coeffs, sense, rhs, group):
        if name in self.row_names:
            raise PlanningError("Row name %r is ambiguous" % name)
        row = LinearConstraint(name, coeffs, sense, rhs, group)
        if not row.coeffs:
            return None
        self.row_names.add(name)
        self.rows.append(row)
        return row


def stateName(place, t, owner):
    return 'm_%s_%d_%s' % (place, t, owner)


def taskName(instance, t, duration=None):
    if duration is None:
        return 's_%s_%d_%s' % (instance.transition.name, t, instance.binding)
    return 's_%s_%d_d%d_%s' % (instance.transition.name, t, duration,
                             instance.binding)


def fuelName(t, agent_id):
    return 'f_%d_%s' % (t, agent_id)


def _asModel(template, agents):
    if isinstance(agents, TaskingModel):
        return agents
    return TaskingModel(template, agents)


def _compileAgents(model, steps, timed, goal, risk, symmetry):
    level = timed and TIMED or PLAN
    places = model.places
    b = _Builder()
    state = {}
    for t in range(steps + 1):
        for a, agent in enumerate(model.agents):
            for p in places:
                state[(a, p, t)] = b.var(stateName(p, t, agent.id), 'state',
                                         0, 1, True, t, (a, p)).name
    departures = {}
    arrivals = {}
    busy = {}
    tasks = []
    for instance in model.instances:
        duration = timed and instance.duration or 1
        if duration > steps:
            logger.debug("%s does not fit in %d steps", instance.name, steps)
        for start in range(steps - duration + 1):
            name = b.var(
                taskName(instance, start, timed and duration or None),
                'task', 0, 1, True, start,
                TaskRef(instance, instance.transition, start, duration)).name
            tasks.append((name, start, duration))
            for a, color, source, target in instance.moves:
                departures.setdefault((a, source, start), []).append(name)
                arrivals.setdefault((a, target, start + duration),
                                    []).append(name)
                for t in range(start + 1, start + duration):
                    busy.setdefault((a, t), []).append(name)
    b.var('makespan', 'makespan', 0, steps, True, steps)

    for a, agent in enumerate(model.agents):
        for p in places:
            name = state[(a, p, 0)]
            b.row('init_' + name, [(name, 1)], '=',
                  p == agent.start_place and 1 or 0, 'init')
    for t in range(steps):
        for a, agent in enumerate(model.agents):
            for p in places:
                after, before = state[(a, p, t + 1)], state[(a, p, t)]
                coeffs = [(after, 1), (before, -1)]
                coeffs += [(s, 1) for s in departures.get((a, p, t), ())]
                coeffs += [(s, -1) for s in arrivals.get((a, p, t + 1), ())]
                b.row('update_' + after, coeffs, '=', 0, 'update')
    for t in range(steps):
        for a, agent in enumerate(model.agents):
            for p in places:
                leaving = departures.get((a, p, t))
                if leaving:
                    name = state[(a, p, t)]
                    b.row('source_' + name, [(name, 1)] + [
                        (s, -1) for s in leaving], '>=', 0, 'source')
    for t in range(steps + 1):
        for a, agent in enumerate(model.agents):
            coeffs = [(state[(a, p, t)], 1) for p in places]
            coeffs += [(s, 1) for s in busy.get((a, t), ())]
            b.row('onehot_%d_%s' % (t, agent.id), coeffs, '=', 1, 'onehot')
    _goalRows(b, model, goal, lambda a, p: state[(a, p, steps)])
    for name, start, duration in tasks:
        b.row('makespan_' + name, [('makespan', 1),
                                   (name, -(start + duration))],
              '>=', 0, 'makespan')
    if symmetry:
        _symmetryRows(b, model, tasks)
    return ConstraintSystem(level, model, steps, b.variables, b.rows,
                            goal=goal, risk=risk)


def _goalRows(b, model, goal, state):
    if goal is None:
        return
    for agent_id, place in goal.agents.items():
        a = model.getAgentIndex(agent_id)
        if place not in model.places:
            raise UnknownPlaceError(place, 'goal')
        b.row('goal_%s' % agent_id, [(state(a, place), 1)], '=', 1, 'goal')
    for (color, place), count in goal.counts.items():
        if place not in model.places:
            raise UnknownPlaceError(place, 'goal')
        members = [a for a, agent in enumerate(model.agents)
                   if agent.color == color]
        b.row('goal_%s_%s' % (color, place),
              [(state(a, place), 1) for a in members] or [
                  ('makespan', 0)], '>=', count, 'goal')


def _symmetryRows(b, model, tasks):
    involved = {}
    for name, start, duration in tasks:
        for a in b.variables[[v.name for v in b.variables].index(
                name)].info.instance.agents:
            involved.setdefault(a, []).append(name)
    agents = model.agents
    for a in range(len(agents)):
        for c in range(a + 1, len(agents)):
            if agents[a].isInterchangeable(agents[c]):
                b.row('symmetry_%s_%s' % (agents[a].id, agents[c].id),
                      [(s, 1) for s in involved.get(a, ())]
                      + [(s, -1) for s in involved.get(c, ())],
                      '>=', 0, 'symmetry')
                break


def compileUntimed(template, agents, steps, goal=None, risk=None,
                   symmetry=False):
    """The plan level: J steps, every task takes one step."""
    if steps < 1:
        raise PlanningError("A plan needs at least one step, got %r" % steps)
    return _compileAgents(_asModel(template, agents), steps, False, goal,
                          risk, symmetry)


def compileTimed(template, agents, horizon, goal=None, risk=None,
                 symmetry=False):
    """The timed level over ticks 0..horizon.

    An agent busy with a task occupies no place until the task completes.
    Tasks that cannot finish by the horizon get no variables.
    """
    if horizon < 0:
        raise PlanningError("Negative horizon %r" % horizon)
    return _compileAgents(_asModel(template, agents), horizon, True, goal,
                          risk, symmetry)


def compileCounts(template, agents, steps, goal=None):
    """The counts level: integer counts per (color, place) and integer
    firings per transition and step."""
    if steps < 1:
        raise PlanningError("A plan needs at least one step, got %r" % steps)
    model = _asModel(template, agents)
    fleet = model.getFleet()
    places = model.places
    b = _Builder()
    state = {}
    for j in range(steps + 1):
        for color, size in fleet.items():
            for p in places:
                state[(color, p, j)] = b.var(
                    stateName(p, j, color), 'state', 0, size, True, j,
                    (color, p)).name
    firings = []
    for transition in model.template.transitions:
        needs = transition.getColorCounts()
        most = min([fleet.get(c, 0) // n for c, n in needs.items()])
        if not most:
            continue
        for j in range(steps):
            name = b.var('s_%s_%d' % (transition.name, j), 'task', 0, most,
                         True, j, TaskRef(None, transition, j, 1)).name
            firings.append((name, transition, j))
    b.var('makespan', 'makespan', 0, steps, True, steps)
    start = OrderedDict()
    for agent in model.agents:
        key = (agent.color, agent.start_place)
        start[key] = start.get(key, 0) + 1
    for color in fleet:
        for p in places:
            name = state[(color, p, 0)]
            b.row('init_' + name, [(name, 1)], '=',
                  start.get((color, p), 0), 'init')
    for j in range(steps):
        for color in fleet:
            for p in places:
                after, before = state[(color, p, j + 1)], state[
                    (color, p, j)]
                coeffs = [(after, 1), (before, -1)]
                used = []
                for name, transition, step in firings:
                    if step != j:
                        continue
                    out = sum(1 for c, s, t in transition.moves
                              if c == color and s == p)
                    into = sum(1 for c, s, t in transition.moves
                               if c == color and t == p)
                    coeffs.append((name, out - into))
                    if out:
                        used.append((name, -out))
                b.row('update_' + after, coeffs, '=', 0, 'update')
                if used:
                    b.row('source_' + before, [(before, 1)] + used, '>=', 0,
                          'source')
    for j in range(steps + 1):
        for color, size in fleet.items():
            b.row('fleet_%d_%s' % (j, color),
                  [(state[(color, p, j)], 1) for p in places], '=', size,
                  'fleet')
    if goal is not None:
        for (color, place), count in goal.getCounts(model).items():
            if place not in places:
                raise UnknownPlaceError(place, 'goal')
            if color not in fleet:
                raise PlanningError("Goal asks for color %r which the fleet "
                                    "lacks" % color, 'goal')
            b.row('goal_%s_%s' % (color, place),
                  [(state[(color, place, steps)], 1)], '>=', count, 'goal')
    return ConstraintSystem(COUNTS, model, steps, b.variables, b.rows,
                            goal=goal)


def addFuelSemantics(cs, burn_rates, refuel=None, task_burn=None,
                     rule=CLAMP):
    """Add fuel variables and rows to an agent-level system.

    `burn_rates[color][place]` is the burn per tick of an idle agent.
    A busy agent burns `task_burn[transition][color]` per tick, by default
    the rate at its source place. `refuel` maps a transition name to the
    color it refuels; completing it fills the receiver's tank.
    """
    if cs.level == COUNTS:
        raise FuelError("Fuel needs agent-level variables")
    if rule not in (CLAMP, LITERAL):
        raise FuelError("Unknown fuel rule %r" % (rule,))
    if cs.fuel is not None:
        raise FuelError("The system already has fuel semantics")
    model = cs.model
    refuel = dict(refuel or {})
    task_burn = dict(task_burn or {})
    for name, color in refuel.items():
        try:
            transition = model.template.getTransition(name)
        except KeyError:
            raise FuelError("Unknown refuel transition %r" % name, 'refuel')
        if color not in transition.getColorCounts():
            raise FuelError("Refuel transition %r has no %r token" % (
                name, color), 'refuel')

    def rate(color, place):
        try:
            return burn_rates[color][place]
        except KeyError:
            raise FuelError("No burn rate for color %r at place %r" % (
                color, place), join('burn_rates', color, place))

    for agent in model.agents:
        for place in model.places:
            rate(agent.color, place)

    steps = cs.steps
    b = _Builder()
    b.variables = list(cs.variables.values())
    b.names = set(cs.variables)
    b.rows = list(cs.rows)
    b.row_names = set(r.name for r in cs.rows)
    names = {}
    limits = {}
    delta = {}
    refuels = {}
    tasks = cs.getVariables('task')
    for a, agent in enumerate(model.agents):
        upper = rule == CLAMP and agent.fuel_max or math.inf
        names[a] = [b.var(fuelName(t, agent.id), 'fuel', -math.inf, upper,
                          False, t, a).name for t in range(steps + 1)]
        limits[a] = (agent.fuel_min, agent.fuel_max)
        delta[a] = []
        refuels[a] = []
        heaviest = 0.0
        for t in range(steps):
            terms = OrderedDict()
            for place in model.places:
                r = rate(agent.color, place)
                heaviest = max(heaviest, r)
                if r:
                    terms[stateName(place, t, agent.id)] = -r
            completing = []
            for var in tasks:
                ref = var.info
                if a not in ref.instance.agents:
                    continue
                a_, color, source, target = ref.instance.getMove(a)
                name = ref.transition.name
                busy_rate = task_burn.get(name, {}).get(
                    color, rate(color, source))
                heaviest = max(heaviest, busy_rate)
                coef = 0.0
                if ref.start == t:
                    coef += rate(color, source)
                if ref.start <= t < ref.end:
                    coef -= busy_rate
                if coef:
                    terms[var.name] = terms.get(var.name, 0.0) + coef
                if refuel.get(name) == color and ref.end == t + 1:
                    completing.append(var.name)
            delta[a].append(tuple((v, c) for v, c in terms.items() if c))
            refuels[a].append(tuple(completing))
        big = agent.fuel_max - agent.fuel_min + heaviest + 1
        f = names[a]
        b.row('fuel_init_' + agent.id, [(f[0], 1)], '=', agent.fuel_init,
              'fuel_init')
        for t in range(steps):
            change = [(v, -c) for v, c in delta[a][t]]
            if rule == CLAMP:
                b.row('fuel_update_' + f[t + 1],
                      [(f[t + 1], 1), (f[t], -1)] + change
                      + [(v, -big) for v in refuels[a][t]],
                      '<=', 0, 'fuel_update')
                if refuels[a][t]:
                    b.row('fuel_refuel_' + f[t + 1], [(f[t + 1], 1)] + [
                        (v, -agent.fuel_max) for v in refuels[a][t]],
                        '>=', 0, 'fuel_refuel')
            else:
                b.row('fuel_update_' + f[t + 1],
                      [(f[t + 1], 1), (f[t], -1)] + change,
                      '>=', 0, 'fuel_update')
                b.row('fuel_literal_' + f[t + 1], [(f[t + 1], 1)], '>=',
                      agent.fuel_max, 'fuel_literal')
        for t in range(1, steps + 1):
            b.row('fuel_min_' + f[t], [(f[t], 1)], '>=', agent.fuel_min,
                  'fuel_min')
    fuel = FuelModel(rule, names, limits, delta, refuels)
    return cs._replace(variables=b.variables, rows=b.rows, fuel=fuel)


# scenario documents

class TaskingScenario(object):
    """Everything a tasking run needs besides the template."""

    def __init__(self, agents, horizon, steps=None, objective=FEASIBILITY,
                 goal=None, burn_rates=None, task_burn=None, refuel=None,
                 risk=None, fuel_rule=CLAMP, epoch=None, tick_minutes=60):
        self.agents = tuple(agents)
        self.horizon = horizon
        self.steps = steps or max(1, horizon)
        self.objective = objective
        self.goal = goal or Goal()
        self.burn_rates = burn_rates
        self.task_burn = task_burn or {}
        self.refuel = refuel or {}
        self.risk = risk or RiskModel()
        self.fuel_rule = fuel_rule
        self.epoch = epoch
        self.tick_minutes = tick_minutes


def parseTaskingScenario(data):
    doc = loadDocument(data, 'tasking scenario')
    checkKeys(doc, ('version', 'agents', 'horizon', 'steps', 'objective',
                    'goal', 'burn_rates', 'task_burn', 'refuel', 'risk',
                    'fuel_rule', 'epoch', 'tick_minutes'),
              ('agents', 'horizon'), error=PlanningError)
    checkVersion(doc, PlanningError)
    agents = []
    for index, entry in enumerate(doc['agents']):
        checkKeys(entry, ('id', 'color', 'start', 'fuel_init', 'fuel_max',
                          'fuel_min'), ('id', 'color', 'start'),
                  join('agents', index), PlanningError)
        fuel_max = entry.get('fuel_max', entry.get('fuel_init', 0.0))
        agents.append(Agent(entry['id'], entry['color'], entry['start'],
                            entry.get('fuel_init', fuel_max), fuel_max,
                            entry.get('fuel_min', 0.0)))
    objective = doc.get('objective', FEASIBILITY)
    if objective not in OBJECTIVES:
        raise PlanningError("Unknown objective %r" % (objective,),
                            'objective')
    goal_doc = doc.get('goal', {})
    checkKeys(goal_doc, ('agents', 'counts'), (), 'goal', PlanningError)
    counts = OrderedDict()
    for index, entry in enumerate(goal_doc.get('counts', [])):
        checkKeys(entry, ('color', 'place', 'count'),
                  ('color', 'place', 'count'), join('goal.counts', index),
                  PlanningError)
        counts[(entry['color'], entry['place'])] = entry['count']
    risk_doc = doc.get('risk', {})
    checkKeys(risk_doc, ('places', 'tasks'), (), 'risk', PlanningError)
    fuel_rule = doc.get('fuel_rule', CLAMP)
    if fuel_rule not in (CLAMP, LITERAL):
        raise PlanningError("Unknown fuel rule %r" % (fuel_rule,),
                            'fuel_rule')
    horizon = doc['horizon']
    if isinstance(horizon, bool) or not isinstance(horizon, int) \
            or horizon < 0:
        raise PlanningError("Horizon must be a non-negative integer",
                            'horizon')
    return TaskingScenario(
        agents, horizon, doc.get('steps'), objective,
        Goal(goal_doc.get('agents'), counts), doc.get('burn_rates'),
        doc.get('task_burn'), doc.get('refuel'),
        RiskModel(risk_doc.get('places'), risk_doc.get('tasks')),
        fuel_rule, doc.get('epoch'), doc.get('tick_minutes', 60))


def buildSystem(template, scenario, level=TIMED, symmetry=False):
    """Compile `scenario` at `level`, with fuel when burn rates are given
    and the scenario's objective."""
    model = TaskingModel(template, scenario.agents)
    if level == TIMED:
        cs = compileTimed(template, model, scenario.horizon, scenario.goal,
                          scenario.risk, symmetry)
    elif level == PLAN:
        cs = compileUntimed(template, model, scenario.steps, scenario.goal,
                            scenario.risk, symmetry)
    elif level == COUNTS:
        return compileCounts(template, model, scenario.steps, scenario.goal)
    else:
        raise PlanningError("Unknown level %r" % (level,))
    if scenario.burn_rates is not None:
        cs = addFuelSemantics(cs, scenario.burn_rates, scenario.refuel,
                              scenario.task_burn, scenario.fuel_rule)
    return cs.withObjective(scenario.objective)
