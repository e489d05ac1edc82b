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

"""Exact search over compiled constraint systems.

The solver walks time forward. At each step it computes the state (and
fuel) variables from the definitional rows, then branches on the task
variables starting at that step. Every other row is checked incrementally
as an interval over its unassigned variables. Step boundaries are
memoized on the state reached, which collapses permutations of
independent decisions.
"""

import math
from collections import OrderedDict
from logging import getLogger

from zope.event import notify
from zope.interface import implementer
from zope.schema.fieldproperty import FieldProperty

from opcore.errors import PlanningError, PlanningInvariantError
from opcore.events import IncumbentFoundEvent
from opcore.interfaces import ISolverConfig, ISolution, IInfeasible
from opcore.interfaces import IUndecided
from opcore.planner import DEFINITIONAL, MAXIMIZE, MIN_MAKESPAN
from opcore.planner import FEASIBILITY, MAX_SURVIVAL, COUNTS, TOLERANCE

logger = getLogger('opcore.solver')

OPTIMAL = 'optimal'
FEASIBLE = 'feasible'
INFEASIBLE = 'infeasible'
UNDECIDED = 'undecided'


@implementer(ISolverConfig)
class SolverConfig(object):

    node_limit = FieldProperty(ISolverConfig['node_limit'])
    lift_cap = FieldProperty(ISolverConfig['lift_cap'])
    symmetry = FieldProperty(ISolverConfig['symmetry'])
    fuel_rule = FieldProperty(ISolverConfig['fuel_rule'])

    def __init__(self, node_limit=200000, lift_cap=100, symmetry=False,
                 fuel_rule=u'clamp'):
        self.node_limit = node_limit
        self.lift_cap = lift_cap
        self.symmetry = symmetry
        self.fuel_rule = fuel_rule


class ScheduledTask(object):

    def __init__(self, name, transition, agents, start, duration, count=1,
                 moves=()):
        self.name = name
        self.transition = transition
        self.agents = tuple(agents)
        self.start = start
        self.duration = duration
        self.count = count
        self.moves = tuple(moves)

    @property
    def end(self):
        return self.start + self.duration

    def toDict(self):
        return {'variable': self.name, 'transition': self.transition,
                'agents': list(self.agents), 'start': self.start,
                'duration': self.duration, 'count': self.count}

    def __repr__(self):
        return '<ScheduledTask %s>' % self.name


@implementer(ISolution)
class Solution(object):

    def __init__(self, system, values, status=OPTIMAL):
        self.system = system
        self.values = dict(values)
        self.status = status
        self.objective = system.objective.evaluate(self.values)

    @property
    def level(self):
        return self.system.level

    def getMakespan(self):
        return int(round(self.values.get('makespan', 0)))

    def getTasks(self):
        """Tasks with a positive value, ordered by start then by the order
        of their variables."""
        cs = self.system
        agents = cs.model.agents
        tasks = []
        for var in cs.getVariables('task'):
            value = int(round(self.values.get(var.name, 0)))
            if not value:
                continue
            ref = var.info
            if ref.instance is None:
                ids = ()
                moves = ref.transition.moves
            else:
                ids = tuple(agents[m[0]].id for m in ref.instance.moves)
                moves = tuple((agents[m[0]].id,) + m[2:]
                              for m in ref.instance.moves)
            tasks.append(ScheduledTask(var.name, ref.transition.name, ids,
                                       ref.start, ref.duration, value,
                                       moves))
        tasks.sort(key=lambda t: t.start)
        return tasks

    def getPositions(self, t):
        """Where everything is at tick or step t: agent id to place (None
        while in flight), or (color, place) to count at the counts level."""
        cs = self.system
        positions = OrderedDict()
        if cs.level == COUNTS:
            for var in cs.getVariables('state', t):
                positions[var.info] = int(round(self.values[var.name]))
            return positions
        for agent in cs.model.agents:
            positions[agent.id] = None
        for var in cs.getVariables('state', t):
            if self.values.get(var.name, 0) > 0.5:
                agent, place = var.info
                positions[cs.model.agents[agent].id] = place
        return positions

    def getFuel(self, t):
        fuel = self.system.fuel
        if fuel is None:
            return {}
        agents = self.system.model.agents
        return OrderedDict((agents[a].id, self.values[names[t]])
                           for a, names in sorted(fuel.variables.items()))

    def getSurvival(self):
        if self.system.objective.name != MAX_SURVIVAL:
            return None
        return math.exp(self.objective)

    def getKey(self):
        """Task decisions grouped by step, empty steps dropped.

        Two solutions with equal keys describe the same plan once time is
        forgotten."""
        steps = OrderedDict()
        for task in self.getTasks():
            entry = (task.transition, task.moves and task.agents or (),
                     task.count)
            steps.setdefault(task.start, []).append(entry)
        return tuple(tuple(sorted(entries)) for start, entries in
                     sorted(steps.items()))

    def toDict(self):
        cs = self.system
        data = {'status': self.status, 'level': cs.level,
                'objective': cs.objective.name,
                'objective_value': self.objective,
                'makespan': self.getMakespan(),
                'tasks': [t.toDict() for t in self.getTasks()]}
        if cs.level != COUNTS:
            data['positions'] = [self.getPositions(t)
                                 for t in range(cs.steps + 1)]
        if cs.fuel is not None:
            data['fuel'] = [self.getFuel(t) for t in range(cs.steps + 1)]
        if self.getSurvival() is not None:
            data['survival'] = self.getSurvival()
        return data

    def __repr__(self):
        return '<Solution %s %s=%r>' % (self.status,
                                        self.system.objective.name,
                                        self.objective)


@implementer(IInfeasible)
class Infeasible(object):

    status = INFEASIBLE

    def __init__(self, system, conflict, minimal=True):
        self.system = system
        self.conflict = tuple(conflict)
        self.minimal = minimal

    def getConflictNames(self):
        return [r.name for r in self.conflict]

    def toDict(self):
        return {'status': self.status, 'level': self.system.level,
                'conflict': self.getConflictNames(),
                'minimal': self.minimal}

    def __repr__(self):
        return '<Infeasible %s>' % ', '.join(self.getConflictNames())


@implementer(IUndecided)
class Undecided(object):

    status = UNDECIDED

    def __init__(self, system, nodes):
        self.system = system
        self.nodes = nodes

    def toDict(self):
        return {'status': self.status, 'level': self.system.level,
                'nodes': self.nodes}

    def __repr__(self):
        return '<Undecided after %d nodes>' % self.nodes


class _NodeLimit(Exception):
    pass


class _Stop(Exception):
    pass


class Solver(object):
    """One search over a system.

    `enabled` restricts the checked rows to those names; definitional rows
    always hold. With `enumerate_limit` the solver collects every feasible
    assignment instead of optimizing, up to that many plus one, keeping
    those `accept` approves.
    """

    _logger = getLogger('opcore.Solver')

    def __init__(self, system, config=None, enabled=None,
                 enumerate_limit=None, accept=None):
        self.system = system
        self.accept = accept
        self.config = config or SolverConfig()
        self.enumerate_limit = enumerate_limit
        variables = system.variables
        self.steps = system.steps

        self.init = {}
        self.updates = {}
        checks = []
        for row in system.rows:
            if row.group == 'init':
                (var, coef), = row.coeffs
                self.init[var] = row.rhs / coef
            elif row.group == 'update':
                target = row.name[len('update_'):]
                coef = dict(row.coeffs)[target]
                others = tuple((v, -c / coef) for v, c in row.coeffs
                               if v != target)
                self.updates[target] = (row.rhs / coef, others)
            elif row.group in DEFINITIONAL:
                continue
            elif enabled is None or row.name in enabled:
                checks.append(row)
        self.checks = checks

        self.states = dict((t, []) for t in range(self.steps + 1))
        self.fuels = dict((t, []) for t in range(self.steps + 1))
        self.decisions = dict((t, []) for t in range(self.steps + 1))
        for var in variables.values():
            if var.kind == 'state':
                self.states[var.step].append(var.name)
            elif var.kind == 'fuel':
                self.fuels[var.step].append(var)
            elif var.kind == 'task':
                self.decisions[var.step].append(var.name)

        self.rowsByVar = {}
        self.spanning = dict((t, []) for t in range(self.steps + 1))
        for index, row in enumerate(checks):
            steps = []
            for var, coef in row.coeffs:
                self.rowsByVar.setdefault(var, []).append(index)
                steps.append(variables[var].step)
            for t in range(min(steps) + 1, max(steps) + 1):
                self.spanning[t].append(index)

        self.inflight = dict((t, []) for t in range(self.steps + 1))
        for var in variables.values():
            if var.kind == 'task':
                ref = var.info
                for t in range(ref.start + 1, ref.end):
                    self.inflight[t].append(var.name)

        objective = system.objective
        self.makespanObjective = objective.name == MIN_MAKESPAN
        self.maximize = objective.sense == MAXIMIZE
        self.objCoeffs = dict(objective.coeffs)
        self.feasibility = (objective.name == FEASIBILITY
                            or not objective.coeffs)
        # best objective change still available from step t on
        self.potential = [0.0] * (self.steps + 2)
        if not self.makespanObjective:
            sign = self.maximize and 1 or -1
            for var, coef in objective.coeffs:
                v = variables[var]
                gain = max(0.0, sign * coef * v.upper, sign * coef * v.lower)
                for t in range(v.step + 1):
                    self.potential[t] += gain

        self.values = {}
        self.nodes = 0
        self.conflicts = set()
        self.memo = {}
        self.best = None
        self.bestValue = None
        self.found = []

    # ACCESSORS

    def _bounds(self, index):
        row = self.checks[index]
        variables = self.system.variables
        lo = hi = 0.0
        for var, coef in row.coeffs:
            if var in self.values:
                lo += coef * self.values[var]
                hi += coef * self.values[var]
            else:
                v = variables[var]
                a, b = coef * v.lower, coef * v.upper
                lo += min(a, b)
                hi += max(a, b)
        return lo, hi

    def _consistent(self, var):
        for index in self.rowsByVar.get(var, ()):
            row = self.checks[index]
            lo, hi = self._bounds(index)
            if row.sense == '<=':
                ok = lo <= row.rhs + TOLERANCE
            elif row.sense == '>=':
                ok = hi >= row.rhs - TOLERANCE
            else:
                ok = lo <= row.rhs + TOLERANCE and hi >= row.rhs - TOLERANCE
            if not ok:
                self.conflicts.add(row.name)
                return False
        return True

    def _partial(self):
        return math.fsum(c * self.values[v] for v, c in self.objCoeffs.items()
                         if v in self.values)

    def _memoKey(self, t):
        key = [t]
        key.extend(self.values[v] for v in self.states[t])
        key.extend(round(self.values[v.name], 9) for v in self.fuels[t])
        key.append(tuple(v for v in self.inflight[t] if self.values[v]))
        for index in self.spanning[t]:
            row = self.checks[index]
            key.append(round(math.fsum(
                c * self.values[v] for v, c in row.coeffs
                if v in self.values), 9))
        return tuple(key)

    # MANIPULATORS

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.config.node_limit:
            raise _NodeLimit()

    def _derive(self, t):
        """Assign the state and fuel variables of step t."""
        assigned = []
        variables = self.system.variables
        for name in self.states[t]:
            if t == 0:
                value = self.init.get(name, 0)
            else:
                rhs, others = self.updates[name]
                value = rhs + math.fsum(c * self.values[v] for v, c in others)
                value = int(round(value))
            var = variables[name]
            self.values[name] = value
            assigned.append(name)
            if value < var.lower or value > var.upper \
                    or not self._consistent(name):
                return assigned, False
        fuel = self.system.fuel
        for var in self.fuels[t]:
            if t == 0:
                value = self.system.model.agents[var.info].fuel_init
            else:
                value = fuel.derive(self.values, var.info, t - 1)
            self.values[var.name] = value
            assigned.append(var.name)
            if not self._consistent(var.name):
                return assigned, False
        return assigned, True

    def _step(self, t, makespan):
        assigned, ok = self._derive(t)
        try:
            if not ok:
                return
            if t == self.steps:
                self._leaf(makespan)
                return
            if not self._worthExploring(t, makespan):
                return
            if self.enumerate_limit is None:
                key = self._memoKey(t)
                score = self._memoScore(makespan)
                seen = self.memo.get(key)
                if seen is not None and not self._strictlyBetter(score, seen):
                    return
                self.memo[key] = score
            self._decide(t, 0, makespan)
        finally:
            for name in assigned:
                del self.values[name]

    def _memoScore(self, makespan):
        if self.makespanObjective:
            return makespan
        if self.feasibility:
            return 0
        return self._partial()

    def _strictlyBetter(self, score, seen):
        if self.feasibility:
            return False
        if self.maximize:
            return score > seen + TOLERANCE
        return score < seen - TOLERANCE

    def _worthExploring(self, t, makespan):
        if self.bestValue is None or self.feasibility \
                or self.enumerate_limit is not None:
            return True
        if self.makespanObjective:
            return makespan < self.bestValue
        bound = self._partial() + (self.maximize and 1 or -1) * \
            self.potential[t]
        if self.maximize:
            return bound > self.bestValue + TOLERANCE
        return bound < self.bestValue - TOLERANCE

    def _decide(self, t, k, makespan):
        names = self.decisions[t]
        if k == len(names):
            self._step(t + 1, makespan)
            return
        name = names[k]
        var = self.system.variables[name]
        for value in range(int(var.upper), int(var.lower) - 1, -1):
            self._tick()
            after = makespan
            if value:
                after = max(makespan, var.info.end)
                if self.makespanObjective and self.bestValue is not None \
                        and after >= self.bestValue:
                    continue
            self.values[name] = value
            try:
                if self._consistent(name):
                    self._decide(t, k + 1, after)
            finally:
                del self.values[name]

    def _leaf(self, makespan):
        values = dict(self.values)
        values['makespan'] = makespan
        if self.enumerate_limit is not None:
            if self.accept is not None and not self.accept(values):
                return
            self.found.append(values)
            if len(self.found) > self.enumerate_limit:
                raise _Stop()
            return
        objective = self.system.objective.evaluate(values)
        if self.best is None or self._strictlyBetter(objective,
                                                     self.bestValue):
            self.best = values
            self.bestValue = objective
            self._logger.log(5, "Incumbent %r after %d nodes", objective,
                             self.nodes)
            notify(IncumbentFoundEvent(self.system, objective, self.nodes))
        if self.feasibility:
            raise _Stop()

    def run(self):
        """Search; return the best assignment found, or None.

        Raises _NodeLimit when the node budget runs out."""
        try:
            self._step(0, 0)
        except _Stop:
            pass
        return self.best


def _verify(system, values):
    violated = system.checkAssignment(values)
    if violated:
        names = ', '.join(r.name for r in violated)
        logger.error("Solver produced an assignment violating %s", names)
        raise PlanningInvariantError(
            "Assignment violates %s" % names)


def _irreducible(system, config, conflicts):
    """Shrink the rows behind an infeasibility to a minimal subset."""
    checks = [r for r in system.rows if r.group not in DEFINITIONAL]
    core = [r for r in checks if r.name in conflicts]
    feasibility = system.withObjective(FEASIBILITY)

    def outcome(rows):
        solver = Solver(feasibility, config, set(r.name for r in rows))
        try:
            return solver.run() is not None
        except _NodeLimit:
            return None

    if outcome(core) is not False:
        core = checks
    minimal = True
    for row in list(core):
        trial = [r for r in core if r is not row]
        feasible = outcome(trial)
        if feasible is False:
            core = trial
        elif feasible is None:
            minimal = False
    return core, minimal


def solve(system, objective=None, config=None):
    """Search `system` exactly.

    Returns a Solution (optimal, or feasible for feasibility problems), an
    Infeasible carrying an irreducible set of conflicting rows, or
    Undecided when the node limit runs out.
    """
    if objective is not None:
        system = system.withObjective(objective)
    config = config or SolverConfig()
    solver = Solver(system, config)
    try:
        values = solver.run()
    except _NodeLimit:
        logger.warning("Node limit %d reached on %r", config.node_limit,
                       system)
        return Undecided(system, solver.nodes)
    logger.debug("Explored %d nodes on %r", solver.nodes, system)
    if values is None:
        conflict, minimal = _irreducible(system, config, solver.conflicts)
        return Infeasible(system, conflict, minimal)
    _verify(system, values)
    status = solver.feasibility and FEASIBLE or OPTIMAL
    return Solution(system, values, status)


def iterSolutions(system, limit, config=None):
    """All feasible solutions of `system`, at most `limit` of them.

    Returns (solutions, truncated)."""
    if limit < 0:
        raise PlanningError("Negative enumeration limit %r" % limit)
    config = config or SolverConfig()
    system = system.withObjective(FEASIBILITY)
    solver = Solver(system, config, enumerate_limit=limit)
    try:
        solver.run()
    except _NodeLimit:
        logger.warning("Node limit reached while enumerating %r", system)
    except _Stop:
        pass
    truncated = len(solver.found) > limit
    solutions = [Solution(system, values, FEASIBLE)
                 for values in solver.found[:limit]]
    return solutions, truncated


def iterSolutionsWhere(system, accept, limit, config=None):
    """Like iterSolutions, keeping only assignments `accept` likes.

    Returns (solutions, truncated, exhausted); `exhausted` is False when
    the node limit cut the enumeration short."""
    config = config or SolverConfig()
    system = system.withObjective(FEASIBILITY)
    solver = Solver(system, config, enumerate_limit=limit, accept=accept)
    exhausted = True
    try:
        solver.run()
    except _NodeLimit:
        logger.warning("Node limit reached while enumerating %r", system)
        exhausted = False
    truncated = len(solver.found) > limit
    solutions = [Solution(system, values, FEASIBLE)
                 for values in solver.found[:limit]]
    return solutions, truncated, exhausted


def completeAssignment(system, tasks):
    """Derive states, fuel and makespan from task values and check every
    row; raise PlanningInvariantError when the tasks do not fit."""
    solver = Solver(system)
    variables = system.variables
    for name, value in tasks.items():
        if variables[name].kind != 'task':
            raise PlanningError("%r is not a task variable" % name)
    for var in system.getVariables('task'):
        solver.values[var.name] = tasks.get(var.name, 0)
    for t in range(system.steps + 1):
        assigned, ok = solver._derive(t)
        if not ok:
            raise PlanningInvariantError(
                "Tasks do not fit %r at step %d" % (system, t))
    values = dict(solver.values)
    values['makespan'] = max([variables[n].info.end for n, v in tasks.items()
                              if v] or [0])
    _verify(system, values)
    return Solution(system, values, FEASIBLE)
