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

"""Moving solutions between levels of detail.

Projection forgets: timed solutions become plans by keeping the order of
distinct start ticks, plans become counts by forgetting who did what.
Lifting goes the other way and lists the finer solutions that project
onto a given coarse one.
"""

from collections import OrderedDict
from logging import getLogger

from zope.event import notify

from opcore.errors import PlanningError
from opcore.events import LiftTruncatedEvent
from opcore.planner import TIMED, PLAN, COUNTS, LEVELS
from opcore.planner import compileTimed, compileUntimed, compileCounts
from opcore.planner import LinearConstraint, taskName
from opcore.solver import SolverConfig, completeAssignment
from opcore.solver import Solution, iterSolutionsWhere

logger = getLogger('opcore.hierarchy')


class LiftResult(list):
    """Finer solutions; `truncated` tells whether more exist than were
    kept, `exhausted` whether the search finished."""

    def __init__(self, solutions=(), truncated=False, exhausted=True):
        list.__init__(self, solutions)
        self.truncated = truncated
        self.exhausted = exhausted


def _depth(level):
    if level not in LEVELS:
        raise PlanningError("Unknown level %r" % (level,))
    return LEVELS.index(level)


def keyAt(solution, level):
    """The projection key of `solution` as seen from `level`."""
    key = solution.getKey()
    if level != COUNTS or solution.level == COUNTS:
        return key
    coarse = []
    for step in key:
        counts = OrderedDict()
        for transition, agents, count in step:
            counts[transition] = counts.get(transition, 0) + count
        coarse.append(tuple(sorted((t, (), n) for t, n in counts.items())))
    return tuple(coarse)


def _toPlan(solution):
    cs = solution.system
    tasks = solution.getTasks()
    starts = sorted(set(t.start for t in tasks))
    plan = compileUntimed(cs.model.template, cs.model, max(1, len(starts)),
                          cs.goal, cs.risk)
    values = {}
    for var in cs.getVariables('task'):
        if solution.values.get(var.name):
            ref = var.info
            values[taskName(ref.instance, starts.index(ref.start))] = 1
    return completeAssignment(plan, values)


def _toCounts(solution):
    cs = solution.system
    counts = compileCounts(cs.model.template, cs.model, cs.steps, cs.goal)
    values = {}
    for task in solution.getTasks():
        name = 's_%s_%d' % (task.transition, task.start)
        values[name] = values.get(name, 0) + task.count
    return completeAssignment(counts, values)


def project(solution, level):
    """`solution` seen at a coarser (or the same) level.

    Fuel and risk do not survive projection; the goal does."""
    here, there = _depth(solution.level), _depth(level)
    if there < here:
        raise PlanningError("Cannot project %s onto the finer %s level" % (
            solution.level, level))
    while here < there:
        solution = here == 0 and _toPlan(solution) or _toCounts(solution)
        here += 1
    return solution


def _defaultHorizon(plan):
    """Enough ticks to run each plan step's longest task in turn."""
    longest = OrderedDict()
    for task in plan.getTasks():
        duration = plan.system.model.template.getTransition(
            task.transition).duration
        longest[task.start] = max(longest.get(task.start, 0), duration)
    return sum(longest.values())


def _linkInstances(coarse, fine):
    """Each agent-level task instance runs as often as in the coarse plan."""
    used = OrderedDict()
    for var in coarse.system.getVariables('task'):
        if coarse.values.get(var.name):
            used[var.info.instance.name] = used.get(
                var.info.instance.name, 0) + 1
    terms = OrderedDict()
    for var in fine.getVariables('task'):
        terms.setdefault(var.info.instance.name, []).append(var.name)
    rows = []
    for name, names in terms.items():
        rows.append(LinearConstraint('link_%s' % name,
                                     [(n, 1) for n in names], '=',
                                     used.get(name, 0), 'link'))
    return rows


def _linkFirings(coarse, fine):
    """Each plan step fires each transition as often as the matching
    non-empty coarse step."""
    key = coarse.getKey()
    rows = []
    for j in range(fine.steps):
        step = j < len(key) and key[j] or ()
        wanted = dict((t, n) for t, a, n in step)
        terms = OrderedDict()
        for var in fine.getVariables('task', j):
            terms.setdefault(var.info.transition.name, []).append(var.name)
        for transition, names in terms.items():
            rows.append(LinearConstraint(
                'link_%s_%d' % (transition, j), [(n, 1) for n in names], '=',
                wanted.get(transition, 0), 'link'))
        missing = set(wanted) - set(terms)
        if missing:
            logger.debug("Step %d needs transitions %s no instance can "
                         "fire", j, ', '.join(sorted(missing)))
            return None
    return rows


def _liftOnce(coarse, level, horizon, cap, config, system):
    cs = coarse.system
    model = cs.model
    if system is None:
        if level == PLAN:
            system = compileUntimed(model.template, model,
                                    max(1, len(coarse.getKey())),
                                    cs.goal, cs.risk)
        else:
            if horizon is None:
                horizon = _defaultHorizon(coarse)
            system = compileTimed(model.template, model, horizon, cs.goal,
                                  cs.risk)
    elif system.level != level:
        raise PlanningError("Expected a %s system, got %s" % (
            level, system.level))
    if coarse.level == COUNTS:
        if system.steps != max(1, len(coarse.getKey())):
            raise PlanningError("A plan lifted from counts needs one step "
                                "per non-empty coarse step")
        links = _linkFirings(coarse, system)
        if links is None:
            return LiftResult()
    else:
        links = _linkInstances(coarse, system)
    system = system.withRows(links)
    wanted = coarse.getKey()

    def accept(values):
        return keyAt(Solution(system, values), coarse.level) == wanted

    solutions, truncated, exhausted = iterSolutionsWhere(system, accept,
                                                         cap, config)
    return LiftResult(solutions, truncated, exhausted)


def lift(coarse, level, horizon=None, cap=None, config=None, system=None):
    """Finer solutions projecting onto `coarse`, at most `cap` of them.

    `system` supplies the finer system (say, with fuel) instead of
    compiling a bare one from the coarse model; lifting from counts to
    timed goes through every intermediate plan.
    """
    config = config or SolverConfig()
    if cap is None:
        cap = config.lift_cap
    here, there = _depth(coarse.level), _depth(level)
    if there > here:
        raise PlanningError("Cannot lift %s onto the coarser %s level" % (
            coarse.level, level))
    if there == here:
        return LiftResult([coarse])
    if here - there == 2:
        plans = _liftOnce(coarse, PLAN, None, cap, config, None)
        result = LiftResult(truncated=plans.truncated,
                            exhausted=plans.exhausted)
        for plan in plans:
            more = _liftOnce(plan, TIMED, horizon, cap - len(result),
                             config, system)
            result.extend(more)
            result.exhausted = result.exhausted and more.exhausted
            if more.truncated:
                result.truncated = True
                break
    else:
        result = _liftOnce(coarse, level, horizon, cap, config, system)
    if result.truncated:
        logger.info("Lift of %r to %s truncated at %d", coarse, level, cap)
        notify(LiftTruncatedEvent(coarse, level, cap))
    return result
