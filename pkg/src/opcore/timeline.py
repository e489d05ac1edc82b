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

"""Rendering schedules: a per-agent table and an iCalendar export."""

import datetime
from logging import getLogger

import icalendar

from opcore.errors import PlanningError
from opcore.planner import COUNTS

logger = getLogger('opcore.timeline')

PRODID = '-//opcore//tasking schedule//'


def timelineRows(solution):
    """One row per tick: the tick then, per agent, its place or the task
    it is busy with."""
    cs = solution.system
    if cs.level == COUNTS:
        raise PlanningError("Counts solutions have no per-agent timeline")
    busy = {}
    for task in solution.getTasks():
        for agent in task.agents:
            for t in range(task.start + 1, task.end):
                busy[(agent, t)] = task.transition
    rows = []
    for t in range(cs.steps + 1):
        row = [str(t)]
        for agent, place in solution.getPositions(t).items():
            if place is None:
                row.append('(%s)' % busy.get((agent, t), '?'))
            else:
                row.append(place)
        rows.append(row)
    return rows


def formatTimeline(solution):
    header = ['t'] + [a.id for a in solution.system.model.agents]
    rows = [header] + timelineRows(solution)
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        lines.append('  '.join(cell.ljust(w) for cell, w in
                               zip(row, widths)).rstrip())
    return '\n'.join(lines)


def _epoch(epoch):
    if epoch is None:
        return datetime.datetime(2000, 1, 1)
    if isinstance(epoch, datetime.datetime):
        return epoch
    try:
        return datetime.datetime.fromisoformat(epoch)
    except ValueError:
        raise PlanningError("Bad epoch %r, expected ISO 8601" % (epoch,),
                            'epoch')


def exportICalendar(solution, epoch=None, tick_minutes=60):
    """Export the tasks of an agent-level solution as iCalendar text,
    one event per task and agent."""
    if solution.level == COUNTS:
        raise PlanningError("Counts solutions have no agents to schedule")
    start = _epoch(epoch)
    tick = datetime.timedelta(minutes=tick_minutes)
    ical = icalendar.Calendar()
    ical.add('prodid', PRODID)
    ical.add('version', '2.0')
    for task in solution.getTasks():
        for agent, source, target in task.moves:
            e = icalendar.Event()
            e.add('dtstart', start + task.start * tick)
            e.add('dtend', start + task.end * tick)
            e.add('uid', '%s-%s@opcore' % (task.name, agent))
            e.add('summary', '%s: %s' % (task.transition, agent))
            e.add('location', '%s -> %s' % (source, target))
            ical.add_component(e)
    ical_text = ical.to_ical().decode('utf-8')
    logger.log(5, 'export generated ical text: \n\n%s\n\n', ical_text)
    return ical_text
