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

from zope.interface import implementer

from opcore.interfaces import ICandidateEvaluatedEvent
from opcore.interfaces import IBestDesignChangedEvent, IIncumbentFoundEvent
from opcore.interfaces import ILiftTruncatedEvent


@implementer(ICandidateEvaluatedEvent)
class CandidateEvaluatedEvent(object):

    def __init__(self, design, score, algorithm, step):
        self.design = design
        self.score = score
        self.algorithm = algorithm
        self.step = step


@implementer(IBestDesignChangedEvent)
class BestDesignChangedEvent(CandidateEvaluatedEvent):
    pass


@implementer(IIncumbentFoundEvent)
class IncumbentFoundEvent(object):

    def __init__(self, system, objective, nodes):
        self.system = system
        self.objective = objective
        self.nodes = nodes


@implementer(ILiftTruncatedEvent)
class LiftTruncatedEvent(object):

    def __init__(self, coarse, level, cap):
        self.coarse = coarse
        self.level = level
        self.cap = cap
