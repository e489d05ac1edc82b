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

"""Exceptions raised by opcore.

Everything derives from ValueError, so callers that only care about "bad
input" can catch that.
"""


class OpcoreError(ValueError):
    """Base class of all opcore errors.

    `location` optionally names where in an input document the problem was
    found (a JSON path like "directed.carrying.qd").
    """

    def __init__(self, message, location=None):
        ValueError.__init__(self, message)
        self.location = location


class ConfigError(OpcoreError):
    """A configuration document has invalid settings.

    `errors` lists (field name, zope.schema error) pairs.
    """

    def __init__(self, message, errors=(), location=None):
        OpcoreError.__init__(self, message, location)
        self.errors = list(errors)


# templates

class TemplateError(OpcoreError):
    pass


class UnknownColorError(TemplateError):

    def __init__(self, color, location=None):
        TemplateError.__init__(
            self, "Unknown color %r%s" % (
                color, location and ' in %s' % location or ''), location)
        self.color = color


class DuplicateInteractionError(TemplateError):
    pass


class TokenCountError(TemplateError):

    def __init__(self, transition, color):
        TemplateError.__init__(
            self, "Transition %r does not preserve the token count of "
            "color %r" % (transition, color),
            'transitions.%s' % transition)
        self.transition = transition
        self.color = color


class UnknownPlaceError(TemplateError):

    def __init__(self, place, location=None):
        TemplateError.__init__(
            self, "Unknown place %r%s" % (
                place, location and ' in %s' % location or ''), location)
        self.place = place


class MergeError(TemplateError):
    pass


# operations

class OperationError(OpcoreError):
    pass


class TemplateMismatchError(OperationError):
    pass


class ShapeMismatchError(OperationError):
    pass


class SlotCountError(OperationError):
    pass


class TypeMismatchError(OperationError):

    def __init__(self, slot, expected, got):
        OperationError.__init__(
            self, "Type mismatch at slot %d: expected %s, got %s" % (
                slot, list(expected), list(got)))
        self.slot = slot
        self.expected = tuple(expected)
        self.got = tuple(got)


class PermutationError(OperationError):
    pass


class ScriptError(OpcoreError):
    pass


# algebras

class AlgebraError(OpcoreError):
    pass


class NormalizationError(AlgebraError):
    pass


class LabelError(AlgebraError):
    pass


class MissingAssignmentError(AlgebraError, KeyError):

    def __str__(self):
        return ValueError.__str__(self)


class SweepWidthError(AlgebraError):
    pass


# wiring

class WiringError(OpcoreError):
    pass


class BoundaryMismatchError(WiringError):

    def __init__(self, slot, port, message=None):
        WiringError.__init__(
            self, message or "Boundary mismatch at slot %d on port %r" % (
                slot, port))
        self.slot = slot
        self.port = port


class GridError(WiringError):
    pass


class RequirementError(WiringError):
    pass


# planning

class PlanningError(OpcoreError):
    pass


class FuelError(PlanningError):
    pass


class LPFormatError(PlanningError):

    def __init__(self, message, line=None):
        PlanningError.__init__(
            self, line is not None and "line %d: %s" % (line, message)
            or message, line)
        self.line = line


class PlanningInvariantError(PlanningError):
    pass
