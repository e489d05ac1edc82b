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

"""CPLEX LP text for compiled systems, and a reader for the subset we
write."""

import math
from collections import OrderedDict

from opcore.errors import LPFormatError
from opcore.planner import MAXIMIZE

WIDTH = 200
SENSES = {'<=': '<=', '=<': '<=', '>=': '>=', '=>': '>=', '=': '='}
SECTIONS = ('minimize', 'maximize', 'subject to', 'bounds', 'general',
            'binary', 'end')


def formatNumber(value):
    if isinstance(value, float) and math.isinf(value):
        return value > 0 and '+inf' or '-inf'
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _terms(coeffs):
    parts = []
    for var, coef in coeffs:
        sign = coef < 0 and '-' or '+'
        parts.append('%s %s %s' % (sign, formatNumber(abs(coef)), var))
    return parts


def _wrap(head, parts, tail=''):
    lines = []
    line = head
    for part in parts:
        if len(line) + len(part) + 1 > WIDTH:
            lines.append(line)
            line = '   '
        line += ' ' + part
    if tail:
        line += ' ' + tail
    lines.append(line)
    return lines


def exportLP(system):
    """The system as CPLEX LP text."""
    objective = system.objective
    lines = ['\\ opcore %s system' % system.level,
             '\\ %d variables, %d rows, objective %s' % (
                 len(system.variables), len(system.rows), objective.name)]
    lines.append(objective.sense == MAXIMIZE and 'Maximize' or 'Minimize')
    lines.extend(_wrap(' obj:', _terms(objective.coeffs)))
    lines.append('Subject To')
    for row in system.rows:
        lines.extend(_wrap(' %s:' % row.name, _terms(row.coeffs),
                           '%s %s' % (row.sense, formatNumber(row.rhs))))
    lines.append('Bounds')
    general = []
    binary = []
    for var in system.variables.values():
        if var.binary:
            binary.append(var.name)
            continue
        if var.integer:
            general.append(var.name)
        if math.isinf(var.lower) and math.isinf(var.upper):
            lines.append(' %s free' % var.name)
        else:
            lines.append(' %s <= %s <= %s' % (formatNumber(var.lower),
                                              var.name,
                                              formatNumber(var.upper)))
    if general:
        lines.append('General')
        lines.extend(_wrap('', general))
    if binary:
        lines.append('Binary')
        lines.extend(_wrap('', binary))
    lines.append('End')
    return '\n'.join(lines) + '\n'


class LPModel(object):
    """What an LP file says, structurally."""

    def __init__(self, sense, objective, rows, bounds, kinds):
        self.sense = sense
        self.objective = tuple(objective)
        self.rows = tuple(rows)
        self.bounds = dict(bounds)
        self.kinds = dict(kinds)

    def __eq__(self, other):
        if not isinstance(other, LPModel):
            return NotImplemented
        return ((self.sense, self.objective, self.rows, self.bounds,
                 self.kinds) == (other.sense, other.objective, other.rows,
                                 other.bounds, other.kinds))

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __repr__(self):
        return '<LPModel %s, %d rows, %d variables>' % (
            self.sense, len(self.rows), len(self.kinds))


def _floats(coeffs):
    return tuple((v, float(c)) for v, c in coeffs)


def lpModel(system):
    """The LPModel that exportLP(system) should read back as."""
    rows = [(r.name, _floats(r.coeffs), r.sense, float(r.rhs))
            for r in system.rows]
    bounds = {}
    kinds = {}
    for var in system.variables.values():
        bounds[var.name] = (float(var.lower), float(var.upper))
        kinds[var.name] = var.binary and 'binary' or (
            var.integer and 'general' or 'continuous')
    sense = system.objective.sense == MAXIMIZE and 'maximize' or 'minimize'
    return LPModel(sense, _floats(system.objective.coeffs), rows, bounds,
                   kinds)


def _parseNumber(token, line):
    lowered = token.lower()
    if lowered in ('inf', '+inf', 'infinity', '+infinity'):
        return math.inf
    if lowered in ('-inf', '-infinity'):
        return -math.inf
    try:
        return float(token)
    except ValueError:
        raise LPFormatError("Expected a number, got %r" % token, line)


def _parseTerms(tokens, line):
    coeffs = OrderedDict()
    index = 0
    while index < len(tokens):
        sign = 1.0
        if tokens[index] in ('+', '-'):
            sign = tokens[index] == '-' and -1.0 or 1.0
            index += 1
        if index >= len(tokens):
            raise LPFormatError("Dangling sign", line)
        coef = 1.0
        try:
            coef = float(tokens[index])
            index += 1
        except ValueError:
            pass
        if index >= len(tokens):
            raise LPFormatError("Coefficient without variable", line)
        var = tokens[index]
        index += 1
        coeffs[var] = coeffs.get(var, 0.0) + sign * coef
    return tuple(coeffs.items())


def _statements(lines):
    """Group (line number, text) pairs into labelled statements."""
    statements = []
    for number, text in lines:
        head = text.split()[0] if text.split() else ''
        if head.endswith(':') or not statements:
            statements.append([number, text])
        else:
            statements[-1][1] += ' ' + text
    return statements


def parseLP(text):
    """Read LP text of the shape exportLP writes."""
    sections = OrderedDict()
    current = None
    for number, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split('\\', 1)[0].strip()
        if not stripped:
            continue
        if stripped.lower() in SECTIONS:
            current = stripped.lower()
            if current in sections:
                raise LPFormatError("Section %r appears twice" % stripped,
                                    number)
            sections[current] = []
            continue
        if current is None:
            raise LPFormatError("Text before the first section", number)
        sections[current].append((number, stripped))
    if 'end' not in sections:
        raise LPFormatError("Missing End")
    senses = [s for s in ('minimize', 'maximize') if s in sections]
    if len(senses) != 1:
        raise LPFormatError("Expected exactly one of Minimize or Maximize")
    sense = senses[0]
    objective = ()
    for number, text in _statements(sections[sense]):
        label, body = text.split(':', 1)
        objective = _parseTerms(body.split(), number)

    rows = []
    for number, text in _statements(sections.get('subject to', [])):
        if ':' not in text:
            raise LPFormatError("Unnamed row", number)
        label, body = text.split(':', 1)
        tokens = body.split()
        found = [i for i, t in enumerate(tokens) if t in SENSES]
        if len(found) != 1 or found[0] != len(tokens) - 2:
            raise LPFormatError("Malformed row %r" % label.strip(), number)
        i = found[0]
        rows.append((label.strip(), _parseTerms(tokens[:i], number),
                     SENSES[tokens[i]], _parseNumber(tokens[i + 1], number)))

    bounds = {}
    kinds = {}
    for number, text in sections.get('bounds', []):
        tokens = text.split()
        if len(tokens) == 2 and tokens[1].lower() == 'free':
            bounds[tokens[0]] = (-math.inf, math.inf)
        elif len(tokens) == 5 and tokens[1] in ('<=', '=<') \
                and tokens[3] in ('<=', '=<'):
            bounds[tokens[2]] = (_parseNumber(tokens[0], number),
                                 _parseNumber(tokens[4], number))
        else:
            raise LPFormatError("Malformed bound %r" % text, number)
        kinds[tokens[len(tokens) == 2 and 0 or 2]] = 'continuous'
    for kind, section in (('general', 'general'), ('binary', 'binary')):
        for number, text in sections.get(section, []):
            for var in text.split():
                kinds[var] = kind
                if kind == 'binary':
                    bounds.setdefault(var, (0.0, 1.0))
                elif var not in bounds:
                    raise LPFormatError("Integer %r has no bounds" % var,
                                        number)
    return LPModel(sense, objective, rows, bounds, kinds)
