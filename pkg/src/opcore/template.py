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

"""Network templates, tasking templates and the operads they induce.

A network template lists colors and interactions. For a directed
interaction the entry "x": ["y"] reads "x is carried by y", so the carrying
row of the sailboat template "boat": ["port", "cut"] says boats ride on
ports and cutters. Undirected interactions allow a pair when either color
lists the other.

A tasking template is a colored Petri net whose transitions preserve the
number of tokens of every color.
"""

from collections import OrderedDict

from zope.interface import implementer

from opcore import operad
from opcore.errors import TemplateError, UnknownColorError
from opcore.errors import DuplicateInteractionError, TokenCountError
from opcore.errors import UnknownPlaceError, MergeError, OperationError
from opcore.interfaces import IInteraction, INetworkTemplate
from opcore.interfaces import INetworkOperad, ITransition, ITaskingTemplate
from opcore.monoid import BOOLEAN_OR, getMonoid
from opcore.schema import isIdentifier
from opcore.util import loadDocument, checkKeys, checkVersion
from opcore.util import canonicalJSON, join, SCHEMA_VERSION


@implementer(IInteraction)
class Interaction(object):

    def __init__(self, name, directed, allowed, monoid=BOOLEAN_OR,
                 loops=False):
        self.name = name
        self.directed = bool(directed)
        self.monoid = getMonoid(monoid)
        self.loops = bool(loops)
        rows = OrderedDict()
        for color, targets in allowed.items():
            row = []
            for target in targets:
                if target not in row:
                    row.append(target)
            rows[color] = tuple(row)
        self.allowed = rows

    def getKey(self):
        return (self.name, self.directed)

    def getColors(self):
        colors = set(self.allowed)
        for row in self.allowed.values():
            colors.update(row)
        return colors

    def allows(self, source, target):
        if target in self.allowed.get(source, ()):
            return True
        return not self.directed and source in self.allowed.get(target, ())

    def allowsLoop(self, color):
        return self.loops and color in self.getColors()

    def getPairs(self):
        """All allowed (source, target) pairs as a set."""
        pairs = set()
        for color, row in self.allowed.items():
            for target in row:
                pairs.add((color, target))
                if not self.directed:
                    pairs.add((target, color))
        return pairs

    def toData(self):
        rows = dict((color, list(row)) for color, row in self.allowed.items())
        if self.monoid.kind == BOOLEAN_OR and not self.loops:
            return rows
        data = {'allowed': rows, 'monoid': self.monoid.kind}
        if self.loops:
            data['loops'] = True
        return data

    def _identity(self):
        return (self.name, self.directed, self.monoid.kind, self.loops,
                frozenset((c, r) for c, r in self.allowed.items()))

    def __eq__(self, other):
        if not isinstance(other, Interaction):
            return NotImplemented
        return self._identity() == other._identity()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._identity())

    def __repr__(self):
        return '<Interaction %s %s (%s)>' % (
            self.directed and 'directed' or 'undirected', self.name,
            self.monoid.kind)


@implementer(INetworkTemplate)
class NetworkTemplate(object):

    def __init__(self, colors, interactions=()):
        colors = tuple(colors)
        seen = set()
        for color in colors:
            if not isinstance(color, str) or not color:
                raise TemplateError("Color names must be nonempty strings, "
                                    "got %r" % (color,), 'colors')
            if color in seen:
                raise TemplateError("Color %r listed twice" % color,
                                    'colors')
            seen.add(color)
        self.colors = colors
        self.interactions = OrderedDict()
        for interaction in interactions:
            key = interaction.getKey()
            section = interaction.directed and 'directed' or 'undirected'
            if key in self.interactions:
                raise DuplicateInteractionError(
                    "Interaction %r given twice" % interaction.name,
                    join(section, interaction.name))
            for color, row in interaction.allowed.items():
                location = join(section, interaction.name, color)
                if color not in seen:
                    raise UnknownColorError(color, location)
                for target in row:
                    if target not in seen:
                        raise UnknownColorError(target, location)
            self.interactions[key] = interaction

    # ACCESSORS

    def hasColor(self, color):
        return color in self.colors

    def isValidType(self, typ):
        colors = set(self.colors)
        return all(color in colors for color in typ)

    def getInteractions(self):
        return list(self.interactions.values())

    def getInteraction(self, name, directed=None):
        if directed is not None:
            return self.interactions[(name, bool(directed))]
        found = [i for key, i in self.interactions.items() if key[0] == name]
        if len(found) != 1:
            raise KeyError(name)
        return found[0]

    def getMonoid(self, key):
        return self.interactions[(key.interaction, key.directed)].monoid

    def checkEdge(self, key, colors):
        """Return the monoid of `key` if the edge is allowed over `colors`.

        Raises OperationError when the interaction is unknown, an endpoint
        is out of range or the template does not allow the pair.
        """
        interaction = self.interactions.get((key.interaction, key.directed))
        if interaction is None:
            raise OperationError("No %s interaction %r in the template" % (
                key.directed and 'directed' or 'undirected',
                key.interaction))
        for i in key.endpoints:
            if i >= len(colors):
                raise OperationError("Edge %r refers to node %d of %d" % (
                    key, i, len(colors)))
        if key.isLoop():
            color = colors[key.endpoints[0]]
            if not interaction.allowsLoop(color):
                raise OperationError("Loop of %r not allowed on %r" % (
                    key.interaction, color))
        else:
            source, target = [colors[i] for i in key.endpoints]
            if not interaction.allows(source, target):
                raise OperationError("%r does not allow %r %s %r" % (
                    key.interaction, source,
                    key.directed and 'carried by' or 'with', target))
        return interaction.monoid

    def __eq__(self, other):
        if not isinstance(other, NetworkTemplate):
            return NotImplemented
        return (self.colors == other.colors
                and self.interactions == other.interactions)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.colors, frozenset(self.interactions.values())))

    def __repr__(self):
        return '<NetworkTemplate %d colors, %d interactions>' % (
            len(self.colors), len(self.interactions))


def _parseInteraction(name, value, directed, location):
    if not isinstance(value, dict):
        raise TemplateError("Interaction %r must be an object" % name,
                            location)
    if 'allowed' in value:
        checkKeys(value, ('allowed', 'monoid', 'loops'), ('allowed',),
                  location)
        rows = value['allowed']
        monoid = value.get('monoid', BOOLEAN_OR)
        loops = value.get('loops', False)
        if not isinstance(loops, bool):
            raise TemplateError("'loops' must be true or false", location)
        try:
            monoid = getMonoid(monoid)
        except ValueError as e:
            raise TemplateError(str(e), join(location, 'monoid'))
    else:
        rows, monoid, loops = value, BOOLEAN_OR, False
    checkKeys(rows, list(rows), (), location)
    for color, row in rows.items():
        if not isinstance(row, list) or not all(
                isinstance(c, str) for c in row):
            raise TemplateError("Row %r must be a list of colors" % color,
                                join(location, color))
    return Interaction(name, directed, rows, monoid, loops)


def parseNetworkTemplate(data):
    """Parse and validate a network template JSON document."""
    doc = loadDocument(data, 'network template')
    checkKeys(doc, ('version', 'colors', 'directed', 'undirected'),
              ('colors',))
    checkVersion(doc)
    colors = doc['colors']
    if not isinstance(colors, list):
        raise TemplateError("'colors' must be a list", 'colors')
    interactions = []
    for section, directed in (('directed', True), ('undirected', False)):
        entries = doc.get(section, {})
        if not isinstance(entries, dict):
            raise TemplateError("%r must be an object" % section, section)
        duplicates = getattr(entries, 'duplicates', None)
        if duplicates:
            raise DuplicateInteractionError(
                "Interaction %r given twice" % duplicates[0],
                join(section, duplicates[0]))
        for name, value in entries.items():
            if not isIdentifier(name):
                raise TemplateError("Bad interaction name %r" % name,
                                    join(section, name))
            interactions.append(_parseInteraction(
                name, value, directed, join(section, name)))
    return NetworkTemplate(colors, interactions)


def serializeNetworkTemplate(template):
    doc = {'version': SCHEMA_VERSION, 'colors': list(template.colors),
           'directed': {}, 'undirected': {}}
    for interaction in template.getInteractions():
        section = interaction.directed and 'directed' or 'undirected'
        doc[section][interaction.name] = interaction.toData()
    return canonicalJSON(doc)


def generators(template, typ):
    """The single-edge endo operations on `typ`.

    Ordered by interaction name (directed first on a tie) and then by
    endpoints.
    """
    typ = tuple(typ)
    for color in typ:
        if not template.hasColor(color):
            raise UnknownColorError(color)
    n = len(typ)
    result = []
    interactions = sorted(template.getInteractions(),
                          key=lambda i: (i.name, not i.directed))
    for interaction in interactions:
        keys = []
        for i in range(n):
            if interaction.allowsLoop(typ[i]):
                keys.append((i,))
            for j in range(n):
                if i == j or (not interaction.directed and j < i):
                    continue
                if interaction.allows(typ[i], typ[j]):
                    keys.append((i, j))
        for endpoints in sorted(keys):
            key = operad.EdgeKey(interaction.name, interaction.directed,
                                 endpoints)
            result.append(operad.NetOperation(template, [typ],
                                              edges={key: 1}))
    return result


@implementer(INetworkOperad)
class NetworkOperad(object):
    """The network operad a template generates."""

    def __init__(self, template):
        self.template = template

    def isValidType(self, typ):
        return self.template.isValidType(typ)

    def generators(self, typ):
        return generators(self.template, typ)

    def identity(self, typ):
        return operad.identity(self.template, typ)

    def edge(self, typ, interaction, endpoints, value=1, directed=None):
        """The operation on `typ` with one edge of `interaction`."""
        found = self.template.getInteraction(interaction, directed)
        key = operad.EdgeKey(found.name, found.directed, endpoints)
        return operad.NetOperation(self.template, [tuple(typ)],
                                   edges={key: value})

    def operation(self, typ, edges):
        return operad.NetOperation(self.template, [tuple(typ)], edges=edges)

    def parallel(self, f, g):
        return operad.parallel(f, g)

    def overlay(self, f, g):
        return operad.overlay(f, g)

    def compose(self, f, gs):
        return operad.compose(f, gs)

    def permute(self, f, sigma):
        return operad.permute(f, sigma)

    def validate(self, op):
        """Re-check every edge of `op` against the template."""
        if op.template != self.template:
            raise OperationError("Operation belongs to another template")
        for key in op.edges:
            self.template.checkEdge(key, op.output)
        return True


def inducedOperad(template):
    return NetworkOperad(template)


# tasking templates

@implementer(ITransition)
class Transition(object):

    def __init__(self, name, inputs, outputs, duration=1):
        self.name = name
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.duration = duration
        if not self.inputs or not self.outputs:
            raise TemplateError("Transition %r needs inputs and outputs" %
                                name, join('transitions', name))
        if (isinstance(duration, bool) or not isinstance(duration, int)
                or duration < 1):
            raise TemplateError(
                "Transition %r needs a positive integer duration" % name,
                join('transitions', name, 'duration'))
        consumed = self._colorCounts(self.inputs)
        produced = self._colorCounts(self.outputs)
        for color in sorted(set(consumed) | set(produced)):
            if consumed.get(color, 0) != produced.get(color, 0):
                raise TokenCountError(name, color)
        self.moves = self._pairMoves()

    def _colorCounts(self, tokens):
        counts = {}
        for color, place in tokens:
            counts[color] = counts.get(color, 0) + 1
        return counts

    def _pairMoves(self):
        # the n-th input token of a color moves to its n-th output token
        sources = OrderedDict()
        for color, place in self.inputs:
            sources.setdefault(color, []).append(place)
        targets = {}
        for color, place in self.outputs:
            targets.setdefault(color, []).append(place)
        moves = []
        for color, places in sources.items():
            for source, target in zip(places, targets[color]):
                moves.append((color, source, target))
        return tuple(moves)

    def getColorCounts(self):
        return self._colorCounts(self.inputs)

    def getMoveGroups(self):
        """Identical moves grouped as ((color, source, target), count)."""
        groups = OrderedDict()
        for move in self.moves:
            groups[move] = groups.get(move, 0) + 1
        return list(groups.items())

    def toData(self):
        def tokens(items):
            counted = OrderedDict()
            for item in items:
                counted[item] = counted.get(item, 0) + 1
            return [{'color': c, 'place': p, 'count': n}
                    for (c, p), n in counted.items()]
        return {'name': self.name, 'inputs': tokens(self.inputs),
                'outputs': tokens(self.outputs), 'duration': self.duration}

    def __eq__(self, other):
        if not isinstance(other, Transition):
            return NotImplemented
        return self.toData() == other.toData()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.name, self.inputs, self.outputs, self.duration))

    def __repr__(self):
        return '<Transition %s, duration %d>' % (self.name, self.duration)


@implementer(ITaskingTemplate)
class TaskingTemplate(object):

    def __init__(self, colors, places, transitions=()):
        self.colors = tuple(colors)
        self.places = tuple(places)
        self.transitions = tuple(transitions)
        for values, what in ((self.colors, 'colors'),
                             (self.places, 'places')):
            if len(set(values)) != len(values):
                raise TemplateError("Duplicate entry in %s" % what, what)
            for index, value in enumerate(values):
                if not isIdentifier(value):
                    raise TemplateError("Bad name %r in %s" % (value, what),
                                        join(what, index))
        names = set()
        for transition in self.transitions:
            location = join('transitions', transition.name)
            if not isIdentifier(transition.name):
                raise TemplateError("Bad transition name %r" %
                                    transition.name, location)
            if transition.name in names:
                raise TemplateError("Transition %r given twice" %
                                    transition.name, location)
            names.add(transition.name)
            for color, place in transition.inputs + transition.outputs:
                if color not in self.colors:
                    raise UnknownColorError(color, location)
                if place not in self.places:
                    raise UnknownPlaceError(place, location)

    def getTransition(self, name):
        for transition in self.transitions:
            if transition.name == name:
                return transition
        raise KeyError(name)

    def getTransitionIndex(self, name):
        return [t.name for t in self.transitions].index(name)

    def getPlaceIndex(self, place):
        return self.places.index(place)

    def getMaxDuration(self):
        return max([t.duration for t in self.transitions] or [0])

    def __eq__(self, other):
        if not isinstance(other, TaskingTemplate):
            return NotImplemented
        return ((self.colors, self.places, self.transitions)
                == (other.colors, other.places, other.transitions))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.colors, self.places, self.transitions))


def _parseTokens(entries, location):
    if not isinstance(entries, list):
        raise TemplateError("Expected a list of tokens", location)
    tokens = []
    for index, entry in enumerate(entries):
        where = join(location, index)
        checkKeys(entry, ('color', 'place', 'count'), ('color', 'place'),
                  where)
        count = entry.get('count', 1)
        if isinstance(count, bool) or not isinstance(count, int) \
                or count < 1:
            raise TemplateError("Token count must be a positive integer",
                                where)
        tokens.extend([(entry['color'], entry['place'])] * count)
    return tokens


def parseTaskingTemplate(data):
    """Parse and validate a tasking template JSON document."""
    doc = loadDocument(data, 'tasking template')
    checkKeys(doc, ('version', 'colors', 'places', 'transitions'),
              ('colors', 'places'))
    checkVersion(doc)
    colors, places = doc['colors'], doc['places']
    transitions = []
    for index, entry in enumerate(doc.get('transitions', [])):
        where = join('transitions', index)
        checkKeys(entry, ('name', 'inputs', 'outputs', 'duration'),
                  ('name', 'inputs', 'outputs'), where)
        name = entry['name']
        inputs = _parseTokens(entry['inputs'], join(where, 'inputs'))
        outputs = _parseTokens(entry['outputs'], join(where, 'outputs'))
        # unknown names are reported before count mismatches
        for color, place in inputs + outputs:
            if color not in colors:
                raise UnknownColorError(color, join('transitions', name))
            if place not in places:
                raise UnknownPlaceError(place, join('transitions', name))
        transitions.append(Transition(name, inputs, outputs,
                                      entry.get('duration', 1)))
    return TaskingTemplate(colors, places, transitions)


def serializeTaskingTemplate(template):
    return canonicalJSON({
        'version': SCHEMA_VERSION,
        'colors': list(template.colors),
        'places': list(template.places),
        'transitions': [t.toData() for t in template.transitions],
        })


# merging

def _pairs(identification):
    if identification is None:
        return []
    if isinstance(identification, dict):
        return list(identification.items())
    return list(identification)


def _freshName(name, taken):
    while name in taken:
        name = name + "'"
    return name


def mergeTemplates(a, b, shared_colors=(), shared_interactions=()):
    """Glue b onto a along identified colors and interactions.

    `shared_colors` pairs a color of a with a color of b;
    `shared_interactions` pairs an interaction name of a with one of b.
    Colors and interactions of b that are not identified are added, renamed
    with a trailing prime when their name is already taken.
    """
    color_map = {}
    used_targets = {}
    for a_color, b_color in _pairs(shared_colors):
        if not a.hasColor(a_color):
            raise UnknownColorError(a_color, 'shared')
        if not b.hasColor(b_color):
            raise UnknownColorError(b_color, 'shared')
        if color_map.get(b_color, a_color) != a_color:
            raise MergeError("Color %r is identified with both %r and %r" % (
                b_color, color_map[b_color], a_color), 'shared')
        if used_targets.get(a_color, b_color) != b_color:
            raise MergeError("Color %r is identified with both %r and %r" % (
                a_color, used_targets[a_color], b_color), 'shared')
        color_map[b_color] = a_color
        used_targets[a_color] = b_color
    colors = list(a.colors)
    taken = set(colors)
    for color in b.colors:
        if color not in color_map:
            fresh = _freshName(color, taken)
            color_map[color] = fresh
            colors.append(fresh)
            taken.add(fresh)

    interaction_map = {}
    for a_name, b_name in _pairs(shared_interactions):
        try:
            left = a.getInteraction(a_name)
            right = b.getInteraction(b_name)
        except KeyError as e:
            raise MergeError("Unknown or ambiguous interaction %s" % e,
                             'shared')
        if left.directed != right.directed:
            raise MergeError(
                "Interaction %r is directed on one side only" % a_name,
                'shared')
        if left.monoid != right.monoid:
            raise MergeError("Interaction %r uses %s and %s" % (
                a_name, left.monoid.kind, right.monoid.kind), 'shared')
        if right.getKey() in interaction_map:
            raise MergeError("Interaction %r identified twice" % b_name,
                             'shared')
        interaction_map[right.getKey()] = left.getKey()

    merged = OrderedDict()
    for interaction in a.getInteractions():
        merged[interaction.getKey()] = (
            interaction.monoid, interaction.loops,
            OrderedDict((c, list(r)) for c, r in interaction.allowed.items()))
    for interaction in b.getInteractions():
        key = interaction_map.get(interaction.getKey())
        if key is None:
            names = set(k[0] for k in merged if k[1] == interaction.directed)
            key = (_freshName(interaction.name, names), interaction.directed)
            merged[key] = (interaction.monoid, interaction.loops,
                           OrderedDict())
        monoid, loops, rows = merged[key]
        for color, row in interaction.allowed.items():
            target_row = rows.setdefault(color_map[color], [])
            for target in row:
                if color_map[target] not in target_row:
                    target_row.append(color_map[target])
        merged[key] = (monoid, loops or interaction.loops, rows)
    return NetworkTemplate(colors, [
        Interaction(name, directed, rows, monoid, loops)
        for (name, directed), (monoid, loops, rows) in merged.items()])
