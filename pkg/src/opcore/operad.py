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

"""Network operations and their operadic composition.

An operation has k input slots, each a word of colors, and one output word.
The output nodes are the input nodes rearranged: `slot_map[y]` is the
(slot, position) the output node y comes from. Edges are keyed by EdgeKey and
carry nonzero values of their interaction's monoid.

All operations are immutable; every function here returns a new one.
"""

import functools
import hashlib
import json
from types import MappingProxyType

from zope.interface import implementer

from opcore.errors import OperationError, TemplateMismatchError
from opcore.errors import ShapeMismatchError, SlotCountError
from opcore.errors import TypeMismatchError, PermutationError
from opcore.interfaces import INetOperation

DIRECTED = 'directed'
UNDIRECTED = 'undirected'
LOOP = 'loop'


@functools.total_ordering
class EdgeKey(object):
    """An edge of an interaction.

    For a directed interaction the pair (i, j) reads "node i is carried by
    node j". Undirected pairs are stored with the smaller index first. A
    single endpoint is a loop.
    """

    __slots__ = ('interaction', 'directed', 'endpoints')

    def __init__(self, interaction, directed, endpoints):
        endpoints = tuple(int(i) for i in endpoints)
        if len(endpoints) not in (1, 2):
            raise OperationError(
                "Edge of %r needs one or two endpoints, got %r" % (
                    interaction, endpoints))
        if min(endpoints) < 0:
            raise OperationError("Negative node index in %r" % (endpoints,))
        if len(endpoints) == 2:
            if endpoints[0] == endpoints[1]:
                raise OperationError(
                    "Edge of %r joins node %d to itself; use a loop" % (
                        interaction, endpoints[0]))
            if not directed:
                endpoints = tuple(sorted(endpoints))
        object.__setattr__(self, 'interaction', interaction)
        object.__setattr__(self, 'directed', bool(directed))
        object.__setattr__(self, 'endpoints', endpoints)

    def __setattr__(self, name, value):
        raise AttributeError("EdgeKey is immutable")

    @property
    def kind(self):
        if len(self.endpoints) == 1:
            return LOOP
        return self.directed and DIRECTED or UNDIRECTED

    def isLoop(self):
        return len(self.endpoints) == 1

    def reindex(self, mapping):
        """Return the key with every endpoint i replaced by mapping[i]."""
        return EdgeKey(self.interaction, self.directed,
                       [mapping[i] for i in self.endpoints])

    def _sortKey(self):
        return (self.interaction, not self.directed, self.endpoints)

    def __eq__(self, other):
        if not isinstance(other, EdgeKey):
            return NotImplemented
        return self._sortKey() == other._sortKey()

    def __lt__(self, other):
        if not isinstance(other, EdgeKey):
            return NotImplemented
        return self._sortKey() < other._sortKey()

    def __hash__(self):
        return hash(self._sortKey())

    def __repr__(self):
        if self.isLoop():
            return 'EdgeKey(%r, loop %d)' % (self.interaction,
                                             self.endpoints[0])
        arrow = self.directed and '->' or '--'
        return 'EdgeKey(%r, %d%s%d)' % (self.interaction, self.endpoints[0],
                                        arrow, self.endpoints[1])

    def toList(self):
        return [self.interaction, self.directed and DIRECTED or UNDIRECTED,
                list(self.endpoints)]

    @classmethod
    def fromList(cls, data):
        interaction, direction, endpoints = data
        if direction not in (DIRECTED, UNDIRECTED):
            raise OperationError("Unknown edge direction %r" % (direction,))
        return cls(interaction, direction == DIRECTED, endpoints)


def _word(colors):
    return tuple(colors)


@implementer(INetOperation)
class NetOperation(object):
    """A monoid-labeled network over the output word.

    Without an explicit slot_map the output is the concatenation of the
    inputs in order. Edge values of zero are dropped, and keys given twice
    (an undirected pair written both ways) are combined by the monoid.
    """

    def __init__(self, template, inputs, output=None, slot_map=None,
                 edges=None):
        self.template = template
        self.inputs = tuple(_word(w) for w in inputs)
        if slot_map is None:
            slot_map = [(s, p) for s, word in enumerate(self.inputs)
                        for p in range(len(word))]
        self.slot_map = tuple((int(s), int(p)) for s, p in slot_map)
        if output is None:
            output = [self.inputs[s][p] for s, p in self.slot_map]
        self.output = _word(output)
        self._checkSlotMap()
        merged = {}
        for key, value in dict(edges or {}).items():
            if not isinstance(key, EdgeKey):
                key = EdgeKey.fromList(key)
            monoid = template.checkEdge(key, self.output)
            monoid.validate(value)
            if key in merged:
                value = monoid.combine(merged[key], value)
            merged[key] = value
        self._edges = tuple(sorted(
            (key, value) for key, value in merged.items() if value))
        self.edges = MappingProxyType(dict(self._edges))

    def _checkSlotMap(self):
        n = len(self.output)
        if len(self.slot_map) != n:
            raise OperationError(
                "slot_map has %d entries for %d output nodes" % (
                    len(self.slot_map), n))
        expected = set((s, p) for s, word in enumerate(self.inputs)
                       for p in range(len(word)))
        if set(self.slot_map) != expected or len(set(self.slot_map)) != n:
            raise OperationError(
                "slot_map is not a bijection onto the input positions")
        for y, (s, p) in enumerate(self.slot_map):
            if self.inputs[s][p] != self.output[y]:
                raise OperationError(
                    "Output node %d has color %r but slot %d position %d "
                    "has color %r" % (y, self.output[y], s, p,
                                      self.inputs[s][p]))

    # ACCESSORS

    def getNodeCount(self):
        return len(self.output)

    def getEdgeCount(self):
        return len(self._edges)

    def getSlotCount(self):
        return len(self.inputs)

    def getNodeColor(self, node):
        return self.output[node]

    def getEdgeValue(self, key):
        return self.edges.get(key, 0)

    def getEdgeItems(self):
        """Edges as a sorted tuple of (EdgeKey, value)."""
        return self._edges

    def toDict(self):
        return {
            'inputs': [list(w) for w in self.inputs],
            'output': list(self.output),
            'slot_map': [list(e) for e in self.slot_map],
            'edges': [key.toList() + [value] for key, value in self._edges],
            }

    def _identity(self):
        return (self.inputs, self.output, self.slot_map, self._edges)

    def __eq__(self, other):
        if not isinstance(other, NetOperation):
            return NotImplemented
        return (self.template == other.template
                and self._identity() == other._identity())

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash(self._identity())

    def __repr__(self):
        return '<NetOperation %s -> %s, %d edges>' % (
            '|'.join(' '.join(w) for w in self.inputs),
            ' '.join(self.output), len(self._edges))


def _sameTemplate(f, g):
    if f.template is not g.template and f.template != g.template:
        raise TemplateMismatchError(
            "Operations are governed by different templates")


def _merge(template, edges, key, value):
    monoid = template.getMonoid(key)
    edges[key] = monoid.combine(edges.get(key, monoid.unit), value)


def identity(template, typ):
    """The single-slot operation on `typ` with no edges."""
    typ = _word(typ)
    if not template.isValidType(typ):
        raise OperationError("Type %s uses colors outside the template" % (
            list(typ),))
    return NetOperation(template, [typ])


def isUnit(f):
    """True for node-free operations without edges, the unit of parallel."""
    return not f.output and not f.edges


def parallel(f, g):
    """Put g beside f: g's nodes are shifted past f's, slots concatenated.

    Node-free operations are the unit and are absorbed.
    """
    _sameTemplate(f, g)
    if isUnit(g):
        return f
    if isUnit(f):
        return g
    shift = f.getNodeCount()
    offset = f.getSlotCount()
    slot_map = list(f.slot_map) + [(s + offset, p) for s, p in g.slot_map]
    edges = dict(f.edges)
    mapping = dict((i, i + shift) for i in range(g.getNodeCount()))
    for key, value in g.getEdgeItems():
        edges[key.reindex(mapping)] = value
    return NetOperation(f.template, f.inputs + g.inputs,
                        f.output + g.output, slot_map, edges)


def overlay(f, g):
    """Superimpose g on f, merging edge values with each monoid."""
    _sameTemplate(f, g)
    if (f.inputs, f.output, f.slot_map) != (g.inputs, g.output, g.slot_map):
        raise ShapeMismatchError(
            "Cannot overlay %r and %r: inputs, output or slot_map differ" % (
                f, g))
    edges = dict(f.edges)
    for key, value in g.getEdgeItems():
        _merge(f.template, edges, key, value)
    return NetOperation(f.template, f.inputs, f.output, f.slot_map, edges)


def _checkPermutation(sigma, n, what):
    sigma = [int(i) for i in sigma]
    if len(sigma) != n or sorted(sigma) != list(range(n)):
        raise PermutationError("%r is not a permutation of %d %s" % (
            sigma, n, what))
    return sigma


def invertPermutation(sigma):
    inverse = [0] * len(sigma)
    for i, j in enumerate(sigma):
        inverse[j] = i
    return inverse


def permute(f, sigma):
    """Move output node i to position sigma[i]."""
    n = f.getNodeCount()
    sigma = _checkPermutation(sigma, n, 'nodes')
    output = [None] * n
    slot_map = [None] * n
    for i, j in enumerate(sigma):
        output[j] = f.output[i]
        slot_map[j] = f.slot_map[i]
    edges = dict((key.reindex(sigma), value)
                 for key, value in f.getEdgeItems())
    return NetOperation(f.template, f.inputs, output, slot_map, edges)


def permuteSlots(f, tau):
    """Move input slot s to position tau[s]; nodes and edges stay put."""
    k = f.getSlotCount()
    tau = _checkPermutation(tau, k, 'slots')
    inputs = [None] * k
    for s, t in enumerate(tau):
        inputs[t] = f.inputs[s]
    slot_map = [(tau[s], p) for s, p in f.slot_map]
    return NetOperation(f.template, inputs, f.output, slot_map, f.edges)


def compose(f, gs):
    """Substitute gs[i] into input slot i of f.

    The nodes of the result are the output nodes of f; each g's edges are
    carried over along the positions its output occupies in f.
    """
    gs = list(gs)
    if len(gs) != f.getSlotCount():
        raise SlotCountError("%r has %d input slots, got %d operations" % (
            f, f.getSlotCount(), len(gs)))
    for i, g in enumerate(gs):
        _sameTemplate(f, g)
        if g.output != f.inputs[i]:
            raise TypeMismatchError(i, f.inputs[i], g.output)
    offsets = []
    inputs = []
    for g in gs:
        offsets.append(len(inputs))
        inputs.extend(g.inputs)
    # (slot, position) of f's inputs -> output node of f
    located = dict((entry, y) for y, entry in enumerate(f.slot_map))
    slot_map = []
    for s, p in f.slot_map:
        inner_slot, inner_pos = gs[s].slot_map[p]
        slot_map.append((offsets[s] + inner_slot, inner_pos))
    edges = dict(f.edges)
    for s, g in enumerate(gs):
        mapping = dict((p, located[(s, p)]) for p in range(len(g.output)))
        for key, value in g.getEdgeItems():
            _merge(f.template, edges, key.reindex(mapping), value)
    return NetOperation(f.template, inputs, f.output, slot_map, edges)


def canonicalForm(f):
    return NetOperation(f.template, f.inputs, f.output, f.slot_map,
                        dict(f.edges))


def serializeOperation(f):
    """Canonical JSON text; equal operations give identical text."""
    return json.dumps(canonicalForm(f).toDict(), sort_keys=True,
                      separators=(',', ':'))


def parseOperation(template, data):
    """Build an operation from `serializeOperation` output or its dict."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        edges = {}
        for interaction, direction, endpoints, value in data['edges']:
            key = EdgeKey.fromList([interaction, direction, endpoints])
            edges[key] = value
        return NetOperation(template, data['inputs'], data['output'],
                            data['slot_map'], edges)
    except (KeyError, TypeError) as e:
        raise OperationError("Malformed operation document: %s" % e)


def operationDigest(f):
    return hashlib.sha256(
        serializeOperation(f).encode('utf-8')).hexdigest()
