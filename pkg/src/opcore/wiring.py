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

"""Wiring diagrams.

A wiring operation places inner boundaries inside an outer one and joins
their ports into wire classes. Nesting substitutes diagrams for inner
boundaries and merges wire classes through the ports that disappear.

Requirements restrict port values to unions of closed intervals. Validity
is decided on a finite grid of sample values, one variable per wire class.
"""

import itertools
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger

from zope.interface import implementer

from opcore.errors import WiringError, BoundaryMismatchError, GridError
from opcore.errors import RequirementError
from opcore.interfaces import IBoundary, IWiringOp, IRequirement
from opcore.util import loadDocument, checkKeys, checkVersion, join
from opcore.util import removeOverlaps

logger = getLogger('opcore.wiring')

OUTER = -1
DIRECTIONS = ('in', 'out', 'bidirectional')
MAX_COUNTEREXAMPLES = 20


class Port(object):

    __slots__ = ('name', 'space', 'direction')

    def __init__(self, name, space, direction='bidirectional'):
        if direction not in DIRECTIONS:
            raise WiringError("Port %r has unknown direction %r" % (
                name, direction))
        self.name = name
        self.space = space
        self.direction = direction

    def _identity(self):
        return (self.name, self.space, self.direction)

    def __eq__(self, other):
        if not isinstance(other, Port):
            return NotImplemented
        return self._identity() == other._identity()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._identity())

    def __repr__(self):
        return 'Port(%r, %r, %r)' % self._identity()


@implementer(IBoundary)
class Boundary(object):

    def __init__(self, name, ports):
        self.name = name
        self.ports = tuple(ports)
        names = [p.name for p in self.ports]
        if len(set(names)) != len(names):
            raise WiringError("Boundary %r repeats a port name" % name)
        self._ports = dict((p.name, p) for p in self.ports)

    def getPort(self, name):
        return self._ports[name]

    def getPortNames(self):
        return [p.name for p in self.ports]

    def hasPort(self, name):
        return name in self._ports

    def signature(self):
        """Port names with value spaces, order ignored."""
        return tuple(sorted((p.name, p.space) for p in self.ports))

    def __eq__(self, other):
        if not isinstance(other, Boundary):
            return NotImplemented
        return (self.name, self.ports) == (other.name, other.ports)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.name, self.ports))

    def __repr__(self):
        return '<Boundary %s(%s)>' % (self.name, ', '.join(
            self.getPortNames()))


class UnionFind(object):

    def __init__(self, items=()):
        self.parent = {}
        self.unions = 0
        for item in items:
            self.add(item)

    def add(self, item):
        self.parent.setdefault(item, item)

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # the smaller root wins so results do not depend on call order
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.unions += 1
        return True


@implementer(IWiringOp)
class WiringOp(object):
    """Inner boundaries wired to each other and to the outer boundary.

    A port reference is (index, port name); index OUTER names the outer
    boundary. Wire classes are kept sorted so equal partitions compare
    equal.
    """

    def __init__(self, inner, outer, wires):
        self.inner = tuple(inner)
        self.outer = outer
        classes = []
        seen = {}
        for wire in wires:
            refs = tuple(sorted(set((int(i), p) for i, p in wire)))
            if not refs:
                continue
            spaces = set()
            for ref in refs:
                port = self.getPort(ref)
                if ref in seen:
                    raise WiringError("Port %s is wired twice" %
                                      self.getLabel(ref))
                seen[ref] = True
                spaces.add(port.space)
            if len(spaces) > 1:
                raise WiringError("Wire %s mixes value spaces %s" % (
                    self.describe(refs), ', '.join(sorted(spaces))))
            classes.append(refs)
        for ref in self.getRefs():
            if ref not in seen:
                raise WiringError("Port %s is not wired" %
                                  self.getLabel(ref))
        self.wires = tuple(sorted(classes))

    # ACCESSORS

    def getBoundary(self, index):
        return index == OUTER and self.outer or self.inner[index]

    def getPort(self, ref):
        index, name = ref
        try:
            boundary = self.getBoundary(index)
        except IndexError:
            raise WiringError("No inner boundary %d" % index)
        if not boundary.hasPort(name):
            raise WiringError("Boundary %r has no port %r" % (
                boundary.name, name))
        return boundary.getPort(name)

    def getRefs(self):
        refs = [(OUTER, p) for p in self.outer.getPortNames()]
        for index, boundary in enumerate(self.inner):
            refs.extend((index, p) for p in boundary.getPortNames())
        return refs

    def getLabel(self, ref):
        index, name = ref
        return '%s.%s' % (self.getBoundary(index).name, name)

    def describe(self, refs):
        return '{%s}' % ', '.join(sorted(self.getLabel(r) for r in refs))

    def getWireClass(self, ref):
        for wire in self.wires:
            if ref in wire:
                return wire
        raise KeyError(ref)

    def getVariables(self):
        """One name per wire class: its alphabetically first port label."""
        return [min(self.getLabel(r) for r in wire) for wire in self.wires]

    def getInnerIndex(self, name):
        return [i for i, b in enumerate(self.inner) if b.name == name]

    def __eq__(self, other):
        if not isinstance(other, WiringOp):
            return NotImplemented
        return ((self.inner, self.outer, self.wires)
                == (other.inner, other.outer, other.wires))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.inner, self.outer, self.wires))

    def __repr__(self):
        return '<WiringOp %s(%s), %d wires>' % (
            self.outer.name, ', '.join(b.name for b in self.inner),
            len(self.wires))


def identityWiring(boundary):
    return WiringOp([boundary], boundary,
                    [[(0, p), (OUTER, p)] for p in boundary.getPortNames()])


def nest(f, gs):
    """Substitute gs[i] for inner boundary i of f and flatten."""
    gs = list(gs)
    if len(gs) != len(f.inner):
        raise BoundaryMismatchError(
            len(gs), None, "%r has %d inner boundaries, got %d diagrams" % (
                f, len(f.inner), len(gs)))
    for slot, g in enumerate(gs):
        expected = f.inner[slot]
        for port in expected.ports:
            if not g.outer.hasPort(port.name):
                raise BoundaryMismatchError(slot, port.name)
            if g.outer.getPort(port.name).space != port.space:
                raise BoundaryMismatchError(
                    slot, port.name, "Port %r of slot %d carries %r but the "
                    "diagram offers %r" % (
                        port.name, slot, port.space,
                        g.outer.getPort(port.name).space))
        for name in g.outer.getPortNames():
            if not expected.hasPort(name):
                raise BoundaryMismatchError(slot, name)
    uf = UnionFind()
    for ref in f.getRefs():
        uf.add(('f', ref))
    for wire in f.wires:
        for ref in wire[1:]:
            uf.union(('f', wire[0]), ('f', ref))
    for slot, g in enumerate(gs):
        for ref in g.getRefs():
            uf.add(('g', slot, ref))
        for wire in g.wires:
            for ref in wire[1:]:
                uf.union(('g', slot, wire[0]), ('g', slot, ref))
        for name in f.inner[slot].getPortNames():
            uf.union(('f', (slot, name)), ('g', slot, (OUTER, name)))
    inner = []
    remaining = []
    for ref in f.getRefs():
        if ref[0] == OUTER:
            remaining.append((('f', ref), ref))
    for slot, g in enumerate(gs):
        offset = len(inner)
        inner.extend(g.inner)
        for index, name in g.getRefs():
            if index != OUTER:
                remaining.append((('g', slot, (index, name)),
                                  (offset + index, name)))
    classes = OrderedDict()
    for node, ref in remaining:
        classes.setdefault(uf.find(node), []).append(ref)
    return WiringOp(inner, f.outer, classes.values())


class DiagramComparison(object):

    def __init__(self, equal, witness=None, side=None):
        self.equal = equal
        self.witness = witness
        self.side = side

    def __bool__(self):
        return self.equal

    def __repr__(self):
        if self.equal:
            return '<DiagramComparison equal>'
        return '<DiagramComparison differ at %s (%s)>' % (
            self.witness, self.side)


def _canonicalClasses(op, ranks=None):
    occurrence = {}
    labels = {}
    for index, boundary in enumerate(op.inner):
        if ranks is None:
            k = occurrence.get(boundary.name, 0)
            occurrence[boundary.name] = k + 1
        else:
            k = ranks[index]
        labels[index] = k and '%s#%d' % (boundary.name, k) or boundary.name
    labels[OUTER] = '%s(outer)' % op.outer.name
    return set(tuple(sorted('%s.%s' % (labels[i], p) for i, p in wire))
               for wire in op.wires)


def _numberings(op):
    """Every way to number inner boundaries that share a name.

    The first numbering is the order of appearance.
    """
    groups = OrderedDict()
    for index, boundary in enumerate(op.inner):
        groups.setdefault(boundary.name, []).append(index)
    orders = [list(itertools.permutations(g)) for g in groups.values()]
    for choice in itertools.product(*orders):
        ranks = {}
        for order in choice:
            for k, index in enumerate(order):
                ranks[index] = k
        yield ranks


def diagramsEqual(a, b):
    """Compare wire partitions, matching inner boundaries by name.

    Inner boundaries that share a name may be matched in any order.
    """
    if a.outer.signature() != b.outer.signature() \
            or a.outer.name != b.outer.name:
        return DiagramComparison(False, a.outer.name, 'outer boundary')
    inner_a = sorted((x.name, x.signature()) for x in a.inner)
    inner_b = sorted((x.name, x.signature()) for x in b.inner)
    if inner_a != inner_b:
        differing = sorted(set(inner_a) ^ set(inner_b))
        return DiagramComparison(False, differing[0][0], 'inner boundaries')
    left, right = _canonicalClasses(a), None
    for ranks in _numberings(b):
        candidate = _canonicalClasses(b, ranks)
        if candidate == left:
            return DiagramComparison(True)
        if right is None:
            right = candidate
    differing = sorted((wire, wire in left and 'left only' or 'right only')
                       for wire in left ^ right)
    wire, side = differing[0]
    return DiagramComparison(False, wire, side)


def lint(op):
    """Warn about wire classes that join only input ports."""
    warnings = []
    for wire in op.wires:
        directions = [op.getPort(ref).direction for ref in wire
                      if ref[0] != OUTER]
        outer = [ref for ref in wire if ref[0] == OUTER]
        if not outer and len(directions) > 1 \
                and all(d == 'in' for d in directions):
            message = "Wire %s connects inputs only" % op.describe(wire)
            logger.warning(message)
            warnings.append(message)
    return warnings


# requirements

@implementer(IRequirement)
class Requirement(object):

    def __init__(self, boundary, name, intervals):
        self.boundary = getattr(boundary, 'name', boundary)
        self.name = name
        self.intervals = OrderedDict()
        for port, pieces in sorted(intervals.items()):
            checked = []
            for piece in pieces:
                lo, hi = piece
                if lo > hi:
                    raise RequirementError(
                        "Interval [%r, %r] of %s.%s is reversed" % (
                            lo, hi, self.boundary, port),
                        join('requirements', name))
                checked.append((lo, hi))
            self.intervals[port] = tuple(removeOverlaps(checked))

    def admits(self, port, value):
        pieces = self.intervals.get(port)
        if pieces is None:
            return True
        return any(lo <= value <= hi for lo, hi in pieces)

    def isSatisfied(self, values):
        return all(self.admits(port, values[port]) for port in self.intervals)

    def __repr__(self):
        return '<Requirement %s on %s>' % (self.name, self.boundary)


def _constraints(op, reqs, outer):
    """(wire class index, requirement, port) for every restricted port."""
    index = dict((ref, i) for i, wire in enumerate(op.wires) for ref in wire)
    result = []
    for req in reqs:
        if outer:
            if req.boundary != op.outer.name:
                raise RequirementError(
                    "Requirement %r is not on the outer boundary %r" % (
                        req.name, op.outer.name))
            targets = [OUTER]
        else:
            targets = op.getInnerIndex(req.boundary)
            if not targets:
                raise RequirementError(
                    "Requirement %r names boundary %r which is not inside "
                    "%r" % (req.name, req.boundary, op))
        for target in targets:
            boundary = op.getBoundary(target)
            for port in req.intervals:
                if not boundary.hasPort(port):
                    raise RequirementError("Requirement %r restricts %s.%s "
                                           "which does not exist" % (
                                               req.name, boundary.name, port))
                result.append((index[(target, port)], req, port))
    return result


def _domains(op, grid):
    domains = []
    variables = op.getVariables()
    for i, wire in enumerate(op.wires):
        keys = sorted(op.getLabel(ref) for ref in wire)
        keys.append(op.getPort(wire[0]).space)
        for key in keys:
            if key in grid:
                domains.append(tuple(grid[key]))
                break
        else:
            raise GridError("The grid has no values for wire %s (%s)" % (
                variables[i], op.describe(wire)))
    return domains


class ValidStates(object):
    """Grid points satisfying every requirement.

    Requirements restrict single variables, so the valid set is the
    product of per-variable filtered domains; states are generated lazily.
    """

    def __init__(self, variables, domains):
        self.variables = tuple(variables)
        self.domains = tuple(tuple(d) for d in domains)

    def count(self):
        total = 1
        for domain in self.domains:
            total *= len(domain)
        return total

    def __len__(self):
        return self.count()

    def __iter__(self):
        return itertools.product(*self.domains)

    def __contains__(self, state):
        if isinstance(state, dict):
            state = tuple(state[v] for v in self.variables)
        return all(value in domain
                   for value, domain in zip(state, self.domains))

    def asDicts(self):
        return [dict(zip(self.variables, state)) for state in self]


def jointValidity(op, reqs, grid):
    """The internal states on `grid` meeting all component requirements."""
    domains = [list(d) for d in _domains(op, grid)]
    for index, req, port in _constraints(op, reqs, False):
        domains[index] = [v for v in domains[index] if req.admits(port, v)]
    return ValidStates(op.getVariables(), domains)


class SoundnessReport(object):

    def __init__(self, valid, counterexamples):
        self.valid = valid
        self.counterexamples = counterexamples

    @property
    def sound(self):
        return not self.counterexamples

    def __bool__(self):
        return self.sound

    def __repr__(self):
        if self.sound:
            return '<SoundnessReport sound on grid>'
        return '<SoundnessReport %d counterexamples>' % len(
            self.counterexamples)


def _violations(valid, constraints):
    found = []
    for index, req, port in constraints:
        for value in valid.domains[index]:
            if req.admits(port, value):
                continue
            state = [domain[0] for domain in valid.domains]
            state[index] = value
            found.append((dict(zip(valid.variables, state)), req.name))
            if len(found) >= MAX_COUNTEREXAMPLES:
                return found
    return found


def soundnessCheck(op, component_reqs, outer_reqs, grid, threads=1):
    """Check that joint validity entails the outer requirements.

    A counterexample is a jointly valid state (as a dict keyed by wire
    variable) together with the outer requirement it violates. With
    `threads` above 1 the outer checks are split into contiguous
    partitions checked on a thread pool; partitions are merged in order,
    so the report does not depend on the thread count.
    """
    valid = jointValidity(op, component_reqs, grid)
    counterexamples = []
    if valid.count():
        constraints = list(_constraints(op, outer_reqs, True))
        if threads > 1 and len(constraints) > 1:
            size = -(-len(constraints) // threads)
            parts = [constraints[i:i + size]
                     for i in range(0, len(constraints), size)]
            logger.debug("Checking %d outer constraints in %d partitions",
                         len(constraints), len(parts))
            with ThreadPoolExecutor(threads) as pool:
                for found in pool.map(
                        lambda part: _violations(valid, part), parts):
                    counterexamples.extend(found)
        else:
            counterexamples = _violations(valid, constraints)
    return SoundnessReport(valid, counterexamples[:MAX_COUNTEREXAMPLES])


# documents

def _parsePort(entry, location):
    checkKeys(entry, ('name', 'space', 'direction'), ('name', 'space'),
              location, WiringError)
    return Port(entry['name'], entry['space'],
                entry.get('direction', 'bidirectional'))


def _parseRef(text, names, location):
    boundary, sep, port = text.partition('.')
    if not sep or boundary not in names:
        raise WiringError("Bad port reference %r" % text, location)
    return (names[boundary], port)


class WiringBundle(object):
    """Boundaries, named operations and equations from one document."""

    def __init__(self, boundaries, operations, equations=()):
        self.boundaries = boundaries
        self.operations = operations
        self.equations = list(equations)

    def evaluate(self, expression):
        """Evaluate {"op": name, "args": [...]} by nesting."""
        if isinstance(expression, str):
            expression = {'op': expression}
        if not isinstance(expression, dict):
            raise WiringError("Bad nesting expression %r" % (expression,))
        try:
            op = self.operations[expression['op']]
        except (KeyError, TypeError):
            raise WiringError("Unknown wiring operation %r" % (
                expression.get('op'),))
        args = expression.get('args')
        if not args:
            return op
        if not isinstance(args, list):
            raise WiringError("Arguments of %r must be a list" % (
                expression['op'],))
        return nest(op, [self.evaluate(arg) for arg in args])


def parseWiring(data):
    doc = loadDocument(data, 'wiring')
    checkKeys(doc, ('version', 'boundaries', 'operations', 'equations'),
              ('boundaries',), error=WiringError)
    checkVersion(doc, WiringError)
    boundaries = OrderedDict()
    for name, entry in doc['boundaries'].items():
        where = join('boundaries', name)
        checkKeys(entry, ('ports',), ('ports',), where, WiringError)
        boundaries[name] = Boundary(name, [
            _parsePort(p, join(where, i))
            for i, p in enumerate(entry['ports'])])
    operations = OrderedDict()
    for name, entry in doc.get('operations', {}).items():
        where = join('operations', name)
        checkKeys(entry, ('outer', 'inner', 'wires'),
                  ('outer', 'inner', 'wires'), where, WiringError)
        try:
            outer = boundaries[entry['outer']]
            inner = [boundaries[b] for b in entry['inner']]
        except KeyError as e:
            raise WiringError("Unknown boundary %s" % e, where)
        names = dict((b.name, i) for i, b in enumerate(inner))
        if len(names) != len(inner) or outer.name in names:
            raise WiringError("Boundary names must be distinct within an "
                              "operation", where)
        names[outer.name] = OUTER
        wires = [[_parseRef(text, names, where) for text in wire]
                 for wire in entry['wires']]
        operations[name] = WiringOp(inner, outer, wires)
    equations = doc.get('equations', [])
    for index, equation in enumerate(equations):
        checkKeys(equation, ('name', 'left', 'right'), ('left', 'right'),
                  join('equations', index), WiringError)
    return WiringBundle(boundaries, operations, equations)


def parseRequirements(data):
    doc = loadDocument(data, 'requirements')
    checkKeys(doc, ('version', 'requirements'), ('requirements',),
              error=RequirementError)
    checkVersion(doc, RequirementError)
    reqs = []
    for index, entry in enumerate(doc['requirements']):
        where = join('requirements', index)
        checkKeys(entry, ('boundary', 'name', 'intervals'),
                  ('boundary', 'name', 'intervals'), where, RequirementError)
        reqs.append(Requirement(entry['boundary'], entry['name'],
                                entry['intervals']))
    return reqs


def parseGrid(data):
    doc = loadDocument(data, 'grid')
    checkKeys(doc, ('version', 'grid'), ('grid',), error=GridError)
    checkVersion(doc, GridError)
    grid = OrderedDict()
    for key, values in doc['grid'].items():
        if not isinstance(values, list) or not values:
            raise GridError("Grid entry %r needs a nonempty list" % key,
                            join('grid', key))
        grid[key] = values
    return grid
