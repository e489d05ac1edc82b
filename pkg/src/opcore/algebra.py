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

"""Algebras over the operads: what a design means.

The sailboat algebra attaches an asset from the catalog and a base to every
node of a carrying operation and scores the result with a random search
model. The failure algebra attaches to each decomposition step a
distribution saying which part is to blame; nested decompositions multiply.
"""

import math
from collections import OrderedDict
from logging import getLogger

from zope.interface import implementer

from opcore import operad
from opcore.errors import AlgebraError, NormalizationError, LabelError
from opcore.errors import MissingAssignmentError, SweepWidthError
from opcore.interfaces import IAssetSpec, ICatalog, IScenario, IFleetDesign
from opcore.interfaces import IScoreRecord, IAlgebra, IFailureDistribution
from opcore.interfaces import IFailureAlgebra
from opcore.util import loadDocument, checkKeys, checkVersion, join

logger = getLogger('opcore.algebra')

CARRYING = 'carrying'
TOLERANCE = 1e-9


def _number(value, location, allow_inf=False):
    if value is None or value == 'inf':
        if allow_inf:
            return math.inf
        raise AlgebraError("Missing number", location)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise AlgebraError("Expected a number, got %r" % (value,), location)
    if value < 0 or (math.isinf(value) and not allow_inf):
        raise AlgebraError("Expected a non-negative number, got %r" % (
            value,), location)
    return float(value)


@implementer(IAssetSpec)
class AssetSpec(object):

    def __init__(self, name, color, cost, tos, speed_search, speed_max,
                 sweep_widths):
        self.name = name
        self.color = color
        location = join('assets', name)
        self.cost = _number(cost, join(location, 'cost'))
        self.tos = _number(tos, join(location, 'tos'), allow_inf=True)
        self.speed_search = _number(speed_search,
                                    join(location, 'speed_search'))
        self.speed_max = _number(speed_max, join(location, 'speed_max'))
        self.sweep_widths = OrderedDict(
            (kind, _number(width, join(location, 'sweep_widths', kind)))
            for kind, width in sorted(sweep_widths.items()))

    def toData(self):
        return {'name': self.name, 'color': self.color, 'cost': self.cost,
                'tos': None if math.isinf(self.tos) else self.tos,
                'speed_search': self.speed_search,
                'speed_max': self.speed_max,
                'sweep_widths': dict(self.sweep_widths)}

    def __eq__(self, other):
        if not isinstance(other, AssetSpec):
            return NotImplemented
        return self.toData() == other.toData()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.name, self.color, self.cost))

    def __repr__(self):
        return '<AssetSpec %s (%s)>' % (self.name, self.color)


@implementer(ICatalog)
class Catalog(object):
    """Assets by name; a color may have several variants."""

    def __init__(self, assets):
        self.assets = OrderedDict()
        for asset in assets:
            if asset.name in self.assets:
                raise AlgebraError("Asset %r listed twice" % asset.name,
                                   'assets')
            self.assets[asset.name] = asset

    def getAsset(self, name):
        return self.assets[name]

    def getAssets(self):
        return list(self.assets.values())

    def getVariants(self, color):
        return [a for a in self.assets.values() if a.color == color]

    def getColors(self):
        colors = []
        for asset in self.assets.values():
            if asset.color not in colors:
                colors.append(asset.color)
        return colors


def parseCatalog(data):
    doc = loadDocument(data, 'asset catalog')
    checkKeys(doc, ('version', 'assets'), ('assets',), error=AlgebraError)
    checkVersion(doc, AlgebraError)
    assets = []
    for index, entry in enumerate(doc['assets']):
        where = join('assets', index)
        checkKeys(entry, ('name', 'color', 'cost', 'tos', 'speed_search',
                          'speed_max', 'sweep_widths'),
                  ('name', 'cost', 'speed_search', 'speed_max',
                   'sweep_widths'), where, AlgebraError)
        assets.append(AssetSpec(
            entry['name'], entry.get('color', entry['name']), entry['cost'],
            entry.get('tos'), entry['speed_search'], entry['speed_max'],
            entry['sweep_widths']))
    return Catalog(assets)


class Base(object):

    def __init__(self, id, distance):
        self.id = id
        self.distance = distance

    def __repr__(self):
        return '<Base %s at %s nmi>' % (self.id, self.distance)


@implementer(IScenario)
class Scenario(object):

    def __init__(self, bases, search_area, mission_window, target_mix,
                 budget=0.0):
        self.bases = tuple(Base(b_id, _number(d, join('bases', b_id)))
                           for b_id, d in bases)
        if not self.bases:
            raise AlgebraError("A scenario needs at least one base", 'bases')
        if len(set(b.id for b in self.bases)) != len(self.bases):
            raise AlgebraError("Duplicate base id", 'bases')
        self.search_area = _number(search_area, 'search_area')
        self.mission_window = _number(mission_window, 'mission_window')
        if not self.search_area or not self.mission_window:
            raise AlgebraError("Search area and window must be positive")
        self.target_mix = OrderedDict(
            (kind, _number(weight, join('target_mix', kind)))
            for kind, weight in sorted(target_mix.items()))
        if not sum(self.target_mix.values()) > 0:
            raise AlgebraError("Target mix weights must sum to more than 0",
                               'target_mix')
        self.budget = _number(budget, 'budget')

    def getBase(self, base_id):
        for base in self.bases:
            if base.id == base_id:
                return base
        raise KeyError(base_id)

    def getBaseIds(self):
        return [b.id for b in self.bases]


def parseScenario(data):
    doc = loadDocument(data, 'scenario')
    checkKeys(doc, ('version', 'bases', 'search_area', 'mission_window',
                    'target_mix', 'budget'),
              ('bases', 'search_area', 'mission_window', 'target_mix'),
              error=AlgebraError)
    checkVersion(doc, AlgebraError)
    bases = []
    for index, entry in enumerate(doc['bases']):
        checkKeys(entry, ('id', 'distance'), ('id', 'distance'),
                  join('bases', index), AlgebraError)
        bases.append((entry['id'], entry['distance']))
    return Scenario(bases, doc['search_area'], doc['mission_window'],
                    doc['target_mix'], doc.get('budget', 0.0))


def _carriersOf(operation, interaction):
    carriers = {}
    for key in operation.edges:
        if key.interaction == interaction and key.directed \
                and not key.isLoop():
            child, parent = key.endpoints
            carriers[child] = min(parent, carriers.get(child, parent))
    return carriers


def _carryChain(carriers, node):
    chain = []
    seen = set([node])
    carrier = carriers.get(node)
    while carrier is not None:
        if carrier in seen:
            raise AlgebraError("Carrying cycle through node %d" % node)
        seen.add(carrier)
        chain.append(carrier)
        carrier = carriers.get(carrier)
    return chain


@implementer(IFleetDesign)
class FleetDesign(object):
    """A carrying operation with an asset and a base for every node.

    Directed edges of the carrying interaction read "i carried by j". A
    node carried by several others rides on the lowest-numbered one.
    """

    def __init__(self, operation, assets, base_assignment,
                 interaction=CARRYING):
        self.operation = operation
        self.assets = tuple(assets)
        self.base_assignment = tuple(base_assignment)
        self.interaction = interaction
        n = operation.getNodeCount()
        if len(self.assets) != n or len(self.base_assignment) != n:
            raise AlgebraError("Design needs one asset and one base per node")
        for node, asset in enumerate(self.assets):
            if asset.color != operation.output[node]:
                raise AlgebraError(
                    "Node %d has color %r but asset %r is a %r" % (
                        node, operation.output[node], asset.name,
                        asset.color))
        self._carriers = _carriersOf(operation, interaction)
        for node in range(n):
            chain = self.getCarryChain(node)
            if chain and self.base_assignment[node] != \
                    self.base_assignment[chain[0]]:
                raise AlgebraError(
                    "Node %d is carried by node %d but based elsewhere" % (
                        node, chain[0]))

    # ACCESSORS

    def getNodeCount(self):
        return len(self.assets)

    def getCarrier(self, node):
        return self._carriers.get(node)

    def getCarryChain(self, node):
        """Carriers of `node`, nearest first."""
        return _carryChain(self._carriers, node)

    def getRoots(self):
        return [i for i in range(len(self.assets))
                if i not in self._carriers]

    def getChildren(self, node):
        return sorted(i for i, j in self._carriers.items() if j == node)

    def getSubtree(self, root):
        """Nodes of the carry tree under `root` in preorder."""
        nodes = [root]
        for child in self.getChildren(root):
            nodes.extend(self.getSubtree(child))
        return nodes

    def getCost(self):
        return math.fsum(asset.cost for asset in self.assets)

    def extract(self, nodes):
        """The design restricted to `nodes`, renumbered in that order."""
        nodes = list(nodes)
        index = dict((node, i) for i, node in enumerate(nodes))
        edges = {}
        for key, value in self.operation.getEdgeItems():
            if all(e in index for e in key.endpoints):
                edges[key.reindex(index)] = value
        word = [self.operation.output[i] for i in nodes]
        op = operad.NetOperation(self.operation.template, [word],
                                 edges=edges)
        return FleetDesign(op, [self.assets[i] for i in nodes],
                           [self.base_assignment[i] for i in nodes],
                           self.interaction)

    def __eq__(self, other):
        if not isinstance(other, FleetDesign):
            return NotImplemented
        return ((self.operation, self.assets, self.base_assignment)
                == (other.operation, other.assets, other.base_assignment))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.operation, self.base_assignment))

    def __repr__(self):
        return '<FleetDesign %s>' % ' '.join(a.name for a in self.assets)


def emptyDesign(template, interaction=CARRYING):
    return FleetDesign(operad.identity(template, ()), (), (), interaction)


@implementer(IScoreRecord)
class ScoreRecord(object):

    def __init__(self, arrivals, search_times, effort, probabilities,
                 detections, cost):
        self.arrivals = tuple(arrivals)
        self.search_times = tuple(search_times)
        self.effort = effort
        self.detection_probability = probabilities
        self.detections = detections
        self.cost = cost

    def toDict(self):
        return {'arrivals': list(self.arrivals),
                'search_times': list(self.search_times),
                'effort': dict(self.effort),
                'detection_probability': dict(self.detection_probability),
                'detections': self.detections,
                'cost': self.cost}


def kpiEvaluate(design, scenario):
    """Score a design against a scenario.

    An asset reaches the search area at the speed of the slowest carrier in
    its chain, or its own top speed when it travels alone. Carried assets
    start their endurance on arrival; self-propelled ones use it en route.
    Effort per target kind is sweep width times search speed times search
    time, and P = 1 - exp(-effort / area).
    """
    kinds = list(scenario.target_mix)
    for node, asset in enumerate(design.assets):
        for kind in kinds:
            if kind not in asset.sweep_widths:
                raise SweepWidthError(
                    "Asset %r at node %d has no sweep width for %r" % (
                        asset.name, node, kind))
    window = scenario.mission_window
    arrivals = []
    search_times = []
    for node, asset in enumerate(design.assets):
        chain = design.getCarryChain(node)
        distance = scenario.getBase(design.base_assignment[node]).distance
        speed = min(design.assets[j].speed_max for j in (chain or [node]))
        if not distance:
            arrival = 0.0
        elif speed:
            arrival = distance / speed
        else:
            arrival = math.inf
        endurance = asset.tos if chain else asset.tos - arrival
        arrivals.append(arrival)
        search_times.append(max(0.0, min(endurance, window - arrival)))
    effort = OrderedDict()
    probabilities = OrderedDict()
    for kind in kinds:
        effort[kind] = math.fsum(
            asset.sweep_widths[kind] * asset.speed_search * tau
            for asset, tau in zip(design.assets, search_times))
        probabilities[kind] = 1.0 - math.exp(
            -effort[kind] / scenario.search_area)
    detections = math.fsum(scenario.target_mix[kind] * probabilities[kind]
                           for kind in kinds)
    return ScoreRecord(arrivals, search_times, effort, probabilities,
                       detections, design.getCost())


# algebras and homomorphisms

@implementer(IAlgebra)
class FleetAlgebra(object):
    """Operations act on fleet designs by composition.

    A design over the word X is an instance of type X. Carried assets are
    moved to the base of the root of their carry chain.
    """

    name = 'fleet'

    def act(self, operation, instances):
        instances = list(instances)
        composed = operad.compose(
            operation, [d.operation for d in instances])
        assets = []
        bases = []
        for slot, position in operation.slot_map:
            assets.append(instances[slot].assets[position])
            bases.append(instances[slot].base_assignment[position])
        interaction = instances and instances[0].interaction or CARRYING
        carriers = _carriersOf(composed, interaction)
        for node in range(len(bases)):
            chain = _carryChain(carriers, node)
            if chain:
                bases[node] = bases[chain[-1]]
        return FleetDesign(composed, assets, bases, interaction)


@implementer(IAlgebra)
class CostAlgebra(object):
    """Every type is the real line; every operation adds."""

    name = 'cost'

    def act(self, operation, instances):
        return math.fsum(instances)


def designCost(typ, design):
    return design.getCost()


class SampleResult(object):

    def __init__(self, index, operation, mapped_then_acted,
                 acted_then_mapped, passed):
        self.index = index
        self.operation = operation
        self.mapped_then_acted = mapped_then_acted
        self.acted_then_mapped = acted_then_mapped
        self.passed = passed

    def __repr__(self):
        return '<SampleResult %d %s: %r vs %r>' % (
            self.index, self.passed and 'pass' or 'FAIL',
            self.mapped_then_acted, self.acted_then_mapped)


class HomomorphismReport(object):

    def __init__(self, results):
        self.results = list(results)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def getViolations(self):
        return [r for r in self.results if not r.passed]

    def __bool__(self):
        return self.passed


def _close(a, b):
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(a - b) <= TOLERANCE * max(1.0, abs(a), abs(b))
    return a == b


def checkHomomorphism(src, dst, components, samples):
    """Evaluate both paths of the naturality square on every sample.

    `components(typ, instance)` maps an instance of `src` at type `typ` to
    one of `dst`. Each sample is (operation, instances of the input slots).
    """
    results = []
    for index, (operation, instances) in enumerate(samples):
        instances = list(instances)
        acted = src.act(operation, instances)
        acted_then_mapped = components(operation.output, acted)
        mapped = [components(operation.inputs[slot], instance)
                  for slot, instance in enumerate(instances)]
        mapped_then_acted = dst.act(operation, mapped)
        passed = _close(mapped_then_acted, acted_then_mapped)
        if not passed:
            logger.warning("Naturality fails on sample %d (%r): %r != %r",
                           index, operation, mapped_then_acted,
                           acted_then_mapped)
        results.append(SampleResult(index, operation, mapped_then_acted,
                                   acted_then_mapped, passed))
    return HomomorphismReport(results)


# failure attribution

@implementer(IFailureDistribution)
class FailureDistribution(object):

    def __init__(self, outcomes, location=None):
        self.outcomes = OrderedDict()
        for label, p in outcomes.items():
            if isinstance(p, bool) or not isinstance(p, (int, float)) \
                    or not 0.0 <= p <= 1.0:
                raise NormalizationError(
                    "Probability of %r must lie in [0, 1], got %r" % (
                        label, p), location)
            self.outcomes[label] = float(p)
        total = math.fsum(self.outcomes.values())
        if abs(total - 1.0) > TOLERANCE:
            raise NormalizationError(
                "Probabilities sum to %r, not 1" % total, location)

    def getLabels(self):
        return list(self.outcomes)

    def __getitem__(self, label):
        return self.outcomes[label]

    def __eq__(self, other):
        if not isinstance(other, FailureDistribution):
            return NotImplemented
        return dict(self.outcomes) == dict(other.outcomes)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<FailureDistribution %s>' % ', '.join(
            '%s: %.4g' % item for item in self.outcomes.items())


class FailureTree(object):
    """A nested decomposition: an operation name and, per child label, an
    optional subtree. Labels without a subtree are leaves."""

    def __init__(self, op, children=None):
        self.op = op
        self.children = OrderedDict(children or {})

    def __repr__(self):
        return '<FailureTree %s(%s)>' % (self.op, ', '.join(self.children))


def parseFailureTree(data, location='tree'):
    if isinstance(data, FailureTree):
        return data
    if isinstance(data, str):
        return FailureTree(data)
    checkKeys(data, ('op', 'children'), ('op',), location, AlgebraError)
    children = OrderedDict()
    for label, child in data.get('children', {}).items():
        children[label] = parseFailureTree(child, join(location, label))
    return FailureTree(data['op'], children)


@implementer(IFailureAlgebra)
class FailureAlgebra(object):

    def __init__(self, assignments):
        self.assignments = OrderedDict()
        for name, dist in assignments.items():
            if not isinstance(dist, FailureDistribution):
                dist = FailureDistribution(dist, join('assignments', name))
            self.assignments[name] = dist

    def getDistribution(self, name):
        try:
            return self.assignments[name]
        except KeyError:
            raise MissingAssignmentError(
                "No failure distribution for operation %r" % name)

    def compositeDistribution(self, tree):
        return compositeDistribution(self, tree)


def failureAlgebra(assignments, operations=None):
    """Build the failure algebra, checking labels against `operations`.

    `operations` maps operation names to wiring operations (their inner
    boundary names are the labels) or to label lists.
    """
    algebra = FailureAlgebra(assignments)
    for name, op in (operations or {}).items():
        if name not in algebra.assignments:
            continue
        if hasattr(op, 'inner'):
            labels = [boundary.name for boundary in op.inner]
        else:
            labels = list(op)
        given = algebra.assignments[name].getLabels()
        if sorted(labels) != sorted(given):
            raise LabelError(
                "Distribution of %r is over %s but the operation has "
                "children %s" % (name, sorted(given), sorted(labels)),
                join('assignments', name))
    return algebra


def compositeDistribution(algebra, tree):
    """Multiply probabilities along every root to leaf path."""
    tree = parseFailureTree(tree)
    result = OrderedDict()

    def walk(node, weight):
        dist = algebra.getDistribution(node.op)
        for label in node.children:
            if label not in dist.outcomes:
                raise LabelError("Operation %r has no child %r" % (
                    node.op, label))
        for label, p in dist.outcomes.items():
            if label in node.children:
                walk(node.children[label], weight * p)
            else:
                result[label] = result.get(label, 0.0) + weight * p

    walk(tree, 1.0)
    return FailureDistribution(result)


def substitute(parent, label, child):
    """Replace outcome `label` of `parent` by the outcomes of `child`."""
    if label not in parent.outcomes:
        raise LabelError("No outcome %r to substitute" % label)
    result = OrderedDict()
    for name, p in parent.outcomes.items():
        if name == label:
            for inner, q in child.outcomes.items():
                result[inner] = result.get(inner, 0.0) + p * q
        else:
            result[name] = result.get(name, 0.0) + p
    return FailureDistribution(result)


def parseFailureAssignments(data):
    """Return (FailureAlgebra, trees by name) from a failure JSON bundle."""
    doc = loadDocument(data, 'failure assignments')
    checkKeys(doc, ('version', 'assignments', 'trees'), ('assignments',),
              error=AlgebraError)
    checkVersion(doc, AlgebraError)
    algebra = FailureAlgebra(doc['assignments'])
    trees = OrderedDict()
    for name, tree in sorted(doc.get('trees', {}).items()):
        trees[name] = parseFailureTree(tree, join('trees', name))
    return algebra, trees
