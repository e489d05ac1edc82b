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

"""Searching the carrying operad for good fleet designs.

Candidates are forests: every root sits at a base and carries a tree of
assets. A forest is kept canonical (children and roots sorted by their
encoding) so isomorphic designs have one encoding, one hash and one score.
Designs are assembled from edge generators of the operad, so every
candidate is valid by construction and checked again on evaluation.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger

import numpy
import zope.event
from zope.event import notify
from zope.interface import implementer
from zope.schema.fieldproperty import FieldProperty

from opcore.algebra import CARRYING, FleetDesign, kpiEvaluate
from opcore.events import CandidateEvaluatedEvent, BestDesignChangedEvent
from opcore.interfaces import ISearchConfig, IDesignSearch
from opcore.interfaces import ICandidateEvaluatedEvent
from opcore.interfaces import IBestDesignChangedEvent
from opcore.schema import configFromDict
from opcore.template import NetworkOperad
from opcore.util import loadDocument, sha256

logger = getLogger('opcore.synthesis')

EXHAUSTIVE = 'exhaustive'
ANNEAL = 'anneal'
GENETIC = 'genetic'

TOURNAMENT = 3
ELITE = 2
CHUNK = 64


@implementer(ISearchConfig)
class SearchConfig(object):

    budget = FieldProperty(ISearchConfig['budget'])
    max_nodes = FieldProperty(ISearchConfig['max_nodes'])
    algorithm = FieldProperty(ISearchConfig['algorithm'])
    seed = FieldProperty(ISearchConfig['seed'])
    iterations = FieldProperty(ISearchConfig['iterations'])
    population = FieldProperty(ISearchConfig['population'])
    generations = FieldProperty(ISearchConfig['generations'])
    temperature = FieldProperty(ISearchConfig['temperature'])
    cooling = FieldProperty(ISearchConfig['cooling'])
    mutation_rate = FieldProperty(ISearchConfig['mutation_rate'])
    threads = FieldProperty(ISearchConfig['threads'])

    def __init__(self, **kw):
        for name, value in kw.items():
            if name not in ISearchConfig:
                raise TypeError("Unknown search setting %r" % name)
            setattr(self, name, value)


def parseSearchConfig(data):
    return configFromDict(SearchConfig, ISearchConfig,
                          loadDocument(data, 'search config'))


def makeGenerator(seed):
    """The only source of randomness here: numpy's PCG64 seeded once."""
    if isinstance(seed, numpy.random.Generator):
        return seed
    return numpy.random.Generator(numpy.random.PCG64(seed))


# forests

def encodeTree(tree):
    asset, children = tree
    if not children:
        return asset
    return '%s(%s)' % (asset, ','.join(encodeTree(c) for c in children))


def canonicalTree(tree):
    asset, children = tree
    return (asset, tuple(sorted((canonicalTree(c) for c in children),
                                key=encodeTree)))


def canonicalForest(forest):
    return tuple(sorted(((base, canonicalTree(tree)) for base, tree in forest),
                        key=lambda item: (item[0], encodeTree(item[1]))))


def encodeForest(forest):
    return ';'.join('%s:%s' % (base, encodeTree(tree))
                    for base, tree in forest)


def forestHash(forest):
    return sha256(encodeForest(forest).encode('utf-8'))


def treeSize(tree):
    return 1 + sum(treeSize(c) for c in tree[1])


def forestSize(forest):
    return sum(treeSize(tree) for base, tree in forest)


def _treeAssets(tree):
    yield tree[0]
    for child in tree[1]:
        for asset in _treeAssets(child):
            yield asset


def forestCost(forest, catalog):
    return math.fsum(catalog.getAsset(a).cost for base, tree in forest
                     for a in _treeAssets(tree))


def _paths(tree, prefix):
    yield prefix, tree
    for i, child in enumerate(tree[1]):
        for item in _paths(child, prefix + (i,)):
            yield item


def forestNodes(forest):
    """(path, subtree) for every node; a path starts with the root index."""
    nodes = []
    for i, (base, tree) in enumerate(forest):
        nodes.extend(_paths(tree, (i,)))
    return nodes


def _editTree(tree, path, change):
    if not path:
        return change(tree)
    asset, children = tree
    i = path[0]
    new = _editTree(children[i], path[1:], change)
    kept = new is not None and (new,) or ()
    return (asset, children[:i] + kept + children[i + 1:])


def editForest(forest, path, change):
    """Replace the subtree at `path` by change(subtree); None deletes it."""
    i = path[0]
    base, tree = forest[i]
    new = _editTree(tree, path[1:], change)
    kept = new is not None and ((base, new),) or ()
    return canonicalForest(forest[:i] + kept + forest[i + 1:])


def designFromForest(net_operad, catalog, forest, interaction=CARRYING):
    """Assemble the design: per tree, overlay one carrying generator per
    edge on the identity of its word, then put the trees side by side."""
    op = net_operad.identity(())
    assets = []
    bases = []
    for base, tree in forest:
        nodes = []

        def walk(subtree, parent):
            index = len(nodes)
            nodes.append((subtree[0], parent))
            for child in subtree[1]:
                walk(child, index)

        walk(tree, None)
        word = [catalog.getAsset(a).color for a, parent in nodes]
        tree_op = net_operad.identity(word)
        for i, (asset, parent) in enumerate(nodes):
            if parent is not None:
                tree_op = net_operad.overlay(tree_op, net_operad.edge(
                    word, interaction, (i, parent), directed=True))
        op = net_operad.parallel(op, tree_op)
        assets.extend(catalog.getAsset(a) for a, parent in nodes)
        bases.extend([base] * len(nodes))
    return FleetDesign(op, assets, bases, interaction)


def forestFromDesign(design):
    def tree(node):
        return (design.assets[node].name,
                tuple(tree(c) for c in design.getChildren(node)))
    return canonicalForest((design.base_assignment[r], tree(r))
                           for r in design.getRoots())


def designHash(design):
    return forestHash(forestFromDesign(design))


def rankKey(score, digest):
    """Sort key: more detections, then lower cost, then hash order."""
    return (-round(score.detections, 12), round(score.cost, 6), digest)


class _Space(object):
    """What may be built: catalog, bases, carrying rule and limits."""

    def __init__(self, template, catalog, scenario, budget, max_nodes,
                 interaction=CARRYING):
        self.template = template
        self.operad = NetworkOperad(template)
        self.catalog = catalog
        self.scenario = scenario
        self.budget = budget
        self.max_nodes = max_nodes
        self.interaction = interaction
        self.carrying = template.getInteraction(interaction, True)
        self.assets = [a.name for a in catalog.getAssets()
                       if template.hasColor(a.color)]
        self.bases = scenario.getBaseIds()

    def carries(self, parent, child):
        return self.carrying.allows(self.catalog.getAsset(child).color,
                                    self.catalog.getAsset(parent).color)

    def cost(self, asset):
        return self.catalog.getAsset(asset).cost

    def fits(self, forest):
        return (forestSize(forest) <= self.max_nodes
                and forestCost(forest, self.catalog)
                <= self.budget + 1e-9)

    def design(self, forest):
        return designFromForest(self.operad, self.catalog, forest,
                                self.interaction)

    def score(self, forest):
        design = self.design(forest)
        self.operad.validate(design.operation)
        return design, kpiEvaluate(design, self.scenario)

    # generation

    def trees(self, asset, limit, budget, cache):
        key = (asset, limit)
        if key not in cache:
            found = []
            own = self.cost(asset)
            if limit >= 1 and own <= budget + 1e-9:
                kids = []
                for child in self.assets:
                    if self.carries(asset, child):
                        kids.extend(self.trees(child, limit - 1, budget,
                                               cache))
                kids.sort(key=encodeTree)
                for children in _multisets(
                        kids, limit - 1, budget - own,
                        lambda t: (treeSize(t), self._treeCost(t))):
                    found.append((asset, children))
            cache[key] = found
        return cache[key]

    def _treeCost(self, tree):
        return math.fsum(self.cost(a) for a in _treeAssets(tree))

    def forests(self):
        """Canonical forests within the limits, smallest first."""
        cache = {}
        items = []
        for base in self.bases:
            for asset in self.assets:
                for tree in self.trees(asset, self.max_nodes, self.budget,
                                       cache):
                    items.append((base, tree))
        items.sort(key=lambda item: (item[0], encodeTree(item[1])))
        def sizes(item):
            return treeSize(item[1]), self._treeCost(item[1])

        for n in range(self.max_nodes + 1):
            for forest in _multisets(items, n, self.budget, sizes,
                                     exact=True):
                yield canonicalForest(forest)

    # moves

    def addRoot(self, forest, asset, base):
        return canonicalForest(forest + ((base, (asset, ())),))

    def addChild(self, forest, path, asset):
        return editForest(forest, path, lambda t: (t[0], t[1] + (
            (asset, ()),)))

    def extensions(self, forest):
        """Every forest one added asset away that still fits."""
        found = []
        for asset in self.assets:
            for base in self.bases:
                found.append(self.addRoot(forest, asset, base))
            for path, subtree in forestNodes(forest):
                if self.carries(subtree[0], asset):
                    found.append(self.addChild(forest, path, asset))
        unique = {}
        for candidate in found:
            if self.fits(candidate):
                unique.setdefault(encodeForest(candidate), candidate)
        return [unique[k] for k in sorted(unique)]


def _multisets(items, limit, budget, measure, exact=False):
    """Non-decreasing index sequences over `items` whose sizes sum to at
    most `limit` (exactly, with `exact`) and costs to at most `budget`."""
    measured = [measure(item) for item in items]

    def extend(start, room, money, chosen):
        if not exact or room == 0:
            yield tuple(chosen)
        if room == 0:
            return
        for i in range(start, len(items)):
            size, cost = measured[i]
            if size <= room and cost <= money + 1e-9:
                chosen.append(items[i])
                for result in extend(i, room - size, money - cost, chosen):
                    yield result
                chosen.pop()

    return extend(0, limit, budget, [])


def enumerateDesigns(template, catalog, scenario, config):
    """Every design within budget and node limit, once each, smallest
    first and in encoding order within a size."""
    space = _Space(template, catalog, scenario, _budget(config, scenario),
                   config.max_nodes)
    for forest in space.forests():
        yield space.design(forest)


def _budget(config, scenario):
    if config.budget is not None:
        return config.budget
    return scenario.budget


class SearchResult(object):

    def __init__(self, design, score, digest, algorithm, evaluations,
                 budget):
        self.design = design
        self.score = score
        self.hash = digest
        self.algorithm = algorithm
        self.evaluations = evaluations
        self.budget = budget

    def toDict(self):
        return {'algorithm': self.algorithm,
                'budget': self.budget,
                'hash': self.hash,
                'design': encodeForest(forestFromDesign(self.design)),
                'assets': [a.name for a in self.design.assets],
                'bases': list(self.design.base_assignment),
                'operation': self.design.operation.toDict(),
                'score': self.score.toDict(),
                'evaluations': self.evaluations}

    def __repr__(self):
        return '<SearchResult %s %.4f>' % (
            encodeForest(forestFromDesign(self.design)),
            self.score.detections)


@implementer(IDesignSearch)
class DesignSearch(object):
    """One seeded search run.

    Every candidate is scored once; scores are cached by canonical
    encoding. Evaluation may fan out to threads, results are always
    processed in submission order.
    """

    _logger = getLogger('opcore.DesignSearch')

    def __init__(self, template, catalog, scenario, config,
                 interaction=CARRYING):
        self.config = config
        self.scenario = scenario
        self.catalog = catalog
        self.space = _Space(template, catalog, scenario,
                            _budget(config, scenario), config.max_nodes,
                            interaction)
        self.rng = makeGenerator(config.seed)
        self.cache = {}
        self.best = None
        self.step = 0

    # scoring

    def evaluate(self, forest):
        return self.evaluateMany([forest])[0]

    def evaluateMany(self, forests):
        fresh = []
        seen = set(self.cache)
        for forest in forests:
            code = encodeForest(forest)
            if code not in seen:
                seen.add(code)
                fresh.append(forest)
        if self.config.threads > 1 and len(fresh) > 1:
            with ThreadPoolExecutor(self.config.threads) as pool:
                scored = list(pool.map(self.space.score, fresh))
        else:
            scored = [self.space.score(f) for f in fresh]
        for forest, (design, score) in zip(fresh, scored):
            self._record(forest, design, score)
        return [self.cache[encodeForest(f)][1] for f in forests]

    def _record(self, forest, design, score):
        digest = forestHash(forest)
        self.cache[encodeForest(forest)] = (design, score, digest)
        algorithm = self.config.algorithm
        self._logger.debug("%s: %s scores %.6f at cost %s", algorithm,
                           encodeForest(forest) or '(empty)',
                           score.detections, score.cost)
        notify(CandidateEvaluatedEvent(design, score, algorithm, self.step))
        if self.best is None or rankKey(score, digest) < rankKey(
                self.best[2], self.best[3]):
            self.best = (forest, design, score, digest)
            notify(BestDesignChangedEvent(design, score, algorithm,
                                          self.step))

    def detections(self, forest):
        return self.evaluate(forest).detections

    # initial designs

    def greedy(self, per_cost):
        forest = ()
        current = self.detections(forest)
        while True:
            options = self.space.extensions(forest)
            if not options:
                return forest
            scores = self.evaluateMany(options)
            best = None
            for option, score in zip(options, scores):
                gain = score.detections - current
                if per_cost:
                    extra = score.cost - forestCost(forest,
                                                    self.space.catalog)
                    if extra > 0:
                        gain = gain / extra
                    elif gain > 0:
                        gain = math.inf
                if gain > 0 and (best is None or gain > best[0]):
                    best = (gain, option, score.detections)
            if best is None:
                return forest
            forest, current = best[1], best[2]

    def initial(self):
        """The best design seen while growing greedily, by gain and by
        gain per unit cost."""
        self.greedy(False)
        self.greedy(True)
        return self.best[0]

    def randomForest(self):
        forest = ()
        for i in range(int(self.rng.integers(1, self.space.max_nodes + 1))):
            options = self.space.extensions(forest)
            if not options:
                break
            forest = options[int(self.rng.integers(len(options)))]
        return forest

    # neighbourhood

    def neighbour(self, forest, tries=10):
        space = self.space
        rng = self.rng
        for attempt in range(tries):
            move = int(rng.integers(6))
            nodes = forestNodes(forest)
            candidate = None
            if move == 0 and space.assets:
                asset = space.assets[int(rng.integers(len(space.assets)))]
                base = space.bases[int(rng.integers(len(space.bases)))]
                candidate = space.addRoot(forest, asset, base)
            elif move == 1 and nodes:
                path, subtree = nodes[int(rng.integers(len(nodes)))]
                kids = [a for a in space.assets
                        if space.carries(subtree[0], a)]
                if kids:
                    asset = kids[int(rng.integers(len(kids)))]
                    candidate = space.addChild(forest, path, asset)
            elif move == 2 and nodes:
                leaves = [p for p, t in nodes if not t[1]]
                path = leaves[int(rng.integers(len(leaves)))]
                candidate = editForest(forest, path, lambda t: None)
            elif move == 3:
                candidate = self._reattach(forest, nodes)
            elif move == 4 and forest:
                i = int(rng.integers(len(forest)))
                base = space.bases[int(rng.integers(len(space.bases)))]
                candidate = canonicalForest(
                    forest[:i] + ((base, forest[i][1]),) + forest[i + 1:])
            elif move == 5 and nodes:
                path, subtree = nodes[int(rng.integers(len(nodes)))]
                color = space.catalog.getAsset(subtree[0]).color
                others = [a.name for a in space.catalog.getVariants(color)
                          if a.name != subtree[0] and a.name in space.assets]
                if others:
                    asset = others[int(rng.integers(len(others)))]
                    candidate = editForest(forest, path,
                                           lambda t: (asset, t[1]))
            if candidate is not None and candidate != forest \
                    and space.fits(candidate):
                return candidate
        return None

    def _reattach(self, forest, nodes):
        space = self.space
        inner = [(p, t) for p, t in nodes if len(p) > 1]
        if not inner:
            return None
        path, subtree = inner[int(self.rng.integers(len(inner)))]
        base = forest[path[0]][0]
        rest = editForest(forest, path, lambda t: None)
        targets = [p for p, t in forestNodes(rest)
                   if space.carries(t[0], subtree[0])]
        choice = int(self.rng.integers(len(targets) + 1))
        if choice == len(targets):
            return canonicalForest(rest + ((base, subtree),))
        return editForest(rest, targets[choice],
                          lambda t: (t[0], t[1] + (subtree,)))

    # algorithms

    def exhaustive(self):
        batch = []
        for forest in self.space.forests():
            batch.append(forest)
            if len(batch) >= CHUNK:
                self.evaluateMany(batch)
                self.step += 1
                batch = []
        if batch:
            self.evaluateMany(batch)

    def anneal(self):
        current = self.initial()
        score = self.detections(current)
        temperature = self.config.temperature
        for i in range(self.config.iterations):
            self.step = i + 1
            candidate = self.neighbour(current)
            if candidate is None:
                temperature *= self.config.cooling
                continue
            other = self.detections(candidate)
            delta = other - score
            if delta >= 0 or (temperature > 0 and self.rng.random()
                              < math.exp(delta / temperature)):
                current, score = candidate, other
            temperature *= self.config.cooling

    def _tournament(self, population, scores):
        picks = self.rng.integers(len(population), size=TOURNAMENT)
        best = min(picks, key=lambda i: rankKey(scores[i],
                                                forestHash(population[i])))
        return population[int(best)]

    def genetic(self):
        size = self.config.population
        population = [self.initial()]
        while len(population) < size:
            population.append(self.randomForest())
        for generation in range(self.config.generations):
            self.step = generation + 1
            scores = self.evaluateMany(population)
            ranked = sorted(range(len(population)), key=lambda i: rankKey(
                scores[i], forestHash(population[i])))
            children = [population[i] for i in ranked[:ELITE]]
            while len(children) < size:
                a = self._tournament(population, scores)
                b = self._tournament(population, scores)
                child = crossoverForests(a, b, self.rng, self.space)
                if self.rng.random() < self.config.mutation_rate:
                    mutant = forestFromDesign(mutate(
                        self.space.design(child), self.rng, self.scenario,
                        self.catalog))
                    if self.space.fits(mutant):
                        child = mutant
                children.append(child)
            population = children
        self.evaluateMany(population)

    def run(self):
        algorithm = self.config.algorithm
        self._logger.info("Searching with %s, budget %s, at most %d nodes",
                          algorithm, self.space.budget, self.space.max_nodes)
        self.evaluate(())
        getattr(self, algorithm)()
        forest, design, score, digest = self.best
        self._logger.info("Best design %s: %.6f detections for %s",
                          encodeForest(forest) or '(empty)',
                          score.detections, score.cost)
        return SearchResult(design, score, digest, algorithm,
                            len(self.cache), self.space.budget)


def search(template, catalog, scenario, config):
    """Run the configured algorithm and return the best design found."""
    return DesignSearch(template, catalog, scenario, config).run()


# genetic operators

def _treeDensity(space, base, tree):
    design, score = space.score(((base, tree),))
    if not score.cost:
        return math.inf
    return score.detections / score.cost


def trimForest(forest, space):
    """Drop whole trees, lowest score per cost first, until it fits."""
    forest = canonicalForest(forest)
    while forest and not space.fits(forest):
        densities = [(_treeDensity(space, b, t), encodeTree(t), i)
                     for i, (b, t) in enumerate(forest)]
        worst = min(densities)[2]
        forest = forest[:worst] + forest[worst + 1:]
    return forest


def crossoverForests(a, b, rng, space):
    """Pick the tree at each position from a or b, then trim."""
    child = []
    for i in range(max(len(a), len(b))):
        source = rng.random() < 0.5 and a or b
        if i < len(source):
            child.append(source[i])
    return trimForest(child, space)


def crossover(a, b, seed, scenario, catalog, budget=None, max_nodes=8):
    """A child design re-assembled from carry trees of a and b, within
    budget (the scenario's when not given) and node limit."""
    template = a.operation.template
    space = _Space(template, catalog, scenario,
                   budget if budget is not None else scenario.budget,
                   max_nodes, a.interaction)
    forest = crossoverForests(forestFromDesign(a), forestFromDesign(b),
                              makeGenerator(seed), space)
    return space.design(forest)


def mutate(a, seed, scenario, catalog):
    """Move one carry tree to another base or swap one asset for another
    variant of its color. The operation is left alone."""
    rng = makeGenerator(seed)
    assets = list(a.assets)
    bases = list(a.base_assignment)
    roots = a.getRoots()
    swappable = [n for n, asset in enumerate(assets)
                 if len(catalog.getVariants(asset.color)) > 1]
    moves = []
    if roots and len(scenario.getBaseIds()) > 1:
        moves.append('rebase')
    if swappable:
        moves.append('variant')
    if not moves:
        return a
    move = moves[int(rng.integers(len(moves)))]
    if move == 'rebase':
        root = roots[int(rng.integers(len(roots)))]
        others = [b for b in scenario.getBaseIds() if b != bases[root]]
        base = others[int(rng.integers(len(others)))]
        for node in a.getSubtree(root):
            bases[node] = base
    else:
        node = swappable[int(rng.integers(len(swappable)))]
        others = [v for v in catalog.getVariants(assets[node].color)
                  if v.name != assets[node].name]
        assets[node] = others[int(rng.integers(len(others)))]
    return FleetDesign(a.operation, assets, bases, a.interaction)


# audit log

class AuditLog(object):
    """Write every evaluated candidate as one JSON line.

    Use as a context manager to subscribe for the duration of a search.
    """

    def __init__(self, stream):
        self.stream = stream
        self.count = 0

    def __call__(self, event):
        if not ICandidateEvaluatedEvent.providedBy(event) \
                or IBestDesignChangedEvent.providedBy(event):
            return
        line = {'hash': designHash(event.design),
                'cost': event.score.cost,
                'score': event.score.detections,
                'algorithm': event.algorithm,
                'step': event.step}
        self.stream.write(json.dumps(line, sort_keys=True) + '\n')
        self.count += 1

    def __enter__(self):
        zope.event.subscribers.append(self)
        return self

    def __exit__(self, *exc_info):
        zope.event.subscribers.remove(self)
