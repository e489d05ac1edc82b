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
"""The opcore command line.

Every command writes one JSON report to standard output (or --output) and
keeps human readable tables on standard error. Exit status is 0 on
success, 1 for usage and validation errors and 2 when a tasking problem is
infeasible or undecided.
"""

import argparse
import json
import logging
import sys
import time
from collections import OrderedDict
from logging import getLogger

from zope.interface import implementer

import opcore
from opcore import operad
from opcore.algebra import parseCatalog, parseScenario
from opcore.algebra import parseFailureAssignments, failureAlgebra
from opcore.errors import OpcoreError, ConfigError
from opcore.interfaces import IRunReport, ISearchConfig
from opcore.lpformat import exportLP
from opcore.planner import LEVELS, TIMED, COUNTS, buildSystem
from opcore.planner import parseTaskingScenario
from opcore.script import runScript
from opcore.solver import SolverConfig, Solution, solve
from opcore.synthesis import AuditLog, encodeForest, forestFromDesign
from opcore.synthesis import parseSearchConfig, search
from opcore.template import parseNetworkTemplate, parseTaskingTemplate
from opcore.timeline import formatTimeline, timelineRows, exportICalendar
from opcore.util import loadDocument, sha256
from opcore.wiring import parseWiring, parseRequirements, parseGrid
from opcore.wiring import diagramsEqual, soundnessCheck, lint

logger = getLogger('opcore.cli')

REPORT_SCHEMA = 1

OK = 0
INVALID = 1
UNSOLVED = 2

# Table values are given to three significant figures.
CONSISTENCY_TOLERANCE = 0.005

# (kind, a key only documents of that kind have)
KINDS = (
    ('tasking-template', 'places'),
    ('network-template', 'colors'),
    ('catalog', 'assets'),
    ('scenario', 'bases'),
    ('wiring', 'boundaries'),
    ('failure', 'assignments'),
    ('requirements', 'requirements'),
    ('grid', 'grid'),
    ('tasking-scenario', 'agents'),
    ('script', 'let'),
    )
KIND_NAMES = tuple(k for k, key in KINDS) + ('search-config',)


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Report usage errors with our exit status instead of exiting."""

    def error(self, message):
        raise UsageError(message)


@implementer(IRunReport)
class RunReport(object):

    def __init__(self, command):
        self.command = [str(a) for a in command]
        self.inputs = OrderedDict()
        self.status = u'ok'
        self.results = None
        self.started = time.time()
        self.seconds = None

    def read(self, path):
        """Return the bytes of `path`, remembering their digest."""
        with open(path, 'rb') as f:
            data = f.read()
        self.inputs[str(path)] = sha256(data)
        return data

    def finish(self):
        self.seconds = time.time() - self.started

    def toDict(self, timing=True):
        data = {'schema': REPORT_SCHEMA,
                'tool': 'opcore',
                'version': opcore.__version__,
                'command': self.command,
                'inputs': dict(self.inputs),
                'status': self.status,
                'results': self.results}
        if timing:
            data['timing'] = {'seconds': self.seconds}
        return data


def _diagnostic(error):
    data = {'valid': False,
            'type': error.__class__.__name__,
            'error': str(error),
            'location': getattr(error, 'location', None)}
    if isinstance(error, ConfigError):
        data['fields'] = [{'field': name, 'error': repr(e)}
                          for name, e in error.errors]
    return data


# validate

def detectKind(doc):
    for kind, key in KINDS:
        if key in doc:
            return kind
    keys = set(doc) - set(['version'])
    if keys and keys <= set(ISearchConfig.names()):
        return 'search-config'
    raise OpcoreError("Cannot tell what kind of document this is")


def _checkWiring(data):
    bundle = parseWiring(data)
    for equation in bundle.equations:
        bundle.evaluate(equation['left'])
        bundle.evaluate(equation['right'])
    return {'boundaries': list(bundle.boundaries),
            'operations': list(bundle.operations),
            'equations': len(bundle.equations)}


def _checkFailure(data):
    algebra, trees = parseFailureAssignments(data)
    for tree in trees.values():
        algebra.compositeDistribution(tree)
    return {'operations': list(algebra.assignments), 'trees': list(trees)}


def _checkTasking(data):
    template = parseTaskingTemplate(data)
    return {'colors': list(template.colors), 'places': list(template.places),
            'transitions': [t.name for t in template.transitions]}


def _checkNetwork(data):
    template = parseNetworkTemplate(data)
    return {'colors': list(template.colors),
            'interactions': [i.name for i in template.getInteractions()]}


def _checkScenario(data):
    scenario = parseTaskingScenario(data)
    return {'agents': [a.id for a in scenario.agents],
            'horizon': scenario.horizon, 'objective': scenario.objective}


CHECKS = {
    'network-template': _checkNetwork,
    'tasking-template': _checkTasking,
    'catalog': lambda data: {'assets': [
        a.name for a in parseCatalog(data).getAssets()]},
    'scenario': lambda data: {'bases': parseScenario(data).getBaseIds()},
    'wiring': _checkWiring,
    'failure': _checkFailure,
    'requirements': lambda data: {'requirements': [
        r.name for r in parseRequirements(data)]},
    'grid': lambda data: {'variables': list(parseGrid(data))},
    'tasking-scenario': _checkScenario,
    'search-config': lambda data: {
        'algorithm': parseSearchConfig(data).algorithm},
    }


def cmdValidate(args, report, err):
    data = report.read(args.path)
    kind = args.kind or detectKind(loadDocument(data, args.path))
    if kind == 'script':
        if not args.template:
            raise UsageError("Checking a composition script needs "
                             "--template")
        template = parseNetworkTemplate(report.read(args.template))
        op = runScript(template, data)
        summary = {'nodes': op.getNodeCount(), 'edges': op.getEdgeCount()}
    else:
        summary = CHECKS[kind](data)
    err.write('%s: valid %s\n' % (args.path, kind))
    return {'valid': True, 'kind': kind, 'summary': summary}, OK


# compose

def cmdCompose(args, report, err):
    template = parseNetworkTemplate(report.read(args.template))
    op = operad.canonicalForm(runScript(template, report.read(args.script)))
    err.write('%s -> %s: %d edges\n' % (
        ' | '.join(' '.join(w) for w in op.inputs) or '()',
        ' '.join(op.output) or '()', op.getEdgeCount()))
    return {'operation': op.toDict(),
            'digest': operad.operationDigest(op)}, OK


# analyze

def _maxDifference(distributions):
    """Largest disagreement between distributions over the same labels."""
    worst = 0.0
    items = list(distributions.values())
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            if sorted(a.getLabels()) != sorted(b.getLabels()):
                continue
            for label in a.getLabels():
                worst = max(worst, abs(a[label] - b[label]))
    return worst


def analyzeFailure(args, report, err):
    bundle = parseWiring(report.read(args.wiring))
    algebra, trees = parseFailureAssignments(report.read(args.failure))
    algebra = failureAlgebra(algebra.assignments, bundle.operations)
    distributions = OrderedDict(
        (name, algebra.compositeDistribution(tree))
        for name, tree in trees.items())
    for name, dist in distributions.items():
        err.write('%s: %s\n' % (name, ', '.join(
            '%s %.3f' % (label, dist[label]) for label in dist.getLabels())))
    difference = _maxDifference(distributions)
    return {'distributions': OrderedDict(
                (name, dict(dist.outcomes))
                for name, dist in distributions.items()),
            'max_difference': difference,
            'consistent': difference <= CONSISTENCY_TOLERANCE}, OK


def _witness(witness):
    if isinstance(witness, tuple):
        return list(witness)
    return witness


def analyzeEqual(args, report, err):
    bundle = parseWiring(report.read(args.wiring))
    results = []
    for index, equation in enumerate(bundle.equations):
        name = equation.get('name', 'equation %d' % index)
        comparison = diagramsEqual(bundle.evaluate(equation['left']),
                                   bundle.evaluate(equation['right']))
        err.write('%s: %s\n' % (name, comparison.equal and 'equal' or
                                'differ at %s' % (comparison.witness,)))
        results.append({'name': name, 'equal': comparison.equal,
                        'witness': _witness(comparison.witness),
                        'side': comparison.side})
    return {'equations': results,
            'all_equal': all(r['equal'] for r in results)}, OK


def _expression(bundle, text):
    if text is None:
        if bundle.equations:
            return bundle.equations[0]['left']
        if not bundle.operations:
            raise OpcoreError("The wiring document defines no operations")
        return list(bundle.operations)[-1]
    if text.lstrip().startswith('{'):
        try:
            return json.loads(text)
        except ValueError as e:
            raise OpcoreError("Bad nesting expression: %s" % e, '--op')
    return text


def analyzeSoundness(args, report, err):
    bundle = parseWiring(report.read(args.wiring))
    reqs = parseRequirements(report.read(args.requirements))
    grid = parseGrid(report.read(args.grid))
    op = bundle.evaluate(_expression(bundle, args.op))
    outer = [r for r in reqs if r.boundary == op.outer.name]
    inner = [r for r in reqs if r.boundary != op.outer.name]
    found = soundnessCheck(op, inner, outer, grid, args.threads or 1)
    warnings = lint(op)
    err.write('%s on grid, %d jointly valid states\n' % (
        found.sound and 'sound' or 'NOT sound', found.valid.count()))
    return {'sound': found.sound,
            'valid_states': found.valid.count(),
            'counterexamples': [{'state': state, 'requirement': name}
                                for state, name in found.counterexamples],
            'lint': warnings}, OK


ANALYSES = {'failure': analyzeFailure,
            'equal': analyzeEqual,
            'soundness': analyzeSoundness}


def cmdAnalyze(args, report, err):
    return ANALYSES[args.analysis](args, report, err)


# plan

def cmdPlan(args, report, err):
    template = parseTaskingTemplate(report.read(args.template))
    scenario = parseTaskingScenario(report.read(args.scenario))
    config = SolverConfig(node_limit=args.node_limit,
                          symmetry=args.symmetry,
                          fuel_rule=scenario.fuel_rule)
    system = buildSystem(template, scenario, args.level, config.symmetry)
    if args.export_lp:
        with open(args.export_lp, 'w') as f:
            f.write(exportLP(system))
        err.write('wrote %s: %d variables, %d rows\n' % (
            args.export_lp, len(system.variables), len(system.rows)))
        return {'lp': args.export_lp, 'level': args.level,
                'variables': len(system.variables),
                'rows': len(system.rows)}, OK
    outcome = solve(system, config=config)
    results = outcome.toDict()
    if not isinstance(outcome, Solution):
        err.write('%s\n' % (outcome,))
        return results, UNSOLVED
    if args.level != COUNTS:
        err.write(formatTimeline(outcome) + '\n')
        results['timeline'] = timelineRows(outcome)
    if args.ical:
        if args.level != TIMED:
            raise UsageError("--ical needs a timed schedule")
        with open(args.ical, 'w') as f:
            f.write(exportICalendar(outcome, scenario.epoch,
                                    scenario.tick_minutes))
        results['ical'] = args.ical
    return results, OK


# synthesize

def _auditPath(args):
    if args.audit:
        return args.audit
    if args.output:
        return args.output + '.audit.jsonl'
    return None


def cmdSynthesize(args, report, err):
    template = parseNetworkTemplate(report.read(args.template))
    catalog = parseCatalog(report.read(args.catalog))
    scenario = parseScenario(report.read(args.scenario))
    config = parseSearchConfig(report.read(args.config))
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        config.threads = args.threads
    path = _auditPath(args)
    if path is None:
        result = search(template, catalog, scenario, config)
        lines = None
    else:
        with open(path, 'w') as stream:
            with AuditLog(stream) as audit:
                result = search(template, catalog, scenario, config)
            lines = audit.count
    err.write('best %s: %.6f expected detections for %s\n' % (
        encodeForest(forestFromDesign(result.design)) or '(empty)',
        result.score.detections, result.score.cost))
    results = result.toDict()
    results['audit'] = path
    results['audit_lines'] = lines
    return results, OK


COMMANDS = {'validate': cmdValidate,
            'compose': cmdCompose,
            'analyze': cmdAnalyze,
            'plan': cmdPlan,
            'synthesize': cmdSynthesize}


def makeParser():
    parser = ArgumentParser(
        prog='opcore',
        description='Typed operads for system design, analysis and '
                    'tasking.')
    parser.add_argument('--version', action='version',
                        version='opcore %s' % opcore.__version__)
    parser.add_argument('--json', action='store_true',
                        help='report errors as JSON on standard output')
    parser.add_argument('--seed', type=int,
                        help='override the seed of a search config')
    parser.add_argument('--threads', type=int,
                        help='worker threads (default 1)')
    parser.add_argument('--output', '-o',
                        help='write the report here instead of stdout')
    parser.add_argument('--verbose', '-v', action='count', default=0)
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    p = commands.add_parser('validate', help='check any input document')
    p.add_argument('path')
    p.add_argument('--kind', choices=KIND_NAMES)
    p.add_argument('--template',
                   help='network template, needed for scripts')

    p = commands.add_parser('compose', help='run a composition script')
    p.add_argument('template')
    p.add_argument('script')

    p = commands.add_parser('analyze', help='wiring diagram analyses')
    analyses = p.add_subparsers(dest='analysis', metavar='ANALYSIS')
    analyses.required = True
    a = analyses.add_parser('failure', help='composite failure '
                            'distributions')
    a.add_argument('wiring')
    a.add_argument('failure')
    a = analyses.add_parser('equal', help='check the wiring equations')
    a.add_argument('wiring')
    a = analyses.add_parser('soundness', help='requirement soundness')
    a.add_argument('wiring')
    a.add_argument('requirements')
    a.add_argument('grid')
    a.add_argument('--op', help='operation name or nesting expression')

    p = commands.add_parser('plan', help='compile and solve tasking')
    p.add_argument('template')
    p.add_argument('scenario')
    p.add_argument('--level', choices=LEVELS, default=TIMED)
    p.add_argument('--export-lp', metavar='FILE',
                   help='write the LP text instead of solving')
    p.add_argument('--ical', metavar='FILE',
                   help='write the schedule as iCalendar')
    p.add_argument('--node-limit', type=int, default=200000)
    p.add_argument('--symmetry', action='store_true',
                   help='add symmetry breaking rows')

    p = commands.add_parser('synthesize', help='search fleet designs')
    p.add_argument('template')
    p.add_argument('catalog')
    p.add_argument('scenario')
    p.add_argument('config')
    p.add_argument('--audit', metavar='FILE',
                   help='JSON lines of every evaluated candidate')
    return parser


def _handler(verbose, stream):
    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter('%(name)s: %(message)s'))
    root = logging.getLogger('opcore')
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbose, 2)]
    root.setLevel(level)
    root.addHandler(handler)
    return handler


def _emit(report, args, out):
    text = json.dumps(report.toDict(), sort_keys=True, indent=2) + '\n'
    if args is not None and args.output:
        with open(args.output, 'w') as f:
            f.write(text)
    else:
        out.write(text)


def _wantsJSON(args, argv):
    if args is not None:
        return args.json
    # the command line did not parse, so look for the global flag alone
    parser = ArgumentParser(add_help=False)
    parser.add_argument('--json', action='store_true')
    try:
        known, rest = parser.parse_known_args(argv)
    except UsageError:
        return False
    return known.json


def main(argv=None, stdout=None, stderr=None):
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    report = RunReport(argv)
    args = None
    handler = None
    try:
        args = makeParser().parse_args(argv)
        handler = _handler(args.verbose, err)
        report.results, status = COMMANDS[args.command](args, report, err)
        if status == UNSOLVED:
            report.status = report.results['status']
    except UsageError as e:
        err.write('opcore: %s\n' % e)
        report.status = u'usage'
        report.results = {'valid': False, 'error': str(e)}
        status = INVALID
    except (OpcoreError, OSError) as e:
        logger.debug("Failed", exc_info=True)
        where = getattr(e, 'location', None)
        err.write('opcore: %s%s\n' % (e, where and ' (at %s)' % where or ''))
        report.status = u'invalid'
        report.results = _diagnostic(e)
        status = INVALID
    finally:
        if handler is not None:
            logging.getLogger('opcore').removeHandler(handler)
    report.finish()
    if status != INVALID or _wantsJSON(args, argv):
        _emit(report, args, out)
    return status


if __name__ == '__main__':
    sys.exit(main())
