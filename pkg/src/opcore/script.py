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

"""Composition scripts.

A script binds names to operations, one `let` entry at a time, and names
its result::

  {"let": [
     {"name": "hc", "generator": {"type": ["cut", "helo"],
                                  "interaction": "carrying",
                                  "edge": [1, 0]}},
     {"name": "both", "parallel": ["hc", "hc"]}],
   "result": "both"}

Forms: identity (a type), generator, parallel and overlay (lists of
names, folded left), compose ({"outer": name, "inner": [names]}) and
permute ({"op": name, "sigma": [...]}). Without a result the last binding
is the result; an empty script is the identity on the empty type.
"""

from functools import reduce
from logging import getLogger

from opcore import operad
from opcore.errors import ScriptError, OperationError
from opcore.template import NetworkOperad
from opcore.util import loadDocument, checkKeys, checkVersion, join
from opcore.schema import isIdentifier

logger = getLogger('opcore.script')

FORMS = ('identity', 'generator', 'parallel', 'overlay', 'compose',
         'permute')


class _Script(object):

    def __init__(self, template):
        self.operad = NetworkOperad(template)
        self.bindings = {}

    def lookup(self, name, location):
        try:
            return self.bindings[name]
        except (KeyError, TypeError):
            raise ScriptError("Unknown name %r" % (name,), location)

    def names(self, value, location, at_least=1):
        if not isinstance(value, list) or len(value) < at_least:
            raise ScriptError("Expected a list of at least %d names" %
                              at_least, location)
        return [self.lookup(name, join(location, i))
                for i, name in enumerate(value)]

    def identity(self, value, location):
        return self.operad.identity(value)

    def generator(self, value, location):
        checkKeys(value, ('type', 'interaction', 'edge', 'directed',
                          'value'), ('type', 'interaction', 'edge'),
                  location, ScriptError)
        try:
            return self.operad.edge(value['type'], value['interaction'],
                                    value['edge'], value.get('value', 1),
                                    value.get('directed'))
        except KeyError:
            raise ScriptError("Unknown interaction %r" % (
                value['interaction'],), join(location, 'interaction'))

    def parallel(self, value, location):
        return reduce(operad.parallel, self.names(value, location))

    def overlay(self, value, location):
        return reduce(operad.overlay, self.names(value, location))

    def compose(self, value, location):
        checkKeys(value, ('outer', 'inner'), ('outer', 'inner'), location,
                  ScriptError)
        outer = self.lookup(value['outer'], join(location, 'outer'))
        inner = self.names(value['inner'], join(location, 'inner'), 0)
        return operad.compose(outer, inner)

    def permute(self, value, location):
        checkKeys(value, ('op', 'sigma'), ('op', 'sigma'), location,
                  ScriptError)
        return operad.permute(self.lookup(value['op'], join(location, 'op')),
                              value['sigma'])


def runScript(template, data):
    """Evaluate a composition script and return its result operation.

    Operation errors keep their class and get the binding's location.
    """
    doc = loadDocument(data, 'composition script')
    checkKeys(doc, ('version', 'let', 'result'), (), error=ScriptError)
    checkVersion(doc, ScriptError)
    script = _Script(template)
    last = None
    for index, entry in enumerate(doc.get('let', [])):
        location = join('let', index)
        forms = [f for f in FORMS if f in entry]
        checkKeys(entry, ('name',) + FORMS, ('name',), location,
                  ScriptError)
        if len(forms) != 1:
            raise ScriptError("Each binding needs exactly one of %s" %
                              ', '.join(FORMS), location)
        name = entry['name']
        if not isIdentifier(name):
            raise ScriptError("Bad binding name %r" % (name,),
                              join(location, 'name'))
        form = forms[0]
        try:
            op = getattr(script, form)(entry[form], join(location, form))
        except OperationError as e:
            if e.location is None:
                e.location = join(location, form)
            raise
        logger.debug("%s = %s: %d nodes, %d edges", name, form,
                     op.getNodeCount(), op.getEdgeCount())
        script.bindings[name] = op
        last = op
    if 'result' in doc:
        return script.lookup(doc['result'], 'result')
    if last is None:
        return operad.identity(template, ())
    return last
