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

"""Some utility functions"""

import hashlib
import json

from opcore.errors import OpcoreError, TemplateError

SCHEMA_VERSION = 1


def removeOverlaps(sequence):
    """Merge overlapping closed (lo, hi) intervals.

    Returns a sorted list of disjoint intervals covering the same points.
    Touching intervals are merged.
    """
    # first deal with empty sequences
    if not sequence:
        return []
    sequence = sorted(tuple(interval) for interval in sequence)
    last_start, last_end = sequence[0]
    result = []
    for start, end in sequence[1:]:
        if start <= last_end:
            if end > last_end:
                # half overlap, so extend last one
                last_end = end
            continue
        # no overlap with last, so last is okay
        result.append((last_start, last_end))
        last_start, last_end = start, end
    result.append((last_start, last_end))
    return result


class Document(dict):
    """A JSON object that remembers keys given more than once."""

    def __init__(self, pairs):
        dict.__init__(self)
        self.duplicates = []
        for key, value in pairs:
            if key in self:
                self.duplicates.append(key)
            self[key] = value


def loadDocument(data, what='document'):
    """Parse UTF-8 JSON given as bytes, text or an already loaded dict."""
    if isinstance(data, dict):
        return data
    if isinstance(data, bytes):
        try:
            data = data.decode('utf-8')
        except UnicodeDecodeError as e:
            raise OpcoreError("%s is not UTF-8: %s" % (what, e))
    try:
        result = json.loads(data, object_pairs_hook=Document)
    except ValueError as e:
        raise OpcoreError("%s is not valid JSON: %s" % (what, e))
    if not isinstance(result, dict):
        raise OpcoreError("%s must be a JSON object" % what)
    return result


def checkKeys(doc, allowed, required=(), location='', error=TemplateError):
    """Reject unknown, missing or repeated keys of a JSON object."""
    where = location or 'top level'
    if not isinstance(doc, dict):
        raise error("Expected an object at %s" % where, location)
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise error("Unknown key %r at %s" % (unknown[0], where), location)
    for key in required:
        if key not in doc:
            raise error("Missing key %r at %s" % (key, where), location)
    duplicates = getattr(doc, 'duplicates', None)
    if duplicates:
        raise error("Key %r given twice at %s" % (duplicates[0], where),
                    location)


def checkVersion(doc, error=TemplateError):
    version = doc.get('version', SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise error("Unsupported version %r, expected %d" % (
            version, SCHEMA_VERSION), 'version')


def canonicalJSON(obj):
    return json.dumps(obj, sort_keys=True, separators=(',', ':'))


def sha256(data):
    if isinstance(data, str):
        data = data.encode('utf-8')
    return hashlib.sha256(data).hexdigest()


def join(location, *parts):
    return '.'.join([p for p in (location,) + tuple(map(str, parts)) if p])
