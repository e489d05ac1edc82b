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

"""Edge monoids.

Each interaction of a network template labels its edges with values of one
commutative monoid whose unit is 0. Overlaying two operations combines edge
values with that monoid.
"""

from zope.interface import implementer

from opcore.errors import OperationError
from opcore.interfaces import IEdgeMonoid

BOOLEAN_OR = 'BOOLEAN_OR'
NAT_SUM = 'NAT_SUM'
NAT_MAX = 'NAT_MAX'
MOD2 = 'MOD2'

MONOID_KINDS = (BOOLEAN_OR, NAT_SUM, NAT_MAX, MOD2)


def _or(a, b):
    return a | b


def _sum(a, b):
    return a + b


def _max(a, b):
    return max(a, b)


def _xor(a, b):
    return a ^ b


_combiners = {
    BOOLEAN_OR: _or,
    NAT_SUM: _sum,
    NAT_MAX: _max,
    MOD2: _xor,
    }


@implementer(IEdgeMonoid)
class EdgeMonoid(object):

    unit = 0

    def __init__(self, kind):
        if kind not in _combiners:
            raise ValueError("Unknown monoid kind %r, expected one of %s" % (
                kind, ', '.join(MONOID_KINDS)))
        self.kind = kind
        self._combine = _combiners[kind]

    def combine(self, a, b):
        return self._combine(a, b)

    def validate(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise OperationError("Edge value %r is not an integer" % (value,))
        if value < 0:
            raise OperationError("Edge value %r is negative" % value)
        if self.kind in (BOOLEAN_OR, MOD2) and value > 1:
            raise OperationError("Edge value %r outside {0, 1} for %s" % (
                value, self.kind))

    def isIdempotent(self):
        return self.kind in (BOOLEAN_OR, NAT_MAX)

    def isSelfInverse(self):
        return self.kind == MOD2

    def __eq__(self, other):
        return isinstance(other, EdgeMonoid) and other.kind == self.kind

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(('EdgeMonoid', self.kind))

    def __repr__(self):
        return 'EdgeMonoid(%r)' % self.kind


_monoids = dict((kind, EdgeMonoid(kind)) for kind in MONOID_KINDS)


def getMonoid(kind):
    """Return the shared monoid for `kind`, case-insensitively."""
    if isinstance(kind, EdgeMonoid):
        return kind
    try:
        return _monoids[str(kind).upper()]
    except KeyError:
        raise ValueError("Unknown monoid kind %r, expected one of %s" % (
            kind, ', '.join(MONOID_KINDS)))
