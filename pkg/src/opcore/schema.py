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

"""Schema fields zope.schema does not ship with."""

import re

from zope.interface import implementer
from zope.schema import Float, TextLine, getFieldNames, getValidationErrors
from zope.schema.interfaces import IFloat, ITextLine, ValidationError

from opcore.errors import ConfigError

_identifier = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


class IIdentifier(ITextLine):
    u"""Field containing a name usable in files and LP exports."""


@implementer(IIdentifier)
class Identifier(TextLine):
    __doc__ = IIdentifier.__doc__

    def constraint(self, value):
        return (TextLine.constraint(self, value)
                and _identifier.match(value) is not None)


def isIdentifier(value):
    return isinstance(value, str) and _identifier.match(value) is not None


class IProbability(IFloat):
    u"""Field containing a probability in [0, 1]."""


@implementer(IProbability)
class Probability(Float):
    __doc__ = IProbability.__doc__

    def __init__(self, **kw):
        kw.setdefault('min', 0.0)
        kw.setdefault('max', 1.0)
        Float.__init__(self, **kw)


class IQuantity(IFloat):
    u"""Field containing a non-negative amount, infinity included."""


@implementer(IQuantity)
class Quantity(Float):
    __doc__ = IQuantity.__doc__

    def __init__(self, **kw):
        kw.setdefault('min', 0.0)
        Float.__init__(self, **kw)

    def _validate(self, value):
        if isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        Float._validate(self, value)


def configFromDict(factory, schema, data, location=None):
    """Build `factory()` and set the fields of `schema` from `data`.

    Every problem is collected before raising, so a config file with three
    bad settings reports all three.
    """
    names = getFieldNames(schema)
    errors = []
    config = factory()
    for name, value in data.items():
        if name == 'version':
            continue
        if name not in names:
            errors.append((name, ValidationError("unknown setting")))
            continue
        field = schema[name]
        if IFloat.providedBy(field) and isinstance(value, int) \
                and not isinstance(value, bool):
            value = float(value)
        try:
            field.bind(config).validate(value)
        except ValidationError as e:
            errors.append((name, e))
            continue
        setattr(config, name, value)
    errors.extend(getValidationErrors(schema, config))
    if errors:
        raise ConfigError("Invalid settings: %s" % ', '.join(
            '%s (%s)' % (name or 'invariant', error.__class__.__name__)
            for name, error in errors), errors, location)
    return config
