"""Confuse templates for ensemble and run descriptions.

Every template reports failures as a `SchemaError` whose `pointer`
names the offending value, e.g. ``/ensemble/species/0/count``.
"""
import math
from collections import abc

import confuse
from confuse import REQUIRED

from . import model
from .engines import Engine
from .spectra import Grid
from .util import json_pointer, split_list
from .exceptions import SchemaError, SchemaTypeError, SpecError

__all__ = [
    'SchemaTemplate', 'Real', 'Integer', 'Complex', 'Levels', 'Overlaps',
    'StrictMapping', 'GridTemplate', 'EngineList', 'IntList', 'RealList',
    'Flag', 'Text', 'Species',
    'EnsembleTemplate', 'positive', 'non_negative', 'DEFAULT_GAMMA_RATIO']

DEFAULT_GAMMA_RATIO = 1e-3


class SchemaTemplate(confuse.Template):
    """A template whose errors carry a JSON pointer."""

    def value(self, view, template=None):
        try:
            value, _ = view.first()
        except confuse.NotFoundError:
            if self.default is REQUIRED:
                raise SchemaError(json_pointer(view),
                                  u'missing required value')
            return self.default
        return self.convert(value, view)

    def fail(self, message, view, type_error=False):
        exc_class = SchemaTypeError if type_error else SchemaError
        raise exc_class(json_pointer(view), message)


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class Real(SchemaTemplate):
    """A finite real number, optionally bounded below by `minimum`
    (excluded when `strict`).
    """
    def __init__(self, default=REQUIRED, minimum=None, strict=False):
        super(Real, self).__init__(default)
        self.minimum = minimum
        self.strict = strict

    def convert(self, value, view):
        if not _is_number(value):
            self.fail(u'must be a number, not {0}'.format(
                type(value).__name__), view, True)
        value = float(value)
        if not math.isfinite(value):
            self.fail(u'must be finite', view)
        if self.minimum is not None:
            if self.strict and not value > self.minimum:
                self.fail(u'must be greater than {0}'.format(self.minimum),
                          view)
            if value < self.minimum:
                self.fail(u'must be at least {0}'.format(self.minimum), view)
        return value


def positive(default=REQUIRED):
    return Real(default, minimum=0, strict=True)


def non_negative(default=REQUIRED):
    return Real(default, minimum=0)


class Integer(SchemaTemplate):
    """An integer no smaller than `minimum`. Integral floats are
    accepted.
    """
    def __init__(self, default=REQUIRED, minimum=None):
        super(Integer, self).__init__(default)
        self.minimum = minimum

    def convert(self, value, view):
        if not _is_number(value) or int(value) != value:
            self.fail(u'must be an integer', view, True)
        value = int(value)
        if self.minimum is not None and value < self.minimum:
            self.fail(u'must be at least {0}'.format(self.minimum), view)
        return value


class Flag(SchemaTemplate):
    def convert(self, value, view):
        if not isinstance(value, bool):
            self.fail(u'must be true or false', view, True)
        return value


class Text(SchemaTemplate):
    def convert(self, value, view):
        if not isinstance(value, str) or not value:
            self.fail(u'must be a nonempty string', view, True)
        return value


class RealList(SchemaTemplate):
    """A list of reals, as a list, a single number or a
    comma-separated string.
    """
    def convert(self, value, view):
        if isinstance(value, str):
            try:
                return tuple(float(x) for x in split_list(value))
            except ValueError:
                self.fail(u'must be a list of numbers', view, True)
        if _is_number(value):
            return (Real().convert(value, view),)
        if isinstance(value, (list, tuple)):
            return tuple(Real().value(item) for item in view.sequence())
        self.fail(u'must be a list of numbers', view, True)


class Complex(SchemaTemplate):
    """A complex scalar written as ``[re, im]`` or as a bare real."""

    def convert(self, value, view):
        if _is_number(value):
            return complex(value)
        if isinstance(value, (list, tuple)) and len(value) == 2 \
                and all(_is_number(x) for x in value):
            result = complex(value[0], value[1])
            if not (math.isfinite(result.real) and
                    math.isfinite(result.imag)):
                self.fail(u'must be finite', view)
            return result
        self.fail(u'must be a real number or a [re, im] pair', view, True)


def _sequence(template, view):
    value, _ = view.first()
    if not isinstance(value, (list, tuple)):
        template.fail(u'must be a list, not {0}'.format(
            type(value).__name__), view, True)
    return list(view.sequence())


class Levels(SchemaTemplate):
    """A nonempty, strictly increasing list of level energies."""

    def value(self, view, template=None):
        try:
            items = _sequence(self, view)
        except confuse.NotFoundError:
            return super(Levels, self).value(view, template)
        if not items:
            self.fail(u'must not be empty', view)
        levels = [Real().value(item) for item in items]
        for index, (lower, upper) in enumerate(zip(levels, levels[1:]), 1):
            if not upper > lower:
                self.fail(u'levels must be strictly increasing',
                          items[index])
        return tuple(levels)


class Overlaps(SchemaTemplate):
    """A matrix of complex Franck-Condon overlaps, one row per excited
    level, each row of norm at most one.
    """
    def value(self, view, template=None):
        try:
            rows = _sequence(self, view)
        except confuse.NotFoundError:
            return super(Overlaps, self).value(view, template)
        if not rows:
            self.fail(u'must not be empty', view)
        matrix = []
        for row in rows:
            entries = [Complex().value(item) for item in _sequence(self, row)]
            norm = math.sqrt(sum(abs(x) ** 2 for x in entries))
            if norm > 1 + model.FC_NORM_SLACK:
                self.fail(u'row norm {0!r} exceeds 1'.format(norm), row)
            matrix.append(tuple(entries))
        return tuple(matrix)


class StrictMapping(confuse.MappingTemplate):
    """A mapping template that rejects keys it does not know."""

    def __init__(self, mapping, default=REQUIRED):
        super(StrictMapping, self).__init__(mapping)
        self.default = default

    def fail(self, message, view, type_error=False):
        exc_class = SchemaTypeError if type_error else SchemaError
        raise exc_class(json_pointer(view), message)

    def value(self, view, template=None):
        try:
            value, _ = view.first()
        except confuse.NotFoundError:
            if self.default is REQUIRED:
                raise SchemaError(json_pointer(view),
                                  u'missing required value')
            return self.default
        if not isinstance(value, abc.Mapping):
            self.fail(u'must be a mapping, not {0}'.format(
                type(value).__name__), view, True)
        try:
            keys = view.keys()
        except confuse.ConfigTypeError:
            self.fail(u'must be a mapping in every source', view, True)
        for key in keys:
            if key not in self.subtemplates:
                self.fail(u'unknown key {0!r}'.format(key), view[key])
        return self.build(super(StrictMapping, self).value(view, template),
                          view)

    def build(self, values, view):
        """Turn the validated `AttrDict` into the final value."""
        return values


class GridTemplate(SchemaTemplate):
    """A frequency grid given as ``"MIN:MAX:POINTS"`` or as a mapping
    with ``min``, ``max`` and ``points``.
    """
    fields = ('min', 'max', 'points')

    def convert(self, value, view):
        if isinstance(value, str):
            parts = value.split(':')
            try:
                low, high, points = (float(parts[0]), float(parts[1]),
                                     int(parts[2]))
                if len(parts) != 3:
                    raise ValueError(value)
            except (ValueError, IndexError):
                self.fail(u'must look like MIN:MAX:POINTS, not {0!r}'.format(
                    value), view)
        elif isinstance(value, abc.Mapping):
            # Read from this source alone; lower sources may hold null.
            for key in value:
                if key not in self.fields:
                    self.fail(u'unknown key {0!r}'.format(key), view[key])
            for key in self.fields:
                if key not in value:
                    self.fail(u'missing {0}'.format(key), view)
            low = Real().convert(value['min'], view['min'])
            high = Real().convert(value['max'], view['max'])
            points = Integer().convert(value['points'], view['points'])
        else:
            self.fail(u'must be a MIN:MAX:POINTS string or a mapping',
                      view, True)
        if points < 2:
            self.fail(u'needs at least 2 points', view)
        if not high > low:
            self.fail(u'max must exceed min', view)
        return Grid(low, high, points)


class EngineList(SchemaTemplate):
    """A nonempty list of engine labels, as a list or a comma-separated
    string.
    """
    def convert(self, value, view):
        if isinstance(value, str):
            labels = [(label, view) for label in split_list(value)]
        elif isinstance(value, (list, tuple)):
            labels = [(item.get(), item) for item in view.sequence()]
        else:
            self.fail(u'must be a list of engine names', view, True)
        if not labels:
            self.fail(u'must name at least one engine', view)
        engines = []
        for label, where in labels:
            try:
                engine = Engine.parse(label)
            except ValueError as exc:
                self.fail(str(exc), where)
            if engine not in engines:
                engines.append(engine)
        return tuple(engines)


class IntList(SchemaTemplate):
    """A list of integers no smaller than `minimum`, as a list, a single
    integer or a comma-separated string.
    """
    def __init__(self, default=REQUIRED, minimum=1):
        super(IntList, self).__init__(default)
        self.minimum = minimum

    def convert(self, value, view):
        if isinstance(value, str):
            try:
                numbers = [int(x) for x in split_list(value)]
            except ValueError:
                self.fail(u'must be a list of integers', view, True)
        elif _is_number(value):
            numbers = [Integer().convert(value, view)]
        elif isinstance(value, (list, tuple)):
            numbers = [Integer().value(item) for item in view.sequence()]
        else:
            self.fail(u'must be a list of integers', view, True)
        for number in numbers:
            if number < self.minimum:
                self.fail(u'entries must be at least {0}'.format(
                    self.minimum), view)
        return tuple(numbers)


class Species(StrictMapping):
    def __init__(self):
        super(Species, self).__init__({
            'count': Integer(minimum=1),
            'ground_levels': Levels(),
            'excited_levels': Levels(),
            'fc_overlaps': Overlaps(),
        })

    def build(self, values, view):
        rows = values.fc_overlaps
        if len(rows) != len(values.excited_levels):
            self.fail(u'needs one row per excited level ({0}), not {1}'
                      .format(len(values.excited_levels), len(rows)),
                      view['fc_overlaps'])
        for index, row in enumerate(rows):
            if len(row) != len(values.ground_levels):
                self.fail(u'needs one entry per ground level ({0}), not {1}'
                          .format(len(values.ground_levels), len(row)),
                          view['fc_overlaps'][index])
        try:
            return model.SpeciesSpec(values.count, values.ground_levels,
                                     values.excited_levels, rows)
        except SpecError as exc:
            self.fail(str(exc), view)


class EnsembleTemplate(StrictMapping):
    """Converts an ensemble description into a `model.EnsembleSpec`.

    An omitted `gamma` defaults to a thousandth of the smallest
    vibrational spacing.
    """
    def __init__(self, default=REQUIRED):
        super(EnsembleTemplate, self).__init__({
            'cavity': StrictMapping({
                'omega_ph': positive(),
                'kappa': non_negative(0.0),
            }),
            'lambda': non_negative(),
            'gamma': confuse.Optional(non_negative(None)),
            'species': confuse.Sequence(Species()),
        }, default=default)

    def build(self, values, view):
        species = tuple(values.species)
        if not species:
            self.fail(u'must list at least one species', view['species'])
        gamma = values.gamma
        if gamma is None:
            gaps = [g for s in species for g in s.vibrational_gaps()]
            gamma = DEFAULT_GAMMA_RATIO * (min(gaps) if gaps else 1.0)
        try:
            cavity = model.CavitySpec(values.cavity.omega_ph,
                                      values.cavity.kappa)
            return model.EnsembleSpec(cavity, species, values['lambda'],
                                      gamma)
        except SpecError as exc:
            self.fail(str(exc), view)
