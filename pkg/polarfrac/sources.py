"""Configuration sources for run and ensemble files."""
import os
import json
import logging
from collections import OrderedDict

import confuse
from confuse import yaml_util

__all__ = ['JsonSource', 'load_source', 'is_bare_ensemble', 'is_manifest']

log = logging.getLogger(__name__)

JSON_SUFFIXES = ('.json',)


class JsonSource(confuse.ConfigSource):
    """A configuration source read from a JSON document.

    JSON is parsed with the `json` module rather than as YAML so that
    exponents without a decimal point (``1e-3``) stay numbers.
    """
    def __init__(self, filename, default=False):
        filename = os.path.abspath(filename)
        super(JsonSource, self).__init__({}, filename, default)
        self.load()

    def load(self):
        try:
            with open(self.filename, encoding='utf-8') as f:
                value = json.load(f, object_pairs_hook=OrderedDict)
        except (IOError, ValueError) as exc:
            raise confuse.ConfigReadError(self.filename, exc)
        if not isinstance(value, dict):
            raise confuse.ConfigReadError(
                self.filename, u'top level must be an object')
        self.update(value)


def is_bare_ensemble(value):
    """Whether a document is an ensemble description rather than a run
    file.
    """
    return 'cavity' in value and 'ensemble' not in value


def is_manifest(value):
    """Whether a document is a run manifest written by the CLI."""
    return 'manifest' in value and isinstance(value.get('run'), dict)


def load_source(path):
    """Read `path` as JSON or YAML, chosen by suffix.

    A bare ensemble file is wrapped under ``ensemble`` so that it can
    stand in for a run file; a run manifest is replaced by the run it
    echoes.
    """
    if os.path.splitext(path)[1].lower() in JSON_SUFFIXES:
        source = JsonSource(path)
    else:
        filename = os.path.abspath(path)
        value = yaml_util.load_yaml(filename) or {}
        if not isinstance(value, dict):
            raise confuse.ConfigReadError(
                filename, u'top level must be a mapping')
        source = confuse.ConfigSource(value, filename)

    if is_manifest(source):
        log.debug(u'%s is a run manifest', source.filename)
        return confuse.ConfigSource(dict(source['run']), source.filename)
    if is_bare_ensemble(source):
        log.debug(u'%s holds a bare ensemble', source.filename)
        return confuse.ConfigSource({'ensemble': dict(source)},
                                    source.filename)
    return source
