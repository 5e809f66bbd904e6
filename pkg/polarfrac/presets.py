"""Built-in run presets for the two reference ensembles.

``fig2a``: one species with a single vibrational mode (ω_v = 1), the
cavity resonant with the electronic transition at 10ω_v,
κ = γ = 0.1, λ√N = 0.8, swept over N ∈ {10, 50, 250}.

``fig2b``: two species with ω_v,A = 1 and ω_v,B = 1.2, 25 molecules
each, κ = γ = 0.05, λ√N = 0.6, run through the truncated continued
fraction at depths 0, 1 and 2.

Both use the Franck-Condon row ``[0.98, 0.19899]``.
"""
import math
import copy
import logging

import yaml
import confuse
from confuse import yaml_util

from .exceptions import PresetError

__all__ = ['PRESETS', 'preset_names', 'preset_source', 'run_preset',
           'preset_yaml']

log = logging.getLogger(__name__)

OVERLAPS = [[0.98, 0.19899]]
ELECTRONIC_GAP = 10.0


def _species(count, vibration):
    return {
        'count': count,
        'ground_levels': [0.0, vibration],
        'excited_levels': [ELECTRONIC_GAP],
        'fc_overlaps': copy.deepcopy(OVERLAPS),
    }


PRESETS = {
    'fig2a': {
        'ensemble': {
            'cavity': {'omega_ph': ELECTRONIC_GAP, 'kappa': 0.1},
            'lambda': 0.8 / math.sqrt(10),
            'gamma': 0.1,
            'species': [_species(10, 1.0)],
        },
        'engines': ['d0', 'd0+d1', 'cf_full'],
        'sweep_N': [10, 50, 250],
    },
    'fig2b': {
        'ensemble': {
            'cavity': {'omega_ph': ELECTRONIC_GAP, 'kappa': 0.05},
            'lambda': 0.6 / math.sqrt(50),
            'gamma': 0.05,
            'species': [_species(25, 1.0), _species(25, 1.2)],
        },
        'engines': ['cf_truncated(0)', 'cf_truncated(1)', 'cf_truncated(2)'],
        'grid': {'min': ELECTRONIC_GAP - 1.5, 'max': ELECTRONIC_GAP + 3.5,
                 'points': 8001},
    },
}


def preset_names():
    return sorted(PRESETS)


def _lookup(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise PresetError(name, preset_names())


def preset_source(name):
    """The preset as a configuration source."""
    value = copy.deepcopy(_lookup(name))
    value['preset'] = name
    return confuse.ConfigSource(value, u'<preset {0}>'.format(name))


def run_preset(name, user=False):
    """Return the fully populated `RunConfig` of preset `name`."""
    from .config import build_configuration, load_run_config

    _lookup(name)
    config = build_configuration(preset=name, user=user, env=False)
    return load_run_config(config)


def preset_yaml(name):
    """A run file that reproduces preset `name` through ``--config``."""
    value = copy.deepcopy(_lookup(name))
    return yaml.dump(value, Dumper=yaml_util.Dumper,
                     default_flow_style=None, allow_unicode=True)
