"""Layered run configuration.

Sources, highest priority first: explicit overrides (command-line
flags), ``POLARFRAC_*`` environment variables, a preset, the
``--config`` file, the user's ``config.yaml`` and the package defaults.
"""
import logging
from dataclasses import dataclass, field

import confuse

from . import spectra
from . import templates
from .sources import load_source

__all__ = ['RunConfig', 'Analyses', 'RUN_TEMPLATE', 'build_configuration',
           'load_run_config', 'APPNAME']

log = logging.getLogger(__name__)

APPNAME = 'polarfrac'

ANALYSES = ('peaks', 'modes', 'sum_rule', 'chi', 'dyson')

RUN_TEMPLATE = templates.StrictMapping({
    'ensemble': templates.EnsembleTemplate(),
    'engines': templates.EngineList(),
    'grid': confuse.Optional(templates.GridTemplate(None)),
    'grid_points': templates.Integer(minimum=2),
    'threads': templates.Integer(minimum=1),
    'out': templates.Text(),
    'preset': confuse.Optional(templates.Text(None)),
    'sweep_N': templates.IntList(),
    'analyses': templates.StrictMapping(
        {name: templates.Flag() for name in ANALYSES}),
    'peaks': templates.StrictMapping({
        'min_height': templates.non_negative(),
        'min_prominence': templates.non_negative(),
    }),
    'modes': templates.StrictMapping({
        'orders': templates.IntList(minimum=0),
    }),
    'dyson': templates.StrictMapping({
        'm_max': templates.Integer(minimum=0),
        'omegas': templates.RealList(),
    }),
    'limits': templates.StrictMapping({
        'dense_dimension': templates.Integer(minimum=1),
        'condition': templates.positive(),
        'walk_order': templates.Integer(minimum=0),
    }),
})


@dataclass(frozen=True)
class Analyses:
    peaks: bool = True
    modes: bool = True
    sum_rule: bool = False
    chi: bool = False
    dyson: bool = False

    def to_dict(self):
        return {name: getattr(self, name) for name in ANALYSES}


@dataclass(frozen=True)
class RunConfig:
    """A fully validated run: the ensemble, the engines and every
    analysis setting.
    """
    ensemble: object
    engines: tuple
    grid: spectra.Grid = None
    grid_points: int = spectra.DEFAULT_POINTS
    threads: int = 1
    out: str = 'polarfrac-out'
    preset: str = None
    sweep_N: tuple = ()
    analyses: Analyses = field(default_factory=Analyses)
    min_height: float = 0.0
    min_prominence: float = spectra.DEFAULT_PROMINENCE
    mode_orders: tuple = (0, 1)
    dyson_m_max: int = 3
    dyson_omegas: tuple = ()
    dense_dimension: int = 20000
    condition: float = 1e12
    walk_order: int = 8

    def resolved_grid(self, spec=None):
        if self.grid is not None:
            return self.grid
        return spectra.default_grid(spec or self.ensemble, self.grid_points)

    def ensembles(self):
        """The ensemble at each swept N, or just the configured one."""
        if not self.sweep_N:
            return [self.ensemble]
        return [self.ensemble.resized(n) for n in self.sweep_N]

    def to_dict(self):
        """The run in run-file form. Feeding it back through `--config`
        reproduces the run; the preset name is not echoed so that the
        echoed values are not overridden again.
        """
        return {
            'ensemble': self.ensemble.to_dict(),
            'engines': [e.label for e in self.engines],
            'grid': self.resolved_grid().to_dict(),
            'grid_points': self.grid_points,
            'threads': self.threads,
            'out': self.out,
            'sweep_N': list(self.sweep_N),
            'analyses': self.analyses.to_dict(),
            'peaks': {'min_height': self.min_height,
                      'min_prominence': self.min_prominence},
            'modes': {'orders': list(self.mode_orders)},
            'dyson': {'m_max': self.dyson_m_max,
                      'omegas': list(self.dyson_omegas)},
            'limits': {'dense_dimension': self.dense_dimension,
                       'condition': self.condition,
                       'walk_order': self.walk_order},
        }


def load_run_config(view):
    """Validate a configuration view into a `RunConfig`."""
    values = view.get(RUN_TEMPLATE)
    return RunConfig(
        ensemble=values.ensemble,
        engines=values.engines,
        grid=values.grid,
        grid_points=values.grid_points,
        threads=values.threads,
        out=values.out,
        preset=values.preset,
        sweep_N=values.sweep_N,
        analyses=Analyses(**values.analyses),
        min_height=values.peaks.min_height,
        min_prominence=values.peaks.min_prominence,
        mode_orders=values.modes.orders,
        dyson_m_max=values.dyson.m_max,
        dyson_omegas=values.dyson.omegas,
        dense_dimension=values.limits.dense_dimension,
        condition=values.limits.condition,
        walk_order=values.limits.walk_order,
    )


def build_configuration(config_path=None, preset=None, overrides=None,
                        user=True, env=True):
    """Stack the configuration sources for one run.

    `overrides` is a mapping of dotted keys (``analyses.chi``) to
    values; `None` values are skipped. A preset named in the config
    file applies when no `preset` is passed.
    """
    from . import presets

    config = confuse.Configuration(APPNAME, __name__.split('.')[0],
                                   read=False)
    config.read(user=user, defaults=True)

    source = None
    if config_path:
        source = load_source(config_path)
        config.set(source)
        log.debug(u'read configuration from %s', source.filename)
        if preset is None:
            preset = source.get('preset')

    if preset:
        if source is not None and 'ensemble' in source:
            log.info(u'preset %s overrides the ensemble in %s',
                     preset, source.filename)
            del source['ensemble']
        config.set(presets.preset_source(preset))

    if env:
        config.set_env()
    if overrides:
        config.set_args(dict(overrides), dots=True)
    return config
