"""The ``polarfrac`` batch command.

Each subcommand stacks the configuration, validates it into a
`RunConfig`, runs the engines and writes plot-ready CSV and JSON files
plus a ``manifest.json`` into the output directory.
"""
import os
import sys
import json
import logging
import argparse
import itertools

import numpy as np
import scipy
import confuse

from . import __version__
from . import chi
from . import engines
from . import spectra
from . import presets
from . import diagrams
from . import templates
from .util import atomic_write
from .config import build_configuration, load_run_config
from .exceptions import (EngineSelectionError, SpecError, DepthRangeError,
                         SizingError, NumericError)

__all__ = ['main', 'build_parser', 'run_spectrum', 'run_compare', 'run_chi',
           'run_dyson', 'run_modes', 'write_manifest']

log = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

COMMANDS = (
    ('spectrum', u'compute D(ω) and A/T/R spectra for every engine'),
    ('compare', u'report relative differences between engines'),
    ('chi', u'tabulate the χ(1), χ(3) and χ(5) susceptibilities'),
    ('dyson', u'enumerate and evaluate Dyson-series walks'),
    ('modes', u'list zeroth- and higher-order polariton modes'),
)


# Helpers.


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True,
                      ensure_ascii=False) + '\n'


def _write(config, name, text):
    path = os.path.join(config.out, name)
    atomic_write(path, text)
    log.info(u'wrote %s', path)
    return name


def _green(config, engine, spec, omegas):
    if engine.kind is engines.EngineKind.DYSON \
            and engine.order > config.walk_order:
        raise DepthRangeError(u'Dyson order', engine.order, 0,
                              config.walk_order)
    green = engines.evaluate(engine, spec, omegas, config.threads,
                             config.condition, config.dense_dimension)
    if green.failed:
        raise NumericError(
            u'{0} (N={1}): linear solves failed at {2} frequencies'.format(
                engine.label, spec.n_molecules, len(green.failed)))
    return green


def _label(engine, spec):
    return u'{0}_N{1}'.format(engine.slug, spec.n_molecules)


# Subcommands.


def run_spectrum(config):
    """Write one spectrum CSV per engine and N, then the enabled
    analyses. Returns the names of the files written.
    """
    analyses = config.analyses
    omegas = config.resolved_grid().omegas()
    written, tables, sums = [], {}, {}
    for spec in config.ensembles():
        for engine in config.engines:
            green = _green(config, engine, spec, omegas)
            spectrum = spectra.compute_spectrum(green, spec.cavity.kappa)
            label = _label(engine, spec)
            written.append(_write(
                config, u'spectrum_{0}.csv'.format(label),
                spectra.spectrum_csv(green, spectrum)))
            if analyses.peaks:
                tables[label] = spectra.find_peaks(
                    spectrum, config.min_height, config.min_prominence)
            if analyses.sum_rule and engine.passive:
                sums[label] = spectra.sum_rule(green, spec.cavity)

    if analyses.peaks:
        written.append(_write(config, 'peaks.json',
                              spectra.peaks_json(tables)))
    if analyses.modes:
        written += run_modes(config)
    if analyses.sum_rule:
        written.append(_write(config, 'sum_rule.json', _dump(sums)))
    if analyses.chi:
        written += run_chi(config)
    if analyses.dyson:
        written += run_dyson(config)
    return written


def _pair_entry(spec, result, reference):
    difference = np.abs(result.values - reference.values)
    scale = np.max(np.abs(reference.values))
    return {
        'N': spec.n_molecules,
        'engines': [result.engine.label, reference.engine.label],
        'max_abs': float(np.max(difference)),
        'max_relative': float(np.max(difference) / scale),
        'mean_relative': float(np.mean(difference) / scale),
    }


def run_compare(config):
    """Compare every pair of engines; the earlier engine of a pair is
    the reference. With an N sweep, fit the power law of each pair's
    maximum difference in N.
    """
    if len(config.engines) < 2:
        raise EngineSelectionError(
            u'compare needs at least two engines, got {0}'.format(
                u', '.join(e.label for e in config.engines)))
    omegas = config.resolved_grid().omegas()
    pairs = []
    for spec in config.ensembles():
        results = [_green(config, e, spec, omegas) for e in config.engines]
        for reference, result in itertools.combinations(results, 2):
            pairs.append(_pair_entry(spec, result, reference))

    report = {'pairs': pairs}
    if len(config.sweep_N) >= 2:
        scaling = []
        for reference, result in itertools.combinations(config.engines, 2):
            labels = [result.label, reference.label]
            rows = [p for p in pairs if p['engines'] == labels]
            n = np.array([p['N'] for p in rows], dtype=float)
            size = np.array([p['max_abs'] for p in rows])
            entry = {'engines': labels, 'N': [p['N'] for p in rows],
                     'max_abs': size.tolist(), 'exponent': None}
            if np.all(size > 0):
                slope, _ = np.polyfit(np.log(n), np.log(size), 1)
                entry['exponent'] = float(slope)
            scaling.append(entry)
        report['scaling'] = scaling
    return [_write(config, 'compare.json', _dump(report))]


def run_chi(config):
    spec = config.ensemble
    rows = chi.chi_table(spec, config.resolved_grid().omegas())
    return [_write(config, 'chi.csv', chi.chi_csv(rows))]


def run_dyson(config):
    if config.dyson_m_max > config.walk_order:
        raise DepthRangeError(u'dyson.m_max', config.dyson_m_max, 0,
                              config.walk_order)
    omegas = config.dyson_omegas or config.resolved_grid().omegas()
    text = diagrams.dyson_json(config.ensemble, omegas, config.dyson_m_max)
    return [_write(config, 'dyson.json', text)]


def run_modes(config):
    modes = {}
    for spec in config.ensembles():
        modes[u'N{0}'.format(spec.n_molecules)] = [
            spectra.polariton_modes(spec, order)
            for order in config.mode_orders
            if order <= spec.n_molecules]
    return [_write(config, 'modes.json', spectra.modes_json(modes))]


RUNNERS = {
    'spectrum': run_spectrum,
    'compare': run_compare,
    'chi': run_chi,
    'dyson': run_dyson,
    'modes': run_modes,
}


def versions():
    return {
        'polarfrac': __version__,
        'confuse': confuse.__version__,
        'numpy': np.__version__,
        'scipy': scipy.__version__,
    }


def write_manifest(config, outputs):
    """Write ``manifest.json``: the run echo plus the spec hash, package
    versions and output files. Nothing time-dependent is recorded.
    """
    document = {
        'run': config.to_dict(),
        'manifest': {
            'spec_hash': config.ensemble.spec_hash,
            'preset': config.preset,
            'versions': versions(),
            'outputs': sorted(outputs),
        },
    }
    return _write(config, 'manifest.json', _dump(document))


def write_preset(name, out):
    """Write ``<out>/<name>.yaml``, a run file for preset `name`."""
    path = os.path.join(out, u'{0}.yaml'.format(name))
    atomic_write(path, presets.preset_yaml(name))
    log.info(u'wrote %s', path)
    return path


# Command line.


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', metavar='PATH',
                        help='run or ensemble file (YAML or JSON)')
    common.add_argument('--preset', metavar='NAME',
                        help='start from a built-in preset ({0})'.format(
                            ', '.join(presets.preset_names())))
    common.add_argument('--grid', metavar='MIN:MAX:POINTS',
                        help='frequency grid')
    common.add_argument('--engines', metavar='LIST',
                        help='comma-separated engine labels')
    common.add_argument('--out', metavar='DIR', help='output directory')
    common.add_argument('--sweep-N', dest='sweep_N', metavar='LIST',
                        help='molecule numbers to sweep at fixed λ√N')
    common.add_argument('--threads', type=int, metavar='K',
                        help='worker threads per frequency sweep')
    common.add_argument('--verbose', '-v', action='store_true',
                        help='print debugging messages')
    common.add_argument('--quiet', '-q', action='store_true',
                        help='only print warnings and errors')

    parser = argparse.ArgumentParser(
        prog='polarfrac',
        description='photon Green\'s functions of molecular polaritons')
    parser.add_argument('--version', action='version',
                        version='%(prog)s {0}'.format(__version__))
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True
    for name, text in COMMANDS:
        commands.add_parser(name, parents=[common], help=text)

    preset = commands.add_parser('preset', help='write a preset run file')
    preset.add_argument('name', help='preset name')
    preset.add_argument('--out', metavar='DIR', help='output directory')
    preset.add_argument('--verbose', '-v', action='store_true')
    preset.add_argument('--quiet', '-q', action='store_true')
    return parser


def _overrides(args):
    return {
        'grid': args.grid,
        'engines': args.engines,
        'out': args.out,
        'sweep_N': args.sweep_N,
        'threads': args.threads,
    }


def _setup_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level,
                        format='%(levelname)s %(name)s: %(message)s')
    logging.captureWarnings(True)


def run(args):
    if args.command == 'preset':
        config = build_configuration(overrides={'out': args.out})
        out = config['out'].get(templates.Text())
        write_preset(args.name, out)
        return

    config = build_configuration(args.config, args.preset,
                                 _overrides(args))
    run_config = load_run_config(config)
    log.debug(u'ensemble %s with N=%d, engines %s',
              run_config.ensemble.spec_hash,
              run_config.ensemble.n_molecules,
              u', '.join(e.label for e in run_config.engines))
    outputs = RUNNERS[args.command](run_config)
    write_manifest(run_config, outputs)


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    try:
        run(args)
    except (confuse.ConfigError, SpecError, DepthRangeError,
            SizingError) as exc:
        log.error(u'configuration error: %s', exc)
        return EXIT_CONFIG
    except NumericError as exc:
        log.error(u'numeric failure: %s', exc)
        return EXIT_NUMERIC
    except OSError as exc:
        log.error(u'%s', exc)
        return EXIT_IO
    return 0


if __name__ == '__main__':
    sys.exit(main())
