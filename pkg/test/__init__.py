import os
import math
import shutil
import tempfile

import confuse
import numpy as np

from polarfrac import model


def _root(*sources):
    return confuse.RootView([confuse.ConfigSource.of(s) for s in sources])


class TempDir(object):
    """Context manager that creates and destroys a temporary directory.
    """
    def __init__(self):
        self.path = tempfile.mkdtemp()

    def __enter__(self):
        return self

    def __exit__(self, *errstuff):
        shutil.rmtree(self.path)

    def sub(self, name, contents=None):
        """Get a path to a file named `name` inside this temporary
        directory. If `contents` is provided, then the text or
        bytestring is written to the file.
        """
        path = os.path.join(self.path, name)
        if contents:
            if isinstance(contents, str):
                contents = contents.encode('utf-8')
            with open(path, 'wb') as f:
                f.write(contents)
        return path

    def read(self, name):
        with open(os.path.join(self.path, name), 'rb') as f:
            return f.read()


# Ensembles.


def two_level(count=2, collective=0.1, omega=1.0, kappa=0.1, gamma=0.1):
    """N two-level molecules resonant with the cavity."""
    species = model.SpeciesSpec(count, (0.0,), (omega,), ((1.0,),))
    return model.EnsembleSpec(model.CavitySpec(omega, kappa), (species,),
                              collective / math.sqrt(count), gamma)


def three_level(count=10, collective=0.8, overlaps=(0.98, 0.19899),
                vibration=1.0, gap=10.0, kappa=0.1, gamma=0.1):
    """One vibrational mode per molecule, the cavity resonant with the
    electronic transition.
    """
    species = model.SpeciesSpec(count, (0.0, vibration), (gap,),
                                (tuple(overlaps),))
    return model.EnsembleSpec(model.CavitySpec(gap, kappa), (species,),
                              collective / math.sqrt(count), gamma)


def fig2a(count=10):
    return three_level(count)


def fig2b(count=25):
    species = tuple(
        model.SpeciesSpec(count, (0.0, vibration), (10.0,),
                          ((0.98, 0.19899),))
        for vibration in (1.0, 1.2))
    return model.EnsembleSpec(model.CavitySpec(10.0, 0.05), species,
                              0.6 / math.sqrt(2 * count), 0.05)


def _random_species(rng, count):
    m_ground = int(rng.integers(1, 4))
    m_excited = int(rng.integers(1, 3))
    ground = np.cumsum(rng.uniform(0.5, 1.5, m_ground)) - 0.5
    ground -= ground[0]
    excited = 10.0 + np.cumsum(rng.uniform(0.5, 1.5, m_excited))
    rows = []
    for _ in range(m_excited):
        row = rng.normal(size=m_ground) + 1j * rng.normal(size=m_ground)
        row *= rng.uniform(0.3, 1.0) / np.linalg.norm(row)
        rows.append(tuple(row))
    return model.SpeciesSpec(count, tuple(ground), tuple(excited),
                             tuple(rows))


def random_spec(rng, max_dimension=500):
    """A random ensemble with 1-2 species, N ≤ 6, M_g ≤ 3, M_e ≤ 2,
    λ√N ≤ ω_v and a dense dimension of at most `max_dimension`.
    """
    while True:
        n_species = int(rng.integers(1, 3))
        total = int(rng.integers(n_species, 7))
        cuts = sorted(rng.choice(np.arange(1, total), n_species - 1,
                                 replace=False)) if n_species > 1 else []
        counts = np.diff([0] + list(cuts) + [total])
        species = tuple(_random_species(rng, int(c)) for c in counts)
        gaps = [g for s in species for g in s.vibrational_gaps()] or [1.0]
        collective = rng.uniform(0.1, 1.0) * min(gaps)
        spec = model.EnsembleSpec(
            model.CavitySpec(species[0].excited_levels[0]
                             + rng.uniform(-0.5, 0.5),
                             rng.uniform(0.05, 0.2)),
            species, collective / math.sqrt(total), rng.uniform(0.05, 0.2))
        if model.dense_dimension(spec) <= max_dimension:
            return spec


def spec_grid(spec, points=64):
    low = spec.electronic_gap - 3.0
    high = spec.electronic_gap + 3.0 + max(spec.vibrational_gaps() or (0,))
    return np.linspace(low, high, points)
