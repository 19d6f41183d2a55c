"""Shared random-instance helpers for the test suite."""
import numpy as np

from thermoforge import Spectrum


def random_hermitian(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


def random_antihermitian(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z - z.conj().T) / 2


def random_density(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def random_populations(rng, d):
    p = rng.random(d)
    return p / p.sum()


def random_resonant_spectra(rng, max_s=4, max_c=5, max_energy=3):
    """Small integer energies so degenerate joint blocks occur often."""
    ds = int(rng.integers(2, max_s + 1))
    dc = int(rng.integers(2, max_c + 1))
    es = rng.integers(0, max_energy, size=ds).astype(float)
    ec = rng.integers(0, max_energy, size=dc).astype(float)
    return Spectrum.from_energies(es), Spectrum.from_energies(ec)
