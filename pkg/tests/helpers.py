"""Shared test fixtures and independent oracles.

The forward field model here is written with plain per-bin arithmetic on
purpose: it is the reference the vectorized package code is checked against.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from tubeloss import (
    AirProperties,
    ComplexSpectrum,
    FrequencyGrid,
    TransferMatrix,
    TubeGeometry,
    air_gap_matrix,
)

AIR = AirProperties()

# Example geometry used throughout the tests. Spacing 0.08 m keeps the first
# half-wavelength singularity (c / 0.16 = 2145 Hz) above a 100..2000 Hz grid.
GEOMETRY = TubeGeometry(
    mic_positions=(-0.33, -0.25, 0.25, 0.33),
    sample_thickness=0.00089,
    tube_diameter=0.0998,
)


def pressure_at(x: float, k: float, forward: complex, backward: complex) -> complex:
    """Duct pressure F e^{-jkx} + G e^{jkx} at one position and wavenumber."""
    return forward * cmath.exp(-1j * k * x) + backward * cmath.exp(1j * k * x)


def field_spectrum(grid: FrequencyGrid, x: float, forward, backward, air: AirProperties = AIR) -> ComplexSpectrum:
    """Pressure spectrum of a two-wave field at position x, bin by bin."""
    forward = np.broadcast_to(np.asarray(forward, dtype=complex), (len(grid),))
    backward = np.broadcast_to(np.asarray(backward, dtype=complex), (len(grid),))
    values = [
        pressure_at(x, 2.0 * math.pi * f / air.sound_speed, fw, bw)
        for f, fw, bw in zip(grid.frequencies, forward, backward)
    ]
    return ComplexSpectrum(grid, values)


def four_mic_spectra(grid, geometry: TubeGeometry, a, b, c, d, air: AirProperties = AIR):
    """Forward-model spectra at the four microphones for given amplitudes."""
    x1, x2, x3, x4 = geometry.mic_positions
    return (
        field_spectrum(grid, x1, a, b, air),
        field_spectrum(grid, x2, a, b, air),
        field_spectrum(grid, x3, c, d, air),
        field_spectrum(grid, x4, c, d, air),
    )


def limp_mass_stl_oracle(f, m_s: float, air: AirProperties = AIR):
    """Closed-form normal-incidence loss of a limp layer: 10 log10(1 + (w m / 2 rho c)^2)."""
    w = 2.0 * np.pi * np.asarray(f, dtype=float)
    return 10.0 * np.log10(1.0 + (w * m_s / (2.0 * air.impedance)) ** 2)


def air_layer_matrix_oracle(f: float, thickness: float, air: AirProperties = AIR):
    """Analytic air-layer matrix at a single frequency, as a 2x2 list."""
    k = 2.0 * math.pi * f / air.sound_speed
    z = air.impedance
    kl = k * thickness
    return [
        [cmath.cos(kl), 1j * z * cmath.sin(kl)],
        [1j * cmath.sin(kl) / z, cmath.cos(kl)],
    ]


def _series_impedance(grid, resistance, mass):
    """Passive series element: a limp mass with viscous damping, [[1, r + jwm], [0, 1]]."""
    omega = 2.0 * np.pi * grid.frequencies
    n = len(grid)
    return TransferMatrix(
        grid,
        np.ones(n, dtype=complex),
        resistance + 1j * omega * mass,
        np.zeros(n, dtype=complex),
        np.ones(n, dtype=complex),
    )


def _shunt_admittance(grid, conductance, compliance):
    """Passive shunt element: [[1, 0], [g + jwC, 1]]."""
    omega = 2.0 * np.pi * grid.frequencies
    n = len(grid)
    return TransferMatrix(
        grid,
        np.ones(n, dtype=complex),
        np.zeros(n, dtype=complex),
        conductance + 1j * omega * compliance,
        np.ones(n, dtype=complex),
    )


def build_passive_cascade(rng: np.random.Generator, grid) -> tuple[TransferMatrix, float]:
    """Random cascade of passive circuit elements; returns (matrix, gap thickness).

    Every element has unit determinant and non-negative real part in its
    impedance/admittance, so the scattered power can never exceed the
    incident power.
    """
    n_layers = int(rng.integers(1, 6))
    matrix = None
    thickness = 0.0
    for _ in range(n_layers):
        kind = rng.integers(0, 3)
        if kind == 0:
            gap = float(rng.uniform(0.001, 0.05))
            layer = air_gap_matrix(grid, gap, AIR)
            thickness += gap
        elif kind == 1:
            layer = _series_impedance(grid, float(rng.uniform(0.0, 800.0)), float(rng.uniform(0.0, 2.5)))
        else:
            layer = _shunt_admittance(grid, float(rng.uniform(0.0, 0.004)), float(rng.uniform(0.0, 6e-7)))
        matrix = layer if matrix is None else matrix @ layer
    return matrix, thickness


# Surface densities (kg/m^2) and thicknesses (mm) of the measured curtain and
# sheet materials the toolkit is exercised against.
MATERIALS = (
    ("woolen_felt_soft", 1.235, 0.213),
    ("woolen_felt_stiff", 1.922, 0.252),
    ("tango_curtain", 0.57, 0.224),
    ("polyester_hospital_curtain", 0.6, 0.229),
    ("elephant_mat_type1", 2.276, 0.318),
    ("elephant_mat_type2", 1.682, 0.366),
    ("textured_soft_liner", 1.65, 0.644),
    ("pvc_coated_pe_fabric", 0.89, 1.135),
    ("pure_pvc_sheet", 1.012, 1.216),
)
