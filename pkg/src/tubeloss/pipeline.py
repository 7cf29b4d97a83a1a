"""Four-microphone spectra to acoustic indicators in one call."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AirProperties, ComplexSpectrum, DEFAULT_AIR, TubeGeometry
from .decompose import PlaneWaveAmplitudes, decompose_four_mic
from .transfer import (
    AcousticIndicators,
    TransferMatrix,
    acoustic_indicators,
    anechoic_quality,
    boundary_states,
    reconstruct_one_load,
    stl_direct_anechoic,
)

__all__ = ["TubeAnalysis", "analyze_four_mic"]


@dataclass(frozen=True)
class TubeAnalysis:
    """All intermediate and final products of one tube measurement."""

    amplitudes: PlaneWaveAmplitudes
    matrix: TransferMatrix
    indicators: AcousticIndicators
    stl_direct_db: np.ndarray
    anechoic_ratio: np.ndarray


def analyze_four_mic(
    p1: ComplexSpectrum,
    p2: ComplexSpectrum,
    p3: ComplexSpectrum,
    p4: ComplexSpectrum,
    geometry: TubeGeometry,
    air: AirProperties = DEFAULT_AIR,
    quality_threshold: float = 0.01,
) -> TubeAnalysis:
    """Run decomposition, matrix reconstruction, and indicator extraction.

    The matrix route is the primary result; the direct anechoic route
    20 log10 |A/C| is carried along as a cross-check and warns when the
    termination quality assumption is violated.
    """
    amplitudes = decompose_four_mic(p1, p2, p3, p4, geometry, air)
    state_in, state_out = boundary_states(amplitudes, geometry.sample_thickness, air)
    matrix = reconstruct_one_load(state_in, state_out)
    indicators = acoustic_indicators(matrix, geometry.sample_thickness, air)
    direct = stl_direct_anechoic(amplitudes, quality_threshold)
    return TubeAnalysis(
        amplitudes=amplitudes,
        matrix=matrix,
        indicators=indicators,
        stl_direct_db=direct,
        anechoic_ratio=anechoic_quality(amplitudes),
    )
