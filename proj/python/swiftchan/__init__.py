# SPDX-License-Identifier: Apache-2.0
"""Adaptive mmWave channel-estimation simulator.

Thin Python surface over the C++ core: codebook construction, the
spike-and-Gaussian denoiser and estimator, the exact-posterior oracle,
rate accounting, and the Monte Carlo sweep driver.
"""

from ._core import (
    build_codebook,
    denoise_input,
    effective_rate,
    exact_mmse,
    feedback_bits,
    gamp_dense,
    selftest,
    steering_vector,
    sweep_csv,
    trial_rows,
)

__version__ = "1.0.0"

__all__ = [
    "build_codebook",
    "denoise_input",
    "effective_rate",
    "exact_mmse",
    "feedback_bits",
    "gamp_dense",
    "selftest",
    "steering_vector",
    "sweep_csv",
    "trial_rows",
    "__version__",
]
