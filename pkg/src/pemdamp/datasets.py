"""Measured data of the five-transducer cantilever prototype."""

from __future__ import annotations

import math

import numpy as np

#: First-mode couplings gamma_j, transducers ordered from the clamp.  The
#: raw row (``TABLE1_GAMMA_AS_PRINTED``) has the last four entries one decade
#: low; it gives a first-mode network coupling of 0.0888 instead of the
#: 0.167 behind the reference optimum, so the decade-corrected row is the default.
TABLE1_GAMMA = np.array([122.0, 95.4, 57.7, 29.8, 0.83]) * 1e-3
TABLE1_GAMMA_AS_PRINTED = np.array([122.0, 9.54, 5.77, 2.98, 0.083]) * 1e-3

#: Transducer capacitances [F].
TABLE2_CAPACITANCE = np.array([51.30, 53.75, 53.36, 52.92, 52.90]) * 1e-9

#: Short-circuit first natural frequency [Hz].
F1_HZ = 20.44
OMEGA1 = 2 * math.pi * F1_HZ

#: Geometry [m]: beam length, width, thickness; patch length, width,
#: thickness; patch gap; actuator offset from the clamp.
TABLE3_GEOMETRY = {
    "l": 273.6e-3,
    "w_b": 19.5e-3,
    "h_b": 1.90e-3,
    "l_p": 35.6e-3,
    "w_p": 17.8e-3,
    "h_p": 0.27e-3,
    "d": 10.0e-3,
    "d_a": 5.0e-3,
}

#: Nominal circuit components.
TABLE4_DEBOO = {"R": 2.7e3, "C": 17.9e-6, "L": 130.5}
TABLE4_ANTONIOU = {"R1": 3e3, "R2": 1e3, "R3": 0.0, "R4": 1e3, "R6": 198.0, "C5": 32e-6, "L5": 19.01}

#: Reference design values checked by the verification suite.
REFERENCE = {
    "L_opt": 139.1,
    "R_opt_rl": 123.2e3,
    "R_opt_r": 17.6e3,
    "gamma_max": 0.167,
    "fixed_point_spacing_hz": 2.41,
    "f_F_hz": 20.58,
    "performance_ratio": 8.53,
    "observed_ratio": 6.82,
    "L5_opt": 19.01,
}
