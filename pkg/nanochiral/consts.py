from pathlib import Path
import os

from scipy import constants

PACKAGE_DIR = Path(__file__).resolve().parent

DEFAULT_CONFIG_PATH = Path(
    os.environ.get("NANOCHIRAL_CONFIG", PACKAGE_DIR / "defaults.cfg")
).resolve()

OUTPUT_DIR = os.environ.get("NANOCHIRAL_OUTPUT_DIR", ".")

# Fused silica, three-term Sellmeier (wavelength in micrometres)
SELLMEIER_B = (0.6961663, 0.4079426, 0.8974794)
SELLMEIER_C = (0.0684043**2, 0.1162414**2, 9.896161**2)
SELLMEIER_RANGE = (0.2e-6, 2.0e-6)

SINGLE_MODE_CUTOFF = 2.405
# first zero of J1, where the next hybrid modes appear
SECOND_MODE_CUTOFF = 3.832

# Experimental parameters
FIBER_RADIUS = 157.5e-9
WAVELENGTH = 532e-9
PARTICLE_RADIUS = 45e-9
BACKGROUND_FLUX = 22.5e3
KAPPA_F = 21.9e6
PHI0_OFFSET = 6.3
THETA_STEP = 5.0
BEAM_POWER = 265e-6
BEAM_WAIST = 150e-6
DETECTION_EFFICIENCY = 0.46

PHI0_SEARCH_BOUND = 30.0

PLANCK = constants.h
SPEED_OF_LIGHT = constants.c
