"""Physical constants and shared defaults (SI units throughout)."""

# CODATA 2018 exact values.
K_B = 1.380649e-23  # Boltzmann constant, J/K
SIGMA_SB = 5.670374419e-8  # Stefan-Boltzmann constant, W m^-2 K^-4

# Conventional values used by the mission-level requirements this package
# reproduces; kept at their quoted precision on purpose.
G_STD = 9.8  # local gravity scale used to express accelerations "per g", m/s^2
T_DEEP_SPACE_K = 2.7  # effective sky temperature seen by the radiators, K

# Dry-air refractivity reference state for the pressure-sensitivity model.
P_REF_PA = 101325.0
T_REF_K = 288.15

DEFAULT_WAVELENGTH_M = 1.542e-6
SECONDS_PER_DAY = 86400.0
