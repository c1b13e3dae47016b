"""Kinetic toolkit for the fractional Vlasov-Fokker-Planck equation.

Simulates the equation at three levels (Langevin particles, phase-space
grid, macroscopic density) and verifies its anomalous advection-diffusion
limit as the Knudsen number goes to zero, including the critical exponents
alpha = 1 and alpha = 2.
"""

__version__ = "0.1.0"
