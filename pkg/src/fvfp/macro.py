"""Solver for the limiting advection + fractional-diffusion equation.

d/dt rho + d/dx (E rho) + (-Delta)^(alpha/2) rho = 0 on a periodic domain.

Strang composition per step: half fractional diffusion (exact spectral
multiplier exp(-dt |k|^alpha / 2)) around a conservative semi-Lagrangian
advection substep. The advection remaps cumulative cell masses through the
backward characteristics with a monotone cubic interpolant, so it conserves
mass to roundoff and preserves positivity; spatially constant fields take
an exact spectral translation instead.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import NumericalGuardError, ValidationError
from .fields import ForceField
from .grids import PeriodicGrid1D


@dataclass
class DensityField:
    xgrid: PeriodicGrid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.xgrid.n,):
            raise ValidationError("density values must match the grid size")

    def mass(self):
        return float(self.values.sum() * self.xgrid.spacing)


@dataclass
class MacroTrajectory:
    times: list
    snapshots: list  # DensityField at the checkpoint times

    def final(self) -> DensityField:
        return self.snapshots[-1]


def _diffusion_multiplier(xgrid, alpha, dt):
    k = np.abs(xgrid.rfft_wavenumbers())
    return np.exp(-dt * k**alpha)


def _advect_conservative(rho, xgrid, field, t_mid, dt):
    """Flux-form semi-Lagrangian step for d/dx (E rho)."""
    n, dx = xgrid.n, xgrid.spacing
    edges = xgrid.nodes - 0.5 * dx
    # midpoint backward characteristic, second order in dt
    e_half = field.evaluate(t_mid, edges)
    depart = edges - dt * field.evaluate(t_mid, xgrid.wrap(edges - 0.5 * dt * e_half))
    masses = rho * dx
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    total = cum[-1]
    # periodic extension of the cumulative mass, wide enough for the CFL guard
    ext = 2
    xs = edges[0] + dx * np.arange(-ext * n, (ext + 1) * n + 1)
    cs = np.concatenate(
        [cum[:-1] + j * total for j in range(-ext, ext + 1)] + [[(ext + 1) * total]]
    )
    interp = PchipInterpolator(xs, cs, extrapolate=False)
    m_depart = interp(depart)
    m_next = interp(np.concatenate([depart[1:], [depart[0] + xgrid.length]]))
    new_masses = m_next - m_depart
    return new_masses / dx


def _advect_translation(rho, xgrid, shift):
    k = xgrid.rfft_wavenumbers()
    return np.fft.irfft(np.fft.rfft(rho) * np.exp(-1j * k * shift), n=xgrid.n)


def solve_macro(
    rho0: DensityField,
    field: ForceField,
    t_final: float,
    dt: float,
    alpha: float,
    checkpoint_times=None,
) -> MacroTrajectory:
    """Evolve the macroscopic density and record checkpoint snapshots."""
    if t_final <= 0:
        raise ValidationError(f"t_final must be positive, got {t_final}")
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    grid = rho0.xgrid
    if np.min(rho0.values) < -1e-8 * max(np.max(rho0.values), 1e-300):
        raise ValidationError("initial density must be nonnegative")
    if abs(rho0.mass() - 1.0) > 1e-6:
        raise ValidationError(f"initial density mass {rho0.mass():.6f} is not 1")
    if field.sup_e * dt > grid.length / 2.0:
        raise NumericalGuardError(
            "advection CFL guard: |E|*dt exceeds half the domain; reduce dt"
        )

    n_steps = max(1, int(round(t_final / dt)))
    dt = t_final / n_steps
    if checkpoint_times is None:
        checkpoint_times = [0.25 * t_final, 0.5 * t_final, t_final]
    checkpoint_steps = sorted({min(n_steps, max(1, int(round(tc / dt)))) for tc in checkpoint_times})

    half = _diffusion_multiplier(grid, alpha, 0.5 * dt)
    rho = rho0.values.copy()
    t = rho0.time
    times, snaps = [t], [DensityField(grid, rho.copy(), t)]
    translating = field.kind in ("zero", "constant")
    for step in range(1, n_steps + 1):
        rho = np.fft.irfft(np.fft.rfft(rho) * half, n=grid.n)
        if translating:
            rho = _advect_translation(rho, grid, field.amplitude * dt)
        else:
            rho = _advect_conservative(rho, grid, field, t + 0.5 * dt, dt)
        rho = np.fft.irfft(np.fft.rfft(rho) * half, n=grid.n)
        t = rho0.time + step * dt
        if step in checkpoint_steps:
            times.append(t)
            snaps.append(DensityField(grid, rho.copy(), t))
    return MacroTrajectory(times, snaps)


def stable_kernel_oracle(t: float, alpha: float, xgrid: PeriodicGrid1D) -> DensityField:
    """Periodized fundamental solution: inverse transform of exp(-t |k|^alpha)."""
    if t <= 0:
        raise ValidationError(f"kernel time must be positive, got {t}")
    k = np.abs(xgrid.rfft_wavenumbers())
    vals = np.fft.irfft(np.exp(-t * k**alpha), n=xgrid.n) * (xgrid.n / xgrid.length)
    if xgrid.centered:
        vals = np.roll(vals, xgrid.n // 2)  # peak at the v = 0 node
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum() * xgrid.spacing
    return DensityField(xgrid, vals, t)
