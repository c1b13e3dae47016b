"""Uniform periodic grids and sampled functions on them.

Every solver in the package works on tori: velocity boxes [-L/2, L/2) and
position domains [0, L). A grid is just (length, n); nodes are cell centers
of a uniform partition, so sums times the spacing are midpoint quadratures.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class AlphaParams:
    """Stability exponent and spatial dimension of the fractional operator."""

    alpha: float
    dim: int = 1

    def __post_init__(self):
        if not 1.0 <= self.alpha <= 2.0:
            raise ValidationError(f"alpha must lie in [1, 2], got {self.alpha}")
        if self.dim < 1:
            raise ValidationError(f"dim must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class PeriodicGrid1D:
    """n uniform nodes covering a periodic interval of the given length.

    `centered` grids span [-L/2, L/2) (velocity boxes); otherwise [0, L)
    (position domains).
    """

    length: float
    n: int
    centered: bool = True

    def __post_init__(self):
        if self.length <= 0:
            raise ValidationError(f"grid length must be positive, got {self.length}")
        if self.n < 8:
            raise ValidationError(f"grid needs at least 8 nodes, got {self.n}")
        if self.n & (self.n - 1):
            raise ValidationError(f"grid size must be a power of two, got {self.n}")

    @property
    def spacing(self):
        return self.length / self.n

    @property
    def nodes(self):
        start = -0.5 * self.length if self.centered else 0.0
        return start + self.spacing * np.arange(self.n)

    def wavenumbers(self):
        """Signed discrete wavenumbers 2*pi*m/L in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)

    def rfft_wavenumbers(self):
        """Nonnegative wavenumbers matching numpy.fft.rfft layout."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.spacing)

    def wrap(self, x):
        """Map arbitrary coordinates into the fundamental domain."""
        start = -0.5 * self.length if self.centered else 0.0
        return np.mod(np.asarray(x) - start, self.length) + start


@dataclass
class GridFunction:
    """Real samples of a function at the nodes of a periodic grid."""

    grid: PeriodicGrid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValidationError(
                f"values shape {self.values.shape} does not match grid size {self.grid.n}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("GridFunction values must be finite")


def periodic_gradient(values, spacing):
    """Second-order central difference on a periodic array."""
    return (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * spacing)


def periodic_second_derivative(values, spacing):
    """Second-order central second difference on a periodic array."""
    return (np.roll(values, -1) - 2.0 * values + np.roll(values, 1)) / spacing**2
