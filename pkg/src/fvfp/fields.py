"""External force fields E(t, x) with recorded sup-norm bounds.

All presets are time-independent and periodic in x; the evaluate signature
keeps t so tabulated or future time-dependent fields share the interface.
The recorded bounds (sup |E|, sup |dE/dx|) back the entropy certificates.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .grids import PeriodicGrid1D


@dataclass(frozen=True)
class ForceField:
    kind: str
    amplitude: float = 0.0
    wavenumber: float = 1.0
    phase: float = 0.0
    xgrid: PeriodicGrid1D | None = None
    table: np.ndarray | None = field(default=None, repr=False)
    sup_e: float = 0.0
    sup_dx_e: float = 0.0

    @staticmethod
    def zero():
        return ForceField(kind="zero")

    @staticmethod
    def constant(amplitude):
        return ForceField(kind="constant", amplitude=amplitude, sup_e=abs(amplitude))

    @staticmethod
    def sinusoidal(amplitude, wavenumber=1.0, phase=0.0):
        return ForceField(
            kind="sinusoidal",
            amplitude=amplitude,
            wavenumber=wavenumber,
            phase=phase,
            sup_e=abs(amplitude),
            sup_dx_e=abs(amplitude * wavenumber),
        )

    @staticmethod
    def tabulated(xgrid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (xgrid.n,):
            raise ValidationError("tabulated field must have one value per grid node")
        if not np.all(np.isfinite(values)):
            raise ValidationError("tabulated field values must be finite")
        grad = (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * xgrid.spacing)
        return ForceField(
            kind="tabulated",
            xgrid=xgrid,
            table=values,
            sup_e=float(np.max(np.abs(values))),
            sup_dx_e=float(np.max(np.abs(grad))),
        )

    @property
    def w1inf_norm(self):
        return max(self.sup_e, self.sup_dx_e)

    def evaluate(self, t, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "constant":
            return np.full_like(x, self.amplitude)
        if self.kind == "sinusoidal":
            return self.amplitude * np.sin(self.wavenumber * x + self.phase)
        if self.kind == "tabulated":
            g = self.xgrid
            pos = (x - g.nodes[0]) / g.spacing
            i0 = np.floor(pos).astype(int) % g.n
            frac = pos - np.floor(pos)
            i1 = (i0 + 1) % g.n
            return (1.0 - frac) * self.table[i0] + frac * self.table[i1]
        raise ValidationError(f"unknown field kind {self.kind!r}")


def parse_field_spec(spec):
    """CLI field syntax: zero | const:A | sin:A[,k[,phase]]."""
    if spec == "zero":
        return ForceField.zero()
    head, _, rest = spec.partition(":")
    try:
        if head == "const":
            return ForceField.constant(float(rest))
        if head == "sin":
            parts = [float(p) for p in rest.split(",")]
            if not 1 <= len(parts) <= 3:
                raise ValueError
            return ForceField.sinusoidal(*parts)
    except ValueError:
        pass
    raise ValidationError(
        f"cannot parse field spec {spec!r}; expected zero, const:A or sin:A[,k[,phase]]"
    )


def field_to_dict(f: ForceField) -> dict:
    d = {"kind": f.kind}
    if f.kind == "constant":
        d["amplitude"] = f.amplitude
    elif f.kind == "sinusoidal":
        d.update(amplitude=f.amplitude, wavenumber=f.wavenumber, phase=f.phase)
    elif f.kind == "tabulated":
        raise ValidationError("tabulated fields are not serializable to study configs")
    return d


def field_from_dict(d: dict) -> ForceField:
    kind = d.get("kind")
    if kind == "zero":
        return ForceField.zero()
    if kind == "constant":
        return ForceField.constant(float(d["amplitude"]))
    if kind == "sinusoidal":
        return ForceField.sinusoidal(
            float(d["amplitude"]), float(d.get("wavenumber", 1.0)), float(d.get("phase", 0.0))
        )
    raise ValidationError(f"field.kind: unknown kind {kind!r}")
