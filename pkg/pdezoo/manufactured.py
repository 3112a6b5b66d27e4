import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from autodiff.tape import Tape
from jetnet.jets import Jet, JetOrderSpec, constant_jet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Mode:
    """amplitude * sin(2 pi <xi, x> + phase) * exp(-decay * t)."""

    amplitude: float
    xi: Tuple[float, ...]
    phase: float = 0.0
    decay: float = 0.0


@dataclass(frozen=True)
class ScalarField:
    modes: Tuple[Mode, ...] = ()
    constant: float = 0.0
    time_slope: float = 0.0

    def derivative(self, key: str, points: np.ndarray, variables: str) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        space, t = points[:, :-1], points[:, -1]
        time_order = key.count("t")
        spatial = [v for v in key if v != "t"]
        out = np.zeros(points.shape[0])
        if key == "":
            out += self.constant + self.time_slope * t
        elif key == "t":
            out += self.time_slope
        for mode in self.modes:
            xi = np.asarray(mode.xi, dtype=np.float64)
            theta = 2.0 * np.pi * space @ xi + mode.phase + len(spatial) * np.pi / 2.0
            chain = np.prod([2.0 * np.pi * xi[variables.index(v)] for v in spatial]) if spatial else 1.0
            out += mode.amplitude * chain * np.sin(theta) * (-mode.decay) ** time_order * np.exp(-mode.decay * t)
        return out


@dataclass(frozen=True)
class ManufacturedField:
    """Analytic fields with exact jets, one ScalarField per network output."""

    outputs: Tuple[ScalarField, ...] = field(default_factory=tuple)

    @classmethod
    def single(cls, *modes: Mode, constant: float = 0.0, time_slope: float = 0.0) -> "ManufacturedField":
        return cls((ScalarField(tuple(modes), constant, time_slope),))

    @classmethod
    def stream_vorticity(cls, *modes: Mode) -> "ManufacturedField":
        """(psi, omega) with omega = -lap(psi) = 4 pi^2 |xi|^2 psi per mode."""
        vorticity = tuple(
            Mode(m.amplitude * 4.0 * np.pi**2 * float(np.dot(m.xi, m.xi)), m.xi, m.phase, m.decay) for m in modes
        )
        return cls((ScalarField(tuple(modes)), ScalarField(vorticity)))

    def values(self, points: np.ndarray, spec: JetOrderSpec) -> dict:
        variables = spec.variables
        return {
            key: np.stack([f.derivative(key, points, variables) for f in self.outputs], axis=1) for key in spec.keys()
        }

    def jet(self, tape: Tape, points: np.ndarray, spec: JetOrderSpec) -> Jet:
        return Jet(constant_jet(tape, self.values(points, spec), spec), spec)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        spatial_dims = np.asarray(points).shape[1] - 1
        variables = "xt" if spatial_dims == 1 else "xyt"
        return np.stack([f.derivative("", points, variables) for f in self.outputs], axis=1)


def plane_wave(amplitude: float, xi: Sequence[float], phase: float = 0.0, decay: float = 0.0) -> Mode:
    return Mode(float(amplitude), tuple(float(v) for v in xi), float(phase), float(decay))
