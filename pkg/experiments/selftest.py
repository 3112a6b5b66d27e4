"""Fast numerical self-checks: transforms, Parseval, jets and adjoints."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from autodiff import ops
from autodiff.tape import Tape
from jetnet.jets import JetOrderSpec
from jetnet.networks import JetNetwork, NetworkConfig
from spectral.transforms import DftOperator, ProjectionOperator, dft_forward, naive_dft

logger = logging.getLogger(__name__)

FFT_SIZES = (4, 97, 151, 256, 301, 1024)


@dataclass
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float


def check_fft(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for n in FFT_SIZES:
        values = rng.standard_normal(n)
        tape = Tape()
        transformed = dft_forward(tape.constant(values)).value
        worst = max(worst, float(np.max(np.abs(transformed - naive_dft(values)))))
    return CheckResult("fft_vs_naive_dft", worst <= 1e-10, worst, 1e-10)


def check_parseval(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 512))
        f = rng.standard_normal(n)
        energy = float(np.sum(f**2))
        spectral = float(np.sum(np.abs(dft_forward(Tape().constant(f)).value) ** 2)) / n
        worst = max(worst, abs(energy - spectral) / energy)
    return CheckResult("parseval", worst <= 1e-10, worst, 1e-10)


def _central(f: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def check_jets(rng: np.random.Generator) -> CheckResult:
    """Each jet component against a 4th-order central difference of the component one order below."""
    net = JetNetwork(NetworkConfig(depth=2, width=16, activation="tanh"), 1, rng)
    spec = JetOrderSpec(1, 3, include_time=True, extra_keys=("xt",))
    points = rng.uniform(-1.0, 1.0, size=(10, 2))
    h = 1e-3

    def component(key: str, shifted: np.ndarray) -> np.ndarray:
        tape = Tape()
        return net.forward_jet(net.bind(tape), shifted, spec).component(key).value

    pairs = {"x": ("", 0), "t": ("", 1), "xx": ("x", 0), "xxx": ("xx", 0), "xt": ("x", 1)}
    worst = 0.0
    for key, (lower, column) in pairs.items():
        exact = component(key, points)

        def shifted(step, lower=lower, column=column):
            moved = points.copy()
            moved[:, column] += step
            return component(lower, moved)

        approx = _central(shifted, h)
        worst = max(worst, float(np.max(np.abs(exact - approx) / (np.abs(exact) + 1e-2))))
    return CheckResult("jets_vs_finite_differences", worst <= 1e-4, worst, 1e-4)


def check_adjoints(rng: np.random.Generator) -> CheckResult:
    """<A x, y> = <x, A^H y> for the transform operators, and a tape gradient against finite differences."""
    worst = 0.0
    dft = DftOperator((3, 16), 1)
    matrix = np.exp(-2j * np.pi * rng.standard_normal((5, 12)))
    projection = ProjectionOperator(matrix, 0.25, (3, 12))
    for op in (dft, projection):
        x = rng.standard_normal(op.input_shape) + 1j * rng.standard_normal(op.input_shape)
        y = rng.standard_normal(op.output_shape) + 1j * rng.standard_normal(op.output_shape)
        lhs = np.vdot(y, op.apply(x))
        rhs = np.vdot(op.adjoint(y), x)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))

    values = rng.standard_normal(16)

    def loss(v: np.ndarray):
        tape = Tape()
        leaf = tape.leaf(v)
        return tape, leaf, ops.sum(dft_forward(ops.sin(leaf)).abs2())

    tape, leaf, root = loss(values)
    gradient = tape.backward(root)[leaf.id]
    h = 1e-6
    for i in range(4):
        e = np.zeros_like(values)
        e[i] = h
        fd = (loss(values + e)[2].item() - loss(values - e)[2].item()) / (2 * h)
        worst = max(worst, abs(fd - gradient[i]) / max(abs(fd), 1.0))
    return CheckResult("adjoints", worst <= 1e-6, float(worst), 1e-6)


SUITES: Dict[str, Callable[[np.random.Generator], CheckResult]] = {
    "fft": check_fft,
    "parseval": check_parseval,
    "jets": check_jets,
    "adjoints": check_adjoints,
}


def run_selftest(seed: int = 0) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for name, suite in SUITES.items():
        result = suite(rng)
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"selftest {result.name}: error={result.error:.3e} tolerance={result.tolerance:.1e}")
        results.append(result)
    return results
