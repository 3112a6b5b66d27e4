import numpy as np
import pytest

from analysis.alignment import gradient_alignment
from analysis.metrics import error_power_spectrum, relative_l2
from analysis.ntk import ntk_probe, residual_jacobian, spectral_residual_on
from analysis.psd import STATS_COLUMNS, FrequencyStats, PsdCurve, frequency_stats, percentile_frequency, radial_psd
from analysis.reports import write_eigenvalues_csv, write_error_power_csv, write_modes_csv, write_stats_csv
from autodiff.tape import Tape
from common.errors import NumericalError, ParameterBudgetError, ShapeError
from jetnet.networks import JetNetwork, NetworkConfig
from losses.fourier import grid_basis
from spectral.symbols import SpectralSymbol
from spectral.weights import weight_build

TIMES = [0.5]


@pytest.fixture
def probe_net():
    return JetNetwork(NetworkConfig(depth=2, width=8, activation="tanh"), 1, np.random.default_rng(11))


def test_relative_l2():
    ref = np.array([[3.0, 4.0]])
    assert relative_l2(ref, ref) == 0.0
    assert relative_l2(ref, np.zeros_like(ref)) == pytest.approx(1.0)
    assert relative_l2(ref, np.array([[3.0, 4.5]])) == pytest.approx(0.1)


def test_relative_l2_rejects_bad_input():
    with pytest.raises(ShapeError):
        relative_l2(np.ones((2, 3)), np.ones((3, 2)))
    with pytest.raises(NumericalError):
        relative_l2(np.zeros(4), np.ones(4))


def test_error_power_of_a_single_cosine():
    n, length = 32, 2.0
    x = np.arange(n) * length / n
    error = np.tile(np.cos(2 * np.pi * 3 * x / length), (4, 1))
    curve = error_power_spectrum(np.zeros_like(error), error, lengths=[length])
    np.testing.assert_allclose(curve.wavenumbers, np.arange(17) / length)
    expected = np.zeros(17)
    expected[3] = 0.25
    np.testing.assert_allclose(curve.power, expected, atol=1e-14)


def test_error_power_in_two_dimensions():
    error = np.random.default_rng(0).normal(size=(2, 8, 8))
    curve = error_power_spectrum(np.zeros_like(error), error)
    assert curve.wavenumbers[0] == 0.0
    assert np.all(curve.power >= 0)
    with pytest.raises(ShapeError):
        error_power_spectrum(np.zeros(5), np.zeros(5))


def test_radial_psd_of_a_constant_field():
    psd = radial_psd(np.full((16, 16), 2.0))
    assert psd.power[0] == pytest.approx((2.0 * 256) ** 2)
    np.testing.assert_allclose(psd.power[1:], 0.0, atol=1e-12)
    assert psd.frequencies[0] == 0.0 and psd.frequencies[-1] == 0.5
    assert np.sum(psd.counts) == 256


def test_radial_psd_locates_a_stripe_pattern():
    cols = np.arange(64)
    error = np.tile(np.cos(2 * np.pi * 8 * cols / 64), (64, 1))
    psd = radial_psd(error)
    assert int(np.argmax(psd.power)) == 8
    stats = frequency_stats(psd)
    assert stats.frequency_50 == stats.frequency_90 == psd.frequencies[8]
    assert stats.ratio_low == pytest.approx(1.0)
    assert stats.ratio_mid == pytest.approx(0.0, abs=1e-20)


def test_radial_psd_shape_validation():
    with pytest.raises(ShapeError):
        radial_psd(np.zeros(8))
    with pytest.raises(ShapeError):
        radial_psd(np.zeros((1, 8)))


def test_frequency_stats_columns_and_logs():
    psd = PsdCurve(np.array([0.0, 0.1, 0.3, 0.5]), np.array([4.0, 3.0, 2.0, 1.0]), np.ones(4))
    row = frequency_stats(psd).as_row()
    assert tuple(row) == STATS_COLUMNS
    assert row["total_log_error_power"] == pytest.approx(np.log(10.0))
    assert row["average_log_error_power"] == pytest.approx(np.mean(np.log([4.0, 3.0, 2.0, 1.0])))
    # bands are [0, 0.1], (0.1, 0.25], (0.25, 0.5]
    assert row["ratio_0.0-0.1"] == pytest.approx(0.7)
    assert row["ratio_0.1-0.25"] == 0.0
    assert row["ratio_0.25-0.5"] == pytest.approx(0.3)
    assert row["frequency_50"] == 0.1
    assert row["frequency_90"] == 0.3


def test_percentile_frequency_hits_exact_fraction():
    psd = PsdCurve(np.array([0.0, 0.25, 0.5]), np.array([1.0, 1.0, 2.0]), np.ones(3))
    assert percentile_frequency(psd, 0.5) == 0.25


def test_frequency_stats_need_power():
    with pytest.raises(NumericalError):
        frequency_stats(PsdCurve(np.zeros(3), np.zeros(3), np.ones(3)))
    with pytest.raises(NumericalError):
        FrequencyStats(0.0, 0.0, 0.3, 0.1, 1.0, 0.0, 0.0)


def test_weighted_kernel_identity(burgers, probe_net):
    basis = grid_basis(burgers, (16,))
    weight = weight_build(SpectralSymbol.derivative_series([1]), basis.xi)
    result = ntk_probe(probe_net, burgers, basis, TIMES, weight)

    omega = weight.values
    expected = omega[:, None] * np.conj(omega)[None, :] * result.kernel
    scale = np.max(np.abs(result.kernel))
    np.testing.assert_allclose(result.weighted_kernel, expected, rtol=1e-8, atol=1e-8 * scale)

    np.testing.assert_allclose(result.kernel, result.kernel.conj().T, atol=1e-10 * scale)
    assert np.all(np.diff(result.eigenvalues) <= 0)
    assert result.eigenvalues[-1] >= -1e-8 * result.eigenvalues[0]
    assert result.modes.shape == (16, 1)


def test_residual_jacobian_matches_finite_differences(allen_cahn, probe_net):
    basis = grid_basis(allen_cahn, (8,))
    tape = Tape()
    bound = probe_net.bind(tape)
    jacobian = residual_jacobian(tape, spectral_residual_on(allen_cahn, probe_net, bound, basis, TIMES), bound)
    assert jacobian.shape == (8, probe_net.parameter_count)

    base = {k: v.copy() for k, v in probe_net.params.items()}

    def residual_with(key, index, delta):
        params = {k: v.copy() for k, v in base.items()}
        params[key][index] += delta
        probe_net.set_params(params)
        tape = Tape()
        return spectral_residual_on(allen_cahn, probe_net, probe_net.bind(tape), basis, TIMES).value.reshape(-1)

    offsets = np.cumsum([0] + [v.size for v in base.values()])
    names = list(base)
    h = 1e-6
    for key, index in (("W0", (1, 2)), ("b1", (4,)), ("W_out", (3, 0))):
        flat = int(np.ravel_multi_index(index, base[key].shape))
        column = offsets[names.index(key)] + flat
        fd = (residual_with(key, index, h) - residual_with(key, index, -h)) / (2 * h)
        np.testing.assert_allclose(jacobian[:, column], fd, rtol=1e-5, atol=1e-8)


def test_ntk_probe_guards(burgers, probe_net):
    basis = grid_basis(burgers, (8,))
    with pytest.raises(ParameterBudgetError):
        ntk_probe(probe_net, burgers, basis, TIMES, budget=10)
    with pytest.raises(ShapeError):
        ntk_probe(probe_net, burgers, basis, TIMES, np.ones(5))


def test_unit_weight_leaves_kernel_unchanged(burgers, probe_net):
    result = ntk_probe(probe_net, burgers, grid_basis(burgers, (8,)), TIMES)
    np.testing.assert_allclose(result.weighted_kernel, result.kernel)


def test_gradient_alignment_is_a_cosine(burgers, probe_net, rng):
    basis = grid_basis(burgers, (16,))
    weight = weight_build(SpectralSymbol.derivative_series([1]), basis.xi)
    points = rng.uniform(-1, 1, size=(64, 2))
    cosine = gradient_alignment(burgers, probe_net, basis, [0.25, 0.75], weight, points)
    assert -1.0 <= cosine <= 1.0
    assert cosine == gradient_alignment(burgers, probe_net, basis, [0.25, 0.75], weight, points)


def test_fourier_and_physical_gradients_point_in_different_directions(burgers):
    basis = grid_basis(burgers, (16,))
    weight = weight_build(SpectralSymbol.derivative_series([1]), basis.xi)
    cosines = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        net = JetNetwork(NetworkConfig(depth=2, width=8, activation="tanh"), 1, rng)
        points = rng.uniform(-1, 1, size=(64, 2))
        cosines.append(gradient_alignment(burgers, net, basis, [0.25, 0.75], weight, points))
    assert sum(c < 0.999 for c in cosines) >= 9
    assert np.median(cosines) < 0.999


def test_report_writers(tmp_path, burgers, probe_net):
    stats = frequency_stats(PsdCurve(np.array([0.0, 0.5]), np.array([1.0, 1.0]), np.ones(2)))
    lines = write_stats_csv([("burgers_enhanced", stats)], tmp_path / "stats.csv").read_text().splitlines()
    assert lines[0] == "scenario," + ",".join(STATS_COLUMNS)
    assert lines[1].startswith("burgers_enhanced,")

    curve = error_power_spectrum(np.zeros((1, 4)), np.ones((1, 4)))
    lines = write_error_power_csv(curve, tmp_path / "error_power.csv").read_text().splitlines()
    assert lines[0] == "wavenumber,power"
    assert len(lines) == 1 + curve.power.size

    result = ntk_probe(probe_net, burgers, grid_basis(burgers, (8,)), TIMES)
    eig = write_eigenvalues_csv(result, tmp_path / "ntk_eigenvalues.csv").read_text().splitlines()
    assert eig[0] == "index,eigenvalue,weighted_eigenvalue"
    assert len(eig) == 9
    modes = write_modes_csv(result, tmp_path / "ntk_modes.csv").read_text().splitlines()
    assert modes[0] == "xi_0,omega_re,omega_im,k_diag,kw_diag"
