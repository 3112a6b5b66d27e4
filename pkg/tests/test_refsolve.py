import json

import numpy as np
import pytest

from common.errors import ContractError, NumericalError, SolverBlowUpError
from pdezoo.navier_stokes import ns_initial_condition
from pdezoo.registry import build_problem
from refsolve.dealias import PaddedProduct
from refsolve.gate import accuracy_gate, resample_to_mesh
from refsolve.models import spectral_model
from refsolve.navier_stokes import ns_solve
from refsolve.solution import SolutionGrid, periodic_mesh
from refsolve.solver import advance, check_blowup, solve
from refsolve.storage import ReferenceCache, export_csv, load_solution, save_solution


def sine_solution(size=64, snapshots=11):
    x = periodic_mesh(-1.0, 2.0, size)
    times = np.linspace(0.0, 1.0, snapshots)
    values = np.stack([np.exp(-t) * np.sin(np.pi * x) for t in times])
    return SolutionGrid([x], [2.0], times, values, {"pde": "test"})


def test_linear_heat_decay_is_exact():
    problem = build_problem("allen_cahn", {"alpha": 0.01, "gamma": 0.0})
    x = periodic_mesh(-1.0, 2.0, 64)
    grid = solve(problem, 64, 1e-2, snapshots=11, initial=np.sin(np.pi * x))
    exact = np.exp(-0.01 * np.pi**2 * grid.times)[:, None] * np.sin(np.pi * x)[None, :]
    assert np.max(np.abs(grid.values - exact)) <= 1e-6


@pytest.mark.parametrize("name", ["burgers", "kdv"])
def test_periodic_solutions_conserve_mass(name):
    grid = solve(build_problem(name), 64, 1e-3, snapshots=11)
    mass = grid.values.mean(axis=1)
    assert np.max(np.abs(mass - mass[0])) <= 1e-8


def test_integrating_factor_rk4_is_fourth_order():
    problem = build_problem("burgers")
    size = 32
    model = spectral_model(problem, size, 2.0)
    x = periodic_mesh(-1.0, 2.0, size)
    u_hat = np.fft.fft(-np.sin(np.pi * x))

    def to_physical(spectrum):
        return np.real(np.fft.ifft(spectrum))

    finals = [
        to_physical(advance(u_hat, model.linear, model.nonlinear, 0.0, 0.2, dt, to_physical))
        for dt in (0.02, 0.01, 0.005)
    ]
    coarse_gap = np.max(np.abs(finals[0] - finals[1]))
    fine_gap = np.max(np.abs(finals[1] - finals[2]))
    assert np.log2(coarse_gap / fine_gap) >= 3.5


def test_single_mode_vorticity_decays_viscously():
    size, length, nu = 32, 4.0 * np.pi, 0.01
    axis = periodic_mesh(-2.0 * np.pi, length, size)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    kx, ky = 2.0 * np.pi / length, 4.0 * np.pi / length
    w0 = np.sin(kx * x + ky * y)

    grid = ns_solve(w0, nu, size, 1e-2, t_window=(0.5, 1.0), snapshots=3, length=length, origin=-2.0 * np.pi)
    decay = np.exp(-nu * (kx**2 + ky**2) * grid.times)
    exact = decay[:, None, None] * w0[None]
    assert np.max(np.abs(grid.values - exact)) <= 1e-8
    np.testing.assert_allclose(grid.field("stream"), exact / (kx**2 + ky**2), atol=1e-8)


def test_enstrophy_never_grows():
    size, length = 32, 4.0 * np.pi
    w0 = ns_initial_condition(np.random.default_rng(2), size, length)
    w0 = w0 / np.max(np.abs(w0))
    grid = ns_solve(w0, 0.01, size, 1e-2, t_window=(0.0, 1.0), snapshots=11, length=length)
    enstrophy = np.mean(grid.values**2, axis=(1, 2))
    assert np.all(np.diff(enstrophy) <= 1e-10 * enstrophy[0])
    assert enstrophy[-1] < enstrophy[0]


def test_ns_solve_rejects_bad_input():
    with pytest.raises(ContractError):
        ns_solve(np.zeros((8, 4)), 0.01, 8, 1e-2)
    with pytest.raises(ContractError):
        ns_solve(np.zeros((8, 8)), 0.01, 8, 1e-2, t_window=(1.0, 0.5))


def test_solve_rejects_invalid_requests(burgers):
    with pytest.raises(ContractError):
        solve(burgers, 32, 1e-3, integrator="euler")
    with pytest.raises(ContractError):
        solve(build_problem("navier_stokes"), 32, 1e-3)
    with pytest.raises(ContractError):
        solve(burgers, 32, 1e-3, initial=np.zeros(16))


def test_solution_metadata(burgers):
    grid = solve(burgers, 32, 1e-3, snapshots=3)
    assert grid.values.shape == (3, 32)
    assert grid.metadata["pde"] == "burgers"
    assert grid.metadata["resolution"] == [32]
    np.testing.assert_allclose(grid.values[0], -np.sin(np.pi * grid.axes[0]))


def test_blowup_is_detected():
    check_blowup(np.ones(4), 0.0)
    with pytest.raises(SolverBlowUpError):
        check_blowup(np.array([1.0, np.inf]), 0.5)
    with pytest.raises(NumericalError):
        check_blowup(np.array([2.0]), 0.5, threshold=1.0)


def test_padded_product_removes_aliased_modes():
    size = 16
    x = 2.0 * np.pi * np.arange(size) / size
    product = PaddedProduct((size,), 1.5).product(np.fft.fft(np.cos(6 * x)), np.fft.fft(np.cos(5 * x)))
    # cos(11 x) would alias onto mode 5 on the unpadded mesh
    np.testing.assert_allclose(product, np.fft.fft(0.5 * np.cos(x)), atol=1e-12)


def test_padded_cubic_product_is_exact():
    size = 16
    x = 2.0 * np.pi * np.arange(size) / size
    u_hat = np.fft.fft(np.cos(2 * x))
    cubic = PaddedProduct((size,), 2.0).product(u_hat, u_hat, u_hat)
    np.testing.assert_allclose(cubic, np.fft.fft(np.cos(2 * x) ** 3), atol=1e-12)


def test_accuracy_gate_passes_on_viscous_burgers():
    report = accuracy_gate(build_problem("burgers", {"nu": 0.5}), 32, 1e-3, tol=1e-6)
    assert report.passed
    assert report.resolution == 32


def test_accuracy_gate_flags_an_underresolved_shock(burgers):
    report = accuracy_gate(burgers, 16, 1e-3, tol=1e-5)
    assert not report.passed
    with pytest.raises(NumericalError):
        accuracy_gate(burgers, 16, 1e-3, tol=1e-5, require=True)


def test_sample_and_bilinear_on_mesh_points():
    grid = sine_solution()
    points = grid.axes[0][::8, None]
    np.testing.assert_allclose(grid.sample(points, 0.3), grid.values[3, ::8], atol=1e-12)
    # band-limited, so spectral interpolation is exact off the mesh too
    off_mesh = np.array([[0.123], [-0.777]])
    np.testing.assert_allclose(grid.sample(off_mesh, 0.0), np.sin(np.pi * off_mesh[:, 0]), atol=1e-12)
    on_mesh = np.stack([grid.axes[0][:5], np.full(5, 0.5)], axis=1)
    np.testing.assert_allclose(grid.bilinear(on_mesh), grid.values[5, :5], atol=1e-14)


def test_sample_outside_time_window_raises():
    with pytest.raises(ContractError):
        sine_solution().sample(np.zeros((1, 1)), 1.5)


def test_solution_validates_mesh():
    x = np.array([0.0, 0.1, 0.3])
    with pytest.raises(ContractError):
        SolutionGrid([x], [1.0], [0.0], np.zeros((1, 3)))
    with pytest.raises(NumericalError):
        SolutionGrid([np.arange(3.0)], [3.0], [0.0], np.array([[0.0, np.nan, 1.0]]))


def test_resample_by_stride_and_interpolation():
    grid = sine_solution()
    for size in (32, 48):
        resampled = resample_to_mesh(grid, [size], snapshots=6)
        assert resampled.values.shape == (6, size)
        np.testing.assert_allclose(resampled.times, grid.times[::2])
        expected = np.exp(-resampled.times)[:, None] * np.sin(np.pi * resampled.axes[0])[None, :]
        np.testing.assert_allclose(resampled.values, expected, atol=1e-12)


def test_resample_rejects_uneven_slices():
    with pytest.raises(ContractError):
        resample_to_mesh(sine_solution(), [32], snapshots=4)


def test_save_and_load_two_dimensional_solution(tmp_path):
    axis = periodic_mesh(0.0, 1.0, 4)
    values = np.random.default_rng(0).normal(size=(2, 4, 4))
    grid = SolutionGrid([axis, axis], [1.0, 1.0], [0.0, 1.0], values, {"pde": "ns"}, {"stream": -values})
    path = save_solution(grid, tmp_path / "reference")

    raw = np.fromfile(path, dtype="<f8")
    assert raw.size == 2 * values.size
    # [t][y][x] on disk: the second stored value is x=1, y=0
    assert raw[1] == values[0, 1, 0]
    sidecar = json.loads((tmp_path / "reference.json").read_text())
    assert sidecar["layout"] == "[time][y][x]"
    assert sidecar["fields"] == ["values", "stream"]

    loaded = load_solution(tmp_path / "reference")
    np.testing.assert_array_equal(loaded.values, values)
    np.testing.assert_array_equal(loaded.field("stream"), -values)
    assert loaded.metadata == {"pde": "ns"}


def test_truncated_solution_file_is_rejected(tmp_path):
    path = save_solution(sine_solution(), tmp_path / "u")
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ContractError):
        load_solution(tmp_path / "u")


def test_csv_export(tmp_path):
    grid = sine_solution(size=8, snapshots=3)
    lines = export_csv(grid, tmp_path / "u.csv").read_text().splitlines()
    assert lines[0] == "t,x,u"
    assert len(lines) == 1 + 3 * 8
    t, x, u = (float(v) for v in lines[9].split(","))
    assert (t, x, u) == (grid.times[1], grid.axes[0][0], grid.values[1, 0])


def test_reference_cache_solves_once(tmp_path):
    cache = ReferenceCache(tmp_path / "cache")
    calls = []

    def solve_fn():
        calls.append(1)
        return sine_solution(size=8, snapshots=2)

    first = cache.get_or_solve({"pde": "test", "n": 8}, solve_fn)
    second = cache.get_or_solve({"n": 8, "pde": "test"}, solve_fn)
    assert len(calls) == 1
    np.testing.assert_array_equal(first.values, second.values)
    assert cache.get_or_solve({"pde": "test", "n": 16}, solve_fn) is not None
    assert len(calls) == 2
