import numpy as np
import pytest

from autodiff.tape import Tape
from common.errors import ContractError, MissingJetComponentError, UnsupportedOrderError
from jetnet.checkpoint import config_hash, load_checkpoint, save_checkpoint
from jetnet.features import FourierFeatureMap
from jetnet.jets import JetOrderSpec, faa_di_bruno_terms, leibniz_terms
from jetnet.networks import JetNetwork, NetworkConfig

H = 1e-3


def jet_values(net, points, spec):
    tape = Tape()
    jet = net.forward_jet(net.bind(tape), points, spec)
    return {key: jet.component(key).value for key in spec.keys()}


def central(net, points, spec, key, column):
    """Fourth-order central difference of component ``key`` along ``column``."""
    shifted = []
    for step in (2, 1, -1, -2):
        p = points.copy()
        p[:, column] += step * H
        shifted.append(jet_values(net, p, spec)[key])
    f2, f1, m1, m2 = shifted
    return (-f2 + 8 * f1 - 8 * m1 + m2) / (12 * H)


def assert_jet_matches_differences(net, spec, points):
    values = jet_values(net, points, spec)
    for key in spec.keys():
        if not key:
            continue
        lower, var = key[:-1], key[-1]
        fd = central(net, points, spec, lower, spec.column(var))
        np.testing.assert_allclose(values[key], fd, rtol=1e-5, atol=1e-7, err_msg=f"component {key}")


def test_faa_di_bruno_third_order_coefficients():
    terms = {(k, blocks): n for k, blocks, n in faa_di_bruno_terms("xxx")}
    assert terms == {(1, ("xxx",)): 1, (2, ("x", "xx")): 3, (3, ("x", "x", "x")): 1}


def test_leibniz_second_order_coefficients():
    terms = {(left, right): n for left, right, n in leibniz_terms("xx")}
    assert terms == {("", "xx"): 1, ("x", "x"): 2, ("xx", ""): 1}


def test_spec_keys_are_closed_under_lower_orders():
    spec = JetOrderSpec(1, 3, include_time=True, extra_keys=("xt",))
    assert spec.keys() == ("", "x", "t", "xx", "xt", "xxx")


def test_spec_rejects_unsupported_orders():
    with pytest.raises(UnsupportedOrderError):
        JetOrderSpec(2, 3)
    with pytest.raises(ContractError):
        JetOrderSpec(1, 2, include_mixed=True)


@pytest.mark.parametrize("activation", ["sin", "tanh"])
def test_one_dimensional_jets_match_finite_differences(activation):
    rng = np.random.default_rng(7)
    net = JetNetwork(NetworkConfig(depth=2, width=16, activation=activation), 1, rng)
    points = rng.uniform(-1, 1, size=(20, 2))
    spec = JetOrderSpec(1, 3, include_time=True, extra_keys=("xt",))
    assert_jet_matches_differences(net, spec, points)


def test_two_dimensional_jets_with_mixed_derivatives():
    rng = np.random.default_rng(8)
    net = JetNetwork(NetworkConfig(depth=2, width=16, activation="tanh", output_dim=2), 2, rng)
    points = rng.uniform(-1, 1, size=(15, 3))
    spec = JetOrderSpec(2, 2, include_time=True, include_mixed=True)
    assert_jet_matches_differences(net, spec, points)


def test_modified_mlp_with_fourier_features():
    rng = np.random.default_rng(9)
    config = NetworkConfig(
        depth=2, width=12, activation="tanh", architecture="modified", embedding="fourier", fourier_features=8
    )
    net = JetNetwork(config, 1, rng)
    points = rng.uniform(-1, 1, size=(10, 2))
    assert_jet_matches_differences(net, JetOrderSpec(1, 2, include_time=True), points)


def test_jet_value_equals_predict(small_net, rng):
    points = rng.uniform(-1, 1, size=(30, 2))
    tape = Tape()
    value = small_net.forward(small_net.bind(tape), points).value
    np.testing.assert_allclose(value, small_net.predict(points), rtol=1e-13, atol=1e-14)


def test_missing_component_raises(small_net, rng):
    tape = Tape()
    jet = small_net.forward_jet(small_net.bind(tape), rng.uniform(size=(4, 2)), JetOrderSpec(1, 1))
    assert jet.u_x.shape == (4, 1)
    with pytest.raises(MissingJetComponentError):
        jet.u_xx


def test_identity_network_has_exactly_zero_second_derivative(rng):
    net = JetNetwork(NetworkConfig(depth=2, width=8, activation="identity"), 1, rng)
    tape = Tape()
    jet = net.forward_jet(net.bind(tape), rng.uniform(size=(5, 2)), JetOrderSpec(1, 2))
    assert jet.is_zero("xx")


def test_parameter_count(rng):
    net = JetNetwork(NetworkConfig(depth=2, width=10), 1, rng)
    assert net.parameter_count == (2 * 10 + 10) + (10 * 10 + 10) + (10 * 1 + 1)


def test_feature_map_omits_two_pi_when_asked(rng):
    fmap = FourierFeatureMap.sample(rng, 4, 2, sigma=3.0, omit_two_pi=True)
    points = rng.uniform(size=(3, 2))
    np.testing.assert_allclose(fmap.features(points)[:, :4], np.sin(points @ fmap.B.T))


def test_checkpoint_restores_predictions(tmp_path, rng):
    config = NetworkConfig(depth=1, width=6, embedding="fourier", fourier_features=4)
    net = JetNetwork(config, 1, rng)
    path = save_checkpoint(tmp_path / "checkpoint.bin", net.named_tensors(), 5, config_hash({"a": 1}), {"iteration": 3})

    tensors, header = load_checkpoint(path)
    assert header["seed"] == 5
    assert header["extra"] == {"iteration": 3}
    assert header["config_hash"] == config_hash({"a": 1})

    fresh = JetNetwork(config, 1, np.random.default_rng(99))
    fresh.load_tensors(tensors)
    points = rng.uniform(size=(7, 2))
    np.testing.assert_array_equal(fresh.predict(points), net.predict(points))


def test_truncated_checkpoint_is_rejected(tmp_path, small_net):
    path = save_checkpoint(tmp_path / "c.bin", small_net.named_tensors(), 0, "h")
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(ContractError):
        load_checkpoint(path)


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
