import numpy as np
import pytest

from conftest import central_diff
from tpnet.errors import InvalidSpecError, NumericOverflowError, ShapeError
from tpnet.subnetworks import (
    SEED_SPLIT_CONSTANT,
    Layer,
    SubnetworkParams,
    SubnetworkSpec,
    eval_jets,
    eval_values,
    init_subnetwork,
    params_from_bytes,
    params_to_bytes,
    split_seed,
)


def test_elm_shapes_and_determinism():
    spec = SubnetworkSpec("ELM", 2, [10], "kaiming", 7)
    a, b = init_subnetwork(spec), init_subnetwork(spec)
    assert a.layers[0].weight.shape == (10, 2)
    assert a.layers[0].bias.shape == (10,)
    assert params_to_bytes(a) == params_to_bytes(b)


def test_mlp_weight_shapes():
    params = init_subnetwork(SubnetworkSpec("MLP", 3, [5, 5, 5, 5], "xavier", 1))
    assert [l.weight.shape for l in params.layers] == [(5, 3), (5, 5), (5, 5), (5, 5)]


def test_kaiming_variance_monte_carlo():
    # 10^4 x 100 = 10^6 draws with fan_in = 100
    params = init_subnetwork(SubnetworkSpec("ELM", 100, [10000], "kaiming", 3))
    w = params.layers[0].weight
    assert w.size == 10 ** 6
    assert abs(w.var() / (2 / 100) - 1) < 0.05
    assert abs(w.mean()) < 5 * np.sqrt(2 / 100 / w.size)
    assert np.all(params.layers[0].bias == 0)


def test_xavier_range_and_biases():
    params = init_subnetwork(SubnetworkSpec("MLP", 4, [30, 20], "xavier", 5))
    for layer, (fi, fo) in zip(params.layers, [(4, 30), (30, 20)]):
        bound = np.sqrt(6 / (fi + fo))
        assert np.all(np.abs(layer.weight) <= bound)
        assert np.all(np.abs(layer.bias) <= bound)
        # uniform on [-b, b] has variance b^2/3
        assert abs(layer.weight.var() / (bound ** 2 / 3) - 1) < 0.3
        assert np.any(layer.bias != 0)


def test_params_are_frozen():
    params = init_subnetwork(SubnetworkSpec("ELM", 1, [3]))
    with pytest.raises(ValueError):
        params.layers[0].weight[0, 0] = 1.0


@pytest.mark.parametrize("widths", [[0], [3, 0]])
def test_zero_width_rejected(widths):
    arch = "ELM" if len(widths) == 1 else "MLP"
    with pytest.raises(InvalidSpecError):
        SubnetworkSpec(arch, 2, widths)


def test_bad_layer_counts():
    with pytest.raises(InvalidSpecError):
        SubnetworkSpec("ELM", 2, [3, 3])
    with pytest.raises(InvalidSpecError):
        SubnetworkSpec("HLConc", 2, [3, 3, 3])
    with pytest.raises(InvalidSpecError):
        SubnetworkSpec("MLP", 2, [3])
    with pytest.raises(InvalidSpecError):
        SubnetworkSpec("ELM", 2, [3], activation="relu")


def test_default_widths():
    assert SubnetworkSpec.default("ELM", 2, 7).layer_widths == (7,)
    assert SubnetworkSpec.default("MLP", 2, 7).layer_widths == (7, 7, 7, 7)
    assert SubnetworkSpec.default("ResNet", 2, 7).layer_widths == (7, 7, 7, 7)
    h = SubnetworkSpec.default("HLConc", 2, 9)
    assert h.layer_widths == (4, 5) and h.output_width == 9


def test_split_seed():
    a, b = split_seed(42)
    assert a == 42 and b == 42 ^ SEED_SPLIT_CONSTANT


def _manual_elm(w, b):
    spec = SubnetworkSpec("ELM", w.shape[1], [w.shape[0]])
    return spec, SubnetworkParams(spec, (Layer(np.asarray(w, float), np.asarray(b, float)),))


def test_zero_network_jets():
    spec, params = _manual_elm(np.zeros((4, 2)), np.zeros(4))
    jet = eval_jets(spec, params, np.random.default_rng(0).uniform(-1, 1, (5, 2)))
    assert np.all(jet.values == 0) and np.all(jet.grad == 0) and np.all(jet.diag2 == 0)


def test_single_neuron_at_origin():
    spec, params = _manual_elm(np.array([[2.0]]), np.array([0.0]))
    jet = eval_jets(spec, params, np.array([[0.0]]))
    assert jet.values[0, 0] == 0.0
    assert jet.grad[0, 0, 0] == 2.0
    assert jet.diag2[0, 0, 0] == 0.0


def test_single_neuron_closed_form():
    # tanh(2x + 0.3): derivative 2 sech^2, second derivative -8 tanh sech^2
    spec, params = _manual_elm(np.array([[2.0]]), np.array([0.3]))
    x = np.linspace(-1, 1, 7)[:, None]
    jet = eval_jets(spec, params, x)
    t = np.tanh(2 * x[:, 0] + 0.3)
    np.testing.assert_allclose(jet.values[:, 0], t, rtol=1e-15)
    np.testing.assert_allclose(jet.grad[:, 0, 0], 2 * (1 - t ** 2), rtol=1e-14)
    np.testing.assert_allclose(jet.diag2[:, 0, 0], -8 * t * (1 - t ** 2), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("arch", ["ELM", "MLP", "ResNet", "HLConc"])
@pytest.mark.parametrize("init", ["kaiming", "xavier"])
def test_jets_match_finite_differences(arch, init):
    spec = SubnetworkSpec.default(arch, 2, 5, init, 11)
    params = init_subnetwork(spec)
    x = np.random.default_rng(1).uniform(-1, 1, (20, 2))
    jet = eval_jets(spec, params, x)

    def f(y):
        return eval_values(spec, params, y)

    g, _ = central_diff(f, x, 1e-4)
    _, h = central_diff(f, x, 1e-3)
    np.testing.assert_allclose(jet.values, f(x), rtol=0, atol=1e-15)
    assert np.max(np.abs(jet.grad - g)) <= 1e-6 * np.max(np.abs(g))
    assert np.max(np.abs(jet.diag2 - h)) <= 1e-4 * np.max(np.abs(h))


def test_resnet_projection_when_widths_differ():
    spec = SubnetworkSpec("ResNet", 3, [6, 4, 5], "xavier", 2)
    params = init_subnetwork(spec)
    # 3->6 and 6->4 need projections; the output layer is linear without one
    assert params.layers[0].proj_weight.shape == (6, 3)
    assert params.layers[1].proj_weight.shape == (4, 6)
    assert params.layers[2].proj_weight is None
    x = np.random.default_rng(3).uniform(-1, 1, (10, 3))
    jet = eval_jets(spec, params, x)
    g, _ = central_diff(lambda y: eval_values(spec, params, y), x, 1e-5)
    assert np.max(np.abs(jet.grad - g)) <= 1e-6 * np.max(np.abs(g))


def test_resnet_identity_shortcut():
    spec = SubnetworkSpec("ResNet", 2, [4, 4, 3], "kaiming", 9)
    params = init_subnetwork(spec)
    assert params.layers[0].proj_weight is not None  # 2 -> 4
    assert params.layers[1].proj_weight is None      # 4 -> 4 identity
    y = np.tanh(np.array([[0.2, -0.4]]) @ params.layers[0].weight.T)
    y = np.tanh(y + np.array([[0.2, -0.4]]) @ params.layers[0].proj_weight.T)
    z = np.tanh(np.tanh(y @ params.layers[1].weight.T) + y)
    out = z @ params.layers[2].weight.T
    np.testing.assert_allclose(eval_values(spec, params, np.array([[0.2, -0.4]])), out, rtol=1e-14)


def test_hlconc_is_concatenation():
    spec = SubnetworkSpec("HLConc", 2, [3, 4], "xavier", 4)
    params = init_subnetwork(spec)
    x = np.array([[0.1, 0.7], [-0.5, 0.2]])
    l1, l2 = params.layers
    y1 = np.tanh(x @ l1.weight.T + l1.bias)
    y2 = np.tanh(y1 @ l2.weight.T + l2.bias)
    np.testing.assert_allclose(eval_jets(spec, params, x).values, np.hstack([y1, y2]), rtol=1e-15)


def test_overflow_names_layer():
    spec, params = _manual_elm(np.array([[np.inf]]), np.array([0.0]))
    with pytest.raises(NumericOverflowError) as info, np.errstate(invalid="ignore"):
        eval_jets(spec, params, np.array([[0.0]]))
    assert info.value.layer == 1


def test_point_shape_checked():
    spec = SubnetworkSpec("ELM", 2, [3])
    with pytest.raises(ShapeError):
        eval_jets(spec, init_subnetwork(spec), np.zeros((4, 3)))


@pytest.mark.parametrize("arch", ["ELM", "MLP", "ResNet", "HLConc"])
def test_container_round_trip(arch):
    spec = SubnetworkSpec("ResNet", 2, [3, 5, 4], "xavier", 2 ** 64 - 1) if arch == "ResNet" \
        else SubnetworkSpec.default(arch, 3, 6, "kaiming", 77)
    params = init_subnetwork(spec)
    back = params_from_bytes(params_to_bytes(params))
    assert back.spec == spec
    for a, b in zip(params.layers, back.layers):
        for x, y in zip(a.arrays(), b.arrays()):
            assert np.array_equal(x, y)


def test_container_rejects_garbage():
    with pytest.raises(InvalidSpecError):
        params_from_bytes(b"nope")
    blob = params_to_bytes(init_subnetwork(SubnetworkSpec("ELM", 1, [2])))
    with pytest.raises(InvalidSpecError):
        params_from_bytes(blob + b"\x00")
