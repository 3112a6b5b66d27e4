import numpy as np
import pytest
from helpers import finite_difference

from autodiff import ops
from autodiff.complex import ComplexPair
from autodiff.linear import IdentityOperator, MatrixOperator, linear_op_node
from autodiff.optim import Adam, AdamState, adam_step
from autodiff.tape import Tape
from common.errors import ContractError, NumericalError, ShapeError


def test_scalar_chain_gradient():
    tape = Tape()
    x = tape.leaf(np.array([0.3, -1.2, 2.0]))
    y = ops.sum(ops.mul(ops.sin(x), ops.exp(x)))
    grads = tape.backward(y)
    expected = np.cos(x.value) * np.exp(x.value) + np.sin(x.value) * np.exp(x.value)
    np.testing.assert_allclose(grads[x.id], expected, rtol=1e-12)


def test_operator_overloads_match_functional_ops():
    tape = Tape()
    a = tape.leaf(np.array([1.0, 2.0]))
    b = tape.leaf(np.array([3.0, -4.0]))
    expr = (a * b + a / b - b) ** 2
    root = ops.sum(-expr)
    grads = tape.backward(root)

    def f_a(v):
        return -np.sum((v * b.value + v / b.value - b.value) ** 2)

    def f_b(v):
        return -np.sum((a.value * v + a.value / v - v) ** 2)

    np.testing.assert_allclose(grads[a.id], finite_difference(f_a, a.value), rtol=1e-6)
    np.testing.assert_allclose(grads[b.id], finite_difference(f_b, b.value), rtol=1e-6)


def test_broadcasting_reduces_in_backward():
    tape = Tape()
    w = tape.leaf(np.ones((1, 3)))
    x = tape.constant(np.arange(6.0).reshape(2, 3))
    grads = tape.backward(ops.sum(ops.mul(w, x)))
    np.testing.assert_allclose(grads[w.id], [[3.0, 5.0, 7.0]])


def test_matmul_gradients():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 3))
    B = rng.normal(size=(3, 2))
    tape = Tape()
    a, b = tape.leaf(A), tape.leaf(B)
    grads = tape.backward(ops.sum(ops.tanh(a @ b)))

    np.testing.assert_allclose(
        grads[a.id], finite_difference(lambda v: np.sum(np.tanh(v @ B)), A), rtol=1e-6, atol=1e-9
    )
    np.testing.assert_allclose(
        grads[b.id], finite_difference(lambda v: np.sum(np.tanh(A @ v)), B), rtol=1e-6, atol=1e-9
    )


def test_indexing_take_and_concat():
    tape = Tape()
    x = tape.leaf(np.arange(5.0))
    picked = ops.take(x, [0, 0, 3])
    joined = ops.concat([picked, x[1:3]])
    grads = tape.backward(ops.sum(joined))
    np.testing.assert_allclose(grads[x.id], [2.0, 1.0, 1.0, 1.0, 0.0])


def test_fan_out_accumulates():
    tape = Tape()
    x = tape.leaf(np.array(2.0))
    y = ops.add(ops.mul(x, x), x)
    assert tape.backward(y)[x.id] == pytest.approx(5.0)


def test_non_scalar_root_is_rejected():
    tape = Tape()
    x = tape.leaf(np.ones(3))
    with pytest.raises(ContractError):
        tape.backward(ops.scale(x, 2.0))


def test_seeded_backward_on_vector_root():
    tape = Tape()
    x = tape.leaf(np.array([1.0, 2.0]))
    y = ops.square(x)
    grads = tape.backward(y, seed=np.array([1.0, 0.0]))
    np.testing.assert_allclose(grads[x.id], [2.0, 0.0])


def test_shape_mismatch_raises():
    tape = Tape()
    with pytest.raises(ShapeError):
        ops.add(tape.leaf(np.ones(3)), tape.leaf(np.ones(4)))


def test_mixing_tapes_is_rejected():
    a = Tape().leaf(1.0)
    b = Tape().leaf(2.0)
    with pytest.raises(ContractError):
        ops.add(a, b)


def test_non_finite_values_abort_the_tape():
    tape = Tape(check_finite=True)
    x = tape.leaf(np.array([0.0]))
    with np.errstate(divide="ignore"), pytest.raises(NumericalError):
        ops.div(tape.constant(np.array([1.0])), x)


def test_unreached_leaf_has_zero_gradient():
    tape = Tape()
    used = tape.leaf(np.ones(2))
    unused = tape.leaf(np.ones(3))
    grads = tape.gradients(ops.sum(used), {"used": used, "unused": unused})
    np.testing.assert_array_equal(grads["unused"], np.zeros(3))


def test_complex_pair_product_and_abs2():
    tape = Tape()
    a = ComplexPair(tape.leaf(np.array([1.0, 0.5])), tape.leaf(np.array([2.0, -1.0])))
    b = ComplexPair(tape.constant(np.array([0.0, 3.0])), tape.constant(np.array([1.0, 1.0])))
    product = a * b
    np.testing.assert_allclose(product.value, a.value * b.value)
    np.testing.assert_allclose(product.abs2().value, np.abs(a.value * b.value) ** 2)
    np.testing.assert_allclose(a.scale(2j).value, 2j * a.value)
    np.testing.assert_allclose(a.conj().value, np.conj(a.value))


def test_abs2_gradient():
    tape = Tape()
    re, im = tape.leaf(np.array([3.0])), tape.leaf(np.array([4.0]))
    grads = tape.backward(ops.sum(ComplexPair(re, im).abs2()))
    assert grads[re.id][0] == pytest.approx(6.0)
    assert grads[im.id][0] == pytest.approx(8.0)


def test_linear_operator_node_uses_adjoint():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    z0 = rng.normal(size=4)
    op = MatrixOperator(M)

    tape = Tape()
    z = tape.leaf(z0)
    out = linear_op_node(op, z)
    np.testing.assert_allclose(out.value, M @ z0)
    grads = tape.backward(ops.sum(out.abs2()))

    def f(v):
        return np.sum(np.abs(M @ v) ** 2)

    np.testing.assert_allclose(grads[z.id], finite_difference(f, z0), rtol=1e-6)


def test_linear_operator_complex_input_gradient():
    rng = np.random.default_rng(4)
    M = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    zr, zi = rng.normal(size=3), rng.normal(size=3)
    tape = Tape()
    pair = ComplexPair(tape.leaf(zr), tape.leaf(zi))
    out = linear_op_node(MatrixOperator(M), pair)
    grads = tape.backward(ops.sum(out.re))

    fd_re = finite_difference(lambda v: np.sum((M @ (v + 1j * zi)).real), zr)
    fd_im = finite_difference(lambda v: np.sum((M @ (zr + 1j * v)).real), zi)
    np.testing.assert_allclose(grads[pair.re.id], fd_re, rtol=1e-6)
    np.testing.assert_allclose(grads[pair.im.id], fd_im, rtol=1e-6)


def test_operator_rejects_wrong_input_shape():
    tape = Tape()
    with pytest.raises(ShapeError):
        linear_op_node(IdentityOperator((3,)), tape.leaf(np.ones(4)))


def test_adam_first_step_moves_by_lr():
    params = {"w": np.array([1.0, -1.0])}
    grads = {"w": np.array([0.5, -2.0])}
    new, state = adam_step(params, grads, AdamState(), lr=0.1)
    np.testing.assert_allclose(new["w"], [0.9, -0.9], atol=1e-6)
    assert state.step == 1
    np.testing.assert_array_equal(params["w"], [1.0, -1.0])


def test_adam_minimizes_quadratic():
    opt = Adam(lr=0.05)
    params = {"x": np.array([3.0, -2.0])}
    for _ in range(500):
        params = opt.step(params, {"x": 2.0 * params["x"]})
    assert opt.step_count == 500
    assert np.max(np.abs(params["x"])) < 1e-2


@pytest.mark.parametrize("lr", [0.0, -1e-3])
def test_adam_rejects_nonpositive_lr(lr):
    with pytest.raises(ContractError):
        Adam(lr=lr)


def test_adam_rejects_mismatched_gradient():
    with pytest.raises(ShapeError):
        adam_step({"w": np.ones(2)}, {"w": np.ones(3)}, AdamState(), lr=1e-3)
