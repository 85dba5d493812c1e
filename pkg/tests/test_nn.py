import numpy as np
import pytest

from zshar import nn
from zshar.errors import ConfigError, DataError, DimensionError, NumericError

from oracles import finite_difference_grad, grad_rel_error, matmul_naive

GRAD_TOL = 1e-4
FD_STEP = 1e-5


# ---------------------------------------------------------------------------
# linear
# ---------------------------------------------------------------------------

def test_linear_identity_weights():
    x = np.array([[1.0, 2.0]])
    W = np.eye(2)
    b = np.zeros(2)
    np.testing.assert_array_equal(nn.linear_forward(x, W, b), [[1.0, 2.0]])


def test_linear_small_case():
    y = nn.linear_forward(np.array([[1.0, 1.0]]), np.array([[2.0], [3.0]]), np.array([1.0]))
    np.testing.assert_allclose(y, [[6.0]])


def test_linear_matches_naive_matmul():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(3, 4))
    W = rng.normal(size=(4, 2))
    b = rng.normal(size=2)
    expected = matmul_naive(x, W) + b
    np.testing.assert_allclose(nn.linear_forward(x, W, b), expected, atol=1e-12)


def test_linear_shape_mismatch_names_both_shapes():
    with pytest.raises(DimensionError, match=r"\(1, 3\).*\(2, 2\)"):
        nn.linear_forward(np.zeros((1, 3)), np.zeros((2, 2)), np.zeros(2))


def test_linear_gradients_match_finite_differences():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(3, 4))
    W = rng.normal(size=(4, 2))
    b = rng.normal(size=2)
    r = rng.normal(size=(3, 2))
    loss = lambda: float(np.sum(nn.linear_forward(x, W, b) * r))
    dx, dW, db = nn.linear_backward(r, x, W)
    assert grad_rel_error(dx, finite_difference_grad(loss, x, FD_STEP)) < GRAD_TOL
    assert grad_rel_error(dW, finite_difference_grad(loss, W, FD_STEP)) < GRAD_TOL
    assert grad_rel_error(db, finite_difference_grad(loss, b, FD_STEP)) < GRAD_TOL


# ---------------------------------------------------------------------------
# relu
# ---------------------------------------------------------------------------

def test_relu_forward():
    np.testing.assert_array_equal(nn.relu_forward(np.array([[-1.0, 2.0]])), [[0.0, 2.0]])


def test_relu_zero_boundary():
    np.testing.assert_array_equal(nn.relu_forward(np.array([[0.0]])), [[0.0]])


def test_relu_backward_mask_rule():
    dy = np.array([[1.0, 1.0]])
    x = np.array([[-1.0, 2.0]])
    np.testing.assert_array_equal(nn.relu_backward(dy, x), [[0.0, 1.0]])
    # tie at exactly zero passes no gradient
    np.testing.assert_array_equal(nn.relu_backward(np.array([[1.0]]), np.array([[0.0]])), [[0.0]])


# ---------------------------------------------------------------------------
# dropout
# ---------------------------------------------------------------------------

def test_dropout_rate_zero_is_identity():
    x = np.arange(6.0).reshape(2, 3)
    y, mask = nn.dropout_forward(x, 0.0, "train", np.random.default_rng(0))
    np.testing.assert_array_equal(y, x)
    assert mask is None


def test_dropout_eval_mode_is_exact_identity():
    x = np.random.default_rng(3).normal(size=(4, 5))
    y, mask = nn.dropout_forward(x, 0.1, "eval")
    assert y is x or np.array_equal(y, x)
    assert mask is None


def test_dropout_seeded_mask_applies_inverted_scale():
    x = np.array([[2.0, 2.0]])
    # seed 0 draws mask [1, 0] at rate 0.5 (first uniform >= 0.5, second < 0.5)
    y, mask = nn.dropout_forward(x, 0.5, "train", np.random.default_rng(0))
    np.testing.assert_array_equal(mask, [[1.0, 0.0]])
    np.testing.assert_array_equal(y, [[4.0, 0.0]])


def test_dropout_invalid_rate():
    with pytest.raises(ConfigError):
        nn.dropout_forward(np.zeros((1, 1)), 1.0, "train", np.random.default_rng(0))
    with pytest.raises(ConfigError):
        nn.dropout_forward(np.zeros((1, 1)), -0.1, "train", np.random.default_rng(0))


def test_dropout_train_mode_preserves_expected_value():
    # statistical identity: E[dropout(x)] == x, tolerance 3 sigma
    rate = 0.3
    n = 10_000
    x = np.ones((100, 100))
    y, _ = nn.dropout_forward(x, rate, "train", np.random.default_rng(7))
    element_std = np.sqrt(rate / (1.0 - rate))
    assert abs(y.mean() - 1.0) < 3.0 * element_std / np.sqrt(n)


def test_dropout_backward_uses_mask_and_scale():
    mask = np.array([[1.0, 0.0]])
    dy = np.array([[3.0, 3.0]])
    np.testing.assert_array_equal(nn.dropout_backward(dy, mask, 0.5), [[6.0, 0.0]])


# ---------------------------------------------------------------------------
# lstm cell
# ---------------------------------------------------------------------------

def _random_cell(rng, d, H, scale=0.4):
    return nn.LSTMParams(
        W_x=rng.normal(size=(d, 4 * H)) * scale,
        W_h=rng.normal(size=(H, 4 * H)) * scale,
        b=rng.normal(size=4 * H) * scale,
    )


def test_lstm_cell_zero_params_collapse_to_zero():
    # from zero state: candidate tanh(0)=0 kills i*g and f*0 kills the carry
    p = nn.LSTMParams(W_x=np.zeros((3, 8)), W_h=np.zeros((2, 8)), b=np.zeros(8))
    h, c, _ = nn.lstm_cell_forward(np.ones(3), np.zeros(2), np.zeros(2), p)
    np.testing.assert_array_equal(h, np.zeros(2))
    np.testing.assert_array_equal(c, np.zeros(2))


def test_lstm_cell_gate_saturation_preserves_cell_state():
    # forget bias +50 and input bias -50 approximate the +/- infinity limit
    rng = np.random.default_rng(5)
    d, H = 3, 4
    p = _random_cell(rng, d, H, scale=0.1)
    p.b[H : 2 * H] = 50.0
    p.b[:H] = -50.0
    x = rng.normal(size=d)
    h_prev = rng.normal(size=H) * 0.5
    c_prev = rng.normal(size=H)
    _, c, _ = nn.lstm_cell_forward(x, h_prev, c_prev, p)
    assert np.max(np.abs(c - c_prev)) < 1e-10


def test_lstm_cell_dimension_mismatch():
    p = nn.LSTMParams(W_x=np.zeros((3, 8)), W_h=np.zeros((2, 8)), b=np.zeros(8))
    with pytest.raises(DimensionError):
        nn.lstm_cell_forward(np.ones(4), np.ones(2), np.ones(2), p)


@pytest.mark.parametrize("seed", range(5))
def test_lstm_cell_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    d, H, B = 3, 4, 2
    p = _random_cell(rng, d, H)
    x = rng.normal(size=(B, d))
    h_prev = rng.normal(size=(B, H))
    c_prev = rng.normal(size=(B, H))
    r_h = rng.normal(size=(B, H))
    r_c = rng.normal(size=(B, H))

    def loss():
        h, c, _ = nn.lstm_cell_forward(x, h_prev, c_prev, p)
        return float(np.sum(h * r_h) + np.sum(c * r_c))

    _, _, cache = nn.lstm_cell_forward(x, h_prev, c_prev, p)
    dx, dh_prev, dc_prev, grads = nn.lstm_cell_backward(r_h, r_c, cache, p)

    for analytic, target in [
        (dx, x),
        (dh_prev, h_prev),
        (dc_prev, c_prev),
        (grads["W_x"], p.W_x),
        (grads["W_h"], p.W_h),
        (grads["b"], p.b),
    ]:
        numeric = finite_difference_grad(loss, target, FD_STEP)
        assert grad_rel_error(analytic, numeric) < GRAD_TOL


# ---------------------------------------------------------------------------
# bidirectional stacked lstm
# ---------------------------------------------------------------------------

def test_bilstm_single_step_sequence():
    rng = np.random.default_rng(2)
    params = nn.init_bilstm_params(rng, input_dim=3, hidden=4, stacks=1)
    x = rng.normal(size=(1, 3))
    h_f, h_b, _ = nn.bilstm_forward(x, params)
    # both directions process the same single step from zero state
    hf_direct, _, _ = nn.lstm_cell_forward(x[0], np.zeros(4), np.zeros(4), params[0].fwd)
    hb_direct, _, _ = nn.lstm_cell_forward(x[0], np.zeros(4), np.zeros(4), params[0].bwd)
    np.testing.assert_allclose(h_f, hf_direct)
    np.testing.assert_allclose(h_b, hb_direct)


def test_bilstm_reversal_swaps_directional_roles():
    rng = np.random.default_rng(3)
    params = nn.init_bilstm_params(rng, input_dim=3, hidden=4, stacks=1)
    swapped = [nn.BiLSTMStackParams(fwd=params[0].bwd, bwd=params[0].fwd)]
    x = rng.normal(size=(6, 3))
    h_f, h_b, _ = nn.bilstm_forward(x, params)
    h_f2, h_b2, _ = nn.bilstm_forward(x[::-1], swapped)
    np.testing.assert_allclose(h_f2, h_b)
    np.testing.assert_allclose(h_b2, h_f)


def test_bilstm_empty_sequence_rejected():
    params = nn.init_bilstm_params(np.random.default_rng(0), 3, 4, 1)
    with pytest.raises(DataError):
        nn.bilstm_forward(np.zeros((0, 3)), params)


def test_bilstm_forward_deterministic():
    rng = np.random.default_rng(11)
    params = nn.init_bilstm_params(rng, 3, 4, 2)
    x = rng.normal(size=(5, 3))
    a = nn.bilstm_forward(x, params)
    b = nn.bilstm_forward(x, params)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def _bilstm_param_list(params):
    out = []
    for l, layer in enumerate(params):
        for direction in ("fwd", "bwd"):
            cell = getattr(layer, direction)
            for tensor in ("W_x", "W_h", "b"):
                out.append((l, direction, tensor, getattr(cell, tensor)))
    return out


@pytest.mark.parametrize("pooling", ["last", "mean"])
def test_bilstm_gradients_two_stacks(pooling):
    rng = np.random.default_rng(17)
    params = nn.init_bilstm_params(rng, input_dim=3, hidden=4, stacks=2)
    x = rng.normal(size=(5, 3))
    r_f = rng.normal(size=4)
    r_b = rng.normal(size=4)

    def loss():
        h_f, h_b, _ = nn.bilstm_forward(x, params, pooling=pooling)
        return float(h_f @ r_f + h_b @ r_b)

    h_f, h_b, cache = nn.bilstm_forward(x, params, pooling=pooling)
    dx, grads = nn.bilstm_backward(r_f, r_b, cache, params, pooling=pooling)

    numeric_dx = finite_difference_grad(loss, x, FD_STEP)
    assert grad_rel_error(dx, numeric_dx) < GRAD_TOL
    for l, direction, tensor, arr in _bilstm_param_list(params):
        numeric = finite_difference_grad(loss, arr, FD_STEP)
        analytic = grads[l][direction][tensor]
        assert grad_rel_error(analytic, numeric) < GRAD_TOL, (l, direction, tensor)


def test_bilstm_does_not_mutate_input():
    rng = np.random.default_rng(23)
    params = nn.init_bilstm_params(rng, 3, 4, 2)
    x = rng.normal(size=(5, 3))
    x_copy = x.copy()
    nn.bilstm_forward(x, params)
    np.testing.assert_array_equal(x, x_copy)


# ---------------------------------------------------------------------------
# adam
# ---------------------------------------------------------------------------

def test_adam_zero_grad_leaves_params_unchanged():
    params = {"w": np.array([1.0, -2.0])}
    state = nn.adam_init(params)
    before = params["w"].copy()
    nn.adam_step(params, {"w": np.zeros(2)}, state)
    np.testing.assert_array_equal(params["w"], before)


def test_adam_first_step_closed_form():
    lr = 1e-3
    params = {"x": np.array([0.0])}
    state = nn.adam_init(params, lr=lr)
    nn.adam_step(params, {"x": np.array([1.0])}, state)
    # m_hat = v_hat = 1 after bias correction, so the step is -lr/(1+eps)
    expected = -lr / (1.0 + state.eps)
    np.testing.assert_allclose(params["x"], [expected], rtol=1e-12)


def test_adam_descends_quadratic_monotonically():
    params = {"x": np.array([1.0])}
    state = nn.adam_init(params, lr=1e-3)
    prev = abs(params["x"][0])
    for _ in range(10):
        nn.adam_step(params, {"x": 2.0 * params["x"]}, state)
        cur = abs(params["x"][0])
        assert cur < prev
        prev = cur


def test_adam_rejects_nan_gradient_naming_tensor():
    params = {"bad_tensor": np.zeros(2)}
    state = nn.adam_init(params)
    with pytest.raises(NumericError, match="bad_tensor"):
        nn.adam_step(params, {"bad_tensor": np.array([np.nan, 0.0])}, state)


def test_adam_step_counter_advances():
    params = {"w": np.zeros(1)}
    state = nn.adam_init(params)
    for expected in (1, 2, 3):
        nn.adam_step(params, {"w": np.ones(1)}, state)
        assert state.t == expected


# ---------------------------------------------------------------------------
# gradient clipping
# ---------------------------------------------------------------------------

def test_clip_global_norm_scales_to_max():
    grads = {"a": np.array([3.0, 0.0]), "b": np.array([4.0])}
    norm = nn.clip_global_norm(grads, 1.0)
    assert norm == pytest.approx(5.0)
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    assert total == pytest.approx(1.0)


def test_clip_global_norm_noop_below_threshold():
    grads = {"a": np.array([0.3, 0.4])}
    norm = nn.clip_global_norm(grads, 5.0)
    assert norm == pytest.approx(0.5)
    np.testing.assert_array_equal(grads["a"], [0.3, 0.4])
