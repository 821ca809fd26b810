import numpy as np
import pytest

from mecpriv.nn import (Adam, CheckpointError, Dense, GRU, NetworkSpec, SGD,
                        backward, clone_params, forward, forward_step,
                        gradient_check, init_hidden, init_params,
                        load_checkpoint, polyak_update, save_checkpoint,
                        zeros_like_params)

GRU_SPEC = NetworkSpec(input_dim=4, layers=(GRU(6), Dense(5, "relu"),
                                            Dense(3, "identity")))
DENSE_SPEC = NetworkSpec(input_dim=6, layers=(
    Dense(8, "relu"), Dense(8, "relu"), Dense(4, "identity")))


def random_net(spec, seed=0):
    rng = np.random.default_rng(seed)
    return init_params(spec, rng), rng


class TestSpec:
    def test_last_layer_must_be_identity_dense(self):
        with pytest.raises(ValueError):
            NetworkSpec(input_dim=3, layers=(Dense(4, "relu"),))
        with pytest.raises(ValueError):
            NetworkSpec(input_dim=3, layers=(GRU(4),))

    def test_bad_activation_rejected(self):
        with pytest.raises(ValueError):
            NetworkSpec(input_dim=3, layers=(Dense(4, "tanh"),
                                             Dense(2, "identity")))

    def test_default_recurrent_stack(self):
        from mecpriv.agents import AgentConfig, drqn_network_spec
        from mecpriv.env import EnvParams
        spec = drqn_network_spec(EnvParams(), AgentConfig())
        assert [type(l).__name__ for l in spec.layers] == \
            ["GRU"] * 3 + ["Dense"] * 3
        assert [l.units for l in spec.layers] == [128, 128, 128, 128, 128, 54]
        assert spec.layers[-1].activation == "identity"


class TestForward:
    def test_zero_gru_params_halve_hidden(self):
        spec = NetworkSpec(input_dim=3, layers=(GRU(4), Dense(4, "identity")))
        params = zeros_like_params(init_params(spec, np.random.default_rng(0)))
        v = np.array([[0.3, -0.2, 0.9, 0.5]])
        x = np.array([[[1.0, 2.0, -1.0]]])
        _, h, _ = forward(spec, params, x, h0=[v], collect_cache=False)
        # z = sigmoid(0) = 0.5 and candidate tanh(0) = 0, so h' = 0.5 * v
        assert np.allclose(h[0], 0.5 * v)

    def test_identity_dense_passthrough(self):
        spec = NetworkSpec(input_dim=3, layers=(Dense(3, "identity"),))
        params = zeros_like_params(init_params(spec, np.random.default_rng(0)))
        params[0]["w"] = np.eye(3)
        xs = np.random.default_rng(1).standard_normal((4, 2, 3))
        out, _, _ = forward(spec, params, xs, collect_cache=False)
        assert np.array_equal(out, xs)

    def test_sequence_equals_threaded_steps_bitwise(self):
        params, rng = random_net(GRU_SPEC)
        xs = rng.standard_normal((7, 2, 4))
        full, h_full, _ = forward(GRU_SPEC, params, xs, collect_cache=False)
        h = None
        outs = []
        for t in range(7):
            y, h = forward_step(GRU_SPEC, params, xs[t], h)
            outs.append(y)
        assert np.array_equal(full, np.stack(outs))
        assert all(np.array_equal(a, b) for a, b in zip(h_full, h))

    def test_length_one_equals_single_step(self):
        params, rng = random_net(GRU_SPEC, 3)
        x = rng.standard_normal((1, 5, 4))
        out_seq, h_seq, _ = forward(GRU_SPEC, params, x, collect_cache=False)
        out_one, h_one = forward_step(GRU_SPEC, params, x[0], None)
        assert np.array_equal(out_seq[0], out_one)
        assert np.array_equal(h_seq[0], h_one[0])

    def test_shape_mismatch_rejected(self):
        params, rng = random_net(GRU_SPEC)
        with pytest.raises(ValueError):
            forward(GRU_SPEC, params, rng.standard_normal((3, 2, 5)))
        with pytest.raises(ValueError):
            forward(GRU_SPEC, params, rng.standard_normal((3, 2, 4)),
                    h0=[np.zeros((2, 7))])

    def test_hidden_state_bounded(self):
        params, rng = random_net(GRU_SPEC, 5)
        xs = 10.0 * rng.standard_normal((50, 3, 4))
        _, h, _ = forward(GRU_SPEC, params, xs, collect_cache=False)
        assert np.all(np.abs(h[0]) < 1.0)

    def test_deterministic_given_seed(self):
        a, _ = random_net(GRU_SPEC, 11)
        b, _ = random_net(GRU_SPEC, 11)
        xs = np.random.default_rng(2).standard_normal((4, 2, 4))
        out_a, _, _ = forward(GRU_SPEC, a, xs, collect_cache=False)
        out_b, _, _ = forward(GRU_SPEC, b, xs, collect_cache=False)
        assert np.array_equal(out_a, out_b)


class TestBackward:
    def test_zero_output_gradient_gives_zero_grads(self):
        params, rng = random_net(GRU_SPEC, 7)
        xs = rng.standard_normal((5, 2, 4))
        out, _, cache = forward(GRU_SPEC, params, xs)
        grads = backward(cache, np.zeros_like(out))
        assert all(np.all(g == 0.0) for layer in grads for g in layer.values())

    def test_linear_layer_closed_form(self):
        spec = NetworkSpec(input_dim=3, layers=(Dense(2, "identity"),))
        params, rng = random_net(spec, 1)
        x = rng.standard_normal((1, 4, 3))
        out, _, cache = forward(spec, params, x)
        dy = rng.standard_normal(out.shape)
        grads = backward(cache, dy)
        assert np.allclose(grads[0]["w"], x[0].T @ dy[0], atol=1e-15)
        assert np.allclose(grads[0]["b"], dy[0].sum(axis=0), atol=1e-15)

    def test_gradcheck_dense_only(self):
        assert gradient_check(DENSE_SPEC, 7) <= 1e-6

    def test_gradcheck_gru(self):
        spec = NetworkSpec(input_dim=5, layers=(GRU(4), Dense(4, "identity")))
        assert gradient_check(spec, 7, seq_len=6) <= 1e-4

    def test_gradcheck_stacked(self):
        spec = NetworkSpec(input_dim=5, layers=(
            GRU(4), GRU(3), Dense(6, "relu"), Dense(4, "identity")))
        assert gradient_check(spec, 11, seq_len=5) <= 1e-4

    def test_corrupted_gradient_detected(self):
        # negative control: a broken analytic gradient must show up
        spec = NetworkSpec(input_dim=3, layers=(Dense(3, "identity"),))
        params, rng = random_net(spec, 2)
        xs = rng.standard_normal((2, 1, 3))
        target = rng.standard_normal((2, 1, 3))
        out, _, cache = forward(spec, params, xs)
        grads = backward(cache, out - target)
        grads[0]["w"][0, 0] += 0.5

        def loss():
            o, _, _ = forward(spec, params, xs, collect_cache=False)
            return 0.5 * float(np.sum((o - target) ** 2))

        orig = params[0]["w"][0, 0]
        params[0]["w"][0, 0] = orig + 1e-5
        up = loss()
        params[0]["w"][0, 0] = orig - 1e-5
        down = loss()
        params[0]["w"][0, 0] = orig
        numeric = (up - down) / 2e-5
        rel = abs(grads[0]["w"][0, 0] - numeric) / max(
            abs(grads[0]["w"][0, 0]), abs(numeric))
        assert rel > 1e-2

    def test_gradient_shape_mismatch_rejected(self):
        params, rng = random_net(GRU_SPEC, 9)
        xs = rng.standard_normal((4, 2, 4))
        out, _, cache = forward(GRU_SPEC, params, xs)
        with pytest.raises(ValueError):
            backward(cache, np.zeros((4, 2, 5)))
        with pytest.raises(ValueError):
            backward(cache, np.zeros((3, 2, 3)))


class TestOptim:
    def test_sgd_zero_gradient_no_change(self):
        p = [{"w": np.array([1.0, 2.0])}]
        out = SGD(0.1).step(p, [{"w": np.zeros(2)}])
        assert np.array_equal(out[0]["w"], p[0]["w"])

    def test_sgd_scalar_update(self):
        out = SGD(0.1).step([{"w": np.array([1.0])}], [{"w": np.array([2.0])}])
        assert out[0]["w"][0] == pytest.approx(0.8)

    def test_adam_first_step_magnitude(self):
        # bias-corrected first step moves by about lr regardless of scale
        for c in (0.1, 3.0, 250.0):
            out = Adam(0.01).step([{"w": np.array([1.0])}],
                                  [{"w": np.array([c])}])
            assert out[0]["w"][0] == pytest.approx(1.0 - 0.01, abs=1e-6)

    def test_nonfinite_gradient_rejected(self):
        for opt in (SGD(0.1), Adam(0.1)):
            with pytest.raises(ValueError):
                opt.step([{"w": np.array([1.0])}],
                         [{"w": np.array([np.nan])}])

    def test_polyak_endpoints(self):
        tgt = [{"w": np.array([0.0])}]
        onl = [{"w": np.array([1.0])}]
        assert polyak_update(tgt, onl, 0.0)[0]["w"][0] == 1.0
        assert polyak_update(tgt, onl, 1.0)[0]["w"][0] == 0.0
        assert polyak_update(tgt, onl, 0.5)[0]["w"][0] == 0.5

    def test_polyak_validation(self):
        tgt = [{"w": np.array([0.0])}]
        with pytest.raises(ValueError):
            polyak_update(tgt, [{"w": np.zeros(2)}], 0.5)
        with pytest.raises(ValueError):
            polyak_update(tgt, tgt, 1.5)


class TestCheckpoint:
    def test_round_trip_byte_exact(self, tmp_path):
        params, _ = random_net(GRU_SPEC, 13)
        first = tmp_path / "a.qnet"
        second = tmp_path / "b.qnet"
        save_checkpoint(first, GRU_SPEC, params)
        spec2, params2 = load_checkpoint(first)
        assert spec2 == GRU_SPEC
        assert all(np.array_equal(a[k], b[k])
                   for a, b in zip(params, params2) for k in a)
        save_checkpoint(second, spec2, params2)
        assert first.read_bytes() == second.read_bytes()

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.qnet"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 16)
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "trunc.qnet"
        params, _ = random_net(DENSE_SPEC, 1)
        save_checkpoint(path, DENSE_SPEC, params)
        path.write_bytes(path.read_bytes()[:-9])
        with pytest.raises(CheckpointError):
            load_checkpoint(path)


class TestInit:
    def test_biases_zero_kernels_bounded(self):
        params, _ = random_net(GRU_SPEC, 21)
        for layer, shapes in zip(params, [l for l in params]):
            for name, arr in layer.items():
                if name.startswith("b"):
                    assert np.all(arr == 0.0)
                else:
                    fan_in, fan_out = arr.shape
                    lim = np.sqrt(6.0 / (fan_in + fan_out))
                    assert np.all(np.abs(arr) <= lim)

    def test_clone_is_deep(self):
        params, _ = random_net(DENSE_SPEC, 4)
        copy = clone_params(params)
        copy[0]["w"][0, 0] += 1.0
        assert params[0]["w"][0, 0] != copy[0]["w"][0, 0]

    def test_init_hidden_shapes(self):
        h = init_hidden(GRU_SPEC, 3)
        assert len(h) == 1 and h[0].shape == (3, 6)
        assert np.all(h[0] == 0.0)
