"""Autodiff core: forward values and gradients versus finite differences."""

import numpy as np
import pytest

from guilget.nn.optim import grad_check
from guilget.nn.tensor import (
    Tensor,
    concat,
    log_softmax,
    logsumexp,
    maximum,
    minimum,
    no_grad,
    segment_sum,
    select_last,
    softmax,
    take,
    where,
)


def leaf(rng, *shape):
    return Tensor(rng.standard_normal(shape), requires_grad=True)


def check(loss_fn, params, tol=1e-3, seed=0):
    report = grad_check(loss_fn, params, tol=tol, samples_per_param=6, seed=seed)
    assert report.passed, report.per_param
    return report


class TestForwardValues:
    def test_softmax_uniform(self):
        out = softmax(Tensor(np.zeros(4)), axis=-1)
        np.testing.assert_allclose(out.data, 0.25)

    def test_softmax_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        out = softmax(Tensor(rng.standard_normal((3, 5, 7))), axis=-1)
        np.testing.assert_allclose(out.data.sum(axis=-1), 1.0, atol=1e-9)

    def test_log_softmax_matches_log_of_softmax(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((4, 6)) * 30  # large logits stay stable
        np.testing.assert_allclose(
            log_softmax(Tensor(x)).data, np.log(softmax(Tensor(x)).data), atol=1e-9
        )

    def test_logsumexp_extreme_values(self):
        x = Tensor(np.array([1000.0, 1000.0]))
        assert logsumexp(x, axis=0).item() == pytest.approx(1000.0 + np.log(2.0))

    def test_matmul_shape_mismatch_names_shapes(self):
        with pytest.raises(ValueError, match=r"\(2, 3\).*\(2, 3\)"):
            Tensor(np.ones((2, 3))) @ Tensor(np.ones((2, 3)))

    def test_backward_requires_scalar(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with pytest.raises(ValueError, match="scalar"):
            (x * 2).backward()

    def test_no_grad_skips_graph(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with no_grad():
            y = (x * 2).sum()
        assert not y.requires_grad


class TestGradients:
    def test_matmul_against_finite_differences(self):
        rng = np.random.default_rng(0)
        a = leaf(rng, 3, 4)
        b = leaf(rng, 4, 2)
        check(lambda: (a @ b).sum(), {"a": a, "b": b})

    def test_batched_matmul_broadcast(self):
        rng = np.random.default_rng(1)
        a = leaf(rng, 5, 3, 4)
        b = leaf(rng, 4, 2)
        w = rng.standard_normal((5, 3, 2))
        check(lambda: ((a @ b) * w).sum(), {"a": a, "b": b})

    @pytest.mark.parametrize(
        "name,fn",
        [
            ("add", lambda a, b: a + b),
            ("sub", lambda a, b: a - b),
            ("mul", lambda a, b: a * b),
            ("div", lambda a, b: a / (b * b + 1.0)),
            ("maximum", maximum),
            ("minimum", minimum),
        ],
    )
    def test_binary_ops_with_broadcasting(self, name, fn):
        rng = np.random.default_rng(abs(hash(name)) % 2**32)
        a = leaf(rng, 4, 3)
        b = leaf(rng, 3)
        w = rng.standard_normal((4, 3))
        check(lambda: (fn(a, b) * w).sum(), {"a": a, "b": b})

    @pytest.mark.parametrize(
        "name,fn",
        [
            ("exp", lambda x: x.exp()),
            ("log", lambda x: (x * x + 1.0).log()),
            ("sqrt", lambda x: (x * x + 1.0).sqrt()),
            ("tanh", lambda x: x.tanh()),
            ("relu", lambda x: x.relu()),
            ("abs", lambda x: x.abs()),
            ("pow", lambda x: (x * x + 1.0) ** 1.5),
            ("neg", lambda x: -x),
            ("softmax", lambda x: softmax(x, axis=-1)),
            ("log_softmax", lambda x: log_softmax(x, axis=-1)),
            ("logsumexp", lambda x: logsumexp(x, axis=-1)),
        ],
    )
    def test_unary_ops(self, name, fn):
        rng = np.random.default_rng(abs(hash(name)) % 2**32)
        x = leaf(rng, 3, 5)
        weights = rng.standard_normal(np.asarray(fn(x).data).shape)
        check(lambda: (fn(x) * weights).sum(), {"x": x}, seed=3)

    def test_reductions_and_reshape(self):
        rng = np.random.default_rng(7)
        x = leaf(rng, 2, 3, 4)
        check(
            lambda: (x.sum(axis=1) * 2.0).mean() + x.reshape(6, 4).swapaxes(0, 1).sum(),
            {"x": x},
        )

    def test_getitem_slices(self):
        rng = np.random.default_rng(8)
        x = leaf(rng, 4, 6)
        check(lambda: (x[1:3, ::2] * 3.0).sum() + x[0, 0], {"x": x})

    def test_concat(self):
        rng = np.random.default_rng(9)
        a = leaf(rng, 2, 3)
        b = leaf(rng, 2, 5)
        w = rng.standard_normal((2, 8))
        check(lambda: (concat([a, b], axis=-1) * w).sum(), {"a": a, "b": b})

    def test_where(self):
        rng = np.random.default_rng(10)
        a = leaf(rng, 4, 4)
        b = leaf(rng, 4, 4)
        cond = rng.random((4, 4)) > 0.5
        check(lambda: where(cond, a * 2.0, b * b).sum(), {"a": a, "b": b})

    def test_take_with_repeats(self):
        rng = np.random.default_rng(11)
        x = leaf(rng, 5, 3)
        idx = np.array([0, 2, 2, 4, 0])
        w = rng.standard_normal((5, 3))
        check(lambda: (take(x, idx) * w).sum(), {"x": x})

    def test_select_last(self):
        rng = np.random.default_rng(12)
        x = leaf(rng, 3, 4, 6)
        ids = rng.integers(0, 6, size=(3, 4))
        w = rng.standard_normal((3, 4))
        check(lambda: (select_last(x, ids) * w).sum(), {"x": x})

    def test_segment_sum(self):
        rng = np.random.default_rng(13)
        x = leaf(rng, 7, 2)
        seg = np.array([0, 1, 1, 2, 0, 2, 2])
        w = rng.standard_normal((3, 2))
        check(lambda: (segment_sum(x, seg, 3) * w).sum(), {"x": x})
        out = segment_sum(Tensor(np.ones((7, 2))), seg, 3)
        np.testing.assert_allclose(out.data[:, 0], [2, 2, 3])

    def test_randomized_shapes_composite(self):
        rng = np.random.default_rng(99)
        for trial in range(5):
            dims = tuple(int(d) for d in rng.integers(2, 6, size=2))
            x = leaf(rng, *dims)
            y = leaf(rng, dims[1], 3)
            check(
                lambda: softmax(x @ y, axis=-1).log().sum() + (x * x).mean(),
                {"x": x, "y": y},
                seed=trial,
            )

    def test_reused_node_accumulates(self):
        x = Tensor(np.array([3.0]), requires_grad=True)
        y = x * x + x * 4.0  # dy/dx = 2x + 4 = 10
        y.backward(np.array([1.0]))
        np.testing.assert_allclose(x.grad, [10.0])
