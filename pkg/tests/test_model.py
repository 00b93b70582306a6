"""Model stages: shape contracts, causality, sampling, and training behavior."""

import numpy as np
import pytest

from guilget.corpus import build_samples, make_batches, synth_corpus
from guilget.graph import parse_ag
from guilget.model.batching import collate, destandardize, standardize
from guilget.model.config import ModelConfig, TrainConfig
from guilget.model.losses import masked_token_selection
from guilget.model.sampling import generate_layout, sample_bbox, sample_head
from guilget.model.stages import GuilgetModel
from guilget.model.trainer import train
from guilget.nn.layers import padding_bias
from guilget.nn.optim import Adam
from guilget.nn.tensor import Tensor, no_grad
from guilget.tokens import SequenceTooLongError


@pytest.fixture(scope="module")
def small_cfg():
    return ModelConfig(d_model=32, ffn_dim=48, n_mixtures=3)


@pytest.fixture(scope="module")
def batch(small_cfg):
    recs = synth_corpus(3, seed=9)
    samples = build_samples(recs, small_cfg, seed=0)
    return collate(samples)


@pytest.fixture(scope="module")
def model(small_cfg):
    return GuilgetModel(small_cfg, seed=1)


class TestPredictor:
    def test_shapes(self, model, batch, small_cfg):
        out = model.predictor(
            batch.word, batch.object_ids, batch.relation, batch.type_ids,
            batch.parent, batch.attn_bias,
        )
        b, t = batch.word.shape
        assert out.features.shape == (b, t, small_cfg.d_model)
        assert out.sizes.shape == (b, t, 2)
        assert out.positions.shape == (b, t, 2)
        assert out.recon["word"].shape == (b, t, small_cfg.word_vocab)
        assert out.recon["type"].shape == (b, t, small_cfg.type_vocab)

    def test_too_long_sequence_rejected(self, small_cfg):
        recs = synth_corpus(1, seed=0)
        with pytest.raises(SequenceTooLongError):
            build_samples(recs, ModelConfig(max_seq_len=8, relationship_vocab=3), seed=0)

    def test_equal_mask_seed_masks_identical_positions(self, batch, small_cfg):
        a = masked_token_selection(batch.maskable, small_cfg.mask_rate, np.random.default_rng(5))
        b = masked_token_selection(batch.maskable, small_cfg.mask_rate, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)
        assert a.sum() > 0
        assert np.all(batch.maskable[a])


class TestGenerator:
    def test_shapes(self, model, batch, small_cfg):
        out = model.predictor(
            batch.word, batch.object_ids, batch.relation, batch.type_ids,
            batch.parent, batch.attn_bias,
        )
        gen = model.generator(
            out.features, out.sizes, out.positions, batch.prev_std, batch.attn_bias
        )
        b, t = batch.word.shape
        k = small_cfg.n_mixtures
        assert gen.context.shape == (b, t, small_cfg.d_model)
        for head in (gen.position_head, gen.size_head):
            assert head.log_weights.shape == (b, t, k)
            assert head.mean.shape == (b, t, k, 2)
            assert head.sigma.shape == (b, t, k, 2)
            assert head.corr.shape == (b, t, k)
            np.testing.assert_allclose(np.exp(head.log_weights.data).sum(-1), 1.0, atol=1e-9)
            assert np.all(head.sigma.data > 0)
            assert np.all(np.abs(head.corr.data) < 1.0)

    def test_causal_in_teacher_boxes(self, model, batch):
        out = model.predictor(
            batch.word, batch.object_ids, batch.relation, batch.type_ids,
            batch.parent, batch.attn_bias,
        )
        base = model.generator(
            out.features, out.sizes, out.positions, batch.prev_std, batch.attn_bias
        ).context.data
        t_cut = 6
        prev2 = batch.prev_std.copy()
        prev2[:, t_cut + 1 :] += 17.0  # perturb future teacher boxes only
        pert = model.generator(
            out.features, out.sizes, out.positions, prev2, batch.attn_bias
        ).context.data
        np.testing.assert_allclose(pert[:, : t_cut + 1], base[:, : t_cut + 1], atol=1e-10)

    def test_frozen_model_is_deterministic(self, model, batch):
        out = model.predictor(
            batch.word, batch.object_ids, batch.relation, batch.type_ids,
            batch.parent, batch.attn_bias,
        )
        a = model.generator(out.features, out.sizes, out.positions, batch.prev_std, batch.attn_bias)
        b = model.generator(out.features, out.sizes, out.positions, batch.prev_std, batch.attn_bias)
        np.testing.assert_array_equal(a.context.data, b.context.data)

    def test_inference_loop_matches_teacher_forced_pass(self, model, small_cfg):
        """Feeding the loop's own sampled boxes as teachers reproduces c."""
        recs = synth_corpus(1, seed=4)
        sample = build_samples(recs, small_cfg, seed=0)[0]
        graph = sample.graph
        t_len = len(sample.tokens)
        word = sample.tokens.word_ids[None]
        bias = padding_bias(np.ones((1, t_len), dtype=bool))
        with no_grad():
            out = model.predictor(
                word, sample.tokens.object_ids[None], sample.tokens.relationship_ids[None],
                sample.tokens.type_ids[None], sample.tokens.parent_ids[None], bias,
            )
            boxes_std = np.zeros((t_len, 4))
            prev = np.zeros((1, t_len, 4))
            rng = np.random.default_rng(0)
            final = None
            for t in range(t_len):
                if t > 0:
                    prev[0, t] = boxes_std[t - 1]
                gen = model.generator(out.features, out.sizes, out.positions, prev, bias)
                final = gen
                role = int(sample.tokens.type_ids[t])
                if role in (1, 3):
                    boxes_std[t, :2] = gen.position_head.mean.data[0, t, 0]
                    boxes_std[t, 2:] = gen.size_head.mean.data[0, t, 0]
                elif role == 2:
                    boxes_std[t, :2] = gen.position_head.mean.data[0, t, 0]
            teacher_prev = np.zeros((1, t_len, 4))
            teacher_prev[0, 1:] = boxes_std[:-1]
            teacher_pass = model.generator(out.features, out.sizes, out.positions, teacher_prev, bias)
        np.testing.assert_allclose(final.context.data, teacher_pass.context.data, atol=1e-12)


class TestRefiner:
    def test_identity_at_init(self, small_cfg, batch):
        fresh = GuilgetModel(small_cfg, seed=7)
        ctx = Tensor(np.random.default_rng(0).standard_normal((batch.size, batch.seq_len, small_cfg.d_model)))
        boxes = Tensor(batch.target_std)
        refined = fresh.refiner(ctx, boxes, batch.attn_bias)
        np.testing.assert_array_equal(refined.data, batch.target_std)

    def test_gradient_flows_to_both_inputs(self, small_cfg, batch):
        fresh = GuilgetModel(small_cfg, seed=7)
        # randomize the zero-initialized output head so gradients pass through
        rng = np.random.default_rng(3)
        fresh.refiner.delta_head.weight.data = rng.standard_normal(
            fresh.refiner.delta_head.weight.data.shape
        ) * 0.1
        ctx = Tensor(rng.standard_normal((batch.size, batch.seq_len, small_cfg.d_model)), requires_grad=True)
        boxes = Tensor(batch.target_std, requires_grad=True)
        out = fresh.refiner(ctx, boxes, batch.attn_bias)
        (out * out).sum().backward()
        assert ctx.grad is not None and np.abs(ctx.grad).max() > 0
        assert boxes.grad is not None and np.abs(boxes.grad).max() > 0

    def test_shape_preserved(self, model, batch, small_cfg):
        ctx = Tensor(np.zeros((batch.size, batch.seq_len, small_cfg.d_model)))
        refined = model.refiner(ctx, Tensor(batch.target_std), batch.attn_bias)
        assert refined.shape == (batch.size, batch.seq_len, 4)


class TestSampling:
    def test_temperature_zero_returns_dominant_mean(self):
        rng = np.random.default_rng(0)
        out = sample_head(
            np.array([0.2, 0.7, 0.1]),
            np.array([[0, 0], [3, 4], [9, 9]], dtype=float),
            np.ones((3, 2)),
            np.zeros(3),
            0.0,
            rng,
        )
        np.testing.assert_array_equal(out, [3, 4])

    def test_same_seed_identical(self):
        args = (
            np.array([0.5, 0.5]),
            np.array([[0, 0], [1, 1]], dtype=float),
            np.ones((2, 2)) * 0.3,
            np.array([0.2, -0.2]),
            0.8,
        )
        a = sample_head(*args, np.random.default_rng(42))
        b = sample_head(*args, np.random.default_rng(42))
        np.testing.assert_array_equal(a, b)

    def test_negative_temperature_rejected(self):
        with pytest.raises(ValueError):
            sample_head(np.ones(1), np.zeros((1, 2)), np.ones((1, 2)), np.zeros(1), -1.0, np.random.default_rng(0))

    def test_monte_carlo_mean(self):
        """Empirical mean of 1e5 draws within 4*sigma/sqrt(n) of the mean."""
        rng = np.random.default_rng(123)
        mu = np.array([[0.3, -0.2]])
        sigma = np.array([[0.7, 1.1]])
        n = 100_000
        draws = np.array(
            [sample_head(np.ones(1), mu, sigma, np.array([0.4]), 1.0, rng) for _ in range(n)]
        )
        bound = 4.0 * sigma[0] / np.sqrt(n)
        err = np.abs(draws.mean(axis=0) - mu[0])
        assert np.all(err < bound), (err, bound)

    def test_sample_bbox_clamps_sizes(self):
        rng = np.random.default_rng(5)
        head = (
            np.array([1.0]),
            np.array([[-3.0, -3.0]]),  # deeply negative standardized sizes
            np.ones((1, 2)) * 1e-6,
            np.zeros(1),
        )
        box = sample_bbox(head, head, 0.0, rng)
        assert box.w >= 0 and box.h >= 0


class TestGeneration:
    def test_reproducible_and_covers_components(self, model, small_cfg):
        recs = synth_corpus(1, seed=21)
        sample = build_samples(recs, small_cfg, seed=0)[0]
        layouts = generate_layout(model, sample.graph, 3, 0.8, seed=5)
        again = generate_layout(model, sample.graph, 3, 0.8, seed=5)
        assert layouts == again
        assert len(layouts) == 3
        ids = {c.instance_id for c in sample.graph.components}
        assert set(layouts[0]) == ids
        for box in layouts[0].values():
            assert 0 <= box.x <= 1 and 0 <= box.y <= 1
            assert box.w >= 0 and box.x + box.w <= 1 + 1e-9
            assert box.h >= 0 and box.y + box.h <= 1 + 1e-9

    def test_temperature_zero_identical_across_seeds(self, model, small_cfg):
        recs = synth_corpus(1, seed=22)
        sample = build_samples(recs, small_cfg, seed=0)[0]
        a = generate_layout(model, sample.graph, 1, 0.0, seed=1)[0]
        b = generate_layout(model, sample.graph, 1, 0.0, seed=2)[0]
        assert a == b

    def test_single_occurrence_average_is_identity(self, model, small_cfg):
        """A component appearing once gets exactly its refined box."""
        graph = parse_ag(
            {
                "components": [
                    {"id": 1, "class": "CONTAINER"},
                    {"id": 2, "class": "BUTTON"},
                ],
                "relations": [{"s": 2, "p": "inside", "o": 1}],
            }
        )
        layout = generate_layout(model, graph, 1, 0.0, seed=0)[0]
        assert set(layout) == {1, 2}


class TestBoxCollection:
    def test_multiple_occurrences_averaged(self):
        from guilget.model.sampling import _collect_boxes

        refined = np.zeros((5, 4))
        refined[1] = standardize(np.array([0.1, 0.2, 0.2, 0.2]))
        refined[3] = standardize(np.array([0.3, 0.4, 0.2, 0.2]))
        step_instance = np.array([-1, 7, -1, 7, -1])
        boxes = _collect_boxes(refined, step_instance)
        assert boxes[7].x == pytest.approx(0.2)
        assert boxes[7].y == pytest.approx(0.3)

    def test_single_occurrence_is_identity(self):
        from guilget.model.sampling import _collect_boxes

        refined = np.zeros((2, 4))
        refined[1] = standardize(np.array([0.25, 0.5, 0.1, 0.2]))
        boxes = _collect_boxes(refined, np.array([-1, 4]))
        assert boxes[4].x == pytest.approx(0.25)
        assert boxes[4].w == pytest.approx(0.1)

    def test_clamped_to_screen(self):
        from guilget.model.sampling import _collect_boxes

        refined = standardize(np.array([[1.2, -0.3, 0.6, 2.0]]))[None][0]
        boxes = _collect_boxes(refined.reshape(1, 4), np.array([2]))
        box = boxes[2]
        assert 0 <= box.x <= 1 and 0 <= box.y <= 1
        assert box.x + box.w <= 1 + 1e-12
        assert box.y + box.h <= 1 + 1e-12


class TestMaskedReconstruction:
    def test_full_supervision_overfits_to_input_ids(self, small_cfg):
        """With no corruption and every token step supervised, 200 steps on
        one batch drive the reconstruction argmax to the input ids."""
        from guilget.model.losses import predictor_loss

        recs = synth_corpus(2, seed=55)
        samples = build_samples(recs, small_cfg, seed=0)
        batch = collate(samples)
        model = GuilgetModel(small_cfg, seed=0)
        supervised = batch.maskable.copy()  # every s/p/o step, words left intact
        opt = Adam(model.parameters(), lr=1e-3)
        for _ in range(200):
            opt.zero_grad()
            out = model.predictor(
                batch.word, batch.object_ids, batch.relation, batch.type_ids,
                batch.parent, batch.attn_bias,
            )
            sem, box = predictor_loss(out, batch, supervised)
            (sem + box).backward()
            opt.step()
        out = model.predictor(
            batch.word, batch.object_ids, batch.relation, batch.type_ids,
            batch.parent, batch.attn_bias,
        )
        for stream, ids in (
            ("word", batch.word),
            ("object", batch.object_ids),
            ("type", batch.type_ids),
            ("parent", batch.parent),
        ):
            predicted = out.recon[stream].data.argmax(-1)
            assert np.array_equal(predicted[supervised], ids[supervised]), stream


class TestStandardization:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        v = rng.random((5, 4))
        np.testing.assert_allclose(destandardize(standardize(v)), v, atol=1e-12)

    def test_target_consistency_with_disparity(self, small_cfg):
        recs = synth_corpus(1, seed=30)
        sample = build_samples(recs, small_cfg, seed=0)[0]
        boxes = {c.instance_id: c.bbox for c in sample.graph.components}
        for k, (s, p, o) in enumerate(sample.tokens.spans()):
            sub = boxes[int(sample.tokens.step_instance[s])]
            obj = boxes[int(sample.tokens.step_instance[o])]
            # standardized disparity equals the predicate target
            np.testing.assert_allclose(
                sample.target_std[p, :2],
                [
                    sample.target_std[o, 0] - sample.target_std[s, 0],
                    sample.target_std[o, 1] - sample.target_std[s, 1],
                ],
                atol=1e-12,
            )
            assert sample.target_std[p, 2] == 0 and sample.target_std[p, 3] == 0


class TestTraining:
    def test_loss_decreases_on_fixed_batch(self, small_cfg):
        recs = synth_corpus(4, seed=40)
        samples = build_samples(recs, small_cfg, seed=0)
        batches = make_batches(samples, 4, seed=0)
        model = GuilgetModel(small_cfg, seed=0)
        cfg = TrainConfig(model=small_cfg, steps=50, batch_size=4, seed=0)
        history = train(model, batches, cfg)
        first = np.mean([h["total"] for h in history[:5]])
        last = np.mean([h["total"] for h in history[-5:]])
        assert last < first * 0.7

    def test_identical_seeds_identical_reports(self, small_cfg):
        def run():
            recs = synth_corpus(2, seed=41)
            samples = build_samples(recs, small_cfg, seed=0)
            batches = make_batches(samples, 2, seed=0)
            model = GuilgetModel(small_cfg, seed=0)
            cfg = TrainConfig(model=small_cfg, steps=5, batch_size=2, seed=0)
            return train(model, batches, cfg)

        assert run() == run()
