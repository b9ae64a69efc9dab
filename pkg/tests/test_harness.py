"""Benchmark harness: splits, seeding, reports."""

import json

import numpy as np
import pytest

from uniclass.datasets import ClassificationType, Dataset
from uniclass.errors import ConfigurationError
from uniclass.harness import (
    RunConfig,
    resolve_initial_block,
    run_kfold,
    run_stream_benchmark,
    train_streamed,
)
from uniclass.decision import FallbackPolicy, decide_batch
from uniclass.io import fit_apply_normalizer
from uniclass.metrics import single_label_accuracy
from uniclass.network import NetworkConfig, init_block, init_layer, predict_raw

from _synthetic import prototype_stream, random_problem


@pytest.fixture(scope="module")
def easy_stream():
    return prototype_stream(n_samples=240, n_features=6, n_classes=3, seed=11)


def noise_dataset(n_samples: int, n_features: int = 5, n_labels: int = 4, seed: int = 0):
    features, targets = random_problem(n_samples, n_features, n_labels, seed)
    return Dataset(features, targets, declared_type=ClassificationType.MULTILABEL)


class TestRunConfig:
    def test_defaults_valid(self):
        cfg = RunConfig()
        assert cfg.folds == 10
        assert cfg.base_shuffle_seed() == cfg.seed

    def test_shuffle_seed_override(self):
        assert RunConfig(seed=4, shuffle_seed=9).base_shuffle_seed() == 9

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"folds": 1},
            {"repetitions": 0},
            {"n_hidden": 0},
            {"chunk_size": 0},
            {"ridge": -1.0},
            {"ridge": float("nan")},
            {"initial_block": 0},
            {"seed": -1},
            {"fallback_mode": "random"},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigurationError):
            RunConfig(**kwargs)


class TestInitialBlock:
    def test_auto_floor(self):
        assert resolve_initial_block(None, train_size=500, n_hidden=20) == 50

    def test_auto_tracks_hidden_width(self):
        assert resolve_initial_block(None, train_size=500, n_hidden=80) == 80

    def test_auto_capped_by_train(self):
        assert resolve_initial_block(None, train_size=30, n_hidden=80) == 30

    def test_explicit_passthrough(self):
        assert resolve_initial_block(64, train_size=100, n_hidden=10) == 64

    def test_explicit_too_large(self):
        with pytest.raises(ConfigurationError, match="init-block"):
            resolve_initial_block(101, train_size=100, n_hidden=10)


class TestTrainStreamed:
    def test_chunk_count(self, easy_stream):
        config = NetworkConfig(
            n_hidden=15, input_dim=6, output_dim=3, activation="sigmoid",
            ridge=1e-6, seed=0,
        )
        model, elapsed, n_chunks = train_streamed(
            config, easy_stream.features, easy_stream.targets, block=60, chunk=25
        )
        assert n_chunks == 8  # 180 remaining rows in chunks of 25
        assert model.samples_seen == 240
        assert elapsed > 0.0

    def test_block_consuming_everything_matches_batch(self, easy_stream):
        config = NetworkConfig(
            n_hidden=15, input_dim=6, output_dim=3, activation="sigmoid",
            ridge=1e-6, seed=0,
        )
        model, _, n_chunks = train_streamed(
            config, easy_stream.features, easy_stream.targets,
            block=len(easy_stream), chunk=10,
        )
        assert n_chunks == 0
        reference = init_block(
            init_layer(config), easy_stream.features, easy_stream.targets, config.ridge
        )
        np.testing.assert_array_equal(
            model.output_weights, reference.output_weights
        )


class TestKFold:
    def test_fold_record_layout(self, easy_stream):
        cfg = RunConfig(folds=3, n_hidden=15, chunk_size=16, seed=2)
        report = run_kfold(cfg, easy_stream)
        assert report.kind == "kfold"
        assert len(report.folds) == 3
        for record in report.folds:
            assert record["n_train"] + record["n_test"] == 240
            assert 0.0 <= record["type_agreement_rate"] <= 1.0
            assert 0.0 <= record["fallback_rate"] <= 1.0
        assert report.dataset["n_samples"] == 240
        assert report.split["folds"] == 3

    def test_easy_problem_scores_well(self, easy_stream):
        cfg = RunConfig(folds=3, n_hidden=25, chunk_size=16, seed=2)
        report = run_kfold(cfg, easy_stream)
        assert report.summary["metrics"]["accuracy"]["mean"] > 0.9
        assert report.summary["type_agreement_rate"]["mean"] > 0.9

    def test_summary_recomputable(self, easy_stream):
        cfg = RunConfig(folds=4, n_hidden=15, chunk_size=16, seed=5, repetitions=2)
        report = run_kfold(cfg, easy_stream)
        assert len(report.folds) == 8
        scores = [r["metrics"]["accuracy"] for r in report.folds]
        cell = report.summary["metrics"]["accuracy"]
        assert cell["mean"] == pytest.approx(np.mean(scores), abs=1e-12)
        assert cell["std"] == pytest.approx(np.std(scores, ddof=1), abs=1e-12)
        total = report.timing["train_time_s"]["total"]
        assert total == pytest.approx(sum(r["train_time_s"] for r in report.folds))

    def test_repetitions_reshuffle(self):
        data = noise_dataset(80, seed=1)
        cfg = RunConfig(folds=2, n_hidden=10, chunk_size=16, seed=5, repetitions=2)
        report = run_kfold(cfg, data)
        assert [r["repetition"] for r in report.folds] == [0, 0, 1, 1]
        # Unlearnable targets leave no chance of metric collisions between
        # two different shuffles.
        first = [r["metrics"] for r in report.folds[:2]]
        second = [r["metrics"] for r in report.folds[2:]]
        assert first != second

    def test_repetition_replayable_in_isolation(self, easy_stream):
        # Repetition r derives both its seeds by adding r, so a fresh
        # single-repetition run started one seed later replays repetition 1.
        combined = run_kfold(
            RunConfig(folds=3, n_hidden=15, chunk_size=16, seed=5, repetitions=2),
            easy_stream,
        )
        solo = run_kfold(
            RunConfig(folds=3, n_hidden=15, chunk_size=16, seed=6), easy_stream
        )

        def stripped(record):
            return {
                k: v
                for k, v in record.items()
                if not k.endswith("_time_s") and k != "repetition"
            }

        rep1 = [stripped(r) for r in combined.folds if r["repetition"] == 1]
        assert rep1 == [stripped(r) for r in solo.folds]

    def test_deterministic_reports(self, easy_stream):
        cfg = RunConfig(folds=3, n_hidden=15, chunk_size=16, seed=7)
        first = run_kfold(cfg, easy_stream).to_json(include_timing=False)
        second = run_kfold(cfg, easy_stream).to_json(include_timing=False)
        assert first == second

    def test_timing_stripped_when_asked(self, easy_stream):
        cfg = RunConfig(folds=2, n_hidden=10, chunk_size=16, seed=0)
        report = run_kfold(cfg, easy_stream)
        bare = report.to_dict(include_timing=False)
        assert "timing" not in bare
        assert all("train_time_s" not in record for record in bare["folds"])
        full = report.to_dict()
        assert "timing" in full
        assert all("train_time_s" in record for record in full["folds"])

    def test_too_few_samples(self):
        tiny = noise_dataset(4, seed=0)
        with pytest.raises(ConfigurationError, match="folds"):
            run_kfold(RunConfig(folds=5, n_hidden=3), tiny)

    def test_dataset_or_path_required(self):
        with pytest.raises(ConfigurationError, match="data"):
            run_kfold(RunConfig(folds=2))

    def test_json_round_trips(self, easy_stream):
        cfg = RunConfig(folds=2, n_hidden=10, chunk_size=16, seed=0)
        report = run_kfold(cfg, easy_stream)
        parsed = json.loads(report.to_json())
        assert parsed["kind"] == "kfold"
        assert parsed["config"]["n_hidden"] == 10


class TestStreamBenchmark:
    def test_trajectory_shape(self, easy_stream):
        cfg = RunConfig(folds=4, n_hidden=20, chunk_size=5, seed=3)
        report = run_stream_benchmark(cfg, easy_stream)
        assert report.kind == "stream-benchmark"
        assert len(report.folds) == 1
        trajectory = report.trajectory
        assert trajectory[0]["samples_seen"] == report.folds[0]["initial_block"]
        assert trajectory[-1]["samples_seen"] == report.folds[0]["n_train"]
        seen = [t["samples_seen"] for t in trajectory]
        assert seen == sorted(seen)

    def test_learning_improves_holdout(self):
        data = prototype_stream(n_samples=1200, n_features=8, n_classes=3, seed=21)
        cfg = RunConfig(folds=5, n_hidden=30, chunk_size=10, seed=3, initial_block=40)
        report = run_stream_benchmark(cfg, data)
        trajectory = report.trajectory
        assert trajectory[-1]["score"] >= trajectory[0]["score"]

    def test_degenerate_block_is_pure_batch(self, easy_stream):
        holdout = 240 // 4
        cfg = RunConfig(
            folds=4, n_hidden=20, chunk_size=5, seed=3, initial_block=240 - holdout
        )
        report = run_stream_benchmark(cfg, easy_stream)
        record = report.folds[0]
        assert record["n_chunks"] == 0
        assert len(report.trajectory) == 1

        # Replay the same split and normalization; batch_train must agree
        # exactly because the initial solve covered every training row.
        order = np.random.default_rng(cfg.seed).permutation(240)
        test_set = easy_stream.subset(order[:holdout])
        train_set = easy_stream.subset(order[holdout:])
        _, train_scaled, test_scaled = fit_apply_normalizer(train_set, test_set)
        network = NetworkConfig(
            n_hidden=20, input_dim=6, output_dim=3, activation="sigmoid",
            ridge=cfg.ridge, seed=cfg.seed,
        )
        model = init_block(
            init_layer(network), train_scaled.features, train_scaled.targets, cfg.ridge
        )
        policy = FallbackPolicy(
            mode="argmax", declared_type=ClassificationType.MULTICLASS
        )
        details = decide_batch(predict_raw(model, test_scaled.features), policy)
        truth = np.argmax(test_scaled.targets, axis=1)
        expected = single_label_accuracy(truth, [next(iter(d.labels)) for d in details])
        assert record["metrics"]["accuracy"] == pytest.approx(expected, abs=1e-12)

    def test_trajectory_point_budget(self):
        data = prototype_stream(n_samples=700, n_features=5, n_classes=2, seed=8)
        cfg = RunConfig(folds=7, n_hidden=10, chunk_size=1, seed=0, initial_block=20)
        report = run_stream_benchmark(cfg, data)
        # 580 single-row updates must be thinned to the checkpoint budget.
        assert len(report.trajectory) <= 202

    def test_too_small(self):
        tiny = noise_dataset(1, seed=0)
        with pytest.raises(ConfigurationError, match="samples"):
            run_stream_benchmark(RunConfig(folds=2, n_hidden=3), tiny)


class TestHumanFormat:
    def test_kfold_table(self, easy_stream):
        cfg = RunConfig(folds=2, n_hidden=10, chunk_size=16, seed=0)
        text = run_kfold(cfg, easy_stream).format_human()
        assert "kfold report" in text
        assert "240 samples" in text
        assert "mean±std" in text
        assert "type identification agreement" in text

    def test_stream_table_mentions_trajectory(self, easy_stream):
        cfg = RunConfig(folds=4, n_hidden=10, chunk_size=8, seed=0)
        text = run_stream_benchmark(cfg, easy_stream).format_human()
        assert "stream trajectory" in text
