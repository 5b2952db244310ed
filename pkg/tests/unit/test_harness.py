"""Unit tests for experiment orchestration and aggregation."""

import json
import math

import pandas as pd
import pytest

from src.gso_solver.exceptions import ConfigError
from src.gso_solver.models.config import ExperimentConfig, ObjectiveKind, SweepSpec
from src.gso_solver.services import harness


def _sk_config(tmp_path, **overrides):
    data = {
        "problem": "sk",
        "sk_n": 8,
        "objective": {"kind": "sk"},
        "gso": {"n_replicas": 4, "max_steps": 40},
        "instances": 3,
        "seed": 1,
        "out_dir": str(tmp_path),
    }
    data.update(overrides)
    return ExperimentConfig.model_validate(data)


@pytest.mark.unit
class TestSummarize:

    def test_examples(self):
        summary = harness.summarize([1.0, 2.0, 3.0])

        assert summary.mean == pytest.approx(2.0)
        assert summary.sem == pytest.approx(0.57735, abs=1e-5)
        assert not summary.single_sample

    def test_constant_values(self):
        summary = harness.summarize([4.0, 4.0, 4.0])

        assert (summary.mean, summary.sem) == (4.0, 0.0)

    def test_single_value_is_flagged(self):
        summary = harness.summarize([-0.7])

        assert summary.mean == -0.7
        assert summary.sem == 0.0
        assert summary.single_sample

    def test_empty(self):
        assert math.isnan(harness.summarize([]).mean)


@pytest.mark.unit
class TestDigestAndParameters:

    def test_digest_ignores_output_settings(self, tmp_path):
        base = _sk_config(tmp_path)

        assert harness.config_digest(base) == harness.config_digest(_sk_config(tmp_path / "other", workers=4))

    def test_digest_tracks_semantic_fields(self, tmp_path):
        base = harness.config_digest(_sk_config(tmp_path))

        assert base != harness.config_digest(_sk_config(tmp_path, seed=2))
        assert base != harness.config_digest(_sk_config(tmp_path, gso={"n_replicas": 4, "max_steps": 41}))
        assert base != harness.config_digest(_sk_config(tmp_path, solver="sa"))

    def test_digest_ignores_blocks_the_solver_does_not_read(self, tmp_path):
        base = harness.config_digest(_sk_config(tmp_path))
        unused = _sk_config(tmp_path, sa={"sweeps": 7}, evo={"t1": 5}, ga={"population": 8},
                            greedy_order="random")
        reseeded = _sk_config(tmp_path, gso={"n_replicas": 4, "max_steps": 40, "seed": 99})

        assert harness.config_digest(unused) == base
        assert harness.config_digest(reseeded) == base

    def test_digest_tracks_blocks_the_solver_reads(self, tmp_path):
        evolved = harness.config_digest(_sk_config(tmp_path, solver="evogso"))
        annealed = harness.config_digest(_sk_config(tmp_path, solver="sa"))

        assert evolved != harness.config_digest(_sk_config(tmp_path, solver="evogso", evo={"t1": 5}))
        assert annealed != harness.config_digest(_sk_config(tmp_path, solver="sa", sa={"sweeps": 7}))
        assert annealed == harness.config_digest(_sk_config(tmp_path, solver="sa", sa={"sweeps": 1000, "seed": 5}))

    def test_unused_blocks_give_identical_records(self, tmp_path):
        first = harness.run_experiment(_sk_config(tmp_path / "a"))[0]
        second = harness.run_experiment(_sk_config(tmp_path / "b", sa={"sweeps": 7}, evo={"t1": 5}))[0]

        assert first.digest == second.digest
        assert first.metrics == second.metrics

    def test_function_digest_uses_lab_fields(self, tmp_path):
        def function_config(**overrides):
            data = {"problem": "testfunction", "function": "sphere", "out_dir": str(tmp_path),
                    "gso": {"n_replicas": 4, "max_steps": 300}}
            data.update(overrides)
            return ExperimentConfig.model_validate(data)

        base = harness.config_digest(function_config())

        assert harness.config_digest(function_config(solver="sa", sa={"sweeps": 7})) == base
        assert harness.config_digest(function_config(gso={"n_replicas": 4, "max_steps": 300,
                                                          "learning_rate": 0.5})) != base

    def test_resolve_aliases_and_paths(self):
        assert harness.resolve_parameter("ncoms") == ["objective", "n_states"]
        assert harness.resolve_parameter("evo.u_inverse") == ["evo", "u_inverse"]
        assert harness.resolve_parameter("seed") == ["seed"]

    def test_unknown_parameter(self):
        with pytest.raises(ConfigError):
            harness.resolve_parameter("colour")
        with pytest.raises(ConfigError):
            harness.resolve_parameter("gso.colour")
        with pytest.raises(ConfigError):
            harness.resolve_parameter("seed.value")

    def test_with_parameter(self, tmp_path):
        cfg = _sk_config(tmp_path)

        assert harness.with_parameter(cfg, "batch", 16).gso.n_replicas == 16
        assert harness.with_parameter(cfg, "t1", "none").evo.t1 is None
        with pytest.raises(ConfigError):
            harness.with_parameter(cfg, "batch", 0)

    def test_expand_sweep(self, tmp_path):
        cfg = _sk_config(tmp_path, solver="evogso", gso={"n_replicas": 16, "max_steps": 40},
                         sweep=SweepSpec(parameter="u_inverse", values=[0.25, 0.125, 0.0625]))

        variants = harness.expand_sweep(cfg)

        assert [v.evo.u_inverse for v, _, _ in variants] == [0.25, 0.125, 0.0625]
        assert {v.seed for v, _, _ in variants} == {1}
        assert len({harness.config_digest(v) for v, _, _ in variants}) == 3

    def test_derive_seed(self):
        assert harness.derive_seed(3, 0, 1) == harness.derive_seed(3, 0, 1)
        assert harness.derive_seed(3, 0, 1) != harness.derive_seed(3, 0, 0)
        assert harness.derive_seed(3, 0, 1) != harness.derive_seed(3, 1, 1)


@pytest.mark.unit
class TestAggregate:

    def test_best_direction(self):
        records = [{"best_metric": 3.0}, {"best_metric": 5.0}, {"best_metric": None}]

        mis = harness.aggregate(ObjectiveKind.MIS, "d", "mis", records, [1.0, 1.0, 1.0])
        mvc = harness.aggregate(ObjectiveKind.MVC, "d", "mvc", records, [1.0, 1.0, 1.0])

        assert mis.best == 5.0
        assert mvc.best == 3.0
        assert mis.infeasible_count == 1
        assert mis.mean == pytest.approx(4.0)
        assert mis.instances == 3

    def test_all_infeasible(self):
        row = harness.aggregate(ObjectiveKind.MVC, "d", "x", [{"best_metric": None}], [0.1])

        assert math.isnan(row.best)
        assert row.infeasible_count == 1

    def test_best_row(self):
        rows = [harness.aggregate(ObjectiveKind.SK, "d", str(i), [{"best_metric": v}], [0.0])
                for i, v in enumerate([-0.5, -0.7, -0.6])]

        assert harness.best_row(rows, ObjectiveKind.SK).label == "1"
        assert harness.best_row(rows, ObjectiveKind.MODULARITY).label == "0"


@pytest.mark.unit
class TestRunExperiment:

    def test_records_and_summary(self, tmp_path):
        cfg = _sk_config(tmp_path)

        rows = harness.run_experiment(cfg)

        assert len(rows) == 1
        record_dir = tmp_path / "records" / rows[0].digest
        instances = sorted(record_dir.glob("instance_*.json"))
        assert len(instances) == 3
        record = json.loads(instances[0].read_text())
        assert record["feasible"] is True
        assert "wall_seconds" not in record
        assert len(record["trajectory"]) == 4
        assert (record_dir / "timings.csv").exists()
        summary = pd.read_csv(tmp_path / "summary.csv")
        assert summary["instances"].tolist() == [3]

    def test_reaggregate_round_trip(self, tmp_path):
        cfg = _sk_config(tmp_path, sweep=SweepSpec(parameter="batch", values=[1, 4]))

        rows = harness.run_experiment(cfg)
        rebuilt = harness.reaggregate(tmp_path)

        assert len(rows) == len(rebuilt) == 2
        by_digest = {row.digest: row for row in rebuilt}
        for row in rows:
            again = by_digest[row.digest]
            assert again.metrics == row.metrics
            assert again.mean == row.mean
            assert again.sem == row.sem
            assert again.best == row.best
            assert again.sweep_value == row.sweep_value
            assert again.mean_wall_seconds == pytest.approx(row.mean_wall_seconds)

    def test_records_identical_across_worker_counts(self, tmp_path):
        serial = _sk_config(tmp_path / "serial", workers=1)
        parallel = _sk_config(tmp_path / "parallel", workers=3)

        digest = harness.run_experiment(serial)[0].digest
        assert harness.run_experiment(parallel)[0].digest == digest

        for name in ("instance_0000.json", "instance_0001.json", "instance_0002.json"):
            first = (tmp_path / "serial" / "records" / digest / name).read_bytes()
            second = (tmp_path / "parallel" / "records" / digest / name).read_bytes()
            assert first == second

    def test_sk_instances_differ(self, tmp_path):
        rows = harness.run_experiment(_sk_config(tmp_path))
        record_dir = tmp_path / "records" / rows[0].digest
        seeds = {json.loads(p.read_text())["problem_seed"] for p in record_dir.glob("instance_*.json")}

        assert len(seeds) == 3

    def test_infeasible_instances_are_recorded(self, tmp_path):
        cfg = ExperimentConfig.model_validate({
            "problem": "graph",
            "builtin_graph": "karate",
            "objective": {"kind": "mvc"},
            "gso": {"n_replicas": 1, "max_steps": 1},
            "instances": 2,
            "out_dir": str(tmp_path),
        })

        row = harness.run_experiment(cfg)[0]

        assert row.infeasible_count == 2
        assert math.isnan(row.best)

    def test_greedy_solver(self, tmp_path):
        cfg = ExperimentConfig.model_validate({
            "problem": "graph",
            "builtin_graph": "karate",
            "objective": {"kind": "mis"},
            "solver": "md-greedy",
            "out_dir": str(tmp_path),
        })

        row = harness.run_experiment(cfg)[0]

        assert row.infeasible_count == 0
        assert row.best >= 15

    def test_graph_file(self, tmp_path):
        path = tmp_path / "square.txt"
        path.write_text("1 2\n2 3\n3 4\n4 1\n")
        cfg = ExperimentConfig.model_validate({
            "problem": "graph",
            "graph_path": str(path),
            "objective": {"kind": "mis"},
            "solver": "sa",
            "sa": {"sweeps": 50},
            "out_dir": str(tmp_path / "out"),
        })

        row = harness.run_experiment(cfg)[0]

        assert row.best == 2.0

    def test_function_experiment(self, tmp_path):
        cfg = ExperimentConfig.model_validate({
            "problem": "testfunction",
            "function": "sphere",
            "gso": {"n_replicas": 4, "max_steps": 300, "learning_rate": 0.1},
            "evo": {"t1": 100, "u_inverse": 0.25},
            "instances": 2,
            "out_dir": str(tmp_path),
        })

        rows = harness.run_experiment(cfg)

        assert [row.label for row in rows] == ["gd", "gd_restart", "hybrid"]
        assert all(row.best == 2.0 for row in rows)
        assert (tmp_path / "records" / rows[0].digest / "trials.csv").exists()
