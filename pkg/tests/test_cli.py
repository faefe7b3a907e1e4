import json

import pytest

from alamp.cli import main, parse_seeds
from alamp.dataset import load_dataset, make_synthetic, train_test_split, write_dataset


@pytest.fixture(scope="module")
def csv_pair(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    full = make_synthetic(4, 40, 3, 0.5, 0)
    train, test = train_test_split(full, 0.25, 1)
    train_path, test_path = root / "train.csv", root / "test.csv"
    write_dataset(train, train_path)
    write_dataset(test, test_path)
    return str(train_path), str(test_path)


class TestParseSeeds:
    def test_range(self):
        assert parse_seeds("0..4") == [0, 1, 2, 3, 4]

    def test_list(self):
        assert parse_seeds("3,1,2") == [3, 1, 2]

    def test_bad(self):
        from alamp.cli import CliError
        with pytest.raises(CliError):
            parse_seeds("abc")


class TestSynth:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "synth.csv"
        rc = main(["synth", "--classes", "2", "--per-class", "5", "--dim", "3",
                   "--cluster-std", "0.1", "--seed", "7", "--output", str(out)])
        assert rc == 0
        assert len(out.read_text().splitlines()) == 10

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            main(["synth", "--classes", "2", "--per-class", "5", "--dim", "3",
                  "--cluster-std", "0.1", "--seed", "7", "--output", str(path)])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_params_exit_2(self, tmp_path):
        rc = main(["synth", "--classes", "1", "--per-class", "5", "--dim", "3",
                   "--cluster-std", "0.1", "--output", str(tmp_path / "x.csv")])
        assert rc == 2


class TestImbalance:
    def test_hits_target_and_prints_ir(self, tmp_path, capsys):
        src = tmp_path / "balanced.csv"
        write_dataset(make_synthetic(30, 40, 2, 0.5, 0), src)
        out = tmp_path / "skewed.csv"
        rc = main(["imbalance", "--input", str(src), "--target-ir", "0.5",
                   "--seed", "0", "--output", str(out)])
        assert rc == 0
        assert "achieved ir" in capsys.readouterr().out
        from alamp.dataset import imbalance_ratio
        skewed = load_dataset(out)
        assert imbalance_ratio(skewed.class_counts()) == pytest.approx(0.5, abs=0.02)

    def test_zero_target_balanced(self, tmp_path):
        src = tmp_path / "balanced.csv"
        write_dataset(make_synthetic(5, 10, 2, 0.5, 0), src)
        out = tmp_path / "flat.csv"
        assert main(["imbalance", "--input", str(src), "--target-ir", "0",
                     "--output", str(out)]) == 0
        from alamp.dataset import imbalance_ratio
        assert imbalance_ratio(load_dataset(out).class_counts()) == 0.0

    def test_infeasible_exit_2(self, tmp_path):
        src = tmp_path / "balanced.csv"
        write_dataset(make_synthetic(5, 10, 2, 0.5, 0), src)
        rc = main(["imbalance", "--input", str(src), "--target-ir", "0.9",
                   "--min-per-class", "10", "--output", str(tmp_path / "x.csv")])
        assert rc == 2


class TestRun:
    def test_writes_reports_and_aggregate(self, csv_pair, tmp_path):
        train, test = csv_pair
        rc = main(["run", "--train", train, "--test", test, "--af", "margin",
                   "--budget", "40", "--iters", "2", "--seeds", "0,1",
                   "--out", str(tmp_path)])
        assert rc == 0
        files = sorted(p.name for p in tmp_path.iterdir())
        assert files == ["train_margin_aggregate.json", "train_margin_seed0.json",
                         "train_margin_seed1.json"]

    def test_unknown_af_exit_2(self, csv_pair, tmp_path):
        train, test = csv_pair
        rc = main(["run", "--train", train, "--test", test, "--af", "entropy",
                   "--out", str(tmp_path)])
        assert rc == 2

    def test_indivisible_budget_exit_2(self, csv_pair, tmp_path, capsys):
        train, test = csv_pair
        rc = main(["run", "--train", train, "--test", test, "--af", "random",
                   "--budget", "3201", "--iters", "16", "--out", str(tmp_path)])
        assert rc == 2
        assert "divisible" in capsys.readouterr().err

    def test_byte_identical_reruns(self, csv_pair, tmp_path):
        train, test = csv_pair
        outs = []
        for sub in ("one", "two"):
            out = tmp_path / sub
            main(["run", "--train", train, "--test", test, "--af", "alamp",
                  "--budget", "40", "--iters", "2", "--seeds", "0",
                  "--out", str(out)])
            outs.append((out / "train_alamp_seed0.json").read_bytes())
        assert outs[0] == outs[1]

    def test_csv_format(self, csv_pair, tmp_path):
        train, test = csv_pair
        rc = main(["run", "--train", train, "--test", test, "--af", "random",
                   "--budget", "40", "--iters", "2", "--seeds", "0",
                   "--format", "csv", "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "train_random_seed0.csv").read_text().splitlines()
        assert lines[0] == "iteration,labeled_count,accuracy,ir"
        assert len(lines) == 3

    def test_synth_source(self, tmp_path):
        rc = main(["run", "--synth", "3,30,4,0.5,0", "--af", "random",
                   "--budget", "20", "--iters", "2", "--seeds", "0",
                   "--out", str(tmp_path)])
        assert rc == 0

    def test_config_file_with_flag_override(self, csv_pair, tmp_path):
        train, test = csv_pair
        config = {"train": train, "test": test, "af": "random", "budget": 40,
                  "iters": 2, "seeds": "0", "out": str(tmp_path / "cfg")}
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(config))
        # flag overrides the config's af
        rc = main(["run", "--config", str(cfg_path), "--af", "margin"])
        assert rc == 0
        names = {p.name for p in (tmp_path / "cfg").iterdir()}
        assert "train_margin_seed0.json" in names

    def test_missing_inputs_exit_2(self, tmp_path):
        assert main(["run", "--af", "random", "--out", str(tmp_path)]) == 2


class TestCompare:
    def test_gain_table(self, csv_pair, tmp_path, capsys):
        train, test = csv_pair
        rc = main(["compare", "--train", train, "--test", test,
                   "--afs", "margin,random", "--budget", "40", "--iters", "2",
                   "--seeds", "0,1", "--out", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "gain_vs_random" in out
        assert "margin" in out

    def test_random_added_as_baseline(self, csv_pair, tmp_path, capsys):
        train, test = csv_pair
        rc = main(["compare", "--train", train, "--test", test,
                   "--afs", "margin", "--budget", "40", "--iters", "2",
                   "--seeds", "0", "--out", str(tmp_path)])
        assert rc == 0
        assert "random" in capsys.readouterr().out
