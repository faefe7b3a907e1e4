import json

import pytest

from alamp.metrics import (
    IterationRecord,
    Report,
    RunMeta,
    aggregate,
    average_accuracy,
    imbalance_profile,
    read_report,
    samples_to_accuracy,
    write_aggregate,
    write_report,
)

META = RunMeta(af="margin", seed=0, total_budget=120, iterations=4,
               dataset="toy", cost_sensitive=True)


def make_report(accs, counts=None, base=30):
    counts = counts or [(10, 10, 10)] * len(accs)
    records = []
    for k, (acc, cc) in enumerate(zip(accs, counts)):
        mean = sum(cc) / len(cc)
        var = sum((c - mean) ** 2 for c in cc) / len(cc)
        records.append(IterationRecord(
            iteration=k, labeled_count=(k + 1) * base, accuracy=acc,
            class_counts=tuple(cc), ir=var ** 0.5 / mean,
            selected_ids=tuple(range(k * base, (k + 1) * base))))
    return Report(meta=META, records=tuple(records))


class TestAverageAccuracy:
    def test_constant_curve(self):
        assert average_accuracy(make_report([0.5, 0.5, 0.5])) == 0.5

    def test_two_point_mean(self):
        assert average_accuracy(make_report([0.2, 0.4])) == pytest.approx(0.3)

    def test_gain_convention(self):
        # gain in points = 100 * (avg(a) - avg(b))
        a = average_accuracy(make_report([0.50, 0.60]))
        b = average_accuracy(make_report([0.48, 0.58]))
        assert 100 * (a - b) == pytest.approx(2.0)

    def test_invariant_to_record_order(self):
        rep = make_report([0.1, 0.9, 0.5])
        shuffled = Report(meta=rep.meta, records=rep.records[::-1])
        assert average_accuracy(shuffled) == average_accuracy(rep)


class TestSamplesToAccuracy:
    def test_first_reaching_count(self):
        rep = make_report([0.3, 0.45, 0.52, 0.58], base=400)
        assert samples_to_accuracy(rep, 0.5) == 1200

    def test_never_reached(self):
        assert samples_to_accuracy(make_report([0.1, 0.2]), 0.9) is None

    def test_threshold_zero_rejected(self):
        with pytest.raises(ValueError):
            samples_to_accuracy(make_report([0.5]), 0.0)

    def test_threshold_met_at_first_record(self):
        rep = make_report([0.5, 0.6], base=30)
        assert samples_to_accuracy(rep, 0.5) == 30

    def test_monotone_in_threshold(self):
        rep = make_report([0.2, 0.5, 0.4, 0.8], base=10)
        prev = 0
        for th in (0.1, 0.2, 0.4, 0.5, 0.7, 0.8):
            got = samples_to_accuracy(rep, th)
            assert got is not None and got >= prev
            prev = got


class TestImbalanceProfile:
    def test_balanced_all_zero(self):
        assert imbalance_profile(make_report([0.5, 0.6])) == [0.0, 0.0]

    def test_length_equals_iterations(self):
        assert len(imbalance_profile(make_report([0.1] * 7))) == 7

    def test_hand_value(self):
        rep = make_report([0.5], counts=[(10, 30)])
        assert imbalance_profile(rep)[0] == pytest.approx(0.5)


class TestSerialization:
    def test_json_roundtrip(self, tmp_path):
        rep = make_report([0.25, 0.5, 0.75])
        path = tmp_path / "r.json"
        write_report(rep, path, format="json")
        assert read_report(path) == rep

    def test_json_schema_keys(self, tmp_path):
        rep = make_report([0.5])
        path = tmp_path / "r.json"
        write_report(rep, path)
        payload = json.loads(path.read_text())
        assert set(payload) == {"meta", "records"}
        assert set(payload["meta"]) == {"af", "seed", "plan", "dataset", "cost_sensitive"}
        assert set(payload["meta"]["plan"]) == {"b", "t"}
        assert set(payload["records"][0]) == {"k", "labeled", "acc", "ir",
                                              "class_counts", "selected"}

    def test_csv_shape_and_precision(self, tmp_path):
        rep = make_report([1 / 3, 2 / 3])
        path = tmp_path / "r.csv"
        write_report(rep, path, format="csv")
        lines = path.read_bytes().decode().split("\n")
        assert lines[0] == "iteration,labeled_count,accuracy,ir"
        assert len([l for l in lines if l]) == 3  # header + t rows
        assert lines[1] == "0,30,0.333333,0.000000"
        assert b"\r" not in path.read_bytes()

    def test_csv_and_json_curves_agree(self, tmp_path):
        rep = make_report([0.111111, 0.222222])
        jp, cp = tmp_path / "r.json", tmp_path / "r.csv"
        write_report(rep, jp, format="json")
        write_report(rep, cp, format="csv")
        json_accs = [r.accuracy for r in read_report(jp).records]
        csv_accs = [float(line.split(",")[2])
                    for line in cp.read_text().splitlines()[1:]]
        assert csv_accs == pytest.approx(json_accs, abs=1e-6)

    def test_byte_identical_rewrites(self, tmp_path):
        rep = make_report([0.4, 0.6])
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        write_report(rep, p1)
        write_report(rep, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            write_report(make_report([0.5]), tmp_path / "r.xml", format="xml")


class TestAggregate:
    def test_mean_and_population_std(self, tmp_path):
        reps = [make_report([0.4, 0.6]), make_report([0.6, 0.8])]
        agg = aggregate(reps)
        assert agg["rows"][0]["acc_mean"] == pytest.approx(0.5)
        assert agg["rows"][0]["acc_std"] == pytest.approx(0.1)
        path = tmp_path / "agg.csv"
        write_aggregate(agg, path, format="csv")
        assert path.read_text().splitlines()[0] == \
            "iteration,labeled_count,acc_mean,acc_std,ir_mean,ir_std"

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])
