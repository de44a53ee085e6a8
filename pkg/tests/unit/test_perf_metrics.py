import pytest

from seqham.perf_metrics import PerfMetrics


def test_report_includes_percentiles_and_count():
    metrics = PerfMetrics()
    for value in [10, 20, 30, 40, 50]:
        metrics.observe("posa.solve", value)

    timing = metrics.report()["timings"]["posa.solve"]

    assert timing["min"] == 10
    assert timing["max"] == 50
    assert timing["avg"] == 30
    assert timing["p50"] == 30
    assert timing["p95"] == pytest.approx(48.0)
    assert timing["count"] == 5


def test_counters_accumulate_and_reset():
    metrics = PerfMetrics()
    metrics.inc("posa.rotations")
    metrics.inc("posa.rotations", 4)
    metrics.inc("ordered.failures.anchor")

    assert metrics.report()["counters"] == {"ordered.failures.anchor": 1, "posa.rotations": 5}

    metrics.reset()
    assert metrics.report() == {"counters": {}, "timings": {}}


def test_timer_records_one_observation():
    metrics = PerfMetrics()
    with metrics.timer("greedy.solve"):
        pass

    timing = metrics.report()["timings"]["greedy.solve"]
    assert timing["count"] == 1
    assert timing["min"] >= 0


def test_timer_records_when_body_raises():
    metrics = PerfMetrics()
    with pytest.raises(RuntimeError):
        with metrics.timer("posa.solve"):
            raise RuntimeError("boom")

    assert metrics.report()["timings"]["posa.solve"]["count"] == 1


def test_merge_folds_in_worker_snapshot():
    """A worker snapshot adds to counters and extends the timing samples."""
    parent = PerfMetrics()
    parent.inc("posa.rotations", 2)
    parent.observe("posa.solve", 1.0)

    worker = PerfMetrics()
    worker.inc("posa.rotations", 3)
    worker.inc("pattern.nodes", 7)
    worker.observe("posa.solve", 3.0)

    parent.merge(worker.snapshot())
    report = parent.report()

    assert report["counters"] == {"pattern.nodes": 7, "posa.rotations": 5}
    assert report["timings"]["posa.solve"]["count"] == 2
    assert report["timings"]["posa.solve"]["avg"] == 2.0
