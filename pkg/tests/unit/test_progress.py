"""Tests for sweep progress tracking."""

import time

import pytest

from seqham.progress import ProgressInfo, ProgressTracker, get_progress_tracker


def _info(completed, total=100, elapsed=10.0, **kwargs):
    return ProgressInfo(
        "hamiltonicity:0.3",
        total_trials=total,
        completed_trials=completed,
        start_time=time.monotonic() - elapsed,
        **kwargs,
    )


class TestProgressInfo:
    """Test the per-point progress record."""

    def test_progress_percent(self):
        assert _info(50, total=200).progress_percent == 25.0

    def test_progress_percent_zero_total(self):
        assert _info(0, total=0).progress_percent == 0.0

    def test_trial_rate(self):
        assert 4.0 < _info(50).trials_per_second < 6.0

    def test_eta_calculation(self):
        """Estimate the remaining time from the trial rate."""
        eta = _info(50).eta_seconds
        assert eta is not None
        assert 8 <= eta <= 12

    def test_eta_unknown_before_first_trial(self):
        assert _info(0).eta_seconds is None

    def test_format_progress_running(self):
        formatted = _info(25, elapsed=1.0).format_progress()
        assert "25.0%" in formatted
        assert "trials/s" in formatted

    def test_format_progress_completed(self):
        """Completed points show the failure count."""
        info = _info(10, total=10, status="completed", failures=2)
        assert info.format_progress() == "complete (10/10, 2 failed)"


class TestProgressTracker:
    """Test ProgressTracker functionality."""

    def test_start_operation(self):
        progress = ProgressTracker().start_operation("ordered:0.05", 100)

        assert progress.operation_id == "ordered:0.05"
        assert progress.total_trials == 100
        assert progress.completed_trials == 0
        assert progress.status == "running"

    def test_update_progress(self):
        tracker = ProgressTracker()
        tracker.start_operation("op", 100)

        progress = tracker.update_progress("op", 50, failures=3)
        assert progress.completed_trials == 50
        assert progress.failures == 3
        assert progress.status == "running"

    def test_auto_complete_on_last_trial(self):
        tracker = ProgressTracker()
        tracker.start_operation("op", 100)
        assert tracker.update_progress("op", 100).status == "completed"

    def test_unknown_operation(self):
        with pytest.raises(ValueError, match="missing"):
            ProgressTracker().update_progress("missing", 1)

    def test_restart_resets_counts(self):
        tracker = ProgressTracker()
        tracker.start_operation("op", 10)
        tracker.update_progress("op", 10, failures=1)
        tracker.start_operation("op", 10)

        progress = tracker.get_progress("op")
        assert (progress.completed_trials, progress.failures, progress.status) == (0, 0, "running")

    def test_callbacks_fire_once_per_change(self):
        """A callback registered twice is called once per change."""
        tracker = ProgressTracker()
        seen = []

        def callback(progress):
            seen.append((progress.operation_id, progress.status))

        tracker.register_callback(callback)
        tracker.register_callback(callback)
        tracker.start_operation("op", 2)
        tracker.update_progress("op", 2)
        tracker.complete_operation("op")  # already complete: no event

        assert seen == [("op", "running"), ("op", "completed")]

    def test_complete_operation_marks_status(self):
        tracker = ProgressTracker()
        tracker.start_operation("coupling:n=7", 5)
        tracker.complete_operation("coupling:n=7")
        assert tracker.get_progress("coupling:n=7").status == "completed"

    def test_failing_callback_is_contained(self):
        tracker = ProgressTracker()

        def broken(progress):
            raise RuntimeError("boom")

        tracker.register_callback(broken)
        assert tracker.start_operation("op", 1).status == "running"

    def test_global_tracker(self):
        assert get_progress_tracker() is get_progress_tracker()
