"""Unit tests for validators module."""

import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

# Add src to path
repo_root = Path(__file__).resolve().parents[2]
src_path = repo_root / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from seqham.shared import (
    CapExceededError,
    ValidationError,
    parse_grid,
    validate_cap,
    validate_class_sizes,
    validate_distribution,
    validate_probability,
    validate_vertex_count,
)
from seqham.shared.validators import (
    apply_overrides,
    parse_key_values,
    resolve_cap,
    validate_output_path,
)


class TestVertexCount:
    """Test vertex count validation."""

    def test_valid_counts(self):
        """Should accept integers and integer strings."""
        assert validate_vertex_count(5) == 5
        assert validate_vertex_count("12") == 12

    def test_minimum(self):
        """Should reject counts below the minimum."""
        with pytest.raises(ValidationError, match="at least 3"):
            validate_vertex_count(2, minimum=3)

    def test_non_integer(self):
        with pytest.raises(ValidationError, match="integer"):
            validate_vertex_count("many")


class TestProbability:
    """Test probability validation."""

    def test_bounds_inclusive(self):
        assert validate_probability(0) == 0.0
        assert validate_probability("1") == 1.0

    def test_out_of_range(self):
        with pytest.raises(ValidationError, match="between 0 and 1"):
            validate_probability(1.01)
        with pytest.raises(ValidationError):
            validate_probability(float("nan"))

    def test_name_in_message(self):
        with pytest.raises(ValidationError, match="p2"):
            validate_probability(-0.1, name="p2")


class TestDistributions:
    """Test colour distributions and class sizes."""

    def test_valid_distribution(self):
        assert validate_distribution([0.25, 0.75]) == (0.25, 0.75)

    def test_rejects_zero_entry(self):
        with pytest.raises(ValidationError, match="positive"):
            validate_distribution([1.0, 0.0])

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            validate_distribution([])

    def test_class_sizes(self):
        assert validate_class_sizes(5, [2, 3]) == (2, 3)
        with pytest.raises(ValidationError, match="sum to n=5"):
            validate_class_sizes(5, [2, 2])
        with pytest.raises(ValidationError):
            validate_class_sizes(5, [5, 0])


class TestCaps:
    """Test exact-solver caps."""

    def test_within_cap(self):
        assert validate_cap(12, 12, "brute") == 12

    def test_over_cap(self):
        """Exceeding a cap is a ValidationError subclass."""
        with pytest.raises(CapExceededError, match="n <= 12"):
            validate_cap(13, 12, "brute")
        assert issubclass(CapExceededError, ValidationError)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("SEQHAM_TEST_CAP", "9")
        assert resolve_cap("SEQHAM_TEST_CAP", 12) == 9
        monkeypatch.setenv("SEQHAM_TEST_CAP", "zero")
        with pytest.raises(ValidationError):
            resolve_cap("SEQHAM_TEST_CAP", 12)

    def test_env_default(self, monkeypatch):
        monkeypatch.delenv("SEQHAM_TEST_CAP", raising=False)
        assert resolve_cap("SEQHAM_TEST_CAP", 12) == 12


class TestGrid:
    """Test sweep grid parsing."""

    def test_range_includes_upper_end(self):
        assert parse_grid("0.1:0.5:0.1") == (0.1, 0.2, 0.3, 0.4, 0.5)

    def test_comma_list(self):
        assert parse_grid("0.2, 0.4,0.9") == (0.2, 0.4, 0.9)

    def test_not_increasing(self):
        with pytest.raises(ValidationError, match="increasing"):
            parse_grid("0.4,0.2")

    def test_bad_step(self):
        with pytest.raises(ValidationError, match="step"):
            parse_grid("0:1:0")

    def test_garbage(self):
        with pytest.raises(ValidationError):
            parse_grid("a:b:c")
        with pytest.raises(ValidationError):
            parse_grid("")


class TestOutputPath:
    """Test output path validation."""

    def test_valid_path(self, tmp_path):
        assert validate_output_path(tmp_path / "out.csv") == tmp_path / "out.csv"

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ValidationError, match="does not exist"):
            validate_output_path(tmp_path / "missing" / "out.csv")

    def test_directory_target(self, tmp_path):
        with pytest.raises(ValidationError, match="directory"):
            validate_output_path(tmp_path)


@dataclass(frozen=True)
class _Knobs:
    budget: int | None = None
    ratio: float = 0.5
    strict: bool = False


class TestOverrides:
    """Test --params parsing and typed overrides."""

    def test_parse_key_values(self):
        assert parse_key_values(["a=1", " b = x "]) == {"a": "1", "b": "x"}
        with pytest.raises(ValidationError):
            parse_key_values(["novalue"])

    def test_typed_coercion(self):
        knobs = apply_overrides(_Knobs(), {"budget": "100", "ratio": "0.25", "strict": "yes"})
        assert knobs == _Knobs(budget=100, ratio=0.25, strict=True)

    def test_none_for_optional(self):
        assert apply_overrides(_Knobs(budget=5), {"budget": "none"}).budget is None

    def test_unknown_key(self):
        with pytest.raises(ValidationError, match="Unknown parameter"):
            apply_overrides(_Knobs(), {"speed": "3"})

    def test_bad_value(self):
        with pytest.raises(ValidationError, match="expects"):
            apply_overrides(_Knobs(), {"strict": "maybe"})
        with pytest.raises(ValidationError, match="expects"):
            apply_overrides(_Knobs(), {"budget": "lots"})
