"""Tests for derived random streams."""

import sys
from pathlib import Path

import pytest

# Add src to path
repo_root = Path(__file__).resolve().parents[2]
src_path = repo_root / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from seqham.shared.rng import SCHEME, derive_rng, derive_seed
from seqham.shared.validators import ValidationError


class TestDerivedStreams:
    """Streams depend only on (seed, tag, indices)."""

    def test_same_key_same_numbers(self):
        a = derive_rng(42, "gnp").random(5)
        b = derive_rng(42, "gnp").random(5)
        assert a.tolist() == b.tolist()

    def test_tags_separate_streams(self):
        assert derive_rng(42, "gnp").random(3).tolist() != derive_rng(42, "split").random(3).tolist()

    def test_indices_separate_streams(self):
        a = derive_rng(42, "sweep-instance", 0, 1).random(3).tolist()
        b = derive_rng(42, "sweep-instance", 1, 0).random(3).tolist()
        assert a != b

    def test_derive_seed_is_stable_and_non_negative(self):
        s = derive_seed(7, "posa")
        assert s == derive_seed(7, "posa")
        assert 0 <= s < 2**63
        assert s != derive_seed(8, "posa")

    def test_negative_seed_rejected(self):
        with pytest.raises(ValidationError, match="non-negative"):
            derive_rng(-1, "gnp")
        with pytest.raises(ValidationError):
            derive_seed(-3, "posa")

    def test_scheme_names_philox(self):
        assert "philox" in SCHEME.lower()
