"""
Unit tests for seeded random streams.
"""

import numpy as np
import pytest

from agnostic_dp.exceptions import InvalidArgumentError
from agnostic_dp.rng import SEED_MASK, RandomStream


class TestRandomStream:
    """Tests for RandomStream."""

    def test_same_stream_same_draws(self):
        """Test two generators of one stream agree."""
        stream = RandomStream(42, (1, 2))

        a = stream.generator().random(5)
        b = stream.generator().random(5)

        np.testing.assert_array_equal(a, b)

    def test_children_differ(self):
        """Test sibling streams are independent."""
        root = RandomStream(42)

        assert not np.array_equal(root.child(1).generator().random(5), root.child(2).generator().random(5))

    def test_child_path(self):
        """Test child keys extend the stream id."""
        stream = RandomStream(3).child(1).child(4, 2)

        assert stream.stream_id == (1, 4, 2)
        assert stream == RandomStream(3).child(1, 4, 2)
        assert str(stream) == "3/1.4.2"
        assert str(RandomStream(3)) == "3/root"

    def test_from_seed_folds(self):
        """Test arbitrary integers are folded into 64 bits."""
        assert RandomStream.from_seed(-1).seed == SEED_MASK
        assert RandomStream.from_seed(SEED_MASK + 6).seed == 5

    def test_invalid(self):
        """Test out-of-range seeds and negative ids."""
        with pytest.raises(InvalidArgumentError):
            RandomStream(-1)
        with pytest.raises(InvalidArgumentError):
            RandomStream(1, (-2,))
