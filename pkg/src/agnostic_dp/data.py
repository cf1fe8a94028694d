"""
Datasets over a finite integer domain and the index operations on them.

Points are integers in [0, N); labels are 0/1. Datasets are ordered
multisets: order matters because neighboring datasets differ at one index.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import FrozenSet, Iterable, Iterator, List, NamedTuple, Sequence, Tuple, Union

from .exceptions import InvalidArgumentError
from .rng import RandomStream


class Example(NamedTuple):
    """A labeled example (x, y)."""

    x: int
    y: int


def check_point(x: int, domain_size: int) -> int:
    """
    Validate a domain point.

    Raises:
        InvalidArgumentError: If x is not in [0, domain_size)
    """
    if domain_size < 2:
        raise InvalidArgumentError(f"domain size must be at least 2, got {domain_size}")
    if not 0 <= x < domain_size:
        raise InvalidArgumentError(f"point {x} outside domain [0, {domain_size})")
    return x


@dataclass(frozen=True)
class UnlabeledDataset:
    """An ordered sequence of domain points."""

    points: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(x < 0 for x in self.points):
            raise InvalidArgumentError("domain points must be nonnegative")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[int]:
        return iter(self.points)

    def __getitem__(self, i: int) -> int:
        return self.points[i]

    def distinct(self) -> Tuple[int, ...]:
        """Sorted distinct points."""
        return tuple(sorted(set(self.points)))

    def concat(self, other: "UnlabeledDataset") -> "UnlabeledDataset":
        return UnlabeledDataset(self.points + other.points)


@dataclass(frozen=True)
class Dataset:
    """
    An ordered sequence of labeled examples; repetitions allowed.

    Stored column-wise so that hypotheses can be evaluated in bulk.
    """

    xs: Tuple[int, ...]
    ys: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.ys):
            raise InvalidArgumentError(
                f"points and labels differ in length ({len(self.xs)} vs {len(self.ys)})"
            )
        if any(y not in (0, 1) for y in self.ys):
            raise InvalidArgumentError("labels must be 0 or 1")
        if any(x < 0 for x in self.xs):
            raise InvalidArgumentError("domain points must be nonnegative")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> "Dataset":
        """Build a dataset from (x, y) pairs."""
        xs: List[int] = []
        ys: List[int] = []
        for pair in pairs:
            if len(pair) != 2:
                raise InvalidArgumentError(f"expected an (x, y) pair, got {pair!r}")
            xs.append(int(pair[0]))
            ys.append(int(pair[1]))
        return cls(tuple(xs), tuple(ys))

    @classmethod
    def empty(cls) -> "Dataset":
        return cls((), ())

    def __len__(self) -> int:
        return len(self.xs)

    def __iter__(self) -> Iterator[Example]:
        return (Example(x, y) for x, y in zip(self.xs, self.ys))

    def __getitem__(self, i: int) -> Example:
        return Example(self.xs[i], self.ys[i])

    @property
    def points(self) -> UnlabeledDataset:
        """The corresponding unlabeled dataset S_X."""
        return UnlabeledDataset(self.xs)

    def check_domain(self, domain_size: int) -> "Dataset":
        """
        Validate that every point lies in [0, domain_size).

        Raises:
            InvalidArgumentError: On the first point outside the domain
        """
        for x in self.xs:
            check_point(x, domain_size)
        return self

    def concat(self, other: "Dataset") -> "Dataset":
        """Concatenation S∘S'."""
        return Dataset(self.xs + other.xs, self.ys + other.ys)

    def with_labels(self, labels: Sequence[int]) -> "Dataset":
        """Same points, new labels."""
        return Dataset(self.xs, tuple(labels))

    def take(self, start: int, stop: int) -> "Dataset":
        """Contiguous slice [start, stop)."""
        return Dataset(self.xs[start:stop], self.ys[start:stop])

    # Serialization

    def to_json(self) -> str:
        """JSON array of [x, y] pairs."""
        return json.dumps([[x, y] for x, y in zip(self.xs, self.ys)])

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidArgumentError("dataset JSON is malformed", e) from e
        if not isinstance(data, list):
            raise InvalidArgumentError("dataset JSON must be an array of [x, y] pairs")
        return cls.from_pairs(data)

    def to_csv(self) -> str:
        """Two-column CSV with an x,y header."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["x", "y"])
        for x, y in zip(self.xs, self.ys):
            writer.writerow([x, y])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Dataset":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["x", "y"]:
            raise InvalidArgumentError("dataset CSV must have the header 'x,y'")
        try:
            return cls.from_pairs((int(row["x"]), int(row["y"])) for row in reader)
        except (TypeError, ValueError) as e:
            raise InvalidArgumentError("dataset CSV holds a non-integer cell", e) from e


def load_dataset(path: Union[str, Path]) -> Dataset:
    """
    Load a dataset from a .json or .csv file.

    Raises:
        InvalidArgumentError: If the file is missing, has another suffix or is malformed
    """
    path = Path(path)
    if not path.exists():
        raise InvalidArgumentError(f"dataset file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return Dataset.from_json(text)
    if path.suffix.lower() == ".csv":
        return Dataset.from_csv(text)
    raise InvalidArgumentError(f"unsupported dataset format: {path.suffix or path.name}")


def save_dataset(data: Dataset, path: Union[str, Path]) -> None:
    """Write a dataset as JSON or CSV depending on the file suffix."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(data.to_csv(), encoding="utf-8")
    else:
        path.write_text(data.to_json(), encoding="utf-8")


@dataclass(frozen=True)
class IndexSet:
    """
    A sorted set of distinct indices into a dataset of size n.
    """

    n: int
    indices: Tuple[int, ...]
    _members: FrozenSet[int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if list(self.indices) != sorted(set(self.indices)):
            raise InvalidArgumentError("indices must be sorted and distinct")
        if self.indices and not (0 <= self.indices[0] and self.indices[-1] < self.n):
            raise InvalidArgumentError(f"indices must lie in [0, {self.n})")
        object.__setattr__(self, "_members", frozenset(self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: object) -> bool:
        return i in self._members

    def complement(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n) if i not in self._members)


def subsample_uniform_indices(n: int, k: int, rng: RandomStream) -> IndexSet:
    """
    Draw a uniformly random k-subset of [0, n).

    Raises:
        InvalidArgumentError: If k is not in [1, n]
    """
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"subsample size must satisfy 1 <= k <= n, got k={k}, n={n}")
    chosen = rng.generator().choice(n, size=k, replace=False)
    return IndexSet(n, tuple(sorted(int(i) for i in chosen)))


def split_by_index(data: Dataset, index_set: IndexSet) -> Tuple[Dataset, Dataset]:
    """
    Split S into (T, W): selected and remaining examples, both in index order.

    Raises:
        InvalidArgumentError: If some index is out of range for S
    """
    chosen = index_set.indices
    if chosen and chosen[-1] >= len(data):
        raise InvalidArgumentError(
            f"index {chosen[-1]} out of range for a dataset of size {len(data)}"
        )
    rest = tuple(i for i in range(len(data)) if i not in index_set)
    selected = Dataset(tuple(data.xs[i] for i in chosen), tuple(data.ys[i] for i in chosen))
    remaining = Dataset(tuple(data.xs[i] for i in rest), tuple(data.ys[i] for i in rest))
    return selected, remaining


def merge_by_index(selected: Dataset, remaining: Dataset, index_set: IndexSet) -> Dataset:
    """
    Inverse of split_by_index.

    Raises:
        InvalidArgumentError: If the part sizes do not match the index set
    """
    total = len(selected) + len(remaining)
    if len(selected) != len(index_set) or (index_set.indices and index_set.indices[-1] >= total):
        raise InvalidArgumentError("parts do not match the index set")
    sel_iter = iter(selected)
    rest_iter = iter(remaining)
    return Dataset.from_pairs(
        next(sel_iter) if i in index_set else next(rest_iter) for i in range(total)
    )


def resample_with_replacement(data: Dataset, m: int, rng: RandomStream) -> Dataset:
    """
    Draw m examples i.i.d. uniformly from S's entries.

    Raises:
        InvalidArgumentError: If S is empty or m < 1
    """
    if len(data) == 0:
        raise InvalidArgumentError("cannot resample from an empty dataset")
    if m < 1:
        raise InvalidArgumentError(f"resample size must be at least 1, got {m}")
    picks = rng.generator().integers(0, len(data), size=m)
    return Dataset(tuple(data.xs[i] for i in picks), tuple(data.ys[i] for i in picks))


def neighboring(data: Dataset, i: int, example: Sequence[int]) -> Dataset:
    """
    Copy of S with entry i replaced by ``example``.

    Raises:
        InvalidArgumentError: If i is out of range
    """
    if not 0 <= i < len(data):
        raise InvalidArgumentError(f"index {i} out of range for a dataset of size {len(data)}")
    x, y = int(example[0]), int(example[1])
    xs = data.xs[:i] + (x,) + data.xs[i + 1:]
    ys = data.ys[:i] + (y,) + data.ys[i + 1:]
    return Dataset(xs, ys)


def hamming_distance(first: Dataset, second: Dataset) -> int:
    """
    Number of positions where two equal-length datasets differ.

    Raises:
        InvalidArgumentError: If the lengths differ
    """
    if len(first) != len(second):
        raise InvalidArgumentError("datasets of different lengths are never neighbors")
    return sum(1 for a, b in zip(first, second) if a != b)
