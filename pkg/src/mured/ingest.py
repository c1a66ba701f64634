"""Delimited record tables and time-windowed measure series."""

from __future__ import annotations

import csv
import io
import logging
import os
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .distribution import from_records
from .errors import (
    EmptyDataset,
    EmptyFile,
    InputError,
    IoFailure,
    MuredError,
    NoTimeColumn,
    RaggedRow,
    InvalidTimeValue,
    UnknownVariable,
)
from .measures import MeasureReport, canonical_measure, measure_report

log = logging.getLogger(__name__)

TIME_ORDERS = ("auto", "numeric", "lexical")


@dataclass(frozen=True)
class CategoricalDataset:
    """Rows of verbatim text labels under named columns.

    ``alphabets`` optionally declares the category list of some columns; it is
    used instead of the observed values when building distributions.
    """

    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    time_column: str | None = None
    alphabets: Mapping[str, tuple[str, ...]] | None = None
    time_order: str = "auto"

    def __post_init__(self):
        cols = tuple(self.columns)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if len(set(cols)) != len(cols):
            raise InputError(f"duplicate column names: {list(cols)}")
        for i, row in enumerate(self.rows):
            if len(row) != len(cols):
                raise RaggedRow(f"row {i} has {len(row)} fields, expected {len(cols)}")
        if self.alphabets is not None:
            object.__setattr__(
                self, "alphabets", {k: tuple(v) for k, v in self.alphabets.items()}
            )
            for name in self.alphabets:
                self.column_index(name)
        if self.time_order not in TIME_ORDERS:
            raise InputError(f"time_order must be one of {TIME_ORDERS}")
        if self.time_column is not None:
            self.column_index(self.time_column)
            time_key(self.column(self.time_column), self.time_order)

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown column {name!r}") from None

    def column(self, name: str) -> list[str]:
        i = self.column_index(name)
        return [row[i] for row in self.rows]

    def observed_alphabets(self) -> dict[str, tuple[str, ...]]:
        """Declared alphabets where present, else values in first-appearance order."""
        out = {}
        for j, name in enumerate(self.columns):
            if self.alphabets and name in self.alphabets:
                out[name] = self.alphabets[name]
            else:
                out[name] = tuple(dict.fromkeys(row[j] for row in self.rows))
        return out

    def __len__(self):
        return len(self.rows)


def time_key(values: Sequence[str], order: str = "auto"):
    """Sort key for time labels: integers if they all parse (or forced)."""
    if order == "lexical":
        return lambda v: v
    try:
        for v in values:
            int(v)
    except ValueError:
        if order == "numeric":
            raise InvalidTimeValue(f"time label {v!r} is not an integer") from None
        return lambda v: v
    return int


def _numeric(values: Sequence[str], order: str) -> bool:
    return time_key(values, order) is int


@dataclass(frozen=True)
class WindowSpec:
    width: int = 1
    step: int | None = None

    def __post_init__(self):
        if self.step is None:
            object.__setattr__(self, "step", self.width)
        if self.width < 1 or self.step < 1:
            raise InputError(f"window width and step must be >= 1, got {self.width}/{self.step}")

    @property
    def aggregation(self) -> str:
        return "disjoint" if self.step == self.width else "sliding"


@dataclass(frozen=True)
class MeasureSeries:
    measure_name: str
    variables: tuple[str, ...]
    points: tuple[tuple[str, MeasureReport], ...]
    gaps: tuple[str, ...] = field(default=())

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [r.value for _, r in self.points]


def read_delimited(
    path,
    delimiter: str = ",",
    has_header: bool = True,
    declared_alphabets: Mapping[str, Sequence[str]] | None = None,
    time_column: str | None = None,
    time_order: str = "auto",
) -> CategoricalDataset:
    """Parse a UTF-8 delimited file into a :class:`CategoricalDataset`.

    Double-quote escaping follows RFC 4180.  Fully blank lines are skipped;
    an empty field is the category ``""``.  Without a header the columns are
    named ``c0 .. cK``.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise IoFailure(f"cannot read {os.fspath(path)!r}: {exc}") from exc
    return parse_delimited(
        text, delimiter, has_header, declared_alphabets, time_column, time_order
    )


def parse_delimited(
    text: str,
    delimiter: str = ",",
    has_header: bool = True,
    declared_alphabets: Mapping[str, Sequence[str]] | None = None,
    time_column: str | None = None,
    time_order: str = "auto",
) -> CategoricalDataset:
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=delimiter, strict=True)
    header = None
    rows = []
    width = None
    try:
        for record in reader:
            if not record:
                continue
            if width is None:
                width = len(record)
                if has_header:
                    header = tuple(record)
                    continue
            elif len(record) != width:
                raise RaggedRow(
                    f"line {reader.line_num}: {len(record)} fields, expected {width}",
                    line=reader.line_num,
                )
            rows.append(tuple(record))
    except csv.Error as exc:
        raise InputError(f"line {reader.line_num}: {exc}") from exc
    if width is None:
        raise EmptyFile("input has no records")
    columns = header if header is not None else tuple(f"c{i}" for i in range(width))
    return CategoricalDataset(
        columns,
        tuple(rows),
        time_column=time_column,
        alphabets=dict(declared_alphabets) if declared_alphabets else None,
        time_order=time_order,
    )


def write_dataset(dataset: CategoricalDataset, path=None, delimiter: str = ",", header: bool = True) -> str:
    """Serialize with minimal quoting and ``\\n`` line endings.

    Returns the text; also writes it to ``path`` when given.
    """
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    if header:
        writer.writerow(dataset.columns)
    writer.writerows(dataset.rows)
    text = buf.getvalue()
    if path is not None:
        try:
            with open(path, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoFailure(f"cannot write {os.fspath(path)!r}: {exc}") from exc
    return text


def time_labels(dataset: CategoricalDataset) -> list[str]:
    """The ordered time axis that windows are laid over.

    Integer labels span every integer from the minimum to the maximum, so a
    missing year is a real (empty) position on the axis; other labels use the
    distinct observed values.
    """
    if dataset.time_column is None:
        raise NoTimeColumn("dataset has no time column")
    values = dataset.column(dataset.time_column)
    if not values:
        raise EmptyDataset("dataset has no rows")
    if _numeric(values, dataset.time_order):
        nums = [int(v) for v in values]
        return [str(v) for v in range(min(nums), max(nums) + 1)]
    return sorted(set(values), key=time_key(values, dataset.time_order))


def window_datasets(
    dataset: CategoricalDataset,
    spec: WindowSpec,
    per_window_alphabets: bool = False,
) -> tuple[list[tuple[str, CategoricalDataset]], list[str]]:
    """Split rows into time windows.

    Returns ``(windows, gaps)``: windows with at least one row as
    ``(label, sub_dataset)`` pairs labelled ``"first..last"``, and the labels
    of windows that held no rows.  Only full-width windows are produced,
    except that a width beyond the time range yields a single window over
    everything.  Sub-datasets keep the full dataset's alphabets unless
    ``per_window_alphabets`` is set.
    """
    axis = time_labels(dataset)
    t = dataset.column_index(dataset.time_column)
    numeric = _numeric(dataset.column(dataset.time_column), dataset.time_order)
    position = {label: i for i, label in enumerate(axis)}
    by_position: dict[int, list[tuple[str, ...]]] = {}
    for row in dataset.rows:
        key = str(int(row[t])) if numeric else row[t]
        by_position.setdefault(position[key], []).append(row)

    width = min(spec.width, len(axis))
    alphabets = None if per_window_alphabets else dataset.observed_alphabets()
    windows, gaps = [], []
    for start in range(0, len(axis) - width + 1, spec.step):
        label = f"{axis[start]}..{axis[start + width - 1]}"
        rows = [r for i in range(start, start + width) for r in by_position.get(i, ())]
        if not rows:
            gaps.append(label)
            continue
        sub = replace(dataset, rows=tuple(rows), alphabets=alphabets)
        windows.append((label, sub))
    return windows, gaps


def measure_series(
    dataset: CategoricalDataset,
    variables: Sequence[str],
    measure_name: str,
    spec: WindowSpec,
    *,
    given: Sequence[str] = (),
    base: float = 2,
    weight_column: str | None = None,
    per_window_alphabets: bool = False,
    explain: bool = False,
    max_workers: int | None = None,
) -> MeasureSeries:
    """Evaluate one measure per time window.

    Windows are computed independently (optionally on a thread pool) and
    assembled in time order.  An error in any window is re-raised with the
    window label prepended to its message.
    """
    name = canonical_measure(measure_name)
    if isinstance(variables, str):
        variables = (variables,)
    variables = tuple(variables)
    given = (given,) if isinstance(given, str) else tuple(given)
    if dataset.time_column in variables + given:
        raise InputError(f"time column {dataset.time_column!r} cannot be analysed")
    windows, gaps = window_datasets(dataset, spec, per_window_alphabets)

    def run(item):
        label, sub = item
        try:
            dist = from_records(sub, variables + given, weight_column=weight_column)
            return label, measure_report(
                dist, name, variables, given=given, base=base, explain=explain
            )
        except MuredError as exc:
            exc.args = (f"window {label}: {exc}",) + exc.args[1:]
            raise

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            points = list(pool.map(run, windows))
    else:
        points = [run(w) for w in windows]
    for label in gaps:
        log.info("window %s has no rows; skipped", label)
    return MeasureSeries(name, variables, tuple(points), tuple(gaps))
