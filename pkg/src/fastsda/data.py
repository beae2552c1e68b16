"""Datasets in memory and on disk.

On disk samples are rows; in memory they are columns, so a view with
``N`` samples and ``D`` features is a ``(D, N)`` array.
"""
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    EmptyFile,
    LayoutInvalid,
    MissingLabels,
    ParseError,
    RaggedRows,
    ShapeMismatch,
    ViewShapeMismatch,
)


@dataclass
class DataView:
    """One view: features ``x`` (D, N) and dense class labels in ``[0, C)``.

    ``label_names[c]`` is the label as it appeared in the source file.
    """

    x: np.ndarray
    class_labels: np.ndarray
    view_index: int = 0
    name: str = ""
    label_names: list = field(default_factory=list)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.class_labels = np.asarray(self.class_labels, dtype=np.int64)
        if self.x.ndim != 2:
            raise ShapeMismatch(f"x must be 2-D, got shape {self.x.shape}")
        if self.class_labels.shape != (self.x.shape[1],):
            raise ShapeMismatch(
                f"{self.class_labels.size} labels for {self.x.shape[1]} samples"
            )
        if self.class_labels.size and self.class_labels.min() < 0:
            raise LayoutInvalid("class labels must be non-negative")
        counts = np.bincount(self.class_labels)
        if np.any(counts == 0):
            raise LayoutInvalid(f"class {int(np.argmin(counts))} has no samples")
        if not self.label_names:
            self.label_names = [str(c) for c in range(counts.size)]

    @property
    def n_samples(self):
        return self.x.shape[1]

    @property
    def dim(self):
        return self.x.shape[0]

    @property
    def n_classes(self):
        return int(self.class_labels.max()) + 1


@dataclass
class MultiViewDataset:
    """Views of the same samples; dimensionalities may differ per view."""

    views: list
    name: str = ""

    def __post_init__(self):
        if not self.views:
            raise ViewShapeMismatch("a dataset needs at least one view")
        first = self.views[0]
        for v in self.views[1:]:
            if v.n_samples != first.n_samples:
                raise ViewShapeMismatch(
                    f"view {v.name or v.view_index} has {v.n_samples} samples, "
                    f"expected {first.n_samples}"
                )
            if not np.array_equal(v.class_labels, first.class_labels):
                raise ViewShapeMismatch("views disagree on class labels")

    @property
    def n_views(self):
        return len(self.views)

    @property
    def n_samples(self):
        return self.views[0].n_samples

    @property
    def class_labels(self):
        return self.views[0].class_labels

    @property
    def n_classes(self):
        return self.views[0].n_classes

    @property
    def dims(self):
        return [v.dim for v in self.views]

    def concatenated(self):
        """All views stacked into one (sum D_v, N) view."""
        first = self.views[0]
        return DataView(np.vstack([v.x for v in self.views]), first.class_labels,
                        0, self.name, list(first.label_names))


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _read_rows(path, delimiter=","):
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(i + 1, [f.strip() for f in row])
                for i, row in enumerate(csv.reader(fh, delimiter=delimiter))]
    rows = [(ln, r) for ln, r in rows if any(r)]
    if not rows:
        raise EmptyFile(f"{path} contains no data")
    return rows


def _parse_features(rows, n_features):
    out = np.empty((len(rows), n_features))
    for k, (line, fields) in enumerate(rows):
        for j in range(n_features):
            try:
                out[k, j] = float(fields[j])
            except ValueError:
                raise ParseError(line, j + 1, f"non-numeric value {fields[j]!r}") from None
    if not np.all(np.isfinite(out)):
        k, j = np.argwhere(~np.isfinite(out))[0]
        raise ParseError(rows[k][0], j + 1, "value is not finite")
    return out


def encode_labels(raw):
    """Dense integer codes for raw label strings.

    Integer-valued labels keep their numeric order; anything else is coded
    in order of first appearance.
    """
    raw = list(raw)
    if raw and all(_is_number(r) and float(r).is_integer() for r in raw):
        values = sorted({int(float(r)) for r in raw})
        names = [str(v) for v in values]
        lookup = {v: i for i, v in enumerate(values)}
        return np.array([lookup[int(float(r))] for r in raw]), names
    names = list(dict.fromkeys(raw))
    lookup = {n: i for i, n in enumerate(names)}
    return np.array([lookup[r] for r in raw]), names


def read_matrix(path, delimiter=","):
    """Numeric table from a CSV; a non-numeric first row is taken as a header."""
    rows = _read_rows(path, delimiter)
    if not all(_is_number(f) for f in rows[0][1]):
        rows = rows[1:]
        if not rows:
            raise EmptyFile(f"{path} has a header but no data")
    width = len(rows[0][1])
    for line, fields in rows:
        if len(fields) != width:
            raise RaggedRows(line, width, len(fields))
    return _parse_features(rows, width)


def read_labels(path):
    rows = _read_rows(path)
    values = [fields[0] for _, fields in rows]
    if len(values) > 1 and not _is_number(values[0]) and all(_is_number(v) for v in values[1:]):
        values = values[1:]  # header
    return encode_labels(values)


def load_csv(path, label_column="last", labels_path=None, delimiter=",", view_index=0):
    """Load one view from a CSV with samples as rows.

    Parameters
    ----------
    path : str or Path
    label_column : {"last", "separate-file"}
        Where the class labels live. With ``"separate-file"`` every column
        of ``path`` is a feature and ``labels_path`` holds one label per row.
    labels_path : str or Path, optional
    delimiter : str

    Raises
    ------
    EmptyFile, RaggedRows, ParseError
    """
    if label_column == "separate-file":
        if labels_path is None:
            raise MissingLabels("label_column='separate-file' needs labels_path")
        x = read_matrix(path, delimiter)
        labels, names = read_labels(labels_path)
        if labels.size != x.shape[0]:
            raise ShapeMismatch(f"{labels.size} labels for {x.shape[0]} rows")
        return DataView(x.T, labels, view_index, Path(path).stem, names)
    if label_column != "last":
        raise ValueError(f"unknown label_column {label_column!r}")
    rows = _read_rows(path, delimiter)
    head = rows[0][1]
    if not all(_is_number(f) for f in head[:-1]):
        rows = rows[1:]
        if not rows:
            raise EmptyFile(f"{path} has a header but no data")
    width = len(rows[0][1])
    if width < 2:
        raise ParseError(rows[0][0], 1, "need at least one feature and a label")
    for line, fields in rows:
        if len(fields) != width:
            raise RaggedRows(line, width, len(fields))
    x = _parse_features(rows, width - 1)
    labels, names = encode_labels(fields[-1] for _, fields in rows)
    return DataView(x.T, labels, view_index, Path(path).stem, names)


def save_csv(view, path, header=None):
    """Write a view as ``features..., label`` rows (labels by original name)."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        for j in range(view.n_samples):
            writer.writerow([repr(float(v)) for v in view.x[:, j]]
                            + [view.label_names[view.class_labels[j]]])


def load_multiview(manifest_path):
    """Load a dataset described by a manifest.

    The manifest has one ``view <name> <csv-path>`` line per view and one
    ``labels <csv-path>`` line; relative paths are resolved against the
    manifest's directory and ``#`` starts a comment.
    """
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    views, labels_path = [], None
    for number, line in enumerate(manifest_path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(maxsplit=2)
        if parts[0] == "view" and len(parts) == 3:
            views.append((parts[1], base / parts[2]))
        elif parts[0] == "labels" and len(parts) == 2:
            labels_path = base / parts[1]
        else:
            raise ParseError(number, 1, f"unrecognized manifest line {line!r}")
    if labels_path is None:
        raise MissingLabels(f"{manifest_path} has no 'labels' line")
    if not views:
        raise ViewShapeMismatch(f"{manifest_path} lists no views")
    labels, names = read_labels(labels_path)
    out = []
    for v, (name, path) in enumerate(views):
        x = read_matrix(path)
        if x.shape[0] != labels.size:
            raise ViewShapeMismatch(
                f"view {name} has {x.shape[0]} samples, labels file has {labels.size}"
            )
        out.append(DataView(x.T, labels, v, name, names))
    return MultiViewDataset(out, manifest_path.stem)


def write_multiview(dataset, directory, stem):
    """Write one CSV per view plus a labels file and a manifest; returns its path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for view in dataset.views:
        fname = f"{stem}_{view.name or view.view_index}.csv"
        np.savetxt(directory / fname, view.x.T, delimiter=",", fmt="%.17g")
        lines.append(f"view {view.name or view.view_index} {fname}")
    first = dataset.views[0]
    (directory / f"{stem}_labels.csv").write_text(
        "".join(first.label_names[c] + "\n" for c in first.class_labels)
    )
    lines.append(f"labels {stem}_labels.csv")
    manifest = directory / f"{stem}.manifest"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest
