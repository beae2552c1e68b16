"""Versioned plain-text container for fitted models.

Layout::

    FASTSDA-MODEL v1 <variant>
    normalization <mode>
    kernel <sigma> <mode> <prototype_count> <prototype_strategy> <center>
    scalar <name> <value>
    matrix <name> <rows> <cols>
    <rows lines of cols values>
    end

Values are written with 17 significant digits, which round-trips doubles
exactly. Lines starting with ``#`` are comments. A multi-view model uses
variant ``multiview`` followed by ``views <V>`` and one
``view <i> <variant>`` section per view.
"""
from pathlib import Path

import numpy as np

from .errors import CorruptBlock, VersionMismatch
from .kernels import CenteringStats, KernelConfig
from .regression import MultiViewModel, ProjectionModel

MAGIC = "FASTSDA-MODEL"
VERSION = "v1"
VARIANTS = ("linear", "kernel", "approx-kernel")


def _fmt(v):
    return "%.17g" % v


def _matrix_lines(name, m):
    m = np.atleast_2d(m)
    lines = [f"matrix {name} {m.shape[0]} {m.shape[1]}"]
    lines += [" ".join(_fmt(v) for v in row) for row in m]
    return lines


def _model_lines(model):
    lines = [f"normalization {model.normalization}"]
    if model.kernel is not None:
        k = model.kernel
        lines.append(f"kernel {_fmt(k.sigma)} {k.mode} {k.prototype_count} "
                     f"{k.prototype_strategy} {int(k.center)}")
    name = "W" if model.variant == "linear" else "A"
    lines += _matrix_lines(name, model.coef)
    lines += _matrix_lines("mean", model.mean[:, None])
    if model.basis is not None:
        lines += _matrix_lines("basis", model.basis)
    if model.centering is not None:
        lines += _matrix_lines("row_means", model.centering.train_kernel_row_means[:, None])
        lines.append(f"scalar grand_mean {_fmt(model.centering.train_kernel_grand_mean)}")
    return lines


def save_model(model, path, comments=()):
    """Write a :class:`ProjectionModel` or :class:`MultiViewModel` to ``path``.

    ``comments`` are written as ``#`` lines right after the header.
    """
    notes = [f"# {c}" for c in comments]
    if isinstance(model, MultiViewModel):
        lines = [f"{MAGIC} {VERSION} multiview"] + notes + [
            f"normalization {model.normalization}", f"views {model.n_views}"]
        for i, m in enumerate(model.views):
            lines.append(f"view {i} {m.variant}")
            lines += _model_lines(m)
    else:
        lines = [f"{MAGIC} {VERSION} {model.variant}"] + notes + _model_lines(model)
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n")


class _Reader:
    def __init__(self, lines):
        self.lines = lines
        self.pos = 0

    def peek(self):
        return self.lines[self.pos].split() if self.pos < len(self.lines) else ["end"]

    def take(self):
        if self.pos >= len(self.lines):
            raise CorruptBlock("unexpected end of file")
        self.pos += 1
        return self.lines[self.pos - 1].split()

    def matrix(self, head):
        try:
            rows, cols = int(head[2]), int(head[3])
        except (IndexError, ValueError):
            raise CorruptBlock(f"bad matrix header at line {self.pos}") from None
        out = np.empty((rows, cols))
        for r in range(rows):
            fields = self.take()
            if len(fields) != cols:
                raise CorruptBlock(
                    f"matrix {head[1]} row {r + 1}: expected {cols} values, got {len(fields)}"
                )
            try:
                out[r] = [float(f) for f in fields]
            except ValueError:
                raise CorruptBlock(f"matrix {head[1]} row {r + 1}: non-numeric value") from None
        return out


def _read_model(reader, variant):
    if variant not in VARIANTS:
        raise CorruptBlock(f"unknown model variant {variant!r}")
    normalization, kernel, mats, scalars = "none", None, {}, {}
    while reader.peek()[0] not in ("end", "view"):
        head = reader.take()
        tag = head[0]
        try:
            if tag == "normalization":
                normalization = head[1]
            elif tag == "kernel":
                kernel = KernelConfig(float(head[1]), head[2], int(head[3]), head[4],
                                      bool(int(head[5])))
            elif tag == "scalar":
                scalars[head[1]] = float(head[2])
            elif tag == "matrix":
                mats[head[1]] = reader.matrix(head)
            else:
                raise CorruptBlock(f"unknown block {tag!r} at line {reader.pos}")
        except (IndexError, ValueError) as exc:
            raise CorruptBlock(f"bad {tag} line at {reader.pos}: {exc}") from None
    coef = mats.get("W" if variant == "linear" else "A")
    if coef is None or "mean" not in mats:
        raise CorruptBlock("model is missing its coefficient or mean block")
    centering = None
    if "row_means" in mats:
        centering = CenteringStats(mats["row_means"][:, 0], scalars.get("grand_mean", 0.0))
    if variant != "linear" and (kernel is None or "basis" not in mats):
        raise CorruptBlock("kernel model is missing its kernel or basis block")
    return ProjectionModel(variant, coef, mats["mean"][:, 0], normalization,
                           mats.get("basis"), kernel, centering)


def load_model(path):
    """Read a model written by :func:`save_model`."""
    lines = [ln for ln in Path(path).read_text().splitlines()
             if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise VersionMismatch(f"{path} is empty")
    head = lines[0].split()
    if len(head) != 3 or head[0] != MAGIC or head[1] != VERSION:
        raise VersionMismatch(f"{path}: expected '{MAGIC} {VERSION} <variant>' header")
    reader = _Reader(lines)
    reader.take()
    if head[2] != "multiview":
        model = _read_model(reader, head[2])
    else:
        norm = reader.take()
        count = reader.take()
        if norm[0] != "normalization" or count[0] != "views":
            raise CorruptBlock("multiview header needs normalization and views lines")
        views = []
        for _ in range(int(count[1])):
            vh = reader.take()
            if vh[0] != "view" or len(vh) != 3:
                raise CorruptBlock(f"expected a view section at line {reader.pos}")
            views.append(_read_model(reader, vh[2]))
        model = MultiViewModel(views, norm[1])
    if reader.take() != ["end"]:
        raise CorruptBlock("missing 'end' line")
    return model
