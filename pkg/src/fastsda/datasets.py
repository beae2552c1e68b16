"""Preparation of the small public benchmark sets.

Every dataset is turned into canonical CSV files (samples as rows, label
last) in a cache directory, ``$FASTSDA_DATA`` or ``~/.cache/fastsda``.
Raw downloads are verified by SHA-256 and kept under ``downloads/``.

Sources are tried in order:

* the UCI repository archive;
* a pinned wheel on PyPI that ships the same table (the UCI host is often
  unreachable from build machines).

Monk-2 needs no download: its concept ("exactly two of the six attributes
take their first value") defines the class of every point of the full
432-point attribute grid, which is the standard Monk-2 evaluation table.

The Robot Execution Failures set (problems LP1 and LP4) has no mirror; if
``lp1.data`` and ``lp4.data`` cannot be fetched, place them in
``<cache>/robots/`` by hand.
"""
import hashlib
import io
import itertools
import json
import os
import urllib.request
import zipfile
from pathlib import Path

import numpy as np

from .data import (
    DataView,
    MultiViewDataset,
    encode_labels,
    load_csv,
    load_multiview,
    write_multiview,
)
from .errors import DatasetUnavailable, ParseError

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
PYPI_JSON = "https://pypi.org/pypi/{package}/json"

# (package, version, wheel file name, sha256, member path)
WHEELS = {
    "ionosphere": (
        "orange3", "3.39.0",
        "orange3-3.39.0-cp310-cp310-manylinux_2_27_x86_64.manylinux_2_28_x86_64.whl",
        "4dcfe3234c6cfea7d4cb5fa6a7d1cb92355d73d778d565c1f5b85178b216a941",
        "Orange/tests/datasets/ionosphere.tab",
    ),
    "pima": (
        "imbalanced-databases", "0.1.1",
        "imbalanced_databases-0.1.1-py3-none-any.whl",
        "9fc58c203f1adfebe54bef86d4b3dfe1f6f9f027a9ef35d47031981997391add",
        "imbalanced_databases/data/pima/pima.dat",
    ),
}

UCI_FILES = {
    "ionosphere": f"{UCI}/ionosphere/ionosphere.data",
    "robots-lp1": f"{UCI}/robotfailure-mld/lp1.data",
    "robots-lp4": f"{UCI}/robotfailure-mld/lp4.data",
}

DATASETS = ("ionosphere", "pima", "monks2", "robots")
ROBOT_VIEWS = ("Fx", "Fy", "Fz", "Tx", "Ty", "Tz")
ROBOT_STEPS = 15


def data_dir(path=None):
    if path is not None:
        return Path(path)
    env = os.environ.get("FASTSDA_DATA")
    return Path(env) if env else Path.home() / ".cache" / "fastsda"


def _fetch(url, timeout=60):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def _wheel_member(name, cache):
    package, version, filename, sha256, member = WHEELS[name]
    target = cache / "downloads" / filename
    if not target.exists():
        meta = json.loads(_fetch(PYPI_JSON.format(package=package)))
        urls = {u["filename"]: u["url"] for u in meta["releases"].get(version, [])}
        if filename not in urls:
            raise DatasetUnavailable(f"{filename} is not listed on PyPI")
        blob = _fetch(urls[filename], timeout=300)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(blob)
    blob = target.read_bytes()
    if hashlib.sha256(blob).hexdigest() != sha256:
        target.unlink()
        raise DatasetUnavailable(f"checksum mismatch for {filename}")
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        return zf.read(member).decode()


def _write_table(path, rows, header):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)] + [",".join(r) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def _ionosphere_rows(cache):
    try:
        text = _fetch(UCI_FILES["ionosphere"], timeout=20).decode()
        return [ln.split(",") for ln in text.splitlines() if ln.strip()]
    except OSError:
        pass
    text = _wheel_member("ionosphere", cache)
    # tab-separated with three header lines
    return [ln.split("\t") for ln in text.splitlines()[3:] if ln.strip()]


def _pima_rows(cache):
    text = _wheel_member("pima", cache)
    body = text.split("@data", 1)[1]
    return [ln.split(",") for ln in body.splitlines() if ln.strip()]


def monks2_rows():
    """The full Monk-2 grid: 432 points, class 1 iff exactly two attributes equal 1."""
    domains = [(1, 2, 3), (1, 2, 3), (1, 2), (1, 2, 3), (1, 2, 3, 4), (1, 2)]
    rows = []
    for attrs in itertools.product(*domains):
        label = int(sum(a == 1 for a in attrs) == 2)
        rows.append([str(a) for a in attrs] + [str(label)])
    return rows


def parse_robot_failures(text):
    """Parse an LP*.data file into ``(labels, samples)``.

    Each instance is a class-name line followed by 15 lines of six integer
    readings (Fx Fy Fz Tx Ty Tz); ``samples`` has shape (n, 15, 6).
    """
    labels, samples = [], []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        block = []
        for k in range(1, ROBOT_STEPS + 1):
            if i + k >= len(lines):
                raise ParseError(i + k + 1, 1, "truncated instance")
            fields = lines[i + k].split()
            if len(fields) != len(ROBOT_VIEWS):
                raise ParseError(i + k + 1, 1, f"expected 6 readings, got {len(fields)}")
            try:
                block.append([float(f) for f in fields])
            except ValueError:
                raise ParseError(i + k + 1, 1, "non-numeric reading") from None
        labels.append(line)
        samples.append(block)
        i += ROBOT_STEPS + 1
    return labels, np.array(samples)


def _robot_text(cache, part):
    local = cache / "robots" / f"{part}.data"
    if local.exists():
        return local.read_text()
    try:
        text = _fetch(UCI_FILES[f"robots-{part}"], timeout=20).decode()
    except OSError as exc:
        raise DatasetUnavailable(
            f"Robot Execution Failures {part.upper()} could not be downloaded ({exc}); "
            f"place {part}.data in {local.parent}"
        ) from None
    local.parent.mkdir(parents=True, exist_ok=True)
    local.write_text(text)
    return text


def robots_dataset(lp1_text, lp4_text):
    """Combine LP1 and LP4 into six views (one per force/torque axis) of 15 steps."""
    l1, s1 = parse_robot_failures(lp1_text)
    l4, s4 = parse_robot_failures(lp4_text)
    samples = np.concatenate([s1, s4])
    labels, names = encode_labels(l1 + l4)
    views = [DataView(samples[:, :, v].T, labels, v, name, names)
             for v, name in enumerate(ROBOT_VIEWS)]
    return MultiViewDataset(views, "robots")


def prepare_dataset(name, path=None):
    """Create the canonical files for ``name``; returns the CSV or manifest path."""
    cache = data_dir(path)
    if name == "robots":
        manifest = cache / "robots" / "robots.manifest"
        if not manifest.exists():
            ds = robots_dataset(_robot_text(cache, "lp1"), _robot_text(cache, "lp4"))
            write_multiview(ds, cache / "robots", "robots")
        return manifest
    target = cache / f"{name}.csv"
    if target.exists():
        return target
    if name == "ionosphere":
        rows = _ionosphere_rows(cache)
    elif name == "pima":
        rows = _pima_rows(cache)
    elif name == "monks2":
        rows = monks2_rows()
    else:
        raise DatasetUnavailable(f"unknown dataset {name!r}; choose from {DATASETS}")
    width = len(rows[0])
    header = [f"f{i}" for i in range(1, width)] + ["class"]
    _write_table(target, [[f.strip() for f in r] for r in rows], header)
    return target


def load_dataset(name, path=None):
    """Named benchmark, or a path to a CSV (label last) or manifest."""
    p = Path(name)
    if p.suffix == ".manifest" and p.exists():
        return load_multiview(p)
    if p.suffix == ".csv" and p.exists():
        return MultiViewDataset([load_csv(p)], p.stem)
    target = prepare_dataset(name, path)
    if target.suffix == ".manifest":
        return load_multiview(target)
    return MultiViewDataset([load_csv(target)], name)
