"""Multi-view feature datasets and their on-disk format.

A dataset is a set of views (one embedding matrix per feature extractor)
over the same samples, plus one shared label vector. In memory each view is
held as a ``dim x N`` float64 matrix with one column per sample.

On disk a dataset is a directory holding

* ``manifest.json`` -- ``dataset_name``, ``views`` (list of ``view_name``,
  ``feature_file``, ``dim``), ``labels_file``, ``class_names``;
* a labels file with one ``sample_index,class_id`` line per sample;
* one binary feature file per view: ``b"MDFM"``, ``u32`` version (1),
  ``u64`` n_samples, ``u64`` dim, then ``n_samples * dim`` little-endian
  float32 values, sample-major.

Relative paths in a manifest are resolved against the manifest's directory.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    DimMismatch,
    DuplicateViewName,
    IoError,
    MissingField,
    NonFiniteFeature,
    ParseError,
    SampleCountMismatch,
)

MAGIC = b"MDFM"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


@dataclass(frozen=True)
class ViewEntry:
    view_name: str
    feature_file: str
    dim: int


@dataclass(frozen=True)
class Manifest:
    dataset_name: str
    views: tuple[ViewEntry, ...]
    labels_file: str
    class_names: tuple[str, ...] = ()
    root: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        if not self.views:
            raise MissingField("manifest lists no views")
        names = [v.view_name for v in self.views]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise DuplicateViewName(f"duplicate view names: {dup}")
        for v in self.views:
            if v.dim < 1:
                raise ParseError(f"view {v.view_name!r} has dim {v.dim}")

    @property
    def view_names(self) -> list[str]:
        return [v.view_name for v in self.views]

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.root / p

    def to_json(self) -> dict:
        return {
            "dataset_name": self.dataset_name,
            "views": [
                {"view_name": v.view_name, "feature_file": v.feature_file, "dim": v.dim}
                for v in self.views
            ],
            "labels_file": self.labels_file,
            "class_names": list(self.class_names),
        }


@dataclass(frozen=True)
class FeatureSet:
    view_name: str
    features: np.ndarray  # dim x N
    labels: np.ndarray  # N class ids

    @property
    def dim(self) -> int:
        return self.features.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class MultiViewDataset:
    manifest: Manifest
    view_sets: tuple[FeatureSet, ...]
    class_count: int

    def __post_init__(self):
        if len(self.view_sets) != len(self.manifest.views):
            raise ParseError("view count differs from manifest")
        validate_views(self.view_sets, self.class_count)
        for fs in self.view_sets:
            fs.features.setflags(write=False)
            fs.labels.setflags(write=False)

    @property
    def labels(self) -> np.ndarray:
        return self.view_sets[0].labels

    @property
    def n_samples(self) -> int:
        return self.view_sets[0].n_samples

    @property
    def view_names(self) -> list[str]:
        return [fs.view_name for fs in self.view_sets]

    def select_views(self, names) -> "MultiViewDataset":
        """Return a dataset restricted to ``names``, in the given order."""
        by_name = {fs.view_name: fs for fs in self.view_sets}
        entries = {v.view_name: v for v in self.manifest.views}
        missing = [n for n in names if n not in by_name]
        if missing:
            raise KeyError(f"unknown views: {missing}")
        m = self.manifest
        manifest = Manifest(m.dataset_name, tuple(entries[n] for n in names),
                            m.labels_file, m.class_names, m.root)
        return MultiViewDataset(manifest, tuple(by_name[n] for n in names), self.class_count)


def validate_views(view_sets, class_count: int) -> None:
    if not view_sets:
        raise MissingField("dataset has no views")
    n = view_sets[0].n_samples
    ref = view_sets[0].labels
    for fs in view_sets:
        if fs.features.ndim != 2:
            raise ParseError(f"view {fs.view_name!r} features must be 2-D")
        if fs.n_samples != n:
            raise SampleCountMismatch(
                f"view {fs.view_name!r} has {fs.n_samples} samples, expected {n}")
        if fs.labels.shape != ref.shape or not np.array_equal(fs.labels, ref):
            raise SampleCountMismatch(f"view {fs.view_name!r} labels differ from first view")
        if not np.all(np.isfinite(fs.features)):
            raise NonFiniteFeature(f"view {fs.view_name!r} has NaN/Inf features")
    if ref.size and (ref.min() < 0 or ref.max() >= class_count):
        raise ParseError(f"labels outside [0, {class_count})")


def make_dataset(name: str, views: dict[str, np.ndarray], labels, class_names=None) -> MultiViewDataset:
    """Build an in-memory dataset from ``{view_name: dim x N array}``."""
    labels = np.asarray(labels, dtype=np.int64)
    class_count = int(labels.max()) + 1 if labels.size else 0
    if class_names is None:
        class_names = [f"class_{c}" for c in range(class_count)]
    class_count = max(class_count, len(class_names))
    entries = tuple(ViewEntry(v, f"{v}.bin", int(np.shape(x)[0])) for v, x in views.items())
    manifest = Manifest(name, entries, "labels.csv", tuple(class_names))
    sets = tuple(FeatureSet(v, np.array(x, dtype=np.float64), labels.copy()) for v, x in views.items())
    return MultiViewDataset(manifest, sets, class_count)


# --- manifest ---------------------------------------------------------------

def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("manifest must be a JSON object")
    for key in ("dataset_name", "views", "labels_file"):
        if key not in raw:
            raise MissingField(f"manifest missing {key!r}")
    views = raw["views"]
    if not isinstance(views, list) or not views:
        raise MissingField("manifest lists no views")
    entries = []
    for v in views:
        try:
            entries.append(ViewEntry(str(v["view_name"]), str(v["feature_file"]), int(v["dim"])))
        except KeyError as exc:
            raise MissingField(f"view entry missing {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad view entry {v!r}: {exc}") from None
    return Manifest(
        dataset_name=str(raw["dataset_name"]),
        views=tuple(entries),
        labels_file=str(raw["labels_file"]),
        class_names=tuple(str(c) for c in raw.get("class_names", [])),
        root=path.parent,
    )


# --- binary features --------------------------------------------------------

def read_feature_file(path) -> np.ndarray:
    """Read a feature file, returning a ``dim x N`` float64 matrix."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if len(data) < _HEADER.size:
        raise BadMagic(f"{path}: truncated header")
    magic, version, n, dim = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ParseError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * n * dim
    if len(data) != expected:
        raise ParseError(f"{path}: expected {expected} bytes, found {len(data)}")
    body = np.frombuffer(data, dtype="<f4", offset=_HEADER.size, count=n * dim)
    return body.reshape(n, dim).T.astype(np.float64)


def write_feature_file(path, features) -> None:
    features = np.asarray(features)
    dim, n = features.shape
    sample_major = np.ascontiguousarray(features.T, dtype="<f4")
    try:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, n, dim))
            fh.write(sample_major.tobytes())
    except OSError as exc:
        raise IoError(str(exc)) from exc


# --- labels -----------------------------------------------------------------

def read_labels(path) -> np.ndarray:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    pairs = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            idx, cls = (int(t) for t in line.split(","))
        except ValueError:
            raise ParseError(f"{path}:{lineno}: expected 'sample_index,class_id'") from None
        pairs.append((idx, cls))
    idx = np.array([p[0] for p in pairs], dtype=np.int64)
    if not np.array_equal(idx, np.arange(len(pairs))):
        raise ParseError(f"{path}: sample indices must be 0..N-1 in order")
    return np.array([p[1] for p in pairs], dtype=np.int64)


def write_labels(path, labels) -> None:
    text = "".join(f"{i},{int(c)}\n" for i, c in enumerate(labels))
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc


# --- datasets ---------------------------------------------------------------

def load_dataset(manifest: Manifest | str | Path) -> MultiViewDataset:
    if not isinstance(manifest, Manifest):
        manifest = load_manifest(manifest)
    labels = read_labels(manifest.resolve(manifest.labels_file))
    if labels.size and labels.min() < 0:
        raise ParseError("negative class id")
    present = np.unique(labels)
    if present.size and not np.array_equal(present, np.arange(present.size)):
        raise ParseError("class ids must be contiguous from 0")
    class_count = max(int(present.size), len(manifest.class_names))
    sets = []
    for entry in manifest.views:
        x = read_feature_file(manifest.resolve(entry.feature_file))
        if x.shape[0] != entry.dim:
            raise DimMismatch(
                f"view {entry.view_name!r}: file dim {x.shape[0]}, manifest dim {entry.dim}")
        if x.shape[1] != labels.size:
            raise SampleCountMismatch(
                f"view {entry.view_name!r}: {x.shape[1]} samples, {labels.size} labels")
        if not np.all(np.isfinite(x)):
            raise NonFiniteFeature(f"view {entry.view_name!r} contains NaN/Inf")
        sets.append(FeatureSet(entry.view_name, x, labels))
    return MultiViewDataset(manifest, tuple(sets), class_count)


def write_dataset(dataset: MultiViewDataset, directory) -> Manifest:
    """Write ``dataset`` under ``directory`` and return the written manifest.

    Features are stored as float32; values that are not exactly
    representable in float32 are rounded.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    entries = tuple(
        ViewEntry(fs.view_name, f"{fs.view_name}.bin", fs.dim) for fs in dataset.view_sets
    )
    class_names = dataset.manifest.class_names or tuple(
        f"class_{c}" for c in range(dataset.class_count))
    manifest = Manifest(dataset.manifest.dataset_name, entries, "labels.csv",
                        tuple(class_names), directory)
    for entry, fs in zip(entries, dataset.view_sets):
        write_feature_file(directory / entry.feature_file, fs.features)
    write_labels(directory / manifest.labels_file, dataset.labels)
    try:
        (directory / "manifest.json").write_text(json.dumps(manifest.to_json(), indent=2) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return manifest
