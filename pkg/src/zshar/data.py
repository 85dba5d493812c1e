"""Dataset types, file formats, splits, and the synthetic fixture generator.

On-disk layout (all paths in a manifest are relative to the manifest file):

* manifest        JSON ``{name, imu_path, semantics_path, skeleton_dir,
                  superclass_path, n, d, folds}`` plus optional ``seed``,
                  ``joints``, ``dims``, ``keypoint_indices``.
* IMU file        CSV, one sample per block: header row ``id,label,n,d``
                  then n rows of d comma-separated values; blocks separated
                  by a blank line. Empty label means unlabeled.
* semantic file   JSON ``{"embedding_dim": D, "vectors": {class: [...]}}``;
                  optional ``video_vectors``/``video_counts`` carry per-video
                  provenance.
* skeleton dir    one CSV per video, T rows x (J*K) columns, named
                  ``<class>__<idx>.csv``.
* super-class map JSON ``{class: super_class}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, FileFormatError, SplitError

# 25-point raw pose layout used by exporters feeding this engine:
# 0 nose, 1-6 face, 7/8 shoulders, 9/10 elbows, 11/12 wrists, 13-16 fingers,
# 17/18 hips, 19/20 knees, 21/22 ankles, 23/24 heels.
DEFAULT_KEYPOINT_INDICES = (7, 8, 9, 10, 11, 12, 17, 18, 19, 20, 21, 22)

COORD_MARGIN = 1.5  # skeleton coords are nominally [-1, 1] with this hard margin


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass
class ImuWindow:
    """One multivariate IMU sample: values is (n, d) float64."""

    id: str
    values: np.ndarray
    label: str | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise DataError(f"imu window {self.id!r}: values must be (n>=1, d>=1), got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DataError(f"imu window {self.id!r}: non-finite values")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass
class ClassSemanticSet:
    """Per-class semantic vectors, each the mean of that class's video embeddings."""

    embedding_dim: int
    vectors: dict[str, np.ndarray]
    provenance: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for name, v in self.vectors.items():
            arr = np.asarray(v, dtype=np.float64)
            if arr.shape != (self.embedding_dim,):
                raise DataError(
                    f"semantic vector for class {name!r} has length {arr.shape}, "
                    f"expected ({self.embedding_dim},)"
                )
            if not np.all(np.isfinite(arr)):
                raise DataError(f"semantic vector for class {name!r} has non-finite entries")
            if float(np.linalg.norm(arr)) == 0.0:
                raise DataError(f"semantic vector for class {name!r} has zero norm")
            self.vectors[name] = arr
        for name in self.vectors:
            self.provenance.setdefault(name, 1)

    @property
    def classes(self) -> list[str]:
        return sorted(self.vectors)

    def restrict(self, classes) -> "ClassSemanticSet":
        missing = sorted(set(classes) - set(self.vectors))
        if missing:
            raise DataError(f"no semantic vector for classes {missing}")
        return ClassSemanticSet(
            embedding_dim=self.embedding_dim,
            vectors={c: self.vectors[c] for c in classes},
            provenance={c: self.provenance.get(c, 1) for c in classes},
        )


@dataclass
class SkeletonSequence:
    """T x J x K joint-coordinate trajectory, coords normalized to [-1, 1]."""

    class_name: str
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 3 or self.coords.shape[0] < 2:
            raise DataError(
                f"skeleton for {self.class_name!r}: coords must be (T>=2, J, K), got {self.coords.shape}"
            )
        if not np.all(np.isfinite(self.coords)):
            raise DataError(f"skeleton for {self.class_name!r}: non-finite coordinates")
        peak = float(np.max(np.abs(self.coords)))
        if peak > COORD_MARGIN:
            raise DataError(
                f"skeleton for {self.class_name!r}: coordinate {peak:.3f} outside +-{COORD_MARGIN}"
            )

    @property
    def frames(self) -> int:
        return self.coords.shape[0]

    @property
    def joints(self) -> int:
        return self.coords.shape[1]

    @property
    def dims(self) -> int:
        return self.coords.shape[2]

    def flat(self) -> np.ndarray:
        """Frames as (T, J*K) row vectors."""
        return self.coords.reshape(self.frames, -1)


@dataclass
class SuperClassMap:
    """Total map class -> super-class; every super-class has >= 2 members.

    The membership invariant is enforced when a map is loaded from disk
    (``validate_members``); ``kfold_split`` re-checks it and reports a
    split error so infeasible hand-built maps fail there.
    """

    mapping: dict[str, str]

    def validate_members(self) -> None:
        for sc, members in self.groups().items():
            if len(members) < 2:
                raise DataError(f"super-class {sc!r} has a single member class {members}")

    def groups(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for cls in sorted(self.mapping):
            out.setdefault(self.mapping[cls], []).append(cls)
        return out

    def superclass_of(self, cls: str) -> str:
        if cls not in self.mapping:
            raise DataError(f"class {cls!r} missing from super-class map")
        return self.mapping[cls]

    def check_total(self, classes) -> None:
        missing = sorted(set(classes) - set(self.mapping))
        if missing:
            raise DataError(f"super-class map is missing classes {missing}")


@dataclass
class FoldSpec:
    """One seen/unseen class partition."""

    index: int
    seen: list[str]
    unseen: list[str]

    def validate(self, classes, superclass_map: SuperClassMap, both_sides: bool = True) -> None:
        seen, unseen, allc = set(self.seen), set(self.unseen), set(classes)
        if seen & unseen:
            raise SplitError(f"fold {self.index}: seen/unseen overlap {sorted(seen & unseen)}")
        if seen | unseen != allc:
            raise SplitError(f"fold {self.index}: seen+unseen do not cover the class list")
        if both_sides:
            for sc, members in superclass_map.groups().items():
                mset = set(members) & allc
                if not (mset & seen) or not (mset & unseen):
                    raise SplitError(
                        f"fold {self.index}: super-class {sc!r} missing from one side"
                    )

    def to_dict(self) -> dict:
        return {"fold": self.index, "seen": sorted(self.seen), "unseen": sorted(self.unseen)}

    @staticmethod
    def from_dict(d: dict) -> "FoldSpec":
        return FoldSpec(index=int(d["fold"]), seen=list(d["seen"]), unseen=list(d["unseen"]))


@dataclass
class DatasetManifest:
    name: str
    imu_path: Path
    semantics_path: Path
    skeleton_dir: Path
    superclass_path: Path
    n: int
    d: int
    folds: int
    joints: int = 12
    dims: int = 2
    seed: int | None = None
    keypoint_indices: tuple[int, ...] = DEFAULT_KEYPOINT_INDICES


@dataclass
class Dataset:
    """Fully loaded and cross-validated dataset bundle."""

    manifest: DatasetManifest
    windows: list[ImuWindow]
    semantics: ClassSemanticSet
    skeletons: dict[str, list[SkeletonSequence]]
    superclasses: SuperClassMap

    @property
    def classes(self) -> list[str]:
        return self.semantics.classes

    def windows_for(self, classes) -> list[ImuWindow]:
        wanted = set(classes)
        return [w for w in self.windows if w.label in wanted]

    def window_by_id(self, sample_id: str) -> ImuWindow:
        for w in self.windows:
            if w.id == sample_id:
                return w
        raise DataError(f"no IMU sample with id {sample_id!r}")


# ---------------------------------------------------------------------------
# file readers / writers
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_imu_csv(path: Path, windows: list[ImuWindow]) -> None:
    lines = []
    for w in windows:
        lines.append(f"{w.id},{w.label or ''},{w.n},{w.d}")
        for row in w.values:
            lines.append(",".join(_fmt(v) for v in row))
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def read_imu_csv(path: Path) -> list[ImuWindow]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"IMU file not found: {path}")
    blocks: list[list[str]] = [[]]
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip() == "":
            if blocks[-1]:
                blocks.append([])
        else:
            blocks[-1].append(line)
    if blocks and not blocks[-1]:
        blocks.pop()
    windows = []
    for block in blocks:
        head = block[0].split(",")
        if len(head) != 4:
            raise FileFormatError(f"{path}: bad sample header {block[0]!r}")
        sample_id, label = head[0], head[1] or None
        try:
            n, d = int(head[2]), int(head[3])
        except ValueError as exc:
            raise FileFormatError(f"{path}: non-integer n/d in header {block[0]!r}") from exc
        if len(block) - 1 != n:
            raise FileFormatError(
                f"{path}: sample {sample_id!r} declares n={n} but has {len(block) - 1} rows"
            )
        try:
            values = np.array(
                [[float(v) for v in row.split(",")] for row in block[1:]], dtype=np.float64
            )
        except ValueError as exc:
            raise FileFormatError(f"{path}: sample {sample_id!r} has a non-numeric value") from exc
        if values.shape != (n, d):
            raise FileFormatError(
                f"{path}: sample {sample_id!r} is {values.shape}, declared ({n}, {d})"
            )
        windows.append(ImuWindow(id=sample_id, values=values, label=label))
    if not windows:
        raise FileFormatError(f"{path}: no IMU samples found")
    return windows


def write_semantics_json(path: Path, semantics: ClassSemanticSet,
                         video_vectors: dict[str, list] | None = None,
                         metadata: dict | None = None) -> None:
    doc: dict = {
        "embedding_dim": semantics.embedding_dim,
        "vectors": {c: [float(v) for v in semantics.vectors[c]] for c in semantics.classes},
    }
    counts = {c: semantics.provenance.get(c, 1) for c in semantics.classes}
    if any(v != 1 for v in counts.values()):
        doc["video_counts"] = counts
    if video_vectors is not None:
        doc["video_vectors"] = video_vectors
    if metadata is not None:
        doc["metadata"] = metadata
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")


def read_semantics_json(path: Path) -> ClassSemanticSet:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"semantic-vector file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "embedding_dim" not in doc or "vectors" not in doc:
        raise FileFormatError(f"{path}: expected keys 'embedding_dim' and 'vectors'")
    dim = int(doc["embedding_dim"])
    vectors = {}
    for name, vals in doc["vectors"].items():
        arr = np.asarray(vals, dtype=np.float64)
        if arr.shape != (dim,):
            raise DataError(
                f"{path}: semantic vector for class {name!r} has length {arr.size}, expected {dim}"
            )
        vectors[name] = arr
    provenance = {}
    if "video_counts" in doc:
        provenance = {c: int(k) for c, k in doc["video_counts"].items()}
    elif "video_vectors" in doc:
        provenance = {c: len(v) for c, v in doc["video_vectors"].items()}
    return ClassSemanticSet(embedding_dim=dim, vectors=vectors, provenance=provenance)


def write_superclass_json(path: Path, mapping: dict[str, str]) -> None:
    Path(path).write_text(json.dumps(mapping, indent=2, sort_keys=True), encoding="utf-8")


def read_superclass_json(path: Path) -> SuperClassMap:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"super-class map not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    scm = SuperClassMap(mapping={str(k): str(v) for k, v in doc.items()})
    scm.validate_members()
    return scm


def write_skeleton_csv(path: Path, seq: SkeletonSequence) -> None:
    rows = seq.flat()
    text = "\n".join(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_skeleton_csv(path: Path, class_name: str, joints: int, dims: int) -> SkeletonSequence:
    path = Path(path)
    try:
        rows = [
            [float(v) for v in line.split(",")]
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    except ValueError as exc:
        raise FileFormatError(f"{path}: non-numeric skeleton value") from exc
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != joints * dims:
        raise DataError(
            f"{path}: skeleton rows have {arr.shape[1] if arr.ndim == 2 else '?'} columns, "
            f"expected J*K = {joints * dims}"
        )
    return SkeletonSequence(class_name=class_name, coords=arr.reshape(-1, joints, dims))


def read_skeleton_dir(directory: Path, joints: int, dims: int) -> dict[str, list[SkeletonSequence]]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"skeleton directory not found: {directory}")
    out: dict[str, list[SkeletonSequence]] = {}
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise DataError(f"skeleton directory {directory} contains no CSV files")
    for f in files:
        stem = f.stem
        if "__" not in stem:
            raise FileFormatError(f"{f}: skeleton filename must be '<class>__<idx>.csv'")
        cls = stem.rsplit("__", 1)[0]
        out.setdefault(cls, []).append(read_skeleton_csv(f, cls, joints, dims))
    return out


def load_manifest(path: Path) -> DatasetManifest:
    """Parse and fully validate a manifest, including cross-file consistency."""
    return load_dataset(path).manifest


def load_dataset(path: Path) -> Dataset:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    required = ["name", "imu_path", "semantics_path", "skeleton_dir", "superclass_path", "n", "d", "folds"]
    missing = [k for k in required if k not in doc]
    if missing:
        raise FileFormatError(f"{path}: manifest missing keys {missing}")
    base = path.parent
    manifest = DatasetManifest(
        name=str(doc["name"]),
        imu_path=base / doc["imu_path"],
        semantics_path=base / doc["semantics_path"],
        skeleton_dir=base / doc["skeleton_dir"],
        superclass_path=base / doc["superclass_path"],
        n=int(doc["n"]),
        d=int(doc["d"]),
        folds=int(doc["folds"]),
        joints=int(doc.get("joints", 12)),
        dims=int(doc.get("dims", 2)),
        seed=doc.get("seed"),
        keypoint_indices=tuple(doc.get("keypoint_indices", DEFAULT_KEYPOINT_INDICES)),
    )
    windows = read_imu_csv(manifest.imu_path)
    semantics = read_semantics_json(manifest.semantics_path)
    superclasses = read_superclass_json(manifest.superclass_path)
    skeletons = read_skeleton_dir(manifest.skeleton_dir, manifest.joints, manifest.dims)

    classes = set(semantics.vectors)
    superclasses.check_total(classes)
    extra_sc = sorted(set(superclasses.mapping) - classes)
    if extra_sc:
        raise DataError(f"{manifest.superclass_path}: unknown classes {extra_sc}")
    extra_sk = sorted(set(skeletons) - classes)
    if extra_sk:
        raise DataError(f"{manifest.skeleton_dir}: skeletons for unknown classes {extra_sk}")
    missing_sk = sorted(classes - set(skeletons))
    if missing_sk:
        raise DataError(f"{manifest.skeleton_dir}: no skeleton sequences for classes {missing_sk}")
    for w in windows:
        if w.label is not None and w.label not in classes:
            raise DataError(
                f"{manifest.imu_path}: sample {w.id!r} has label {w.label!r} "
                f"absent from the semantic-vector class list"
            )
        if (w.n, w.d) != (manifest.n, manifest.d):
            raise DataError(
                f"{manifest.imu_path}: sample {w.id!r} is ({w.n}, {w.d}), "
                f"manifest declares ({manifest.n}, {manifest.d})"
            )
    ids = [w.id for w in windows]
    if len(set(ids)) != len(ids):
        raise DataError(f"{manifest.imu_path}: duplicate sample ids")
    return Dataset(
        manifest=manifest,
        windows=windows,
        semantics=semantics,
        skeletons=skeletons,
        superclasses=superclasses,
    )


def write_folds_json(path: Path, folds: list[FoldSpec], seed: int) -> None:
    doc = {"seed": seed, "folds": [f.to_dict() for f in folds]}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")


def read_folds_json(path: Path) -> list[FoldSpec]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"folds file not found: {path}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    return [FoldSpec.from_dict(d) for d in doc["folds"]]


# ---------------------------------------------------------------------------
# splits
# ---------------------------------------------------------------------------

def kfold_split(
    classes,
    superclass_map: SuperClassMap,
    folds: int,
    unseen_per_fold: int,
    seed: int,
) -> list[FoldSpec]:
    """Seeded seen/unseen partitions stratified by super-class.

    Unseen picks are spread round-robin over a seeded permutation of the
    super-classes, never taking a super-class's last member, so the seen set
    always touches every super-class and the unseen set touches
    min(unseen_per_fold, #super-classes) of them.
    """
    classes = sorted(classes)
    superclass_map.check_total(classes)
    groups = superclass_map.groups()
    for sc, members in groups.items():
        if len(members) < 2:
            raise SplitError(f"super-class {sc!r} has only {members}; need >= 2 classes")
    if folds < 1:
        raise ConfigError(f"folds must be >= 1, got {folds}")
    capacity = {sc: len(members) - 1 for sc, members in groups.items()}
    if not (1 <= unseen_per_fold <= sum(capacity.values())):
        raise SplitError(
            f"unseen_per_fold={unseen_per_fold} infeasible: must be in "
            f"[1, {sum(capacity.values())}] for these super-classes"
        )
    rng = np.random.default_rng(seed)
    out = []
    names = sorted(groups)
    for fold in range(folds):
        order = [names[i] for i in rng.permutation(len(names))]
        quota = {sc: 0 for sc in names}
        remaining = unseen_per_fold
        while remaining > 0:
            progressed = False
            for sc in order:
                if remaining == 0:
                    break
                if quota[sc] < capacity[sc]:
                    quota[sc] += 1
                    remaining -= 1
                    progressed = True
            if not progressed:
                raise SplitError("unseen quota exceeds super-class capacities")
        unseen: list[str] = []
        for sc in names:
            if quota[sc]:
                members = groups[sc]
                picks = rng.choice(len(members), size=quota[sc], replace=False)
                unseen.extend(members[i] for i in picks)
        spec = FoldSpec(
            index=fold,
            seen=sorted(set(classes) - set(unseen)),
            unseen=sorted(unseen),
        )
        spec.validate(classes, superclass_map, both_sides=unseen_per_fold >= len(names))
        out.append(spec)
    return out


def train_val_split(samples: list[ImuWindow], fraction: float = 0.9, seed: int = 0):
    """Stratified train/validation split of labeled windows.

    Per class the validation share is max(1, floor(n_c * (1 - fraction))),
    so every class keeps at least one validation sample.
    """
    if not (0.0 < fraction < 1.0):
        raise ConfigError(f"train fraction must be in (0, 1), got {fraction}")
    by_class: dict[str, list[ImuWindow]] = {}
    for s in samples:
        if s.label is None:
            raise DataError(f"sample {s.id!r} is unlabeled; cannot stratify")
        by_class.setdefault(s.label, []).append(s)
    if not by_class:
        raise DataError("no samples to split")
    rng = np.random.default_rng(seed)
    train: list[ImuWindow] = []
    val: list[ImuWindow] = []
    for cls in sorted(by_class):
        group = by_class[cls]
        # epsilon counters float noise in 1-fraction (100*(1-0.9) must floor to 10)
        n_val = max(1, math.floor(len(group) * (1.0 - fraction) + 1e-9))
        if n_val >= len(group):
            raise DataError(f"class {cls!r} has only {len(group)} sample(s); cannot split")
        order = rng.permutation(len(group))
        val.extend(group[i] for i in order[:n_val])
        train.extend(group[i] for i in order[n_val:])
    return train, val


# ---------------------------------------------------------------------------
# semantic vectors and skeleton utilities
# ---------------------------------------------------------------------------

def build_semantic_set(per_class_video_embeddings: dict[str, list]) -> ClassSemanticSet:
    """Class semantic vector = arithmetic mean of that class's video embeddings."""
    if not per_class_video_embeddings:
        raise DataError("no classes given")
    dim = None
    vectors = {}
    provenance = {}
    for cls in sorted(per_class_video_embeddings):
        embs = [np.asarray(e, dtype=np.float64) for e in per_class_video_embeddings[cls]]
        if not embs:
            raise DataError(f"class {cls!r} has no video embeddings")
        lengths = {e.shape for e in embs}
        if len(lengths) != 1 or embs[0].ndim != 1:
            raise DataError(f"class {cls!r} has ragged embedding lengths {sorted(lengths)}")
        if dim is None:
            dim = embs[0].size
        elif embs[0].size != dim:
            raise DataError(
                f"class {cls!r} embeddings have length {embs[0].size}, other classes have {dim}"
            )
        vectors[cls] = np.mean(np.stack(embs), axis=0)
        provenance[cls] = len(embs)
    return ClassSemanticSet(embedding_dim=int(dim), vectors=vectors, provenance=provenance)


def resample_skeleton(seq: SkeletonSequence, target_frames: int) -> SkeletonSequence:
    """Linear per-joint, per-axis resampling on the normalized time axis."""
    if target_frames < 2:
        raise ConfigError(f"target_frames must be >= 2, got {target_frames}")
    if target_frames == seq.frames:
        return SkeletonSequence(class_name=seq.class_name, coords=seq.coords.copy())
    t_old = np.linspace(0.0, 1.0, seq.frames)
    t_new = np.linspace(0.0, 1.0, target_frames)
    flat = seq.flat()
    out = np.empty((target_frames, flat.shape[1]))
    for col in range(flat.shape[1]):
        out[:, col] = np.interp(t_new, t_old, flat[:, col])
    # endpoints are preserved exactly
    out[0] = flat[0]
    out[-1] = flat[-1]
    return SkeletonSequence(
        class_name=seq.class_name, coords=out.reshape(target_frames, seq.joints, seq.dims)
    )


def select_keypoints(raw: np.ndarray, index_list=DEFAULT_KEYPOINT_INDICES,
                     class_name: str = "") -> SkeletonSequence:
    """Project a (T, 25, K) raw keypoint sequence onto the configured joints."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 3 or raw.shape[1] != 25:
        raise DataError(f"raw keypoints must be (T, 25, K), got {raw.shape}")
    idx = list(index_list)
    if len(set(idx)) != len(idx):
        raise ConfigError(f"keypoint index list has duplicates: {idx}")
    bad = [i for i in idx if not (0 <= i < 25)]
    if bad:
        raise ConfigError(f"keypoint indices out of range [0, 25): {bad}")
    return SkeletonSequence(class_name=class_name, coords=raw[:, idx, :])


# ---------------------------------------------------------------------------
# synthetic fixture generator
# ---------------------------------------------------------------------------

@dataclass
class SynthConfig:
    classes: int = 8
    superclasses: int = 3
    samples_per_class: int = 40
    n: int = 64
    d: int = 6
    frames: int = 32
    skeletons_per_class: int = 10
    embedding_dim: int = 16
    folds: int = 4
    seed: int = 1
    name: str = "synth"

    def __post_init__(self):
        if self.superclasses < 2:
            raise ConfigError("need >= 2 super-classes")
        if self.classes < 2 * self.superclasses:
            raise ConfigError(
                f"{self.classes} classes over {self.superclasses} super-classes leaves "
                "a super-class with < 2 member classes"
            )
        if self.embedding_dim < self.superclasses:
            raise ConfigError("embedding_dim must be >= number of super-classes")
        if self.samples_per_class < 1 or self.skeletons_per_class < 1:
            raise ConfigError("need >= 1 sample and >= 1 skeleton per class")
        if self.n < 2 or self.d < 1 or self.frames < 2:
            raise ConfigError("need n >= 2, d >= 1, frames >= 2")


# fixed rest pose: 12 joints (L/R shoulder, elbow, wrist, hip, knee, ankle) in [-1,1]^2
_REST_POSE = np.array(
    [
        [-0.25, 0.55], [0.25, 0.55],     # shoulders
        [-0.45, 0.30], [0.45, 0.30],     # elbows
        [-0.50, 0.05], [0.50, 0.05],     # wrists
        [-0.15, 0.00], [0.15, 0.00],     # hips
        [-0.18, -0.40], [0.18, -0.40],   # knees
        [-0.20, -0.75], [0.20, -0.75],   # ankles
    ]
)

_CARRIER_FREQS = (1.0, 2.0, 3.5, 5.0)  # cycles per IMU window


def synth_generate(config: SynthConfig, out_dir: Path) -> Path:
    """Emit a self-consistent synthetic dataset; returns the manifest path.

    Construction: each class gets a unit prototype near its super-class
    direction; IMU windows are prototype-driven sinusoid mixtures with
    seeded jitter; skeleton videos are smooth limb oscillations whose
    frequency is a super-class trait and whose amplitude/phase pattern is a
    class trait; semantic vectors are lightly noised prototypes. Identical
    configs produce byte-identical output.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "skeletons").mkdir(exist_ok=True)
    rng = np.random.default_rng(config.seed)

    class_names = [f"act{i:02d}" for i in range(config.classes)]
    superclass_names = [f"group{j}" for j in range(config.superclasses)]
    mapping = {c: superclass_names[i % config.superclasses] for i, c in enumerate(class_names)}
    sc_index = {c: i % config.superclasses for i, c in enumerate(class_names)}

    E = config.embedding_dim
    basis, _ = np.linalg.qr(rng.normal(size=(E, config.superclasses)))
    prototypes = {}
    for c in class_names:
        eps = rng.normal(size=E)
        eps /= np.linalg.norm(eps)
        p = basis[:, sc_index[c]] + 0.35 * eps
        prototypes[c] = p / np.linalg.norm(p)

    # semantic vectors: noisy prototypes, provenance mimics 10 source videos
    vectors = {}
    for c in class_names:
        vectors[c] = prototypes[c] + 0.02 * rng.normal(size=E)
    semantics = ClassSemanticSet(
        embedding_dim=E, vectors=vectors, provenance={c: 10 for c in class_names}
    )

    # IMU: per-channel sinusoid mixture, amplitudes linear in the prototype
    mixing = rng.normal(size=(len(_CARRIER_FREQS), config.d, E))
    carrier_phase = rng.uniform(0.0, 2.0 * np.pi, size=(config.d, len(_CARRIER_FREQS)))
    t = np.arange(config.n) / config.n
    windows = []
    for c in class_names:
        amps = np.stack([mixing[k] @ prototypes[c] for k in range(len(_CARRIER_FREQS))])
        for s in range(config.samples_per_class):
            shift = rng.uniform(0.0, 1.0)
            jitter = 1.0 + 0.08 * rng.normal(size=amps.shape)
            x = np.zeros((config.n, config.d))
            for k, freq in enumerate(_CARRIER_FREQS):
                phase = 2.0 * np.pi * freq * (t[:, None] + shift) + carrier_phase[:, k]
                x += (amps[k] * jitter[k]) * np.sin(phase)
            x += 0.10 * rng.normal(size=x.shape)
            windows.append(ImuWindow(id=f"{c}__s{s:03d}", values=x, label=c))

    # skeletons: rest pose + per-joint oscillation; frequency is a super-class
    # trait, amplitude/phase pattern comes from the class prototype
    gain = rng.normal(size=(2, 12, E))
    phase_proj = rng.normal(size=(2, 12, E))
    tau = np.arange(config.frames) / config.frames
    # super-class identity is spatial: which joints carry the motion
    # (upper body / lower body / left side, cycling for extra super-classes)
    upper = np.array([1.0] * 6 + [0.15] * 6)
    lower = np.array([0.15] * 6 + [1.0] * 6)
    left = np.where(np.arange(12) % 2 == 0, 1.0, 0.15)
    joint_masks = [upper, lower, left]
    skeleton_files: list[tuple[str, SkeletonSequence]] = []
    for c in class_names:
        freq = 0.5 + 0.25 * (sc_index[c] % 3)
        mask = joint_masks[sc_index[c] % 3]
        amp = mask * (0.07 + 0.12 * np.minimum(np.abs(gain @ prototypes[c]), 1.2))  # (2, 12)
        rho = np.pi * (phase_proj @ prototypes[c])  # (2, 12)
        for v in range(config.skeletons_per_class):
            # videos of one class are phase-aligned up to a small jitter, so
            # the class-conditional mean keeps its motion amplitude
            offset = rng.uniform(-0.3, 0.3)
            vid_amp = amp * (1.0 + 0.05 * rng.normal(size=amp.shape))
            wave = np.sin(
                2.0 * np.pi * freq * tau[:, None, None] + rho.T[None, :, :] + offset
            )  # (T, 12, 2)
            coords = _REST_POSE[None, :, :] + vid_amp.T[None, :, :] * wave
            coords = coords + 0.008 * rng.normal(size=coords.shape)
            seq = SkeletonSequence(class_name=c, coords=np.clip(coords, -1.0, 1.0))
            skeleton_files.append((f"{c}__{v}.csv", seq))

    write_imu_csv(out_dir / "imu.csv", windows)
    write_semantics_json(out_dir / "semantics.json", semantics)
    write_superclass_json(out_dir / "superclasses.json", mapping)
    for fname, seq in skeleton_files:
        write_skeleton_csv(out_dir / "skeletons" / fname, seq)
    manifest = {
        "name": config.name,
        "imu_path": "imu.csv",
        "semantics_path": "semantics.json",
        "skeleton_dir": "skeletons",
        "superclass_path": "superclasses.json",
        "n": config.n,
        "d": config.d,
        "folds": config.folds,
        "joints": 12,
        "dims": 2,
        "seed": config.seed,
        "keypoint_indices": list(DEFAULT_KEYPOINT_INDICES),
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return manifest_path
