"""Tabular ingestion and preprocessing for the churn benchmark.

Stages: typed CSV loading, correlation pruning, iterative VIF elimination,
full-vocabulary one-hot encoding, seeded balanced undersampling, optional
z-score standardization, PCA with elbow-based component selection, and a
stratified train/test split.  Every stage is deterministic given a seed.
"""
from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ClassTooSmall,
    EmptyFile,
    LengthMismatch,
    MissingColumn,
    NonIncreasingRatios,
    SingleClass,
    TooFewComponents,
    UnknownColumn,
    UnparsableCell,
    ZeroVariance,
)

CATEGORICAL = "categorical"
NUMERIC = "numeric"
TARGET = "target"
ID = "id"

COLUMN_KINDS = (CATEGORICAL, NUMERIC, TARGET, ID)


@dataclass(frozen=True)
class ColumnSpec:
    """Declared name and kind of one CSV column."""

    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise ValueError(f"unknown column kind {self.kind!r}")


@dataclass(frozen=True)
class Dataset:
    """Typed columnar view of a loaded CSV.

    Numeric columns hold float arrays; categorical, target and id columns
    hold string tuples.  `blank_counts` records how many blank numeric
    cells were coerced to 0.0 per column.
    """

    schema: tuple[ColumnSpec, ...]
    columns: dict[str, object]
    n_rows: int
    blank_counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        targets = [c for c in self.schema if c.kind == TARGET]
        if len(targets) != 1:
            raise ValueError("schema must declare exactly one target column")

    @property
    def target_name(self) -> str:
        return next(c.name for c in self.schema if c.kind == TARGET)

    def feature_specs(self) -> list[ColumnSpec]:
        return [c for c in self.schema if c.kind in (CATEGORICAL, NUMERIC)]

    def spec_of(self, name: str) -> ColumnSpec:
        for c in self.schema:
            if c.name == name:
                return c
        raise UnknownColumn(f"column {name!r} not in schema")

    def drop_columns(self, names) -> "Dataset":
        names = set(names)
        for name in names:
            self.spec_of(name)
        schema = tuple(c for c in self.schema if c.name not in names)
        columns = {k: v for k, v in self.columns.items() if k not in names}
        return dataclasses.replace(self, schema=schema, columns=columns)


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense numeric design matrix with named columns and binary labels."""

    data: np.ndarray
    column_names: tuple[str, ...]
    labels: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=float)
        labels = np.ascontiguousarray(self.labels, dtype=int)
        if data.ndim != 2:
            raise ValueError("data must be 2-D")
        if data.shape[1] != len(self.column_names):
            raise ValueError("one name per column required")
        if not np.all(np.isfinite(data)):
            raise ValueError("matrix entries must be finite")
        if labels.shape != (data.shape[0],):
            raise ValueError("label length must equal row count")
        if labels.size and not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0/1")
        data.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "labels", labels)

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise UnknownColumn(f"column {name!r} not in matrix") from None

    def drop_columns(self, names) -> "FeatureMatrix":
        drop = {self.column_index(n) for n in names}
        keep = [j for j in range(self.n_cols) if j not in drop]
        return FeatureMatrix(
            self.data[:, keep],
            tuple(self.column_names[j] for j in keep),
            self.labels,
        )

    def take_rows(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx, dtype=int)
        return FeatureMatrix(self.data[idx], self.column_names, self.labels[idx])


# --- CSV loading --------------------------------------------------------------

def load_csv(path, schema) -> Dataset:
    """Load a comma-delimited, quoted, header-first CSV against a schema.

    Extra file columns are ignored; schema columns must all be present.
    Blank or whitespace-only numeric cells parse as 0.0 and are counted
    per column in the returned Dataset.
    """
    schema = tuple(schema)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyFile(f"{path}: no header row")
        present = set(reader.fieldnames)
        for spec in schema:
            if spec.name not in present:
                raise MissingColumn(f"{path}: column {spec.name!r} not in header")
        raw_rows = list(reader)
    if not raw_rows:
        raise EmptyFile(f"{path}: no data rows")

    columns: dict[str, object] = {}
    blanks: dict[str, int] = {}
    for spec in schema:
        cells = [row[spec.name] for row in raw_rows]
        if spec.kind == NUMERIC:
            values = np.empty(len(cells))
            n_blank = 0
            for i, cell in enumerate(cells):
                text = (cell or "").strip()
                if not text:
                    values[i] = 0.0
                    n_blank += 1
                    continue
                try:
                    values[i] = float(text)
                except ValueError:
                    raise UnparsableCell(i, spec.name, cell) from None
            columns[spec.name] = values
            if n_blank:
                blanks[spec.name] = n_blank
        else:
            columns[spec.name] = tuple((cell or "").strip() for cell in cells)
    return Dataset(schema, columns, len(raw_rows), blanks)


def binary_labels(dataset: Dataset) -> tuple[np.ndarray, dict[str, int]]:
    """Map the two target values to 0/1 in sorted order (e.g. No=0, Yes=1)."""
    raw = dataset.columns[dataset.target_name]
    values = sorted(set(raw))
    if len(values) < 2:
        raise SingleClass(f"target has a single value {values[0]!r}")
    if len(values) > 2:
        raise ValueError(f"binary target expected, got {len(values)} values")
    mapping = {values[0]: 0, values[1]: 1}
    return np.array([mapping[v] for v in raw], dtype=int), mapping


# --- column statistics ----------------------------------------------------------

def pearson_corr(a, b) -> float:
    """Sample Pearson correlation of two equal-length columns."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch("columns must be 1-D and equal length")
    if a.size < 2:
        raise LengthMismatch("need at least two observations")
    da = a - a.mean()
    db = b - b.mean()
    va = np.dot(da, da)
    vb = np.dot(db, db)
    if va == 0 or vb == 0:
        raise ZeroVariance("constant column has no correlation")
    return float(np.dot(da, db) / math.sqrt(va * vb))


@dataclass(frozen=True)
class VifEntry:
    column: str
    vif: float
    infinite: bool


def compute_vif(matrix: FeatureMatrix) -> list[VifEntry]:
    """Variance inflation factor per column.

    VIF_j = 1/(1 - R^2_j) from an intercept-included least-squares fit of
    column j on the others.  Near-perfect fits (R^2 > 1 - 1e-12) are
    reported as infinite and flagged rather than raised.
    """
    X = matrix.data
    if X.shape[1] < 2:
        raise LengthMismatch("VIF needs at least two columns")
    entries = []
    for j in range(X.shape[1]):
        y = X[:, j]
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        if ss_tot == 0:
            raise ZeroVariance(f"column {matrix.column_names[j]!r} is constant")
        others = np.delete(X, j, axis=1)
        design = np.column_stack([np.ones(X.shape[0]), others])
        coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
        ss_res = float(np.sum((y - design @ coef) ** 2))
        r2 = max(0.0, 1.0 - ss_res / ss_tot)
        if r2 > 1.0 - 1e-12:
            entries.append(VifEntry(matrix.column_names[j], math.inf, True))
        else:
            entries.append(VifEntry(matrix.column_names[j], 1.0 / (1.0 - r2), False))
    return entries


def iterative_vif_prune(
    matrix: FeatureMatrix, threshold: float
) -> tuple[FeatureMatrix, list[list[VifEntry]], list[VifEntry]]:
    """Drop the worst VIF offender and recompute until all fall under threshold.

    Ties (including several infinite entries) break toward the earlier
    column.  Returns the pruned matrix, the per-iteration VIF tables, and
    the entries that were dropped, in drop order.
    """
    if threshold <= 1:
        raise ValueError("VIF threshold must exceed 1")
    iterations: list[list[VifEntry]] = []
    dropped: list[VifEntry] = []
    while matrix.n_cols >= 2:
        entries = compute_vif(matrix)
        iterations.append(entries)
        worst = max(enumerate(entries), key=lambda it: (it[1].vif, -it[0]))[1]
        if not worst.infinite and worst.vif <= threshold:
            break
        dropped.append(worst)
        matrix = matrix.drop_columns([worst.column])
    return matrix, iterations, dropped


# --- encoding to numeric matrices ------------------------------------------------

def _vocabulary(values) -> list[str]:
    seen: dict[str, None] = {}
    for v in values:
        seen.setdefault(v, None)
    return list(seen)


def ordinal_matrix(dataset: Dataset) -> FeatureMatrix:
    """Feature columns as numbers: categories coded by first appearance.

    Used for the VIF stage, which needs one numeric column per feature
    before any one-hot expansion.
    """
    labels, _ = binary_labels(dataset)
    cols, names = [], []
    for spec in dataset.feature_specs():
        if spec.kind == NUMERIC:
            cols.append(np.asarray(dataset.columns[spec.name], dtype=float))
        else:
            vocab = {v: i for i, v in enumerate(_vocabulary(dataset.columns[spec.name]))}
            cols.append(np.array([vocab[v] for v in dataset.columns[spec.name]], dtype=float))
        names.append(spec.name)
    return FeatureMatrix(np.column_stack(cols), tuple(names), labels)


def one_hot(dataset: Dataset, columns) -> FeatureMatrix:
    """Expand the listed categorical columns into full-vocabulary indicators.

    No category is dropped as a reference level.  Column order follows the
    schema; categories appear in first-appearance order with names like
    "Contract=Month-to-month".  Numeric feature columns pass through.
    """
    columns = list(columns)
    for name in columns:
        if dataset.spec_of(name).kind != CATEGORICAL:
            raise UnknownColumn(f"column {name!r} is not categorical")
    listed = set(columns)
    labels, _ = binary_labels(dataset)
    cols, names = [], []
    for spec in dataset.feature_specs():
        if spec.name in listed:
            values = dataset.columns[spec.name]
            for cat in _vocabulary(values):
                cols.append(np.array([1.0 if v == cat else 0.0 for v in values]))
                names.append(f"{spec.name}={cat}")
        elif spec.kind == NUMERIC:
            cols.append(np.asarray(dataset.columns[spec.name], dtype=float))
            names.append(spec.name)
        else:
            raise UnknownColumn(
                f"categorical column {spec.name!r} must be listed for one-hot"
            )
    return FeatureMatrix(np.column_stack(cols), tuple(names), labels)


# --- balancing and splitting ------------------------------------------------------

def undersample(matrix: FeatureMatrix, seed: int) -> FeatureMatrix:
    """Balance classes by sampling the majority down to the minority count.

    All minority rows are kept; the combined rows are shuffled by the same
    seeded generator, so equal seeds give identical output.
    """
    labels = matrix.labels
    counts = np.bincount(labels, minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise SingleClass("undersampling needs both classes present")
    rng = np.random.default_rng(seed)
    minority = int(np.argmin(counts))
    keep = np.flatnonzero(labels == minority)
    majority_idx = np.flatnonzero(labels != minority)
    sampled = rng.choice(majority_idx, size=counts[minority], replace=False)
    idx = rng.permutation(np.concatenate([keep, sampled]))
    return matrix.take_rows(idx)


def train_test_split(
    matrix: FeatureMatrix, ratio: float, seed: int
) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Seeded stratified split; each class contributes floor(m*ratio) to train."""
    if not 0 < ratio < 1:
        raise ValueError("split ratio must be in (0, 1)")
    labels = matrix.labels
    perm = np.random.default_rng(seed).permutation(matrix.n_rows)
    in_train = np.zeros(matrix.n_rows, dtype=bool)
    for cls in (0, 1):
        members = perm[labels[perm] == cls]
        if members.size < 2:
            raise ClassTooSmall(f"class {cls} has {members.size} rows")
        # epsilon guards floor against float products landing just under an integer
        n_train = int(math.floor(members.size * ratio + 1e-9))
        in_train[members[:n_train]] = True
    train_idx = perm[in_train[perm]]
    test_idx = perm[~in_train[perm]]
    return matrix.take_rows(train_idx), matrix.take_rows(test_idx)


# --- standardization and PCA -------------------------------------------------------

@dataclass(frozen=True)
class Standardizer:
    """Column-wise z-score parameters fitted on one matrix."""

    mean: np.ndarray
    scale: np.ndarray

    @staticmethod
    def fit(matrix: FeatureMatrix) -> "Standardizer":
        mean = matrix.data.mean(axis=0)
        scale = matrix.data.std(axis=0)
        scale = np.where(scale == 0, 1.0, scale)  # constant columns pass through
        return Standardizer(mean, scale)

    def transform(self, matrix: FeatureMatrix) -> FeatureMatrix:
        return FeatureMatrix(
            (matrix.data - self.mean) / self.scale, matrix.column_names, matrix.labels
        )


@dataclass(frozen=True)
class PcaModel:
    """Principal components fitted on a training matrix.

    `components` is k x d with orthonormal rows; `explained_variance_ratio`
    covers all d directions (zero-padded past the numerical rank) so its
    cumulative curve ends at 1.
    """

    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray
    rank_deficient: bool

    @property
    def n_components(self) -> int:
        return self.components.shape[0]


def pca_fit(matrix: FeatureMatrix, k: int) -> PcaModel:
    """Top-k principal directions of the centered matrix via SVD.

    Sign convention: the largest-magnitude entry of each component is
    positive.  k past the numerical rank is allowed; the model is flagged
    rank-deficient and trailing ratios are ~0.
    """
    X = matrix.data
    m, d = X.shape
    if not 1 <= k <= min(m - 1, d):
        raise ValueError(f"k={k} outside [1, min(rows-1, cols)={min(m - 1, d)}]")
    mean = X.mean(axis=0)
    _, sing, vt = np.linalg.svd(X - mean, full_matrices=False)
    total = float(np.sum(sing**2))
    ratios = np.zeros(d)
    if total > 0:
        ratios[: sing.size] = sing**2 / total
    components = vt[:k].copy()
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1
    rank = int(np.sum(sing > sing[0] * max(m, d) * np.finfo(float).eps)) if sing.size else 0
    return PcaModel(mean, components, ratios, rank_deficient=k > rank)


def pca_transform(model: PcaModel, matrix: FeatureMatrix) -> FeatureMatrix:
    """Project rows onto the fitted components."""
    scores = (matrix.data - model.mean) @ model.components.T
    names = tuple(f"pc{i}" for i in range(model.n_components))
    return FeatureMatrix(scores, names, matrix.labels)


def pca_inverse_transform(model: PcaModel, matrix: FeatureMatrix) -> np.ndarray:
    """Map component scores back to the original feature space."""
    return matrix.data @ model.components + model.mean


def find_elbow(ratios) -> int:
    """Elbow of an explained-variance curve.

    Builds the cumulative curve and returns the index with maximum
    perpendicular distance to the chord joining its endpoints; ties break
    toward the smaller index.
    """
    ratios = np.asarray(ratios, dtype=float)
    if ratios.ndim != 1 or ratios.size < 3:
        raise TooFewComponents("elbow needs at least three ratios")
    if np.any(np.diff(ratios) > 1e-9):
        raise NonIncreasingRatios("ratios must be nonincreasing")
    cum = np.cumsum(ratios)
    n = cum.size
    x = np.arange(n)
    dx, dy = n - 1, cum[-1] - cum[0]
    # distance from (x_i, cum_i) to the line through (0, cum_0), (n-1, cum_{n-1})
    dist = np.abs(dy * x - dx * (cum - cum[0])) / math.hypot(dx, dy)
    # near-ties (within float noise of the max) resolve to the smaller index
    return int(np.flatnonzero(dist >= dist.max() - 1e-12)[0])


# --- end-to-end orchestration --------------------------------------------------------

@dataclass(frozen=True)
class PreprocessOptions:
    """Knobs for run_preprocess; defaults match the telco churn benchmark."""

    corr_threshold: float = 0.8
    vif_threshold: float = 12.0
    extra_drops: tuple[str, ...] = ()
    standardize: bool = True
    split_ratio: float = 0.8
    seed: int = 0
    n_components: int | None = None  # None: pick by elbow


@dataclass
class DroppedColumn:
    name: str
    reason: str  # id | correlation | vif | config
    statistic: float


@dataclass
class PreprocessReport:
    """What the pipeline did and why, one entry per decision."""

    dropped: list[DroppedColumn] = field(default_factory=list)
    vif_iterations: list[list[VifEntry]] = field(default_factory=list)
    blank_numeric_cells: dict[str, int] = field(default_factory=dict)
    label_mapping: dict[str, int] = field(default_factory=dict)
    one_hot_columns: int = 0
    class_counts_before: dict[str, int] = field(default_factory=dict)
    class_counts_after: dict[str, int] = field(default_factory=dict)
    elbow_index: int = 0
    cumulative_at_elbow: float = 0.0
    n_components: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class PreprocessResult:
    train: FeatureMatrix
    test: FeatureMatrix
    pca: PcaModel
    standardizer: Standardizer | None
    report: PreprocessReport


def _class_counts(labels: np.ndarray) -> dict[str, int]:
    counts = np.bincount(labels, minlength=2)
    return {"0": int(counts[0]), "1": int(counts[1])}


def run_preprocess(dataset: Dataset, options: PreprocessOptions) -> PreprocessResult:
    """Full preprocessing chain from a typed Dataset to train/test matrices.

    The stages run in a fixed order: drop ids, prune one of each highly
    correlated numeric pair, drop high-VIF columns (on ordinal-coded
    features), one-hot the surviving categoricals, undersample to balance,
    standardize, fit PCA, keep components up to the elbow, then split.
    Balancing and PCA both happen before the split; the report notes it.
    """
    report = PreprocessReport(blank_numeric_cells=dict(dataset.blank_counts))

    for spec in dataset.schema:
        if spec.kind == ID:
            report.dropped.append(DroppedColumn(spec.name, "id", 0.0))
    dataset = dataset.drop_columns([d.name for d in report.dropped])

    # correlated numeric pairs: later column of each offending pair goes
    numeric = [c.name for c in dataset.feature_specs() if c.kind == NUMERIC]
    to_drop: dict[str, float] = {}
    for i in range(len(numeric)):
        for j in range(i + 1, len(numeric)):
            if numeric[i] in to_drop or numeric[j] in to_drop:
                continue
            r = pearson_corr(dataset.columns[numeric[i]], dataset.columns[numeric[j]])
            if abs(r) >= options.corr_threshold:
                to_drop[numeric[j]] = r
    for name, r in to_drop.items():
        report.dropped.append(DroppedColumn(name, "correlation", r))
    dataset = dataset.drop_columns(list(to_drop))

    coded = ordinal_matrix(dataset)
    pruned, iterations, vif_dropped = iterative_vif_prune(coded, options.vif_threshold)
    report.vif_iterations = iterations
    for entry in vif_dropped:
        report.dropped.append(DroppedColumn(entry.column, "vif", entry.vif))
    dataset = dataset.drop_columns([e.column for e in vif_dropped])

    for name in options.extra_drops:
        dataset.spec_of(name)
        report.dropped.append(DroppedColumn(name, "config", 0.0))
    dataset = dataset.drop_columns(list(options.extra_drops))

    _, mapping = binary_labels(dataset)
    report.label_mapping = dict(mapping)
    categorical = [c.name for c in dataset.feature_specs() if c.kind == CATEGORICAL]
    matrix = one_hot(dataset, categorical)
    report.one_hot_columns = matrix.n_cols

    report.class_counts_before = _class_counts(matrix.labels)
    matrix = undersample(matrix, options.seed)
    report.class_counts_after = _class_counts(matrix.labels)

    standardizer = None
    if options.standardize:
        standardizer = Standardizer.fit(matrix)
        matrix = standardizer.transform(matrix)

    full = pca_fit(matrix, min(matrix.n_rows - 1, matrix.n_cols))
    elbow = find_elbow(full.explained_variance_ratio)
    report.elbow_index = elbow
    report.cumulative_at_elbow = float(
        np.cumsum(full.explained_variance_ratio)[elbow]
    )
    k = options.n_components if options.n_components is not None else max(elbow, 1)
    model = pca_fit(matrix, k)
    report.n_components = k
    if model.rank_deficient:
        report.notes.append("requested components exceed numerical rank")
    report.notes.append(
        "balancing, standardization and PCA are fitted on the full pre-split data"
    )
    scores = pca_transform(model, matrix)

    train, test = train_test_split(scores, options.split_ratio, options.seed)
    return PreprocessResult(train, test, model, standardizer, report)
