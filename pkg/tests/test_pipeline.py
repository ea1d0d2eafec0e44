import math

import numpy as np
import pytest

from qembed import pipeline as pl
from qembed.errors import (
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
from qembed.pipeline import ColumnSpec, FeatureMatrix


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")


SCHEMA = (
    ColumnSpec("id", pl.ID),
    ColumnSpec("color", pl.CATEGORICAL),
    ColumnSpec("amount", pl.NUMERIC),
    ColumnSpec("label", pl.TARGET),
)


class TestLoadCsv:
    def test_basic(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, ["id", "color", "amount", "label"],
                  [["a", "red", "1.5", "No"], ["b", "blue", "2", "Yes"]])
        ds = pl.load_csv(p, SCHEMA)
        assert ds.n_rows == 2
        assert list(ds.columns["amount"]) == [1.5, 2.0]
        assert ds.columns["color"] == ("red", "blue")
        assert ds.target_name == "label"

    def test_column_order_insensitive(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(p1, ["id", "color", "amount", "label"], [["a", "red", "1", "No"]])
        write_csv(p2, ["label", "amount", "id", "color"], [["No", "1", "a", "red"]])
        d1, d2 = pl.load_csv(p1, SCHEMA), pl.load_csv(p2, SCHEMA)
        assert d1.columns == d2.columns

    def test_missing_column(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, ["id", "color", "amount"], [["a", "red", "1"]])
        with pytest.raises(MissingColumn):
            pl.load_csv(p, SCHEMA)

    def test_blank_numeric_counted(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, ["id", "color", "amount", "label"],
                  [["a", "red", " ", "No"], ["b", "red", "", "Yes"],
                   ["c", "blue", "3", "No"]])
        ds = pl.load_csv(p, SCHEMA)
        assert ds.blank_counts == {"amount": 2}
        assert list(ds.columns["amount"]) == [0.0, 0.0, 3.0]

    def test_unparsable_cell(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, ["id", "color", "amount", "label"], [["a", "red", "x9", "No"]])
        with pytest.raises(UnparsableCell) as info:
            pl.load_csv(p, SCHEMA)
        assert info.value.column == "amount"
        assert info.value.row == 0

    def test_empty_file(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, ["id", "color", "amount", "label"], [])
        with pytest.raises(EmptyFile):
            pl.load_csv(p, SCHEMA)

    def test_extra_columns_ignored(self, tmp_path):
        p = tmp_path / "d.csv"
        write_csv(p, ["junk", "id", "color", "amount", "label"],
                  [["zz", "a", "red", "1", "No"]])
        ds = pl.load_csv(p, SCHEMA)
        assert "junk" not in ds.columns


class TestPearson:
    def test_identical(self):
        a = np.array([1.0, 2.0, 5.0, 7.0])
        assert pl.pearson_corr(a, a) == pytest.approx(1.0)

    def test_negated(self):
        a = np.array([1.0, 2.0, 5.0, 7.0])
        assert pl.pearson_corr(a, -a) == pytest.approx(-1.0)

    def test_matches_numpy(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b = rng.normal(size=(2, 30))
            assert pl.pearson_corr(a, b) == pytest.approx(
                np.corrcoef(a, b)[0, 1], abs=1e-12
            )

    def test_errors(self):
        with pytest.raises(ZeroVariance):
            pl.pearson_corr([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(LengthMismatch):
            pl.pearson_corr([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(LengthMismatch):
            pl.pearson_corr([1.0], [2.0])


def matrix_of(data, names=None, labels=None):
    data = np.asarray(data, dtype=float)
    names = names or tuple(f"c{i}" for i in range(data.shape[1]))
    labels = np.zeros(data.shape[0], dtype=int) if labels is None else labels
    return FeatureMatrix(data, names, labels)


class TestVif:
    def test_independent_columns_near_one(self):
        rng = np.random.default_rng(5)
        X = matrix_of(rng.normal(size=(1000, 2)))
        for entry in pl.compute_vif(X):
            assert 1.0 <= entry.vif <= 1.2
            assert not entry.infinite

    def test_two_column_oracle(self):
        # for two columns VIF = 1/(1 - r^2) with r the Pearson correlation
        rng = np.random.default_rng(7)
        a = rng.normal(size=400)
        b = 0.6 * a + rng.normal(size=400)
        X = matrix_of(np.column_stack([a, b]))
        r = pl.pearson_corr(a, b)
        expected = 1.0 / (1.0 - r * r)
        for entry in pl.compute_vif(X):
            assert entry.vif == pytest.approx(expected, rel=1e-9)

    def test_inverse_correlation_oracle(self):
        # VIFs are the diagonal of the inverse correlation matrix
        rng = np.random.default_rng(11)
        base = rng.normal(size=(500, 5))
        base[:, 3] = 0.5 * base[:, 0] + 0.4 * base[:, 1] + 0.2 * base[:, 3]
        X = matrix_of(base)
        oracle = np.diag(np.linalg.inv(np.corrcoef(base.T)))
        got = [e.vif for e in pl.compute_vif(X)]
        assert np.allclose(got, oracle, rtol=1e-6)

    def test_duplicated_column_flagged(self):
        rng = np.random.default_rng(13)
        a = rng.normal(size=100)
        X = matrix_of(np.column_stack([a, a]), names=("a1", "a2"))
        entries = pl.compute_vif(X)
        assert all(e.infinite and math.isinf(e.vif) for e in entries)

    def test_constant_column(self):
        X = matrix_of([[1.0, 3.0], [1.0, 4.0], [1.0, 5.0]])
        with pytest.raises(ZeroVariance):
            pl.compute_vif(X)


class TestIterativeVifPrune:
    def test_all_under_threshold_unchanged(self):
        rng = np.random.default_rng(17)
        X = matrix_of(rng.normal(size=(200, 3)))
        pruned, iters, dropped = pl.iterative_vif_prune(X, 12.0)
        assert pruned.column_names == X.column_names
        assert dropped == []
        assert len(iters) == 1

    def test_duplicate_drops_one_copy(self):
        rng = np.random.default_rng(19)
        a = rng.normal(size=150)
        b = rng.normal(size=150)
        X = matrix_of(np.column_stack([a, a, b]), names=("a1", "a2", "b"))
        pruned, _, dropped = pl.iterative_vif_prune(X, 12.0)
        assert [e.column for e in dropped] == ["a1"]  # tie breaks to earlier column
        assert pruned.column_names == ("a2", "b")
        assert all(e.vif <= 12.0 for e in pl.compute_vif(pruned))

    def test_threshold_validated(self):
        with pytest.raises(ValueError):
            pl.iterative_vif_prune(matrix_of(np.eye(3)), 1.0)


def make_dataset(rows, schema):
    """Columnar Dataset from row tuples, typed by the schema."""
    columns = {}
    for j, spec in enumerate(schema):
        cells = [r[j] for r in rows]
        if spec.kind == pl.NUMERIC:
            columns[spec.name] = np.array(cells, dtype=float)
        else:
            columns[spec.name] = tuple(str(c) for c in cells)
    return pl.Dataset(tuple(schema), columns, len(rows))


class TestOneHot:
    schema = (
        ColumnSpec("color", pl.CATEGORICAL),
        ColumnSpec("size", pl.CATEGORICAL),
        ColumnSpec("amount", pl.NUMERIC),
        ColumnSpec("label", pl.TARGET),
    )

    def make(self):
        rows = [
            ("red", "S", 1.0, "No"),
            ("blue", "M", 2.0, "Yes"),
            ("red", "M", 3.0, "No"),
            ("green", "S", 4.0, "Yes"),
        ]
        return make_dataset(rows, self.schema)

    def test_full_vocabulary_first_appearance(self):
        m = pl.one_hot(self.make(), ["color", "size"])
        assert m.column_names == (
            "color=red", "color=blue", "color=green", "size=S", "size=M", "amount",
        )
        assert np.allclose(m.data[:, 0], [1, 0, 1, 0])
        assert np.allclose(m.data[:, 5], [1, 2, 3, 4])

    def test_indicator_groups_sum_to_one(self):
        m = pl.one_hot(self.make(), ["color", "size"])
        assert np.allclose(m.data[:, 0:3].sum(axis=1), 1.0)
        assert np.allclose(m.data[:, 3:5].sum(axis=1), 1.0)

    def test_labels_sorted_mapping(self):
        m = pl.one_hot(self.make(), ["color", "size"])
        assert list(m.labels) == [0, 1, 0, 1]  # No=0, Yes=1

    def test_single_category_column(self):
        rows = [("red", "S", 1.0, "No"), ("red", "M", 2.0, "Yes")]
        ds = make_dataset(rows, self.schema)
        m = pl.one_hot(ds, ["color", "size"])
        assert np.allclose(m.data[:, m.column_index("color=red")], 1.0)

    def test_unknown_and_unlisted(self):
        ds = self.make()
        with pytest.raises(UnknownColumn):
            pl.one_hot(ds, ["shape"])
        with pytest.raises(UnknownColumn):
            pl.one_hot(ds, ["amount"])  # numeric is not one-hot-able
        with pytest.raises(UnknownColumn):
            pl.one_hot(ds, ["color"])  # size left unlisted


class TestUndersample:
    def make(self, n0, n1, seed=0):
        rng = np.random.default_rng(seed)
        labels = np.array([0] * n0 + [1] * n1)
        return matrix_of(rng.normal(size=(n0 + n1, 3)), labels=labels)

    def test_churn_like_counts(self):
        m = pl.undersample(self.make(5174, 1869), seed=1)
        assert m.n_rows == 3738
        assert int(m.labels.sum()) == 1869

    def test_rows_come_from_input(self):
        X = self.make(30, 10)
        out = pl.undersample(X, seed=2)
        in_rows = {tuple(r) for r in X.data}
        assert all(tuple(r) in in_rows for r in out.data)

    def test_balanced_input_multiset_unchanged(self):
        X = self.make(15, 15)
        out = pl.undersample(X, seed=3)
        assert sorted(map(tuple, out.data)) == sorted(map(tuple, X.data))

    def test_deterministic(self):
        X = self.make(40, 12)
        a = pl.undersample(X, seed=9)
        b = pl.undersample(X, seed=9)
        assert np.array_equal(a.data, b.data)
        assert np.array_equal(a.labels, b.labels)

    def test_single_class(self):
        with pytest.raises(SingleClass):
            pl.undersample(matrix_of(np.ones((4, 2)), labels=np.ones(4, dtype=int)), 0)


class TestSplit:
    def test_churn_counts(self):
        labels = np.array([0, 1] * 1869)
        X = matrix_of(np.arange(3738 * 2, dtype=float).reshape(3738, 2), labels=labels)
        train, test = pl.train_test_split(X, 0.8, seed=4)
        assert train.n_rows == 2990 and test.n_rows == 748
        assert int(train.labels.sum()) == 1495
        assert int(test.labels.sum()) == 374

    def test_tiny_balanced(self):
        X = matrix_of(np.eye(4), labels=np.array([0, 0, 1, 1]))
        train, test = pl.train_test_split(X, 0.5, seed=5)
        assert train.n_rows == test.n_rows == 2
        assert sorted(train.labels) == [0, 1]
        assert sorted(test.labels) == [0, 1]

    def test_partition(self):
        rng = np.random.default_rng(6)
        X = matrix_of(rng.normal(size=(101, 3)),
                      labels=rng.integers(0, 2, size=101))
        train, test = pl.train_test_split(X, 0.8, seed=6)
        together = sorted(map(tuple, np.vstack([train.data, test.data])))
        assert together == sorted(map(tuple, X.data))

    def test_deterministic(self):
        X = matrix_of(np.random.default_rng(0).normal(size=(50, 2)),
                      labels=np.array([0, 1] * 25))
        a = pl.train_test_split(X, 0.8, seed=7)
        b = pl.train_test_split(X, 0.8, seed=7)
        assert np.array_equal(a[0].data, b[0].data)
        assert np.array_equal(a[1].data, b[1].data)

    def test_exact_ratio_floor(self):
        # 10 rows per class at 0.7 must put 7 in train, not 6
        X = matrix_of(np.zeros((20, 1)), labels=np.array([0, 1] * 10))
        train, test = pl.train_test_split(X, 0.7, seed=8)
        assert train.n_rows == 14 and test.n_rows == 6

    def test_class_too_small(self):
        X = matrix_of(np.zeros((3, 1)), labels=np.array([0, 0, 1]))
        with pytest.raises(ClassTooSmall):
            pl.train_test_split(X, 0.5, seed=0)

    def test_bad_ratio(self):
        X = matrix_of(np.zeros((4, 1)), labels=np.array([0, 0, 1, 1]))
        with pytest.raises(ValueError):
            pl.train_test_split(X, 1.0, seed=0)


class TestPca:
    def test_roundtrip_full_rank(self):
        rng = np.random.default_rng(8)
        X = matrix_of(rng.normal(size=(40, 5)))
        model = pl.pca_fit(X, 5)
        back = pl.pca_inverse_transform(model, pl.pca_transform(model, X))
        assert np.max(np.abs(back - X.data)) < 1e-8

    def test_line_cloud(self):
        rng = np.random.default_rng(9)
        t = rng.normal(size=200)
        X = matrix_of(np.column_stack([t, 2 * t + 1e-9 * rng.normal(size=200)]))
        model = pl.pca_fit(X, 2)
        assert model.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-9)
        assert model.explained_variance_ratio[1] == pytest.approx(0.0, abs=1e-9)

    def test_ratios_match_covariance_eigenvalues(self):
        rng = np.random.default_rng(10)
        data = rng.normal(size=(120, 6)) @ np.diag([5, 3, 2, 1, 0.5, 0.1])
        X = matrix_of(data)
        model = pl.pca_fit(X, 6)
        eigs = np.sort(np.linalg.eigvalsh(np.cov(data.T)))[::-1]
        assert np.allclose(model.explained_variance_ratio, eigs / eigs.sum(), atol=1e-9)

    def test_components_orthonormal(self):
        rng = np.random.default_rng(11)
        X = matrix_of(rng.normal(size=(60, 7)))
        model = pl.pca_fit(X, 4)
        gram = model.components @ model.components.T
        assert np.max(np.abs(gram - np.eye(4))) < 1e-9

    def test_sign_convention(self):
        rng = np.random.default_rng(12)
        X = matrix_of(rng.normal(size=(50, 4)))
        model = pl.pca_fit(X, 4)
        for row in model.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_ratios_nonincreasing_and_sum_one(self):
        rng = np.random.default_rng(13)
        X = matrix_of(rng.normal(size=(80, 9)))
        model = pl.pca_fit(X, 3)
        r = model.explained_variance_ratio
        assert r.size == 9
        assert np.all(np.diff(r) <= 1e-12)
        assert r.sum() == pytest.approx(1.0, abs=1e-9)

    def test_score_variance_proportional_to_ratios(self):
        rng = np.random.default_rng(14)
        X = matrix_of(rng.normal(size=(100, 5)) @ np.diag([4, 2, 1, 0.5, 0.2]))
        model = pl.pca_fit(X, 5)
        scores = pl.pca_transform(model, X).data
        var = scores.var(axis=0, ddof=1)
        scale = var / model.explained_variance_ratio
        assert np.max(np.abs(scale - scale[0])) < 1e-6 * scale[0]

    def test_rank_deficiency_flagged(self):
        rng = np.random.default_rng(15)
        t = rng.normal(size=(30, 2))
        X = matrix_of(np.column_stack([t, t @ np.array([[1.0], [1.0]])]))
        model = pl.pca_fit(X, 3)
        assert model.rank_deficient
        assert model.explained_variance_ratio[2] == pytest.approx(0.0, abs=1e-12)

    def test_k_bounds(self):
        X = matrix_of(np.random.default_rng(16).normal(size=(10, 4)))
        with pytest.raises(ValueError):
            pl.pca_fit(X, 0)
        with pytest.raises(ValueError):
            pl.pca_fit(X, 5)


class TestElbow:
    def test_hand_oracle(self):
        assert pl.find_elbow([0.7, 0.2, 0.05, 0.03, 0.02]) == 1

    def test_linear_curve_tie_break(self):
        assert pl.find_elbow([0.2, 0.2, 0.2, 0.2, 0.2]) == 0

    def test_sharp_knee(self):
        ratios = np.array([0.5, 0.45, 0.01, 0.01, 0.01, 0.01, 0.01])
        # cumulative rises steeply then flattens after index 1
        assert pl.find_elbow(ratios) == 1

    def test_errors(self):
        with pytest.raises(TooFewComponents):
            pl.find_elbow([0.9, 0.1])
        with pytest.raises(NonIncreasingRatios):
            pl.find_elbow([0.2, 0.5, 0.3])


class TestStandardizer:
    def test_zero_mean_unit_std(self):
        rng = np.random.default_rng(18)
        X = matrix_of(rng.normal(3, 5, size=(200, 4)))
        z = pl.Standardizer.fit(X).transform(X)
        assert np.allclose(z.data.mean(axis=0), 0, atol=1e-12)
        assert np.allclose(z.data.std(axis=0), 1, atol=1e-12)

    def test_constant_column_passthrough(self):
        X = matrix_of([[2.0, 1.0], [2.0, 3.0]])
        z = pl.Standardizer.fit(X).transform(X)
        assert np.allclose(z.data[:, 0], 0.0)


def synthetic_dataset(seed=0, n=300):
    """Imbalanced toy table with an id, a collinear numeric pair and categoricals."""
    rng = np.random.default_rng(seed)
    schema = (
        ColumnSpec("uid", pl.ID),
        ColumnSpec("plan", pl.CATEGORICAL),
        ColumnSpec("region", pl.CATEGORICAL),
        ColumnSpec("usage", pl.NUMERIC),
        ColumnSpec("usage_total", pl.NUMERIC),
        ColumnSpec("spend", pl.NUMERIC),
        ColumnSpec("churn", pl.TARGET),
    )
    usage = rng.uniform(0, 100, size=n)
    rows = []
    for i in range(n):
        rows.append((
            f"u{i}",
            rng.choice(["basic", "plus", "max"]),
            rng.choice(["north", "south"]),
            usage[i],
            usage[i] * 12 + rng.normal(0, 5),
            rng.uniform(10, 90),
            "Yes" if rng.uniform() < 0.3 else "No",
        ))
    return make_dataset(rows, schema)


class TestRunPreprocess:
    def test_end_to_end(self):
        ds = synthetic_dataset()
        result = pl.run_preprocess(ds, pl.PreprocessOptions(seed=11))
        report = result.report
        reasons = {d.name: d.reason for d in report.dropped}
        assert reasons["uid"] == "id"
        assert reasons["usage_total"] == "correlation"  # later column of the pair
        n_min = min(report.class_counts_before.values())
        assert set(report.class_counts_after.values()) == {n_min}
        assert result.train.n_cols == report.n_components
        total = result.train.n_rows + result.test.n_rows
        assert total == 2 * n_min

    def test_deterministic(self):
        opts = pl.PreprocessOptions(seed=21)
        a = pl.run_preprocess(synthetic_dataset(), opts)
        b = pl.run_preprocess(synthetic_dataset(), opts)
        assert np.array_equal(a.train.data, b.train.data)
        assert np.array_equal(a.test.data, b.test.data)
        assert np.array_equal(a.train.labels, b.train.labels)

    def test_extra_drops_and_fixed_components(self):
        opts = pl.PreprocessOptions(seed=2, extra_drops=("spend",), n_components=3)
        result = pl.run_preprocess(synthetic_dataset(), opts)
        reasons = {d.name: d.reason for d in result.report.dropped}
        assert reasons["spend"] == "config"
        assert result.train.n_cols == 3

    def test_report_serializes(self):
        import json

        result = pl.run_preprocess(synthetic_dataset(), pl.PreprocessOptions(seed=1))
        text = json.dumps(result.report.to_dict())
        assert "elbow_index" in text
