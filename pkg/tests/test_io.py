"""File format grammars, normalization and stream chunking."""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.exceptions import NotFittedError

from uniclass.datasets import ClassificationType, Dataset, dataset_stats
from uniclass.errors import (
    ConfigurationError,
    DataError,
    EncodingError,
    ParseError,
    SchemaError,
)
from uniclass.io import (
    FormatSpec,
    RangeScaler,
    chunk_stream,
    fit_apply_normalizer,
    parse_dataset,
    write_arff,
    write_dense,
    write_sparse,
)

DATA_DIR = Path(__file__).parent / "data"

finite_floats = st.floats(
    allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12
)


def write(tmp_path: Path, text: str, name: str = "data.txt") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestFormatSpec:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            FormatSpec(kind="csv")
        with pytest.raises(ConfigurationError):
            FormatSpec(kind="dense", label_position="middle")
        with pytest.raises(ConfigurationError):
            FormatSpec(kind="sparse")  # needs n_labels
        with pytest.raises(ConfigurationError):
            FormatSpec(kind="arff", n_labels=1)


class TestDenseFormat:
    def test_trailing_class_column(self, tmp_path):
        path = write(tmp_path, "1.0,2.0,yes\n3.0,4.0,no\n5.0,6.0,yes\n")
        data = parse_dataset(path, FormatSpec("dense"))
        assert len(data) == 3
        assert data.label_names == ("no", "yes")
        assert data.declared_type is ClassificationType.BINARY
        np.testing.assert_array_equal(data.features[1], [3.0, 4.0])
        assert data.label_sets() == [
            frozenset({1}),
            frozenset({0}),
            frozenset({1}),
        ]

    def test_leading_class_column(self, tmp_path):
        path = write(tmp_path, "b,1.0\na,2.0\n")
        data = parse_dataset(path, FormatSpec("dense", label_position="leading"))
        assert data.n_features == 1
        assert data.label_names == ("a", "b")
        assert data.label_sets() == [frozenset({1}), frozenset({0})]

    def test_header_detected_and_skipped(self, tmp_path):
        path = write(tmp_path, "width,height,class\n1.0,2.0,x\n3.0,4.0,y\n")
        data = parse_dataset(path, FormatSpec("dense"))
        assert len(data) == 2

    def test_numeric_looking_file_keeps_first_row(self, tmp_path):
        # All-numeric first row is data even though the class tokens are
        # numeric strings.
        path = write(tmp_path, "1.0,2.0,1\n3.0,4.0,2\n")
        data = parse_dataset(path, FormatSpec("dense"))
        assert len(data) == 2
        assert data.label_names == ("1", "2")

    def test_three_classes_declares_multiclass(self, tmp_path):
        path = write(tmp_path, "1,a\n2,b\n3,c\n")
        data = parse_dataset(path, FormatSpec("dense"))
        assert data.declared_type is ClassificationType.MULTICLASS

    def test_bad_feature_reports_line(self, tmp_path):
        path = write(tmp_path, "1.0,x\n2.0,y\noops,x\n")
        with pytest.raises(ParseError, match="line 3"):
            parse_dataset(path, FormatSpec("dense"))

    def test_missing_value_rejected(self, tmp_path):
        path = write(tmp_path, "1.0,2.0,x\n1.0,?,y\n")
        with pytest.raises(ParseError, match="line 2"):
            parse_dataset(path, FormatSpec("dense"))

    def test_ragged_row_reports_line(self, tmp_path):
        path = write(tmp_path, "1.0,2.0,x\n1.0,y\n")
        with pytest.raises(SchemaError, match="line 2"):
            parse_dataset(path, FormatSpec("dense"))

    def test_declared_class_count_checked(self, tmp_path):
        path = write(tmp_path, "1.0,x\n2.0,y\n")
        with pytest.raises(SchemaError, match="declared 3"):
            parse_dataset(path, FormatSpec("dense", n_labels=3))

    def test_single_class_rejected(self, tmp_path):
        path = write(tmp_path, "1.0,x\n2.0,x\n")
        with pytest.raises(SchemaError):
            parse_dataset(path, FormatSpec("dense"))

    def test_empty_file_rejected(self, tmp_path):
        path = write(tmp_path, "\n\n")
        with pytest.raises(SchemaError, match="no data rows"):
            parse_dataset(path, FormatSpec("dense"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            parse_dataset(tmp_path / "absent.csv", FormatSpec("dense"))

    @settings(max_examples=25)
    @given(
        values=st.lists(
            st.tuples(finite_floats, finite_floats, st.sampled_from("ab")),
            min_size=2,
            max_size=20,
        )
    )
    def test_round_trip_is_bit_exact(self, tmp_path_factory, values):
        if len({label for *_, label in values}) < 2:
            values = values + [(0.0, 0.0, "a"), (1.0, 1.0, "b")]
        features = np.array([[a, b] for a, b, _ in values])
        names = sorted({label for *_, label in values})
        targets = np.full((len(values), len(names)), -1.0)
        for row, (_, _, label) in enumerate(values):
            targets[row, names.index(label)] = 1.0
        original = Dataset(features, targets, label_names=names)

        path = tmp_path_factory.mktemp("roundtrip") / "data.csv"
        write_dense(original, path)
        parsed = parse_dataset(path, FormatSpec("dense"))
        np.testing.assert_array_equal(parsed.features, original.features)
        np.testing.assert_array_equal(parsed.targets, original.targets)
        assert parsed.label_names == original.label_names

    def test_iris_fixture_statistics(self):
        data = parse_dataset(DATA_DIR / "iris.csv", FormatSpec("dense"))
        stats = dataset_stats(data)
        assert stats.n_labels == 3
        assert stats.n_features == 4
        assert stats.n_samples == 150
        assert stats.label_cardinality == 1.0
        assert round(stats.label_density, 3) == 0.333


ARFF_TEXT = """\
% a small corpus
@RELATION toy

@ATTRIBUTE width numeric
@attribute 'the height' real
@attribute sea {0,1}
@attribute sky {0,1}

@DATA
1.5,2.5,1,0
3.5,4.5,0,0
5.5,6.5,1,1
"""


class TestArffFormat:
    def test_parse(self, tmp_path):
        path = write(tmp_path, ARFF_TEXT)
        data = parse_dataset(path, FormatSpec("arff", n_labels=2))
        assert data.n_features == 2
        assert data.label_names == ("sea", "sky")
        assert data.declared_type is ClassificationType.MULTILABEL
        np.testing.assert_array_equal(data.features[2], [5.5, 6.5])
        assert data.label_sets() == [
            frozenset({0}),
            frozenset(),
            frozenset({0, 1}),
        ]

    def test_sparse_rows_rejected(self, tmp_path):
        text = ARFF_TEXT + "{0 1.5, 2 1}\n"
        path = write(tmp_path, text)
        with pytest.raises(ParseError, match="sparse"):
            parse_dataset(path, FormatSpec("arff", n_labels=2))

    def test_label_values_must_be_binary(self, tmp_path):
        path = write(tmp_path, ARFF_TEXT.replace("0,0\n", "0,2\n"))
        with pytest.raises(ParseError, match="0 or 1"):
            parse_dataset(path, FormatSpec("arff", n_labels=2))

    def test_missing_data_section(self, tmp_path):
        path = write(tmp_path, "@relation x\n@attribute a numeric\n")
        with pytest.raises(SchemaError, match="@data"):
            parse_dataset(path, FormatSpec("arff", n_labels=2))

    def test_too_few_attributes(self, tmp_path):
        path = write(tmp_path, "@relation x\n@attribute a {0,1}\n@attribute b {0,1}\n@data\n0,1\n")
        with pytest.raises(SchemaError):
            parse_dataset(path, FormatSpec("arff", n_labels=2))

    def test_arity_mismatch_reports_line(self, tmp_path):
        path = write(tmp_path, ARFF_TEXT + "1.0,1,0\n")
        with pytest.raises(SchemaError, match="line 13"):
            parse_dataset(path, FormatSpec("arff", n_labels=2))

    def test_round_trip(self, tmp_path):
        original = parse_dataset(write(tmp_path, ARFF_TEXT), FormatSpec("arff", n_labels=2))
        out = tmp_path / "copy.arff"
        write_arff(original, out)
        parsed = parse_dataset(out, FormatSpec("arff", n_labels=2))
        np.testing.assert_array_equal(parsed.features, original.features)
        np.testing.assert_array_equal(parsed.targets, original.targets)
        assert parsed.label_names == original.label_names


SPARSE_TEXT = """\
1,3 2:0.5 7:1.25
2 1:-2.0
4:1.0
2,4
"""


class TestSparseFormat:
    def test_parse(self, tmp_path):
        path = write(tmp_path, SPARSE_TEXT)
        data = parse_dataset(path, FormatSpec("sparse", n_labels=4))
        assert len(data) == 4
        assert data.n_features == 7  # inferred from the largest index
        assert data.label_sets() == [
            frozenset({0, 2}),
            frozenset({1}),
            frozenset(),  # line of only features
            frozenset({1, 3}),
        ]
        np.testing.assert_array_equal(
            data.features[0], [0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 1.25]
        )
        np.testing.assert_array_equal(data.features[3], np.zeros(7))

    def test_label_out_of_range(self, tmp_path):
        path = write(tmp_path, "5 1:1.0\n")
        with pytest.raises(EncodingError, match="line 1"):
            parse_dataset(path, FormatSpec("sparse", n_labels=4))

    def test_zero_feature_index_rejected(self, tmp_path):
        path = write(tmp_path, "1 0:1.0\n")
        with pytest.raises(ParseError, match="1-based"):
            parse_dataset(path, FormatSpec("sparse", n_labels=4))

    def test_duplicate_feature_index(self, tmp_path):
        path = write(tmp_path, "1 2:1.0 2:3.0\n")
        with pytest.raises(ParseError, match="duplicate"):
            parse_dataset(path, FormatSpec("sparse", n_labels=4))

    def test_malformed_pair_reports_line(self, tmp_path):
        path = write(tmp_path, "1 2:1.0\n1 oops\n")
        with pytest.raises(ParseError, match="line 2"):
            parse_dataset(path, FormatSpec("sparse", n_labels=4))

    def test_no_feature_pairs_anywhere(self, tmp_path):
        path = write(tmp_path, "1\n2\n")
        with pytest.raises(SchemaError, match="feature dimension"):
            parse_dataset(path, FormatSpec("sparse", n_labels=4))

    def test_round_trip(self, tmp_path):
        original = parse_dataset(write(tmp_path, SPARSE_TEXT), FormatSpec("sparse", n_labels=4))
        out = tmp_path / "copy.sparse"
        write_sparse(original, out)
        parsed = parse_dataset(out, FormatSpec("sparse", n_labels=4))
        np.testing.assert_array_equal(parsed.features, original.features)
        np.testing.assert_array_equal(parsed.targets, original.targets)


class TestRangeScaler:
    def test_documented_map(self):
        scaler = RangeScaler().fit([[0.0], [10.0]])
        out = scaler.transform([[0.0], [10.0], [5.0], [20.0]])
        np.testing.assert_allclose(out[:, 0], [-1.0, 1.0, 0.0, 3.0])

    def test_constant_feature_maps_to_zero(self):
        scaler = RangeScaler().fit([[7.0, 1.0], [7.0, 3.0]])
        out = scaler.transform([[7.0, 2.0], [9.0, 1.0]])
        np.testing.assert_allclose(out[:, 0], [0.0, 0.0])
        np.testing.assert_allclose(out[:, 1], [0.0, -1.0])

    def test_train_range_covered(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 4), scale=5.0)
        out = RangeScaler().fit(X).transform(X)
        assert out.min() >= -1.0 and out.max() <= 1.0
        np.testing.assert_allclose(out.min(axis=0), -1.0)
        np.testing.assert_allclose(out.max(axis=0), 1.0)

    def test_unfitted_rejected(self):
        with pytest.raises(NotFittedError):
            RangeScaler().transform([[1.0]])

    def test_column_mismatch(self):
        scaler = RangeScaler().fit([[1.0, 2.0]])
        with pytest.raises(DataError):
            scaler.transform([[1.0]])


class TestFitApplyNormalizer:
    def test_no_test_leakage(self):
        train = Dataset([[0.0], [10.0]], [[1, -1], [-1, 1]])
        test = Dataset([[100.0], [200.0]], [[1, -1], [-1, 1]])
        scaler, train_scaled, test_scaled = fit_apply_normalizer(train, test)
        # Test values extend far beyond [-1, 1]: the map came from train.
        np.testing.assert_allclose(train_scaled.features[:, 0], [-1.0, 1.0])
        np.testing.assert_allclose(test_scaled.features[:, 0], [19.0, 39.0])
        refit = RangeScaler().fit(test.features)
        assert not np.array_equal(refit.data_min_, scaler.data_min_)

    def test_labels_preserved(self):
        train = Dataset([[0.0], [10.0]], [[1, -1], [-1, 1]])
        _, scaled = fit_apply_normalizer(train)
        np.testing.assert_array_equal(scaled.targets, train.targets)


class TestChunkStream:
    def _dataset(self, n=10):
        return Dataset(
            np.arange(n, dtype=float).reshape(-1, 1),
            np.tile([1.0, -1.0], (n, 1)),
        )

    def test_chunk_sizes_3(self):
        initial, chunks = chunk_stream(self._dataset(), 4, 3)
        assert len(initial) == 4
        assert [len(c) for c in chunks] == [3, 3]

    def test_chunk_sizes_remainder(self):
        _, chunks = chunk_stream(self._dataset(), 4, 4)
        assert [len(c) for c in chunks] == [4, 2]

    def test_concatenation_reproduces_input(self):
        data = self._dataset()
        initial, chunks = chunk_stream(data, 4, 3)
        rebuilt = np.vstack([initial.features] + [c.features for c in chunks])
        np.testing.assert_array_equal(rebuilt, data.features)

    def test_shuffle_is_deterministic_and_a_permutation(self):
        data = self._dataset()
        first = chunk_stream(data, 4, 3, shuffle_seed=99)
        second = chunk_stream(data, 4, 3, shuffle_seed=99)
        for a, b in zip([first[0], *first[1]], [second[0], *second[1]]):
            np.testing.assert_array_equal(a.features, b.features)
        rebuilt = np.vstack([first[0].features] + [c.features for c in first[1]])
        assert sorted(rebuilt[:, 0]) == sorted(data.features[:, 0])

    def test_nothing_to_stream(self):
        with pytest.raises(ConfigurationError, match="nothing to stream"):
            chunk_stream(self._dataset(), 10, 3)
        with pytest.raises(ConfigurationError):
            chunk_stream(self._dataset(), 12, 3)

    def test_bad_sizes(self):
        with pytest.raises(ConfigurationError):
            chunk_stream(self._dataset(), 0, 3)
        with pytest.raises(ConfigurationError):
            chunk_stream(self._dataset(), 4, 0)
