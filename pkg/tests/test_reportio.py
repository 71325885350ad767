"""File formats: matrix CSV, sidecars, label files, score files, reports."""

import json

import jsonschema
import numpy as np
import pytest

from argmaxable.labelspace import LabelAssignment
from argmaxable.linalg import Provenance, WeightMatrix
from argmaxable.reportio import (
    SCHEMA_VERSION,
    SIDECAR_SCHEMAS,
    ParseError,
    ReportEnvelope,
    parse_labels,
    parse_matrix,
    parse_scores,
    report_schema,
    serialize_labels,
    serialize_matrix,
    validate_report,
)


class TestMatrixRoundTrip:
    def test_bits_survive_the_trip(self, tmp_path):
        rng = np.random.default_rng(60)
        w = WeightMatrix(rng.standard_normal((5, 3)) * 10.0 ** rng.integers(-8, 8))
        target = tmp_path / "w.csv"
        serialize_matrix(w, target)
        back = parse_matrix(target)
        assert back.entries.shape == (5, 3)
        assert np.array_equal(back.entries, w.entries)

    def test_sidecar_carries_provenance(self, tmp_path):
        w = WeightMatrix(
            np.eye(3), provenance=Provenance.dft_with_slack(k=1, s=2, seed=9)
        )
        target = tmp_path / "w.csv"
        serialize_matrix(w, target)
        back = parse_matrix(target)
        assert back.provenance == w.provenance

    def test_missing_sidecar_means_random_provenance(self, tmp_path):
        target = tmp_path / "w.csv"
        target.write_text("1.0,0.0\n0.0,1.0\n")
        back = parse_matrix(target)
        assert back.provenance.kind == "random"

    def test_flat_spectral_sidecar_shape_is_accepted(self, tmp_path):
        target = tmp_path / "w.csv"
        target.write_text("1.0,0.0\n0.0,1.0\n")
        (tmp_path / "w.json").write_text(
            json.dumps({"n": 2, "k": 1, "s": 0, "seed": 0})
        )
        back = parse_matrix(target)
        assert back.provenance == Provenance.dft(k=1)

    def test_flat_sidecar_with_slack_columns(self, tmp_path):
        target = tmp_path / "w.csv"
        target.write_text("1.0,0.0\n0.0,1.0\n")
        (tmp_path / "w.json").write_text(
            json.dumps({"n": 2, "k": 1, "s": 3, "seed": 7})
        )
        back = parse_matrix(target)
        assert back.provenance == Provenance.dft_with_slack(k=1, s=3, seed=7)

    def test_sidecar_shape_mismatch_rejected(self, tmp_path):
        target = tmp_path / "w.csv"
        target.write_text("1.0,0.0\n0.0,1.0\n")
        (tmp_path / "w.json").write_text(json.dumps({"n": 5, "k": 1}))
        with pytest.raises(ParseError):
            parse_matrix(target)

    def test_written_sidecar_validates_against_its_schema(self, tmp_path):
        w = WeightMatrix(np.eye(2), provenance=Provenance.dft(k=1))
        serialize_matrix(w, tmp_path / "w.csv")
        obj = json.loads((tmp_path / "w.json").read_text())
        jsonschema.validate(obj, SIDECAR_SCHEMAS["matrix"])

    def test_flat_shape_matches_the_other_schema(self):
        jsonschema.validate(
            {"n": 6, "k": 1, "s": 0, "seed": 0}, SIDECAR_SCHEMAS["dft"]
        )
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate({"n": 6}, SIDECAR_SCHEMAS["dft"])


class TestMatrixDiagnostics:
    def test_ragged_row_names_the_line(self, tmp_path):
        target = tmp_path / "bad.csv"
        target.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ParseError) as exc:
            parse_matrix(target)
        assert f"{target}:2" in str(exc.value)

    def test_non_numeric_cell_names_line_and_column(self, tmp_path):
        target = tmp_path / "bad.csv"
        target.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ParseError) as exc:
            parse_matrix(target)
        assert f"{target}:2:2" in str(exc.value)
        assert "oops" in str(exc.value)

    def test_empty_file(self, tmp_path):
        target = tmp_path / "empty.csv"
        target.write_text("")
        with pytest.raises(ParseError) as exc:
            parse_matrix(target)
        assert "empty" in str(exc.value)

    def test_blank_interior_line(self, tmp_path):
        target = tmp_path / "bad.csv"
        target.write_text("1.0\n\n2.0\n")
        with pytest.raises(ParseError) as exc:
            parse_matrix(target)
        assert exc.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            parse_matrix(tmp_path / "nope.csv")

    def test_nonfinite_entries_rejected(self, tmp_path):
        target = tmp_path / "bad.csv"
        target.write_text("1.0,inf\n2.0,3.0\n")
        with pytest.raises(ParseError):
            parse_matrix(target)


class TestLabelFiles:
    def test_dense_round_trip(self, tmp_path):
        ys = [
            LabelAssignment.from_dense("+-+"),
            LabelAssignment.from_dense("---"),
        ]
        target = tmp_path / "labels.txt"
        target.write_text(serialize_labels(ys))
        assert parse_labels(target) == ys

    def test_sparse_round_trip(self, tmp_path):
        ys = [
            LabelAssignment.from_active(4, [1, 4]),
            LabelAssignment.from_active(4, []),
            LabelAssignment.from_active(4, [2]),
        ]
        target = tmp_path / "labels.txt"
        target.write_text(serialize_labels(ys, sparse=True))
        assert parse_labels(target) == ys

    def test_dense_and_sparse_describe_the_same_assignment(self, tmp_path):
        dense = tmp_path / "dense.txt"
        dense.write_text("+−−+\n")
        sparse = tmp_path / "sparse.txt"
        sparse.write_text("n=4\n1,4\n")
        assert parse_labels(dense) == parse_labels(sparse)

    def test_ascii_minus_and_unicode_minus_are_interchangeable(self, tmp_path):
        a = tmp_path / "a.txt"
        a.write_text("+-+\n")
        b = tmp_path / "b.txt"
        b.write_text("+−+\n")
        assert parse_labels(a) == parse_labels(b)

    def test_sparse_blank_line_is_all_inactive(self, tmp_path):
        target = tmp_path / "labels.txt"
        target.write_text("n=3\n\n")
        (only,) = parse_labels(target)
        assert only.active_indices() == ()

    def test_digit_in_dense_line_hints_at_the_header(self, tmp_path):
        target = tmp_path / "labels.txt"
        target.write_text("1,4\n")
        with pytest.raises(ParseError) as exc:
            parse_labels(target)
        assert "n=<count>" in str(exc.value)

    def test_dense_length_mismatch_rejected(self, tmp_path):
        target = tmp_path / "labels.txt"
        target.write_text("+-+\n+-\n")
        with pytest.raises(ParseError) as exc:
            parse_labels(target)
        assert exc.value.line == 2

    def test_sparse_duplicate_index_rejected(self, tmp_path):
        target = tmp_path / "labels.txt"
        target.write_text("n=4\n2,2\n")
        with pytest.raises(ParseError) as exc:
            parse_labels(target)
        assert "duplicate" in str(exc.value)

    def test_sparse_index_out_of_range_rejected(self, tmp_path):
        target = tmp_path / "labels.txt"
        target.write_text("n=4\n5\n")
        with pytest.raises(ParseError) as exc:
            parse_labels(target)
        assert "outside 1..4" in str(exc.value)

    def test_sparse_bad_header(self, tmp_path):
        target = tmp_path / "labels.txt"
        target.write_text("n=zero\n1\n")
        with pytest.raises(ParseError):
            parse_labels(target)

    def test_serialize_sparse_requires_one_n(self):
        ys = [
            LabelAssignment.from_active(3, [1]),
            LabelAssignment.from_active(4, [1]),
        ]
        with pytest.raises(ValueError):
            serialize_labels(ys, sparse=True)

    def test_serialized_dense_uses_the_canonical_minus(self):
        text = serialize_labels([LabelAssignment.from_dense("+-")])
        assert text == "+−\n"


class TestScoreFiles:
    def test_round_trip(self, tmp_path):
        target = tmp_path / "scores.csv"
        target.write_text("0.5,0.25,-1.75\n0.125,2.0,3.5\n")
        arr = parse_scores(target)
        assert arr.shape == (2, 3)
        assert arr[1, 2] == 3.5

    def test_nonfinite_scores_rejected(self, tmp_path):
        target = tmp_path / "scores.csv"
        target.write_text("0.5,inf\n")
        with pytest.raises(ParseError):
            parse_scores(target)

    def test_ragged_scores_rejected(self, tmp_path):
        target = tmp_path / "scores.csv"
        target.write_text("0.5,0.25\n0.125\n")
        with pytest.raises(ParseError):
            parse_scores(target)


class TestReportEnvelope:
    def _envelope(self):
        return ReportEnvelope(
            tool_version="0.1.0",
            command="count",
            config={"n": 6, "d": 3},
            timestamp=None,
            payload={"n": 6, "d": 3, "count": "32"},
        )

    def test_round_trip(self):
        env = self._envelope()
        assert ReportEnvelope.from_json(env.to_json()) == env

    def test_equal_envelopes_serialize_to_identical_bytes(self):
        assert self._envelope().to_json() == self._envelope().to_json()

    def test_text_ends_with_one_newline_and_sorts_keys(self):
        text = self._envelope().to_json()
        assert text.endswith("}\n")
        keys = list(json.loads(text))
        assert keys == sorted(keys)

    def test_wrong_schema_version_rejected(self):
        obj = json.loads(self._envelope().to_json())
        obj["schema_version"] = SCHEMA_VERSION + 1
        with pytest.raises(ValueError):
            ReportEnvelope.from_json(json.dumps(obj))

    def test_missing_field_rejected(self):
        obj = json.loads(self._envelope().to_json())
        del obj["payload"]
        with pytest.raises(ValueError):
            ReportEnvelope.from_json(json.dumps(obj))

    def test_malformed_json_rejected(self):
        with pytest.raises(ValueError):
            ReportEnvelope.from_json("{not json")


class TestSchemas:
    def test_count_report_validates(self):
        env = ReportEnvelope(
            tool_version="0.1.0",
            command="count",
            config={},
            timestamp=None,
            payload={"n": 6, "d": 3, "count": "32"},
        )
        validate_report(json.loads(env.to_json()))

    def test_huge_counts_travel_as_strings(self):
        payload = {"n": 500, "d": 500, "count": str(2**500)}
        jsonschema.validate(payload, report_schema("count")["properties"]["payload"])

    def test_bad_payload_rejected(self):
        env = ReportEnvelope(
            tool_version="0.1.0",
            command="count",
            config={},
            timestamp=None,
            payload={"n": 6},
        )
        with pytest.raises(jsonschema.ValidationError):
            validate_report(json.loads(env.to_json()))

    def test_unknown_command_has_no_schema(self):
        with pytest.raises(KeyError):
            report_schema("transmogrify")

    def test_every_command_schema_is_itself_valid(self):
        for command in ("count", "check", "verify", "enumerate", "radii", "metrics"):
            jsonschema.Draft202012Validator.check_schema(report_schema(command))
