import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from subbary.models.errors import DegenerateBody, EmptyInput, InvalidProfile, InvalidValuation, ParseError
from subbary.utils.serialization import (
    dump_body,
    dump_profile,
    load_body,
    load_discrete_candidates,
    load_jumping_data,
    load_profile,
    load_valuations,
    read_json,
    render_table,
)

DATA = Path(__file__).resolve().parent.parent / "data"


class TestReadJson:
    def test_passes_objects_through(self):
        data = {"dim": 2}
        assert read_json(data) is data

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError) as excinfo:
            read_json(tmp_path / "nope.json", "body")
        assert excinfo.value.field == "body"

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"dim": 2,', encoding="utf-8")
        with pytest.raises(ParseError, match="invalid JSON"):
            read_json(path)


class TestBodies:
    def test_eckardt_file(self, kernel):
        body = load_body(DATA / "eckardt_body.json", kernel)
        assert body.volume == 3
        assert body.barycenter == (Fraction(4, 3), Fraction(0))

    def test_rational_strings(self, kernel):
        body = load_body({"dim": 2, "vertices": [["0", "0"], ["1/2", "0"], [0, "0.5"]]}, kernel)
        assert body.volume == Fraction(1, 8)

    def test_dump_keeps_exact_coordinates(self, kernel):
        body = load_body({"dim": 2, "vertices": [[0, 0], ["1/3", 0], [0, 1]]}, kernel)
        assert ["1/3", "0"] in json.loads(dump_body(body))["vertices"]
        assert load_body(json.loads(dump_body(body)), kernel).volume == body.volume

    @pytest.mark.parametrize("data, field", [
        ({"vertices": [[0, 0]]}, "body.dim"),
        ({"dim": 0, "vertices": []}, "body.dim"),
        ({"dim": 2, "vertices": "square"}, "body.vertices"),
        ({"dim": 2, "vertices": [[0, "x"], [1, 0], [0, 1]]}, "body.vertices[0]"),
    ])
    def test_malformed(self, kernel, data, field):
        with pytest.raises(ParseError) as excinfo:
            load_body(data, kernel)
        assert excinfo.value.field == field

    def test_degenerate(self, kernel):
        with pytest.raises(DegenerateBody):
            load_body({"dim": 2, "vertices": [[0, 0], [1, 1], [2, 2]]}, kernel)


class TestProfiles:
    def test_constant_file(self):
        f = load_profile(DATA / "constant_profile.json")
        assert f.T == 1.0 and f.values == (1.0, 1.0)

    def test_T_defaults_to_last_breakpoint(self):
        f = load_profile({"breakpoints": [0, 2], "values": [1, 0]})
        assert f.T == 2.0
        assert json.loads(dump_profile(f)) == {"T": 2.0, "breakpoints": [0.0, 2.0], "values": [1.0, 0.0]}

    def test_convex_profile_rejected(self):
        with pytest.raises(InvalidProfile):
            load_profile({"breakpoints": [0, 1, 2], "values": [1, 0, 1]})

    def test_missing_values(self):
        with pytest.raises(ParseError, match="profile.values"):
            load_profile({"breakpoints": [0, 1]})


class TestValuations:
    def test_eckardt_file(self, kernel):
        [v] = load_valuations(DATA / "eckardt_valuation.json", kernel)
        assert v.name == "ord_E" and v.A == 2.0
        assert v.s0 == 3.0 and v.sigma == 0.0

    def test_single_record_and_scale(self, kernel):
        record = {"name": "F", "A": "3/2", "scale": 2,
                  "body": {"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}}
        [v] = load_valuations(record, kernel)
        assert v.A == 1.5 and v.s0 == 2.0

    def test_nonpositive_A(self, kernel):
        record = {"name": "F", "A": 0, "body": {"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}}
        with pytest.raises(InvalidValuation):
            load_valuations([record], kernel)
        assert load_valuations([record], kernel, allow_nonpositive_A=True)[0].A == 0.0

    def test_empty(self, kernel):
        with pytest.raises(EmptyInput):
            load_valuations({"valuations": []}, kernel)

    def test_missing_key_names_the_record(self, kernel):
        with pytest.raises(ParseError, match=r"valuations\[1\]\.A"):
            load_valuations([
                {"name": "a", "A": 1, "body": {"dim": 1, "vertices": [[0], [1]]}},
                {"name": "b", "body": {"dim": 1, "vertices": [[0], [1]]}},
            ], kernel)


class TestDiscrete:
    def test_candidates_file(self):
        [c] = load_discrete_candidates(DATA / "discrete_candidates.json")
        assert c.name == "E"
        assert c.data.d_k == 4 and c.data.j == (0.0, 1.0, 2.0, 3.0)

    def test_integer_fields(self):
        with pytest.raises(ParseError, match="jumping.k"):
            load_jumping_data({"k": 1.5, "d_k": 2, "j": [0, 1]})

    def test_empty(self):
        with pytest.raises(EmptyInput):
            load_discrete_candidates([])


class TestRenderTable:
    ROWS = [{"a": "1", "b": "x", "extra": 0}, {"a": "2", "b": "y", "extra": 0}]

    def test_json_keeps_column_order(self):
        rows = json.loads(render_table(self.ROWS, ["b", "a"], "json"))
        assert list(rows[0]) == ["b", "a"]

    def test_csv(self):
        text = render_table(self.ROWS, ["a", "b"], "csv")
        assert text.splitlines()[0] == "a,b"
        assert list(csv.DictReader(io.StringIO(text)))[1] == {"a": "2", "b": "y"}

    def test_unknown_format(self):
        with pytest.raises(ParseError):
            render_table(self.ROWS, ["a"], "xml")
