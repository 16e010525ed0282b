import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from sdcbridge import MicrodataTable
from sdcbridge.domain import Attribute
from sdcbridge.exceptions import DuplicateHeader, ParseError, RowSumViolation
from sdcbridge.io import (
    dumps_report,
    jsonable,
    load_matrix,
    load_table,
    make_report,
    save_matrix,
    save_table,
    table_schema,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_two_column_table(tmp_path):
    p = write(tmp_path / "t.csv", "age,dx\n30,flu\n41,cold\n52,flu\n")
    t = load_table(p)
    assert t.n == 3
    assert t.column("age").tolist() == [30.0, 41.0, 52.0]
    assert t.attribute("dx").domain.labels == ("cold", "flu")


def test_cluster_and_record_map_columns(tmp_path):
    p = write(tmp_path / "t.csv", "dx,__cluster,__record_map\na,c1,1\nb,c2,0\n")
    t = load_table(p)
    assert t.cluster_labels == ("c1", "c2")
    assert t.record_map.tolist() == [1, 0]
    assert t.names == ["dx"]


def test_non_numeric_cell_reports_line(tmp_path):
    p = write(tmp_path / "t.csv", "age\n30\nforty\n")
    with pytest.raises(ParseError) as exc:
        load_table(p, {"age": "numeric"})
    assert exc.value.line == 3 and exc.value.column == "age"


def test_duplicate_header_and_ragged(tmp_path):
    with pytest.raises(DuplicateHeader):
        load_table(write(tmp_path / "d.csv", "a,a\n1,2\n"))
    with pytest.raises(ParseError):
        load_table(write(tmp_path / "r.csv", "a,b\n1,2\n3\n"))


def test_declared_order(tmp_path):
    p = write(tmp_path / "t.csv", "edu\nhi\nlo\n")
    t = load_table(p, {"edu": ["lo", "mid", "hi"]})
    assert t.attribute("edu").ordered
    assert t.ordinal("edu").tolist() == [2.0, 0.0]
    with pytest.raises(ParseError):
        load_table(p, {"edu": ["lo", "mid"]})


def test_matrix_files(tmp_path):
    P = load_matrix(write(tmp_path / "w.csv", ",yes,no\nyes,0.75,0.25\nno,0.25,0.75\n"))
    assert P.domain.labels == ("yes", "no")
    assert P.entries.tolist() == [[0.75, 0.25], [0.25, 0.75]]
    with pytest.raises(ParseError):
        load_matrix(write(tmp_path / "r.csv", ",a,b\na,0.5\nb,0.5,0.5\n"))
    with pytest.raises(RowSumViolation):
        load_matrix(write(tmp_path / "s.csv", ",a,b\na,0.55,0.5\nb,0.5,0.5\n"))
    save_matrix(P, tmp_path / "copy.csv")
    assert load_matrix(tmp_path / "copy.csv") == P


reals = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.tuples(reals, st.sampled_from(["a", "b,c", 'q"x', "é"]), st.sampled_from(["1", "2"])),
                min_size=1, max_size=20))
def test_save_load_round_trip(tmp_path, rows):
    t = MicrodataTable(
        (Attribute.numeric("x"), Attribute.categorical("s", ["a", "b,c", 'q"x', "é"], ordered=True)),
        {"x": [r[0] for r in rows], "s": [r[1] for r in rows]},
        cluster_labels=[r[2] for r in rows],
        record_map=np.arange(len(rows))[::-1],
    )
    path = tmp_path / "rt.csv"
    save_table(t, path)
    back = load_table(path, table_schema(t))
    assert back == t
    assert np.array_equal(back.column("x"), t.column("x"))


def test_reports_are_valid_json():
    rep = make_report("x", "0", {"a": np.float64(1.5)}, {"inf": float("inf"), "arr": np.arange(3)},
                      [], timestamp="T")
    text = dumps_report(rep)
    assert '"inf": "inf"' in text
    assert list(rep) == ["command", "version", "config", "results", "witnesses", "timestamp"]
    assert jsonable(np.bool_(True)) is True
