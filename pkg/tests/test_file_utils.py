import json

import pytest

from utils.file_utils import (
    ConfigFileError,
    dumps_sorted,
    format_table,
    list_config_files,
    load_json,
    write_csv,
    write_report,
)


def test_load_json_errors(tmp_path):
    with pytest.raises(ConfigFileError):
        load_json(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigFileError):
        load_json(broken)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigFileError):
        load_json(listed)


def test_list_config_files_is_sorted(tmp_path):
    for name in ("b.json", "a.json", "notes.txt"):
        (tmp_path / name).write_text("{}", encoding="utf-8")
    assert [p.name for p in list_config_files(tmp_path)] == ["a.json", "b.json"]
    with pytest.raises(ConfigFileError):
        list_config_files(tmp_path / "a.json")


def test_dumps_sorted_is_stable():
    assert dumps_sorted({"b": 1, "a": 2}) == dumps_sorted({"a": 2, "b": 1})
    assert dumps_sorted({}).endswith("\n")


def test_write_csv_round_trips_floats(tmp_path):
    path = write_csv(tmp_path / "out" / "table.csv", ["x", "y"], [[0.1, 1], [1 / 3, 2]])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,y"
    assert float(lines[2].split(",")[0]) == 1 / 3


def test_write_csv_to_stdout(capsys):
    assert write_csv("-", ["x"], [[1.5]]) is None
    assert capsys.readouterr().out == "x\n1.5\n"


def test_write_report(tmp_path):
    json_path, csv_path = write_report("demo", {"label": "demo", "status": "passed"}, ["k", "v"], [[1.0, 2.0]], tmp_path)
    assert json.loads(json_path.read_text(encoding="utf-8")) == {"label": "demo", "status": "passed"}
    assert csv_path.read_text(encoding="utf-8") == "k,v\n1.0,2.0\n"

    json_path, csv_path = write_report("refused", {"label": "refused"}, [], [], tmp_path)
    assert json_path.name == "refused.json" and csv_path is None


def test_format_table():
    table = format_table(["name", "n"], [["abc", 1], ["d", 22]])
    assert table.splitlines() == ["name  n", "----  --", "abc   1", "d     22"]
