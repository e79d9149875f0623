import json
import math

import pytest

from socialattn.report import Report, format_cell


def _report():
    rep = Report("Demo", ["name", "value", "p"], decimals={"value": 2, "p": 3})
    rep.add_row(["a", 1.005, 0.0004])
    rep.add_row(["b", None, math.inf])
    rep.footnotes.append("note, with comma")
    return rep


@pytest.mark.parametrize("value,decimals,text", [
    (None, 2, ""), (True, None, "1"), (3, 2, "3"), (-0.0001, 3, "0.000"),
    (0.0004, 3, "0.000"), (2.5, 1, "2.5"), (math.nan, 2, "nan"), (-math.inf, 2, "-inf"), ("x", 2, "x"),
])
def test_format_cell(value, decimals, text):
    assert format_cell(value, decimals) == text


def test_add_row_checks_arity():
    with pytest.raises(ValueError):
        _report().add_row(["only one"])


def test_csv():
    assert _report().render("csv") == "name,value,p\na,1.00,0.000\nb,,inf\n# note, with comma\n"


def test_markdown():
    text = _report().render("markdown")
    assert text.splitlines()[:5] == ["## Demo", "", "| name | value | p |", "|---|---|---|", "| a | 1.00 | 0.000 |"]
    assert "| b | - | inf |" in text and text.endswith("note, with comma\n")


def test_json_keeps_full_precision():
    data = json.loads(_report().render("json"))
    assert data["rows"][0] == {"name": "a", "value": 1.005, "p": 0.0004}
    assert data["rows"][1]["p"] == "inf" and data["footnotes"] == ["note, with comma"]


def test_unknown_format():
    with pytest.raises(ValueError):
        _report().render("xml")
