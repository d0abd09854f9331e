# tests/test_helpers.py
import numpy as np
import pandas as pd
import pytest
from rich.console import Console

import src.analysis.helpers as helpers


@pytest.fixture
def recorded(monkeypatch):
    console = Console(record=True, width=120)
    monkeypatch.setattr(helpers, "console", console)
    return console


def test_format_number():
    assert helpers.format_number(0.5) == "0.5"
    assert helpers.format_number(np.bool_(True)) == "true"
    assert helpers.format_number(float("nan")) == ""
    assert helpers.format_number(7) == "7"


def test_format_complex():
    assert helpers.format_complex(2.0) == "2"
    assert helpers.format_complex(1 - 0.5j) == "1-0.5i"


def test_frame_to_csv():
    text = helpers.frame_to_csv(pd.DataFrame({"k": [4], "holds": [True]}), ["# seed=1"])
    assert text == "# seed=1\nk,holds\n4,True\n"


def test_print_rich_dataframe_truncates(recorded):
    df = pd.DataFrame({"point_k": [4, 5, 6], "rmse": [0.25, np.nan, 1e-9]})
    helpers.print_rich_dataframe(df, title="sweep", max_rows=2)
    text = recorded.export_text()

    assert "Showing first 2 of 3 rows" in text
    assert "sweep" in text
    assert "0.25" in text and "-" in text
    assert "1e-09" not in text


def test_print_rich_dataframe_empty(recorded):
    helpers.print_rich_dataframe(pd.DataFrame(), title="phase")
    assert "phase is empty!" in recorded.export_text()


def test_print_rich_dataframe_takes_no_column_highlights():
    with pytest.raises(TypeError):
        helpers.print_rich_dataframe(pd.DataFrame({"a": [1]}), highlight_columns=["a"])
