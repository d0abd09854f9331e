# src/analysis/helpers.py
import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from src.config import FLOAT_FORMAT

console = Console()


def format_number(value) -> str:
    """12 significant digits for floats, plain text for everything else, '' for missing."""
    if value is None or (not isinstance(value, str) and pd.isna(value)):
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def format_complex(value: complex) -> str:
    """a, or a+bi / a-bi when the imaginary part is nonzero."""
    value = complex(value)
    if value.imag == 0:
        return format_number(value.real)
    sign = "+" if value.imag > 0 else "-"
    return f"{format_number(value.real)}{sign}{format_number(abs(value.imag))}i"


def frame_to_csv(df: pd.DataFrame, header_lines: list[str] = ()) -> str:
    """CSV text with '#'-prefixed metadata lines ahead of the column header."""
    body = df.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    return "".join(f"{line}\n" for line in header_lines) + body


def print_rich_dataframe(
    df: pd.DataFrame,
    title: str = "DataFrame",
    max_rows: int = 50,
):
    """Prints a Pandas DataFrame as a styled Rich table.

    Args:
        df (pd.DataFrame): The DataFrame to print.
        title (str): Table title.
        max_rows (int): Maximum number of rows to display.
    """
    if df.empty:
        console.print(f"[bold red]{title} is empty![/bold red]")
        return

    table = Table(title=title)

    for col in df.columns:
        table.add_column(str(col), justify="right", style="cyan")

    for _, row in df.head(max_rows).iterrows():
        table.add_row(*[format_number(x) or "-" for x in row])

    if len(df) > max_rows:
        console.print(
            f"[bold yellow]Showing first {max_rows} of {len(df)} rows...[/bold yellow]"
        )

    console.print(table)
