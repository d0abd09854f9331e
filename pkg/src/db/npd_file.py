# src/db/npd_file.py
"""Plain-text dictionary files.

    npd v1 family=rpt L=8 pmax=6 normalized=0
    1,1,2,0,...
    ...

One row of K per line, entries at 17 significant digits. Real dictionaries
write `<re>`, complex ones `<re>+<im>i` or `<re>-<im>i`.
"""
import re

import numpy as np
from loguru import logger

from src.analysis.numtheory import totient, totient_prefix_sum
from src.exceptions import MalformedDictionaryFile
from src.models.dictionary import DictionaryFamily, NpdDictionary

FORMAT_VERSION = "v1"

HEADER_PATTERN = re.compile(
    r"^npd (?P<version>\S+) family=(?P<family>\S+) L=(?P<L>\d+) "
    r"pmax=(?P<pmax>\d+) normalized=(?P<normalized>[01])$"
)
_UNSIGNED = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
ENTRY_PATTERN = re.compile(rf"^(?P<re>[+-]?{_UNSIGNED})(?:(?P<im>[+-]{_UNSIGNED})i)?$")


def format_entry(value: complex, as_complex: bool) -> str:
    if not as_complex:
        return f"{value.real:.17g}"
    return f"{value.real:.17g}{value.imag:+.17g}i"


def parse_entry(text: str, line_number: int) -> complex:
    match = ENTRY_PATTERN.match(text.strip())
    if match is None:
        raise MalformedDictionaryFile(f"line {line_number}: cannot read entry {text!r}")
    imag = float(match["im"]) if match["im"] is not None else 0.0
    return complex(float(match["re"]), imag)


def atom_periods(p_max: int) -> np.ndarray:
    """Period label of every column of an NPD with the given p_max."""
    return np.concatenate([np.full(totient(p), p, dtype=np.int64) for p in range(1, p_max + 1)])


def export_dictionary(d: NpdDictionary, path: str) -> None:
    """Writes `d` to `path`; a second export of the same dictionary is byte-identical."""
    as_complex = d.family is DictionaryFamily.FAREY or not d.is_real
    lines = [
        f"npd {FORMAT_VERSION} family={d.family.value} L={d.L} pmax={d.p_max} "
        f"normalized={int(d.normalized)}"
    ]
    lines += [",".join(format_entry(value, as_complex) for value in row) for row in d.entries]

    with open(path, "w", encoding="utf-8", newline="\n") as npd_file:
        npd_file.write("\n".join(lines) + "\n")
    logger.debug(f"Exported {d!r} to {path}")


def import_dictionary(path: str) -> NpdDictionary:
    """Reads a file written by export_dictionary.

    Raises:
        MalformedDictionaryFile: With the offending line number
        OSError: If the file cannot be read
    """
    with open(path, "r", encoding="utf-8") as npd_file:
        lines = npd_file.read().splitlines()

    try:
        d = _parse_dictionary(lines)
    except MalformedDictionaryFile as e:
        logger.error(f"Could not import dictionary {path}: {e}")
        raise

    logger.debug(f"Imported {d!r} from {path}")
    return d


def _parse_dictionary(lines: list[str]) -> NpdDictionary:
    if not lines:
        raise MalformedDictionaryFile("line 1: empty file, expected an npd header")
    header = HEADER_PATTERN.match(lines[0].strip())
    if header is None or header["version"] != FORMAT_VERSION:
        raise MalformedDictionaryFile(f"line 1: not an npd {FORMAT_VERSION} header: {lines[0]!r}")

    try:
        family = DictionaryFamily.parse(header["family"])
    except ValueError as e:
        raise MalformedDictionaryFile(f"line 1: {e}") from e
    L, p_max = int(header["L"]), int(header["pmax"])
    if L < 1 or p_max < 1:
        raise MalformedDictionaryFile(f"line 1: L and pmax must be positive, got L={L}, pmax={p_max}")
    N = totient_prefix_sum(p_max)

    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != L:
        raise MalformedDictionaryFile(
            f"line {len(body) + 2}: expected {L} rows, found {len(body)} (truncated file?)"
        )

    entries = np.empty((L, N), dtype=np.complex128)
    for row, text in enumerate(body):
        line_number = row + 2
        cells = text.split(",")
        if len(cells) != N:
            raise MalformedDictionaryFile(
                f"line {line_number}: expected {N} entries for pmax={p_max}, found {len(cells)}"
            )
        entries[row] = [parse_entry(cell, line_number) for cell in cells]

    try:
        return NpdDictionary(
            family=family,
            entries=entries,
            atom_period=atom_periods(p_max),
            p_max=p_max,
            normalized=bool(int(header["normalized"])),
        )
    except ValueError as e:
        raise MalformedDictionaryFile(f"line 1: header does not match the entries: {e}") from e


def import_signal(path: str) -> np.ndarray:
    """Reads samples separated by commas or newlines, each written like a dictionary entry."""
    with open(path, "r", encoding="utf-8") as signal_file:
        lines = signal_file.read().splitlines()

    samples = [
        parse_entry(cell, line_number)
        for line_number, text in enumerate(lines, 1)
        if text.strip() and not text.lstrip().startswith("#")
        for cell in text.split(",")
    ]
    if not samples:
        raise MalformedDictionaryFile(f"{path}: no samples found")
    return np.asarray(samples, dtype=np.complex128)
