"""Word files and word synthesis.

A words file is a JSON object mapping a key (page number for ICDAR
documents, table id for FinTabNet records) to a list of
``{"text": str, "box": [x0, y0, x1, y1]}`` entries in the top-left frame.
A bare list is accepted too and applies to every key.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

from ..geometry import BBox
from ..model import Cell, Word


def parse_words(entries: Iterable[dict[str, Any]]) -> list[Word]:
    words = []
    for entry in entries:
        text = str(entry.get("text", ""))
        if not text.strip():
            continue
        words.append(Word(text, BBox.from_list(entry["box"])))
    return words


def load_words_file(path: str | Path) -> dict[str, list[Word]] | list[Word]:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if isinstance(data, list):
        return parse_words(data)
    return {str(key): parse_words(value) for key, value in data.items()}


def synthesize_words(cells: Iterable[Cell]) -> list[Word]:
    """Approximate word boxes for cells that only carry a text box.

    The cell box is cut horizontally in proportion to character counts, with
    one character of spacing between tokens.  The first word starts at the
    cell's left edge and the last ends at its right edge, so the union of a
    cell's synthetic words is exactly its box.
    """
    words = []
    for cell in cells:
        if cell.box is None or cell.is_blank:
            continue
        tokens = cell.text.split()
        total = sum(len(t) for t in tokens) + len(tokens) - 1
        box = cell.box
        offset = 0
        for k, token in enumerate(tokens):
            x0 = box.x_min + box.width * offset / total
            offset += len(token)
            x1 = box.x_max if k == len(tokens) - 1 else box.x_min + box.width * offset / total
            offset += 1
            words.append(Word(token, BBox(x0, box.y_min, x1, box.y_max)))
    return words
