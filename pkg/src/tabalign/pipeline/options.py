"""Pipeline thresholds and the key-value options file."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from ..errors import TabAlignError


class OptionsError(TabAlignError):
    pass


@dataclass(frozen=True)
class PipelineOptions:
    dot_leader_min_dots: int = 3
    word_overlap_threshold: float = 0.5
    iteration_cap: int = 10
    currency_glyphs: str = "$¢£€"

    def __post_init__(self):
        if self.dot_leader_min_dots < 1:
            raise OptionsError("dot_leader_min_dots must be >= 1")
        if not 0 < self.word_overlap_threshold <= 1:
            raise OptionsError("word_overlap_threshold must be in (0, 1]")
        if self.iteration_cap < 1:
            raise OptionsError("iteration_cap must be >= 1")
        if not self.currency_glyphs:
            raise OptionsError("currency_glyphs must not be empty")

    def updated(self, overrides: Mapping[str, str]) -> PipelineOptions:
        """Return a copy with string-valued overrides coerced to each field's type."""
        types = {f.name: f.type for f in fields(self)}
        changes = {}
        for key, raw in overrides.items():
            key = key.strip().replace("-", "_")
            if key not in types:
                raise OptionsError(f"unknown option {key!r}")
            kind = types[key]
            try:
                if kind in ("int", int):
                    changes[key] = int(raw)
                elif kind in ("float", float):
                    changes[key] = float(raw)
                else:
                    changes[key] = str(raw).strip()
            except ValueError:
                raise OptionsError(f"bad value for {key}: {raw!r}") from None
        return replace(self, **changes)


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise OptionsError(f"line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_options(path: str | Path | None, overrides: Mapping[str, str] = ()) -> PipelineOptions:
    options = PipelineOptions()
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise OptionsError(f"cannot read options file: {exc}") from None
        options = options.updated(parse_key_values(text))
    return options.updated(dict(overrides))
