"""Readers for source annotation formats and the canonical interchange format."""

from .canonical import SCHEMA_VERSION, read_canonical, table_from_dict, table_to_dict, write_canonical
from .corrections import ManualCorrection, apply_corrections, load_overlay, parse_overlay, split_table
from .failures import IngestFailure
from .fintabnet import parse_fintabnet_lines, parse_fintabnet_record, place_html_cells
from .icdar import parse_icdar_xml
from .manifest import DatasetManifest, load_corrections, load_dataset, load_manifest
from .words import load_words_file, synthesize_words

__all__ = [
    "SCHEMA_VERSION",
    "DatasetManifest",
    "IngestFailure",
    "ManualCorrection",
    "apply_corrections",
    "load_corrections",
    "load_dataset",
    "load_manifest",
    "load_overlay",
    "load_words_file",
    "parse_fintabnet_lines",
    "parse_fintabnet_record",
    "parse_icdar_xml",
    "parse_overlay",
    "place_html_cells",
    "read_canonical",
    "split_table",
    "synthesize_words",
    "table_from_dict",
    "table_to_dict",
    "write_canonical",
]
