"""Init file for cli module."""

from .config_file import ConfigFile, DataSource, OutputPaths, KEY_TABLE, preset_names
from .main import main, build_parser

__all__ = [
    "ConfigFile",
    "DataSource",
    "OutputPaths",
    "KEY_TABLE",
    "preset_names",
    "main",
    "build_parser",
]
