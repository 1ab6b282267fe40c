"""Plain-text experiment configuration: key = value lines, sections per experiment."""
from __future__ import annotations

import configparser
from pathlib import Path
from typing import Optional

from .harness import ExperimentConfig
from .state import ConfigError

__all__ = ["load_config"]

_INT_KEYS = {"case", "M", "M2", "newton_max_iter", "ref_factor"}
_FLOAT_KEYS = {"m", "tau", "T", "theta", "lambda_prime", "newton_tol"}
_STR_KEYS = {"problem", "reference", "out_dir", "damping"}
_LIST_KEYS = {"snapshot_times"}
_KNOWN = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS
_REQUIRED = {"problem", "case", "m", "M", "tau", "T"}


def load_config(path, section: Optional[str] = None) -> ExperimentConfig:
    """Read and validate one experiment section.

    A file without section headers is treated as a single experiment.  With
    several sections, ``section`` picks one.
    """
    text = Path(path).read_text(encoding="utf-8")

    def fresh_parser() -> configparser.ConfigParser:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # m and M are distinct keys
        return parser

    parser = fresh_parser()
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError:
        parser = fresh_parser()
        try:
            parser.read_string("[experiment]\n" + text)
        except configparser.Error as exc:
            raise ConfigError(f"unreadable config: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from None
    names = parser.sections()
    if not names:
        raise ConfigError("config file defines no experiment")
    if section is None:
        if len(names) > 1:
            raise ConfigError(f"config defines several experiments {names}; pick one")
        section = names[0]
    elif section not in names:
        raise ConfigError(f"no experiment section {section!r}; available: {names}")
    raw = dict(parser[section])

    unknown = set(raw) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED - set(raw)
    if missing:
        raise ConfigError(f"missing required config keys: {sorted(missing)}")

    kwargs = {}
    for key, value in raw.items():
        value = value.strip()
        try:
            if key in _INT_KEYS:
                kwargs[key] = int(value)
            elif key in _FLOAT_KEYS:
                kwargs[key] = _parse_number(value)
            elif key in _LIST_KEYS:
                kwargs[key] = tuple(_parse_number(v) for v in value.split(",") if v.strip())
            else:
                kwargs[key] = value
        except ValueError:
            raise ConfigError(f"cannot parse {key} = {value!r}") from None
    return ExperimentConfig(**kwargs)


def _parse_number(text: str) -> float:
    """Floats, allowing simple fractions like 1/6400 (the natural ladder notation)."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)
