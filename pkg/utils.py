#!/usr/bin/env python3

import hashlib
import logging
import os
import re
import zlib
from typing import Any, Dict, Iterable

import numpy as np
import yaml

from errors import ConfigError

logger = logging.getLogger(__name__)

# Config keys whose values are always lists
ARRAY_KEYS = {
    "sweep_values",
    "highs",
    "pq_values",
}

_KEY_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")


def derive_seed(root_seed: int, tag: str) -> int:
    """
    Derive a stage-specific 64-bit seed from the root seed.

    Uses crc32 of the tag (never Python's hash(), which is randomized per
    process) mixed through numpy's SeedSequence.
    """
    crc = zlib.crc32(tag.encode("utf-8")) & 0xFFFFFFFF
    state = np.random.SeedSequence([int(root_seed), crc]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def parse_scalar(raw_value: str) -> Any:
    """Type a config value: numbers, booleans and null via YAML scalar rules"""
    text = raw_value.strip()
    if text == "":
        return ""
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError:
        return text
    if isinstance(value, (dict, list)):
        raise ConfigError(f"nested value not allowed in flat config: {text!r}")
    return value


def should_be_array(key: str, value: str) -> bool:
    """Determines whether the value should be converted to a list."""
    if key in ARRAY_KEYS:
        return True
    return "," in value


def parse_value(key: str, raw_value: str) -> Any:
    """Converts a raw config string to a scalar or a list of scalars."""
    if should_be_array(key, raw_value):
        parts = [part.strip() for part in raw_value.split(",") if part.strip()]
        return [parse_scalar(part) for part in parts]
    return parse_scalar(raw_value)


def parse_config_lines(lines: Iterable[str], source: str = "<config>") -> Dict[str, Any]:
    """Parse flat key=value lines; '#' starts a comment line"""
    result: Dict[str, Any] = {}
    seen_at: Dict[str, int] = {}

    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got {line!r}")
        key, raw_value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if not _KEY_PATTERN.match(key):
            raise ConfigError(f"{source}:{number}: invalid key {key!r}")
        if key in seen_at:
            raise ConfigError(
                f"{source}:{number}: key {key!r} already set on line {seen_at[key]}"
            )
        seen_at[key] = number
        result[key] = parse_value(key, raw_value)

    return result


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a flat key=value file, or a flat YAML mapping for .yaml/.yml"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            if path.endswith((".yaml", ".yml")):
                data = yaml.safe_load(f) or {}
                if not isinstance(data, dict):
                    raise ConfigError(f"{path}: expected a mapping at top level")
                for key, value in data.items():
                    if isinstance(value, dict):
                        raise ConfigError(f"{path}: nested value for key {key!r}")
                return {str(k).replace("-", "_"): v for k, v in data.items()}
            return parse_config_lines(f, source=path)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}")
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}")


def get_output_path(output_dir: str, name: str) -> str:
    """Path of an artifact inside the output directory (created on demand)"""
    os.makedirs(output_dir, exist_ok=True)
    return os.path.join(output_dir, name)


def calculate_file_hash(file_path: str) -> str:
    """Calculate SHA256 hash of file contents"""
    if not os.path.exists(file_path):
        return ""

    hash_obj = hashlib.sha256()
    with open(file_path, "rb") as f:
        while chunk := f.read(8192):
            hash_obj.update(chunk)
    return hash_obj.hexdigest()
