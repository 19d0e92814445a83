import json
import os
from pathlib import Path
from typing import Dict, Any

import tomli

from tarotools.tatra.util.containers import flatten_dict


def expand_user(file):
    if not isinstance(file, str) or not file.startswith('~'):
        return file

    return os.path.expanduser(file)


def read_toml_file_flatten(file_path) -> Dict[str, Any]:
    with open(file_path, 'rb') as file:
        return flatten_dict(tomli.load(file))


def dumps_json(payload) -> str:
    """Stable JSON rendering: same payload, same bytes."""
    return json.dumps(payload, indent=2, sort_keys=True)


def write_text_file(path, text: str) -> Path:
    path = Path(expand_user(str(path)))
    if not path.parent.is_dir():
        os.makedirs(path.parent)
    with open(path, 'w', encoding='utf-8') as file:
        file.write(text)
    return path


def write_json_file(path, payload) -> Path:
    return write_text_file(path, dumps_json(payload) + '\n')
