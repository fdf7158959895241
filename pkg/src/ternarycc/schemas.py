"""JSON Schemas for configuration, partition and report documents."""

import json
from functools import lru_cache
from importlib import resources

import jsonschema

KINDS = ("config", "partition", "report")


@lru_cache(maxsize=None)
def schema(kind: str) -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown schema {kind!r}")
    text = resources.files(__package__).joinpath("schemas", f"{kind}.schema.json").read_text()
    return json.loads(text)


def validate(kind: str, document) -> None:
    """Raise ``jsonschema.ValidationError`` if ``document`` does not match."""
    jsonschema.validate(document, schema(kind))
