"""JSON schemas for every document the CLI writes.

``report`` covers verification reports (tag ``csreport/1``); ``complex``,
``validation``, ``logicals``, ``crosscheck`` and ``commutators`` cover the
other subcommands.
"""

import json
import logging
from functools import cache
from importlib.resources import files
from typing import Any

import jsonschema

from cscc.errors import DocumentSchemaError

logger = logging.getLogger(__name__)

SCHEMA_NAMES = (
    "complex",
    "validation",
    "logicals",
    "report",
    "crosscheck",
    "commutators",
)


@cache
def load_schema(name: str) -> dict[str, Any]:
    """Load a shipped schema by name.

    Raises:
        KeyError: If no schema has that name
    """
    if name not in SCHEMA_NAMES:
        raise KeyError(name)
    path = files(__name__).joinpath(f"{name}.json")
    schema: dict[str, Any] = json.loads(path.read_text())
    return schema


def check_document(document: dict[str, Any], name: str) -> dict[str, Any]:
    """Validate a document against the named schema and hand it back.

    Raises:
        DocumentSchemaError: If the document does not match
    """
    try:
        jsonschema.validate(instance=document, schema=load_schema(name))
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise DocumentSchemaError(
            f"{name} document invalid at {where}: {e.message}"
        ) from e
    logger.debug(f"{name} document matches its schema")
    return document
