import io
import json
import logging
import re
from itertools import islice
from pathlib import Path
from typing import Any, Iterator, TextIO

import numpy as np
import pandas as pd

from data_classes import (
    Attribute,
    Instance,
    SchemaError,
    StreamParseError,
    StreamSchema,
)

from .streams import BaseStream

logger = logging.getLogger(__name__)

CHUNK_ROWS = 10_000
SCHEMA_SUFFIX = ".schema.json"
NUMERIC_TYPES = ("numeric", "real", "integer")

ATTRIBUTE_LINE = re.compile(r"^@attribute\s+('[^']*'|\"[^\"]*\"|\S+)\s+(.+?)\s*$", re.IGNORECASE)
PANDAS_LINE = re.compile(r"line (\d+)")


def sidecar_path(path: str | Path) -> Path:
    """Where the schema descriptor of a headerless CSV stream lives"""
    path = Path(path)
    return path.with_name(path.stem + SCHEMA_SUFFIX)


def write_sidecar(path: str | Path, schema: StreamSchema, extra: dict[str, Any] | None = None) -> Path:
    target = sidecar_path(path)
    target.write_text(json.dumps({**schema.to_dict(), **(extra or {})}, indent=2, sort_keys=True))
    return target


def load_sidecar(path: str | Path) -> StreamSchema:
    target = sidecar_path(path)
    if not target.exists():
        raise FileNotFoundError(f"No schema descriptor for {path} (expected {target})")
    return StreamSchema.from_dict(json.loads(target.read_text()))


class FileStream(BaseStream):
    """Streams instances from delimited text in file order, one pandas chunk at a time"""

    def __init__(
        self,
        path: str | Path,
        schema: StreamSchema,
        class_index: int = -1,
        header_lines: int = 0,
        quotechar: str = '"',
        comment: str = "#",
        length: int | None = None,
    ):
        """
        Prepare a lazy reader

        Args:
            path (str | Path): The file
            schema (StreamSchema): Attribute and class declarations
            class_index (int): File column holding the class (negative counts from the end)
            header_lines (int): Lines preceding the data
            quotechar (str): Quote character of the format
            comment (str): Comment prefix of the format
            length (int | None): Stop after this many instances
        """
        super().__init__(length)
        self.path = Path(path)
        if not self.path.exists():
            raise FileNotFoundError(f"Stream file not found: {self.path}")
        self._schema = schema
        self.n_columns = schema.n_attributes + 1
        self.class_index = class_index % self.n_columns
        self.header_lines = header_lines
        self.quotechar = quotechar
        self.comment = comment

        self._nominal_lookup = {
            i: {v: k for k, v in enumerate(a.values)}
            for i, a in enumerate(schema.attributes)
            if a.is_nominal
        }
        self._class_lookup = {c: k for k, c in enumerate(schema.class_names)}
        self._feature_columns = [c for c in range(self.n_columns) if c != self.class_index]
        self._rows = self._read()

    def _skip_header(self, handle: TextIO) -> None:
        for _ in range(self.header_lines):
            handle.readline()

    def _blocks(self, handle: TextIO) -> Iterator[tuple[list[int], str]]:
        """Up to CHUNK_ROWS data lines at a time, with the file line number of each"""
        line = self.header_lines
        while block := list(islice(handle, CHUNK_ROWS)):
            numbers, rows = [], []
            for offset, row in enumerate(block, start=line + 1):
                text = row.strip()
                if text and not text.startswith(self.comment):
                    numbers.append(offset)
                    rows.append(row if row.endswith("\n") else row + "\n")
            line += len(block)
            if rows:
                yield numbers, "".join(rows)

    def _read(self) -> Iterator[Instance]:
        with open(self.path, newline="") as handle:
            self._skip_header(handle)
            for numbers, text in self._blocks(handle):
                try:
                    frame = pd.read_csv(
                        io.StringIO(text),
                        header=None,
                        dtype=str,
                        keep_default_na=False,
                        skipinitialspace=True,
                        quotechar=self.quotechar,
                        comment=self.comment,
                    )
                except pd.errors.ParserError as e:
                    match = PANDAS_LINE.search(str(e))
                    k = int(match.group(1)) - 1 if match else -1
                    at = numbers[k] if 0 <= k < len(numbers) else None
                    raise StreamParseError(f"malformed row in {self.path.name} ({e})", at) from e

                for line, row in zip(numbers, frame.itertuples(index=False, name=None)):
                    if len(row) != self.n_columns:
                        raise StreamParseError(f"expected {self.n_columns} columns, got {len(row)}", line)
                    yield self._convert(row, line)

    def _convert(self, row: tuple, line: int) -> Instance:
        if any(pd.isna(v) for v in row):
            raise StreamParseError(f"expected {self.n_columns} columns", line)

        features = np.empty(self._schema.n_attributes)
        for attribute, column in enumerate(self._feature_columns):
            value = str(row[column]).strip()
            lookup = self._nominal_lookup.get(attribute)
            if lookup is not None:
                if value not in lookup:
                    raise StreamParseError(
                        f"unknown value {value!r} for {self._schema.attributes[attribute].name}",
                        line,
                    )
                features[attribute] = lookup[value]
                continue
            try:
                features[attribute] = float(value)
            except ValueError as e:
                raise StreamParseError(f"not a number: {value!r}", line) from e
            if not np.isfinite(features[attribute]):
                raise StreamParseError(f"non-finite value: {value!r}", line)

        label = str(row[self.class_index]).strip()
        if label not in self._class_lookup:
            raise StreamParseError(f"unknown class {label!r}", line)
        return Instance(features, self._class_lookup[label])

    def _next(self) -> Instance | None:
        return next(self._rows, None)


def read_csv(
    path: str | Path,
    schema: StreamSchema | None = None,
    class_index: int = -1,
    length: int | None = None,
) -> FileStream:
    """
    Stream a headerless CSV file

    Args:
        path (str | Path): The CSV file
        schema (StreamSchema | None): Declared schema; read from the sidecar descriptor when None
        class_index (int): Column holding the class, the last one by default
        length (int | None): Stop after this many instances

    Returns:
        FileStream: A lazy stream in file order
    """
    schema = schema if schema is not None else load_sidecar(path)
    return FileStream(path, schema, class_index=class_index, length=length)


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    return text


def parse_arff_header(handle: TextIO) -> tuple[str, list[Attribute], int]:
    """
    Read the header of an ARFF file up to and including @data

    Returns:
        tuple: Relation name, declared attributes, and lines consumed

    Raises:
        StreamParseError: On unsupported types, malformed declarations or a missing @data
    """
    relation = "arff"
    attributes: list[Attribute] = []
    line_number = 0
    while line := handle.readline():
        line_number += 1
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        keyword = text.split(None, 1)[0].lower()

        if keyword == "@relation":
            parts = text.split(None, 1)
            relation = _unquote(parts[1]) if len(parts) > 1 else relation
        elif keyword == "@attribute":
            match = ATTRIBUTE_LINE.match(text)
            if not match:
                raise StreamParseError(f"malformed attribute declaration: {text}", line_number)
            name, kind = _unquote(match.group(1)), match.group(2).strip()
            if kind.startswith("{"):
                if not kind.endswith("}"):
                    raise StreamParseError(f"unterminated nominal domain: {kind}", line_number)
                values = [_unquote(v) for v in kind[1:-1].split(",") if v.strip()]
                attributes.append(Attribute.nominal(name, values))
            elif kind.lower() in NUMERIC_TYPES:
                attributes.append(Attribute.numeric(name))
            else:
                raise StreamParseError(f"unsupported attribute type {kind!r}", line_number)
        elif keyword == "@data":
            return relation, attributes, line_number
        else:
            raise StreamParseError(f"unexpected header line: {text}", line_number)

    raise StreamParseError("no @data section", line_number)


def read_arff(
    path: str | Path, class_attribute: str | None = None, length: int | None = None
) -> FileStream:
    """
    Stream an ARFF file (numeric and nominal attributes)

    Args:
        path (str | Path): The ARFF file
        class_attribute (str | None): Name of the class attribute, the last one by default
        length (int | None): Stop after this many instances

    Returns:
        FileStream: A lazy stream over the @data section
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Stream file not found: {path}")
    with open(path, newline="") as handle:
        relation, attributes, header_lines = parse_arff_header(handle)

    names = [a.name for a in attributes]
    if class_attribute is None:
        class_index = len(attributes) - 1
    elif class_attribute in names:
        class_index = names.index(class_attribute)
    else:
        raise SchemaError(f"No attribute {class_attribute!r} in {path.name} (have {', '.join(names)})")
    if class_index < 0 or not attributes[class_index].is_nominal:
        raise SchemaError(f"Class attribute of {path.name} must be nominal")

    schema = StreamSchema(
        attributes=tuple(a for i, a in enumerate(attributes) if i != class_index),
        class_names=attributes[class_index].values,
        name=relation,
    )
    logger.debug(f"{path.name}: {schema.n_attributes} attributes, {schema.n_classes} classes")
    return FileStream(
        path,
        schema,
        class_index=class_index,
        header_lines=header_lines,
        quotechar="'",
        comment="%",
        length=length,
    )
