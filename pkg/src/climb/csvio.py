"""CSV input/output for category-coded tables.

Categories are stored as strings. On load, codes follow first-appearance
order and the cardinality is the number of distinct values seen, unless a
``<name>.domains`` sidecar (JSON mapping column name to its ordered label
list) declares the domain; then codes follow the sidecar and unobserved
categories stay representable. ``write_csv`` always emits the sidecar, so a
write/load round trip preserves codes and cardinalities exactly.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .table import CategoricalTable

__all__ = ["load_csv", "write_csv", "domains_path"]


def domains_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".domains")


def load_csv(
    path: str | Path,
    header: bool = True,
    domains: Mapping[str, Sequence[str]] | None = None,
) -> CategoricalTable:
    """Read a comma-separated file of string categories into coded columns."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    if header:
        names = [c.strip() for c in rows[0]]
        body = rows[1:]
    else:
        names = [f"c{i}" for i in range(len(rows[0]))]
        body = rows
    width = len(names)
    for lineno, row in enumerate(body, start=2 if header else 1):
        if len(row) != width:
            raise ValueError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")

    if domains is None:
        sidecar = domains_path(path)
        if sidecar.exists():
            domains = json.loads(sidecar.read_text())
    columns = []
    cards = []
    for j, name in enumerate(names):
        raw = [row[j].strip() for row in body]
        if domains is not None and name in domains:
            order = list(domains[name])
            mapping = {lab: i for i, lab in enumerate(order)}
            try:
                codes = np.array([mapping[v] for v in raw], dtype=np.int64)
            except KeyError as exc:
                raise ValueError(
                    f"{path}: column {name!r} holds {exc.args[0]!r}, absent from its declared domain"
                ) from None
            card = len(order)
        else:
            mapping = {}
            codes = np.empty(len(raw), dtype=np.int64)
            for i, v in enumerate(raw):
                codes[i] = mapping.setdefault(v, len(mapping))
            card = max(len(mapping), 1)
        columns.append(codes)
        cards.append(card)
    return CategoricalTable(tuple(names), tuple(columns), tuple(cards))


def write_csv(
    table: CategoricalTable,
    path: str | Path,
    labels: Mapping[str, Sequence[str]] | None = None,
) -> None:
    """Write categories as strings plus a sidecar declaring every domain."""
    path = Path(path)
    lab: dict[str, list[str]] = {}
    for name, card in zip(table.names, table.cards):
        if labels is not None and name in labels:
            got = list(labels[name])
            if len(got) != card:
                raise ValueError(f"column {name!r}: {len(got)} labels for cardinality {card}")
            lab[name] = got
        else:
            lab[name] = [str(i) for i in range(card)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.names)
        for i in range(table.n):
            writer.writerow([lab[name][int(col[i])] for name, col in zip(table.names, table.columns)])
    domains_path(path).write_text(
        json.dumps({name: lab[name] for name in table.names}, indent=2, sort_keys=True) + "\n"
    )
