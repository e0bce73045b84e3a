"""Ground-truth Bayesian networks and a BIF-subset parser.

The supported grammar covers the discrete networks of the public network
repositories: a ``network`` header block, ``variable`` blocks declaring
discrete domains, and ``probability`` blocks holding either a flat ``table``
or one row per parent configuration. ``//`` comments run to end of line.
Parse errors carry the offending line and column.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graph import PDag

__all__ = ["BayesNet", "BifParseError", "parse_bif", "serialize_bif"]


class BifParseError(ValueError):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class BayesNet:
    """A discrete Bayesian network: DAG plus one CPT per node.

    ``cpts[v]`` has one row per joint parent configuration (first declared
    parent varying slowest) and one column per category of v; every row sums
    to one.
    """

    name: str
    nodes: tuple[str, ...]
    labels: dict[str, tuple[str, ...]]
    parents: dict[str, tuple[str, ...]]
    cpts: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        for v in self.nodes:
            k = len(self.labels[v])
            rows = int(np.prod([len(self.labels[p]) for p in self.parents[v]])) if self.parents[v] else 1
            cpt = self.cpts[v]
            if cpt.shape != (rows, k):
                raise ValueError(f"{v}: CPT shape {cpt.shape} does not cover {rows} x {k}")
            if not np.allclose(cpt.sum(axis=1), 1.0, atol=1e-9):
                raise ValueError(f"{v}: CPT rows must sum to 1")
            if (cpt < 0).any():
                raise ValueError(f"{v}: negative probability")
        dag = self.dag()
        if not dag.is_acyclic():
            raise ValueError("parent structure has a cycle")

    def card(self, v: str) -> int:
        return len(self.labels[v])

    def dag(self) -> PDag:
        g = PDag(self.nodes)
        for v in self.nodes:
            for p in self.parents[v]:
                if g.has_edge(p, v):
                    raise ValueError(f"parent structure has a cycle between {p!r} and {v!r}")
                g.add_directed(p, v)
        return g

    def config_index(self, v: str, parent_codes: tuple[int, ...]) -> int:
        idx = 0
        for p, code in zip(self.parents[v], parent_codes):
            idx = idx * self.card(p) + code
        return idx


# -- tokenizer ---------------------------------------------------------------

_PUNCT = set("{}()[]|,;")


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Token]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch.isspace():
            col += 1
            i += 1
        elif ch == "/" and text[i : i + 2] == "//":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in _PUNCT:
            yield _Token(ch, line, col)
            i += 1
            col += 1
        else:
            start = i
            start_col = col
            while i < n and not text[i].isspace() and text[i] not in _PUNCT and text[i : i + 2] != "//":
                i += 1
                col += 1
            yield _Token(text[start:i], line, start_col)


class _TokenStream:
    def __init__(self, text: str) -> None:
        self._tokens = list(_tokenize(text))
        self._pos = 0

    def peek(self) -> _Token | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def next(self, what: str = "token") -> _Token:
        tok = self.peek()
        if tok is None:
            last = self._tokens[-1] if self._tokens else _Token("", 1, 1)
            raise BifParseError(f"unexpected end of input, expected {what}", last.line, last.col)
        self._pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next(repr(text))
        if tok.text != text:
            raise BifParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def at_end(self) -> bool:
        return self._pos >= len(self._tokens)


def _number(tok: _Token) -> float:
    try:
        return float(tok.text)
    except ValueError:
        raise BifParseError(f"expected a number, found {tok.text!r}", tok.line, tok.col) from None


# -- parser ------------------------------------------------------------------


def parse_bif(text: str) -> BayesNet:
    """Parse the BIF subset into a structurally validated network."""
    ts = _TokenStream(text)
    name = "network"
    order: list[str] = []
    labels: dict[str, tuple[str, ...]] = {}
    parents: dict[str, tuple[str, ...]] = {}
    cpts: dict[str, np.ndarray] = {}

    while not ts.at_end():
        tok = ts.next("block keyword")
        if tok.text == "network":
            name = ts.next("network name").text
            ts.expect("{")
            depth = 1
            while depth:
                inner = ts.next("'}'")
                depth += {"{": 1, "}": -1}.get(inner.text, 0)
        elif tok.text == "variable":
            _parse_variable(ts, order, labels)
        elif tok.text == "probability":
            _parse_probability(ts, labels, parents, cpts)
        else:
            raise BifParseError(
                f"expected 'network', 'variable' or 'probability', found {tok.text!r}",
                tok.line,
                tok.col,
            )

    for v in order:
        if v not in cpts:
            raise BifParseError(f"no probability block for variable {v!r}", 1, 1)
    try:
        return BayesNet(name=name, nodes=tuple(order), labels=labels, parents=parents, cpts=cpts)
    except ValueError as exc:
        raise BifParseError(str(exc), 1, 1) from exc


def _parse_variable(ts: _TokenStream, order: list[str], labels: dict) -> None:
    name_tok = ts.next("variable name")
    v = name_tok.text
    if v in labels:
        raise BifParseError(f"variable {v!r} declared twice", name_tok.line, name_tok.col)
    ts.expect("{")
    ts.expect("type")
    ts.expect("discrete")
    ts.expect("[")
    k_tok = ts.next("cardinality")
    try:
        k = int(k_tok.text)
    except ValueError:
        raise BifParseError(f"expected an integer cardinality, found {k_tok.text!r}", k_tok.line, k_tok.col) from None
    if k < 1:
        raise BifParseError("cardinality must be >= 1", k_tok.line, k_tok.col)
    ts.expect("]")
    ts.expect("{")
    cats: list[str] = []
    while True:
        tok = ts.next("category label or '}'")
        if tok.text == "}":
            break
        if tok.text == ",":
            continue
        cats.append(tok.text)
    ts.expect(";")
    ts.expect("}")
    if len(cats) != k:
        raise BifParseError(
            f"variable {v!r} declares {k} values but lists {len(cats)}", name_tok.line, name_tok.col
        )
    order.append(v)
    labels[v] = tuple(cats)


def _parse_probability(ts: _TokenStream, labels: dict, parents: dict, cpts: dict) -> None:
    open_tok = ts.expect("(")
    child_tok = ts.next("variable name")
    child = child_tok.text
    if child not in labels:
        raise BifParseError(f"unknown variable {child!r}", child_tok.line, child_tok.col)
    if child in cpts:
        raise BifParseError(f"duplicate probability block for {child!r}", child_tok.line, child_tok.col)
    par: list[str] = []
    tok = ts.next("'|' or ')'")
    if tok.text == "|":
        while True:
            p_tok = ts.next("parent name")
            if p_tok.text in (",",):
                continue
            if p_tok.text == ")":
                break
            if p_tok.text not in labels:
                raise BifParseError(f"unknown variable {p_tok.text!r}", p_tok.line, p_tok.col)
            par.append(p_tok.text)
        if not par:
            raise BifParseError("empty parent list", open_tok.line, open_tok.col)
    elif tok.text != ")":
        raise BifParseError(f"expected '|' or ')', found {tok.text!r}", tok.line, tok.col)

    k = len(labels[child])
    rows = int(np.prod([len(labels[p]) for p in par])) if par else 1
    cpt = np.full((rows, k), np.nan)
    seen = np.zeros(rows, dtype=bool)

    ts.expect("{")
    while True:
        tok = ts.next("'table', '(' or '}'")
        if tok.text == "}":
            break
        if tok.text == "table":
            values = _read_values(ts)
            if len(values) != rows * k:
                raise BifParseError(
                    f"table for {child!r} lists {len(values)} values, expected {rows * k}",
                    tok.line,
                    tok.col,
                )
            cpt = np.asarray(values, dtype=np.float64).reshape(rows, k)
            seen[:] = True
        elif tok.text == "(":
            codes: list[int] = []
            while True:
                lab = ts.next("parent value or ')'")
                if lab.text == ")":
                    break
                if lab.text == ",":
                    continue
                pos = len(codes)
                if pos >= len(par):
                    raise BifParseError(
                        f"row for {child!r} lists more values than parents", lab.line, lab.col
                    )
                cats = labels[par[pos]]
                if lab.text not in cats:
                    raise BifParseError(
                        f"{lab.text!r} is not a value of {par[pos]!r}", lab.line, lab.col
                    )
                codes.append(cats.index(lab.text))
            if len(codes) != len(par):
                raise BifParseError(
                    f"row for {child!r} lists {len(codes)} parent values, expected {len(par)}",
                    tok.line,
                    tok.col,
                )
            values = _read_values(ts)
            if len(values) != k:
                raise BifParseError(
                    f"row for {child!r} lists {len(values)} probabilities, expected {k}",
                    tok.line,
                    tok.col,
                )
            idx = 0
            for p, code in zip(par, codes):
                idx = idx * len(labels[p]) + code
            if seen[idx]:
                raise BifParseError(f"duplicate row for {child!r}", tok.line, tok.col)
            seen[idx] = True
            cpt[idx] = values
        else:
            raise BifParseError(f"expected 'table', '(' or '}}', found {tok.text!r}", tok.line, tok.col)

    if not seen.all():
        raise BifParseError(
            f"probability block for {child!r} covers {int(seen.sum())} of {rows} parent configurations",
            open_tok.line,
            open_tok.col,
        )
    sums = cpt.sum(axis=1)
    if not np.all(np.abs(sums - 1.0) <= 1e-6):
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise BifParseError(
            f"row {bad} for {child!r} sums to {sums[bad]:.8f}, not 1", open_tok.line, open_tok.col
        )
    parents[child] = tuple(par)
    cpts[child] = cpt / sums[:, None]  # exact row normalization after the tolerance check


def _read_values(ts: _TokenStream) -> list[float]:
    values: list[float] = []
    while True:
        tok = ts.next("number or ';'")
        if tok.text == ";":
            return values
        if tok.text == ",":
            continue
        values.append(_number(tok))


# -- serializer ---------------------------------------------------------------


def serialize_bif(net: BayesNet) -> str:
    """Canonical text form; parsing it back reproduces the network."""
    out = [f"network {net.name} {{\n}}\n"]
    for v in net.nodes:
        cats = ", ".join(net.labels[v])
        out.append(
            f"variable {v} {{\n  type discrete [ {net.card(v)} ] {{ {cats} }};\n}}\n"
        )
    for v in net.nodes:
        par = net.parents[v]
        cpt = net.cpts[v]
        if not par:
            vals = ", ".join(_fmt(x) for x in cpt[0])
            out.append(f"probability ( {v} ) {{\n  table {vals};\n}}\n")
            continue
        head = ", ".join(par)
        lines = [f"probability ( {v} | {head} ) {{"]
        cards = [net.card(p) for p in par]
        for idx in range(cpt.shape[0]):
            rem = idx
            codes = []
            for c in reversed(cards):
                codes.append(rem % c)
                rem //= c
            codes.reverse()
            cfg = ", ".join(net.labels[p][c] for p, c in zip(par, codes))
            vals = ", ".join(_fmt(x) for x in cpt[idx])
            lines.append(f"  ( {cfg} ) {vals};")
        lines.append("}\n")
        out.append("\n".join(lines))
    return "\n".join(out)


def _fmt(x: float) -> str:
    if x == int(x):
        return f"{x:.1f}"
    return repr(float(x))


def exact_joint(net: BayesNet) -> tuple[np.ndarray, list[str]]:
    """Full joint distribution as an array indexed by node order; small nets only."""
    cards = [net.card(v) for v in net.nodes]
    total = int(np.prod(cards))
    if total > 2_000_000:
        raise ValueError("joint distribution too large to enumerate")
    pos = {v: i for i, v in enumerate(net.nodes)}
    joint = np.zeros(cards, dtype=np.float64)
    for flat in range(total):
        codes = np.unravel_index(flat, cards)
        p = 1.0
        for v in net.nodes:
            cfg = net.config_index(v, tuple(int(codes[pos[q]]) for q in net.parents[v]))
            p *= net.cpts[v][cfg, int(codes[pos[v]])]
        joint[codes] = p
    return joint, list(net.nodes)
