"""Plain-text knowledge bases and lexical retrieval over them.

File grammar (one block per document)::

    [POLICY: RETAILER_STABLE]
    description: Policy for retailers facing customer demand.
    entity: Retailer
    order_up_to_level: 100

    [STRATEGY: EXPEDITE_SHIPPING]
    description: The fastest but most expensive option. Use premium freight
    to completely negate the disruption delay.
    parameters: {'extra_lead_time': 0, 'transport_cost_premium': 200}

A ``[KIND: NAME]`` header opens a block. Inside a block, ``key: value``
lines set fields; any other non-blank line continues the previous value
(descriptions wrap). ``parameters:`` holds a brace-delimited map with
quoted keys and numeric values. Other numeric ``key: value`` lines on a
policy are merged into its parameter map.
"""

from __future__ import annotations

import ast
import enum
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .model import Role, StrategyParameters

DATA_DIR = Path(__file__).parent / "data"
POLICIES_KB = DATA_DIR / "policies.kb"
STRATEGIES_KB = DATA_DIR / "strategies.kb"
REACTIVE_KB = DATA_DIR / "reactive.kb"

_HEADER = re.compile(r"^\[\s*([A-Za-z]+)\s*:\s*([A-Za-z0-9_]+)\s*\]$")
_FIELD = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")
_BARE_HEADER = re.compile(r"^[A-Za-z]+\s*:\s*[A-Za-z0-9_]+\s*\]$")
_TOKEN = re.compile(r"[a-z0-9]+")


class KnowledgeBaseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoMatch(LookupError):
    """No document shares a token with the query."""


class DocumentKind(str, enum.Enum):
    POLICY = "POLICY"
    STRATEGY = "STRATEGY"


@dataclass(frozen=True)
class KnowledgeDocument:
    kind: DocumentKind
    name: str
    description: str = ""
    entity: Role | None = None
    parameters: dict[str, int | float] = field(default_factory=dict)

    def search_text(self) -> str:
        parts = [self.name, self.description]
        if self.entity is not None:
            parts.append(self.entity.value)
        return " ".join(parts)


def tokenize(text: str) -> Counter[str]:
    return Counter(_TOKEN.findall(text.lower()))


@dataclass(frozen=True)
class KnowledgeBase:
    documents: tuple[KnowledgeDocument, ...]
    token_index: tuple[Counter[str], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        names = [doc.name for doc in self.documents]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise KnowledgeBaseError(f"duplicate document names: {', '.join(dupes)}")
        index = tuple(tokenize(doc.search_text()) for doc in self.documents)
        object.__setattr__(self, "token_index", index)

    def __len__(self) -> int:
        return len(self.documents)

    def get(self, name: str) -> KnowledgeDocument:
        for doc in self.documents:
            if doc.name == name:
                return doc
        raise KeyError(name)

    @classmethod
    def load(cls, path: str | Path) -> KnowledgeBase:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise KnowledgeBaseError(f"cannot read {path}: {exc.strerror or exc}") from None
        return parse_knowledge_base(text)


def _parse_number(raw: str, line: int) -> int | float:
    try:
        value = ast.literal_eval(raw.strip())
    except (ValueError, SyntaxError):
        raise KnowledgeBaseError(f"not a number: {raw.strip()!r}", line) from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise KnowledgeBaseError(f"not a number: {raw.strip()!r}", line)
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def _parse_parameter_map(raw: str, line: int) -> dict[str, int | float]:
    try:
        value = ast.literal_eval(raw.strip())
    except (ValueError, SyntaxError):
        raise KnowledgeBaseError(f"unparsable parameter map: {raw.strip()!r}", line) from None
    if not isinstance(value, dict):
        raise KnowledgeBaseError("parameters must be a brace-delimited map", line)
    params: dict[str, int | float] = {}
    for key, val in value.items():
        if not isinstance(key, str):
            raise KnowledgeBaseError(f"parameter key must be quoted: {key!r}", line)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise KnowledgeBaseError(f"parameter {key!r} is not numeric", line)
        params[key] = int(val) if isinstance(val, float) and val.is_integer() else val
    return params


def _build_document(kind: str, name: str, fields: dict[str, tuple[str, int]],
                    header_line: int) -> KnowledgeDocument:
    try:
        doc_kind = DocumentKind(kind.upper())
    except ValueError:
        raise KnowledgeBaseError(f"unknown document kind {kind!r}", header_line) from None

    description = fields.pop("description", ("", header_line))[0]
    entity = None
    if "entity" in fields:
        raw, line = fields.pop("entity")
        try:
            entity = Role.parse(raw.strip())
        except ValueError:
            raise KnowledgeBaseError(f"unknown entity {raw.strip()!r}", line) from None

    params: dict[str, int | float] = {}
    if "parameters" in fields:
        raw, line = fields.pop("parameters")
        params.update(_parse_parameter_map(raw, line))
    for key, (raw, line) in fields.items():
        params[key] = _parse_number(raw, line)

    if doc_kind is DocumentKind.STRATEGY:
        params.setdefault("transport_cost_premium", 0)
    return KnowledgeDocument(doc_kind, name, description, entity, params)


def parse_knowledge_base(text: str) -> KnowledgeBase:
    documents: list[KnowledgeDocument] = []
    seen: dict[str, int] = {}
    header: tuple[str, str, int] | None = None
    fields: dict[str, tuple[str, int]] = {}
    last_key: str | None = None

    def flush() -> None:
        if header is not None:
            documents.append(_build_document(header[0], header[1], fields, header[2]))

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            last_key = None
            continue
        if line.startswith("[") or _BARE_HEADER.match(line):
            match = _HEADER.match(line)
            if match is None:
                raise KnowledgeBaseError(f"malformed header {line!r}", lineno)
            flush()
            kind, name = match.group(1), match.group(2)
            if name in seen:
                raise KnowledgeBaseError(
                    f"duplicate document name {name} (first defined on line {seen[name]})",
                    lineno,
                )
            seen[name] = lineno
            header = (kind, name, lineno)
            fields = {}
            last_key = None
            continue
        if header is None:
            raise KnowledgeBaseError(f"content outside a [KIND: NAME] block: {line!r}", lineno)
        match = _FIELD.match(line)
        if match is not None:
            key, value = match.group(1), match.group(2).strip()
            if key in fields:
                raise KnowledgeBaseError(f"duplicate key {key!r}", lineno)
            fields[key] = (value, lineno)
            last_key = key
        elif last_key is not None:
            value, start = fields[last_key]
            fields[last_key] = (f"{value} {line}".strip(), start)
        else:
            raise KnowledgeBaseError(f"expected 'key: value', got {line!r}", lineno)
    flush()
    return KnowledgeBase(tuple(documents))


def _format_number(value: int | float) -> str:
    return repr(value)


def serialize_knowledge_base(kb: KnowledgeBase) -> str:
    blocks = []
    for doc in kb.documents:
        lines = [f"[{doc.kind.value}: {doc.name}]", f"description: {doc.description}"]
        if doc.kind is DocumentKind.POLICY:
            if doc.entity is not None:
                lines.append(f"entity: {doc.entity.value}")
            lines.extend(f"{k}: {_format_number(v)}" for k, v in doc.parameters.items())
        else:
            inner = ", ".join(f"{k!r}: {_format_number(v)}" for k, v in doc.parameters.items())
            lines.append(f"parameters: {{{inner}}}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def similarity(query_tokens: Counter[str], doc_tokens: Counter[str]) -> float:
    """Cosine similarity of two term-frequency multisets."""
    if not query_tokens or not doc_tokens:
        return 0.0
    dot = sum(count * doc_tokens[tok] for tok, count in query_tokens.items())
    if dot == 0:
        return 0.0
    norm_q = math.sqrt(sum(c * c for c in query_tokens.values()))
    norm_d = math.sqrt(sum(c * c for c in doc_tokens.values()))
    return min(1.0, dot / (norm_q * norm_d))


def rank(kb: KnowledgeBase, query: str,
         kind_filter: DocumentKind | None = None) -> list[tuple[float, KnowledgeDocument]]:
    """All (score, doc) pairs, best first; ties broken by name."""
    q = tokenize(query)
    scored = [
        (similarity(q, tokens), doc)
        for doc, tokens in zip(kb.documents, kb.token_index)
        if kind_filter is None or doc.kind is kind_filter
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1].name))
    return scored


def retrieve(kb: KnowledgeBase, query: str,
             kind_filter: DocumentKind | None = None) -> KnowledgeDocument:
    scored = rank(kb, query, kind_filter)
    if not scored or scored[0][0] == 0.0:
        raise NoMatch(f"no document matches {query!r}")
    return scored[0][1]


def retrieve_portfolio(kb: KnowledgeBase, query: str) -> list[KnowledgeDocument]:
    scored = rank(kb, query, DocumentKind.STRATEGY)
    if not scored:
        raise NoMatch("knowledge base holds no strategy documents")
    return [doc for _, doc in scored]


def extract_parameters(doc: KnowledgeDocument) -> StrategyParameters:
    if doc.kind is not DocumentKind.STRATEGY:
        raise TypeError(f"{doc.name} is a {doc.kind.value} document, not a strategy")
    return StrategyParameters(
        extra_lead_time=int(doc.parameters.get("extra_lead_time", 0)),
        transport_cost_premium=doc.parameters.get("transport_cost_premium", 0),
    )
