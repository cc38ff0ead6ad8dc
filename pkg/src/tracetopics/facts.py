"""Source facts: per-class and per-method attributes extracted ahead of time.

The store is a flat tab-separated file, one record per line, UTF-8:

    C<TAB>ClassName<TAB>InheritsFrom<TAB>ImplementsTo,...<TAB>Variables,...
    M<TAB>Class.method(Sig)<TAB>Arguments,...<TAB>ReturnType<TAB>ReturnValue<TAB>comment text

Empty fields stay empty; list fields are comma-separated. Parsing a real
codebase into this format is a companion concern — the toolkit's contract
starts here.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import FactsError
from .traces import split_method_key


@dataclass(frozen=True)
class ClassFact:
    class_name: str
    inherits_from: str | None = None
    implements_to: tuple[str, ...] = ()
    variables: tuple[str, ...] = ()


@dataclass(frozen=True)
class MethodFact:
    method_key: str
    class_name: str
    method_name: str
    signature: str
    arguments: tuple[str, ...] = ()
    return_type: str = ""
    return_value: str | None = None
    comment_terms: tuple[str, ...] = ()


def _split_list(field: str) -> tuple[str, ...]:
    return tuple(x for x in (part.strip() for part in field.split(",")) if x)


class FactsStore:
    """In-memory store with lookup by MethodKey and class name."""

    def __init__(self):
        self.classes: dict[str, ClassFact] = {}
        self.methods: dict[str, MethodFact] = {}
        self._by_class: dict[str, list[str]] = {}

    def add_class(self, fact: ClassFact) -> None:
        if fact.class_name in self.classes:
            raise FactsError(f"duplicate class record: {fact.class_name}")
        self.classes[fact.class_name] = fact

    def add_method(self, fact: MethodFact) -> None:
        if fact.method_key in self.methods:
            raise FactsError(f"duplicate method record: {fact.method_key}")
        self.methods[fact.method_key] = fact
        self._by_class.setdefault(fact.class_name, []).append(fact.method_key)

    def validate(self) -> None:
        """Every method must belong to a known class."""
        orphans = sorted(
            key for key, m in self.methods.items() if m.class_name not in self.classes
        )
        if orphans:
            raise FactsError(
                "method record(s) reference unknown classes: " + ", ".join(orphans)
            )

    def methods_of(self, class_name: str) -> list[MethodFact]:
        return [self.methods[k] for k in self._by_class.get(class_name, [])]

    def __len__(self) -> int:
        return len(self.methods)


def parse_facts(text: str, source: str = "<facts>") -> FactsStore:
    store = FactsStore()
    for line_no, line in enumerate(text.splitlines(), 1):
        stripped = line.rstrip("\n")
        if not stripped.strip() or stripped.lstrip().startswith("#"):
            continue
        fields = stripped.split("\t")
        kind = fields[0]
        try:
            if kind == "C":
                if len(fields) != 5:
                    raise FactsError("class record needs 5 fields")
                _, name, inherits, implements, variables = fields
                if not name:
                    raise FactsError("class record with empty ClassName")
                store.add_class(
                    ClassFact(
                        class_name=name,
                        inherits_from=inherits or None,
                        implements_to=_split_list(implements),
                        variables=_split_list(variables),
                    )
                )
            elif kind == "M":
                if len(fields) != 6:
                    raise FactsError("method record needs 6 fields")
                _, key, args, return_type, return_value, comment = fields
                class_name, method_name, signature = split_method_key(key)
                store.add_method(
                    MethodFact(
                        method_key=key,
                        class_name=class_name,
                        method_name=method_name,
                        signature=signature,
                        arguments=_split_list(args),
                        return_type=return_type,
                        return_value=return_value or None,
                        comment_terms=tuple(comment.split()),
                    )
                )
            else:
                raise FactsError(f"unknown record kind {kind!r}")
        except ValueError as exc:
            raise FactsError(f"{source}:{line_no}: {exc}") from None
        except FactsError as exc:
            raise FactsError(f"{source}:{line_no}: {exc}") from None
    store.validate()
    return store


def ingest_facts(path: str | Path) -> FactsStore:
    """Load and validate a facts file."""
    path = Path(path)
    return parse_facts(path.read_text(encoding="utf-8"), str(path))


def serialize_facts(store: FactsStore) -> str:
    """Canonical snapshot: classes then methods, each sorted by name."""
    lines = []
    for name in sorted(store.classes):
        c = store.classes[name]
        lines.append(
            "C\t%s\t%s\t%s\t%s"
            % (c.class_name, c.inherits_from or "", ",".join(c.implements_to), ",".join(c.variables))
        )
    for key in sorted(store.methods):
        m = store.methods[key]
        lines.append(
            "M\t%s\t%s\t%s\t%s\t%s"
            % (m.method_key, ",".join(m.arguments), m.return_type, m.return_value or "", " ".join(m.comment_terms))
        )
    return "\n".join(lines) + "\n"


def write_facts(store: FactsStore, path: str | Path) -> None:
    Path(path).write_text(serialize_facts(store), encoding="utf-8")
