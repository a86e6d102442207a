"""S-expression reader with source spans and error recovery.

Recovery rule: an opening parenthesis in column 1 always starts a new
top-level form.  If lists are still open at that point they are closed and a
diagnostic is recorded, so one missing ``)`` costs one form, not the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    span: Optional[Span]
    message: str
    hint: Optional[str] = None
    source: Optional[str] = None

    def __str__(self) -> str:
        loc = f"{self.source or '<input>'}:{self.span}" if self.span else (self.source or "<input>")
        text = f"{loc}: {self.severity}: {self.message}"
        if self.hint:
            text += f" (hint: {self.hint})"
        return text

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "line": self.span.line if self.span else None,
            "column": self.span.col if self.span else None,
            "message": self.message,
            "hint": self.hint,
        }


@dataclass(frozen=True)
class Sym:
    name: str
    span: Span = field(compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Str:
    value: str
    span: Span = field(compare=False)


@dataclass(frozen=True)
class SList:
    items: tuple
    span: Span = field(compare=False)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def head(self) -> Optional[str]:
        if self.items and isinstance(self.items[0], Sym):
            return self.items[0].name
        return None


SExpr = Union[Sym, Str, SList]

_DELIMS = set("()\";")


def read(text: str, source: Optional[str] = None) -> tuple:
    """Parse ``text`` into top-level forms; returns ``(forms, diagnostics)``."""
    forms: list = []
    diags: list = []
    stack: list = []  # (items, start_line, start_col)
    i = 0
    line, col = 1, 1
    n = len(text)

    def emit(node):
        if stack:
            stack[-1][0].append(node)
        else:
            forms.append(node)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line, col = line + 1, 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            if col == 1 and stack:
                opened = stack[0]
                diags.append(Diagnostic(
                    "error", Span(opened[1], opened[2], line, col),
                    f"form opened at {opened[1]}:{opened[2]} is missing {len(stack)} closing parenthes{'is' if len(stack) == 1 else 'es'}",
                    source=source,
                ))
                while stack:
                    items, sl, sc = stack.pop()
                    emit(SList(tuple(items), Span(sl, sc, line, col)))
            stack.append(([], line, col))
            i += 1
            col += 1
            continue
        if ch == ")":
            if not stack:
                diags.append(Diagnostic("error", Span(line, col, line, col + 1), "unexpected ')'", source=source))
            else:
                items, sl, sc = stack.pop()
                emit(SList(tuple(items), Span(sl, sc, line, col + 1)))
            i += 1
            col += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    buf.append({"n": "\n", "t": "\t"}.get(text[j + 1], text[j + 1]))
                    j += 2
                    continue
                buf.append(text[j])
                j += 1
            if j >= n:
                diags.append(Diagnostic("error", Span(start_line, start_col, line, col), "unterminated string", source=source))
            raw = text[i:j + 1]
            for c in raw:
                if c == "\n":
                    line, col = line + 1, 1
                else:
                    col += 1
            i = j + 1
            emit(Str("".join(buf), Span(start_line, start_col, line, col)))
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _DELIMS:
            j += 1
        emit(Sym(text[i:j], Span(line, col, line, col + (j - i))))
        col += j - i
        i = j
    if stack:
        opened = stack[0]
        diags.append(Diagnostic(
            "error", Span(opened[1], opened[2], line, col),
            f"form opened at {opened[1]}:{opened[2]} is not closed at end of input",
            source=source,
        ))
        while stack:
            items, sl, sc = stack.pop()
            emit(SList(tuple(items), Span(sl, sc, line, col)))
    return forms, diags


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def write(e, indent: int = 0, width: int = 100) -> str:
    """Pretty-print an s-expression; nested lists break when too wide."""
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, str):
        return e
    if isinstance(e, Str):
        return _quote(e.value)
    if isinstance(e, SList):
        items = e.items
    else:
        items = tuple(e)
    flat = "(" + " ".join(write(x, 0, 10**9) for x in items) + ")"
    if len(flat) + indent <= width or len(items) <= 1:
        return flat
    head = write(items[0], indent + 1, width)
    pad = " " * (indent + 2)
    rest = [pad + write(x, indent + 2, width) for x in items[1:]]
    return "(" + head + "\n" + "\n".join(rest) + ")"


def sym(name: str) -> Sym:
    return Sym(name, Span(0, 0, 0, 0))


def lst(*items) -> SList:
    return SList(tuple(sym(x) if isinstance(x, str) else x for x in items), Span(0, 0, 0, 0))


def string(value: str) -> Str:
    return Str(value, Span(0, 0, 0, 0))
