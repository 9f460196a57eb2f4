"""
Morphism text format.

A file holds one or more blocks of the form::

    morphism fib on 0 1 {
      0 -> 0 1 ;
      1 -> 0 ;
    }

Letters are whitespace-free tokens, images are whitespace-separated letter
lists and ``eps`` denotes the empty image. An optional ``to <letters>`` clause
after the source letters declares the target alphabet; without it the target
is the source alphabet when every image letter belongs to it, and otherwise the
image letters in order of first appearance. ``#`` starts a comment. The
keywords ``morphism``, ``on``, ``to`` and ``eps`` are never letters.
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from morphic_toolkit.core.base import MorphismParseError
from morphic_toolkit.core.words import RESERVED_LABELS, Alphabet, Morphism

EMPTY_IMAGE = "eps"

_TOKEN_PATTERN = re.compile(r"#[^\n]*|\s+|->|[{};]|[^\s{};#]+")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    """Split morphism text into tokens carrying 1-based line and column numbers."""
    tokens: List[Token] = []
    line, line_start = 1, 0
    for match in _TOKEN_PATTERN.finditer(text):
        value = match.group()
        if not value.startswith("#") and not value.isspace():
            tokens.append(Token(value, line, match.start() - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = match.start() + value.rindex("\n") + 1
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.position = 0
        lines = text.splitlines() or [""]
        self.end = Token("<end of input>", len(lines), len(lines[-1]) + 1)

    def peek(self) -> Token:
        return self.tokens[self.position] if self.position < len(self.tokens) else self.end

    def at_end(self) -> bool:
        return self.position >= len(self.tokens)

    def advance(self) -> Token:
        token = self.peek()
        if self.at_end():
            raise MorphismParseError("unexpected end of input", token.line, token.column)
        self.position += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.advance()
        if token.text != text:
            raise MorphismParseError(
                f"expected {text!r}, found {token.text!r}", token.line, token.column
            )
        return token

    def letter(self) -> Token:
        token = self.advance()
        if token.text in RESERVED_LABELS or token.text in {"{", "}", ";"}:
            raise MorphismParseError(
                f"expected a letter, found {token.text!r}", token.line, token.column
            )
        return token

    def letters_until(self, stops: Sequence[str]) -> List[Token]:
        letters = []
        while self.peek().text not in stops:
            letters.append(self.letter())
        return letters

    def morphisms(self) -> Iterator[Morphism]:
        while not self.at_end():
            yield self.morphism()

    def morphism(self) -> Morphism:
        self.expect("morphism")
        name_token = self.advance()
        if name_token.text in {"{", "}", ";", "->"}:
            raise MorphismParseError(
                f"expected a morphism name, found {name_token.text!r}",
                name_token.line,
                name_token.column,
            )
        self.expect("on")
        source_tokens = self.letters_until(("to", "{"))
        if not source_tokens:
            token = self.peek()
            raise MorphismParseError("source alphabet is empty", token.line, token.column)
        source = self.alphabet(source_tokens)
        target: Optional[Alphabet] = None
        if self.peek().text == "to":
            self.advance()
            target_tokens = self.letters_until(("{",))
            if not target_tokens:
                token = self.peek()
                raise MorphismParseError("target alphabet is empty", token.line, token.column)
            target = self.alphabet(target_tokens)
        self.expect("{")

        rules: Dict[str, Tuple[Token, List[Token]]] = {}
        while self.peek().text != "}":
            head = self.letter()
            if head.text not in source:
                raise MorphismParseError(
                    f"letter {head.text!r} is not in the source alphabet", head.line, head.column
                )
            if head.text in rules:
                raise MorphismParseError(
                    f"second rule for letter {head.text!r}", head.line, head.column
                )
            self.expect("->")
            image: List[Token] = []
            if self.peek().text == EMPTY_IMAGE:
                self.advance()
            else:
                image = self.letters_until((";", "}"))
            self.expect(";")
            rules[head.text] = (head, image)
        closing = self.expect("}")

        missing = [a for a in source.letters if a not in rules]
        if missing:
            raise MorphismParseError(
                f"no rule for letters {' '.join(missing)}", closing.line, closing.column
            )
        if target is None:
            target = self.infer_target(source, [image for _, image in rules.values()])
        else:
            for _, image in rules.values():
                for token in image:
                    if token.text not in target:
                        raise MorphismParseError(
                            f"letter {token.text!r} is not in the target alphabet",
                            token.line,
                            token.column,
                        )
        label_rules = {a: [t.text for t in image] for a, (_, image) in rules.items()}
        return Morphism.from_labels(source, target, label_rules, name_token.text)

    @staticmethod
    def alphabet(tokens: List[Token]) -> Alphabet:
        seen = set()
        for token in tokens:
            if token.text in seen:
                raise MorphismParseError(
                    f"duplicate letter {token.text!r}", token.line, token.column
                )
            seen.add(token.text)
        return Alphabet(tuple(token.text for token in tokens))

    @staticmethod
    def infer_target(source: Alphabet, images: List[List[Token]]) -> Alphabet:
        used: List[str] = []
        for image in images:
            for token in image:
                if token.text not in used:
                    used.append(token.text)
        if all(letter in source for letter in used):
            return source
        return Alphabet(tuple(used))


def parse_morphisms(text: str) -> List[Morphism]:
    """
    Parse every morphism block of a document.

    Raises:
        MorphismParseError: With the line and column of the offending token
    """
    return list(_Parser(text).morphisms())


def parse_morphism(text: str) -> Morphism:
    """Parse a document holding exactly one morphism."""
    morphisms = parse_morphisms(text)
    if len(morphisms) != 1:
        raise MorphismParseError(f"expected exactly one morphism, found {len(morphisms)}", 1, 1)
    return morphisms[0]


def load_morphisms(path: Union[str, Path]) -> List[Morphism]:
    """Parse every morphism in a file."""
    return parse_morphisms(Path(path).read_text(encoding="utf-8"))


def _token_name(name: str) -> str:
    cleaned = re.sub(r"[\s{};#]+", "_", name)
    if not cleaned or cleaned in RESERVED_LABELS:
        return "m"
    return cleaned


def format_morphism(m: Morphism, name: Optional[str] = None) -> str:
    """Render a morphism in the text format; the result parses back to an equal morphism."""
    header = f"morphism {_token_name(name or m.name)} on {' '.join(m.source.letters)}"
    if m.target != m.source:
        header += f" to {' '.join(m.target.letters)}"
    lines = [header + " {"]
    for letter, image in m.rules():
        rendered = " ".join(image) if image else EMPTY_IMAGE
        lines.append(f"  {letter} -> {rendered} ;")
    lines.append("}")
    return "\n".join(lines)


def format_inline(m: Morphism) -> str:
    """One-line rendering such as ``0 -> 01, 1 -> 0``."""
    return ", ".join(
        f"{letter} -> {m.target.render(m.target.word(image)) if image else EMPTY_IMAGE}"
        for letter, image in m.rules()
    )
