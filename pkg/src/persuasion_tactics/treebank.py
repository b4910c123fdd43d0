"""Bracketed constituency trees and their lexicon-free parse strings.

A tree arrives as Penn-Treebank-style bracketed text, e.g.
``(NP (PRP$ their) (NN relationship))``.  For classification the tree is
reduced to a *parse string*: terminal words are removed, unary chains of
phrase labels are collapsed into ``+``-joined labels, and the remaining
structure is linearized into a flat sequence of structural tokens.

A parse string is a tuple of tokens.  An opening token is the label
prefixed with ``(`` (for example ``"(NP"``); the closing token is ``")"``.
Token sequences produced from trees are always balanced, but every
operation that consumes parse strings tolerates arbitrary token sequences,
because synthesized prototype strings need not nest correctly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

ParseString = tuple[str, ...]

CLOSE = ")"

_LEXEME = re.compile(r"\(|\)|[^\s()]+")
_BAD_LABEL = re.compile(r"[\s()]")


class MalformedTreeError(ValueError):
    """Bracketed input does not describe a single well-formed tree."""


class EmptyInputError(ValueError):
    """Bracketed input contains no tree at all."""


class NotStrippedError(ValueError):
    """Tree still carries terminal words where none are allowed."""


class UnbalancedError(ValueError):
    """Token sequence does not nest into a well-formed tree."""


@dataclass(frozen=True)
class RawTree:
    """A constituency tree node.

    ``word`` is only present on preterminals read from text; after
    stripping, former preterminals keep their label and have neither
    children nor a word.
    """

    label: str
    children: tuple["RawTree", ...] = ()
    word: Optional[str] = None

    def __post_init__(self):
        if not self.label or _BAD_LABEL.search(self.label):
            raise ValueError(f"invalid node label: {self.label!r}")
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        if self.children and self.word is not None:
            raise ValueError("a node may have children or a word, not both")


def open_token(label: str) -> str:
    return "(" + label


def is_open(token: str) -> bool:
    return token != CLOSE and token.startswith("(")


def token_label(token: str) -> str:
    return token[1:]


def parse_bracketed(text: str) -> RawTree:
    """Read a single bracketed tree.

    Raises EmptyInputError for blank input and MalformedTreeError for
    unbalanced parentheses, missing labels, or trailing content after the
    root constituent closes.
    """
    if text is None or not text.strip():
        raise EmptyInputError("no tree in input")

    root = None
    stack = []  # open frames: [label, children list, word]
    expecting_label = False
    for lexeme in _LEXEME.findall(text):
        if root is not None:
            raise MalformedTreeError("content after the root constituent closes")
        if lexeme == "(":
            if expecting_label:
                raise MalformedTreeError("missing label after '('")
            if stack and stack[-1][2] is not None:
                raise MalformedTreeError("constituent after a terminal word")
            stack.append([None, [], None])
            expecting_label = True
        elif lexeme == CLOSE:
            if expecting_label:
                raise MalformedTreeError("missing label after '('")
            if not stack:
                raise MalformedTreeError("unmatched ')'")
            label, children, word = stack.pop()
            node = RawTree(label, tuple(children), word)
            if stack:
                stack[-1][1].append(node)
            else:
                root = node
        elif expecting_label:
            stack[-1][0] = lexeme
            expecting_label = False
        else:
            if not stack:
                raise MalformedTreeError(f"word {lexeme!r} outside any constituent")
            frame = stack[-1]
            if frame[1]:
                raise MalformedTreeError("terminal word after child constituents")
            if frame[2] is not None:
                raise MalformedTreeError("more than one terminal word under a label")
            frame[2] = lexeme
    if root is None:
        raise MalformedTreeError("unbalanced parentheses: tree never closes")
    return root


def tree_to_text(tree: RawTree) -> str:
    """Bracketed text for a tree, words included."""
    if tree.word is not None:
        return f"({tree.label} {tree.word})"
    if not tree.children:
        return f"({tree.label})"
    inner = " ".join(tree_to_text(c) for c in tree.children)
    return f"({tree.label} {inner})"


def strip_terminals(tree: RawTree) -> RawTree:
    """Drop every terminal word, keeping POS-tag nodes as bare leaves."""
    return RawTree(tree.label, tuple(strip_terminals(c) for c in tree.children))


def collapse_unary_chains(tree: RawTree) -> RawTree:
    """Merge unary chains into single ``+``-joined labels.

    A chain extends from a node through single children that themselves
    have children; the merged node keeps the bottom node's children.
    Preterminal leaves never join a chain, so ``(NP (NN))`` is preserved
    while ``(NP (SBAR (S ...)))`` becomes ``(NP+SBAR+S ...)``.
    """
    labels = [tree.label]
    node = tree
    while len(node.children) == 1 and node.children[0].children:
        node = node.children[0]
        labels.append(node.label)
    children = tuple(collapse_unary_chains(c) for c in node.children)
    return RawTree("+".join(labels), children, node.word)


def linearize(tree: Optional[RawTree]) -> ParseString:
    """Depth-first token sequence: an opening token per node entry, a
    closing token per exit.  The tree must already be stripped."""
    if tree is None:
        return ()
    tokens = []
    stack = [tree]
    while stack:
        item = stack.pop()
        if item is CLOSE:
            tokens.append(CLOSE)
            continue
        if item.word is not None:
            raise NotStrippedError(
                f"node ({item.label} {item.word}) still carries a word"
            )
        tokens.append(open_token(item.label))
        stack.append(CLOSE)
        stack.extend(reversed(item.children))
    return tuple(tokens)


def is_balanced(tokens: Iterable[str]) -> bool:
    depth = 0
    for token in tokens:
        if token == CLOSE:
            depth -= 1
            if depth < 0:
                return False
        else:
            depth += 1
    return depth == 0


def tokens_to_text(tokens: Iterable[str]) -> str:
    """Join tokens into canonical text without requiring balance.

    For balanced sequences this coincides with `render`; unbalanced
    synthetic prototypes serialize through the same spacing rules.
    """
    parts = []
    for token in tokens:
        if token == CLOSE:
            parts.append(CLOSE)
        elif parts:
            parts.append(" " + token)
        else:
            parts.append(token)
    return "".join(parts)


def render(tokens: ParseString) -> str:
    """Canonical text for a balanced parse string.

    Rendering a linearized stripped tree and reparsing it reproduces the
    tree exactly.  Raises UnbalancedError otherwise.
    """
    tokens = tuple(tokens)
    for token in tokens:
        if token != CLOSE and not is_open(token):
            raise UnbalancedError(f"not a structural token: {token!r}")
    if not is_balanced(tokens):
        raise UnbalancedError("token sequence is not balanced")
    return tokens_to_text(tokens)


def text_to_tokens(text: str) -> ParseString:
    """Read a parse string back from its textual form.

    Accepts unbalanced sequences; rejects stray words, which would make
    the string lexicon-dependent.
    """
    tokens = []
    expecting_label = False
    for lexeme in _LEXEME.findall(text):
        if lexeme == "(":
            if expecting_label:
                raise MalformedTreeError("missing label after '('")
            expecting_label = True
        elif lexeme == CLOSE:
            if expecting_label:
                raise MalformedTreeError("missing label after '('")
            tokens.append(CLOSE)
        elif expecting_label:
            tokens.append(open_token(lexeme))
            expecting_label = False
        else:
            raise MalformedTreeError(f"unexpected word in parse string: {lexeme!r}")
    if expecting_label:
        raise MalformedTreeError("missing label after '('")
    return tuple(tokens)


def to_parse_string(tree: RawTree) -> ParseString:
    """Full pipeline for one tree: strip, collapse, linearize."""
    return linearize(collapse_unary_chains(strip_terminals(tree)))


def argument_parse_string(tree_texts: Iterable[str]) -> ParseString:
    """Parse string for a whole argument.

    Arguments may span several sentences; each sentence arrives as its own
    bracketed tree and the per-tree parse strings are concatenated in
    order.
    """
    tokens = []
    for text in tree_texts:
        tokens.extend(to_parse_string(parse_bracketed(text)))
    return tuple(tokens)
