"""Parser and printer for the textual HKB format.

A knowledge base is one UTF-8 file with two optional sections::

    % comments run to end of line
    #program.
    safe(t) :- not sc(t, s(s(0))).
    sc(X, 0) :- virus(X).
    virus(t).

    #ontology.
    exists mutation. top subClassOf mutated.
    t : exists mutation. top.
    (a, b) : edge.

Statements before the first section directive are accepted as program
rules or, failing that, as ontology axioms, so small one-statement inputs
need no directives.  Inside an explicit section only that section's
statements are allowed.

Concept grammar: ``top | bot | name | not C | C and C | C or C |
exists r. C | forall r. C`` with parentheses; ``not`` binds tightest,
``and`` binds over ``or``, and a quantifier takes the longest concept to
its right.  The words ``top bot not and or exists forall subClassOf``
are reserved inside the ontology section.

Parsing never mutates shared state; errors raise :class:`ParseError`
carrying diagnostics whose spans point into the input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, Severity, SourceSpan
from .errors import ArityError, KBError, ParseError
from .model import (
    And,
    Atom,
    AtomicConcept,
    Axiom,
    Bottom,
    Concept,
    ConceptAssertion,
    Exists,
    Forall,
    HybridKB,
    Not,
    Or,
    RoleAssertion,
    Rule,
    SubClassOf,
    Term,
    Top,
)

_CONCEPT_KEYWORDS = frozenset(
    {"top", "bot", "not", "and", "or", "exists", "forall", "subClassOf"}
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<directive>\#[A-Za-z_][A-Za-z0-9_]*)
  | (?P<implies>:-)
  | (?P<colon>:)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<dot>\.)
  | (?P<name>[a-z0-9][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str, filename: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(filename, line, pos - line_start + 1, pos - line_start + 2)
            raise ParseError(
                [
                    Diagnostic(
                        Severity.ERROR,
                        "syntax-error",
                        f"unexpected character {text[pos]!r}",
                        span,
                    )
                ]
            )
        kind = m.lastgroup
        assert kind is not None
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            span = SourceSpan(
                filename, line, m.start() - line_start + 1, m.end() - line_start + 1
            )
            tokens.append(_Token(kind, lexeme, span))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + lexeme.rindex("\n") + 1
        pos = m.end()
    eof_span = SourceSpan(filename, line, len(text) - line_start + 1, len(text) - line_start + 1)
    tokens.append(_Token("eof", "", eof_span))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ------------------------------------------------

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.current
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.current
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> _Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, what: str) -> _Token:
        if self.at(kind):
            return self.advance()
        raise self.error(f"expected {what}, found {self._describe(self.current)}")

    def error(self, message: str) -> ParseError:
        return ParseError(
            [Diagnostic(Severity.ERROR, "syntax-error", message, self.current.span)]
        )

    @staticmethod
    def _describe(tok: _Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    # -- program section -------------------------------------------------

    def parse_term(self) -> Term:
        if self.at("var"):
            return Term(self.advance().text)
        name = self.expect("name", "a term").text
        if self.accept("lparen"):
            args = [self.parse_term()]
            while self.accept("comma"):
                args.append(self.parse_term())
            self.expect("rparen", "')'")
            return Term(name, tuple(args))
        return Term(name)

    def parse_atom(self) -> Atom:
        name = self.expect("name", "a predicate name").text
        if self.accept("lparen"):
            args = [self.parse_term()]
            while self.accept("comma"):
                args.append(self.parse_term())
            self.expect("rparen", "')'")
            return Atom(name, tuple(args))
        return Atom(name)

    def parse_rule(self) -> Rule:
        start = self.current.span
        head = self.parse_atom()
        positive: list[Atom] = []
        negative: list[Atom] = []
        if self.accept("implies"):
            while True:
                if self.accept("name", "not"):
                    negative.append(self.parse_atom())
                else:
                    positive.append(self.parse_atom())
                if not self.accept("comma"):
                    break
        end = self.expect("dot", "'.'").span
        span = SourceSpan(start.file, start.line, start.col_start, end.col_end)
        return Rule(head, tuple(positive), tuple(negative), span=span)

    # -- ontology section --------------------------------------------------

    def parse_concept(self) -> Concept:
        return self._parse_or()

    def _parse_or(self) -> Concept:
        left = self._parse_and()
        while self.at("name", "or"):
            self.advance()
            left = Or(left, self._parse_and())
        return left

    def _parse_and(self) -> Concept:
        left = self._parse_unary()
        while self.at("name", "and"):
            self.advance()
            left = And(left, self._parse_unary())
        return left

    def _parse_unary(self) -> Concept:
        if self.accept("name", "not"):
            return Not(self._parse_unary())
        if self.at("name", "exists") or self.at("name", "forall"):
            ctor = Exists if self.advance().text == "exists" else Forall
            role = self.expect("name", "a role name").text
            self._check_ontology_name(role)
            self.expect("dot", "'.' after the role of a quantifier")
            return ctor(role, self.parse_concept())
        if self.accept("name", "top"):
            return Top()
        if self.accept("name", "bot"):
            return Bottom()
        if self.accept("lparen"):
            inner = self.parse_concept()
            self.expect("rparen", "')'")
            return inner
        tok = self.expect("name", "a concept")
        self._check_ontology_name(tok.text, tok.span)
        return AtomicConcept(tok.text)

    def _check_ontology_name(self, name: str, span: SourceSpan | None = None) -> None:
        if name in _CONCEPT_KEYWORDS:
            raise ParseError(
                [
                    Diagnostic(
                        Severity.ERROR,
                        "syntax-error",
                        f"{name!r} is reserved in the ontology section",
                        span or self.current.span,
                    )
                ]
            )

    def parse_axiom(self) -> Axiom:
        # Role assertion "(a, b) : r." needs backtracking because "(C)"
        # is also a valid start of a concept inclusion.
        if self.at("lparen"):
            mark = self.pos
            axiom = self._try_role_assertion()
            if axiom is not None:
                return axiom
            self.pos = mark
        mark = self.pos
        if self.at("name") or self.at("var"):
            try:
                individual = self.parse_term()
                if self.at("colon"):
                    self.advance()
                    concept = self.parse_concept()
                    self.expect("dot", "'.'")
                    if not individual.is_ground:
                        raise self.error(
                            f"assertion individual {individual} must be ground"
                        )
                    return ConceptAssertion(individual, concept)
            except ParseError:
                pass
            self.pos = mark
        sub = self.parse_concept()
        if not self.accept("name", "subClassOf"):
            raise self.error("expected 'subClassOf' in a concept inclusion")
        sup = self.parse_concept()
        self.expect("dot", "'.'")
        return SubClassOf(sub, sup)

    def _try_role_assertion(self) -> RoleAssertion | None:
        try:
            self.expect("lparen", "'('")
            subject = self.parse_term()
            self.expect("comma", "','")
            target = self.parse_term()
            self.expect("rparen", "')'")
            if not self.at("colon"):
                return None
            self.advance()
            role = self.expect("name", "a role name").text
            self._check_ontology_name(role)
            self.expect("dot", "'.'")
        except ParseError:
            return None
        if not (subject.is_ground and target.is_ground):
            raise self.error("role assertion individuals must be ground")
        return RoleAssertion(subject, target, role)

    # -- whole file ---------------------------------------------------------

    def parse_kb_body(self) -> tuple[list[Axiom], list[Rule]]:
        axioms: list[Axiom] = []
        rules: list[Rule] = []
        section = "free"
        while not self.at("eof"):
            directive = self.accept("directive")
            if directive is not None:
                name = directive.text
                if name == "#program":
                    section = "program"
                elif name == "#ontology":
                    section = "ontology"
                else:
                    raise ParseError(
                        [
                            Diagnostic(
                                Severity.ERROR,
                                "unknown-directive",
                                f"unknown directive {name!r}",
                                directive.span,
                            )
                        ]
                    )
                self.expect("dot", "'.' after the section directive")
                continue
            if section == "program":
                rules.append(self.parse_rule())
            elif section == "ontology":
                axioms.append(self.parse_axiom())
            else:
                rules_mark = self.pos
                try:
                    rules.append(self.parse_rule())
                    continue
                except ParseError as rule_err:
                    rule_progress = self.pos
                    self.pos = rules_mark
                    try:
                        axioms.append(self.parse_axiom())
                        continue
                    except ParseError as axiom_err:
                        # Report whichever interpretation got further.
                        if self.pos >= rule_progress:
                            raise axiom_err
                        raise rule_err
        return axioms, rules


def parse_kb(text: str, filename: str = "<kb>") -> HybridKB:
    """Parse one HKB document into a validated :class:`HybridKB`.

    Raises :class:`ParseError` whose diagnostics carry spans for syntax
    errors, unknown directives, and signature violations (a predicate or
    function symbol used with two arities, or a predicate colliding with
    an ontology concept or role at the wrong arity).
    """
    tokens = _tokenize(text, filename)
    parser = _Parser(tokens)
    axioms, rules = parser.parse_kb_body()
    try:
        return HybridKB(tuple(axioms), tuple(rules))
    except (ArityError, KBError) as exc:
        code = "arity-clash" if isinstance(exc, ArityError) else "signature-error"
        raise ParseError(
            [Diagnostic(Severity.ERROR, code, str(exc), None)]
        ) from exc


def load_kb(path: str) -> HybridKB:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_kb(handle.read(), filename=path)


def parse_ground_atom(text: str) -> Atom:
    """Parse a single ground atom, e.g. a CLI query argument."""
    parser = _Parser(_tokenize(text, "<atom>"))
    atom = parser.parse_atom()
    if not parser.at("eof"):
        parser.accept("dot")
    if not parser.at("eof"):
        raise parser.error("trailing input after the atom")
    if not atom.is_ground:
        raise ParseError(
            [
                Diagnostic(
                    Severity.ERROR,
                    "syntax-error",
                    f"atom {atom} is not ground",
                    None,
                )
            ]
        )
    return atom


# ---------------------------------------------------------------------------
# DL-safety
# ---------------------------------------------------------------------------


def validate_dl_safety(kb: HybridKB) -> list[Diagnostic]:
    """One warning per rule whose variables escape every positive non-DL atom.

    A rule is DL-safe when each of its variables occurs in at least one
    positive body atom with a non-DL predicate.  Violations are warnings,
    not errors: unsafe rules still ground over the bounded universe.
    """
    warnings: list[Diagnostic] = []
    for rule in kb.program:
        covered: set[str] = set()
        for atom in rule.positive_body:
            if not kb.is_dl_atom(atom):
                covered.update(atom.variables())
        offending = [v for v in rule.variables() if v not in covered]
        if offending:
            warnings.append(
                Diagnostic(
                    Severity.WARNING,
                    "dl-safety",
                    f"rule '{rule}' is not DL-safe: variable(s) "
                    f"{', '.join(offending)} do not occur in a positive "
                    "non-DL body atom",
                    rule.span,
                )
            )
    return warnings


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def kb_to_text(kb: HybridKB) -> str:
    """Render a KB in the file format; reparsing yields an equal KB."""
    lines: list[str] = []
    if kb.program:
        lines.append("#program.")
        lines.extend(str(rule) for rule in kb.program)
    if kb.ontology:
        if lines:
            lines.append("")
        lines.append("#ontology.")
        lines.extend(str(axiom) for axiom in kb.ontology)
    return "\n".join(lines) + ("\n" if lines else "")
