"""Textual notation for authoring assurance cases (``.elens`` files).

Block-structured, keyword-led, UTF-8; ``#`` comments run to end of line and
CRLF line endings are normalized to LF. One file holds one case:

    case transparency "Transparency assurance"

    principle transparency "Transparency" {
      segment explainability "Explainability" {
        loss L6 "Loss of the ability to provide an explanation ..."
        hazard H7 links [L6] "Explanations on the model or outputs are wrong"
        control_action A "Explain model/outputs"
        uaia UAIA101 links [H7] action A provided "The AI system provides ..."
        constraint EC101 links [UAIA101] "The AI system must not ..."
        recommendation DR101.1 links [EC101] "System should require ..."
        requirement R101.1 links [DR101.1] verify demonstration "System should ..."
      }
    }

    checklist {
      question Q1 in transparency/explainability stage Deployment
        desideratum Complete type extended links [R101.1] "Describe ..."
    }

    goalgraph {
      goal m_h7 mitigates H7 "Wrong-explanation hazard mitigated"
      task v1 binds R101.1 "Explanations displayed"
      and m_h7 [v1]
    }

Parsing is deterministic; the canonical serializer sorts elements by kind
then id inside each segment, indents with 2 spaces, and ends the file with
exactly one newline, so serialize(parse(s)) is a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .checklist import Question, QuestionType, register_question
from .errors import ElensError
from .goals import (
    CONTRIBUTION_WEIGHTS,
    DECOMPOSITION_KINDS,
    DEPENDENCY,
    GoalNode,
)
from .model import (
    AssuranceCase,
    CaseElement,
    ElementKind,
    LinkKind,
    TraceLink,
    UaiaMode,
    VerificationMethod,
)
from .vocab import DESIDERATA, LIFECYCLE_STAGES, METRIC_NAMES, StakeholderRole


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class SourceSpan:
    line: int  # 1-based
    column: int  # 1-based
    length: int = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    span: SourceSpan
    message: str
    code: str

    def render(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.severity.value.lower()}: {self.message} [{self.code}]"


class CaseSyntaxError(ElensError):
    """Raised by :func:`parse_case` when the source has error diagnostics."""

    code = "parse-failed"

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        errors = [d for d in diagnostics if d.severity is Severity.ERROR]
        first = errors[0] if errors else diagnostics[0]
        super().__init__(f"{len(errors)} parse error(s); first: {first.render()}")
        self.diagnostics = diagnostics


# ---------------------------------------------------------------------------
# Lexer

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789.")

_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
    "/": "SLASH",
}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT INT STRING LBRACE RBRACE LBRACKET RBRACKET COMMA SLASH ARROW EOF
    value: str
    line: int
    column: int
    length: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, self.length)


class _Lexer:
    def __init__(self, source: str):
        self.source = source.replace("\r\n", "\n").replace("\r", "\n")
        self.pos = 0
        self.line = 1
        self.column = 1
        self.diagnostics: list[ParseDiagnostic] = []

    def _error(self, message: str, line: int, column: int, length: int = 1) -> None:
        self.diagnostics.append(
            ParseDiagnostic(Severity.ERROR, SourceSpan(line, column, length), message, "syntax")
        )

    def _advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        src = self.source
        while self.pos < len(src):
            ch = src[self.pos]
            if ch in " \t\n":
                self._advance()
                continue
            if ch == "#":
                while self.pos < len(src) and src[self.pos] != "\n":
                    self._advance()
                continue
            line, column = self.line, self.column
            if ch in _PUNCT:
                self._advance()
                out.append(Token(_PUNCT[ch], ch, line, column, 1))
                continue
            if ch == "-" and self.pos + 1 < len(src) and src[self.pos + 1] == ">":
                self._advance()
                self._advance()
                out.append(Token("ARROW", "->", line, column, 2))
                continue
            if ch == "-" or ch.isdigit():
                text = self._advance()
                while self.pos < len(src) and src[self.pos].isdigit():
                    text += self._advance()
                if text == "-":
                    self._error("stray '-'", line, column)
                    continue
                out.append(Token("INT", text, line, column, len(text)))
                continue
            if ch in _IDENT_START:
                text = self._advance()
                while self.pos < len(src) and src[self.pos] in _IDENT_CONT:
                    text += self._advance()
                out.append(Token("IDENT", text, line, column, len(text)))
                continue
            if ch == '"':
                out.append(self._string(line, column))
                continue
            self._error(f"unexpected character {ch!r}", line, column)
            self._advance()
        out.append(Token("EOF", "", self.line, self.column, 1))
        return out

    def _string(self, line: int, column: int) -> Token:
        raw_len = 1
        self._advance()  # opening quote
        parts: list[str] = []
        while self.pos < len(self.source):
            ch = self._advance()
            raw_len += 1
            if ch == '"':
                return Token("STRING", "".join(parts), line, column, raw_len)
            if ch == "\n":
                self._error("unterminated string", line, column, raw_len)
                return Token("STRING", "".join(parts), line, column, raw_len)
            if ch == "\\":
                if self.pos >= len(self.source):
                    break
                esc = self._advance()
                raw_len += 1
                parts.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
            else:
                parts.append(ch)
        self._error("unterminated string", line, column, raw_len)
        return Token("STRING", "".join(parts), line, column, raw_len)


# ---------------------------------------------------------------------------
# Parser

_ELEMENT_KEYWORDS = {k.value: k for k in ElementKind}
_NODE_KEYWORDS = ("goal", "softgoal", "task", "resource", "belief")
_RECOVERY = (
    set(_ELEMENT_KEYWORDS)
    | set(_NODE_KEYWORDS)
    | {"case", "principle", "segment", "checklist", "goalgraph", "question", "and", "or", "contrib", "dep"}
)

# (source kind, target kind) -> link kind, for `links [...]` clauses
_LINK_BY_KINDS = {
    (ElementKind.HAZARD, ElementKind.LOSS): LinkKind.HAZARD_OF_LOSS,
    (ElementKind.UAIA, ElementKind.HAZARD): LinkKind.UAIA_OF_HAZARD,
    (ElementKind.CAUSAL_SCENARIO, ElementKind.UAIA): LinkKind.SCENARIO_OF_UAIA,
    (ElementKind.CONSTRAINT, ElementKind.HAZARD): LinkKind.CONSTRAINT_OF_HAZARD,
    (ElementKind.CONSTRAINT, ElementKind.UAIA): LinkKind.CONSTRAINT_OF_UAIA,
    (ElementKind.DESIGN_RECOMMENDATION, ElementKind.CONSTRAINT): LinkKind.RECOMMENDATION_OF_CONSTRAINT,
    (ElementKind.REQUIREMENT, ElementKind.DESIGN_RECOMMENDATION): LinkKind.REQUIREMENT_OF_RECOMMENDATION,
    (ElementKind.EVIDENCE, ElementKind.REQUIREMENT): LinkKind.EVIDENCE_OF_REQUIREMENT,
}


class _SyntaxFailure(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


@dataclass
class _ElementDecl:
    kind: ElementKind
    id: str
    span: SourceSpan
    links: list[tuple[str, SourceSpan]] = field(default_factory=list)
    verify: str | None = None
    stage: str | None = None
    action: tuple[str, str, SourceSpan] | None = None  # (action id, mode, span)
    description: str = ""


@dataclass
class _QuestionDecl:
    id: str
    span: SourceSpan
    principle: str
    segment: str
    pseg_span: SourceSpan
    stage: str
    desideratum: str
    kind: str
    options: tuple[str, ...]
    metric: str | None
    links: list[tuple[str, SourceSpan]]
    text: str


@dataclass
class _NodeDecl:
    kind: str
    id: str
    span: SourceSpan
    actor: str | None = None
    mitigates: tuple[str, SourceSpan] | None = None
    binds: tuple[str, SourceSpan] | None = None
    sat: int | None = None
    label: str = ""


@dataclass
class _GoalLinkDecl:
    kind: str  # and | or | contribution kind | dependency
    parent_or_target: str
    children_or_source: list[str]
    span: SourceSpan


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[ParseDiagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics
        self.header: tuple[str, str, SourceSpan] | None = None
        self.principles: list[tuple[str, str, SourceSpan, list]] = []
        self.questions: list[_QuestionDecl] = []
        self.nodes: list[_NodeDecl] = []
        self.goal_links: list[_GoalLinkDecl] = []

    # -- token helpers ------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "EOF":
            self.pos += 1
        return token

    def expect(self, kind: str, what: str) -> Token:
        token = self.peek()
        if token.kind != kind:
            raise _SyntaxFailure(f"expected {what}, got {token.value or token.kind!r}", token.span)
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        token = self.peek()
        if token.kind != "IDENT" or token.value != word:
            raise _SyntaxFailure(f"expected '{word}', got {token.value or token.kind!r}", token.span)
        return self.advance()

    def at_keyword(self, *words: str) -> bool:
        token = self.peek()
        return token.kind == "IDENT" and token.value in words

    def error(self, message: str, span: SourceSpan, code: str = "syntax") -> None:
        self.diagnostics.append(ParseDiagnostic(Severity.ERROR, span, message, code))

    def recover(self) -> None:
        """Skip ahead to the next plausible statement start."""
        start_line = self.peek().line
        while True:
            token = self.peek()
            if token.kind == "EOF":
                return
            if token.kind == "RBRACE":
                return
            if token.kind == "IDENT" and token.value in _RECOVERY and token.line > start_line:
                return
            self.advance()

    # -- grammar ---------------------------------------------------------

    def parse(self) -> None:
        while self.peek().kind != "EOF":
            token = self.peek()
            before = self.pos
            try:
                if self.at_keyword("case"):
                    self.parse_header()
                elif self.at_keyword("principle"):
                    self.parse_principle()
                elif self.at_keyword("checklist"):
                    self.parse_checklist()
                elif self.at_keyword("goalgraph"):
                    self.parse_goalgraph()
                else:
                    raise _SyntaxFailure(
                        f"expected 'case', 'principle', 'checklist' or 'goalgraph', "
                        f"got {token.value or token.kind!r}",
                        token.span,
                    )
            except _SyntaxFailure as failure:
                self.error(failure.message, failure.span)
                self.recover()
                if self.pos == before:  # e.g. a stray '}': never stall
                    self.advance()

    def parse_header(self) -> None:
        keyword = self.expect_keyword("case")
        ident = self.expect("IDENT", "case id")
        title = ""
        if self.peek().kind == "STRING":
            title = self.advance().value
        if self.header is not None:
            self.error("duplicate 'case' header", keyword.span, "duplicate-id")
            return
        self.header = (ident.value, title, ident.span)

    def parse_principle(self) -> None:
        self.expect_keyword("principle")
        ident = self.expect("IDENT", "principle id")
        title = self.advance().value if self.peek().kind == "STRING" else ""
        self.expect("LBRACE", "'{'")
        segments: list = []
        while not self.peek().kind == "RBRACE":
            if self.peek().kind == "EOF":
                raise _SyntaxFailure("unclosed principle block", ident.span)
            try:
                segments.append(self.parse_segment())
            except _SyntaxFailure as failure:
                self.error(failure.message, failure.span)
                self.recover()
                if self.peek().kind == "RBRACE":
                    break
        self.expect("RBRACE", "'}'")
        self.principles.append((ident.value, title, ident.span, segments))

    def parse_segment(self):
        self.expect_keyword("segment")
        ident = self.expect("IDENT", "segment id")
        title = self.advance().value if self.peek().kind == "STRING" else ""
        self.expect("LBRACE", "'{'")
        elements: list[_ElementDecl] = []
        while self.peek().kind != "RBRACE":
            if self.peek().kind == "EOF":
                raise _SyntaxFailure("unclosed segment block", ident.span)
            try:
                elements.append(self.parse_element())
            except _SyntaxFailure as failure:
                self.error(failure.message, failure.span)
                self.recover()
                if self.peek().kind == "RBRACE":
                    break
        self.expect("RBRACE", "'}'")
        return (ident.value, title, ident.span, elements)

    def parse_element(self) -> _ElementDecl:
        token = self.peek()
        if token.kind != "IDENT" or token.value not in _ELEMENT_KEYWORDS:
            raise _SyntaxFailure(
                f"expected an element keyword, got {token.value or token.kind!r}", token.span
            )
        self.advance()
        ident = self.expect("IDENT", "element id")
        decl = _ElementDecl(kind=_ELEMENT_KEYWORDS[token.value], id=ident.value, span=ident.span)
        while True:
            if self.at_keyword("links"):
                self.advance()
                decl.links = self.parse_id_list()
            elif self.at_keyword("verify"):
                self.advance()
                value = self.expect("IDENT", "verification method")
                if value.value not in {m.value for m in VerificationMethod}:
                    raise _SyntaxFailure(f"unknown verification method {value.value!r}", value.span)
                decl.verify = value.value
            elif self.at_keyword("stage"):
                self.advance()
                value = self.expect("IDENT", "lifecycle stage")
                if value.value not in LIFECYCLE_STAGES:
                    raise _SyntaxFailure(f"unknown lifecycle stage {value.value!r}", value.span)
                decl.stage = value.value
            elif self.at_keyword("action"):
                self.advance()
                action = self.expect("IDENT", "control action id")
                mode = self.expect("IDENT", "'provided' or 'not_provided'")
                if mode.value not in {m.value for m in UaiaMode}:
                    raise _SyntaxFailure(
                        f"expected 'provided' or 'not_provided', got {mode.value!r}", mode.span
                    )
                decl.action = (action.value, mode.value, action.span)
            elif self.peek().kind == "STRING":
                decl.description = self.advance().value
                return decl
            else:
                token = self.peek()
                raise _SyntaxFailure(
                    f"expected a clause or description string, got {token.value or token.kind!r}",
                    token.span,
                )

    def parse_id_list(self) -> list[tuple[str, SourceSpan]]:
        self.expect("LBRACKET", "'['")
        ids: list[tuple[str, SourceSpan]] = []
        while True:
            token = self.expect("IDENT", "id")
            ids.append((token.value, token.span))
            if self.peek().kind == "COMMA":
                self.advance()
                continue
            break
        self.expect("RBRACKET", "']'")
        return ids

    def parse_checklist(self) -> None:
        self.expect_keyword("checklist")
        self.expect("LBRACE", "'{'")
        while self.peek().kind != "RBRACE":
            if self.peek().kind == "EOF":
                raise _SyntaxFailure("unclosed checklist block", self.peek().span)
            try:
                self.questions.append(self.parse_question())
            except _SyntaxFailure as failure:
                self.error(failure.message, failure.span)
                self.recover()
                if self.peek().kind == "RBRACE":
                    break
        self.expect("RBRACE", "'}'")

    def parse_question(self) -> _QuestionDecl:
        self.expect_keyword("question")
        ident = self.expect("IDENT", "question id")
        self.expect_keyword("in")
        principle = self.expect("IDENT", "principle id")
        self.expect("SLASH", "'/'")
        segment = self.expect("IDENT", "segment id")
        self.expect_keyword("stage")
        stage = self.expect("IDENT", "lifecycle stage")
        if stage.value not in LIFECYCLE_STAGES:
            raise _SyntaxFailure(f"unknown lifecycle stage {stage.value!r}", stage.span)
        desideratum = "Relevant"
        if self.at_keyword("desideratum"):
            self.advance()
            value = self.expect("IDENT", "desideratum")
            if value.value not in DESIDERATA:
                raise _SyntaxFailure(f"unknown desideratum {value.value!r}", value.span)
            desideratum = value.value
        self.expect_keyword("type")
        kind_token = self.expect("IDENT", "question type")
        options: tuple[str, ...] = ()
        metric: str | None = None
        if kind_token.value == "extended":
            kind = "extended"
        elif kind_token.value == "choice":
            kind = "choice"
            self.expect("LBRACKET", "'['")
            opts = []
            while True:
                opts.append(self.expect("STRING", "option text").value)
                if self.peek().kind == "COMMA":
                    self.advance()
                    continue
                break
            self.expect("RBRACKET", "']'")
            options = tuple(opts)
        elif kind_token.value == "metric":
            kind = "metric"
            name = self.expect("IDENT", "metric name")
            if name.value not in METRIC_NAMES:
                raise _SyntaxFailure(f"unknown metric {name.value!r}", name.span)
            metric = name.value
        else:
            raise _SyntaxFailure(
                f"expected 'extended', 'choice' or 'metric', got {kind_token.value!r}",
                kind_token.span,
            )
        links: list[tuple[str, SourceSpan]] = []
        if self.at_keyword("links"):
            self.advance()
            links = self.parse_id_list()
        text = self.expect("STRING", "question text").value
        return _QuestionDecl(
            id=ident.value,
            span=ident.span,
            principle=principle.value,
            segment=segment.value,
            pseg_span=principle.span,
            stage=stage.value,
            desideratum=desideratum,
            kind=kind,
            options=options,
            metric=metric,
            links=links,
            text=text,
        )

    def parse_goalgraph(self) -> None:
        self.expect_keyword("goalgraph")
        self.expect("LBRACE", "'{'")
        while self.peek().kind != "RBRACE":
            token = self.peek()
            if token.kind == "EOF":
                raise _SyntaxFailure("unclosed goalgraph block", token.span)
            try:
                if self.at_keyword(*_NODE_KEYWORDS):
                    self.nodes.append(self.parse_goal_node())
                elif self.at_keyword("and", "or"):
                    kind = self.advance()
                    parent = self.expect("IDENT", "parent node id")
                    children = [i for i, _ in self.parse_id_list()]
                    self.goal_links.append(
                        _GoalLinkDecl(kind.value, parent.value, children, parent.span)
                    )
                elif self.at_keyword("contrib"):
                    self.advance()
                    kind = self.expect("IDENT", "contribution kind")
                    if kind.value not in CONTRIBUTION_WEIGHTS:
                        raise _SyntaxFailure(f"unknown contribution kind {kind.value!r}", kind.span)
                    source = self.expect("IDENT", "source node id")
                    self.expect("ARROW", "'->'")
                    target = self.expect("IDENT", "target node id")
                    self.goal_links.append(
                        _GoalLinkDecl(kind.value, target.value, [source.value], source.span)
                    )
                elif self.at_keyword("dep"):
                    self.advance()
                    source = self.expect("IDENT", "source node id")
                    self.expect("ARROW", "'->'")
                    target = self.expect("IDENT", "target node id")
                    self.goal_links.append(
                        _GoalLinkDecl(DEPENDENCY, target.value, [source.value], source.span)
                    )
                else:
                    raise _SyntaxFailure(
                        f"expected a goal statement, got {token.value or token.kind!r}",
                        token.span,
                    )
            except _SyntaxFailure as failure:
                self.error(failure.message, failure.span)
                self.recover()
                if self.peek().kind == "RBRACE":
                    break
        self.expect("RBRACE", "'}'")

    def parse_goal_node(self) -> _NodeDecl:
        kind = self.advance()
        ident = self.expect("IDENT", "node id")
        decl = _NodeDecl(kind=kind.value, id=ident.value, span=ident.span)
        while True:
            if self.at_keyword("actor"):
                self.advance()
                role = self.expect("IDENT", "stakeholder role")
                if role.value not in {r.value for r in StakeholderRole}:
                    raise _SyntaxFailure(f"unknown stakeholder role {role.value!r}", role.span)
                decl.actor = role.value
            elif self.at_keyword("mitigates"):
                self.advance()
                target = self.expect("IDENT", "hazard or unethical-action id")
                decl.mitigates = (target.value, target.span)
            elif self.at_keyword("binds"):
                self.advance()
                target = self.expect("IDENT", "requirement id")
                decl.binds = (target.value, target.span)
            elif self.at_keyword("sat"):
                self.advance()
                value = self.expect("INT", "satisfaction value")
                decl.sat = int(value.value)
            elif self.peek().kind == "STRING":
                decl.label = self.advance().value
                return decl
            else:
                return decl


# ---------------------------------------------------------------------------
# Case builder


def _build_case(parser: _Parser, diagnostics: list[ParseDiagnostic]) -> AssuranceCase | None:
    if parser.header is None:
        diagnostics.append(
            ParseDiagnostic(
                Severity.ERROR, SourceSpan(1, 1, 1), "missing 'case <id>' header", "missing-header"
            )
        )
        return None
    case_id, title, header_span = parser.header
    case = AssuranceCase(case_id, title)

    def semantic(exc: ElensError, span: SourceSpan) -> None:
        diagnostics.append(ParseDiagnostic(Severity.ERROR, span, exc.message, exc.code))

    element_decls: list[tuple[_ElementDecl, str, str]] = []
    for pid, ptitle, pspan, segments in parser.principles:
        try:
            case.add_principle(pid, ptitle)
        except ElensError as exc:
            semantic(exc, pspan)
            continue
        for sid, stitle, sspan, elements in segments:
            try:
                case.add_segment(pid, sid, stitle)
            except ElensError as exc:
                semantic(exc, sspan)
                continue
            for decl in elements:
                element_decls.append((decl, pid, sid))

    # pass 1: elements
    for decl, pid, sid in element_decls:
        element = CaseElement(
            id=decl.id,
            kind=decl.kind,
            principle=pid,
            segment=sid,
            description=decl.description,
            verification=VerificationMethod(decl.verify) if decl.verify else None,
            lifecycle_stage=decl.stage,
            control_action=decl.action[0] if decl.action else None,
            uaia_mode=UaiaMode(decl.action[1]) if decl.action else None,
        )
        try:
            case.add_element(element)
            case.source_spans[decl.id] = decl.span
        except ElensError as exc:
            semantic(exc, decl.span)

    # pass 2: links (forward references within the file are fine)
    for decl, _, _ in element_decls:
        if decl.id not in case.elements:
            continue
        source_kind = case.elements[decl.id].kind
        for target_id, span in decl.links:
            target = case.elements.get(target_id)
            if target is None:
                diagnostics.append(
                    ParseDiagnostic(
                        Severity.ERROR, span, f"unknown link target {target_id}", "unknown-endpoint"
                    )
                )
                continue
            link_kind = _LINK_BY_KINDS.get((source_kind, target.kind))
            if link_kind is None:
                diagnostics.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        span,
                        f"a {source_kind.value} cannot link a {target.kind.value}",
                        "kind-mismatch",
                    )
                )
                continue
            try:
                case.add_link(TraceLink(decl.id, target_id, link_kind))
            except ElensError as exc:
                semantic(exc, span)
        if decl.action is not None:
            action_id, _, span = decl.action
            action = case.elements.get(action_id)
            if action is None or action.kind is not ElementKind.CONTROL_ACTION:
                diagnostics.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        span,
                        f"{action_id} is not a control action in this case",
                        "unknown-endpoint",
                    )
                )

    # questions
    for decl in parser.questions:
        question = Question(
            id=decl.id,
            principle=decl.principle,
            segment=decl.segment,
            stage=decl.stage,
            qtype=QuestionType(decl.kind, options=decl.options, metric=decl.metric),
            text=decl.text,
            desideratum=decl.desideratum,
            requirement_links=tuple(t for t, _ in decl.links),
        )
        try:
            register_question(case, question)
            case.source_spans[decl.id] = decl.span
        except ElensError as exc:
            span = decl.links[0][1] if decl.links and exc.code == "unknown-requirement" else decl.span
            semantic(exc, span)

    # goal graph
    for node in parser.nodes:
        if node.mitigates is not None:
            target = case.elements.get(node.mitigates[0])
            if target is None or target.kind not in (ElementKind.HAZARD, ElementKind.UAIA):
                diagnostics.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        node.mitigates[1],
                        f"{node.mitigates[0]} is not a hazard or unethical action",
                        "unknown-endpoint",
                    )
                )
                continue
        if node.binds is not None:
            target = case.elements.get(node.binds[0])
            if target is None or target.kind is not ElementKind.REQUIREMENT:
                diagnostics.append(
                    ParseDiagnostic(
                        Severity.ERROR,
                        node.binds[1],
                        f"{node.binds[0]} is not a requirement",
                        "unknown-endpoint",
                    )
                )
                continue
        try:
            case.goal_graph.add_node(
                GoalNode(
                    id=node.id,
                    kind=node.kind,
                    label=node.label,
                    actor=node.actor,
                    satisfaction=node.sat,
                    bound_element=node.binds[0] if node.binds else None,
                    mitigates=node.mitigates[0] if node.mitigates else None,
                )
            )
            case.source_spans[node.id] = node.span
        except ElensError as exc:
            semantic(exc, node.span)

    for link in parser.goal_links:
        try:
            if link.kind in DECOMPOSITION_KINDS:
                case.goal_graph.add_decomposition(link.parent_or_target, link.children_or_source, link.kind)
            elif link.kind == DEPENDENCY:
                case.goal_graph.add_dependency(link.children_or_source[0], link.parent_or_target)
            else:
                case.goal_graph.add_contribution(
                    link.children_or_source[0], link.parent_or_target, link.kind
                )
        except ElensError as exc:
            semantic(exc, link.span)

    case._record(StakeholderRole.SYSTEM_ADMIN, "parse_case", case.id)
    return case


# ---------------------------------------------------------------------------
# Public API


def try_parse(source: str) -> tuple[AssuranceCase | None, list[ParseDiagnostic]]:
    """Parse DSL text; returns (case, diagnostics). The case is None exactly
    when any Error-severity diagnostic was produced."""
    lexer = _Lexer(source)
    tokens = lexer.tokens()
    diagnostics = list(lexer.diagnostics)
    parser = _Parser(tokens, diagnostics)
    parser.parse()
    case = _build_case(parser, diagnostics)
    if any(d.severity is Severity.ERROR for d in diagnostics):
        return None, diagnostics
    return case, diagnostics


def parse_case(source: str) -> AssuranceCase:
    """Parse DSL text into a case, raising :class:`CaseSyntaxError` with all
    collected diagnostics on failure."""
    case, diagnostics = try_parse(source)
    if case is None:
        raise CaseSyntaxError(diagnostics)
    return case


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


_KIND_ORDER = {kind: i for i, kind in enumerate(ElementKind)}


def serialize_case(case: AssuranceCase) -> str:
    """Canonical DSL text: principles and segments in declared order,
    elements sorted by kind then id, 2-space indentation, one trailing
    newline. Stable across runs and idempotent under reparsing."""
    lines: list[str] = []
    header = f"case {case.id}"
    if case.title:
        header += f" {_quote(case.title)}"
    lines.append(header)

    for principle in case.principles.values():
        lines.append("")
        title = f" {_quote(principle.title)}" if principle.title else ""
        lines.append(f"principle {principle.id}{title} {{")
        for sid, stitle in principle.segments.items():
            seg_title = f" {_quote(stitle)}" if stitle else ""
            lines.append(f"  segment {sid}{seg_title} {{")
            members = sorted(
                (
                    e
                    for e in case.elements.values()
                    if e.principle == principle.id and e.segment == sid
                ),
                key=lambda e: (_KIND_ORDER[e.kind], e.id),
            )
            for element in members:
                parts = [element.kind.value, element.id]
                targets = sorted(
                    l.target
                    for l in case.element_links()
                    if l.source == element.id
                )
                if targets:
                    parts.append(f"links [{', '.join(targets)}]")
                if element.control_action:
                    parts.append(f"action {element.control_action} {element.uaia_mode.value}")
                if element.verification:
                    parts.append(f"verify {element.verification.value}")
                if element.lifecycle_stage:
                    parts.append(f"stage {element.lifecycle_stage}")
                parts.append(_quote(element.description))
                lines.append("    " + " ".join(parts))
            lines.append("  }")
        lines.append("}")

    if case.checklist.questions:
        lines.append("")
        lines.append("checklist {")
        for question in sorted(case.checklist.questions.values(), key=lambda q: q.id):
            parts = [
                "question",
                question.id,
                f"in {question.principle}/{question.segment}",
                f"stage {question.stage}",
                f"desideratum {question.desideratum}",
            ]
            if question.qtype.kind == "extended":
                parts.append("type extended")
            elif question.qtype.kind == "choice":
                opts = ", ".join(_quote(o) for o in question.qtype.options)
                parts.append(f"type choice [{opts}]")
            else:
                parts.append(f"type metric {question.qtype.metric}")
            if question.requirement_links:
                parts.append(f"links [{', '.join(sorted(question.requirement_links))}]")
            parts.append(_quote(question.text))
            lines.append("  " + " ".join(parts))
        lines.append("}")

    graph = case.goal_graph
    if graph.nodes:
        lines.append("")
        lines.append("goalgraph {")
        for node in sorted(graph.nodes.values(), key=lambda n: n.id):
            parts = [node.kind, node.id]
            if node.actor:
                parts.append(f"actor {node.actor}")
            if node.mitigates:
                parts.append(f"mitigates {node.mitigates}")
            if node.bound_element:
                parts.append(f"binds {node.bound_element}")
            if node.satisfaction is not None:
                parts.append(f"sat {node.satisfaction}")
            if node.label:
                parts.append(_quote(node.label))
            lines.append("  " + " ".join(parts))
        decomp: dict[tuple[str, str], list[str]] = {}
        for link in graph.links:
            if link.kind in DECOMPOSITION_KINDS:
                decomp.setdefault((link.target, link.kind), []).append(link.source)
        for (parent, kind), children in sorted(decomp.items()):
            lines.append(f"  {kind} {parent} [{', '.join(sorted(children))}]")
        contribs = sorted(
            (l for l in graph.links if l.kind in CONTRIBUTION_WEIGHTS),
            key=lambda l: (l.kind, l.source, l.target),
        )
        for link in contribs:
            lines.append(f"  contrib {link.kind} {link.source} -> {link.target}")
        deps = sorted(
            (l for l in graph.links if l.kind == DEPENDENCY),
            key=lambda l: (l.source, l.target),
        )
        for link in deps:
            lines.append(f"  dep {link.source} -> {link.target}")
        lines.append("}")

    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Lint

_DEFAULT_SPAN = SourceSpan(1, 1, 1)


def lint(case: AssuranceCase) -> list[ParseDiagnostic]:
    """Completeness violations as Error diagnostics plus style warnings."""
    diagnostics: list[ParseDiagnostic] = []

    def span_of(target_id: str) -> SourceSpan:
        span = case.source_spans.get(target_id, _DEFAULT_SPAN)
        return span if isinstance(span, SourceSpan) else _DEFAULT_SPAN

    for violation in case.completeness_check():
        diagnostics.append(
            ParseDiagnostic(
                Severity.ERROR,
                span_of(violation.element_id),
                violation.message,
                f"rule-{violation.rule_id}",
            )
        )

    questioned = {
        req for q in case.checklist.active() for req in q.requirement_links
    }
    for element in case.elements.values():
        if element.kind is ElementKind.REQUIREMENT and element.id not in questioned:
            diagnostics.append(
                ParseDiagnostic(
                    Severity.WARNING,
                    span_of(element.id),
                    f"unverifiable requirement: {element.id} has no checklist question",
                    "unverifiable-requirement",
                )
            )
        if element.kind is ElementKind.UAIA and element.control_action is not None:
            action = case.elements.get(element.control_action)
            if action is None or action.kind is not ElementKind.CONTROL_ACTION:
                diagnostics.append(
                    ParseDiagnostic(
                        Severity.WARNING,
                        span_of(element.id),
                        f"{element.id} references unknown control action {element.control_action}",
                        "dangling-action",
                    )
                )

    # one evidence item backing several requirements is legal but notable
    for element in case.elements.values():
        if element.kind is not ElementKind.EVIDENCE:
            continue
        supported = [
            l.target
            for l in case.links
            if l.source == element.id and l.kind is LinkKind.EVIDENCE_OF_REQUIREMENT
        ]
        if len(supported) > 1:
            diagnostics.append(
                ParseDiagnostic(
                    Severity.WARNING,
                    span_of(element.id),
                    f"evidence {element.id} supports {len(supported)} requirements",
                    "shared-evidence",
                )
            )
    return diagnostics
