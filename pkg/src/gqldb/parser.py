"""Recursive-descent parser turning a script into a list of statements."""

from __future__ import annotations

from . import ast
from .errors import ParseError
from .lexer import Token, tokenize
from .values import Value

_TYPE_NAMES = {"string", "int", "integer", "float", "bool", "boolean"}


class _Stream:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> Token | None:
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    @property
    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def error(self, expected: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = (last.column + len(last.text)) if last else 1
            return ParseError(line, col, expected, "end of input")
        return ParseError(tok.line, tok.column, expected, repr(tok.text))

    def is_punct(self, text: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok is not None and tok.kind == "punctuation" and tok.text == text

    def is_keyword(self, word: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok is not None and tok.kind == "keyword" and tok.lower() == word

    def expect_punct(self, text: str) -> Token:
        if not self.is_punct(text):
            raise self.error(repr(text))
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if not self.is_keyword(word):
            raise self.error(word.upper())
        return self.advance()


def parse_script(text: str) -> list[ast.Statement]:
    """Parse a semicolon-separated script; the first error aborts the parse."""
    s = _Stream(text)
    statements: list[ast.Statement] = []
    while not s.at_end:
        if s.is_punct(";"):
            s.advance()
            continue
        statements.append(_statement(s))
        if s.at_end:
            break
        s.expect_punct(";")
    return statements


def parse_statement(text: str) -> ast.Statement:
    stmts = parse_script(text)
    if len(stmts) != 1:
        raise ParseError(1, 1, "exactly one statement", f"{len(stmts)} statements")
    return stmts[0]


def _statement(s: _Stream) -> ast.Statement:
    if s.is_keyword("create"):
        return _create(s)
    if s.is_keyword("use"):
        return _use(s)
    if s.is_keyword("insert"):
        s.advance()
        if s.is_keyword("schema"):
            return _insert_schema(s)
        return ast.Insert(_patterns(s))
    if s.is_keyword("match"):
        return _match(s)
    if s.is_keyword("begin"):
        s.advance()
        return ast.Begin()
    if s.is_keyword("commit"):
        s.advance()
        return ast.Commit()
    if s.is_keyword("rollback"):
        s.advance()
        return ast.Rollback()
    raise s.error("a statement")


def _create(s: _Stream) -> ast.Statement:
    s.expect_keyword("create")
    if s.is_keyword("schema"):
        s.advance()
        return ast.CreateSchema(_path(s))
    s.expect_keyword("graph")
    if s.is_keyword("type"):
        s.advance()
        path = _path(s)
        return ast.CreateGraphType(path, _inline_type(s))
    path = _path(s)
    if s.is_keyword("any"):
        s.advance()
        return ast.CreateGraph(path, "any")
    if s.is_punct("{"):
        return ast.CreateGraph(path, _inline_type(s))
    if s.is_punct("/"):
        return ast.CreateGraph(path, _path(s))
    raise s.error("ANY, a graph type path, or an inline graph type")


def _use(s: _Stream) -> ast.Statement:
    s.expect_keyword("use")
    s.expect_keyword("graph")
    if s.is_punct("("):
        open_tok = s.advance()
        tok = s.peek()
        if tok is not None and tok.kind == "string-literal":
            s.advance()
            s.expect_punct(")")
            return ast.UseGraph(url=tok.text)
        # Bare url: take the raw source slice up to the matching ')'.
        start = tok.start if tok is not None else open_tok.end
        depth = 0
        while not s.at_end:
            t = s.peek()
            if t.kind == "punctuation" and t.text == "(":
                depth += 1
            elif t.kind == "punctuation" and t.text == ")":
                if depth == 0:
                    s.advance()
                    return ast.UseGraph(url=s.text[start:t.start].strip())
                depth -= 1
            s.advance()
        raise s.error("')'")
    return ast.UseGraph(path=_path(s))


def _insert_schema(s: _Stream) -> ast.InsertSchema:
    s.expect_keyword("schema")
    s.expect_punct("[")
    s.expect_punct(":")
    sub = _label_ref(s)
    s.expect_punct("=>")
    s.expect_punct(":")
    sup = _label_ref(s)
    s.expect_punct("]")
    return ast.InsertSchema(sub, sup)


def _match(s: _Stream) -> ast.Statement:
    s.expect_keyword("match")
    if s.is_keyword("schema"):
        s.advance()
        patterns = _patterns(s)
        if not s.is_keyword("return"):
            raise s.error("RETURN")
        return ast.MatchSchema(patterns, _return(s))
    patterns = _patterns(s)
    dependent: ast.Dependent | None = None
    if s.is_keyword("return"):
        dependent = _return(s)
    elif s.is_keyword("insert"):
        s.advance()
        dependent = ast.Insert(_patterns(s))
    elif s.is_keyword("set"):
        s.advance()
        dependent = ast.SetDep(_assignments(s))
    elif s.is_keyword("remove"):
        s.advance()
        dependent = ast.RemoveDep(_prop_targets(s))
    elif s.is_keyword("detach") or s.is_keyword("delete"):
        detach = s.is_keyword("detach")
        if detach:
            s.advance()
        s.expect_keyword("delete")
        aliases = [_identifier(s, "an alias")]
        while s.is_punct(","):
            s.advance()
            aliases.append(_identifier(s, "an alias"))
        dependent = ast.DeleteDep(aliases, detach)
    return ast.Match(patterns, dependent)


def _return(s: _Stream) -> ast.Return:
    s.expect_keyword("return")
    items = [_return_item(s)]
    while s.is_punct(","):
        s.advance()
        items.append(_return_item(s))
    return ast.Return(items)


def _return_item(s: _Stream) -> ast.ReturnItem:
    alias = _identifier(s, "an alias")
    prop = None
    if s.is_punct(".") or s.is_punct("@"):
        dotted = s.is_punct(".")
        s.advance()
        prop = _prop_name(s, at_seen=not dotted)
    return ast.ReturnItem(alias, prop)


def _prop_name(s: _Stream, at_seen: bool = False) -> str:
    if not at_seen and s.is_punct("@"):
        s.advance()
        at_seen = True
    name = _identifier(s, "a property name")
    return "@" + name if at_seen else name


def _assignments(s: _Stream) -> list[tuple[str, str, Value]]:
    out = [_assignment(s)]
    while s.is_punct(","):
        s.advance()
        out.append(_assignment(s))
    return out


def _assignment(s: _Stream) -> tuple[str, str, Value]:
    alias = _identifier(s, "an alias")
    s.expect_punct(".")
    prop = _prop_name(s)
    s.expect_punct("=")
    return alias, prop, _literal(s)


def _prop_targets(s: _Stream) -> list[tuple[str, str]]:
    def one() -> tuple[str, str]:
        alias = _identifier(s, "an alias")
        s.expect_punct(".")
        return alias, _prop_name(s)

    out = [one()]
    while s.is_punct(","):
        s.advance()
        out.append(one())
    return out


# --- patterns ---

def _patterns(s: _Stream) -> list[ast.PathPattern]:
    out = [_path_pattern(s)]
    while s.is_punct(","):
        s.advance()
        out.append(_path_pattern(s))
    return out


def _path_pattern(s: _Stream) -> ast.PathPattern:
    nodes = [_node_pattern(s)]
    edges: list[ast.EdgePattern] = []
    while s.is_punct("-[") or s.is_punct("<-["):
        edges.append(_edge_pattern(s))
        nodes.append(_node_pattern(s))
    return ast.PathPattern(nodes, edges)


def _node_pattern(s: _Stream) -> ast.NodePattern:
    s.expect_punct("(")
    alias = None
    tok = s.peek()
    if tok is not None and tok.kind == "identifier":
        alias = s.advance().text
    label = None
    if s.is_punct(":"):
        s.advance()
        label = _label_expr(s)
    props: ast.Props = []
    if s.is_punct("{"):
        props = _prop_map(s)
    s.expect_punct(")")
    return ast.NodePattern(alias, label, props)


def _edge_pattern(s: _Stream) -> ast.EdgePattern:
    opener = s.advance()  # '-[' or '<-['
    direction = "lr" if opener.text == "-[" else "rl"
    alias = None
    tok = s.peek()
    if tok is not None and tok.kind == "identifier":
        alias = s.advance().text
    label = None
    if s.is_punct(":"):
        s.advance()
        label = _label_expr(s)
    props: ast.Props = []
    if s.is_punct("{"):
        props = _prop_map(s)
    closer = "]->" if direction == "lr" else "]-"
    for quant in ("*", "?"):
        if s.is_punct(quant):
            raise s.error(f"{closer!r} (path quantifier {quant!r} unsupported)")
    s.expect_punct(closer)
    for quant in ("*", "?"):
        if s.is_punct(quant):
            raise s.error(f"a node pattern (path quantifier {quant!r} unsupported)")
    return ast.EdgePattern(alias, label, props, direction)


def _label_expr(s: _Stream) -> ast.LabelExpr:
    expr = _label_term(s)
    while s.is_punct("|"):
        s.advance()
        expr = ast.LabelOr(expr, _label_term(s))
    return expr


def _label_term(s: _Stream) -> ast.LabelExpr:
    expr = _label_factor(s)
    while True:
        if s.is_punct("&"):
            s.advance()
            expr = ast.LabelAnd(expr, _label_factor(s))
        elif s.is_punct(":") and _starts_label(s.peek(1)):
            # Colon-chained sugar: ':a:b' means 'a&b'.
            s.advance()
            expr = ast.LabelAnd(expr, _label_factor(s))
        else:
            return expr


def _starts_label(tok: Token | None) -> bool:
    return tok is not None and tok.kind in ("identifier", "quoted-identifier")


def _label_factor(s: _Stream) -> ast.LabelExpr:
    if s.is_punct("!"):
        raise s.error("a label (negation '!' unsupported)")
    if s.is_punct("("):
        s.advance()
        expr = _label_expr(s)
        s.expect_punct(")")
        return expr
    return ast.LabelAtom(_label_ref(s))


def _label_ref(s: _Stream) -> ast.LabelRef:
    tok = s.peek()
    if tok is not None and tok.kind == "identifier":
        s.advance()
        return ast.LabelRef(tok.text, quoted=False)
    if tok is not None and tok.kind == "quoted-identifier":
        s.advance()
        return ast.LabelRef(tok.text, quoted=True)
    raise s.error("a label")


def _prop_map(s: _Stream) -> ast.Props:
    s.expect_punct("{")
    props: ast.Props = []
    if not s.is_punct("}"):
        props.append(_prop_entry(s))
        while s.is_punct(","):
            s.advance()
            props.append(_prop_entry(s))
    s.expect_punct("}")
    return props


def _prop_entry(s: _Stream) -> tuple[str, Value]:
    name = _identifier(s, "a property name")
    s.expect_punct(":")
    return name, _literal(s)


def _literal(s: _Stream) -> Value:
    tok = s.peek()
    if tok is None:
        raise s.error("a literal")
    if tok.kind == "string-literal":
        s.advance()
        return tok.text
    if tok.kind == "boolean":
        s.advance()
        return tok.lower() == "true"
    if tok.kind == "keyword" and tok.lower() == "null":
        s.advance()
        return None
    negative = False
    if tok.kind == "punctuation" and tok.text == "-":
        s.advance()
        negative = True
        tok = s.peek()
        if tok is None or tok.kind not in ("integer", "float"):
            raise s.error("a number")
    if tok.kind == "integer":
        s.advance()
        value = int(tok.text)
        return -value if negative else value
    if tok.kind == "float":
        s.advance()
        value = float(tok.text)
        return -value if negative else value
    raise s.error("a literal")


# --- shared small parsers ---

def _identifier(s: _Stream, expected: str) -> str:
    tok = s.peek()
    if tok is None or tok.kind != "identifier":
        raise s.error(expected)
    s.advance()
    return tok.text


def _path(s: _Stream) -> ast.Path:
    s.expect_punct("/")
    tok = s.peek()
    if tok is None or tok.kind != "identifier":
        raise s.error("a path segment")
    s.advance()
    segments = [tok.text]
    end = tok.end
    # Segments must be contiguous; whitespace starts a new path.
    while s.is_punct("/") and s.peek().start == end:
        slash = s.advance()
        tok = s.peek()
        if tok is None or tok.kind != "identifier" or tok.start != slash.end:
            raise s.error("a path segment")
        s.advance()
        segments.append(tok.text)
        end = tok.end
    return ast.Path(tuple(segments))


def _inline_type(s: _Stream) -> ast.InlineType:
    s.expect_punct("{")
    node_specs: list[ast.NodeSpec] = []
    edge_specs: list[ast.EdgeSpec] = []
    while not s.is_punct("}"):
        if s.is_keyword("node"):
            s.advance()
            label = _label_ref(s)
            props = _prop_signature(s) if s.is_punct("{") else []
            node_specs.append(ast.NodeSpec(label, props))
        elif s.is_keyword("directed") or s.is_keyword("edge"):
            if s.is_keyword("directed"):
                s.advance()
            s.expect_keyword("edge")
            label = _label_ref(s)
            props = _prop_signature(s) if s.is_punct("{") else []
            s.expect_keyword("connecting")
            s.expect_punct("(")
            source = _label_ref(s)
            s.expect_punct("->")
            target = _label_ref(s)
            s.expect_punct(")")
            edge_specs.append(ast.EdgeSpec(label, source, target, props))
        else:
            raise s.error("NODE or DIRECTED EDGE")
        if s.is_punct(","):
            s.advance()
        elif not s.is_punct("}"):
            raise s.error("',' or '}'")
    s.advance()
    return ast.InlineType(node_specs, edge_specs)


def _prop_signature(s: _Stream) -> list[tuple[str, str]]:
    s.expect_punct("{")
    props: list[tuple[str, str]] = []
    while not s.is_punct("}"):
        name = _identifier(s, "a property name")
        type_tok = s.peek()
        if (type_tok is None or type_tok.kind != "identifier"
                or type_tok.lower() not in _TYPE_NAMES):
            raise s.error("a property type (string, int, float, bool)")
        s.advance()
        tag = {"integer": "int", "boolean": "bool"}.get(type_tok.lower(), type_tok.lower())
        props.append((name, tag))
        if s.is_punct(","):
            s.advance()
        elif not s.is_punct("}"):
            raise s.error("',' or '}'")
    s.advance()
    return props
