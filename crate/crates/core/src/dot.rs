//! A validator for the Graphviz DOT language.
//!
//! Covers the full abstract grammar (graphs, subgraphs, node/edge/attribute
//! statements, ports, the four identifier forms and comments) without
//! building a model of the graph. Used to check exported summaries.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DOT syntax error at line {line}, column {column}: {message}")]
pub struct DotError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    /// Keywords are case-insensitive; stored lowercased.
    Keyword(&'static str),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Colon,
    Arrow,
    Line,
}

const KEYWORDS: [&str; 6] = ["strict", "graph", "digraph", "node", "edge", "subgraph"];

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
    at_line_start: bool,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            line: 1,
            column: 1,
            at_line_start: true,
        }
    }

    fn err(&self, message: impl Into<String>) -> DotError {
        DotError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
            self.at_line_start = true;
        } else {
            self.column += 1;
            if !c.is_whitespace() {
                self.at_line_start = false;
            }
        }
        Some(c)
    }

    fn skip_trivia(&mut self) -> Result<(), DotError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                // preprocessor-style output lines are discarded
                Some('#') if self.at_line_start => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') => {
                    let mut look = self.chars.clone();
                    look.next();
                    match look.peek().map(|&(_, c)| c) {
                        Some('/') => {
                            while let Some(c) = self.bump() {
                                if c == '\n' {
                                    break;
                                }
                            }
                        }
                        Some('*') => {
                            self.bump();
                            self.bump();
                            let mut prev = '\0';
                            loop {
                                match self.bump() {
                                    Some('/') if prev == '*' => break,
                                    Some(c) => prev = c,
                                    None => return Err(self.err("unterminated comment")),
                                }
                            }
                        }
                        _ => return Ok(()),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, DotError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia()?;
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '{' => self.single(Tok::LBrace),
                '}' => self.single(Tok::RBrace),
                '[' => self.single(Tok::LBracket),
                ']' => self.single(Tok::RBracket),
                '=' => self.single(Tok::Eq),
                ';' => self.single(Tok::Semi),
                ',' => self.single(Tok::Comma),
                ':' => self.single(Tok::Colon),
                '"' => self.quoted()?,
                '<' => self.html()?,
                '-' => {
                    let mut look = self.chars.clone();
                    look.next();
                    match look.peek().map(|&(_, c)| c) {
                        Some('>') => {
                            self.bump();
                            self.bump();
                            Tok::Arrow
                        }
                        Some('-') => {
                            self.bump();
                            self.bump();
                            Tok::Line
                        }
                        _ => self.numeral()?,
                    }
                }
                '.' | '0'..='9' => self.numeral()?,
                c if c.is_alphabetic() || c == '_' || !c.is_ascii() => self.name(),
                other => return Err(self.err(format!("unexpected character `{other}`"))),
            };
            out.push((tok, line, column));
        }
        Ok(out)
    }

    fn single(&mut self, t: Tok) -> Tok {
        self.bump();
        t
    }

    fn name(&mut self) -> Tok {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || !c.is_ascii() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let lower = s.to_ascii_lowercase();
        match KEYWORDS.iter().find(|k| **k == lower) {
            Some(k) => Tok::Keyword(k),
            None => Tok::Id(s),
        }
    }

    fn numeral(&mut self) -> Result<Tok, DotError> {
        let mut s = String::new();
        if self.peek() == Some('-') {
            s.push('-');
            self.bump();
        }
        let mut digits = 0;
        let mut dot = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits += 1;
            } else if c == '.' && !dot {
                dot = true;
            } else {
                break;
            }
            s.push(c);
            self.bump();
        }
        if digits == 0 {
            return Err(self.err(format!("malformed numeral `{s}`")));
        }
        if matches!(self.peek(), Some(c) if c.is_alphabetic() || c == '_') {
            return Err(self.err("identifier may not start with a digit"));
        }
        Ok(Tok::Id(s))
    }

    fn quoted(&mut self) -> Result<Tok, DotError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(Tok::Id(s)),
                Some('\\') => match self.bump() {
                    Some(c) => {
                        s.push('\\');
                        s.push(c);
                    }
                    None => break,
                },
                Some(c) => s.push(c),
                None => break,
            }
        }
        Err(self.err("unterminated string"))
    }

    fn html(&mut self) -> Result<Tok, DotError> {
        self.bump();
        let mut depth = 1;
        let mut s = String::new();
        while let Some(c) = self.bump() {
            match c {
                '<' => depth += 1,
                '>' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(Tok::Id(s));
                    }
                }
                _ => {}
            }
            s.push(c);
        }
        Err(self.err("unterminated HTML string"))
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    directed: bool,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|t| &t.0)
    }

    fn err(&self, message: impl Into<String>) -> DotError {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map(|t| (t.1, t.2))
            .unwrap_or(self.end);
        DotError {
            line,
            column,
            message: message.into(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), DotError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn id(&mut self) -> Result<(), DotError> {
        match self.peek() {
            Some(Tok::Id(_)) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn graph(&mut self) -> Result<(), DotError> {
        self.eat(&Tok::Keyword("strict"));
        self.directed = match self.peek() {
            Some(Tok::Keyword("digraph")) => true,
            Some(Tok::Keyword("graph")) => false,
            _ => return Err(self.err("expected `graph` or `digraph`")),
        };
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect(&Tok::LBrace, "`{`")?;
        self.stmt_list()?;
        self.expect(&Tok::RBrace, "`}`")?;
        if self.pos != self.toks.len() {
            return Err(self.err("trailing input after graph"));
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), DotError> {
        while !matches!(self.peek(), Some(Tok::RBrace) | None) {
            self.stmt()?;
            self.eat(&Tok::Semi);
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), DotError> {
        match self.peek() {
            Some(Tok::Keyword("graph" | "node" | "edge")) => {
                self.pos += 1;
                self.attr_list_required()
            }
            Some(Tok::Id(_)) if self.peek_at(1) == Some(&Tok::Eq) => {
                self.pos += 2;
                self.id()
            }
            Some(Tok::Id(_)) => {
                self.node_id()?;
                self.edge_tail()
            }
            Some(Tok::Keyword("subgraph")) | Some(Tok::LBrace) => {
                self.subgraph()?;
                self.edge_tail()
            }
            _ => Err(self.err("expected statement")),
        }
    }

    /// Optional edge right-hand side and attribute list after an operand.
    fn edge_tail(&mut self) -> Result<(), DotError> {
        loop {
            match self.peek() {
                Some(Tok::Arrow) if self.directed => {}
                Some(Tok::Line) if !self.directed => {}
                Some(Tok::Arrow) => return Err(self.err("`->` in an undirected graph")),
                Some(Tok::Line) => return Err(self.err("`--` in a directed graph")),
                _ => break,
            }
            self.pos += 1;
            match self.peek() {
                Some(Tok::Id(_)) => self.node_id()?,
                Some(Tok::Keyword("subgraph")) | Some(Tok::LBrace) => self.subgraph()?,
                _ => return Err(self.err("expected edge operand")),
            }
        }
        if self.peek() == Some(&Tok::LBracket) {
            self.attr_list_required()?;
        }
        Ok(())
    }

    fn node_id(&mut self) -> Result<(), DotError> {
        self.id()?;
        if self.eat(&Tok::Colon) {
            self.id()?;
            if self.eat(&Tok::Colon) {
                self.id()?;
            }
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<(), DotError> {
        if self.eat(&Tok::Keyword("subgraph")) && matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect(&Tok::LBrace, "`{`")?;
        self.stmt_list()?;
        self.expect(&Tok::RBrace, "`}`")
    }

    fn attr_list_required(&mut self) -> Result<(), DotError> {
        if self.peek() != Some(&Tok::LBracket) {
            return Err(self.err("expected `[`"));
        }
        while self.eat(&Tok::LBracket) {
            while !matches!(self.peek(), Some(Tok::RBracket) | None) {
                self.id()?;
                self.expect(&Tok::Eq, "`=`")?;
                self.id()?;
                if !self.eat(&Tok::Comma) {
                    self.eat(&Tok::Semi);
                }
            }
            self.expect(&Tok::RBracket, "`]`")?;
        }
        Ok(())
    }
}

/// Checks that `src` is one syntactically valid DOT graph.
pub fn validate_dot(src: &str) -> Result<(), DotError> {
    let lexer = Lexer::new(src);
    let toks = lexer.tokens()?;
    let end = src
        .lines()
        .enumerate()
        .last()
        .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    let mut p = Parser {
        toks,
        pos: 0,
        directed: true,
        end,
    };
    p.graph()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_common_forms() {
        for src in [
            "digraph {}",
            "strict digraph G { a -> b -> c; }",
            "graph g { a -- b [color=red, weight=2]; c }",
            "digraph { node [shape=box]; edge [penwidth=1.5] graph [rankdir=LR] a; }",
            "digraph { rankdir = TB; \"x y\" -> \"z\\\"q\" [label=\"1\\n2\"] }",
            "digraph { a:p1:ne -> b:sw; -1.5 -> .5 }",
            "digraph { subgraph cluster_0 { a b } -> { c d } }",
            "digraph { a [label=<<b>bold</b>>] }",
            "/* c */ digraph { // line\n a -> b /* inline */ }\n# pragma\n",
            "DiGraph X { A [] [x=1] }",
        ] {
            validate_dot(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        }
    }

    #[test]
    fn rejects_malformed() {
        for src in [
            "",
            "digraph {",
            "digraph { a -> }",
            "digraph { a -- b }",
            "graph { a -> b }",
            "digraph { a [label] }",
            "digraph { a [x=1 }",
            "digraph { \"open }",
            "digraph { 1abc }",
            "digraph {} extra",
            "digraph { node; }",
            "digraph { = b }",
            "tree { }",
        ] {
            assert!(validate_dot(src).is_err(), "accepted: {src:?}");
        }
    }

    #[test]
    fn error_position() {
        let e = validate_dot("digraph {\n  a -> ;\n}").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));
    }
}
