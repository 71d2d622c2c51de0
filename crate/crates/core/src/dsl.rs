//! Textual plan format (`.abd`): lexer, parser, canonical serializer.
//!
//! Grammar (EBNF, terminals quoted):
//!
//! ```text
//! plan      := "(" "plan" decls dc comp* ap* ")"
//! decls     := "(" "actions" "(" ident* ")" ")" "(" "senses" "(" ident* ")" ")"
//! dc        := "(" "DC" ident goal? fallback? "(" "drives" "(" drive+ ")" ")" ")"
//! fallback  := "(" "fallback" ident ")"
//! drive     := "(" ident trigger ident number? ")"   ; name, trigger, target, frequency_ticks
//! comp      := "(" "C" ident goal? "(" "elements" "(" celem+ ")" ")" ")"
//! celem     := "(" ident trigger ident number? ")"   ; name, trigger, target, retries
//! ap        := "(" "AP" ident "(" ident+ ")" ")"
//! goal      := "(" "goal" senselist ")"
//! trigger   := "(" "trigger" senselist ")"
//! senselist := "(" satom* ")"
//! satom     := "(" ident (value predicate?)? ")"
//! value     := "true" | "false" | number
//! predicate := "==" | "!=" | "<" | ">" | "<=" | ">="
//! ```
//!
//! Identifiers match `[A-Za-z_][A-Za-z0-9_-]*` and are case-sensitive; `;`
//! starts a comment running to end of line. Input newlines may be LF or
//! CRLF; canonical output is LF only. `C` and `AP` forms may appear in any
//! order after the drive collection; the canonical serializer emits all
//! competences first, each group sorted by name.
//!
//! The canonical form drops defaulted fields: predicate `==`, expected value
//! `true`, `frequency_ticks` 0 and unbounded retries are omitted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{
    self, ActionPattern, Competence, CompetenceElement, DriveCollection, DriveElement, Plan,
    Predicate, SenseAtom, SenseValue, Trigger,
};

// ---------------------------------------------------------------------------
// Errors and spans
// ---------------------------------------------------------------------------

/// Byte range plus 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Input could not be tokenized.
    Lexical,
    /// Token stream does not match the grammar.
    Syntactic,
    /// Well-formed text describing an invalid plan.
    Semantic,
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCategory::Lexical => "lexical",
            ErrorCategory::Syntactic => "syntactic",
            ErrorCategory::Semantic => "semantic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{category}: {}:{}: {message}", span.line, span.column)]
pub struct ParseError {
    pub category: ErrorCategory,
    pub message: String,
    pub span: SourceSpan,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Ident(String),
    Number(f64),
    Pred(Predicate),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Pred(p) => format!("`{p}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_continue(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'-'
}

fn is_delimiter(c: u8) -> bool {
    c == b'(' || c == b')' || c == b';' || c.is_ascii_whitespace()
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer {
            bytes: text.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) {
        if self.bytes[self.pos] == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        self.pos += 1;
    }

    fn span_from(&self, start: usize, line: u32, column: u32) -> SourceSpan {
        SourceSpan {
            start,
            end: self.pos,
            line,
            column,
        }
    }

    fn error(&self, start: usize, line: u32, column: u32, message: String) -> ParseError {
        ParseError {
            category: ErrorCategory::Lexical,
            message,
            span: self.span_from(start, line, column),
        }
    }

    fn lex(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            let (start, line, column) = (self.pos, self.line, self.column);
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => self.bump(),
                b';' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.bump();
                    }
                }
                b'(' => {
                    self.bump();
                    out.push(Token {
                        tok: Tok::LParen,
                        span: self.span_from(start, line, column),
                    });
                }
                b')' => {
                    self.bump();
                    out.push(Token {
                        tok: Tok::RParen,
                        span: self.span_from(start, line, column),
                    });
                }
                b'=' | b'!' | b'<' | b'>' => {
                    self.bump();
                    let two_char = self.pos < self.bytes.len() && self.bytes[self.pos] == b'=';
                    if two_char {
                        self.bump();
                    }
                    let text: &str = match (c, two_char) {
                        (b'=', true) => "==",
                        (b'!', true) => "!=",
                        (b'<', true) => "<=",
                        (b'>', true) => ">=",
                        (b'<', false) => "<",
                        (b'>', false) => ">",
                        (b'=', false) => {
                            return Err(self.error(
                                start,
                                line,
                                column,
                                "`=` is not a token; did you mean `==`?".to_string(),
                            ))
                        }
                        (b'!', false) => {
                            return Err(self.error(
                                start,
                                line,
                                column,
                                "`!` is not a token; did you mean `!=`?".to_string(),
                            ))
                        }
                        _ => unreachable!(),
                    };
                    let pred = Predicate::from_symbol(text).unwrap();
                    out.push(Token {
                        tok: Tok::Pred(pred),
                        span: self.span_from(start, line, column),
                    });
                }
                c if is_ident_start(c) => {
                    while self.pos < self.bytes.len() && is_ident_continue(self.bytes[self.pos]) {
                        self.bump();
                    }
                    if self.pos < self.bytes.len() && !is_delimiter(self.bytes[self.pos]) {
                        return Err(self.error(
                            start,
                            line,
                            column,
                            format!(
                                "unexpected character `{}` in identifier",
                                self.bytes[self.pos] as char
                            ),
                        ));
                    }
                    let text = std::str::from_utf8(&self.bytes[start..self.pos])
                        .expect("identifier bytes are ASCII");
                    out.push(Token {
                        tok: Tok::Ident(text.to_string()),
                        span: self.span_from(start, line, column),
                    });
                }
                c if c.is_ascii_digit() || c == b'-' => {
                    self.bump();
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                        self.bump();
                    }
                    if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
                        self.bump();
                        let mut frac_digits = 0;
                        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                            self.bump();
                            frac_digits += 1;
                        }
                        if frac_digits == 0 {
                            return Err(self.error(
                                start,
                                line,
                                column,
                                "number is missing digits after `.`".to_string(),
                            ));
                        }
                    }
                    if self.pos < self.bytes.len()
                        && (self.bytes[self.pos] == b'e' || self.bytes[self.pos] == b'E')
                    {
                        self.bump();
                        if self.pos < self.bytes.len()
                            && (self.bytes[self.pos] == b'+' || self.bytes[self.pos] == b'-')
                        {
                            self.bump();
                        }
                        let mut exp_digits = 0;
                        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                            self.bump();
                            exp_digits += 1;
                        }
                        if exp_digits == 0 {
                            return Err(self.error(
                                start,
                                line,
                                column,
                                "number is missing exponent digits".to_string(),
                            ));
                        }
                    }
                    if self.pos < self.bytes.len() && !is_delimiter(self.bytes[self.pos]) {
                        return Err(self.error(
                            start,
                            line,
                            column,
                            "malformed number".to_string(),
                        ));
                    }
                    let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                    let value: f64 = text.parse().map_err(|_| {
                        self.error(start, line, column, format!("malformed number `{text}`"))
                    })?;
                    out.push(Token {
                        tok: Tok::Number(value),
                        span: self.span_from(start, line, column),
                    });
                }
                other => {
                    self.bump();
                    return Err(self.error(
                        start,
                        line,
                        column,
                        format!("unexpected character `{}`", other as char),
                    ));
                }
            }
        }
        Ok(out)
    }

    fn eof_span(text: &str) -> SourceSpan {
        let mut line = 1;
        let mut column = 1;
        for b in text.bytes() {
            if b == b'\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        SourceSpan {
            start: text.len(),
            end: text.len(),
            line,
            column,
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    eof: SourceSpan,
    /// Duplicate declarations found while building name-keyed maps.
    dup_errors: Vec<ParseError>,
}

impl<'a> Parser<'a> {
    fn syntax(&self, span: SourceSpan, message: String) -> ParseError {
        ParseError {
            category: ErrorCategory::Syntactic,
            message,
            span,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self, expected: &str) -> Result<&'a Token, ParseError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.syntax(
                self.eof,
                format!("unexpected end of input (unbalanced parentheses), expected {expected}"),
            )),
        }
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        let t = self.next("`(`")?;
        match t.tok {
            Tok::LParen => Ok(()),
            _ => Err(self.syntax(t.span, format!("expected `(`, found {}", t.tok.describe()))),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let t = self.next("`)`")?;
        match t.tok {
            Tok::RParen => Ok(()),
            _ => Err(self.syntax(t.span, format!("expected `)`, found {}", t.tok.describe()))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        let t = self.next(what)?;
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.span)),
            _ => Err(self.syntax(
                t.span,
                format!("expected {what}, found {}", t.tok.describe()),
            )),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.next(&format!("`{kw}`"))?;
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => Err(self.syntax(
                t.span,
                format!("expected `{kw}`, found {}", t.tok.describe()),
            )),
        }
    }

    fn at_rparen(&self) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::RParen, .. }))
    }

    /// Peek two tokens ahead for a `( KEYWORD` opener without consuming.
    fn at_form(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::LParen, .. }))
            && matches!(self.toks.get(self.pos + 1),
                Some(Token { tok: Tok::Ident(s), .. }) if s == kw)
    }

    /// `"(" kw "(" ident* ")" ")"` — a named list of identifiers.
    fn ident_list(&mut self, kw: &str, what: &str) -> Result<Vec<(String, SourceSpan)>, ParseError> {
        self.expect_lparen()?;
        self.expect_keyword(kw)?;
        self.expect_lparen()?;
        let mut names = Vec::new();
        while !self.at_rparen() {
            names.push(self.expect_ident(what)?);
        }
        self.expect_rparen()?;
        self.expect_rparen()?;
        Ok(names)
    }

    fn senselist(&mut self) -> Result<Trigger, ParseError> {
        self.expect_lparen()?;
        let mut atoms = Vec::new();
        while !self.at_rparen() {
            self.expect_lparen()?;
            let (sense, _) = self.expect_ident("sense name")?;
            let mut expected = SenseValue::Bool(true);
            let mut predicate = Predicate::Eq;
            if !self.at_rparen() {
                let t = self.next("expected value")?;
                expected = match &t.tok {
                    Tok::Ident(s) if s == "true" => SenseValue::Bool(true),
                    Tok::Ident(s) if s == "false" => SenseValue::Bool(false),
                    Tok::Number(n) => SenseValue::Num(*n),
                    _ => {
                        return Err(self.syntax(
                            t.span,
                            format!(
                                "expected `true`, `false` or a number, found {}",
                                t.tok.describe()
                            ),
                        ))
                    }
                };
                if !self.at_rparen() {
                    let t = self.next("predicate")?;
                    predicate = match t.tok {
                        Tok::Pred(p) => p,
                        _ => {
                            return Err(self.syntax(
                                t.span,
                                format!("expected a predicate, found {}", t.tok.describe()),
                            ))
                        }
                    };
                }
            }
            self.expect_rparen()?;
            atoms.push(SenseAtom {
                sense,
                expected,
                predicate,
            });
        }
        self.expect_rparen()?;
        Ok(Trigger { atoms })
    }

    /// `"(" "trigger" senselist ")"` or `"(" "goal" senselist ")"`.
    fn senselist_form(&mut self, kw: &str) -> Result<Trigger, ParseError> {
        self.expect_lparen()?;
        self.expect_keyword(kw)?;
        let t = self.senselist()?;
        self.expect_rparen()?;
        Ok(t)
    }

    fn nonneg_integer(&mut self, what: &str) -> Result<Option<u64>, ParseError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Number(n),
                span,
            }) => {
                if n.fract() != 0.0 || *n < 0.0 || *n > u64::MAX as f64 {
                    return Err(
                        self.syntax(*span, format!("{what} must be a non-negative integer"))
                    );
                }
                self.pos += 1;
                Ok(Some(*n as u64))
            }
            _ => Ok(None),
        }
    }

    /// `"(" ident trigger ident number? ")"` — shared by drives and
    /// competence elements.
    fn triggered_element(&mut self, tail: &str) -> Result<(String, Trigger, String, Option<u64>), ParseError> {
        self.expect_lparen()?;
        let (name, _) = self.expect_ident("element name")?;
        let trigger = self.senselist_form("trigger")?;
        let (target, _) = self.expect_ident("target name")?;
        let number = self.nonneg_integer(tail)?;
        self.expect_rparen()?;
        Ok((name, trigger, target, number))
    }

    fn drive_collection(&mut self) -> Result<DriveCollection, ParseError> {
        self.expect_lparen()?;
        self.expect_keyword("DC")?;
        let (name, _) = self.expect_ident("drive collection name")?;
        let goal = if self.at_form("goal") {
            Some(self.senselist_form("goal")?)
        } else {
            None
        };
        let fallback_action = if self.at_form("fallback") {
            self.expect_lparen()?;
            self.expect_keyword("fallback")?;
            let (fb, _) = self.expect_ident("fallback action")?;
            self.expect_rparen()?;
            Some(fb)
        } else {
            None
        };
        self.expect_lparen()?;
        self.expect_keyword("drives")?;
        self.expect_lparen()?;
        let mut drives = Vec::new();
        while !self.at_rparen() {
            let (name, trigger, target, freq) = self.triggered_element("frequency_ticks")?;
            drives.push(DriveElement {
                name,
                trigger,
                target,
                frequency_ticks: freq.unwrap_or(0),
            });
        }
        self.expect_rparen()?;
        self.expect_rparen()?;
        self.expect_rparen()?;
        Ok(DriveCollection {
            name,
            goal,
            drives,
            fallback_action,
        })
    }

    fn competence(&mut self) -> Result<Competence, ParseError> {
        self.expect_lparen()?;
        self.expect_keyword("C")?;
        let (name, _) = self.expect_ident("competence name")?;
        let goal = if self.at_form("goal") {
            Some(self.senselist_form("goal")?)
        } else {
            None
        };
        self.expect_lparen()?;
        self.expect_keyword("elements")?;
        self.expect_lparen()?;
        let mut elements = Vec::new();
        while !self.at_rparen() {
            let (name, trigger, target, retries) = self.triggered_element("retries")?;
            elements.push(CompetenceElement {
                name,
                trigger,
                target,
                retries,
            });
        }
        self.expect_rparen()?;
        self.expect_rparen()?;
        self.expect_rparen()?;
        Ok(Competence {
            name,
            goal,
            elements,
        })
    }

    fn action_pattern(&mut self) -> Result<ActionPattern, ParseError> {
        self.expect_lparen()?;
        self.expect_keyword("AP")?;
        let (name, _) = self.expect_ident("action pattern name")?;
        self.expect_lparen()?;
        let mut steps = Vec::new();
        while !self.at_rparen() {
            let (step, _) = self.expect_ident("action name")?;
            steps.push(step);
        }
        self.expect_rparen()?;
        self.expect_rparen()?;
        Ok(ActionPattern { name, steps })
    }

    fn duplicate(&mut self, kind: &str, name: &str, span: SourceSpan) {
        self.dup_errors.push(ParseError {
            category: ErrorCategory::Semantic,
            message: format!("duplicate {kind} `{name}`"),
            span,
        });
    }

    fn plan(&mut self) -> Result<Plan, ParseError> {
        self.expect_lparen()?;
        self.expect_keyword("plan")?;

        let mut declared_actions = BTreeSet::new();
        for (name, span) in self.ident_list("actions", "action name")? {
            if !declared_actions.insert(name.clone()) {
                self.duplicate("action", &name, span);
            }
        }
        let mut declared_senses = BTreeSet::new();
        for (name, span) in self.ident_list("senses", "sense name")? {
            if !declared_senses.insert(name.clone()) {
                self.duplicate("sense", &name, span);
            }
        }

        let drive_collection = self.drive_collection()?;

        let mut competences: BTreeMap<String, Competence> = BTreeMap::new();
        let mut action_patterns: BTreeMap<String, ActionPattern> = BTreeMap::new();
        loop {
            if self.at_form("C") {
                let start = self.peek().unwrap().span;
                let c = self.competence()?;
                if competences.contains_key(&c.name) {
                    self.duplicate("competence", &c.name.clone(), start);
                } else {
                    competences.insert(c.name.clone(), c);
                }
            } else if self.at_form("AP") {
                let start = self.peek().unwrap().span;
                let ap = self.action_pattern()?;
                if action_patterns.contains_key(&ap.name) {
                    self.duplicate("action pattern", &ap.name.clone(), start);
                } else {
                    action_patterns.insert(ap.name.clone(), ap);
                }
            } else {
                break;
            }
        }

        self.expect_rparen()?;
        if let Some(t) = self.peek() {
            return Err(self.syntax(
                t.span,
                format!("expected end of input, found {}", t.tok.describe()),
            ));
        }
        Ok(Plan {
            declared_actions,
            declared_senses,
            drive_collection,
            competences,
            action_patterns,
        })
    }
}

/// Parse without running structural validation. Duplicate declarations of
/// the same kind are still rejected because the name-keyed plan model
/// cannot represent them.
pub fn parse_unvalidated(text: &str) -> Result<Plan, Vec<ParseError>> {
    let tokens = Lexer::new(text).lex().map_err(|e| vec![e])?;
    let mut parser = Parser {
        toks: &tokens,
        pos: 0,
        eof: Lexer::eof_span(text),
        dup_errors: Vec::new(),
    };
    let plan = parser.plan().map_err(|e| vec![e])?;
    if parser.dup_errors.is_empty() {
        Ok(plan)
    } else {
        Err(parser.dup_errors)
    }
}

/// Parse and validate. The result satisfies `model::validate(plan) == []`;
/// validation findings are reported as semantic errors spanning the whole
/// plan form and quoting the diagnostic path.
pub fn parse(text: &str) -> Result<Plan, Vec<ParseError>> {
    let plan = parse_unvalidated(text)?;
    let diags = model::validate(&plan);
    if diags.is_empty() {
        return Ok(plan);
    }
    let span = SourceSpan {
        start: 0,
        end: text.len(),
        line: 1,
        column: 1,
    };
    Err(diags
        .into_iter()
        .map(|d| ParseError {
            category: ErrorCategory::Semantic,
            message: format!("{}: {}: {}", d.category, d.path, d.message),
            span,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Canonical serializer
// ---------------------------------------------------------------------------

fn fmt_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 9.0e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

fn fmt_value(v: SenseValue) -> String {
    match v {
        SenseValue::Bool(b) => b.to_string(),
        SenseValue::Num(n) => fmt_number(n),
    }
}

fn fmt_atom(atom: &SenseAtom) -> String {
    if atom.is_default_expectation() {
        format!("({})", atom.sense)
    } else if atom.predicate == Predicate::Eq {
        format!("({} {})", atom.sense, fmt_value(atom.expected))
    } else {
        format!(
            "({} {} {})",
            atom.sense,
            fmt_value(atom.expected),
            atom.predicate
        )
    }
}

fn fmt_senselist_form(kw: &str, trigger: &Trigger) -> String {
    let atoms: Vec<String> = trigger.atoms.iter().map(fmt_atom).collect();
    format!("({kw} ({}))", atoms.join(" "))
}

fn fmt_triggered(name: &str, trigger: &Trigger, target: &str, number: Option<u64>) -> String {
    let tail = match number {
        Some(n) => format!(" {n}"),
        None => String::new(),
    };
    format!(
        "({name} {} {target}{tail})",
        fmt_senselist_form("trigger", trigger)
    )
}

fn joined(names: &BTreeSet<String>) -> String {
    names.iter().cloned().collect::<Vec<_>>().join(" ")
}

/// Render a plan in canonical form: 2-space indentation, one drive or
/// element per line, declaration sets sorted, competences then patterns
/// sorted by name, defaults omitted, LF newlines. `parse(serialize(p))` is
/// structurally equal to `p` and `serialize` is a fixpoint of
/// `serialize ∘ parse`.
pub fn serialize(plan: &Plan) -> String {
    let mut s = String::new();
    s.push_str("(plan\n");
    s.push_str(&format!("  (actions ({}))\n", joined(&plan.declared_actions)));
    s.push_str(&format!("  (senses ({}))\n", joined(&plan.declared_senses)));

    let dc = &plan.drive_collection;
    s.push_str(&format!("  (DC {}\n", dc.name));
    if let Some(goal) = &dc.goal {
        s.push_str(&format!("    {}\n", fmt_senselist_form("goal", goal)));
    }
    if let Some(fb) = &dc.fallback_action {
        s.push_str(&format!("    (fallback {fb})\n"));
    }
    if dc.drives.is_empty() {
        s.push_str("    (drives ()))\n");
    } else {
        s.push_str("    (drives (\n");
        for (i, d) in dc.drives.iter().enumerate() {
            let freq = (d.frequency_ticks != 0).then_some(d.frequency_ticks);
            let close = if i + 1 == dc.drives.len() { ")))" } else { "" };
            s.push_str(&format!(
                "      {}{close}\n",
                fmt_triggered(&d.name, &d.trigger, &d.target, freq)
            ));
        }
    }

    for c in plan.competences.values() {
        s.push_str(&format!("  (C {}\n", c.name));
        if let Some(goal) = &c.goal {
            s.push_str(&format!("    {}\n", fmt_senselist_form("goal", goal)));
        }
        if c.elements.is_empty() {
            s.push_str("    (elements ()))\n");
        } else {
            s.push_str("    (elements (\n");
            for (i, e) in c.elements.iter().enumerate() {
                let close = if i + 1 == c.elements.len() { ")))" } else { "" };
                s.push_str(&format!(
                    "      {}{close}\n",
                    fmt_triggered(&e.name, &e.trigger, &e.target, e.retries)
                ));
            }
        }
    }

    for ap in plan.action_patterns.values() {
        s.push_str(&format!("  (AP {} ({}))\n", ap.name, ap.steps.join(" ")));
    }

    s.push_str(")\n");
    s
}

// ---------------------------------------------------------------------------
