//! GE-query text to syntax tree.
//!
//! ```text
//! query      := SELECT call FROM source [alias] [GROUP BY call]
//!               SUMMARIZE BY summarizer (',' summarizer)* [';']
//! summarizer := call [IDENT '.' call]
//! call       := IDENT '(' (arg (',' arg)*)? ')'
//! source     := IDENT | call
//! arg        := INT | IDENT | STRING | '.' | '*'
//! ```
//!
//! Keywords are case-insensitive. Identifiers may end in primes (`G'`).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Literal {
    Int(i64),
    Ident(String),
    Str(String),
    /// `.` or `*`: "every element".
    Wildcard,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Ident(s) => write!(f, "{s}"),
            Literal::Str(s) => write!(f, "{s:?}"),
            Literal::Wildcard => write!(f, "."),
        }
    }
}

/// Position of a token, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Call {
    pub name: String,
    pub args: Vec<Literal>,
    pub pos: Pos,
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceExpr {
    Named { name: String, pos: Pos },
    Call(Call),
}

/// A summarizer, optionally refined by a qualified call such as
/// `COUNT(.) e.Closeness()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummarizerExpr {
    pub call: Call,
    pub by: Option<(String, Call)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryAst {
    pub select: Call,
    pub from: SourceExpr,
    pub alias: Option<String>,
    pub group_by: Option<Call>,
    pub summarize: Vec<SummarizerExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Star,
    Semi,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Semi => write!(f, "`;`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let start = i;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '*' => Tok::Star,
            ';' => Tok::Semi,
            '"' | '\'' => {
                let quote = c;
                let mut s = String::new();
                i += 1;
                while i < chars.len() && chars[i] != quote {
                    if chars[i] == '\n' {
                        break;
                    }
                    s.push(chars[i]);
                    i += 1;
                }
                if i >= chars.len() || chars[i] != quote {
                    return Err(SyntaxError {
                        pos,
                        message: "unterminated string".into(),
                    });
                }
                col += (i - start + 1) as u32;
                i += 1;
                out.push((Tok::Str(s), pos));
                continue;
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += (i - start) as u32;
                let v = s.parse().map_err(|_| SyntaxError {
                    pos,
                    message: format!("integer `{s}` out of range"),
                })?;
                out.push((Tok::Int(v), pos));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                while i < chars.len() && chars[i] == '\'' {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += (i - start) as u32;
                out.push((Tok::Ident(s), pos));
                continue;
            }
            other => {
                return Err(SyntaxError {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += 1;
        col += 1;
    }
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["select", "from", "group", "by", "summarize"];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s.to_ascii_lowercase().as_str())
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |&(_, p)| p)
    }

    fn error<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".into(),
        };
        Err(SyntaxError {
            pos: self.pos(),
            message: format!("expected {expected}, found {found}"),
        })
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.at_keyword(kw) {
            self.at += 1;
            Ok(())
        } else {
            self.error(&kw.to_ascii_uppercase())
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !is_keyword(s) => {
                let (Tok::Ident(s), p) = self.next().expect("peeked") else {
                    unreachable!()
                };
                Ok((s, p))
            }
            _ => self.error(what),
        }
    }

    fn call(&mut self) -> Result<Call, SyntaxError> {
        let (name, pos) = self.ident("a function name")?;
        if !self.eat(&Tok::LParen) {
            return self.error("`(`");
        }
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.arg()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return self.error("`,` or `)`");
                }
            }
        }
        Ok(Call { name, args, pos })
    }

    fn arg(&mut self) -> Result<Literal, SyntaxError> {
        let lit = match self.peek() {
            Some(Tok::Int(i)) => Literal::Int(*i),
            Some(Tok::Ident(s)) => Literal::Ident(s.clone()),
            Some(Tok::Str(s)) => Literal::Str(s.clone()),
            Some(Tok::Dot | Tok::Star) => Literal::Wildcard,
            _ => return self.error("an argument"),
        };
        self.at += 1;
        Ok(lit)
    }

    fn summarizer(&mut self) -> Result<SummarizerExpr, SyntaxError> {
        let call = self.call()?;
        let by = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(q)), Some(Tok::Dot)) if !is_keyword(q) => {
                let (q, _) = self.ident("a qualifier")?;
                self.at += 1;
                Some((q, self.call()?))
            }
            _ => None,
        };
        Ok(SummarizerExpr { call, by })
    }

    fn query(&mut self) -> Result<QueryAst, SyntaxError> {
        self.keyword("select")?;
        let select = self.call()?;
        self.keyword("from")?;
        let from = match self.peek_at(1) {
            Some(Tok::LParen) => SourceExpr::Call(self.call()?),
            _ => {
                let (name, pos) = self.ident("a graph name or source function")?;
                SourceExpr::Named { name, pos }
            }
        };
        let alias = match self.peek() {
            Some(Tok::Ident(s)) if !is_keyword(s) => Some(self.ident("an alias")?.0),
            _ => None,
        };
        let group_by = if self.at_keyword("group") {
            self.at += 1;
            self.keyword("by")?;
            Some(self.call()?)
        } else {
            None
        };
        self.keyword("summarize")?;
        self.keyword("by")?;
        let mut summarize = vec![self.summarizer()?];
        while self.eat(&Tok::Comma) {
            summarize.push(self.summarizer()?);
        }
        self.eat(&Tok::Semi);
        if self.peek().is_some() {
            return self.error("end of query");
        }
        Ok(QueryAst {
            select,
            from,
            alias,
            group_by,
            summarize,
        })
    }
}

pub fn parse_ast(text: &str) -> Result<QueryAst, SyntaxError> {
    let toks = lex(text)?;
    let lines = text.split('\n').count() as u32;
    let last = text.rsplit('\n').next().unwrap_or("");
    let end = Pos {
        line: lines.max(1),
        col: last.chars().count() as u32 + 1,
    };
    Parser { toks, at: 0, end }.query()
}
