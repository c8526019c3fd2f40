//! Text formats: terms, procs, roles, runtime values, transcripts,
//! stores, and valuations, with printers and parsers that round-trip.
//!
//! Proc statements print one per line in constructor form, e.g.
//! `Bind (Pr (Dt 1) (Dt 2), L 4) (Pair (L 2) (L 3))`. A trailing `;` is
//! accepted after any statement. `(* ... *)` block comments and `#` line
//! comments are skipped wherever they appear. `Same` is accepted as an
//! alias for `Csame`.

use std::fmt::Write as _;

use crate::proc_ir::{Expr, Loc, Proc, Stmt};
use crate::runtime::RtVal;
use crate::semantics::{Transcript, Valuation};
use crate::terms::{Act, Role, Sort, Term};

/// A parse failure, with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    MapsTo,
    Ident(String),
    Nat(u64),
    Str(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Equals => "'='".into(),
            Tok::MapsTo => "'|->'".into(),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Nat(n) => format!("number {n}"),
            Tok::Str(s) => format!("string {s:?}"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, expected: &str, found: String) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            expected: expected.to_string(),
            found,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'(') if self.src.get(self.pos + 1) == Some(&b'*') => {
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some(b'*') if self.peek() == Some(b')') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(self.error("'*)'", "end of input".into())),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, u32, u32)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia()?;
            let (line, col) = (self.line, self.col);
            let c = match self.peek() {
                Some(c) => c,
                None => return Ok(out),
            };
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b';' => {
                    self.bump();
                    continue;
                }
                b'=' => {
                    self.bump();
                    Tok::Equals
                }
                b'|' => {
                    self.bump();
                    if self.peek() == Some(b'-') {
                        self.bump();
                        if self.peek() == Some(b'>') {
                            self.bump();
                            Tok::MapsTo
                        } else {
                            return Err(self.error("'|->'", "'|-'".into()));
                        }
                    } else {
                        return Err(self.error("'|->'", "'|'".into()));
                    }
                }
                b'"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some(b'"') => break,
                            Some(b'\\') => match self.bump() {
                                Some(b'"') => s.push('"'),
                                Some(b'\\') => s.push('\\'),
                                Some(b'n') => s.push('\n'),
                                other => {
                                    return Err(self.error(
                                        "escape character",
                                        other
                                            .map(|c| (c as char).to_string())
                                            .unwrap_or_else(|| "end of input".into()),
                                    ))
                                }
                            },
                            Some(c) => s.push(c as char),
                            None => return Err(self.error("closing '\"'", "end of input".into())),
                        }
                    }
                    Tok::Str(s)
                }
                b'0'..=b'9' => {
                    let mut n: u64 = 0;
                    while let Some(c @ b'0'..=b'9') = self.peek() {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add((c - b'0') as u64))
                            .ok_or_else(|| self.error("smaller number", "overflow".into()))?;
                        self.bump();
                    }
                    Tok::Nat(n)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == b'_' {
                            s.push(c as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err(self.error("a token", format!("'{}'", other as char)));
                }
            };
            out.push((tok, line, col));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: Lexer::new(src).tokenize()?,
            pos: 0,
        })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn error(&self, expected: &str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((tok, line, col)) => ParseError {
                line: *line,
                col: *col,
                expected: expected.to_string(),
                found: tok.describe(),
            },
            None => {
                let (line, col) = self.toks.last().map(|(_, l, c)| (*l, *c)).unwrap_or((1, 1));
                ParseError {
                    line,
                    col,
                    expected: expected.to_string(),
                    found: "end of input".into(),
                }
            }
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn next(&mut self, expected: &str) -> Result<Tok, ParseError> {
        let tok = self
            .toks
            .get(self.pos)
            .map(|(t, _, _)| t.clone())
            .ok_or_else(|| self.error(expected))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn ident(&mut self, expected: &str) -> Result<String, ParseError> {
        match self.next(expected)? {
            Tok::Ident(s) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.error(expected))
            }
        }
    }

    fn nat(&mut self, expected: &str) -> Result<u64, ParseError> {
        match self.next(expected)? {
            Tok::Nat(n) => Ok(n),
            _ => {
                self.pos -= 1;
                Err(self.error(expected))
            }
        }
    }

    fn nat32(&mut self, expected: &str) -> Result<u32, ParseError> {
        let n = self.nat(expected)?;
        u32::try_from(n).map_err(|_| self.error("index fitting in 32 bits"))
    }

    fn string(&mut self, expected: &str) -> Result<String, ParseError> {
        match self.next(expected)? {
            Tok::Str(s) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.error(expected))
            }
        }
    }

    fn sort(&mut self) -> Result<Sort, ParseError> {
        let name = self.ident("a sort")?;
        match name.as_str() {
            "Chan" => Ok(Sort::Chan),
            "Data" => Ok(Sort::Data),
            "Name" => Ok(Sort::Name),
            "Text" => Ok(Sort::Text),
            "Skey" => Ok(Sort::Skey),
            "Akey" => Ok(Sort::Akey),
            "Ikey" => Ok(Sort::Ikey),
            "Mesg" => Ok(Sort::Mesg),
            _ => {
                self.pos -= 1;
                Err(self.error("a sort"))
            }
        }
    }

    /// A key index: either a bare natural or a wrapped `(Av n)` / `(Sv n)`.
    fn key_index(&mut self, wrapper: &str) -> Result<u32, ParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.expect(Tok::LParen, "'('")?;
            let name = self.ident(wrapper)?;
            if name != wrapper {
                self.pos -= 1;
                return Err(self.error(wrapper));
            }
            let n = self.nat32("a key index")?;
            self.expect(Tok::RParen, "')'")?;
            Ok(n)
        } else {
            self.nat32("a key index")
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::LParen, "'(' starting a term")?;
        let t = self.term_body()?;
        self.expect(Tok::RParen, "')' closing a term")?;
        Ok(t)
    }

    /// A term without its outer parentheses, as it appears on the left
    /// of a bind.
    fn term_body(&mut self) -> Result<Term, ParseError> {
        let head = self.ident("a term constructor")?;
        let t = match head.as_str() {
            "Ch" => Term::Ch(self.nat32("a channel index")?),
            "Tx" => Term::Tx(self.nat32("a text index")?),
            "Dt" => Term::Dt(self.nat32("a data index")?),
            "Nm" => Term::Nm(self.nat32("a name index")?),
            "Mg" => Term::Mg(self.nat32("a variable index")?),
            "Sk" => Term::Sk(self.key_index("Sv")?),
            "Ak" => Term::Ak(self.key_index("Av")?),
            "Ik" => Term::Ik(self.key_index("Av")?),
            "Qt" => Term::Qt(self.string("a quoted string")?),
            "Pr" => {
                let a = self.term()?;
                let b = self.term()?;
                Term::pr(a, b)
            }
            "En" => {
                let p = self.term()?;
                let k = self.term()?;
                Term::en(p, k)
            }
            "Hs" => Term::hs(self.term()?),
            _ => {
                self.pos -= 1;
                return Err(self.error("a term constructor"));
            }
        };
        Ok(t)
    }

    fn loc(&mut self) -> Result<Loc, ParseError> {
        self.expect(Tok::LParen, "'(' starting a location")?;
        let name = self.ident("'L'")?;
        if name != "L" {
            self.pos -= 1;
            return Err(self.error("'L'"));
        }
        let n = self.nat32("a location index")?;
        self.expect(Tok::RParen, "')' closing a location")?;
        Ok(Loc(n))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let head = self.ident("an expression operator")?;
        let e = match head.as_str() {
            "Param" => Expr::Param(self.nat32("a parameter index")?),
            "Read" => Expr::Read(self.nat32("a read index")?),
            "Genr" => {
                let n = self.nat32("a generation index")?;
                Expr::Genr(n, self.sort()?)
            }
            "Quot" => Expr::QuotE(self.string("a quoted string")?),
            "Pair" => Expr::PairE(self.loc()?, self.loc()?),
            "Encr" => Expr::EncrE(self.loc()?, self.loc()?),
            "Decr" => Expr::DecrE(self.loc()?, self.loc()?),
            "Frst" => Expr::Frst(self.loc()?),
            "Scnd" => Expr::Scnd(self.loc()?),
            "Hash" => Expr::HashE(self.loc()?),
            "PubOf" => Expr::PubOf(self.loc()?),
            _ => {
                self.pos -= 1;
                return Err(self.error("an expression operator"));
            }
        };
        Ok(e)
    }

    fn act_of_loc(&mut self) -> Result<Act<Loc>, ParseError> {
        self.expect(Tok::LParen, "'(' starting an event")?;
        let head = self.ident("an event constructor")?;
        let act = match head.as_str() {
            "Prm" => Act::Prm(self.loc()?),
            "Ret" => Act::Ret(self.loc()?),
            "Rcv" => Act::Rcv(self.loc()?, self.loc()?),
            "Snd" => Act::Snd(self.loc()?, self.loc()?),
            _ => {
                self.pos -= 1;
                return Err(self.error("an event constructor"));
            }
        };
        self.expect(Tok::RParen, "')' closing an event")?;
        Ok(act)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let head = self.ident("a statement keyword")?;
        let stmt = match head.as_str() {
            "Evnt" => Stmt::Evnt(self.act_of_loc()?),
            "Bind" => {
                self.expect(Tok::LParen, "'(' after Bind")?;
                let t = self.term_body()?;
                self.expect(Tok::Comma, "','")?;
                let name = self.ident("'L'")?;
                if name != "L" {
                    self.pos -= 1;
                    return Err(self.error("'L'"));
                }
                let v = Loc(self.nat32("a location index")?);
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::LParen, "'(' before the expression")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')' closing the expression")?;
                Stmt::Bind(t, v, e)
            }
            "Csrt" => Stmt::Csrt(self.loc()?, self.sort()?),
            "Csame" | "Same" => Stmt::Csame(self.loc()?, self.loc()?),
            "Ckypr" => Stmt::Ckypr(self.loc()?, self.loc()?),
            "Chash" => Stmt::Chash(self.loc()?, self.loc()?),
            "Cquot" => Stmt::Cquot(self.loc()?, self.string("a quoted string")?),
            "Comm" => Stmt::Comm(self.string("a comment string")?),
            _ => {
                self.pos -= 1;
                return Err(self.error("a statement keyword"));
            }
        };
        Ok(stmt)
    }

    fn act_of_term(&mut self) -> Result<Act<Term>, ParseError> {
        self.expect(Tok::LParen, "'(' starting an action")?;
        let head = self.ident("an action constructor")?;
        let act = match head.as_str() {
            "Prm" => Act::Prm(self.term()?),
            "Ret" => Act::Ret(self.term()?),
            "Rcv" => {
                let ch = self.term()?;
                Act::Rcv(ch, self.term()?)
            }
            "Snd" => {
                let ch = self.term()?;
                Act::Snd(ch, self.term()?)
            }
            _ => {
                self.pos -= 1;
                return Err(self.error("an action constructor"));
            }
        };
        self.expect(Tok::RParen, "')' closing an action")?;
        Ok(act)
    }

    fn rtval(&mut self) -> Result<RtVal, ParseError> {
        let head = self.ident("a runtime value constructor")?;
        let v = match head.as_str() {
            "Atom" => {
                self.expect(Tok::LBracket, "'['")?;
                let sort = self.sort()?;
                if !sort.is_base() || sort == Sort::Akey || sort == Sort::Ikey {
                    return Err(self.error("an atom sort"));
                }
                self.expect(Tok::Comma, "','")?;
                let id = self.nat("an atom id")?;
                self.expect(Tok::RBracket, "']'")?;
                RtVal::Atom(sort, id)
            }
            "Priv" => {
                self.expect(Tok::LBracket, "'['")?;
                let id = self.nat("a key id")?;
                self.expect(Tok::RBracket, "']'")?;
                RtVal::Priv(id)
            }
            "Pub" => {
                self.expect(Tok::LBracket, "'['")?;
                let id = self.nat("a key id")?;
                self.expect(Tok::RBracket, "']'")?;
                RtVal::Pub(id)
            }
            "Pair" => {
                self.expect(Tok::LParen, "'('")?;
                let a = self.rtval()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.rtval()?;
                self.expect(Tok::RParen, "')'")?;
                RtVal::pair(a, b)
            }
            "Hash" => {
                self.expect(Tok::LParen, "'('")?;
                let a = self.rtval()?;
                self.expect(Tok::RParen, "')'")?;
                RtVal::hash(a)
            }
            "Quote" => {
                self.expect(Tok::LParen, "'('")?;
                let s = self.string("a quoted string")?;
                self.expect(Tok::RParen, "')'")?;
                RtVal::Quote(s)
            }
            "Enc" => {
                self.expect(Tok::LBracket, "'['")?;
                let tagword = self.ident("'tag'")?;
                if tagword != "tag" {
                    self.pos -= 1;
                    return Err(self.error("'tag'"));
                }
                self.expect(Tok::Equals, "'='")?;
                let tag = self.nat("a tag")?;
                self.expect(Tok::RBracket, "']'")?;
                self.expect(Tok::LParen, "'('")?;
                let p = self.rtval()?;
                self.expect(Tok::Comma, "','")?;
                let k = self.rtval()?;
                self.expect(Tok::RParen, "')'")?;
                RtVal::enc(p, k, tag)
            }
            _ => {
                self.pos -= 1;
                return Err(self.error("a runtime value constructor"));
            }
        };
        Ok(v)
    }

    fn act_of_rtval(&mut self) -> Result<Act<RtVal>, ParseError> {
        let head = self.ident("an event constructor")?;
        let act = match head.as_str() {
            "Prm" => Act::Prm(self.rtval()?),
            "Ret" => Act::Ret(self.rtval()?),
            "Rcv" => {
                let ch = self.rtval()?;
                Act::Rcv(ch, self.rtval()?)
            }
            "Snd" => {
                let ch = self.rtval()?;
                Act::Snd(ch, self.rtval()?)
            }
            _ => {
                self.pos -= 1;
                return Err(self.error("an event constructor"));
            }
        };
        Ok(act)
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if !p.at_end() {
        return Err(p.error("end of input"));
    }
    Ok(t)
}

pub fn parse_proc(src: &str) -> Result<Proc, ParseError> {
    let mut p = Parser::new(src)?;
    let mut stmts = Vec::new();
    while !p.at_end() {
        stmts.push(p.stmt()?);
    }
    Ok(Proc { stmts })
}

pub fn parse_role(src: &str) -> Result<Role, ParseError> {
    let mut p = Parser::new(src)?;
    let mut actions = Vec::new();
    while !p.at_end() {
        actions.push(p.act_of_term()?);
    }
    Ok(actions)
}

pub fn parse_rtval(src: &str) -> Result<RtVal, ParseError> {
    let mut p = Parser::new(src)?;
    let v = p.rtval()?;
    if !p.at_end() {
        return Err(p.error("end of input"));
    }
    Ok(v)
}

pub fn parse_transcript(src: &str) -> Result<Transcript, ParseError> {
    let mut p = Parser::new(src)?;
    let mut events = Vec::new();
    while !p.at_end() {
        events.push(p.act_of_rtval()?);
    }
    Ok(events)
}

pub fn parse_store(src: &str) -> Result<Vec<(Loc, RtVal)>, ParseError> {
    let mut p = Parser::new(src)?;
    let mut entries = Vec::new();
    while !p.at_end() {
        let name = p.ident("'L'")?;
        if name != "L" {
            p.pos -= 1;
            return Err(p.error("'L'"));
        }
        let loc = Loc(p.nat32("a location index")?);
        p.expect(Tok::Equals, "'='")?;
        entries.push((loc, p.rtval()?));
    }
    Ok(entries)
}

pub fn parse_valuation(src: &str) -> Result<Valuation, ParseError> {
    let mut p = Parser::new(src)?;
    let mut pairs = Vec::new();
    while !p.at_end() {
        let t = p.term()?;
        p.expect(Tok::MapsTo, "'|->'")?;
        pairs.push((t, p.rtval()?));
    }
    Ok(Valuation::from_pairs(pairs))
}

/// A term without outer parentheses, as it appears on the left of a
/// bind: `Bind (Ch 1, L 1) (Param 1)`.
pub fn print_term_bare(t: &Term) -> String {
    let printed = print_term(t);
    printed[1..printed.len() - 1].to_string()
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Ch(n) => format!("(Ch {n})"),
        Term::Tx(n) => format!("(Tx {n})"),
        Term::Dt(n) => format!("(Dt {n})"),
        Term::Nm(n) => format!("(Nm {n})"),
        Term::Sk(n) => format!("(Sk {n})"),
        Term::Ak(n) => format!("(Ak (Av {n}))"),
        Term::Ik(n) => format!("(Ik (Av {n}))"),
        Term::Mg(n) => format!("(Mg {n})"),
        Term::Qt(s) => format!("(Qt {})", quote_str(s)),
        Term::Pr(a, b) => format!("(Pr {} {})", print_term(a), print_term(b)),
        Term::En(p, k) => format!("(En {} {})", print_term(p), print_term(k)),
        Term::Hs(a) => format!("(Hs {})", print_term(a)),
    }
}

fn quote_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::PairE(a, b) => format!("Pair ({a}) ({b})"),
        Expr::Frst(a) => format!("Frst ({a})"),
        Expr::Scnd(a) => format!("Scnd ({a})"),
        Expr::EncrE(a, b) => format!("Encr ({a}) ({b})"),
        Expr::DecrE(a, b) => format!("Decr ({a}) ({b})"),
        Expr::HashE(a) => format!("Hash ({a})"),
        Expr::QuotE(s) => format!("Quot {}", quote_str(s)),
        Expr::PubOf(a) => format!("PubOf ({a})"),
        Expr::Genr(n, sort) => format!("Genr {n} {sort}"),
        Expr::Param(n) => format!("Param {n}"),
        Expr::Read(n) => format!("Read {n}"),
    }
}

pub fn print_stmt(s: &Stmt) -> String {
    match s {
        Stmt::Evnt(a) => format!("Evnt {}", print_act(a, |l| format!("({l})"))),
        Stmt::Bind(t, v, e) => format!("Bind ({}, {v}) ({})", print_term_bare(t), print_expr(e)),
        Stmt::Csrt(v, sort) => format!("Csrt ({v}) {sort}"),
        Stmt::Csame(a, b) => format!("Csame ({a}) ({b})"),
        Stmt::Ckypr(a, b) => format!("Ckypr ({a}) ({b})"),
        Stmt::Chash(a, b) => format!("Chash ({a}) ({b})"),
        Stmt::Cquot(v, s) => format!("Cquot ({v}) {}", quote_str(s)),
        Stmt::Comm(s) => format!("Comm {}", quote_str(s)),
    }
}

fn print_act<X>(a: &Act<X>, mut pr: impl FnMut(&X) -> String) -> String {
    match a {
        Act::Prm(x) => format!("(Prm {})", pr(x)),
        Act::Ret(x) => format!("(Ret {})", pr(x)),
        Act::Rcv(x, y) => format!("(Rcv {} {})", pr(x), pr(y)),
        Act::Snd(x, y) => format!("(Snd {} {})", pr(x), pr(y)),
    }
}

pub fn print_proc(p: &Proc) -> String {
    let mut out = String::new();
    for stmt in &p.stmts {
        let _ = writeln!(out, "{}", print_stmt(stmt));
    }
    out
}

pub fn print_role(role: &[Act<Term>]) -> String {
    let mut out = String::new();
    for action in role {
        let _ = writeln!(out, "{}", print_act(action, print_term));
    }
    out
}

pub fn print_rtval(v: &RtVal) -> String {
    match v {
        RtVal::Atom(sort, id) => format!("Atom[{sort},{id}]"),
        RtVal::Priv(id) => format!("Priv[{id}]"),
        RtVal::Pub(id) => format!("Pub[{id}]"),
        RtVal::Pair(a, b) => format!("Pair({}, {})", print_rtval(a), print_rtval(b)),
        RtVal::Hash(a) => format!("Hash({})", print_rtval(a)),
        RtVal::Quote(s) => format!("Quote({})", quote_str(s)),
        RtVal::Enc { plain, key, tag } => {
            format!(
                "Enc[tag={tag}]({}, {})",
                print_rtval(plain),
                print_rtval(key)
            )
        }
    }
}

pub fn print_transcript(tr: &Transcript) -> String {
    let mut out = String::new();
    for event in tr {
        let _ = writeln!(
            out,
            "{}",
            match event {
                Act::Prm(v) => format!("Prm {}", print_rtval(v)),
                Act::Ret(v) => format!("Ret {}", print_rtval(v)),
                Act::Rcv(c, v) => format!("Rcv {} {}", print_rtval(c), print_rtval(v)),
                Act::Snd(c, v) => format!("Snd {} {}", print_rtval(c), print_rtval(v)),
            }
        );
    }
    out
}

pub fn print_store(entries: &[(Loc, RtVal)]) -> String {
    let mut out = String::new();
    for (loc, v) in entries {
        let _ = writeln!(out, "{loc} = {}", print_rtval(v));
    }
    out
}

pub fn print_valuation(v: &Valuation) -> String {
    let mut out = String::new();
    for (t, r) in v.pairs() {
        let _ = writeln!(out, "{} |-> {}", print_term(t), print_rtval(r));
    }
    out
}
