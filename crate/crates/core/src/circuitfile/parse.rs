use std::collections::HashSet;

use crate::optics::{Circuit, Element, ElementKind, Polarization, Source, TransverseMode};

use super::{CircuitDocument, ParseError, ParseErrorKind as K, Span, Statement, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Ident,
    Number,
    Punct,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    column: usize,
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let tok = if matches!(c, '(' | ')' | ',' | '=') {
            i += 1;
            Tok::Punct
        } else if c == '-' && next == Some('>') {
            i += 2;
            Tok::Punct
        } else if c.is_ascii_digit()
            || c == '.'
            || (matches!(c, '+' | '-') && next.is_some_and(|n| n.is_ascii_digit() || n == '.'))
        {
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let after = chars.get(i + 1).copied();
                let after2 = chars.get(i + 2).copied();
                let signed = matches!(after, Some('+' | '-')) && after2.is_some_and(|d| d.is_ascii_digit());
                if after.is_some_and(|d| d.is_ascii_digit()) || signed {
                    i += if signed { 2 } else { 1 };
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            // unit suffix
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            Tok::Number
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident
        } else {
            return Err(ParseError {
                kind: K::Lexical,
                line: line_no,
                column: start + 1,
                token: c.to_string(),
                message: "unexpected character".into(),
            });
        };
        out.push(Token {
            tok,
            text: chars[start..i].iter().collect(),
            column: start + 1,
        });
    }
    Ok(out)
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, kind: K, token: Option<&Token>, message: impl Into<String>) -> ParseError {
        let (column, text) = match token {
            Some(t) => (t.column, t.text.clone()),
            None => (self.end_column, String::new()),
        };
        ParseError {
            kind,
            line: self.line,
            column,
            token: text,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.err(K::UnexpectedEnd, None, format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        let t = self.next(what)?;
        if t.tok != Tok::Ident {
            return Err(self.err(K::UnexpectedToken, Some(t), format!("expected {what}")));
        }
        Ok(t)
    }

    fn punct(&mut self, p: &str) -> Result<&'a Token, ParseError> {
        let t = self.next(&format!("`{p}`"))?;
        if t.tok != Tok::Punct || t.text != p {
            return Err(self.err(K::UnexpectedToken, Some(t), format!("expected `{p}`")));
        }
        Ok(t)
    }

    fn keyword(&mut self, kw: &str) -> Result<&'a Token, ParseError> {
        let t = self.next(&format!("`{kw}`"))?;
        if t.tok != Tok::Ident || t.text != kw {
            return Err(self.err(K::UnexpectedToken, Some(t), format!("expected `{kw}`")));
        }
        Ok(t)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) => Err(self.err(K::UnexpectedToken, Some(t), "trailing input")),
            None => Ok(()),
        }
    }
}

fn real(cur: &Cursor, t: &Token, angle: bool) -> Result<f64, ParseError> {
    let invalid = |msg: &str| cur.err(K::InvalidValue, Some(t), msg);
    if t.tok != Tok::Number {
        return Err(invalid("expected a number"));
    }
    let digits = t.text.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    let (num, suffix) = t.text.split_at(digits.len());
    let value: f64 = num.parse().map_err(|_| invalid("malformed number"))?;
    if !value.is_finite() {
        return Err(invalid("number out of range"));
    }
    match suffix {
        "" => Ok(value),
        "deg" if angle => Ok(value.to_radians()),
        "rad" if angle => Ok(value),
        _ => Err(invalid(&format!("unexpected unit suffix `{suffix}`"))),
    }
}

fn declared(cur: &Cursor, t: &Token, paths: &HashSet<String>) -> Result<String, ParseError> {
    if !paths.contains(&t.text) {
        return Err(cur.err(K::UndeclaredPath, Some(t), "declare it with `path` or `source` first"));
    }
    Ok(t.text.clone())
}

fn parse_source(cur: &mut Cursor, paths: &mut HashSet<String>) -> Result<Source, ParseError> {
    let path = cur.ident("source path")?;
    let (mut weight, mut pol, mut mode) = (None, None, None);
    while cur.peek().is_some() {
        let key = cur.ident("key")?;
        cur.punct("=")?;
        let val = cur.next("value")?;
        let dup = |cur: &Cursor| cur.err(K::DuplicateKey, Some(key), "");
        match key.text.as_str() {
            "weight" => {
                if weight.is_some() {
                    return Err(dup(cur));
                }
                let w = real(cur, val, false)?;
                if !(0.0..=1.0).contains(&w) {
                    return Err(cur.err(K::InvalidValue, Some(val), "weight must lie in [0, 1]"));
                }
                weight = Some(w);
            }
            "pol" => {
                if pol.is_some() {
                    return Err(dup(cur));
                }
                pol = Some(
                    val.text
                        .parse::<Polarization>()
                        .map_err(|_| cur.err(K::InvalidValue, Some(val), "expected H or V"))?,
                );
            }
            "mode" => {
                if mode.is_some() {
                    return Err(dup(cur));
                }
                mode = Some(
                    val.text
                        .parse::<TransverseMode>()
                        .map_err(|_| cur.err(K::InvalidValue, Some(val), "expected h or v"))?,
                );
            }
            _ => return Err(cur.err(K::UnknownKey, Some(key), "expected weight, pol or mode")),
        }
    }
    let missing = |k: &str| cur.err(K::MissingKey, None, format!("source needs `{k}=`"));
    let pol = pol.ok_or_else(|| missing("pol"))?;
    let mode = mode.ok_or_else(|| missing("mode"))?;
    paths.insert(path.text.clone());
    Ok(Source {
        path: path.text.clone(),
        weight: weight.unwrap_or(1.0),
        pol,
        mode,
    })
}

fn parse_element(cur: &mut Cursor, paths: &HashSet<String>) -> Result<Element, ParseError> {
    let kind_tok = cur.ident("element kind")?;
    let mut args: Vec<&Token> = Vec::new();
    let mut close = kind_tok;
    if cur.peek().is_some_and(|t| t.text == "(") {
        cur.punct("(")?;
        if cur.peek().is_some_and(|t| t.text == ")") {
            close = cur.punct(")")?;
        } else {
            loop {
                let a = cur.next("argument")?;
                if a.tok == Tok::Punct {
                    return Err(cur.err(K::UnexpectedToken, Some(a), "expected an argument"));
                }
                args.push(a);
                let sep = cur.next("`,` or `)`")?;
                match sep.text.as_str() {
                    "," => continue,
                    ")" => {
                        close = sep;
                        break;
                    }
                    _ => return Err(cur.err(K::UnexpectedToken, Some(sep), "expected `,` or `)`")),
                }
            }
        }
    }
    let arity = |n: usize| -> Result<(), ParseError> {
        if args.len() != n {
            let at = args.get(n).copied().unwrap_or(close);
            return Err(cur.err(
                K::Arity,
                Some(at),
                format!("{} takes {n} argument(s), got {}", kind_tok.text, args.len()),
            ));
        }
        Ok(())
    };
    // placeholder names are replaced once the routes clause is read
    let kind = match kind_tok.text.as_str() {
        "HWP" | "DP" | "PHASE" => {
            arity(1)?;
            let a = real(cur, args[0], true)?;
            match kind_tok.text.as_str() {
                "HWP" => ElementKind::Hwp { angle: a },
                "DP" => ElementKind::DovePrism { angle: a },
                _ => ElementKind::Phase { phi: a },
            }
        }
        "NF" => {
            arity(1)?;
            ElementKind::NeutralFilter {
                t: real(cur, args[0], false)?,
            }
        }
        "BS" => {
            arity(2)?;
            ElementKind::BeamSplitter {
                r: real(cur, args[0], false)?,
                t: real(cur, args[1], false)?,
                transmit: String::new(),
                reflect: String::new(),
            }
        }
        "PBS" => {
            arity(0)?;
            ElementKind::Pbs {
                transmit: String::new(),
                reflect: String::new(),
            }
        }
        "MASK" => {
            arity(1)?;
            ElementKind::Mask {
                mode: args[0]
                    .text
                    .parse()
                    .map_err(|_| cur.err(K::InvalidValue, Some(args[0]), "expected h or v"))?,
            }
        }
        "POLPREP" => {
            arity(1)?;
            ElementKind::PolPrep {
                pol: args[0]
                    .text
                    .parse()
                    .map_err(|_| cur.err(K::InvalidValue, Some(args[0]), "expected H or V"))?,
            }
        }
        "BLOCK" => {
            arity(0)?;
            ElementKind::Block
        }
        _ => {
            return Err(cur.err(
                K::UnknownKind,
                Some(kind_tok),
                "expected HWP, DP, PHASE, NF, BS, PBS, MASK, POLPREP or BLOCK",
            ))
        }
    };
    cur.keyword("on")?;
    let on_tok = cur.ident("path")?;
    let on = declared(cur, on_tok, paths)?;

    let kind = match kind {
        ElementKind::Pbs { .. } | ElementKind::BeamSplitter { .. } => {
            let kw = cur.next("`routes`")?;
            if kw.text != "routes" {
                return Err(cur.err(K::UnexpectedToken, Some(kw), "expected `routes`"));
            }
            let from = cur.ident("path")?;
            if from.text != on {
                return Err(cur.err(K::RouteMismatch, Some(from), format!("routes must start at `{on}`")));
            }
            cur.punct("->")?;
            let t_tok = cur.ident("transmitted path")?;
            let transmit = declared(cur, t_tok, paths)?;
            cur.punct(",")?;
            let r_tok = cur.ident("reflected path")?;
            let reflect = declared(cur, r_tok, paths)?;
            match kind {
                ElementKind::BeamSplitter { r, t, .. } => ElementKind::BeamSplitter {
                    r,
                    t,
                    transmit,
                    reflect,
                },
                _ => ElementKind::Pbs { transmit, reflect },
            }
        }
        other => other,
    };
    cur.finish()?;
    Element::new(kind, on).map_err(|e| cur.err(K::InvalidValue, Some(kind_tok), e.to_string()))
}

/// Parses a complete document; the first error aborts.
pub fn parse_document(text: &str, file_name: Option<&str>) -> Result<CircuitDocument, ParseError> {
    let mut version = None;
    let mut statements = Vec::new();
    let mut paths: HashSet<String> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = lex(raw, line)?;
        let Some(first) = tokens.first() else { continue };
        let last = tokens.last().expect("non-empty");
        let end_column = last.column + last.text.chars().count();
        let mut cur = Cursor {
            tokens: &tokens,
            pos: 1,
            line,
            end_column,
        };
        let span = Span {
            line,
            start_column: first.column,
            end_column,
        };
        if first.tok != Tok::Ident {
            return Err(cur.err(K::UnknownStatement, Some(first), ""));
        }
        let st = match first.text.as_str() {
            "version" => {
                if version.is_some() || !statements.is_empty() {
                    return Err(cur.err(K::Version, Some(first), "`version` must be the first statement"));
                }
                let v = cur.next("version number")?;
                match v.text.parse::<u32>() {
                    Ok(FORMAT_VERSION) => {}
                    _ => return Err(cur.err(K::Version, Some(v), format!("expected {FORMAT_VERSION}"))),
                }
                cur.finish()?;
                version = Some(FORMAT_VERSION);
                continue;
            }
            "path" => {
                let mut names = Vec::new();
                while cur.peek().is_some() {
                    let t = cur.ident("path name")?;
                    names.push(t.text.clone());
                }
                if names.is_empty() {
                    return Err(cur.err(K::Arity, Some(first), "`path` needs at least one name"));
                }
                paths.extend(names.iter().cloned());
                Statement::Path(names)
            }
            "source" => Statement::Source(parse_source(&mut cur, &mut paths)?),
            "element" => Statement::Element(parse_element(&mut cur, &paths)?),
            "sink" => {
                let t = cur.ident("sink path")?;
                let p = declared(&cur, t, &paths)?;
                cur.finish()?;
                Statement::Sink(p)
            }
            _ => {
                return Err(cur.err(
                    K::UnknownStatement,
                    Some(first),
                    "expected version, path, source, element or sink",
                ))
            }
        };
        statements.push((st, span));
    }
    Ok(CircuitDocument {
        version: version.unwrap_or(FORMAT_VERSION),
        file_name: file_name.map(str::to_string),
        statements,
    })
}

pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    parse_document(text, None).map(|d| d.to_circuit())
}
