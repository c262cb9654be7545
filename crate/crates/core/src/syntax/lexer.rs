use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Open,
    Close,
    Symbol(String),
    Var(String),
    Int(u32),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::Symbol(s) => format!("symbol `{s}`"),
            Tok::Var(v) => format!("variable `?{v}`"),
            Tok::Int(n) => format!("integer `{n}`"),
        }
    }
}

/// A parenthesized tree of tokens with source positions.
#[derive(Clone, Debug)]
pub(crate) enum SExpr {
    Atom(Tok, SourceSpan),
    List(Vec<SExpr>, SourceSpan),
}

impl SExpr {
    pub(crate) fn span(&self) -> SourceSpan {
        match self {
            SExpr::Atom(_, s) | SExpr::List(_, s) => *s,
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn span_from(&self, start: usize, line: usize, col: usize) -> SourceSpan {
        SourceSpan { start, end: self.pos, line, column: col }
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump(c);
            } else if c == ';' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump(c);
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Option<(Tok, SourceSpan)>, ParseError> {
        self.skip_trivia();
        let (start, line, col) = (self.pos, self.line, self.col);
        let Some(c) = self.peek() else { return Ok(None) };
        match c {
            '(' => {
                self.bump(c);
                Ok(Some((Tok::Open, self.span_from(start, line, col))))
            }
            ')' => {
                self.bump(c);
                Ok(Some((Tok::Close, self.span_from(start, line, col))))
            }
            _ => {
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';') {
                        break;
                    }
                    self.bump(c);
                }
                let text = &self.src[start..self.pos];
                let span = self.span_from(start, line, col);
                let tok = if let Some(name) = text.strip_prefix('?') {
                    if name.is_empty() || name.contains('?') {
                        return Err(ParseError::new(span, format!("malformed variable `{text}`"), vec!["?name".into()]));
                    }
                    Tok::Var(name.to_string())
                } else if text.chars().all(|c| c.is_ascii_digit()) {
                    let n = text.parse().map_err(|_| {
                        ParseError::new(span, format!("integer `{text}` out of range"), vec!["integer".into()])
                    })?;
                    Tok::Int(n)
                } else if text.contains('#') || text.contains('"') {
                    return Err(ParseError::new(span, format!("illegal character in `{text}`"), vec!["symbol".into()]));
                } else {
                    Tok::Symbol(text.to_string())
                };
                Ok(Some((tok, span)))
            }
        }
    }
}

/// Reads every top-level s-expression in `src`.
pub(crate) fn read_all(src: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut lx = Lexer { src, pos: 0, line: 1, col: 1 };
    let mut stack: Vec<(Vec<SExpr>, SourceSpan)> = Vec::new();
    let mut top = Vec::new();
    while let Some((tok, span)) = lx.next()? {
        match tok {
            Tok::Open => stack.push((Vec::new(), span)),
            Tok::Close => {
                let Some((items, open)) = stack.pop() else {
                    return Err(ParseError::new(span, "unbalanced `)`".into(), vec!["`(`".into(), "end of input".into()]));
                };
                let whole = SourceSpan { start: open.start, end: span.end, line: open.line, column: open.column };
                let list = SExpr::List(items, whole);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            atom => {
                let a = SExpr::Atom(atom, span);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(a),
                    None => top.push(a),
                }
            }
        }
    }
    if let Some((_, open)) = stack.pop() {
        return Err(ParseError::new(
            open,
            format!("unclosed `(` opened at line {} column {}", open.line, open.column),
            vec!["`)`".into()],
        ));
    }
    Ok(top)
}
