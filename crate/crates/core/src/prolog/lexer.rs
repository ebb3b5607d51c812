//! Tokenizer for Prolog source text.

use super::error::{Pos, ReadError};
use super::ops;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Punct {
    Open,
    Close,
    OpenList,
    CloseList,
    Comma,
    Bar,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Open => "(",
            Punct::Close => ")",
            Punct::OpenList => "[",
            Punct::CloseList => "]",
            Punct::Comma => ",",
            Punct::Bar => "|",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    /// A name: unquoted identifier, symbol-char run, solo char, or quoted text.
    Atom(String),
    Var(String),
    /// Unsigned integer literal; sign handling belongs to the parser.
    Int(u64),
    Float(f64),
    Punct(Punct),
    /// `?-`
    QueryMark,
    /// `:-`
    Neck,
    /// An unquoted name present in the operator table.
    Operator(String),
    /// A `.` followed by layout, `%` or end of input.
    EndDot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
}

impl Token {
    /// True when `next` starts exactly where this token ends.
    pub fn abuts(&self, next: &Token) -> bool {
        self.end == next.start
    }
}

pub fn is_symbol_char(c: char) -> bool {
    matches!(
        c,
        '+' | '-' | '*' | '/' | '\\' | '^' | '<' | '>' | '=' | '~' | ':' | '.' | '?' | '@' | '#'
            | '&' | '$'
    )
}

fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.offset..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.column)
    }

    fn error(&self, message: impl Into<String>, pos: Pos) -> ReadError {
        ReadError::Lexical {
            message: message.into(),
            pos,
        }
    }

    fn skip_layout(&mut self) -> Result<(), ReadError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let open = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(self.error("unterminated block comment", open)),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.offset;
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        &self.src[start..self.offset]
    }

    fn quoted(&mut self, quote: char, open: Pos) -> Result<String, ReadError> {
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        text.push(quote);
                    } else {
                        return Ok(text);
                    }
                }
                Some(c) => text.push(c),
                None => return Err(self.error("unterminated quoted atom", open)),
            }
        }
    }

    fn number(&mut self, pos: Pos) -> Result<TokenKind, ReadError> {
        let start = self.offset;
        self.take_while(|c| c.is_ascii_digit());
        let is_float = self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit());
        if !is_float {
            let digits = &self.src[start..self.offset];
            return digits
                .parse::<u64>()
                .map(TokenKind::Int)
                .map_err(|_| self.error(format!("integer literal {digits} is too large"), pos));
        }
        self.bump();
        self.take_while(|c| c.is_ascii_digit());
        if matches!(self.peek(), Some('e' | 'E')) {
            let signed = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if signed { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    self.bump();
                }
                self.take_while(|c| c.is_ascii_digit());
            }
        }
        let text = &self.src[start..self.offset];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("malformed float literal {text}"), pos))?;
        if !value.is_finite() {
            return Err(self.error(format!("float literal {text} is out of range"), pos));
        }
        Ok(TokenKind::Float(value))
    }

    fn next_token(&mut self) -> Result<Option<Token>, ReadError> {
        self.skip_layout()?;
        let pos = self.pos();
        let start = self.offset;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let kind = match c {
            '(' | ')' | '[' | ']' | ',' | '|' => {
                self.bump();
                TokenKind::Punct(match c {
                    '(' => Punct::Open,
                    ')' => Punct::Close,
                    '[' => Punct::OpenList,
                    ']' => Punct::CloseList,
                    ',' => Punct::Comma,
                    _ => Punct::Bar,
                })
            }
            '!' => {
                self.bump();
                TokenKind::Atom("!".into())
            }
            ';' => {
                self.bump();
                TokenKind::Operator(";".into())
            }
            '\'' | '"' => TokenKind::Atom(self.quoted(c, pos)?),
            '0'..='9' => self.number(pos)?,
            '.' if self
                .peek_at(1)
                .is_none_or(|n| n.is_whitespace() || n == '%') =>
            {
                self.bump();
                TokenKind::EndDot
            }
            c if is_symbol_char(c) => {
                let name = self.take_while(is_symbol_char);
                match name {
                    ":-" => TokenKind::Neck,
                    "?-" => TokenKind::QueryMark,
                    _ if ops::is_op(name) => TokenKind::Operator(name.into()),
                    _ => TokenKind::Atom(name.into()),
                }
            }
            c if c.is_uppercase() || c == '_' => TokenKind::Var(self.take_while(is_alnum).into()),
            c if c.is_alphabetic() => {
                let name = self.take_while(is_alnum);
                if ops::is_alpha_op(name) {
                    TokenKind::Operator(name.into())
                } else {
                    TokenKind::Atom(name.into())
                }
            }
            other => return Err(self.error(format!("unexpected character {other:?}"), pos)),
        };
        Ok(Some(Token {
            kind,
            pos,
            start,
            end: self.offset,
        }))
    }
}

/// Splits `source` into tokens, discarding layout and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ReadError> {
    let mut lexer = Lexer {
        src: source,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        tokens.push(tok);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    fn atom(s: &str) -> TokenKind {
        TokenKind::Atom(s.into())
    }

    fn var(s: &str) -> TokenKind {
        TokenKind::Var(s.into())
    }

    #[test]
    fn hello_world_query() {
        use Punct::*;
        assert_eq!(
            kinds("?-msg(X), write(X)."),
            vec![
                TokenKind::QueryMark,
                atom("msg"),
                TokenKind::Punct(Open),
                var("X"),
                TokenKind::Punct(Close),
                TokenKind::Punct(Comma),
                atom("write"),
                TokenKind::Punct(Open),
                var("X"),
                TokenKind::Punct(Close),
                TokenKind::EndDot,
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(kinds("").is_empty());
        assert!(kinds("  % just a comment\n /* and a block */ ").is_empty());
    }

    #[test]
    fn quoted_atom_keeps_interior() {
        assert_eq!(kinds("'Hello, World!'"), vec![atom("Hello, World!")]);
        assert_eq!(kinds("'it''s'"), vec![atom("it's")]);
        assert_eq!(kinds("\"dq\""), vec![atom("dq")]);
        assert_eq!(kinds("'<br>'"), vec![atom("<br>")]);
    }

    #[test]
    fn end_dot_versus_other_dots() {
        assert_eq!(kinds("1.5."), vec![TokenKind::Float(1.5), TokenKind::EndDot]);
        assert_eq!(kinds("a.b"), vec![atom("a"), atom("."), atom("b")]);
        assert_eq!(kinds("x.% c"), vec![atom("x"), TokenKind::EndDot]);
    }

    #[test]
    fn operators_and_necks() {
        assert_eq!(
            kinds("p :- X is 1+2, \\+ q."),
            vec![
                atom("p"),
                TokenKind::Neck,
                var("X"),
                TokenKind::Operator("is".into()),
                TokenKind::Int(1),
                TokenKind::Operator("+".into()),
                TokenKind::Int(2),
                TokenKind::Punct(Punct::Comma),
                TokenKind::Operator("\\+".into()),
                atom("q"),
                TokenKind::EndDot,
            ]
        );
    }

    #[test]
    fn floats_with_exponents() {
        assert_eq!(kinds("1.0e-7"), vec![TokenKind::Float(1.0e-7)]);
        assert_eq!(kinds("2.5E10"), vec![TokenKind::Float(2.5e10)]);
    }

    #[test]
    fn positions_are_tracked() {
        let toks = tokenize("a.\n  foo(B)").unwrap();
        assert_eq!(toks[0].pos, Pos::new(1, 1));
        assert_eq!(toks[2].pos, Pos::new(2, 3));
        assert_eq!(toks[4].pos, Pos::new(2, 7));
    }

    #[test]
    fn lexical_errors_carry_position() {
        let err = tokenize("foo('abc").unwrap_err();
        assert!(matches!(err, ReadError::Lexical { pos, .. } if pos == Pos::new(1, 5)));
        let err = tokenize("\n /* open").unwrap_err();
        assert!(matches!(err, ReadError::Lexical { pos, .. } if pos == Pos::new(2, 2)));
        let err = tokenize("a{b}").unwrap_err();
        assert!(matches!(err, ReadError::Lexical { pos, .. } if pos == Pos::new(1, 2)));
        assert!(tokenize("99999999999999999999").is_err());
    }
}
