//! Operator-precedence reader for terms and program items.

use std::sync::Arc;

use super::error::{Pos, ReadError};
use super::lexer::{tokenize, Punct, Token, TokenKind};
use super::ops;
use super::program::{Clause, ProgramItem, Query};
use super::term::Term;

const ARG_PRIORITY: u32 = 999;
const MAX_PRIORITY: u32 = 1200;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    vars: Vec<(Arc<str>, usize)>,
    next_var: usize,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Parser {
            tokens,
            pos: 0,
            vars: Vec::new(),
            next_var: 0,
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos)?;
        self.pos += 1;
        Some(tok)
    }

    /// Position just past the last token, used for end-of-input errors.
    fn end_pos(&self) -> Pos {
        self.tokens.last().map(|t| t.pos).unwrap_or_default()
    }

    fn error_at(&self, tok: Option<&Token>, message: impl Into<String>) -> ReadError {
        ReadError::Syntax {
            message: message.into(),
            pos: tok.map(|t| t.pos).unwrap_or_else(|| self.end_pos()),
        }
    }

    fn unexpected(&self, tok: Option<&Token>) -> ReadError {
        match tok {
            None => self.error_at(None, "unexpected end of input"),
            Some(t) => self.error_at(Some(t), format!("unexpected {}", describe(&t.kind))),
        }
    }

    fn expect_punct(&mut self, p: Punct) -> Result<(), ReadError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Punct(q),
                ..
            }) if *q == p => {
                self.pos += 1;
                Ok(())
            }
            other => Err(match other {
                None => self.error_at(None, format!("expected `{}` before end of input", p.as_str())),
                Some(t) => self.error_at(
                    Some(t),
                    format!("expected `{}`, found {}", p.as_str(), describe(&t.kind)),
                ),
            }),
        }
    }

    fn variable(&mut self, name: &str) -> Term {
        if name == "_" {
            let id = self.next_var;
            self.next_var += 1;
            return Term::var("_", id);
        }
        if let Some((n, id)) = self.vars.iter().find(|(n, _)| &**n == name) {
            return Term::var(n.clone(), *id);
        }
        let id = self.next_var;
        self.next_var += 1;
        let name: Arc<str> = name.into();
        self.vars.push((name.clone(), id));
        Term::var(name, id)
    }

    /// Parses a term of priority at most `max`, returning it with its
    /// actual priority.
    fn parse(&mut self, max: u32) -> Result<(Term, u32), ReadError> {
        let (mut left, mut left_priority) = self.primary(max)?;
        while let Some(tok) = self.peek() {
            let Some(name) = infix_name(&tok.kind) else {
                break;
            };
            let Some(def) = ops::infix(name) else {
                break;
            };
            if def.priority > max {
                break;
            }
            let (left_max, right_max) = def.infix_arg_limits();
            if left_priority > left_max {
                return Err(self.error_at(
                    Some(tok),
                    format!("operator priority clash at `{name}`"),
                ));
            }
            self.pos += 1;
            let (right, _) = self.parse(right_max)?;
            left = Term::compound(name, vec![left, right]);
            left_priority = def.priority;
        }
        Ok((left, left_priority))
    }

    fn primary(&mut self, max: u32) -> Result<(Term, u32), ReadError> {
        let Some(tok) = self.advance() else {
            return Err(self.unexpected(None));
        };
        match &tok.kind {
            TokenKind::Int(n) => Ok((int_literal(*n, false, tok)?, 0)),
            TokenKind::Float(x) => Ok((Term::Float(*x), 0)),
            TokenKind::Var(name) => Ok((self.variable(name), 0)),
            TokenKind::Punct(Punct::Open) => {
                let (t, _) = self.parse(MAX_PRIORITY)?;
                self.expect_punct(Punct::Close)?;
                Ok((t, 0))
            }
            TokenKind::Punct(Punct::OpenList) => self.list().map(|t| (t, 0)),
            TokenKind::Atom(name) | TokenKind::Operator(name) => self.name_term(tok, name, max),
            TokenKind::Neck => self.name_term(tok, ":-", max),
            TokenKind::QueryMark => self.name_term(tok, "?-", max),
            TokenKind::Punct(_) | TokenKind::EndDot => Err(self.unexpected(Some(tok))),
        }
    }

    fn name_term(&mut self, tok: &Token, name: &str, max: u32) -> Result<(Term, u32), ReadError> {
        let next = self.peek();

        if let Some(next) = next.filter(|n| tok.abuts(n)) {
            if next.kind == TokenKind::Punct(Punct::Open) {
                self.pos += 1;
                let args = self.arguments()?;
                return Ok((Term::compound(name, args), 0));
            }
            if name == "-" && tok.kind == TokenKind::Operator("-".into()) {
                match next.kind {
                    TokenKind::Int(n) => {
                        self.pos += 1;
                        return Ok((int_literal(n, true, next)?, 0));
                    }
                    TokenKind::Float(x) => {
                        self.pos += 1;
                        return Ok((Term::Float(-x), 0));
                    }
                    _ => {}
                }
            }
        }

        let is_operator_token = !matches!(tok.kind, TokenKind::Atom(_));
        if let Some(def) = ops::prefix(name).filter(|_| is_operator_token) {
            if next.is_some_and(|n| starts_operand(&n.kind)) {
                if def.priority > max {
                    return Err(self.error_at(
                        Some(tok),
                        format!("operator priority clash at prefix `{name}`"),
                    ));
                }
                let (arg, _) = self.parse(def.prefix_arg_limit())?;
                return Ok((Term::compound(name, vec![arg]), def.priority));
            }
        }
        Ok((Term::atom(name), 0))
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ReadError> {
        let mut args = vec![self.parse(ARG_PRIORITY)?.0];
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Punct(Punct::Comma)) => {
                    self.pos += 1;
                    args.push(self.parse(ARG_PRIORITY)?.0);
                }
                _ => {
                    self.expect_punct(Punct::Close)?;
                    return Ok(args);
                }
            }
        }
    }

    fn list(&mut self) -> Result<Term, ReadError> {
        if let Some(TokenKind::Punct(Punct::CloseList)) = self.peek().map(|t| &t.kind) {
            self.pos += 1;
            return Ok(Term::nil());
        }
        let mut items = vec![self.parse(ARG_PRIORITY)?.0];
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Punct(Punct::Comma)) => {
                    self.pos += 1;
                    items.push(self.parse(ARG_PRIORITY)?.0);
                }
                Some(TokenKind::Punct(Punct::Bar)) => {
                    self.pos += 1;
                    let tail = self.parse(ARG_PRIORITY)?.0;
                    self.expect_punct(Punct::CloseList)?;
                    return Ok(Term::list_with_tail(items, tail));
                }
                _ => {
                    self.expect_punct(Punct::CloseList)?;
                    return Ok(Term::list(items));
                }
            }
        }
    }

    fn expect_end(&mut self) -> Result<(), ReadError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::EndDot,
                ..
            }) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) if infix_name(&t.kind).is_some_and(|n| ops::infix(n).is_some()) => Err(
                self.error_at(Some(t), format!("operator priority clash at {}", describe(&t.kind))),
            ),
            None => Err(self.error_at(None, "missing end dot `.`")),
            Some(t) => Err(self.error_at(
                Some(t),
                format!("expected end dot `.`, found {}", describe(&t.kind)),
            )),
        }
    }
}

fn int_literal(n: u64, negative: bool, tok: &Token) -> Result<Term, ReadError> {
    let value = if negative {
        0i64.checked_sub_unsigned(n)
    } else {
        i64::try_from(n).ok()
    };
    value.map(Term::Int).ok_or_else(|| ReadError::Syntax {
        message: format!("integer literal {n} is out of range"),
        pos: tok.pos,
    })
}

fn infix_name(kind: &TokenKind) -> Option<&str> {
    match kind {
        TokenKind::Operator(name) => Some(name),
        TokenKind::Punct(Punct::Comma) => Some(","),
        TokenKind::Neck => Some(":-"),
        _ => None,
    }
}

/// Whether a token following a prefix operator can begin its operand.
fn starts_operand(kind: &TokenKind) -> bool {
    match kind {
        TokenKind::Int(_)
        | TokenKind::Float(_)
        | TokenKind::Var(_)
        | TokenKind::Atom(_)
        | TokenKind::Punct(Punct::Open | Punct::OpenList) => true,
        TokenKind::Operator(name) => ops::prefix(name).is_some() || ops::infix(name).is_none(),
        TokenKind::QueryMark | TokenKind::Neck => false,
        TokenKind::Punct(_) | TokenKind::EndDot => false,
    }
}

fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Atom(a) => format!("atom `{a}`"),
        TokenKind::Var(v) => format!("variable `{v}`"),
        TokenKind::Int(n) => format!("number `{n}`"),
        TokenKind::Float(x) => format!("number `{x}`"),
        TokenKind::Punct(p) => format!("`{}`", p.as_str()),
        TokenKind::QueryMark => "`?-`".into(),
        TokenKind::Neck => "`:-`".into(),
        TokenKind::Operator(op) => format!("operator `{op}`"),
        TokenKind::EndDot => "end dot `.`".into(),
    }
}

/// Reads one term of priority at most `max_priority` from the front of
/// `tokens`, returning it with the unconsumed tokens. Variables are numbered
/// from zero in order of first appearance.
pub fn parse_term(tokens: &[Token], max_priority: u32) -> Result<(Term, &[Token]), ReadError> {
    let mut parser = Parser::new(tokens);
    let (term, _) = parser.parse(max_priority)?;
    Ok((term, &tokens[parser.pos..]))
}

/// Tokenizes and reads a single term with no trailing end dot.
pub fn read_term(source: &str) -> Result<Term, ReadError> {
    let tokens = tokenize(source)?;
    let (term, rest) = parse_term(&tokens, MAX_PRIORITY)?;
    if let Some(t) = rest.first() {
        return Err(ReadError::Syntax {
            message: format!("unexpected {} after term", describe(&t.kind)),
            pos: t.pos,
        });
    }
    Ok(term)
}

/// Cursor over the items of a program text.
pub struct ProgramReader {
    tokens: Vec<Token>,
    pos: usize,
}

impl ProgramReader {
    pub fn new(source: &str) -> Result<Self, ReadError> {
        Ok(ProgramReader {
            tokens: tokenize(source)?,
            pos: 0,
        })
    }

    /// Reads the next item, or `None` at end of input.
    pub fn read_program_item(&mut self) -> Option<Result<ProgramItem, ReadError>> {
        let first = self.tokens.get(self.pos)?;
        let pos = first.pos;
        let mut parser = Parser::new(&self.tokens[self.pos..]);
        let result = (|| {
            // A bare `?- .` is the atom `?-` as a fact, not an empty query.
            let is_query = first.kind == TokenKind::QueryMark
                && self.tokens.get(self.pos + 1).is_some_and(|t| t.kind != TokenKind::EndDot);
            if is_query {
                parser.pos += 1;
            }
            let (term, _) = parser.parse(MAX_PRIORITY)?;
            parser.expect_end()?;
            let query = |goal: Term| {
                ProgramItem::Query {
                    query: Query {
                        goal,
                        var_names: parser.vars.clone(),
                    },
                    pos,
                }
            };
            if is_query {
                return Ok(query(term));
            }
            match term {
                // `:- Goal.` directives run like queries.
                Term::Compound(ref f, ref args) if &**f == ":-" && args.len() == 1 => {
                    Ok(query(args[0].clone()))
                }
                _ => {
                    let clause = Clause::from_term(&term).map_err(|e| ReadError::NotCallable {
                        culprit: e.culprit,
                        pos,
                    })?;
                    Ok(ProgramItem::Clause { clause, pos })
                }
            }
        })();
        match result {
            Ok(item) => {
                self.pos += parser.pos;
                Some(Ok(item))
            }
            Err(e) => {
                // No resynchronisation: callers abort on the first error.
                self.pos = self.tokens.len();
                Some(Err(e))
            }
        }
    }
}

impl Iterator for ProgramReader {
    type Item = Result<ProgramItem, ReadError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_program_item()
    }
}

/// Reads every item of a program text.
pub fn read_program(source: &str) -> Result<Vec<ProgramItem>, ReadError> {
    ProgramReader::new(source)?.collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_query_mark_is_a_fact() {
        let items = read_program("?- .").unwrap();
        assert!(matches!(&items[0], ProgramItem::Clause { clause, .. } if clause.head == Term::atom("?-")));
    }

    fn term(src: &str) -> Term {
        read_term(src).unwrap_or_else(|e| panic!("{src}: {e}"))
    }

    fn c(f: &str, args: Vec<Term>) -> Term {
        Term::compound(f, args)
    }

    #[test]
    fn compound_with_quoted_atom() {
        assert_eq!(
            term("msg('Hello, World!')"),
            c("msg", vec![Term::atom("Hello, World!")])
        );
    }

    #[test]
    fn single_variable() {
        assert_eq!(term("X"), Term::var("X", 0));
    }

    #[test]
    fn arithmetic_priorities() {
        assert_eq!(
            term("1+2*3"),
            c("+", vec![Term::Int(1), c("*", vec![Term::Int(2), Term::Int(3)])])
        );
        assert_eq!(
            term("1-2-3"),
            c("-", vec![c("-", vec![Term::Int(1), Term::Int(2)]), Term::Int(3)])
        );
        assert_eq!(term("7 mod 2"), c("mod", vec![Term::Int(7), Term::Int(2)]));
    }

    #[test]
    fn comma_is_argument_separator_inside_compounds() {
        assert_eq!(
            term("f(a, (b, c))"),
            c("f", vec![Term::atom("a"), c(",", vec![Term::atom("b"), Term::atom("c")])])
        );
    }

    #[test]
    fn negative_numbers_and_prefix_minus() {
        assert_eq!(term("-3"), Term::Int(-3));
        assert_eq!(term("- 3"), c("-", vec![Term::Int(3)]));
        assert_eq!(term("-(3)"), c("-", vec![Term::Int(3)]));
        assert_eq!(term("1 - -3"), c("-", vec![Term::Int(1), Term::Int(-3)]));
        assert_eq!(term("2-3"), c("-", vec![Term::Int(2), Term::Int(3)]));
        assert_eq!(term("-a"), c("-", vec![Term::atom("a")]));
        assert_eq!(term("-9223372036854775808"), Term::Int(i64::MIN));
        assert!(read_term("9223372036854775808").is_err());
    }

    #[test]
    fn operator_atoms_as_operands() {
        assert_eq!(term("f(+, -)"), c("f", vec![Term::atom("+"), Term::atom("-")]));
        assert_eq!(term("[-]"), Term::list([Term::atom("-")]));
        assert_eq!(term("(-)+(*)"), c("+", vec![Term::atom("-"), Term::atom("*")]));
        assert_eq!(term("- = x"), c("=", vec![Term::atom("-"), Term::atom("x")]));
    }

    #[test]
    fn lists() {
        assert_eq!(term("[]"), Term::nil());
        assert_eq!(
            term("[a,b|T]"),
            Term::list_with_tail([Term::atom("a"), Term::atom("b")], Term::var("T", 0))
        );
    }

    #[test]
    fn control_constructs() {
        assert_eq!(
            term("(a -> b ; c)"),
            c(";", vec![c("->", vec![Term::atom("a"), Term::atom("b")]), Term::atom("c")])
        );
        assert_eq!(
            term("\\+ a = b"),
            c("\\+", vec![c("=", vec![Term::atom("a"), Term::atom("b")])])
        );
    }

    #[test]
    fn shared_and_anonymous_variables() {
        let t = term("f(X, _, X, _)");
        assert_eq!(
            t,
            c("f", vec![Term::var("X", 0), Term::var("_", 1), Term::var("X", 0), Term::var("_", 2)])
        );
    }

    #[test]
    fn priority_clash_is_reported() {
        let err = read_term("a = b = c").unwrap_err();
        assert!(matches!(&err, ReadError::Syntax { message, .. } if message.contains("priority clash")), "{err}");
        assert!(read_term("f(a").is_err());
        assert!(read_term("f(a))").is_err());
        assert!(read_term("[a").is_err());
        assert!(read_term("[:- a]").is_err());
    }

    #[test]
    fn parse_term_returns_remaining_tokens() {
        let toks = tokenize("foo(X). bar").unwrap();
        let (t, rest) = parse_term(&toks, 1200).unwrap();
        assert_eq!(t, c("foo", vec![Term::var("X", 0)]));
        assert_eq!(rest.len(), 2);
        assert_eq!(rest[0].kind, TokenKind::EndDot);
    }

    #[test]
    fn program_items() {
        let items = read_program("msg('Hello, World!').\n?-msg(X), write(X).\np :- q, r.").unwrap();
        assert_eq!(items.len(), 3);
        match &items[0] {
            ProgramItem::Clause { clause, pos } => {
                assert_eq!(clause.head, c("msg", vec![Term::atom("Hello, World!")]));
                assert_eq!(clause.body, Term::atom("true"));
                assert_eq!(*pos, Pos::new(1, 1));
            }
            other => panic!("{other:?}"),
        }
        match &items[1] {
            ProgramItem::Query { query, pos } => {
                assert_eq!(
                    query.goal,
                    c(
                        ",",
                        vec![
                            c("msg", vec![Term::var("X", 0)]),
                            c("write", vec![Term::var("X", 0)])
                        ]
                    )
                );
                assert_eq!(query.var_names, vec![(Arc::from("X"), 0)]);
                assert_eq!(*pos, Pos::new(2, 1));
            }
            other => panic!("{other:?}"),
        }
        match &items[2] {
            ProgramItem::Clause { clause, .. } => {
                assert_eq!(clause.head, Term::atom("p"));
                assert_eq!(clause.body, c(",", vec![Term::atom("q"), Term::atom("r")]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn variable_scope_is_one_item() {
        let items = read_program("p(X). q(Y, X).").unwrap();
        let ProgramItem::Clause { clause, .. } = &items[1] else { panic!() };
        assert_eq!(clause.head, c("q", vec![Term::var("Y", 0), Term::var("X", 1)]));
    }

    #[test]
    fn item_errors() {
        let err = read_program("3.").unwrap_err();
        assert!(matches!(err, ReadError::NotCallable { culprit: Term::Int(3), .. }));
        let err = read_program("p(X) :- q\nr.").unwrap_err();
        assert!(matches!(err, ReadError::Syntax { pos, .. } if pos == Pos::new(2, 1)));
        assert!(matches!(read_program("p"), Err(ReadError::Syntax { .. })));
        assert!(read_program("   ").unwrap().is_empty());
    }

    #[test]
    fn directive_reads_as_query() {
        let items = read_program(":- write(hi).").unwrap();
        assert!(matches!(&items[0], ProgramItem::Query { query, .. } if query.goal == c("write", vec![Term::atom("hi")])));
    }
}
