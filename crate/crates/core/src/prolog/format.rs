//! Rendering terms as text, with operators infix and minimal parentheses.

use super::lexer::is_symbol_char;
use super::ops;
use super::term::{Term, CONS, NIL};

/// Formats `t`. In quoted mode atoms are quoted where needed so the text
/// reads back as the same term; otherwise atom text is emitted verbatim.
pub fn format_term(t: &Term, quoted: bool) -> String {
    let mut w = Writer {
        out: String::new(),
        quoted,
    };
    w.term(t, 1200);
    w.out
}

struct Writer {
    out: String,
    quoted: bool,
}

fn glue_class(c: char) -> u8 {
    if c.is_alphanumeric() || c == '_' {
        1
    } else if is_symbol_char(c) {
        2
    } else if c == '\'' {
        3
    } else {
        0
    }
}

impl Writer {
    /// Appends a token, inserting a space if it would otherwise fuse with
    /// the preceding character into a different token.
    fn token(&mut self, text: &str) {
        if let (Some(last), Some(first)) = (self.out.chars().last(), text.chars().next()) {
            let class = glue_class(last);
            if class != 0 && class == glue_class(first) {
                self.out.push(' ');
            }
        }
        self.out.push_str(text);
    }

    fn atom(&mut self, name: &str) {
        if self.quoted {
            let text = quote_atom(name);
            self.token(&text);
        } else {
            self.token(name);
        }
    }

    /// An atom standing as an operand of an operator.
    fn operand_atom(&mut self, name: &str) {
        if ops::is_op(name) {
            self.token("(");
            self.atom(name);
            self.token(")");
        } else {
            self.atom(name);
        }
    }

    fn term(&mut self, t: &Term, max: u32) {
        match t {
            Term::Atom(name) => {
                if max < 1200 {
                    self.operand_atom(name)
                } else {
                    self.atom(name)
                }
            }
            Term::Var(v) => self.token(&format!("_G{}", v.id)),
            Term::Int(n) => self.token(&n.to_string()),
            Term::Float(x) => self.token(&format_float(*x)),
            Term::Compound(f, args) => self.compound(f, args, max),
        }
    }

    fn compound(&mut self, f: &str, args: &[Term], max: u32) {
        if f == CONS && args.len() == 2 {
            return self.list(args);
        }
        if args.len() == 2 {
            if let Some(def) = ops::infix(f) {
                let (left_max, right_max) = def.infix_arg_limits();
                let paren = def.priority > max;
                if paren {
                    self.token("(");
                }
                self.term(&args[0], left_max);
                if f == "," {
                    self.out.push(',');
                } else {
                    self.atom(f);
                }
                self.term(&args[1], right_max);
                if paren {
                    self.token(")");
                }
                return;
            }
        }
        if args.len() == 1 {
            let numeric = matches!(args[0], Term::Int(_) | Term::Float(_));
            if let Some(def) = ops::prefix(f).filter(|_| !(f == "-" && numeric)) {
                let mut operand = Writer {
                    out: String::new(),
                    quoted: self.quoted,
                };
                operand.term(&args[0], def.prefix_arg_limit());
                // An operand opening with an operator symbol would be read
                // as an infix application of the prefix atom.
                let leading_word: String = operand
                    .out
                    .chars()
                    .take_while(|c| c.is_alphanumeric() || *c == '_')
                    .collect();
                if operand.out.starts_with(|c: char| is_symbol_char(c) || matches!(c, ';' | ',' | '|'))
                    || ops::is_op(&leading_word)
                {
                    return self.canonical(f, args);
                }
                let paren = def.priority > max;
                if paren {
                    self.token("(");
                }
                self.atom(f);
                // `-(` would read back as canonical functional notation.
                if operand.out.starts_with('(') {
                    self.out.push(' ');
                }
                self.token(&operand.out);
                if paren {
                    self.token(")");
                }
                return;
            }
        }
        self.canonical(f, args);
    }

    /// Functional notation `f(A1, ..., An)`.
    fn canonical(&mut self, f: &str, args: &[Term]) {
        if self.quoted && f == NIL {
            // Bare `[]` cannot be a functor.
            self.token("'[]'");
        } else {
            self.atom(f);
        }
        self.out.push('(');
        for (i, arg) in args.iter().enumerate() {
            if i > 0 {
                self.out.push(',');
            }
            self.argument(arg);
        }
        self.out.push(')');
    }

    /// An argument of a compound or an element of a list.
    fn argument(&mut self, t: &Term) {
        match t {
            Term::Atom(name) => self.atom(name),
            other => self.term(other, 999),
        }
    }

    fn list(&mut self, args: &[Term]) {
        self.token("[");
        self.argument(&args[0]);
        let mut tail = &args[1];
        loop {
            match tail {
                Term::Compound(f, next) if &**f == CONS && next.len() == 2 => {
                    self.out.push(',');
                    self.argument(&next[0]);
                    tail = &next[1];
                }
                Term::Atom(a) if &**a == NIL => break,
                other => {
                    self.out.push('|');
                    self.argument(other);
                    break;
                }
            }
        }
        self.out.push(']');
    }
}

/// Float text that always contains a decimal point, so it reads back as a
/// float.
pub fn format_float(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || !s.chars().any(|c| c.is_ascii_digit()) {
        return s;
    }
    match s.find('e') {
        Some(i) => format!("{}.0{}", &s[..i], &s[i..]),
        None => format!("{s}.0"),
    }
}

fn atom_needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return true;
    };
    if matches!(name, "[]" | "!" | ";") {
        return false;
    }
    if first.is_lowercase() {
        return !name.chars().all(|c| c.is_alphanumeric() || c == '_');
    }
    if is_symbol_char(first) {
        return !name.chars().all(is_symbol_char) || name.contains('.') || name.starts_with("/*");
    }
    true
}

/// Atom text as it must appear in source to read back as the same atom.
pub fn quote_atom(name: &str) -> String {
    if atom_needs_quotes(name) {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prolog::parser::read_term;

    fn c(f: &str, args: Vec<Term>) -> Term {
        Term::compound(f, args)
    }

    #[test]
    fn unquoted_atom_is_verbatim() {
        assert_eq!(format_term(&Term::atom("Hello, World!"), false), "Hello, World!");
        assert_eq!(format_term(&Term::atom("Hello, World!"), true), "'Hello, World!'");
        assert_eq!(format_term(&Term::atom("it's"), true), "'it''s'");
    }

    #[test]
    fn list_notation() {
        let l = Term::list([Term::Int(1), Term::Int(2)]);
        assert_eq!(format_term(&l, false), "[1,2]");
        let partial = Term::list_with_tail([Term::atom("a"), Term::atom("b")], Term::var("T", 4));
        assert_eq!(format_term(&partial, false), "[a,b|_G4]");
    }

    #[test]
    fn minimal_parentheses() {
        let t = c("+", vec![Term::Int(1), c("*", vec![Term::Int(2), Term::Int(3)])]);
        assert_eq!(format_term(&t, false), "1+2*3");
        let t = c("*", vec![c("+", vec![Term::Int(1), Term::Int(2)]), Term::Int(3)]);
        assert_eq!(format_term(&t, false), "(1+2)*3");
        let t = c("-", vec![Term::Int(1), c("-", vec![Term::Int(2), Term::Int(3)])]);
        assert_eq!(format_term(&t, false), "1-(2-3)");
        assert_eq!(format_term(&c("+", vec![Term::Int(1), Term::Int(1)]), false), "1+1");
    }

    #[test]
    fn spacing_prevents_token_fusion() {
        assert_eq!(format_term(&c("-", vec![Term::Int(1), Term::Int(-3)]), true), "1- -3");
        assert_eq!(format_term(&c("is", vec![Term::var("X", 0), Term::Int(3)]), true), "_G0 is 3");
        assert_eq!(format_term(&c("-", vec![Term::Int(3)]), true), "-(3)");
        assert_eq!(
            format_term(&c("-", vec![c(",", vec![Term::atom("a"), Term::atom("b")])]), true),
            "- (a,b)"
        );
        assert_eq!(format_term(&c("\\+", vec![Term::atom("a")]), true), "\\+a");
    }

    #[test]
    fn operator_atoms_as_operands_are_bracketed() {
        let t = c("+", vec![Term::atom("-"), Term::atom("*")]);
        assert_eq!(format_term(&t, true), "(-)+(*)");
        assert_eq!(format_term(&c("f", vec![Term::atom("+")]), true), "f(+)");
        assert_eq!(format_term(&Term::atom("+"), true), "+");
    }

    #[test]
    fn floats_keep_a_decimal_point() {
        assert_eq!(format_float(3.0), "3.0");
        assert_eq!(format_float(1e-7), "1.0e-7");
        assert_eq!(format_float(1.5e300), "1.5e300");
        assert_eq!(format_float(-0.25), "-0.25");
    }

    #[test]
    fn quoted_output_reads_back() {
        for src in [
            "f(X,Y,'a b',[1,2|Z])",
            "a:-b,c;d->e",
            "- (1)",
            "\\+ \\+ a",
            "'hello'('World', \"x\")",
            "X = '='",
            "f(;, '|', '[]', [], '.', ',')",
        ] {
            let t = read_term(src).unwrap();
            let text = format_term(&t, true);
            assert_eq!(read_term(&text).unwrap(), t, "{src} -> {text}");
        }
    }
}
