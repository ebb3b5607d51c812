use crate::diagnostic::Diagnostic;
use crate::prolog::{EngineError, Foreign, Output, PredKey, Term};

use super::ControlPair;

/// Splits an inbound `Cookie` header into name/value pairs. Fragments
/// without `=` are skipped and reported.
pub fn parse_cookie_header(header: &str) -> (Vec<ControlPair>, Vec<Diagnostic>) {
    let mut pairs = Vec::new();
    let mut diagnostics = Vec::new();
    for fragment in header.split(';').map(str::trim).filter(|f| !f.is_empty()) {
        match fragment.split_once('=') {
            Some((name, value)) => pairs.push(ControlPair::new(name.trim(), value.trim())),
            None => diagnostics.push(Diagnostic::warning(
                None,
                format!("ignoring cookie fragment without '=': {fragment:?}"),
            )),
        }
    }
    (pairs, diagnostics)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CookieSpec {
    pub name: String,
    pub value: String,
    pub expires: String,
    pub domain: String,
    pub path: String,
    pub secure: bool,
}

/// The value of a `Set-Cookie` header. Empty attributes are left out.
pub fn format_set_cookie(c: &CookieSpec) -> String {
    let mut out = format!("{}={}", c.name, c.value);
    for (attr, value) in [("expires", &c.expires), ("domain", &c.domain), ("path", &c.path)] {
        if !value.is_empty() {
            out.push_str(&format!("; {attr}={value}"));
        }
    }
    if c.secure {
        out.push_str("; secure");
    }
    out
}

fn atom_text(t: &Term) -> Result<&str, EngineError> {
    match t {
        Term::Atom(a) => Ok(a),
        Term::Var(_) => Err(EngineError::instantiation(t.clone())),
        _ => Err(EngineError::type_error("atom", t.clone())),
    }
}

fn token_char_ok(c: char) -> bool {
    !(c == ';' || c == ',' || c.is_whitespace() || c.is_control())
}

fn check(ok: bool, what: &str, arg: &Term) -> Result<(), EngineError> {
    if ok {
        Ok(())
    } else {
        Err(EngineError::type_error(what, arg.clone()))
    }
}

fn cookie_spec(args: &[Term]) -> Result<CookieSpec, EngineError> {
    if let Some(unbound) = args.iter().find(|a| matches!(a, Term::Var(_))) {
        return Err(EngineError::instantiation(unbound.clone()));
    }
    let name = atom_text(&args[0])?;
    let value = atom_text(&args[1])?;
    let expires = atom_text(&args[2])?;
    let domain = atom_text(&args[3])?;
    let path = atom_text(&args[4])?;
    let secure = match atom_text(&args[5])? {
        "true" => true,
        "false" => false,
        _ => return Err(EngineError::type_error("true or false", args[5].clone())),
    };
    check(
        !name.is_empty() && name.chars().all(|c| token_char_ok(c) && c != '='),
        "cookie name",
        &args[0],
    )?;
    check(value.chars().all(token_char_ok), "cookie value", &args[1])?;
    for (text, arg) in [(expires, &args[2]), (domain, &args[3]), (path, &args[4])] {
        check(
            text.chars().all(|c| c != ';' && !c.is_control()),
            "cookie attribute",
            arg,
        )?;
    }
    Ok(CookieSpec {
        name: name.to_owned(),
        value: value.to_owned(),
        expires: expires.to_owned(),
        domain: domain.to_owned(),
        path: path.to_owned(),
        secure,
    })
}

/// `setcookie(Name, Value, Expires, Domain, Path, Secure)`: queues a
/// `Set-Cookie` header. Once page output has started the call still
/// succeeds but has no effect.
pub fn builtin_setcookie(
    args: &[Term],
    output_started: bool,
    headers: &mut Vec<(String, String)>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<bool, EngineError> {
    let spec = cookie_spec(args)?;
    if output_started {
        diagnostics.push(Diagnostic::warning(
            None,
            format!("setcookie for {:?} ignored: page output already started", spec.name),
        ));
    } else {
        headers.push(("Set-Cookie".to_owned(), format_set_cookie(&spec)));
    }
    Ok(true)
}

/// Host predicates available to page code.
pub struct PageBuiltins<'a> {
    pub headers: &'a mut Vec<(String, String)>,
    pub diagnostics: &'a mut Vec<Diagnostic>,
}

impl Foreign for PageBuiltins<'_> {
    fn is_defined(&self, key: &PredKey) -> bool {
        &*key.name == "setcookie" && key.arity == 6
    }

    fn call(&mut self, key: &PredKey, args: &[Term], output: &Output) -> Result<bool, EngineError> {
        debug_assert!(self.is_defined(key));
        builtin_setcookie(args, output.started(), self.headers, self.diagnostics)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prolog::ErrorKind;

    fn spec(name: &str, value: &str, expires: &str, domain: &str, path: &str, secure: bool) -> CookieSpec {
        CookieSpec {
            name: name.into(),
            value: value.into(),
            expires: expires.into(),
            domain: domain.into(),
            path: path.into(),
            secure,
        }
    }

    fn atoms(items: &[&str]) -> Vec<Term> {
        items.iter().map(|s| Term::atom(*s)).collect()
    }

    #[test]
    fn header_attribute_order() {
        assert_eq!(format_set_cookie(&spec("sid", "abc", "", "", "/", false)), "sid=abc; path=/");
        assert_eq!(format_set_cookie(&spec("sid", "abc", "", "", "", true)), "sid=abc; secure");
        assert_eq!(
            format_set_cookie(&spec("id", "42", "Wed, 09-Jun-2027 10:18:14 GMT", "example.com", "/", false)),
            "id=42; expires=Wed, 09-Jun-2027 10:18:14 GMT; domain=example.com; path=/"
        );
    }

    #[test]
    fn cookie_header_parsing() {
        let (pairs, diags) = parse_cookie_header("id=42; theme=dark");
        assert_eq!(pairs, vec![ControlPair::new("id", "42"), ControlPair::new("theme", "dark")]);
        assert!(diags.is_empty());
        assert_eq!(parse_cookie_header(""), (vec![], vec![]));
        let (pairs, diags) = parse_cookie_header("junk; id=42");
        assert_eq!(pairs, vec![ControlPair::new("id", "42")]);
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn setcookie_gating() {
        let args = atoms(&["id", "42", "Wed, 09-Jun-2027 10:18:14 GMT", "example.com", "/", "false"]);
        let (mut headers, mut diags) = (Vec::new(), Vec::new());
        assert!(builtin_setcookie(&args, false, &mut headers, &mut diags).unwrap());
        assert_eq!(
            headers,
            vec![(
                "Set-Cookie".to_owned(),
                "id=42; expires=Wed, 09-Jun-2027 10:18:14 GMT; domain=example.com; path=/".to_owned()
            )]
        );
        let (mut headers, mut diags) = (Vec::new(), Vec::new());
        assert!(builtin_setcookie(&args, true, &mut headers, &mut diags).unwrap());
        assert!(headers.is_empty());
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn setcookie_errors() {
        let mut args = atoms(&["id", "v", "", "", "", "false"]);
        args[0] = Term::var("X", 0);
        let (mut h, mut d) = (Vec::new(), Vec::new());
        let kind = |args: &[Term], h: &mut Vec<_>, d: &mut Vec<_>| builtin_setcookie(args, false, h, d).unwrap_err().kind;
        assert_eq!(kind(&args, &mut h, &mut d), ErrorKind::Instantiation);
        args[0] = Term::Int(1);
        assert_eq!(kind(&args, &mut h, &mut d), ErrorKind::Type);
        for bad in [
            ["", "v", "", "", "", "false"],
            ["a=b", "v", "", "", "", "false"],
            ["a", "x;y", "", "", "", "false"],
            ["a", "x y", "", "", "", "false"],
            ["a", "x,y", "", "", "", "false"],
            ["a", "v", "", "", "/;", "false"],
            ["a", "v", "", "", "", "yes"],
        ] {
            assert_eq!(kind(&atoms(&bad), &mut h, &mut d), ErrorKind::Type, "{bad:?}");
        }
        assert!(h.is_empty());
    }
}
