use crate::prolog::{Clause, Database, PredKey, Position, Term};

use super::ControlPair;

fn assert_pairs(db: &mut Database, name: &str, pairs: &[ControlPair]) {
    db.declare_dynamic(PredKey::new(name, 2));
    for pair in pairs {
        let fact = Term::compound(
            name,
            vec![Term::atom(pair.name.as_str()), Term::atom(pair.value.as_str())],
        );
        let clause = Clause::from_term(&fact).expect("ground fact is a valid clause");
        db.assert_clause(clause, Position::Back)
            .expect("arg/2 and cookie/2 are not builtins");
    }
}

/// Asserts `arg(Name, Value)` for each form control and `cookie(Name, Value)`
/// for each inbound cookie, in order. Both predicates are declared even when
/// there are no pairs, so querying them fails rather than raising an error.
pub fn bind_request_facts(controls: &[ControlPair], cookies: &[ControlPair], db: &mut Database) {
    assert_pairs(db, "arg", controls);
    assert_pairs(db, "cookie", cookies);
}
