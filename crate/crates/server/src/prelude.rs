//! Consulting prelude files into the shared base database.

use std::path::{Path, PathBuf};

use psp_core::prolog::{
    ClauseStore, Database, EngineError, ErrorKind, NoForeign, Pos, Position, ProgramItem,
    ProgramReader, ReadError, Session, SolveOutcome,
};
use psp_core::web::bind_request_facts;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PreludeError {
    #[error("cannot read prelude {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}:{}: {}", path.display(), error.pos(), read_message(error))]
    Read { path: PathBuf, error: ReadError },
    #[error("{}:{pos}: {error}", path.display())]
    Engine { path: PathBuf, pos: Pos, error: EngineError },
    #[error("{}:{pos}: query exhausted the step budget", path.display())]
    BudgetExceeded { path: PathBuf, pos: Pos },
}

fn read_message(error: &ReadError) -> String {
    match error {
        ReadError::Lexical { message, .. } => format!("lexical error: {message}"),
        ReadError::Syntax { message, .. } => format!("syntax error: {message}"),
        ReadError::NotCallable { culprit, .. } => format!("clause head {culprit} is not callable"),
    }
}

/// The frozen base layer plus log lines produced while loading.
#[derive(Debug)]
pub struct Preludes {
    pub store: ClauseStore,
    pub log: Vec<String>,
}

fn consult(session: &mut Session, path: &Path, step_limit: u64, log: &mut Vec<String>) -> Result<(), PreludeError> {
    let source = std::fs::read_to_string(path).map_err(|e| PreludeError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    let read_error = |error| PreludeError::Read {
        path: path.to_owned(),
        error,
    };
    // Read the whole file first so a syntax error anywhere loads nothing.
    let items = ProgramReader::new(&source)
        .map_err(read_error)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(read_error)?;
    for item in items {
        match item {
            ProgramItem::Clause { clause, pos } => session
                .assert_clause(clause, Position::Back, &NoForeign)
                .map_err(|error| PreludeError::Engine {
                    path: path.to_owned(),
                    pos,
                    error,
                })?,
            ProgramItem::Query { query, pos } => {
                session.set_budget(step_limit);
                let outcome = session.run_query(&query, &mut NoForeign);
                let output = session.output.take();
                if !output.is_empty() {
                    log.push(format!(
                        "{}:{pos}: {}",
                        path.display(),
                        String::from_utf8_lossy(&output)
                    ));
                }
                match outcome {
                    SolveOutcome::Success(_) => {}
                    SolveOutcome::Failure => {
                        log.push(format!("{}:{pos}: warning: query failed", path.display()))
                    }
                    SolveOutcome::Error(e) if e.kind == ErrorKind::Existence => log.push(format!(
                        "{}:{pos}: warning: query failed: {}",
                        path.display(),
                        e
                    )),
                    SolveOutcome::Error(error) => {
                        return Err(PreludeError::Engine {
                            path: path.to_owned(),
                            pos,
                            error,
                        })
                    }
                    SolveOutcome::BudgetExceeded => {
                        return Err(PreludeError::BudgetExceeded {
                            path: path.to_owned(),
                            pos,
                        })
                    }
                }
            }
        }
    }
    Ok(())
}

/// Consults `paths` in order: clauses are asserted, queries run once with
/// their output sent to the returned log. `arg/2` and `cookie/2` are
/// declared so that pages can query them when a request carries none.
pub fn load_preludes(paths: &[PathBuf], step_limit: u64, occurs_check: bool) -> Result<Preludes, PreludeError> {
    let mut db = Database::new();
    bind_request_facts(&[], &[], &mut db);
    let mut session = Session::new(db).with_occurs_check(occurs_check);
    let mut log = Vec::new();
    for path in paths {
        consult(&mut session, path, step_limit, &mut log)?;
    }
    Ok(Preludes {
        store: session.db.freeze(),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use psp_core::prolog::PredKey;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn clauses_and_load_time_output() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.pl", "greeting('Hi').\n?-write(ready), nl.\n");
        let b = write(dir.path(), "b.pl", "other(1).\n:- missing_pred.\n");
        let p = load_preludes(&[a, b], 1000, true).unwrap();
        assert_eq!(p.store.clause_count(), 2);
        assert!(p.store.get(&PredKey::new("greeting", 1)).is_some());
        assert!(p.log[0].ends_with("ready\n"), "{:?}", p.log);
        assert!(p.log[1].contains("warning"), "{:?}", p.log);
    }

    #[test]
    fn empty_list_gives_empty_base() {
        let p = load_preludes(&[], 1000, true).unwrap();
        assert_eq!(p.store.clause_count(), 0);
    }

    #[test]
    fn startup_failures_name_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write(dir.path(), "bad.pl", "ok(1).\nbroken(.\n");
        let err = load_preludes(&[bad], 1000, true).unwrap_err().to_string();
        assert!(err.contains("bad.pl:") && err.contains("2:"), "{err}");

        let looping = write(dir.path(), "loop.pl", "loop :- loop.\n?- loop.\n");
        let err = load_preludes(&[looping], 1000, true).unwrap_err();
        assert!(matches!(err, PreludeError::BudgetExceeded { pos, .. } if pos.line == 2));

        let missing = dir.path().join("missing.pl");
        assert!(matches!(load_preludes(&[missing], 1000, true), Err(PreludeError::Io { .. })));
    }
}
