//! PSP documents: HTML with embedded `<?psp ... ?>` chunks of Prolog.

use thiserror::Error;

use crate::diagnostic::Diagnostic;
use crate::prolog::{
    read_program, Database, EngineError, ErrorKind, Pos, Position, ProgramItem, ReadError,
    Session, SolveOutcome,
};
use crate::web::PageBuiltins;

pub const OPEN: &[u8] = b"<?psp";
pub const CLOSE: &[u8] = b"?>";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    Html(Vec<u8>),
    /// Chunk interior; `location` is where its `<?psp` starts.
    Code { source: Vec<u8>, location: Pos },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PspDocument {
    pub segments: Vec<Segment>,
}

impl PspDocument {
    pub fn code_segments(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Code { .. }))
            .count()
    }

    /// The source the document was segmented from.
    pub fn to_source(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for segment in &self.segments {
            match segment {
                Segment::Html(bytes) => out.extend_from_slice(bytes),
                Segment::Code { source, .. } => {
                    out.extend_from_slice(OPEN);
                    out.extend_from_slice(source);
                    out.extend_from_slice(CLOSE);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TemplateError {
    #[error("unterminated chunk opened at {0}")]
    Unterminated(Pos),
    #[error("chunk text is not valid UTF-8 at {0}")]
    Encoding(Pos),
    #[error(transparent)]
    Syntax(ReadError),
    #[error("query at {pos}: {error}")]
    Engine { error: EngineError, pos: Pos },
    #[error("query at {pos} exhausted the step budget")]
    BudgetExceeded { pos: Pos },
}

impl TemplateError {
    pub fn pos(&self) -> Pos {
        match self {
            TemplateError::Unterminated(pos) | TemplateError::Encoding(pos) => *pos,
            TemplateError::Syntax(e) => e.pos(),
            TemplateError::Engine { pos, .. } | TemplateError::BudgetExceeded { pos } => *pos,
        }
    }
}

/// Moves `pos` across `bytes`, counting columns in characters.
fn advance(mut pos: Pos, bytes: &[u8]) -> Pos {
    for &b in bytes {
        if b == b'\n' {
            pos.line += 1;
            pos.column = 1;
        } else if b & 0xC0 != 0x80 {
            pos.column += 1;
        }
    }
    pos
}

fn find(haystack: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    haystack
        .get(from..)?
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|i| i + from)
}

/// Splits source bytes into HTML and code segments. Delimiters are found
/// lexically, without regard to Prolog quoting.
pub fn segment_document(source: &[u8]) -> Result<PspDocument, TemplateError> {
    let mut segments = Vec::new();
    let mut pos = Pos::new(1, 1);
    let mut at = 0;
    while let Some(open) = find(source, OPEN, at) {
        if open > at {
            segments.push(Segment::Html(source[at..open].to_vec()));
        }
        let location = advance(pos, &source[at..open]);
        let start = open + OPEN.len();
        let end = find(source, CLOSE, start).ok_or(TemplateError::Unterminated(location))?;
        segments.push(Segment::Code {
            source: source[start..end].to_vec(),
            location,
        });
        at = end + CLOSE.len();
        pos = advance(location, &source[open..at]);
    }
    if at < source.len() {
        segments.push(Segment::Html(source[at..].to_vec()));
    }
    Ok(PspDocument { segments })
}

/// Reads the clauses and queries of one chunk, with positions in the
/// coordinates of the whole document.
pub fn parse_chunk(source: &[u8], location: Pos) -> Result<Vec<ProgramItem>, TemplateError> {
    let origin = Pos::new(location.line, location.column + OPEN.len() as u32);
    let text = std::str::from_utf8(source)
        .map_err(|e| TemplateError::Encoding(advance(origin, &source[..e.valid_up_to()])))?;
    let items = read_program(text).map_err(|e| TemplateError::Syntax(e.relative_to(origin)))?;
    Ok(items
        .into_iter()
        .map(|mut item| {
            match &mut item {
                ProgramItem::Clause { pos, .. } | ProgramItem::Query { pos, .. } => {
                    *pos = pos.relative_to(origin)
                }
            }
            item
        })
        .collect())
}

/// State for rendering one document: the engine session plus the response
/// headers and diagnostics it accumulates.
#[derive(Clone, Debug)]
pub struct RenderSession {
    pub engine: Session,
    pub pending_headers: Vec<(String, String)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl RenderSession {
    pub fn new(engine: Session) -> Self {
        RenderSession {
            engine,
            pending_headers: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn with_database(db: Database) -> Self {
        Self::new(Session::new(db))
    }

    pub fn output_started(&self) -> bool {
        self.engine.output.started()
    }

    pub fn body(&self) -> &[u8] {
        self.engine.output.bytes()
    }

    pub fn take_body(&mut self) -> Vec<u8> {
        self.engine.output.take()
    }

    fn execute(&mut self, item: ProgramItem) -> Result<(), TemplateError> {
        let mut page = PageBuiltins {
            headers: &mut self.pending_headers,
            diagnostics: &mut self.diagnostics,
        };
        match item {
            ProgramItem::Clause { clause, pos } => self
                .engine
                .assert_clause(clause, Position::Back, &page)
                .map_err(|error| TemplateError::Engine { error, pos }),
            ProgramItem::Query { query, pos } => match self.engine.run_query(&query, &mut page) {
                SolveOutcome::Success(_) => Ok(()),
                SolveOutcome::Failure => {
                    page.diagnostics.push(Diagnostic::info(
                        Some(pos),
                        format!("query failed: {}", query.goal),
                    ));
                    Ok(())
                }
                SolveOutcome::Error(e) if e.kind == ErrorKind::Existence => {
                    page.diagnostics.push(Diagnostic::warning(
                        Some(pos),
                        format!("query failed: {}: {}", e.detail, e.culprit),
                    ));
                    Ok(())
                }
                SolveOutcome::Error(error) => Err(TemplateError::Engine { error, pos }),
                SolveOutcome::BudgetExceeded => Err(TemplateError::BudgetExceeded { pos }),
            },
        }
    }
}

/// Renders `doc` into the session's output: HTML segments are copied
/// verbatim and each chunk is replaced by whatever its queries write.
pub fn render_document(doc: &PspDocument, session: &mut RenderSession) -> Result<(), TemplateError> {
    for segment in &doc.segments {
        match segment {
            Segment::Html(bytes) => session.engine.output.write_literal(bytes),
            Segment::Code { source, location } => {
                for item in parse_chunk(source, *location)? {
                    session.execute(item)?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HELLO: &str = "<html>\n<head>\n<title>Hello World example</title>\n</head>\n<body>\n<?psp\nmsg('Hello, World!').\n?-msg(X), write(X).\n?>\n</body>\n</html>\n";

    fn render(src: &str) -> (String, RenderSession) {
        let doc = segment_document(src.as_bytes()).unwrap();
        let mut session = RenderSession::with_database(Database::new());
        render_document(&doc, &mut session).unwrap();
        (String::from_utf8(session.body().to_vec()).unwrap(), session)
    }

    #[test]
    fn hello_segments() {
        let doc = segment_document(HELLO.as_bytes()).unwrap();
        assert_eq!(doc.segments.len(), 3);
        let Segment::Code { source, location } = &doc.segments[1] else { panic!() };
        assert_eq!(source, b"\nmsg('Hello, World!').\n?-msg(X), write(X).\n");
        assert_eq!(*location, Pos::new(6, 1));
        assert_eq!(doc.to_source(), HELLO.as_bytes());
    }

    #[test]
    fn plain_html_is_one_segment() {
        let doc = segment_document(b"<html></html>").unwrap();
        assert_eq!(doc.segments, vec![Segment::Html(b"<html></html>".to_vec())]);
        assert!(segment_document(b"").unwrap().segments.is_empty());
    }

    #[test]
    fn alternating_segments() {
        let doc = segment_document(b"a<?psp ?-write(x). ?>b<?psp ?-write(y). ?>c").unwrap();
        assert_eq!(doc.segments.len(), 5);
        assert_eq!(doc.code_segments(), 2);
        let (out, _) = render("a<?psp ?-write(x). ?>b<?psp ?-write(y). ?>c");
        assert_eq!(out, "axbyc");
    }

    #[test]
    fn unterminated_chunk_reports_open_position() {
        let err = segment_document(b"ab\n  <?psp ?-write(x).").unwrap_err();
        assert_eq!(err, TemplateError::Unterminated(Pos::new(2, 3)));
    }

    #[test]
    fn chunk_items_carry_document_positions() {
        let items = parse_chunk(b"\nmsg('Hello, World!').\n?-msg(X), write(X).\n", Pos::new(6, 1)).unwrap();
        assert_eq!(items.len(), 2);
        assert!(matches!(items[0], ProgramItem::Clause { .. }));
        assert_eq!(items[0].pos(), Pos::new(7, 1));
        assert!(matches!(items[1], ProgramItem::Query { .. }));
        assert_eq!(items[1].pos(), Pos::new(8, 1));
        assert!(parse_chunk(b"  \n ", Pos::new(1, 1)).unwrap().is_empty());

        let err = parse_chunk(b" foo(.", Pos::new(3, 4)).unwrap_err();
        assert_eq!(err.pos(), Pos::new(3, 14));
    }

    #[test]
    fn hello_world_renders() {
        let (out, session) = render(HELLO);
        assert_eq!(
            out,
            "<html>\n<head>\n<title>Hello World example</title>\n</head>\n<body>\nHello, World!\n</body>\n</html>\n"
        );
        assert!(session.diagnostics.is_empty());
    }

    #[test]
    fn later_chunks_see_earlier_assertions() {
        let (out, _) = render("<?psp fact(1). ?>-<?psp ?-fact(X), write(X). ?>");
        assert_eq!(out, "-1");
    }

    #[test]
    fn failure_is_contained() {
        let (out, session) = render("<?psp ?-write(a), fail. ?-write(b). ?>|<?psp ?-write(c). ?>");
        assert_eq!(out, "ab|c");
        assert_eq!(session.diagnostics.len(), 1);
    }

    #[test]
    fn unknown_predicate_is_downgraded() {
        let (out, session) = render("<?psp ?-nosuch(1). ?-write(ok). ?>");
        assert_eq!(out, "ok");
        assert_eq!(session.diagnostics.len(), 1);
    }

    #[test]
    fn syntax_error_aborts_before_the_chunk_runs() {
        let doc = segment_document(b"x<?psp ?-write(a). ?-write(. ?>").unwrap();
        let mut session = RenderSession::with_database(Database::new());
        let err = render_document(&doc, &mut session).unwrap_err();
        assert!(matches!(err, TemplateError::Syntax(_)));
        assert_eq!(session.body(), b"x");
    }

    #[test]
    fn engine_errors_abort() {
        let doc = segment_document(b"<?psp ?-X is foo + 1. ?>").unwrap();
        let mut session = RenderSession::with_database(Database::new());
        assert!(matches!(
            render_document(&doc, &mut session),
            Err(TemplateError::Engine { .. })
        ));
        let doc = segment_document(b"<?psp loop :- loop. ?-loop. ?>").unwrap();
        let mut session = RenderSession::new(Session::new(Database::new()).with_budget(1000));
        assert!(matches!(
            render_document(&doc, &mut session),
            Err(TemplateError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn html_does_not_start_output() {
        let (_, session) = render("<p>text</p><?psp ?-write(''). ?>");
        assert!(!session.output_started());
    }
}
