//! Request handling: routing, page rendering and static files.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};
use std::time::SystemTime;

use psp_core::Severity;
use psp_core::prolog::{ClauseStore, Database, Session};
use psp_core::template::{render_document, segment_document, PspDocument, RenderSession, TemplateError};
use psp_core::web::{bind_request_facts, decode_form, parse_cookie_header, ControlPair};

use crate::config::ServerConfig;
use crate::http::{HttpRequest, HttpResponse, Method, Status};
use crate::route::{route, RouteTarget};

type CacheEntry = (SystemTime, Arc<PspDocument>);

/// Everything shared between requests. All of it is read-only apart from
/// the document cache, which only ever stores immutable documents.
pub struct Site {
    config: ServerConfig,
    docroot: PathBuf,
    base: Arc<ClauseStore>,
    cache: RwLock<HashMap<PathBuf, CacheEntry>>,
}

enum PageError {
    Bad(String),
    Render(TemplateError),
}

impl Site {
    pub fn new(config: ServerConfig, base: ClauseStore) -> std::io::Result<Site> {
        let docroot = config.docroot.canonicalize()?;
        Ok(Site {
            config,
            docroot,
            base: Arc::new(base),
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn docroot(&self) -> &Path {
        &self.docroot
    }

    pub fn handle(&self, req: &HttpRequest) -> HttpResponse {
        match route(&req.path, &self.docroot, &self.config.index_file) {
            RouteTarget::PspFile(path) => self.serve_page(req, &path),
            RouteTarget::StaticFile(path, media) => match std::fs::read(&path) {
                Ok(bytes) => HttpResponse::new(Status::OK, media, bytes),
                Err(e) => {
                    log::error!("reading {}: {e}", path.display());
                    HttpResponse::error_page(Status::INTERNAL_ERROR, None)
                }
            },
            RouteTarget::NotFound => HttpResponse::error_page(Status::NOT_FOUND, None),
            RouteTarget::Forbidden => HttpResponse::error_page(Status::FORBIDDEN, None),
        }
    }

    fn document(&self, path: &Path) -> std::io::Result<Result<Arc<PspDocument>, TemplateError>> {
        let modified = std::fs::metadata(path)?.modified()?;
        if let Some((stamp, doc)) = self.cache.read().unwrap().get(path) {
            if *stamp == modified {
                return Ok(Ok(doc.clone()));
            }
        }
        let source = std::fs::read(path)?;
        Ok(segment_document(&source).map(|doc| {
            let doc = Arc::new(doc);
            self.cache
                .write()
                .unwrap()
                .insert(path.to_owned(), (modified, doc.clone()));
            doc
        }))
    }

    fn serve_page(&self, req: &HttpRequest, path: &Path) -> HttpResponse {
        let doc = match self.document(path) {
            Ok(Ok(doc)) => doc,
            Ok(Err(e)) => return self.render_failure(path, &e.to_string()),
            Err(e) => {
                log::error!("reading {}: {e}", path.display());
                return HttpResponse::error_page(Status::INTERNAL_ERROR, None);
            }
        };
        match self.render(req, &doc) {
            Ok(session) => {
                for d in &session.diagnostics {
                    let level = match d.severity {
                        Severity::Info => log::Level::Info,
                        Severity::Warning => log::Level::Warn,
                    };
                    log::log!(level, "{}: {d}", path.display());
                }
                let mut response = HttpResponse::new(Status::OK, "text/html", session.engine.output.bytes().to_vec());
                response.headers.extend(session.pending_headers);
                response
            }
            Err(PageError::Bad(message)) => HttpResponse::error_page(Status::BAD_REQUEST, Some(&message)),
            Err(PageError::Render(e)) => self.render_failure(path, &e.to_string()),
        }
    }

    fn render_failure(&self, path: &Path, message: &str) -> HttpResponse {
        log::error!("{}: {message}", path.display());
        let detail = self.config.debug.then_some(message);
        HttpResponse::error_page(Status::INTERNAL_ERROR, detail)
    }

    fn render(&self, req: &HttpRequest, doc: &PspDocument) -> Result<RenderSession, PageError> {
        let controls = request_controls(req).map_err(PageError::Bad)?;
        let mut cookies = Vec::new();
        for header in req.header_values("Cookie") {
            let (pairs, diagnostics) = parse_cookie_header(header);
            for d in diagnostics {
                log::warn!("{} {}: {d}", req.method, req.path);
            }
            cookies.extend(pairs);
        }
        let mut db = Database::with_base(self.base.clone());
        bind_request_facts(&controls, &cookies, &mut db);
        let engine = Session::new(db)
            .with_budget(self.config.step_limit)
            .with_occurs_check(self.config.occurs_check);
        let mut session = RenderSession::new(engine);
        render_document(doc, &mut session).map_err(PageError::Render)?;
        Ok(session)
    }
}

/// Controls come from the query string for GET and HEAD, and from a
/// urlencoded body for POST.
fn request_controls(req: &HttpRequest) -> Result<Vec<ControlPair>, String> {
    let encoded = match req.method {
        Method::Get | Method::Head => req.query.clone(),
        Method::Post => {
            let urlencoded = req.header("Content-Type").is_none_or(|t| {
                t.split(';')
                    .next()
                    .is_some_and(|m| m.trim().eq_ignore_ascii_case("application/x-www-form-urlencoded"))
            });
            if !urlencoded {
                return Ok(Vec::new());
            }
            String::from_utf8(req.body.clone()).map_err(|_| "request body is not UTF-8".to_owned())?
        }
    };
    decode_form(&encoded).map_err(|e| e.to_string())
}
