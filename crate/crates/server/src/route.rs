//! Mapping request paths to files under the document root.

use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RouteTarget {
    PspFile(PathBuf),
    StaticFile(PathBuf, &'static str),
    NotFound,
    Forbidden,
}

pub fn media_type(path: &Path) -> &'static str {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("html" | "htm") => "text/html",
        Some("css") => "text/css",
        Some("js") => "text/javascript",
        Some("json") => "application/json",
        Some("txt" | "pl" | "pro") => "text/plain",
        Some("xml") => "application/xml",
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("svg") => "image/svg+xml",
        Some("ico") => "image/x-icon",
        Some("pdf") => "application/pdf",
        _ => "application/octet-stream",
    }
}

fn is_psp(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "psp")
}

/// Lexically resolves `.` and `..` segments. `None` if the path climbs above
/// the root.
fn normalize(path: &str) -> Option<Vec<&str>> {
    let mut segments = Vec::new();
    for segment in path.split('/') {
        match segment {
            "" | "." => {}
            ".." => {
                segments.pop()?;
            }
            s => segments.push(s),
        }
    }
    Some(segments)
}

/// Resolves a decoded request path against `docroot`, which must already be
/// canonical. Symbolic links leading outside the root are refused.
pub fn route(path: &str, docroot: &Path, index_file: &str) -> RouteTarget {
    if path.contains('\0') {
        return RouteTarget::Forbidden;
    }
    let Some(segments) = normalize(path) else {
        return RouteTarget::Forbidden;
    };
    let mut candidate = docroot.to_path_buf();
    candidate.extend(&segments);
    let Ok(mut resolved) = candidate.canonicalize() else {
        return RouteTarget::NotFound;
    };
    if !resolved.starts_with(docroot) {
        return RouteTarget::Forbidden;
    }
    if resolved.is_dir() {
        let Ok(index) = resolved.join(index_file).canonicalize() else {
            return RouteTarget::NotFound;
        };
        if !index.starts_with(docroot) {
            return RouteTarget::Forbidden;
        }
        resolved = index;
    }
    if !resolved.is_file() {
        return RouteTarget::NotFound;
    }
    if is_psp(&resolved) {
        RouteTarget::PspFile(resolved)
    } else {
        let media = media_type(&resolved);
        RouteTarget::StaticFile(resolved, media)
    }
}
