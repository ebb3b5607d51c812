//! `psp render`: one request through the same pipeline the server uses.

use std::io::Write;

use psp_core::web::percent_encode;

use crate::cli::{RenderCommand, RenderMethod};
use crate::http::{HttpRequest, Method, Status};
use crate::prelude::load_preludes;
use crate::site::Site;

fn encode_pairs(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(n, v)| format!("{}={}", percent_encode(n), percent_encode(v)))
        .collect::<Vec<_>>()
        .join("&")
}

/// Builds the request `psp serve` would receive for this page.
pub fn synthesize_request(cmd: &RenderCommand) -> HttpRequest {
    let name = cmd.file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let encoded = encode_pairs(&cmd.args);
    let mut req = HttpRequest::new(
        match cmd.method {
            RenderMethod::Get => Method::Get,
            RenderMethod::Post => Method::Post,
        },
        format!("/{name}"),
    );
    match cmd.method {
        RenderMethod::Get => req.query = encoded,
        RenderMethod::Post => {
            req.headers.push((
                "Content-Type".to_owned(),
                "application/x-www-form-urlencoded".to_owned(),
            ));
            req.headers.push(("Content-Length".to_owned(), encoded.len().to_string()));
            req.body = encoded.into_bytes();
        }
    }
    if !cmd.cookies.is_empty() {
        let cookie = cmd
            .cookies
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join("; ");
        req.headers.push(("Cookie".to_owned(), cookie));
    }
    req
}

/// Renders the page: body to `out`, status and headers to `err`. Returns
/// the process exit code: 0 on success, 1 when rendering failed, 2 when
/// the page or preludes could not be loaded.
pub fn render_once(cmd: &RenderCommand, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if !cmd.file.is_file() {
        let _ = writeln!(err, "psp: no such file: {}", cmd.file.display());
        return 2;
    }
    let preludes = match load_preludes(&cmd.config.preludes, cmd.config.step_limit, cmd.config.occurs_check) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "psp: {e}");
            return 2;
        }
    };
    for line in &preludes.log {
        let _ = writeln!(err, "{line}");
    }
    let mut config = cmd.config.clone();
    config.docroot = match cmd.file.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
        _ => ".".into(),
    };
    let site = match Site::new(config, preludes.store) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "psp: {}: {e}", cmd.file.display());
            return 2;
        }
    };
    let response = site.handle(&synthesize_request(cmd));
    let _ = writeln!(err, "{} {}", response.status.0, response.status.reason());
    for (name, value) in &response.headers {
        let _ = writeln!(err, "{name}: {value}");
    }
    let _ = out.write_all(&response.body);
    let _ = out.flush();
    match response.status {
        Status::OK => 0,
        Status::INTERNAL_ERROR => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ServerConfig;
    use std::path::PathBuf;

    fn command(file: PathBuf, method: RenderMethod) -> RenderCommand {
        RenderCommand {
            config: ServerConfig::default(),
            file,
            method,
            args: vec![("first name".into(), "A&B".into())],
            cookies: vec![("id".into(), "42".into()), ("t".into(), "x".into())],
        }
    }

    #[test]
    fn request_shape() {
        let get = synthesize_request(&command("dir/a b.psp".into(), RenderMethod::Get));
        assert_eq!(get.path, "/a b.psp");
        assert_eq!(get.query, "first%20name=A%26B");
        assert_eq!(get.header("Cookie"), Some("id=42; t=x"));
        let post = synthesize_request(&command("a.psp".into(), RenderMethod::Post));
        assert_eq!(post.query, "");
        assert_eq!(post.body, b"first%20name=A%26B");
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let ok = dir.path().join("ok.psp");
        std::fs::write(&ok, "<?psp ?- arg('first name', X), cookie(id, C), write(X-C). ?>").unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(render_once(&command(ok, RenderMethod::Post), &mut out, &mut err), 0);
        assert_eq!(out, b"A&B-42");
        assert!(String::from_utf8(err).unwrap().starts_with("200 OK\n"));

        let bad = dir.path().join("bad.psp");
        std::fs::write(&bad, "<?psp ?- X is a + 1. ?>").unwrap();
        assert_eq!(render_once(&command(bad, RenderMethod::Get), &mut Vec::new(), &mut Vec::new()), 1);
        let missing = dir.path().join("missing.psp");
        assert_eq!(render_once(&command(missing, RenderMethod::Get), &mut Vec::new(), &mut Vec::new()), 2);
    }
}
