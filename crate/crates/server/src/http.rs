//! Minimal HTTP/1.1: request parsing with limits, and buffered responses.

use std::fmt;
use std::io::{self, BufRead, Read, Write};

use psp_core::web::percent_decode;

pub const SERVER_NAME: &str = concat!("psp/", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
    Head,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Get => "GET",
            Method::Post => "POST",
            Method::Head => "HEAD",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HttpRequest {
    pub method: Method,
    /// Percent-decoded path, not yet normalized.
    pub path: String,
    /// Raw query string, without the `?`.
    pub query: String,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpRequest {
    pub fn new(method: Method, path: impl Into<String>) -> Self {
        HttpRequest {
            method,
            path: path.into(),
            query: String::new(),
            headers: Vec::new(),
            body: Vec::new(),
        }
    }

    /// First value of a header, matched case-insensitively.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn header_values<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.headers
            .iter()
            .filter(move |(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Status(pub u16);

impl Status {
    pub const OK: Status = Status(200);
    pub const BAD_REQUEST: Status = Status(400);
    pub const FORBIDDEN: Status = Status(403);
    pub const NOT_FOUND: Status = Status(404);
    pub const METHOD_NOT_ALLOWED: Status = Status(405);
    pub const LENGTH_REQUIRED: Status = Status(411);
    pub const PAYLOAD_TOO_LARGE: Status = Status(413);
    pub const HEADERS_TOO_LARGE: Status = Status(431);
    pub const INTERNAL_ERROR: Status = Status(500);

    pub fn reason(self) -> &'static str {
        match self.0 {
            200 => "OK",
            400 => "Bad Request",
            403 => "Forbidden",
            404 => "Not Found",
            405 => "Method Not Allowed",
            411 => "Length Required",
            413 => "Payload Too Large",
            431 => "Request Header Fields Too Large",
            500 => "Internal Server Error",
            _ => "Unknown",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.0, self.reason())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: Status,
    /// Headers other than `Content-Length`, which is derived from the body.
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn new(status: Status, content_type: &str, body: Vec<u8>) -> Self {
        HttpResponse {
            status,
            headers: vec![
                ("Server".to_owned(), SERVER_NAME.to_owned()),
                ("Content-Type".to_owned(), content_type.to_owned()),
            ],
            body,
        }
    }

    /// A small HTML page for an error status.
    pub fn error_page(status: Status, detail: Option<&str>) -> Self {
        let mut body = format!(
            "<html>\n<head>\n<title>{status}</title>\n</head>\n<body>\n<h1>{}</h1>\n",
            status.reason()
        );
        if let Some(detail) = detail {
            body.push_str(&format!("<pre>{}</pre>\n", escape_html(detail)));
        }
        body.push_str("</body>\n</html>\n");
        HttpResponse::new(status, "text/html", body.into_bytes())
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    /// Serializes status line, headers and (unless `head_only`) the body.
    /// `Content-Length` always describes the full body.
    pub fn to_bytes(&self, head_only: bool) -> Vec<u8> {
        let mut out = format!("HTTP/1.1 {}\r\n", self.status).into_bytes();
        for (name, value) in &self.headers {
            out.extend_from_slice(format!("{name}: {value}\r\n").as_bytes());
        }
        out.extend_from_slice(format!("Content-Length: {}\r\n", self.body.len()).as_bytes());
        out.extend_from_slice(b"Connection: close\r\n\r\n");
        if !head_only {
            out.extend_from_slice(&self.body);
        }
        out
    }

    pub fn write_to(&self, w: &mut impl Write, head_only: bool) -> io::Result<()> {
        w.write_all(&self.to_bytes(head_only))?;
        w.flush()
    }
}

pub fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_line: usize,
    pub max_headers: usize,
    pub max_body: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_line: 8192,
            max_headers: 100,
            max_body: 1 << 20,
        }
    }
}

/// A request that cannot be served, with the status to answer it with.
#[derive(Debug, thiserror::Error)]
pub enum RequestError {
    #[error("{status}: {message}")]
    Rejected { status: Status, message: String },
    #[error("i/o error reading request: {0}")]
    Io(#[from] io::Error),
}

impl RequestError {
    fn reject(status: Status, message: impl Into<String>) -> Self {
        RequestError::Rejected {
            status,
            message: message.into(),
        }
    }
}

fn read_line(reader: &mut impl BufRead, max: usize) -> Result<Option<String>, RequestError> {
    let mut buf = Vec::new();
    reader
        .by_ref()
        .take(max as u64 + 2)
        .read_until(b'\n', &mut buf)?;
    if buf.is_empty() {
        return Ok(None);
    }
    if buf.last() != Some(&b'\n') {
        if buf.len() > max {
            return Err(RequestError::reject(Status::HEADERS_TOO_LARGE, "line too long"));
        }
        return Err(RequestError::reject(Status::BAD_REQUEST, "unexpected end of request"));
    }
    buf.pop();
    if buf.last() == Some(&b'\r') {
        buf.pop();
    }
    if buf.len() > max {
        return Err(RequestError::reject(Status::HEADERS_TOO_LARGE, "line too long"));
    }
    String::from_utf8(buf)
        .map(Some)
        .map_err(|_| RequestError::reject(Status::BAD_REQUEST, "request head is not UTF-8"))
}

fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b"!#$%&'*+-.^_`|~".contains(&b))
}

/// Reads one request. `Ok(None)` means the peer closed the connection
/// before sending anything.
pub fn parse_request(
    reader: &mut impl BufRead,
    limits: &Limits,
) -> Result<Option<HttpRequest>, RequestError> {
    let Some(line) = read_line(reader, limits.max_line)? else {
        return Ok(None);
    };
    let parts: Vec<&str> = line.split(' ').collect();
    let [method, target, version] = parts[..] else {
        return Err(RequestError::reject(Status::BAD_REQUEST, "malformed request line"));
    };
    if !version.starts_with("HTTP/1.") || !is_token(method) {
        return Err(RequestError::reject(Status::BAD_REQUEST, "malformed request line"));
    }
    let method = match method {
        "GET" => Method::Get,
        "POST" => Method::Post,
        "HEAD" => Method::Head,
        other => {
            return Err(RequestError::reject(
                Status::METHOD_NOT_ALLOWED,
                format!("method {other} not supported"),
            ))
        }
    };
    let target = match target.strip_prefix("http://") {
        Some(rest) => rest.find('/').map_or("/", |i| &rest[i..]),
        None => target,
    };
    if !target.starts_with('/') {
        return Err(RequestError::reject(Status::BAD_REQUEST, "request target must be a path"));
    }
    let (raw_path, query) = target.split_once('?').unwrap_or((target, ""));
    let path = percent_decode(raw_path, false)
        .map_err(|e| RequestError::reject(Status::BAD_REQUEST, format!("bad path: {e}")))?;

    let mut headers = Vec::new();
    loop {
        let Some(line) = read_line(reader, limits.max_line)? else {
            return Err(RequestError::reject(Status::BAD_REQUEST, "unexpected end of headers"));
        };
        if line.is_empty() {
            break;
        }
        if headers.len() == limits.max_headers {
            return Err(RequestError::reject(Status::HEADERS_TOO_LARGE, "too many header fields"));
        }
        let Some((name, value)) = line.split_once(':') else {
            return Err(RequestError::reject(Status::BAD_REQUEST, "malformed header field"));
        };
        if !is_token(name) {
            return Err(RequestError::reject(Status::BAD_REQUEST, "malformed header name"));
        }
        headers.push((name.to_owned(), value.trim().to_owned()));
    }

    let mut request = HttpRequest {
        method,
        path,
        query: query.to_owned(),
        headers,
        body: Vec::new(),
    };
    let lengths: Vec<&str> = request.header_values("Content-Length").collect();
    let chunked = request.header("Transfer-Encoding").is_some();
    if chunked {
        return Err(RequestError::reject(
            if lengths.is_empty() { Status::LENGTH_REQUIRED } else { Status::BAD_REQUEST },
            "transfer codings are not supported",
        ));
    }
    let length = match lengths.as_slice() {
        [] => 0,
        [first, rest @ ..] if rest.iter().all(|l| l == first) => first
            .parse::<u64>()
            .map_err(|_| RequestError::reject(Status::BAD_REQUEST, "invalid Content-Length"))?,
        _ => return Err(RequestError::reject(Status::BAD_REQUEST, "conflicting Content-Length")),
    };
    if length > limits.max_body {
        return Err(RequestError::reject(Status::PAYLOAD_TOO_LARGE, "request body too large"));
    }
    request.body = vec![0; length as usize];
    reader.read_exact(&mut request.body).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => RequestError::reject(Status::BAD_REQUEST, "body shorter than Content-Length"),
        _ => RequestError::Io(e),
    })?;
    Ok(Some(request))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(raw: &str) -> Result<Option<HttpRequest>, RequestError> {
        parse_request(&mut raw.as_bytes(), &Limits::default())
    }

    fn status(raw: &str) -> u16 {
        match parse(raw) {
            Err(RequestError::Rejected { status, .. }) => status.0,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn get_with_host() {
        let req = parse("GET /hello.psp HTTP/1.1\r\nHost: localhost\r\n\r\n").unwrap().unwrap();
        assert_eq!(req.method, Method::Get);
        assert_eq!(req.path, "/hello.psp");
        assert_eq!(req.query, "");
        assert_eq!(req.header("host"), Some("localhost"));
    }

    #[test]
    fn query_string_and_decoded_path() {
        let req = parse("GET /a%20b.psp?x=1&y=%40 HTTP/1.0\r\n\r\n").unwrap().unwrap();
        assert_eq!(req.path, "/a b.psp");
        assert_eq!(req.query, "x=1&y=%40");
    }

    #[test]
    fn post_body() {
        let body = "firstname=Andrei&lastname=Vancea";
        let raw = format!(
            "POST /form_handler.psp HTTP/1.1\r\nContent-Type: application/x-www-form-urlencoded\r\nContent-Length: {}\r\n\r\n{body}",
            body.len()
        );
        let req = parse(&raw).unwrap().unwrap();
        assert_eq!(req.method, Method::Post);
        assert_eq!(req.body, body.as_bytes());
    }

    #[test]
    fn rejections() {
        assert_eq!(status("BREW /pot HTTP/1.1\r\n\r\n"), 405);
        assert_eq!(status("GET /\r\n\r\n"), 400);
        assert_eq!(status("GET / HTTP/1.1\r\nbad header\r\n\r\n"), 400);
        assert_eq!(status("GET noslash HTTP/1.1\r\n\r\n"), 400);
        assert_eq!(status("GET /%zz HTTP/1.1\r\n\r\n"), 400);
        assert_eq!(status("POST / HTTP/1.1\r\nTransfer-Encoding: chunked\r\n\r\n"), 411);
        assert_eq!(status("POST / HTTP/1.1\r\nContent-Length: 5\r\n\r\nab"), 400);
        assert_eq!(status("POST / HTTP/1.1\r\nContent-Length: 2000000\r\n\r\n"), 413);
        let long = format!("GET /{} HTTP/1.1\r\n\r\n", "a".repeat(9000));
        assert_eq!(status(&long), 431);
        let many: String = (0..101).map(|i| format!("X-{i}: v\r\n")).collect();
        assert_eq!(status(&format!("GET / HTTP/1.1\r\n{many}\r\n")), 431);
    }

    #[test]
    fn empty_connection() {
        assert!(parse("").unwrap().is_none());
    }

    #[test]
    fn response_serialization() {
        let mut resp = HttpResponse::new(Status::OK, "text/html", b"hi".to_vec());
        resp.headers.push(("Set-Cookie".into(), "id=42".into()));
        let text = String::from_utf8(resp.to_bytes(false)).unwrap();
        assert!(text.starts_with("HTTP/1.1 200 OK\r\n"));
        assert!(text.contains("\r\nSet-Cookie: id=42\r\n"));
        assert!(text.contains("\r\nContent-Length: 2\r\n"));
        assert!(text.ends_with("\r\n\r\nhi"));
        let head = String::from_utf8(resp.to_bytes(true)).unwrap();
        assert!(head.ends_with("\r\n\r\n"));
        assert!(head.contains("Content-Length: 2"));
    }

    #[test]
    fn error_pages_escape_detail() {
        let page = HttpResponse::error_page(Status::INTERNAL_ERROR, Some("<b>&"));
        let text = String::from_utf8(page.body).unwrap();
        assert!(text.contains("&lt;b&gt;&amp;"));
    }
}
