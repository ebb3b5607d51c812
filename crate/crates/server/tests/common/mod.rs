#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use psp_server::config::ServerConfig;
use psp_server::prelude::load_preludes;
use psp_server::server::Server;
use psp_server::site::Site;

pub fn fixture_site() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/site")
}

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn site_config(docroot: PathBuf) -> ServerConfig {
    ServerConfig {
        docroot,
        port: 0,
        ..Default::default()
    }
}

#[derive(Clone, Default)]
pub struct SharedLog(pub Arc<Mutex<Vec<u8>>>);

impl Write for SharedLog {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

impl SharedLog {
    pub fn text(&self) -> String {
        String::from_utf8(self.0.lock().unwrap().clone()).unwrap()
    }
}

pub struct Running {
    pub addr: SocketAddr,
    pub log: SharedLog,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<std::io::Result<()>>>,
}

impl Running {
    pub fn start(config: ServerConfig) -> Running {
        let preludes = load_preludes(&config.preludes, config.step_limit, config.occurs_check).unwrap();
        let site = Site::new(config, preludes.store).unwrap();
        let log = SharedLog::default();
        let server = Server::bind(site).unwrap().with_access_log(Box::new(log.clone()));
        let addr = server.local_addr().unwrap();
        let shutdown = Arc::new(AtomicBool::new(false));
        let flag = shutdown.clone();
        let handle = std::thread::spawn(move || server.run(&flag));
        Running {
            addr,
            log,
            shutdown,
            handle: Some(handle),
        }
    }

    /// Sends raw request bytes and returns the raw response.
    pub fn send(&self, raw: &[u8]) -> Vec<u8> {
        let mut stream = TcpStream::connect(self.addr).unwrap();
        stream.write_all(raw).unwrap();
        let mut out = Vec::new();
        stream.read_to_end(&mut out).unwrap();
        out
    }

    pub fn get(&self, target: &str, extra_headers: &str) -> Response {
        let raw = format!("GET {target} HTTP/1.1\r\nHost: localhost\r\n{extra_headers}\r\n");
        Response::parse(&self.send(raw.as_bytes()))
    }

    pub fn post_form(&self, target: &str, body: &str) -> Response {
        let raw = format!(
            "POST {target} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/x-www-form-urlencoded\r\nContent-Length: {}\r\n\r\n{body}",
            body.len()
        );
        Response::parse(&self.send(raw.as_bytes()))
    }

    pub fn stop(mut self) -> std::io::Result<()> {
        self.shutdown.store(true, Ordering::Relaxed);
        self.handle.take().unwrap().join().unwrap()
    }
}

impl Drop for Running {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

#[derive(Debug)]
pub struct Response {
    pub raw: Vec<u8>,
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
    /// Offset of the first body byte in `raw`.
    pub body_start: usize,
}

impl Response {
    pub fn parse(raw: &[u8]) -> Response {
        let split = raw.windows(4).position(|w| w == b"\r\n\r\n").expect("no header terminator");
        let head = std::str::from_utf8(&raw[..split]).unwrap();
        let mut lines = head.split("\r\n");
        let status = lines.next().unwrap().split(' ').nth(1).unwrap().parse().unwrap();
        let headers = lines
            .map(|l| {
                let (n, v) = l.split_once(": ").unwrap();
                (n.to_owned(), v.to_owned())
            })
            .collect();
        Response {
            raw: raw.to_vec(),
            status,
            headers,
            body: raw[split + 4..].to_vec(),
            body_start: split + 4,
        }
    }

    pub fn header_all(&self, name: &str) -> Vec<&str> {
        self.headers
            .iter()
            .filter(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
            .collect()
    }

    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}
