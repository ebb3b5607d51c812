//! The accept loop: one thread per connection, one request per connection.

use std::io::{self, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use crate::http::{parse_request, HttpResponse, Limits, Method, RequestError};
use crate::site::Site;

/// Deep programs recurse through the parser and formatter; give handlers
/// room well beyond the platform default.
pub const HANDLER_STACK: usize = 64 << 20;
const READ_TIMEOUT: Duration = Duration::from_secs(10);
const POLL_INTERVAL: Duration = Duration::from_millis(10);

pub type AccessLog = Arc<Mutex<Box<dyn Write + Send>>>;

pub struct Server {
    listener: TcpListener,
    site: Arc<Site>,
    limits: Limits,
    access_log: AccessLog,
}

impl Server {
    pub fn bind(site: Site) -> io::Result<Server> {
        let config = site.config();
        let listener = TcpListener::bind((config.host.as_str(), config.port))?;
        listener.set_nonblocking(true)?;
        let limits = Limits {
            max_body: config.max_body,
            ..Limits::default()
        };
        Ok(Server {
            listener,
            site: Arc::new(site),
            limits,
            access_log: Arc::new(Mutex::new(Box::new(io::stderr()))),
        })
    }

    pub fn with_access_log(mut self, sink: Box<dyn Write + Send>) -> Self {
        self.access_log = Arc::new(Mutex::new(sink));
        self
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves until `shutdown` is set, then waits for in-flight requests.
    pub fn run(&self, shutdown: &AtomicBool) -> io::Result<()> {
        let mut workers: Vec<JoinHandle<()>> = Vec::new();
        while !shutdown.load(Ordering::Relaxed) {
            match self.listener.accept() {
                Ok((stream, _)) => {
                    let site = self.site.clone();
                    let log = self.access_log.clone();
                    let limits = self.limits;
                    let spawned = thread::Builder::new()
                        .stack_size(HANDLER_STACK)
                        .spawn(move || handle_connection(stream, &site, &limits, &log));
                    match spawned {
                        Ok(handle) => workers.push(handle),
                        Err(e) => log::error!("cannot start handler thread: {e}"),
                    }
                    workers.retain(|w| !w.is_finished());
                }
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(POLL_INTERVAL),
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => log::warn!("accept failed: {e}"),
            }
        }
        for worker in workers {
            let _ = worker.join();
        }
        Ok(())
    }
}

fn handle_connection(stream: TcpStream, site: &Site, limits: &Limits, log: &AccessLog) {
    let started = Instant::now();
    // Accepted sockets may inherit non-blocking mode on some platforms.
    if let Err(e) = stream
        .set_nonblocking(false)
        .and_then(|_| stream.set_read_timeout(Some(READ_TIMEOUT)))
    {
        log::warn!("configuring connection: {e}");
        return;
    }
    let mut reader = BufReader::new(&stream);
    let (method, path, response) = match parse_request(&mut reader, limits) {
        Ok(None) => return,
        Ok(Some(req)) => {
            let response = site.handle(&req);
            (Some(req.method), req.path, response)
        }
        Err(RequestError::Rejected { status, message }) => {
            (None, "-".to_owned(), HttpResponse::error_page(status, Some(&message)))
        }
        Err(RequestError::Io(e)) => {
            log::warn!("reading request: {e}");
            return;
        }
    };
    let head_only = method == Some(Method::Head);
    let bytes = response.to_bytes(head_only);
    let mut stream = &stream;
    if let Err(e) = stream.write_all(&bytes).and_then(|_| stream.flush()) {
        log::warn!("writing response: {e}");
    }
    let line = format!(
        "{} {} {} {} {} {}\n",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        method.map_or("-", Method::as_str),
        path,
        response.status.0,
        started.elapsed().as_millis(),
        if head_only { 0 } else { response.body.len() },
    );
    if let Ok(mut sink) = log.lock() {
        let _ = sink.write_all(line.as_bytes());
        let _ = sink.flush();
    }
}
