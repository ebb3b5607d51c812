use std::process::ExitCode;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use psp_server::cli::{parse_args, Command, UsageError};
use psp_server::config::ServerConfig;
use psp_server::prelude::load_preludes;
use psp_server::render::render_once;
use psp_server::server::{Server, HANDLER_STACK};
use psp_server::site::Site;

fn serve(config: ServerConfig) -> ExitCode {
    let preludes = match load_preludes(&config.preludes, config.step_limit, config.occurs_check) {
        Ok(p) => p,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::FAILURE;
        }
    };
    for line in &preludes.log {
        log::info!("{}", line.trim_end());
    }
    let site = match Site::new(config.clone(), preludes.store) {
        Ok(site) => site,
        Err(e) => {
            log::error!("document root {}: {e}", config.docroot.display());
            return ExitCode::FAILURE;
        }
    };
    let server = match Server::bind(site) {
        Ok(s) => s,
        Err(e) => {
            log::error!("cannot listen on {}:{}: {e}", config.host, config.port);
            return ExitCode::FAILURE;
        }
    };
    let shutdown = Arc::new(AtomicBool::new(false));
    for signal in [signal_hook::consts::SIGINT, signal_hook::consts::SIGTERM] {
        if let Err(e) = signal_hook::flag::register(signal, shutdown.clone()) {
            log::error!("cannot install signal handler: {e}");
            return ExitCode::FAILURE;
        }
    }
    if let Ok(addr) = server.local_addr() {
        log::info!("listening on http://{addr}/");
    }
    match server.run(&shutdown) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match parse_args(std::env::args_os()) {
        Ok(Command::Serve(config)) => serve(config),
        Ok(Command::Render(cmd)) => {
            let worker = std::thread::Builder::new().stack_size(HANDLER_STACK).spawn(move || {
                render_once(&cmd, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
            });
            let code = worker.ok().and_then(|w| w.join().ok()).unwrap_or(1);
            ExitCode::from(code as u8)
        }
        Err(UsageError::Clap(e)) => e.exit(),
        Err(UsageError::Config(e)) => {
            eprintln!("psp: {e}");
            ExitCode::from(2)
        }
    }
}
