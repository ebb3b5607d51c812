//! Command-line parsing for the `psp` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{load_config_file, resolve_config, ConfigError, ConfigOverrides, ServerConfig};

#[derive(Debug, Parser)]
#[command(name = "psp", version, about = "Serve and render Prolog Server Pages")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Run the HTTP server.
    Serve(CommonArgs),
    /// Render one page to standard output.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Address to listen on.
    #[arg(long)]
    host: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    port: Option<u16>,
    /// Document root.
    #[arg(long)]
    root: Option<PathBuf>,
    /// Prolog file consulted at startup into the shared database.
    #[arg(long = "prelude", value_name = "FILE")]
    preludes: Vec<PathBuf>,
    /// Resolution steps allowed per page.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    step_limit: Option<u64>,
    /// File served for directory requests.
    #[arg(long)]
    index: Option<String>,
    /// Show error details in 500 responses.
    #[arg(long)]
    debug: bool,
    /// Largest accepted request body, in bytes.
    #[arg(long)]
    max_body: Option<u64>,
    /// Unify without the occurs check.
    #[arg(long)]
    no_occurs_check: bool,
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// The .psp file to render.
    file: PathBuf,
    #[arg(long, value_enum, ignore_case = true, default_value = "get")]
    method: RenderMethod,
    /// Form control, as name=value.
    #[arg(long = "arg", value_name = "NAME=VALUE", value_parser = parse_pair)]
    args: Vec<(String, String)>,
    /// Inbound cookie, as name=value.
    #[arg(long = "cookie", value_name = "NAME=VALUE", value_parser = parse_pair)]
    cookies: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RenderMethod {
    Get,
    Post,
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(n, v)| (n.to_owned(), v.to_owned()))
        .ok_or_else(|| format!("expected NAME=VALUE, found {s:?}"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderCommand {
    pub config: ServerConfig,
    pub file: PathBuf,
    pub method: RenderMethod,
    pub args: Vec<(String, String)>,
    pub cookies: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Serve(ServerConfig),
    Render(RenderCommand),
}

#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl CommonArgs {
    fn into_config(self) -> Result<ServerConfig, ConfigError> {
        let file = self.config.as_deref().map(load_config_file).transpose()?;
        let flags = ConfigOverrides {
            host: self.host,
            port: self.port,
            docroot: self.root,
            preludes: self.preludes,
            step_limit: self.step_limit,
            index_file: self.index,
            debug: self.debug.then_some(true),
            max_body: self.max_body,
            occurs_check: self.no_occurs_check.then_some(false),
        };
        resolve_config(file, flags)
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<Command, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Ok(match Cli::try_parse_from(argv)?.command {
        CliCommand::Serve(common) => Command::Serve(common.into_config()?),
        CliCommand::Render(r) => Command::Render(RenderCommand {
            config: r.common.into_config()?,
            file: r.file,
            method: r.method,
            args: r.args,
            cookies: r.cookies,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serve_with_root_and_port() {
        let Command::Serve(config) = parse_args(["psp", "serve", "--root", "./site", "--port", "8080"]).unwrap() else {
            panic!()
        };
        assert_eq!(config.docroot, PathBuf::from("./site"));
        assert_eq!(config.port, 8080);
        assert_eq!(config.host, "127.0.0.1");
    }

    #[test]
    fn port_out_of_range() {
        let err = parse_args(["psp", "serve", "--port", "99999"]).unwrap_err();
        assert!(err.to_string().contains("--port"), "{err}");
    }

    #[test]
    fn render_defaults_and_pairs() {
        let Command::Render(r) = parse_args([
            "psp", "render", "hello.psp", "--arg", "firstname=Andrei", "--arg", "email=a@b=c", "--cookie", "id=42",
            "--method", "POST", "--no-occurs-check",
        ])
        .unwrap() else {
            panic!()
        };
        assert_eq!(r.file, PathBuf::from("hello.psp"));
        assert_eq!(r.method, RenderMethod::Post);
        assert_eq!(r.args, vec![("firstname".into(), "Andrei".into()), ("email".into(), "a@b=c".into())]);
        assert_eq!(r.cookies, vec![("id".into(), "42".into())]);
        assert!(!r.config.occurs_check);
        let Command::Render(r) = parse_args(["psp", "render", "hello.psp"]).unwrap() else { panic!() };
        assert_eq!(r.method, RenderMethod::Get);
        assert_eq!(r.config, ServerConfig::default());
    }

    #[test]
    fn unknown_flag_and_bad_pair() {
        assert!(parse_args(["psp", "serve", "--colour"]).is_err());
        assert!(parse_args(["psp", "render", "x.psp", "--arg", "novalue"]).is_err());
        assert!(parse_args(["psp", "serve", "--step-limit", "0"]).is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("psp.conf");
        std::fs::write(&conf, "port = 9000\nstep_limit = 50\ndebug = false\n").unwrap();
        let conf = conf.to_str().unwrap();
        let Command::Serve(c) = parse_args(["psp", "serve", "--config", conf, "--port", "9100", "--debug"]).unwrap() else {
            panic!()
        };
        assert_eq!(c.port, 9100);
        assert_eq!(c.step_limit, 50);
        assert!(c.debug);
        let err = parse_args(["psp", "serve", "--config", "/nonexistent/psp.conf"]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/psp.conf"));
    }
}
