//! Server settings: defaults, `key = value` config files, and validation.

use std::path::{Path, PathBuf};

use psp_core::prolog::DEFAULT_STEP_LIMIT;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerConfig {
    pub host: String,
    pub port: u16,
    pub docroot: PathBuf,
    pub preludes: Vec<PathBuf>,
    pub step_limit: u64,
    pub index_file: String,
    pub debug: bool,
    pub max_body: u64,
    pub occurs_check: bool,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            host: "127.0.0.1".to_owned(),
            port: 8080,
            docroot: PathBuf::from("."),
            preludes: Vec::new(),
            step_limit: DEFAULT_STEP_LIMIT,
            index_file: "index.psp".to_owned(),
            debug: false,
            max_body: 1 << 20,
            occurs_check: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("{file}:{line}: {message}")]
    Syntax { file: String, line: usize, message: String },
    #[error("cannot read config file {file}: {message}")]
    Unreadable { file: String, message: String },
}

impl ConfigError {
    pub fn invalid(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.to_owned(),
            message: message.into(),
        }
    }
}

/// Settings given explicitly, by flags or a config file. Unset fields fall
/// through to the next source.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigOverrides {
    pub host: Option<String>,
    pub port: Option<u16>,
    pub docroot: Option<PathBuf>,
    pub preludes: Vec<PathBuf>,
    pub step_limit: Option<u64>,
    pub index_file: Option<String>,
    pub debug: Option<bool>,
    pub max_body: Option<u64>,
    pub occurs_check: Option<bool>,
}

impl ConfigOverrides {
    pub fn apply_to(self, config: &mut ServerConfig) {
        if let Some(v) = self.host {
            config.host = v;
        }
        if let Some(v) = self.port {
            config.port = v;
        }
        if let Some(v) = self.docroot {
            config.docroot = v;
        }
        if !self.preludes.is_empty() {
            config.preludes = self.preludes;
        }
        if let Some(v) = self.step_limit {
            config.step_limit = v;
        }
        if let Some(v) = self.index_file {
            config.index_file = v;
        }
        if let Some(v) = self.debug {
            config.debug = v;
        }
        if let Some(v) = self.max_body {
            config.max_body = v;
        }
        if let Some(v) = self.occurs_check {
            config.occurs_check = v;
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::invalid(key, format!("expected true or false, found {value:?}"))),
    }
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::invalid(key, format!("expected a number, found {value:?}")))
}

pub fn parse_port(key: &str, value: &str) -> Result<u16, ConfigError> {
    let port: u64 = parse_number(key, value)?;
    match u16::try_from(port) {
        Ok(p) if p >= 1 => Ok(p),
        _ => Err(ConfigError::invalid(key, format!("{port} is not in 1..=65535"))),
    }
}

pub fn parse_step_limit(key: &str, value: &str) -> Result<u64, ConfigError> {
    match parse_number(key, value)? {
        0 => Err(ConfigError::invalid(key, "must be positive")),
        n => Ok(n),
    }
}

/// Parses config file text. Relative paths are taken relative to `base_dir`,
/// the directory holding the file. `preludes` may be repeated and may hold a
/// comma-separated list.
pub fn parse_config(text: &str, file: &str, base_dir: &Path) -> Result<ConfigOverrides, ConfigError> {
    let mut out = ConfigOverrides::default();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |message: String| ConfigError::Syntax {
            file: file.to_owned(),
            line: index + 1,
            message,
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(syntax("expected `key = value`".to_owned()));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "host" => out.host = Some(value.to_owned()),
            "port" => out.port = Some(parse_port(key, value)?),
            "docroot" => out.docroot = Some(base_dir.join(value)),
            "preludes" => out.preludes.extend(
                value
                    .split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(|p| base_dir.join(p)),
            ),
            "step_limit" => out.step_limit = Some(parse_step_limit(key, value)?),
            "index_file" => out.index_file = Some(value.to_owned()),
            "debug" => out.debug = Some(parse_bool(key, value)?),
            "max_body" => out.max_body = Some(parse_number(key, value)?),
            "occurs_check" => out.occurs_check = Some(parse_bool(key, value)?),
            other => return Err(syntax(format!("unknown key `{other}`"))),
        }
    }
    Ok(out)
}

pub fn load_config_file(path: &Path) -> Result<ConfigOverrides, ConfigError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
        file: name.clone(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, &name, base)
}

/// Defaults, overridden by the config file, overridden by flags.
pub fn resolve_config(file: Option<ConfigOverrides>, flags: ConfigOverrides) -> Result<ServerConfig, ConfigError> {
    let mut config = ServerConfig::default();
    if let Some(file) = file {
        file.apply_to(&mut config);
    }
    flags.apply_to(&mut config);
    if config.index_file.is_empty() || config.index_file.contains('/') {
        return Err(ConfigError::invalid("index_file", "must be a plain file name"));
    }
    Ok(config)
}
