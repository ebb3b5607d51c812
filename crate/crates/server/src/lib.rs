//! HTTP server and command-line front end for Prolog Server Pages.

pub mod cli;
pub mod config;
pub mod http;
pub mod prelude;
pub mod render;
pub mod route;
pub mod server;
pub mod site;
