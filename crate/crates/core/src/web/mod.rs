//! Request data as Prolog facts, and the `setcookie/6` builtin.

mod bind;
mod cookie;
mod form;

pub use bind::bind_request_facts;
pub use cookie::{
    builtin_setcookie, format_set_cookie, parse_cookie_header, CookieSpec, PageBuiltins,
};
pub use form::{decode_form, percent_decode, percent_encode, DecodeError, FormError};

/// A form control (or cookie) name with its value, both decoded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlPair {
    pub name: String,
    pub value: String,
}

impl ControlPair {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        ControlPair {
            name: name.into(),
            value: value.into(),
        }
    }
}
