use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

use super::ControlPair;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("truncated escape at byte {0}")]
    Truncated(usize),
    #[error("invalid hex digits in escape at byte {0}")]
    BadHex(usize),
    #[error("decoded bytes are not valid UTF-8")]
    NotUtf8,
}

/// A decode failure in one `name=value` pair of a form.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("form pair {index}: {source}")]
pub struct FormError {
    pub index: usize,
    pub source: DecodeError,
}

const NOT_UNRESERVED: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// Decodes `%HH` escapes, and `+` as a space when `plus_as_space` is set.
/// Unlike most decoders, a `%` not followed by two hex digits is an error.
pub fn percent_decode(text: &str, plus_as_space: bool) -> Result<String, DecodeError> {
    let bytes = text.as_bytes();
    for (i, _) in bytes.iter().enumerate().filter(|(_, &b)| b == b'%') {
        let pair = bytes.get(i + 1..i + 3).ok_or(DecodeError::Truncated(i))?;
        if !pair.iter().all(u8::is_ascii_hexdigit) {
            return Err(DecodeError::BadHex(i));
        }
    }
    let spaced;
    let text = if plus_as_space {
        spaced = text.replace('+', " ");
        &spaced
    } else {
        text
    };
    percent_decode_str(text)
        .decode_utf8()
        .map(|s| s.into_owned())
        .map_err(|_| DecodeError::NotUtf8)
}

/// Escapes every byte outside the URL unreserved set.
pub fn percent_encode(text: &str) -> String {
    utf8_percent_encode(text, NOT_UNRESERVED).to_string()
}

/// Decodes a query string or `application/x-www-form-urlencoded` body.
pub fn decode_form(encoded: &str) -> Result<Vec<ControlPair>, FormError> {
    if encoded.is_empty() {
        return Ok(Vec::new());
    }
    encoded
        .split('&')
        .enumerate()
        .map(|(index, pair)| {
            let (name, value) = pair.split_once('=').unwrap_or((pair, ""));
            let decode = |s| percent_decode(s, true).map_err(|source| FormError { index, source });
            Ok(ControlPair::new(decode(name)?, decode(value)?))
        })
        .collect()
}
