//! Text envelope around canonically encoded payloads.
//!
//! ```text
//! IRAC-FILE v1
//! kind: bundle
//! n_a: 8
//! n_r: 8
//! n_i: 8
//! payload:
//! <hex, 64 characters per line>
//! end
//! ```
//!
//! The hex payload is authoritative. Lines starting with `#` are ignored.

use std::fmt::Write;

use irac::Dims;

pub const MAGIC: &str = "IRAC-FILE v1";
const WRAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Params,
    Universe,
    IssuerKey,
    Bundle,
    Credential,
    Wallet,
    Token,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Params => "params",
            Kind::Universe => "universe",
            Kind::IssuerKey => "issuer-key",
            Kind::Bundle => "bundle",
            Kind::Credential => "credential",
            Kind::Wallet => "wallet",
            Kind::Token => "token",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvelopeError {
    #[error("missing {MAGIC:?} header")]
    Magic,
    #[error("expected a {expected} file, found {found}")]
    Kind { expected: &'static str, found: String },
    #[error("malformed line {0}")]
    Line(usize),
    #[error("shape {found:?} does not match the parameters {expected:?}")]
    Shape { expected: Dims, found: Dims },
    #[error("payload is not valid hex")]
    Hex,
    #[error("file is truncated")]
    Truncated,
}

pub fn write(kind: Kind, dims: Dims, payload: &[u8]) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC}").unwrap();
    writeln!(s, "kind: {}", kind.name()).unwrap();
    writeln!(s, "n_a: {}\nn_r: {}\nn_i: {}", dims.n_a, dims.n_r, dims.n_i).unwrap();
    s.push_str("payload:\n");
    let h = hex::encode(payload);
    for chunk in h.as_bytes().chunks(WRAP) {
        s.push_str(std::str::from_utf8(chunk).unwrap());
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

/// Parses an envelope, returning the declared shape and the payload.
pub fn read(text: &str, kind: Kind) -> Result<(Dims, Vec<u8>), EnvelopeError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l.trim_end() == MAGIC => {}
        _ => return Err(EnvelopeError::Magic),
    }
    let mut field = |name: &str| -> Result<String, EnvelopeError> {
        let (n, l) = lines.next().ok_or(EnvelopeError::Truncated)?;
        let v = l.strip_prefix(name).and_then(|r| r.strip_prefix(':')).ok_or(EnvelopeError::Line(n + 1))?;
        Ok(v.trim().to_string())
    };
    let found = field("kind")?;
    if found != kind.name() {
        return Err(EnvelopeError::Kind { expected: kind.name(), found });
    }
    let mut dim = |name: &str| -> Result<usize, EnvelopeError> {
        field(name)?.parse().map_err(|_| EnvelopeError::Line(0))
    };
    let (n_a, n_r, n_i) = (dim("n_a")?, dim("n_r")?, dim("n_i")?);
    let dims = Dims::new(n_a, n_r, n_i).ok_or(EnvelopeError::Line(0))?;
    if !field("payload")?.is_empty() {
        return Err(EnvelopeError::Line(0));
    }
    let mut h = String::new();
    loop {
        let (_, l) = lines.next().ok_or(EnvelopeError::Truncated)?;
        let l = l.trim();
        if l == "end" {
            break;
        }
        h.push_str(l);
    }
    Ok((dims, hex::decode(h).map_err(|_| EnvelopeError::Hex)?))
}

/// Like [`read`], also requiring the shape to equal `expected`.
pub fn read_shaped(text: &str, kind: Kind, expected: Dims) -> Result<Vec<u8>, EnvelopeError> {
    let (found, payload) = read(text, kind)?;
    if found != expected {
        return Err(EnvelopeError::Shape { expected, found });
    }
    Ok(payload)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let d = Dims::new(4, 8, 16).unwrap();
        let payload: Vec<u8> = (0..=255).collect();
        let s = write(Kind::Token, d, &payload);
        assert_eq!(read(&s, Kind::Token).unwrap(), (d, payload.clone()));
        assert!(matches!(read(&s, Kind::Bundle), Err(EnvelopeError::Kind { .. })));
        let other = Dims::new(4, 8, 8).unwrap();
        assert!(matches!(read_shaped(&s, Kind::Token, other), Err(EnvelopeError::Shape { .. })));
        assert_eq!(read(&s.replace("end\n", ""), Kind::Token), Err(EnvelopeError::Truncated));
        assert_eq!(read(&s[1..], Kind::Token), Err(EnvelopeError::Magic));
    }

    #[test]
    fn empty_payload() {
        let d = Dims::new(2, 2, 2).unwrap();
        let s = write(Kind::Wallet, d, &[]);
        assert_eq!(read(&s, Kind::Wallet).unwrap().1, Vec::<u8>::new());
    }
}
