use std::path::PathBuf;

use irac::encoding::DecodeError;
use irac::predicate::PredicateError;
use irac::protocol::IracError;

use crate::envelope::EnvelopeError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Envelope { path: PathBuf, source: EnvelopeError },
    #[error("{path}: {source}")]
    Decode { path: PathBuf, source: DecodeError },
    #[error("{0}")]
    Usage(String),
    #[error("{0} is locked by another process")]
    Locked(PathBuf),
    #[error("the test backend is not zero-knowledge; set IRAC_TEST_MODE=1 to use it")]
    TestBackend,
    #[error("parameters use the {0} backend")]
    BackendMismatch(&'static str),
    #[error("{0} already exists")]
    Exists(PathBuf),
    #[error("wallet has no credential")]
    EmptyWallet,
    #[error("credential does not verify under the bundle")]
    InvalidCredential,
    #[error(transparent)]
    Protocol(#[from] IracError),
}

/// Exit status and a stable name for every outcome. Verification that
/// rejects exits with `REJECT`.
pub const REJECT: u8 = 1;

impl CliError {
    pub fn code(&self) -> (u8, &'static str) {
        use IracError::*;
        match self {
            CliError::Usage(_) => (2, "usage"),
            CliError::Io { .. } => (3, "io"),
            CliError::Envelope { .. } | CliError::Decode { .. } => (4, "format"),
            CliError::Locked(_) => (5, "locked"),
            CliError::TestBackend => (6, "test-backend"),
            CliError::BackendMismatch(_) => (7, "backend-mismatch"),
            CliError::Exists(_) => (8, "exists"),
            CliError::EmptyWallet => (9, "empty-wallet"),
            CliError::InvalidCredential => (10, "invalid-credential"),
            CliError::Protocol(e) => match e {
                InvalidSizes => (20, "invalid-sizes"),
                UnsupportedSecurity(_) => (21, "unsupported-security"),
                DuplicateAttributeName(_) => (22, "duplicate-attribute"),
                UnknownAttribute(_) => (23, "unknown-attribute"),
                TooManyAttributes(_) => (24, "too-many-attributes"),
                LengthMismatch { .. } => (25, "length-mismatch"),
                ValueOutOfRange(_) => (26, "value-out-of-range"),
                RevocationCapacityExceeded => (27, "revocation-full"),
                IssuerNotInSet => (28, "issuer-not-in-set"),
                AttributeNotCovered(_) => (29, "attribute-not-covered"),
                Revoked => (30, "revoked"),
                HidingSetTooLarge(_) => (31, "hiding-set-too-large"),
                EmptyIssuerSet => (32, "empty-issuer-set"),
                InvalidIssuerData(_) => (33, "invalid-issuer-data"),
                PredicateNotSatisfied => (34, "predicate-not-satisfied"),
                Predicate(_) => (35, "predicate"),
                Zk(_) => (36, "zk"),
            },
        }
    }
}

impl From<PredicateError> for CliError {
    fn from(e: PredicateError) -> Self {
        CliError::Protocol(IracError::Predicate(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use irac::zk::ZkError;

    #[test]
    fn codes_are_distinct() {
        use IracError::*;
        let protocol = [
            InvalidSizes,
            UnsupportedSecurity(1),
            DuplicateAttributeName("a".into()),
            UnknownAttribute(1),
            TooManyAttributes(1),
            LengthMismatch { expected: 1, got: 2 },
            ValueOutOfRange(1),
            RevocationCapacityExceeded,
            IssuerNotInSet,
            AttributeNotCovered(1),
            Revoked,
            HidingSetTooLarge(1),
            EmptyIssuerSet,
            InvalidIssuerData("x"),
            PredicateNotSatisfied,
            Predicate(PredicateError::Empty),
            Zk(ZkError::UnsatisfiedWitness),
        ];
        let io = || std::io::Error::other("x");
        let mut all = vec![
            CliError::Io { path: "p".into(), source: io() },
            CliError::Envelope { path: "p".into(), source: EnvelopeError::Hex },
            CliError::Usage("u".into()),
            CliError::Locked("d".into()),
            CliError::TestBackend,
            CliError::BackendMismatch("prod"),
            CliError::Exists("p".into()),
            CliError::EmptyWallet,
            CliError::InvalidCredential,
        ];
        all.extend(protocol.into_iter().map(CliError::Protocol));
        let codes: Vec<_> = all.iter().map(|e| e.code()).collect();
        let mut nums: Vec<u8> = codes.iter().map(|c| c.0).collect();
        let mut names: Vec<&str> = codes.iter().map(|c| c.1).collect();
        nums.sort_unstable();
        nums.dedup();
        names.sort_unstable();
        names.dedup();
        assert_eq!(nums.len(), all.len());
        assert_eq!(names.len(), all.len());
        assert!(!nums.contains(&0) && !nums.contains(&REJECT));
    }
}
