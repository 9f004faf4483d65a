//! Issuer-hiding, revocable anonymous credentials.
//!
//! Issuers sign Merkle commitments over padded attribute vectors. Holders
//! prove in zero knowledge that a credential satisfies a predicate, was signed
//! by some issuer in a committed set, and is absent from that issuer's sorted
//! revocation list.

pub mod encoding;
pub mod field;
pub mod hash;
pub mod predicate;
pub mod protocol;
pub mod relation;
pub mod signature;
pub mod vc;
pub mod zk;

pub use field::FieldElement;

/// Capacities of the three commitment trees: attributes per credential,
/// revocation-list slots per issuer and issuers per hiding set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n_a: usize,
    pub n_r: usize,
    pub n_i: usize,
}

impl Dims {
    pub fn new(n_a: usize, n_r: usize, n_i: usize) -> Option<Self> {
        let ok = |n: usize| n >= 2 && n.is_power_of_two() && n <= 1 << 24;
        (ok(n_a) && ok(n_r) && ok(n_i)).then_some(Dims { n_a, n_r, n_i })
    }

    pub fn depth_a(&self) -> usize {
        self.n_a.trailing_zeros() as usize
    }

    pub fn depth_r(&self) -> usize {
        self.n_r.trailing_zeros() as usize
    }

    pub fn depth_i(&self) -> usize {
        self.n_i.trailing_zeros() as usize
    }
}
