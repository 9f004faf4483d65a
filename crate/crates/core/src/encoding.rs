//! Canonical byte encoding.
//!
//! Rules:
//! - field element: 32 bytes, little-endian, must be `< p` on decode
//! - `u32` / `u64`: 4 / 8 bytes little-endian
//! - byte string: 4-byte little-endian length, then the bytes
//! - vector: 4-byte little-endian element count, then each element
//! - pair: the count `2` as 4 bytes, then both components
//! - fixed-shape structs (points, signatures, commitments): concatenation of
//!   their fields in declaration order, no prefix
//!
//! Decoding is strict: trailing bytes, short input and non-canonical field
//! elements are errors.

use crate::field::FieldElement;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("unexpected end of input")]
    Truncated,
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("field element not canonical")]
    NonCanonical,
    #[error("invalid value: {0}")]
    Invalid(&'static str),
}

pub trait Encode {
    fn encode_to(&self, out: &mut Vec<u8>);

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_to(&mut out);
        out
    }
}

pub trait Decode: Sized {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError>;

    /// Decodes a complete buffer.
    fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let v = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.buf.len() < n {
            return Err(DecodeError::Truncated);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn finish(&self) -> Result<(), DecodeError> {
        match self.buf.len() {
            0 => Ok(()),
            n => Err(DecodeError::Trailing(n)),
        }
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    /// Reads a length prefix, bounding it by what is left so a hostile
    /// prefix cannot trigger a huge allocation.
    fn len(&mut self, min_item: usize) -> Result<usize, DecodeError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_item.max(1)) > self.remaining() && min_item > 0 {
            return Err(DecodeError::Truncated);
        }
        Ok(n)
    }
}

impl Encode for FieldElement {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_bytes());
    }
}

impl Decode for FieldElement {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let b: [u8; 32] = r.take(32)?.try_into().unwrap();
        FieldElement::from_bytes(&b).ok_or(DecodeError::NonCanonical)
    }
}

impl Encode for u32 {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
}

impl Decode for u32 {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.u32()
    }
}

impl Encode for u64 {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
}

impl Decode for u64 {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(u64::from_le_bytes(r.take(8)?.try_into().unwrap()))
    }
}

impl Encode for u8 {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.push(*self);
    }
}

impl Decode for u8 {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(r.take(1)?[0])
    }
}

/// A length-prefixed byte string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Bytes(pub Vec<u8>);

impl Encode for Bytes {
    fn encode_to(&self, out: &mut Vec<u8>) {
        (self.0.len() as u32).encode_to(out);
        out.extend_from_slice(&self.0);
    }
}

impl Decode for Bytes {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let n = r.len(1)?;
        Ok(Bytes(r.take(n)?.to_vec()))
    }
}

impl Encode for String {
    fn encode_to(&self, out: &mut Vec<u8>) {
        (self.len() as u32).encode_to(out);
        out.extend_from_slice(self.as_bytes());
    }
}

impl Decode for String {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let Bytes(b) = Bytes::decode_from(r)?;
        String::from_utf8(b).map_err(|_| DecodeError::Invalid("utf-8"))
    }
}

impl<T: Encode> Encode for Vec<T> {
    fn encode_to(&self, out: &mut Vec<u8>) {
        (self.len() as u32).encode_to(out);
        for item in self {
            item.encode_to(out);
        }
    }
}

impl<T: Decode> Decode for Vec<T> {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let n = r.len(1)?;
        (0..n).map(|_| T::decode_from(r)).collect()
    }
}

impl<A: Encode, B: Encode> Encode for (A, B) {
    fn encode_to(&self, out: &mut Vec<u8>) {
        2u32.encode_to(out);
        self.0.encode_to(out);
        self.1.encode_to(out);
    }
}

impl<A: Decode, B: Decode> Decode for (A, B) {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        if r.u32()? != 2 {
            return Err(DecodeError::Invalid("pair arity"));
        }
        Ok((A::decode_from(r)?, B::decode_from(r)?))
    }
}

impl Encode for bool {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.push(*self as u8);
    }
}

impl Decode for bool {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        match r.take(1)?[0] {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(DecodeError::Invalid("bool")),
        }
    }
}

impl<T: Encode> Encode for Option<T> {
    fn encode_to(&self, out: &mut Vec<u8>) {
        match self {
            None => out.push(0),
            Some(v) => {
                out.push(1);
                v.encode_to(out);
            }
        }
    }
}

impl<T: Decode> Decode for Option<T> {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        match r.take(1)?[0] {
            0 => Ok(None),
            1 => Ok(Some(T::decode_from(r)?)),
            _ => Err(DecodeError::Invalid("option tag")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_32_zero_bytes() {
        assert_eq!(FieldElement::ZERO.encode(), vec![0u8; 32]);
    }

    #[test]
    fn vector_order_matters() {
        let a = FieldElement::from_u64(1);
        let b = FieldElement::from_u64(2);
        assert_ne!(vec![a, b].encode(), vec![b, a].encode());
    }

    #[test]
    fn pair_layout() {
        let a = FieldElement::from_u64(7);
        let b = FieldElement::from_u64(9);
        let enc = (a, b).encode();
        assert_eq!(&enc[..4], &[2, 0, 0, 0]);
        assert_eq!(&enc[4..36], &a.to_bytes());
        assert_eq!(&enc[36..], &b.to_bytes());
        assert_eq!(<(FieldElement, FieldElement)>::decode(&enc).unwrap(), (a, b));
    }

    #[test]
    fn strict_decoding() {
        let enc = vec![FieldElement::ONE].encode();
        assert_eq!(Vec::<FieldElement>::decode(&enc[..enc.len() - 1]), Err(DecodeError::Truncated));
        let mut long = enc.clone();
        long.push(0);
        assert_eq!(Vec::<FieldElement>::decode(&long), Err(DecodeError::Trailing(1)));
        assert_eq!(FieldElement::decode(&[0xff; 32]), Err(DecodeError::NonCanonical));
        // a length prefix claiming more items than bytes left
        assert_eq!(Vec::<FieldElement>::decode(&[0xff, 0xff, 0xff, 0x7f]), Err(DecodeError::Truncated));
    }
}
