//! Wire encoding: message framing and payload field layout.
//!
//! Frame layout, bit-exact: 4-byte big-endian payload length, one type-tag
//! byte, then the payload. Group elements and element ciphertexts travel as
//! fixed-width big-endian byte strings of `⌈bits(q)/8⌉` bytes. Identity
//! labels are length-prefixed UTF-8 (one length byte).

use crate::group::{GroupElement, GroupParams};
use crate::protocol::variant::Direction;
use crate::scalar::Word;

/// A framed protocol message as it crosses the channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub tag: u8,
    pub direction: Direction,
    pub payload: Vec<u8>,
}

impl Message {
    pub fn new(tag: u8, direction: Direction, payload: Vec<u8>) -> Self {
        Self {
            tag,
            direction,
            payload,
        }
    }

    /// Serializes to the frame format.
    pub fn frame(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + self.payload.len());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.push(self.tag);
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses one frame from the front of `bytes`; returns the message and
    /// the unconsumed remainder. Direction is link metadata, not framed.
    pub fn unframe(bytes: &[u8], direction: Direction) -> Result<(Self, &[u8]), WireError> {
        if bytes.len() < 5 {
            return Err(WireError::Truncated);
        }
        let len = u32::from_be_bytes(bytes[..4].try_into().unwrap()) as usize;
        let tag = bytes[4];
        if bytes.len() < 5 + len {
            return Err(WireError::Truncated);
        }
        Ok((
            Self::new(tag, direction, bytes[5..5 + len].to_vec()),
            &bytes[5 + len..],
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("frame truncated")]
    Truncated,
    #[error("payload has {got} bytes where {want} were expected")]
    BadLength { want: usize, got: usize },
    #[error("identity label is not valid UTF-8")]
    BadLabel,
    #[error("field value {0} out of range")]
    FieldRange(String),
}

/// Sequential payload writer.
#[derive(Default)]
pub struct PayloadWriter {
    buf: Vec<u8>,
}

impl PayloadWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn id_label(mut self, label: &str) -> Self {
        assert!(label.len() <= u8::MAX as usize, "identity label too long");
        self.buf.push(label.len() as u8);
        self.buf.extend_from_slice(label.as_bytes());
        self
    }

    /// Fixed-width big-endian group-scale integer (element or element
    /// ciphertext value).
    pub fn group_word<W: Word>(mut self, params: &GroupParams<W>, value: W) -> Self {
        let width = params.element_width();
        let bytes = value.to_u64().expect("group value fits u64").to_be_bytes();
        self.buf.extend_from_slice(&bytes[8 - width..]);
        self
    }

    pub fn bytes(mut self, data: &[u8]) -> Self {
        self.buf.extend_from_slice(data);
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

/// Sequential payload reader with exact-consumption checking.
pub struct PayloadReader<'a> {
    rest: &'a [u8],
}

impl<'a> PayloadReader<'a> {
    pub fn new(payload: &'a [u8]) -> Self {
        Self { rest: payload }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.rest.len() < n {
            return Err(WireError::BadLength {
                want: n,
                got: self.rest.len(),
            });
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    pub fn id_label(&mut self) -> Result<&'a str, WireError> {
        let len = self.take(1)?[0] as usize;
        std::str::from_utf8(self.take(len)?).map_err(|_| WireError::BadLabel)
    }

    fn group_word<W: Word>(&mut self, params: &GroupParams<W>) -> Result<W, WireError> {
        let width = params.element_width();
        let mut wide = [0u8; 8];
        wide[8 - width..].copy_from_slice(self.take(width)?);
        W::from_u64(u64::from_be_bytes(wide)).ok_or_else(|| {
            WireError::FieldRange(format!("{}", u64::from_be_bytes(wide)))
        })
    }

    /// Reads a group element, enforcing `1 <= v <= q-1`.
    pub fn element<W: Word>(
        &mut self,
        params: &GroupParams<W>,
    ) -> Result<GroupElement<W>, WireError> {
        let v = self.group_word(params)?;
        params
            .element(v)
            .map_err(|e| WireError::FieldRange(e.to_string()))
    }

    /// Reads an element-ciphertext value, enforcing `0 <= v <= q-2`.
    pub fn cipher_value<W: Word>(&mut self, params: &GroupParams<W>) -> Result<W, WireError> {
        let v = self.group_word(params)?;
        if v > params.n() - W::one() {
            return Err(WireError::FieldRange(v.to_string()));
        }
        Ok(v)
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        self.take(n)
    }

    /// Everything left must have been consumed.
    pub fn finish(self) -> Result<(), WireError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(WireError::BadLength {
                want: 0,
                got: self.rest.len(),
            })
        }
    }

    pub fn remaining(&self) -> usize {
        self.rest.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::variant::Direction;

    #[test]
    fn frame_layout_is_bit_exact() {
        let msg = Message::new(3, Direction::AToB, vec![0xde, 0xad, 0xbe]);
        assert_eq!(msg.frame(), vec![0, 0, 0, 3, 3, 0xde, 0xad, 0xbe]);
        let empty = Message::new(7, Direction::BToA, vec![]);
        assert_eq!(empty.frame(), vec![0, 0, 0, 0, 7]);
    }

    #[test]
    fn unframe_round_trips_and_rejects_truncation() {
        let msg = Message::new(2, Direction::BToA, b"payload".to_vec());
        let framed = msg.frame();
        let (back, rest) = Message::unframe(&framed, Direction::BToA).unwrap();
        assert_eq!(back, msg);
        assert!(rest.is_empty());
        assert_eq!(
            Message::unframe(&framed[..6], Direction::BToA),
            Err(WireError::Truncated)
        );
        // two concatenated frames parse in sequence
        let mut two = msg.frame();
        two.extend(Message::new(3, Direction::BToA, vec![1]).frame());
        let (_, rest) = Message::unframe(&two, Direction::BToA).unwrap();
        let (second, rest) = Message::unframe(rest, Direction::BToA).unwrap();
        assert_eq!(second.tag, 3);
        assert!(rest.is_empty());
    }

    #[test]
    fn group_words_are_fixed_width_big_endian() {
        let params = crate::group::GroupParams::<u64>::new(23, 5, 22).unwrap();
        let payload = PayloadWriter::new()
            .id_label("A")
            .group_word(&params, 9)
            .finish();
        assert_eq!(payload, vec![1, b'A', 9]);
        let wide: crate::group::GroupParams<u64> = crate::group::gen_params(20, 1).unwrap();
        let p2 = PayloadWriter::new().group_word(&wide, 0x1_02_03).finish();
        assert_eq!(p2, vec![0x01, 0x02, 0x03]);

        let mut rd = PayloadReader::new(&payload);
        assert_eq!(rd.id_label().unwrap(), "A");
        assert_eq!(rd.element(&params).unwrap().value(), 9);
        rd.finish().unwrap();
    }

    #[test]
    fn readers_reject_out_of_range_fields_and_leftovers() {
        let params = crate::group::GroupParams::<u64>::new(23, 5, 22).unwrap();
        let mut rd = PayloadReader::new(&[0]);
        assert!(rd.element(&params).is_err()); // zero is not an element
        let mut rd = PayloadReader::new(&[23]);
        assert!(rd.element(&params).is_err()); // q is out of range
        let mut rd = PayloadReader::new(&[22]);
        assert!(rd.cipher_value(&params).is_err()); // ciphertexts live in [0, q-2]
        let mut rd = PayloadReader::new(&[5, 1]);
        assert_eq!(rd.element(&params).unwrap().value(), 5);
        assert!(rd.finish().is_err()); // trailing byte
    }
}
