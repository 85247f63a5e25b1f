//! Self-delimiting packet headers.
//!
//! Every header bit is doubled (`0 → 00`, `1 → 11`) and the header ends
//! with `01`. A reader that meets `10` knows the stream is corrupt.
//!
//! The header itself lists the entries of a global coding vector. Each
//! entry is its canonical text, preceded by a 32-bit length in bytes.

use crate::algebra::Rational;

use super::SimError;

pub fn frame_bits(bits: &[bool]) -> Vec<bool> {
    let mut out = Vec::with_capacity(2 * bits.len() + 2);
    for &b in bits {
        out.push(b);
        out.push(b);
    }
    out.extend([false, true]);
    out
}

/// Returns the header bits and the offset where the payload starts.
pub fn unframe_bits(stream: &[bool]) -> Result<(Vec<bool>, usize), SimError> {
    let mut bits = Vec::new();
    let mut i = 0;
    while i + 1 < stream.len() {
        match (stream[i], stream[i + 1]) {
            (false, false) => bits.push(false),
            (true, true) => bits.push(true),
            (false, true) => return Ok((bits, i + 2)),
            (true, false) => return Err(SimError::Framing(i)),
        }
        i += 2;
    }
    Err(SimError::Framing(stream.len()))
}

fn push_bytes(out: &mut Vec<bool>, bytes: &[u8]) {
    for byte in bytes {
        out.extend((0..8).rev().map(|k| byte >> k & 1 == 1));
    }
}

fn read_bytes(bits: &[bool], at: usize, n: usize) -> Option<Vec<u8>> {
    let chunk = bits.get(at..at + 8 * n)?;
    Some(chunk.chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| acc << 1 | u8::from(b))).collect())
}

/// Unframed header bits for a coding vector.
pub fn serialize_gcv(gcv: &[Rational]) -> Vec<bool> {
    let mut out = Vec::new();
    for entry in gcv {
        let text = entry.to_string();
        push_bytes(&mut out, &(text.len() as u32).to_be_bytes());
        push_bytes(&mut out, text.as_bytes());
    }
    out
}

pub fn deserialize_gcv(bits: &[bool]) -> Result<Vec<Rational>, SimError> {
    let mut gcv = Vec::new();
    let mut at = 0;
    while at < bits.len() {
        let len = read_bytes(bits, at, 4).ok_or(SimError::HeaderSyntax)?;
        let len = u32::from_be_bytes(len.try_into().expect("four bytes")) as usize;
        at += 32;
        let text = read_bytes(bits, at, len).ok_or(SimError::HeaderSyntax)?;
        at += 8 * len;
        let text = String::from_utf8(text).map_err(|_| SimError::HeaderSyntax)?;
        gcv.push(text.parse().map_err(|_| SimError::HeaderSyntax)?);
    }
    Ok(gcv)
}

pub fn header_frame(gcv: &[Rational]) -> Vec<bool> {
    frame_bits(&serialize_gcv(gcv))
}

pub fn header_unframe(stream: &[bool]) -> Result<(Vec<Rational>, usize), SimError> {
    let (bits, offset) = unframe_bits(stream)?;
    Ok((deserialize_gcv(&bits)?, offset))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn frames_example() {
        assert_eq!(frame_bits(&bits("10")), bits("110001"));
        assert_eq!(unframe_bits(&bits("110001111")).unwrap(), (bits("10"), 6));
    }

    #[test]
    fn rejects_bad_pair_and_missing_end() {
        assert_eq!(unframe_bits(&bits("1110")), Err(SimError::Framing(2)));
        assert_eq!(unframe_bits(&bits("0011")), Err(SimError::Framing(4)));
    }

    #[test]
    fn gcv_round_trip() {
        let gcv: Vec<Rational> = vec!["0x1/0x1".parse().unwrap(), "0xb/0x3".parse().unwrap(), Rational::zero()];
        let mut stream = header_frame(&gcv);
        let end = stream.len();
        stream.extend(bits("1011"));
        assert_eq!(header_unframe(&stream).unwrap(), (gcv, end));
    }
}
