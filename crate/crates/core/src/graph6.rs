//! graph6 encoding (McKay's format) for [`Graph`].
//!
//! Only the canonical form is accepted: the size prefix must use the short
//! form whenever it fits, and padding bits in the final byte must be zero.
//! With those rules `encode(decode(s)) == s` for every accepted `s`.

use thiserror::Error;

use crate::graph::Graph;
use crate::vertex_set::{VertexSet, MAX_VERTICES};

const HEADER: &str = ">>graph6<<";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("byte {byte:#04x} at offset {offset} is outside the graph6 range 63..=126")]
    InvalidByte { offset: usize, byte: u8 },
    #[error("truncated size prefix")]
    TruncatedSize,
    #[error("size {0} is not in canonical (shortest) form")]
    NonCanonicalSize(u64),
    #[error("graph has {0} vertices; at most 64 are supported")]
    TooManyVertices(u64),
    #[error("expected {expected} edge bytes, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("nonzero padding bits in the final byte")]
    NonzeroPadding,
}

fn size_bytes(n: usize) -> Vec<u8> {
    if n <= 62 {
        vec![n as u8 + 63]
    } else {
        vec![
            126,
            ((n >> 12) & 63) as u8 + 63,
            ((n >> 6) & 63) as u8 + 63,
            (n & 63) as u8 + 63,
        ]
    }
}

/// Encodes the live vertices of `g` in ascending id order.
pub fn encode(g: &Graph) -> String {
    let live: Vec<usize> = g.vertices().iter().collect();
    let n = live.len();
    let mut out = size_bytes(n);
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        let row = g.neighbors(live[j]);
        for &u in &live[..j] {
            acc = (acc << 1) | u8::from(row.contains(u));
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

/// Decodes one graph6 record. An optional `>>graph6<<` header and a trailing
/// line terminator are accepted.
pub fn decode(s: &str) -> Result<Graph, Graph6Error> {
    decode_bytes(s.as_bytes())
}

pub fn decode_bytes(data: &[u8]) -> Result<Graph, Graph6Error> {
    let mut data = data.strip_prefix(HEADER.as_bytes()).unwrap_or(data);
    if let Some(rest) = data.strip_suffix(b"\n") {
        data = rest.strip_suffix(b"\r").unwrap_or(rest);
    }
    if data.is_empty() {
        return Err(Graph6Error::Empty);
    }
    if let Some((offset, &byte)) = data
        .iter()
        .enumerate()
        .find(|(_, &b)| !(63..=126).contains(&b))
    {
        return Err(Graph6Error::InvalidByte { offset, byte });
    }
    let (n, body) = parse_size(data)?;
    if n > MAX_VERTICES as u64 {
        return Err(Graph6Error::TooManyVertices(n));
    }
    let n = n as usize;
    let bits = n * n.saturating_sub(1) / 2;
    let expected = bits.div_ceil(6);
    if body.len() != expected {
        return Err(Graph6Error::WrongLength {
            expected,
            found: body.len(),
        });
    }
    let pad = expected * 6 - bits;
    if pad > 0 && (body[expected - 1] - 63) & ((1u8 << pad) - 1) != 0 {
        return Err(Graph6Error::NonzeroPadding);
    }

    let mut rows = vec![0u64; n];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if (byte >> (5 - k % 6)) & 1 == 1 {
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
            k += 1;
        }
    }
    Ok(Graph::from_adjacency(&rows).expect("decoded rows are symmetric and loop-free"))
}

fn parse_size(data: &[u8]) -> Result<(u64, &[u8]), Graph6Error> {
    let digit = |b: u8| u64::from(b - 63);
    if data[0] != 126 {
        return Ok((digit(data[0]), &data[1..]));
    }
    if data.len() >= 2 && data[1] == 126 {
        if data.len() < 8 {
            return Err(Graph6Error::TruncatedSize);
        }
        let n = data[2..8].iter().fold(0u64, |acc, &b| (acc << 6) | digit(b));
        if n <= 258_047 {
            return Err(Graph6Error::NonCanonicalSize(n));
        }
        return Ok((n, &data[8..]));
    }
    if data.len() < 4 {
        return Err(Graph6Error::TruncatedSize);
    }
    let n = data[1..4].iter().fold(0u64, |acc, &b| (acc << 6) | digit(b));
    if n <= 62 {
        return Err(Graph6Error::NonCanonicalSize(n));
    }
    Ok((n, &data[4..]))
}

impl Graph {
    pub fn to_graph6(&self) -> String {
        encode(self)
    }

    pub fn from_graph6(s: &str) -> Result<Graph, Graph6Error> {
        decode(s)
    }

    /// Decodes `s` and relabels its vertices onto the members of `vertices`
    /// in ascending order, undoing the compaction done by [`encode`] for a
    /// graph with deleted vertices.
    pub fn from_graph6_on(s: &str, vertices: VertexSet) -> Result<Graph, Graph6Error> {
        let compact = decode(s)?;
        if compact.vertex_count() != vertices.len() {
            return Err(Graph6Error::WrongLength {
                expected: vertices.len(),
                found: compact.vertex_count(),
            });
        }
        let order = vertices.max().map_or(0, |m| m + 1);
        let mut rows = vec![0u64; order];
        for (i, v) in vertices.iter().enumerate() {
            rows[v] = vertices.expand(compact.neighbors(i).bits()).bits();
        }
        let full = Graph::from_adjacency(&rows).expect("relabelled rows stay symmetric");
        Ok(full
            .delete_set(VertexSet::range(order) - vertices)
            .expect("deleted ids are in range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_encodings() {
        // Reference strings produced by nauty's geng/showg conventions.
        assert_eq!(encode(&Graph::empty(0).unwrap()), "?");
        assert_eq!(encode(&Graph::empty(1).unwrap()), "@");
        assert_eq!(encode(&Graph::path(2)), "A_");
        assert_eq!(encode(&Graph::complete(3)), "Bw");
        assert_eq!(encode(&Graph::cycle(5)), "Dhc");
        let g = Graph::from_edges(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(encode(&g), "DQc");
    }

    #[test]
    fn decode_known() {
        assert_eq!(decode("Dhc").unwrap(), Graph::cycle(5));
        assert_eq!(decode(">>graph6<<Bw\n").unwrap(), Graph::complete(3));
        assert_eq!(decode("Bw\r\n").unwrap(), Graph::complete(3));
    }

    #[test]
    fn long_size_form() {
        let g = Graph::path(63);
        let s = encode(&g);
        assert!(s.starts_with('~'));
        assert_eq!(decode(&s).unwrap(), g);
        let k64 = Graph::complete(64);
        assert_eq!(decode(&encode(&k64)).unwrap(), k64);
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(decode(""), Err(Graph6Error::Empty));
        assert_eq!(
            decode("D h"),
            Err(Graph6Error::InvalidByte { offset: 1, byte: b' ' })
        );
        assert_eq!(
            decode("Dh"),
            Err(Graph6Error::WrongLength { expected: 2, found: 1 })
        );
        // C5 with a padding bit set in the last byte.
        assert_eq!(decode("Dhd"), Err(Graph6Error::NonzeroPadding));
        assert_eq!(decode("~??D"), Err(Graph6Error::NonCanonicalSize(5)));
        assert_eq!(decode("~?"), Err(Graph6Error::TruncatedSize));
        assert_eq!(decode("~?A?"), Err(Graph6Error::TooManyVertices(128)));
    }

    #[test]
    fn compacted_round_trip_with_deletions() {
        let g = Graph::cycle(6).delete(2).unwrap();
        let s = g.to_graph6();
        assert_eq!(Graph::from_graph6_on(&s, g.vertices()).unwrap(), g);
    }
}
