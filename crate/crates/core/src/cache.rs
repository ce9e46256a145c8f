//! On-disk cache of enumerations.
//!
//! Each file holds one kind of record for one `N`:
//!
//! | offset | size | field                               |
//! |--------|------|-------------------------------------|
//! | 0      | 8    | magic `GEOLABC\0`                   |
//! | 8      | 4    | format version (LE `u32`)           |
//! | 12     | 4    | record kind (LE `u32`)              |
//! | 16     | 8    | `N` (LE `i64`)                      |
//! | 24     | 8    | record count (LE `u64`)             |
//! | 32     | 32   | SHA-256 of the record payload       |
//! | 64     | ...  | fixed-width little-endian records   |
//!
//! Cosets are `(c, a)` as two `i64`; classes are `(trace, content, A, B, C)`
//! as five `i128`; edges are `(x, y, k)` as `u32, u32, i64`. A checksum or
//! header mismatch is reported as [`Error::Cache`] and never reused.

use crate::binary_form::BinaryForm;
use crate::enumeration::{build_edge_list, ClassKey, DoubleCoset, Edge, EdgeList, GeodesicClass};
use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const MAGIC: &[u8; 8] = b"GEOLABC\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 64;

/// Record kinds stored in cache files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Cosets = 1,
    Classes = 2,
    Edges = 3,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Cosets => "cosets",
            Kind::Classes => "classes",
            Kind::Edges => "edges",
        }
    }

    fn record_len(self) -> usize {
        match self {
            Kind::Cosets => 16,
            Kind::Classes => 80,
            Kind::Edges => 16,
        }
    }
}

/// Path of the cache file for `(N, kind)` inside `dir`.
pub fn cache_path(dir: &Path, n: i64, kind: Kind) -> PathBuf {
    dir.join(format!("{}_N{n}.bin", kind.name()))
}

fn encode(kind: Kind, n: i64, count: usize, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(kind as u32).to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&(count as u64).to_le_bytes());
    out.extend_from_slice(&Sha256::digest(payload));
    out.extend_from_slice(payload);
    out
}

/// Validates a cache image and returns its payload and record count.
pub fn decode(bytes: &[u8], kind: Kind, n: i64) -> Result<(&[u8], usize)> {
    let bad = |m: String| Err(Error::Cache(m));
    if bytes.len() < HEADER_LEN || &bytes[0..8] != MAGIC {
        return bad("not a cache file".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let long = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    if word(8) != FORMAT_VERSION {
        return bad(format!("format version {} (expected {FORMAT_VERSION})", word(8)));
    }
    if word(12) != kind as u32 {
        return bad(format!("record kind {} (expected {})", word(12), kind as u32));
    }
    if long(16) as i64 != n {
        return bad(format!("file is for N = {} (expected {n})", long(16) as i64));
    }
    let count = long(24) as usize;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != count * kind.record_len() {
        return bad(format!("payload of {} bytes for {count} records", payload.len()));
    }
    if Sha256::digest(payload).as_slice() != &bytes[32..64] {
        return bad("checksum mismatch".into());
    }
    Ok((payload, count))
}

pub fn encode_cosets(n: i64, xs: &[DoubleCoset]) -> Vec<u8> {
    let mut p = Vec::with_capacity(xs.len() * 16);
    for x in xs {
        p.extend_from_slice(&x.c.to_le_bytes());
        p.extend_from_slice(&x.a_mod_c.to_le_bytes());
    }
    encode(Kind::Cosets, n, xs.len(), &p)
}

pub fn decode_cosets(bytes: &[u8], n: i64) -> Result<Vec<DoubleCoset>> {
    let (p, _) = decode(bytes, Kind::Cosets, n)?;
    p.chunks_exact(16)
        .map(|r| {
            let c = i64::from_le_bytes(r[0..8].try_into().unwrap());
            let a = i64::from_le_bytes(r[8..16].try_into().unwrap());
            DoubleCoset::new(c, a).map_err(|e| Error::Cache(format!("bad coset record: {e}")))
        })
        .collect()
}

pub fn encode_classes(n: i64, ys: &[GeodesicClass]) -> Vec<u8> {
    let mut p = Vec::with_capacity(ys.len() * 80);
    for y in ys {
        let k = y.key;
        for v in [k.trace, k.content, k.form.a, k.form.b, k.form.c] {
            p.extend_from_slice(&v.to_le_bytes());
        }
    }
    encode(Kind::Classes, n, ys.len(), &p)
}

pub fn decode_classes(bytes: &[u8], n: i64) -> Result<Vec<GeodesicClass>> {
    let (p, _) = decode(bytes, Kind::Classes, n)?;
    p.chunks_exact(80)
        .map(|r| {
            let v = |i: usize| i128::from_le_bytes(r[16 * i..16 * i + 16].try_into().unwrap());
            let key = ClassKey { trace: v(0), content: v(1), form: BinaryForm::new(v(2), v(3), v(4)) };
            if key.trace <= 2 || key.content <= 0 || key.form.discriminant() * key.content * key.content != key.discriminant() {
                return Err(Error::Cache("bad class record".into()));
            }
            Ok(GeodesicClass::from_key(key))
        })
        .collect()
}

pub fn encode_edges(n: i64, es: &[Edge]) -> Vec<u8> {
    let mut p = Vec::with_capacity(es.len() * 16);
    for e in es {
        p.extend_from_slice(&e.x.to_le_bytes());
        p.extend_from_slice(&e.y.to_le_bytes());
        p.extend_from_slice(&e.k.to_le_bytes());
    }
    encode(Kind::Edges, n, es.len(), &p)
}

pub fn decode_edges(bytes: &[u8], n: i64) -> Result<Vec<Edge>> {
    let (p, _) = decode(bytes, Kind::Edges, n)?;
    Ok(p.chunks_exact(16)
        .map(|r| Edge {
            x: u32::from_le_bytes(r[0..4].try_into().unwrap()),
            y: u32::from_le_bytes(r[4..8].try_into().unwrap()),
            k: i64::from_le_bytes(r[8..16].try_into().unwrap()),
        })
        .collect())
}

/// Writes the three cache files of `G_N` into `dir`.
pub fn store_edge_list(dir: &Path, g: &EdgeList) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(cache_path(dir, g.n, Kind::Cosets), encode_cosets(g.n, &g.cosets))?;
    fs::write(cache_path(dir, g.n, Kind::Classes), encode_classes(g.n, &g.classes))?;
    fs::write(cache_path(dir, g.n, Kind::Edges), encode_edges(g.n, &g.edges))?;
    Ok(())
}

/// Reads `G_N` back from `dir`, validating every file and every edge index.
pub fn load_edge_list(dir: &Path, n: i64) -> Result<EdgeList> {
    let read = |kind: Kind| {
        let path = cache_path(dir, n, kind);
        fs::read(&path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    };
    let cosets = decode_cosets(&read(Kind::Cosets)?, n)?;
    let classes = decode_classes(&read(Kind::Classes)?, n)?;
    let edges = decode_edges(&read(Kind::Edges)?, n)?;
    if edges.iter().any(|e| e.x as usize >= cosets.len() || e.y as usize >= classes.len()) {
        return Err(Error::Cache("edge refers to a missing vertex".into()));
    }
    Ok(build_edge_list(n, cosets, classes, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_edges;

    #[test]
    fn round_trip_and_corruption() {
        let g = enumerate_edges(30);
        let bytes = encode_edges(30, &g.edges);
        assert_eq!(decode_edges(&bytes, 30).unwrap(), g.edges);
        assert_eq!(decode_classes(&encode_classes(30, &g.classes), 30).unwrap(), g.classes);
        assert_eq!(decode_cosets(&encode_cosets(30, &g.cosets), 30).unwrap(), g.cosets);
        let mut bad = bytes.clone();
        let last = bad.len() - 1;
        bad[last] ^= 1;
        assert!(matches!(decode_edges(&bad, 30), Err(Error::Cache(_))));
        assert!(matches!(decode_edges(&bytes, 31), Err(Error::Cache(_))));
    }
}
