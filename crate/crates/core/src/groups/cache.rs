//! Text cache for enumerated groups.
//!
//! ```text
//! group <name> order <N> kind <matrix|unitary|perm>
//! <hex encoding of element 0>[ <parent> <generator>]
//! ...
//! ```
//!
//! Elements appear in table order. Unitary records carry their breadth-first word
//! (parent position and generator index) so the dense matrix can be re-derived by
//! replaying the products.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{GroupElement, GroupTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheKind {
    Matrix,
    Unitary,
    Perm,
}

impl fmt::Display for CacheKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheKind::Matrix => "matrix",
            CacheKind::Unitary => "unitary",
            CacheKind::Perm => "perm",
        })
    }
}

impl FromStr for CacheKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(CacheKind::Matrix),
            "unitary" => Ok(CacheKind::Unitary),
            "perm" => Ok(CacheKind::Perm),
            other => Err(Error::CacheFormat(format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub name: String,
    pub order: usize,
    pub kind: CacheKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheRecord {
    pub encoding: Vec<u8>,
    pub word: Option<(u32, u32)>,
}

pub fn write_cache<T: GroupElement, W: Write>(group: &GroupTable<T>, kind: CacheKind, mut out: W) -> Result<()> {
    if group.name().contains(char::is_whitespace) {
        return Err(Error::CacheFormat(format!("group name {:?} contains whitespace", group.name())));
    }
    writeln!(out, "group {} order {} kind {}", group.name(), group.order(), kind)?;
    for (e, word) in group.elements().iter().zip(group.words()) {
        let hex = hex::encode(e.encode());
        match (kind, word) {
            (CacheKind::Unitary, Some((parent, gen))) => writeln!(out, "{hex} {parent} {gen}")?,
            _ => writeln!(out, "{hex}")?,
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_cache<R: BufRead>(input: R) -> Result<(CacheHeader, Vec<CacheRecord>)> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::CacheFormat("empty cache file".into()))??;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let header = match parts.as_slice() {
        ["group", name, "order", n, "kind", kind] => CacheHeader {
            name: name.to_string(),
            order: n.parse().map_err(|_| Error::CacheFormat(format!("bad order {n:?}")))?,
            kind: kind.parse()?,
        },
        _ => return Err(Error::CacheFormat(format!("bad header {header:?}"))),
    };
    let mut records = Vec::with_capacity(header.order);
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let encoding = hex::decode(fields.next().unwrap_or_default())
            .map_err(|e| Error::CacheFormat(format!("bad hex at record {}: {e}", records.len())))?;
        let word = match (fields.next(), fields.next()) {
            (Some(a), Some(b)) => Some((
                a.parse().map_err(|_| Error::CacheFormat(format!("bad parent {a:?}")))?,
                b.parse().map_err(|_| Error::CacheFormat(format!("bad generator {b:?}")))?,
            )),
            (None, None) => None,
            _ => return Err(Error::CacheFormat(format!("malformed record {line:?}"))),
        };
        records.push(CacheRecord { encoding, word });
    }
    if records.len() != header.order {
        return Err(Error::CacheFormat(format!("header says {} elements, found {}", header.order, records.len())));
    }
    Ok((header, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Perm;

    #[test]
    fn perm_group_round_trip() {
        let gens = vec![Perm::from_images(vec![1, 2, 3, 0]).unwrap(), Perm::from_images(vec![1, 0, 2, 3]).unwrap()];
        let s4 = GroupTable::closure("S4", gens.clone(), 24).unwrap();
        let mut buf = Vec::new();
        write_cache(&s4, CacheKind::Perm, &mut buf).unwrap();
        let (header, records) = read_cache(buf.as_slice()).unwrap();
        assert_eq!(header, CacheHeader { name: "S4".into(), order: 24, kind: CacheKind::Perm });
        let elements: Vec<Perm> = records.iter().map(|r| Perm::decode(&r.encoding).unwrap()).collect();
        let reloaded = GroupTable::from_elements("S4", elements, gens).unwrap();
        assert_eq!(reloaded.elements(), s4.elements());
    }

    #[test]
    fn truncated_cache_is_rejected() {
        let text = "group G order 3 kind perm\n00000000\n";
        assert!(matches!(read_cache(text.as_bytes()), Err(Error::CacheFormat(_))));
        assert!(read_cache("grp G".as_bytes()).is_err());
    }
}
