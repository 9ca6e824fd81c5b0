//! Binary spectrum-table checkpoints.
//!
//! Little-endian throughout:
//!
//! ```text
//! "SSPC"  u32 version=1  u8 pos (0 noun, 1 verb)  u32 count  u32 dim
//! count x (u16 length, UTF-8 canonical name)
//! count x dim f32, row-major
//! ```
//!
//! Values are stored at 32-bit precision. Names are resolved against a
//! [`Database`] on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::trainer::SpectrumTable;
use crate::wordnet::{Database, PartOfSpeech};

const MAGIC: &[u8; 4] = b"SSPC";
const VERSION: u32 = 1;

pub fn write_checkpoint(table: &SpectrumTable, mut out: impl Write) -> Result<()> {
    let count = u32::try_from(table.len())
        .map_err(|_| Error::InvalidConfig(format!("{} rows do not fit a checkpoint", table.len())))?;
    let dim = u32::try_from(table.dim())
        .map_err(|_| Error::InvalidConfig(format!("dim {} does not fit a checkpoint", table.dim())))?;
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[match table.pos() {
        PartOfSpeech::Noun => 0,
        PartOfSpeech::Verb => 1,
    }])?;
    out.write_all(&count.to_le_bytes())?;
    out.write_all(&dim.to_le_bytes())?;
    for name in table.names() {
        let len =
            u16::try_from(name.len()).map_err(|_| Error::InvalidConfig(format!("synset name too long: {name}")))?;
        out.write_all(&len.to_le_bytes())?;
        out.write_all(name.as_bytes())?;
    }
    for &v in table.values() {
        out.write_all(&(v as f32).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_checkpoint(table: &SpectrumTable, path: impl AsRef<Path>) -> Result<()> {
    write_checkpoint(table, BufWriter::new(File::create(path)?))
}

struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.fill(&mut buf, what)?;
        Ok(buf)
    }

    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let mut read = 0;
        while read < buf.len() {
            match self.inner.read(&mut buf[read..]) {
                Ok(0) => {
                    return Err(corrupt(
                        self.offset + read as u64,
                        format!("unexpected end of file in {what}"),
                    ));
                }
                Ok(n) => read += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(what)?))
    }
}

fn corrupt(offset: u64, reason: impl Into<String>) -> Error {
    Error::CorruptCheckpoint {
        offset,
        reason: reason.into(),
    }
}

pub fn read_checkpoint(input: impl Read, db: &Database) -> Result<SpectrumTable> {
    let mut c = Cursor {
        inner: input,
        offset: 0,
    };
    if &c.take::<4>("magic")? != MAGIC {
        return Err(corrupt(0, "bad magic"));
    }
    let version = c.u32("version")?;
    if version != VERSION {
        return Err(corrupt(4, format!("unsupported version {version}")));
    }
    let pos = match c.take::<1>("part of speech")?[0] {
        0 => PartOfSpeech::Noun,
        1 => PartOfSpeech::Verb,
        other => return Err(corrupt(8, format!("bad part-of-speech byte {other}"))),
    };
    let count = c.u32("count")? as usize;
    let dim = c.u32("dim")? as usize;
    if dim == 0 {
        return Err(corrupt(13, "dim is zero"));
    }

    let mut ids = Vec::with_capacity(count.min(1 << 20));
    let mut names = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let at = c.offset;
        let len = u16::from_le_bytes(c.take("name length")?) as usize;
        let mut buf = vec![0u8; len];
        c.fill(&mut buf, "name")?;
        let name = String::from_utf8(buf).map_err(|_| corrupt(at, "name is not UTF-8"))?;
        let id = db
            .resolve_name(&name)
            .map_err(|_| corrupt(at, format!("unknown synset {name}")))?;
        if id.pos != pos {
            return Err(corrupt(at, format!("{name} is not a {pos} synset")));
        }
        ids.push(id);
        names.push(name);
    }

    let total = count
        .checked_mul(dim)
        .ok_or_else(|| corrupt(9, "count x dim overflows"))?;
    let mut values = Vec::with_capacity(total.min(1 << 26));
    for _ in 0..total {
        let at = c.offset;
        let v = f32::from_le_bytes(c.take("values")?);
        if !v.is_finite() {
            return Err(corrupt(at, format!("non-finite value {v}")));
        }
        values.push(f64::from(v));
    }
    let mut probe = [0u8; 1];
    if c.inner.read(&mut probe)? != 0 {
        return Err(corrupt(c.offset, "trailing bytes"));
    }
    SpectrumTable::from_parts(pos, ids, names, dim, values).map_err(|e| corrupt(17, e.to_string()))
}

pub fn load_checkpoint(path: impl AsRef<Path>, db: &Database) -> Result<SpectrumTable> {
    read_checkpoint(BufReader::new(File::open(path)?), db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::{parse_edge_list, SynsetId};

    fn db() -> Database {
        parse_edge_list("dog.n\ncat.n\nrun.v\n").unwrap()
    }

    fn table(db: &Database) -> SpectrumTable {
        let names: Vec<String> = vec!["dog.n.01".into(), "cat.n.01".into()];
        let ids: Vec<SynsetId> = names.iter().map(|n| db.resolve_name(n).unwrap()).collect();
        SpectrumTable::from_parts(PartOfSpeech::Noun, ids, names, 3, vec![0.1, -0.2, 0.3, 1e-9, 7.0, -0.0]).unwrap()
    }

    fn bytes(t: &SpectrumTable) -> Vec<u8> {
        let mut out = Vec::new();
        write_checkpoint(t, &mut out).unwrap();
        out
    }

    #[test]
    fn round_trip_at_single_precision() {
        let db = db();
        let t = table(&db);
        let raw = bytes(&t);
        assert_eq!(&raw[..4], b"SSPC");
        assert_eq!(raw.len(), 17 + 2 * (2 + 8) + 6 * 4);
        let back = read_checkpoint(raw.as_slice(), &db).unwrap();
        assert_eq!(back.ids(), t.ids());
        assert_eq!(back.names(), t.names());
        for (a, b) in back.values().iter().zip(t.values()) {
            assert_eq!(*a as f32, *b as f32);
        }
        // a second round trip is exact
        assert_eq!(bytes(&back), raw);
    }

    #[test]
    fn header_fields() {
        let db = db();
        let raw = bytes(&table(&db));
        assert_eq!(u32::from_le_bytes(raw[4..8].try_into().unwrap()), 1);
        assert_eq!(raw[8], 0);
        assert_eq!(u32::from_le_bytes(raw[9..13].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(raw[13..17].try_into().unwrap()), 3);
    }

    fn offset_of(err: Error) -> u64 {
        match err {
            Error::CorruptCheckpoint { offset, .. } => offset,
            other => panic!("expected CorruptCheckpoint, got {other}"),
        }
    }

    #[test]
    fn corruption_is_located() {
        let db = db();
        let raw = bytes(&table(&db));

        let truncated = &raw[..raw.len() - 2];
        assert_eq!(
            offset_of(read_checkpoint(truncated, &db).unwrap_err()),
            raw.len() as u64 - 2
        );

        let mut bad = raw.clone();
        bad[0] = b'X';
        assert_eq!(offset_of(read_checkpoint(bad.as_slice(), &db).unwrap_err()), 0);

        let mut bad = raw.clone();
        bad[4] = 2;
        assert_eq!(offset_of(read_checkpoint(bad.as_slice(), &db).unwrap_err()), 4);

        let mut bad = raw.clone();
        bad[8] = 9;
        assert_eq!(offset_of(read_checkpoint(bad.as_slice(), &db).unwrap_err()), 8);

        let mut bad = raw.clone();
        bad.push(0);
        assert_eq!(
            offset_of(read_checkpoint(bad.as_slice(), &db).unwrap_err()),
            raw.len() as u64
        );

        // unknown name in the first entry
        let mut bad = raw.clone();
        bad[19] = b'x';
        assert_eq!(offset_of(read_checkpoint(bad.as_slice(), &db).unwrap_err()), 17);

        assert_eq!(offset_of(read_checkpoint(&b""[..], &db).unwrap_err()), 0);
    }

    #[test]
    fn file_round_trip() {
        let db = db();
        let t = table(&db);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sspc");
        save_checkpoint(&t, &path).unwrap();
        let back = load_checkpoint(&path, &db).unwrap();
        assert_eq!(back.len(), 2);
        assert!(matches!(
            load_checkpoint(dir.path().join("missing"), &db),
            Err(Error::Io(_))
        ));
    }
}
