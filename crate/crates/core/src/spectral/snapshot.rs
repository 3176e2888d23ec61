//! Field snapshot files.
//!
//! A snapshot is one UTF-8 header line of space-separated `key=value` pairs,
//! led by the token `LERAYFLUX-SNAPSHOT`, followed by the samples as
//! little-endian `f64`, x-fastest, component-major. The keys `dim`, `n`,
//! `components` and `time` are mandatory; any other key is carried through
//! as a named parameter.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Grid, PhysicalField};
use crate::{Error, Result};

const MAGIC: &str = "LERAYFLUX-SNAPSHOT";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: PhysicalField,
    pub time: f64,
    /// Extra named metadata (model parameters, field layout).
    pub params: BTreeMap<String, String>,
}

impl Snapshot {
    pub fn new(field: PhysicalField, time: f64) -> Self {
        Snapshot {
            field,
            time,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(|v| v.parse().ok())
    }

    pub fn header(&self) -> String {
        let g = self.field.grid();
        let mut line = format!(
            "{MAGIC} dim={} n={} components={} time={:?}",
            g.dim(),
            g.n(),
            self.field.components(),
            self.time
        );
        for (k, v) in &self.params {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header().into_bytes();
        out.push(b'\n');
        out.reserve(8 * self.field.data().len());
        for v in self.field.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(r: impl Read) -> Result<Snapshot> {
        let mut reader = BufReader::new(r);
        let mut header = Vec::new();
        reader.read_until(b'\n', &mut header)?;
        if header.last() != Some(&b'\n') {
            return Err(Error::Format("missing header terminator".into()));
        }
        header.pop();
        let header = String::from_utf8(header).map_err(|_| Error::Format("header is not UTF-8".into()))?;
        let mut tokens = header.split(' ');
        if tokens.next() != Some(MAGIC) {
            return Err(Error::Format("not a lerayflux snapshot".into()));
        }
        let mut params = BTreeMap::new();
        for tok in tokens.filter(|t| !t.is_empty()) {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("malformed header token `{tok}`")))?;
            params.insert(k.to_string(), v.to_string());
        }
        let mut take = |key: &str| {
            params
                .remove(key)
                .ok_or_else(|| Error::Format(format!("header lacks `{key}`")))
        };
        let dim: usize = parse(&take("dim")?, "dim")?;
        let n: usize = parse(&take("n")?, "n")?;
        let components: usize = parse(&take("components")?, "components")?;
        let time: f64 = parse(&take("time")?, "time")?;
        let grid = Grid::new(dim, n)?;

        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        let expected = 8 * components * grid.len();
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} payload bytes, found {}",
                bytes.len()
            )));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        let field = PhysicalField::from_vec(grid, components, data)?;
        Ok(Snapshot { field, time, params })
    }

    pub fn load(path: &Path) -> Result<Snapshot> {
        Snapshot::read_from(fs::File::open(path)?)
    }
}

fn parse<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Format(format!("bad value `{v}` for `{key}`")))
}
