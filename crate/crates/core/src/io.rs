//! Binary and CSV formats for fields, Zak fields, Weyl kernels and coefficients.
//!
//! Binary layouts are an 8-byte magic, little-endian `u32` header words and
//! interleaved little-endian `f64` (re, im) pairs in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{GridSpec, SampledField};
use crate::hermite::PhiExpansion;
use crate::weyl::WeylKernel;
use crate::zak::ZakField;
use crate::C64;

pub const FIELD_MAGIC: &[u8; 8] = b"TGFIELD1";
pub const ZAK_MAGIC: &[u8; 8] = b"TZAKFLD1";
pub const KERNEL_MAGIC: &[u8; 8] = b"TWKERNL1";

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn encode(magic: &[u8; 8], header: &[u32], values: &[C64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 * header.len() + 16 * values.len());
    out.extend_from_slice(magic);
    for h in header {
        out.extend_from_slice(&h.to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

/// Splits a payload into its header words and a count check for the body.
fn decode<'a>(magic: &[u8; 8], words: usize, bytes: &'a [u8]) -> Result<(Vec<u32>, &'a [u8])> {
    if bytes.len() < 8 || &bytes[..8] != magic {
        return Err(Error::BadMagic);
    }
    let head = 8 + 4 * words;
    if bytes.len() < head {
        return Err(Error::Truncated {
            expected: head,
            found: bytes.len(),
        });
    }
    let header = (0..words)
        .map(|i| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().unwrap()))
        .collect();
    Ok((header, &bytes[head..]))
}

fn decode_values(body: &[u8], count: usize) -> Result<Vec<C64>> {
    let expected = 16 * count;
    if body.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: body.len(),
        });
    }
    if body.len() > expected {
        return Err(Error::Dimension(format!(
            "{} trailing bytes after payload",
            body.len() - expected
        )));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}

fn to_u32(v: usize) -> u32 {
    u32::try_from(v).expect("header value fits in u32")
}

pub fn encode_field(f: &SampledField) -> Vec<u8> {
    let g = f.grid();
    encode(
        FIELD_MAGIC,
        &[to_u32(g.resolution()), to_u32(g.truncation())],
        f.values(),
    )
}

pub fn decode_field(bytes: &[u8]) -> Result<SampledField> {
    let (h, body) = decode(FIELD_MAGIC, 2, bytes)?;
    let grid = GridSpec::new(h[0] as usize, h[1] as usize)
        .map_err(|e| Error::Dimension(format!("header does not describe a grid: {e}")))?;
    let m = grid.samples_per_axis();
    SampledField::from_values(grid, decode_values(body, m * m)?)
}

/// Writes a TGF1 field file.
pub fn write_field(f: &SampledField, path: &Path) -> Result<()> {
    write_atomic(path, &encode_field(f))
}

/// Reads a TGF1 field file.
pub fn read_field(path: &Path) -> Result<SampledField> {
    decode_field(&fs::read(path)?)
}

/// CSV rendering `x,y,re,im` with 17 significant digits.
pub fn field_to_csv(f: &SampledField) -> String {
    let g = f.grid();
    let m = g.samples_per_axis();
    let mut out = String::from("x,y,re,im\n");
    for ix in 0..m {
        for iy in 0..m {
            let v = f.get(ix, iy);
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                g.coord(ix),
                g.coord(iy),
                v.re,
                v.im
            ));
        }
    }
    out
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {s:?}"),
    })
}

fn csv_rows(text: &str, header: &str, width: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header {header:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<String> = line.split(',').map(str::to_owned).collect();
        if cols.len() != width {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected {width} columns"),
            });
        }
        rows.push((i + 1, cols));
    }
    Ok(rows)
}

/// Parses a CSV field produced by [`field_to_csv`] onto `grid`.
pub fn field_from_csv(text: &str, grid: GridSpec) -> Result<SampledField> {
    let m = grid.samples_per_axis();
    let mut values = vec![C64::new(0.0, 0.0); m * m];
    let mut seen = vec![false; m * m];
    for (line, cols) in csv_rows(text, "x,y,re,im", 4)? {
        let (x, y) = (parse_f64(&cols[0], line)?, parse_f64(&cols[1], line)?);
        let (ix, iy) = match (grid.index_of(x), grid.index_of(y)) {
            (Some(ix), Some(iy)) => (ix, iy),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("({x}, {y}) is not a grid point"),
                })
            }
        };
        values[ix * m + iy] = C64::new(parse_f64(&cols[2], line)?, parse_f64(&cols[3], line)?);
        seen[ix * m + iy] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Dimension(format!(
            "sample ({}, {}) missing",
            missing / m,
            missing % m
        )));
    }
    SampledField::from_values(grid, values)
}

pub fn encode_zak(g: &ZakField) -> Vec<u8> {
    encode(
        ZAK_MAGIC,
        &[to_u32(g.n_z()), to_u32(g.n_w()), to_u32(g.truncation())],
        g.values(),
    )
}

pub fn decode_zak(bytes: &[u8]) -> Result<ZakField> {
    let (h, body) = decode(ZAK_MAGIC, 3, bytes)?;
    let (n_z, n_w, k) = (h[0] as usize, h[1] as usize, h[2] as usize);
    let values = decode_values(body, n_z * n_z * n_w * n_w)?;
    ZakField::from_values(n_z, n_w, k, values)
}

/// Writes a TZK1 Zak field file.
pub fn write_zak(g: &ZakField, path: &Path) -> Result<()> {
    write_atomic(path, &encode_zak(g))
}

pub fn read_zak(path: &Path) -> Result<ZakField> {
    decode_zak(&fs::read(path)?)
}

pub fn encode_kernel(k: &WeylKernel) -> Vec<u8> {
    encode(
        KERNEL_MAGIC,
        &[to_u32(k.resolution()), to_u32(k.truncation())],
        k.values(),
    )
}

pub fn decode_kernel(bytes: &[u8]) -> Result<WeylKernel> {
    let (h, body) = decode(KERNEL_MAGIC, 2, bytes)?;
    let (n1, k1) = (h[0] as usize, h[1] as usize);
    let m1 = 2 * n1 * k1;
    WeylKernel::from_values(n1, k1, decode_values(body, m1 * m1)?)
}

/// Writes a TWK1 Weyl kernel file.
pub fn write_kernel(k: &WeylKernel, path: &Path) -> Result<()> {
    write_atomic(path, &encode_kernel(k))
}

pub fn read_kernel(path: &Path) -> Result<WeylKernel> {
    decode_kernel(&fs::read(path)?)
}

/// Coefficient CSV `m,n,re,im`.
pub fn coefficients_to_csv(e: &PhiExpansion) -> String {
    let mut out = String::from("m,n,re,im\n");
    let (mc, nc) = e.caps();
    for m in 0..=mc {
        for n in 0..=nc {
            let c = e.get(m, n);
            out.push_str(&format!("{m},{n},{:.16e},{:.16e}\n", c.re, c.im));
        }
    }
    out
}

/// Parses coefficient CSV; caps are the largest indices present.
pub fn coefficients_from_csv(text: &str) -> Result<PhiExpansion> {
    let mut entries = Vec::new();
    for (line, cols) in csv_rows(text, "m,n,re,im", 4)? {
        let idx = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("not an index: {s:?}"),
            })
        };
        entries.push((
            idx(&cols[0])?,
            idx(&cols[1])?,
            C64::new(parse_f64(&cols[2], line)?, parse_f64(&cols[3], line)?),
        ));
    }
    let mc = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let nc = entries.iter().map(|e| e.1).max().unwrap_or(0);
    let mut e = PhiExpansion::zeros((mc, nc));
    for (m, n, c) in entries {
        e.set(m, n, c);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> SampledField {
        let g = GridSpec::new(4, 2).unwrap();
        SampledField::from_fn(g, |x, y| {
            C64::new((-(x * x + y * y) / 4.0).exp(), 0.1 * x * y)
        })
    }

    #[test]
    fn binary_round_trip_is_bitwise() {
        let f = gaussian();
        let back = decode_field(&encode_field(&f)).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn corrupt_payloads() {
        let mut bytes = encode_field(&gaussian());
        let short = bytes[..bytes.len() - 3].to_vec();
        assert!(matches!(decode_field(&short), Err(Error::Truncated { .. })));
        bytes[0] = b'X';
        let err = decode_field(&bytes).unwrap_err();
        assert_eq!(err.to_string(), "bad magic");
        // header promises a bigger grid than the payload holds
        let mut bytes = encode_field(&gaussian());
        bytes[12..16].copy_from_slice(&3u32.to_le_bytes());
        assert!(decode_field(&bytes).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = gaussian();
        let back = field_from_csv(&field_to_csv(&f), f.grid()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() <= 1e-15);
        }
        assert!(field_from_csv("x,y\n", f.grid()).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tgf");
        let f = gaussian();
        write_field(&f, &path).unwrap();
        assert_eq!(read_field(&path).unwrap(), f);
    }
}
