//! Deterministic artifact I/O: float formatting, CSV, JSON, binary field
//! snapshots, and config hashing.
//!
//! Data files carry no timestamps and use fixed 17-significant-digit
//! float formatting, so identical inputs reproduce byte-identical files.

use std::io::{Read, Write};

use ndarray::{ArrayD, IxDyn};
use sha2::{Digest, Sha256};

use crate::field::PhysicalField;
use crate::grid::Grid;
use crate::{Error, Result};

/// Magic prefix of binary field snapshots.
pub const SNAPSHOT_MAGIC: &[u8; 8] = b"NSFIELD1";

/// Canonical float formatting: 17 significant digits, scientific.
/// Parses back to the identical bit pattern.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with the given header; every cell formatted by [`fmt_float`].
pub fn write_csv<W: Write>(
    out: &mut W,
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::Format(format!(
                "csv row has {} cells, header has {}",
                row.len(),
                columns.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Pretty JSON plus trailing newline. Field order follows the type, so
/// output is deterministic.
pub fn write_json<W: Write, T: serde::Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)
        .map_err(|e| Error::Format(format!("json: {e}")))?;
    writeln!(out)?;
    Ok(())
}

/// Lowercase hex SHA-256 of config text, embedded in certificates to tie
/// artifacts to their inputs.
pub fn config_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn write_u32<W: Write>(out: &mut W, v: u32) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

/// Binary field snapshot: magic, u32 dimension, u32 points per axis,
/// u32 component count, u32 reserved zero, f64 periods, then each
/// component row-major as little-endian f64.
pub fn write_snapshot<W: Write>(out: &mut W, field: &PhysicalField) -> Result<()> {
    let grid = field.grid();
    out.write_all(SNAPSHOT_MAGIC)?;
    write_u32(out, grid.dimension() as u32)?;
    write_u32(out, grid.points_per_axis() as u32)?;
    write_u32(out, field.n_components() as u32)?;
    write_u32(out, 0)?;
    for axis in 0..grid.dimension() {
        out.write_all(&grid.period(axis).to_le_bytes())?;
    }
    for c in 0..field.n_components() {
        let comp = field.component(c);
        let slice = comp.as_slice().expect("standard layout");
        for v in slice {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Inverse of [`write_snapshot`]; validates the magic and header.
pub fn read_snapshot<R: Read>(input: &mut R) -> Result<PhysicalField> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format("snapshot magic mismatch".to_string()));
    }
    let dimension = read_u32(input)? as usize;
    let points = read_u32(input)? as usize;
    let n_components = read_u32(input)? as usize;
    let reserved = read_u32(input)?;
    if reserved != 0 {
        return Err(Error::Format(format!(
            "snapshot reserved field is {reserved}, expected 0"
        )));
    }
    if !(1..=3).contains(&dimension) || n_components == 0 || n_components > 8 {
        return Err(Error::Format(format!(
            "snapshot header out of range: dimension {dimension}, components {n_components}"
        )));
    }
    let mut periods = Vec::with_capacity(dimension);
    for _ in 0..dimension {
        periods.push(read_f64(input)?);
    }
    let grid = Grid::with_periods(dimension, points, &periods)?;
    let len = grid.len();
    let mut components = Vec::with_capacity(n_components);
    for _ in 0..n_components {
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(read_f64(input)?);
        }
        let array = ArrayD::from_shape_vec(IxDyn(&grid.shape()), data)
            .map_err(|e| Error::Format(format!("snapshot shape: {e}")))?;
        components.push(array);
    }
    PhysicalField::new(grid, components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DEFAULT_PERIOD;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fmt_float_round_trips_bit_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let v: f64 = rng.gen_range(-1e6..1e6) * 10f64.powi(rng.gen_range(-12..12));
            let back: f64 = fmt_float(v).parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} reprinted as {}", fmt_float(v));
        }
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_empty_series_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["t", "energy"], Vec::<Vec<f64>>::new()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,energy\n");
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        let mut buf = Vec::new();
        let err = write_csv(&mut buf, &["a", "b"], vec![vec![1.0]]);
        assert!(matches!(err, Err(Error::Format(_))));
    }

    #[test]
    fn snapshot_round_trips() {
        let grid = Grid::new(2, 8, DEFAULT_PERIOD).unwrap();
        let field = PhysicalField::from_fn(grid, 3, |c, x| {
            (x[0] + c as f64).sin() * x[1].cos()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &field).unwrap();
        let back = read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(back.n_components(), 3);
        assert!(back.grid().same_layout(field.grid()));
        for c in 0..3 {
            for (a, b) in field.component(c).iter().zip(back.component(c).iter()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn snapshot_rejects_bad_magic() {
        let mut data = b"NOTAFILE".to_vec();
        data.extend_from_slice(&[0u8; 64]);
        assert!(matches!(
            read_snapshot(&mut data.as_slice()),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn config_hash_matches_known_vector() {
        assert_eq!(
            config_hash("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(config_hash("abc"), config_hash("abc"));
        assert_ne!(config_hash("abc"), config_hash("abd"));
    }

    #[test]
    fn json_emission_is_deterministic() {
        #[derive(serde::Serialize)]
        struct Demo {
            value: f64,
            name: &'static str,
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_json(&mut a, &Demo { value: 0.1 + 0.2, name: "x" }).unwrap();
        write_json(&mut b, &Demo { value: 0.1 + 0.2, name: "x" }).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["value"].as_f64().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }
}
