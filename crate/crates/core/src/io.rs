//! `.grd` field files and `.hwc` coefficient files.
//!
//! Both start with one JSON header line terminated by LF, followed by a raw
//! little-endian payload of `2^{dJ}` entries.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{FormatError, Result};
use crate::field::{max_level, DyadicGrid, SampledField};
use crate::wavelet::{CoefficientField, WaveletSpec};

pub const GRD_MAGIC: &str = "GRD1";
pub const HWC_MAGIC: &str = "HWC1";

#[derive(Serialize, Deserialize)]
struct GrdHeader {
    magic: String,
    d: usize,
    #[serde(rename = "J")]
    level: usize,
    dtype: String,
    layout: String,
}

#[derive(Serialize, Deserialize)]
struct HwcHeader {
    magic: String,
    d: usize,
    #[serde(rename = "J")]
    level: usize,
    wavelet: WaveletSpec,
    order: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Dtype {
    F64,
    C128,
}

fn split_header(bytes: &[u8]) -> std::result::Result<(Value, &[u8]), FormatError> {
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| FormatError::MalformedHeader("missing header line".into()))?;
    let value: Value = serde_json::from_slice(&bytes[..end])
        .map_err(|e| FormatError::MalformedHeader(e.to_string()))?;
    if !value.is_object() {
        return Err(FormatError::MalformedHeader("header is not a JSON object".into()));
    }
    Ok((value, &bytes[end + 1..]))
}

fn field_str<'a>(v: &'a Value, key: &str) -> std::result::Result<&'a str, FormatError> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| FormatError::MalformedHeader(format!("missing string field {key:?}")))
}

fn field_usize(v: &Value, key: &str) -> std::result::Result<usize, FormatError> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| FormatError::MalformedHeader(format!("missing integer field {key:?}")))
}

fn header_grid(v: &Value, magic: &'static str) -> std::result::Result<DyadicGrid, FormatError> {
    let found = field_str(v, "magic")?;
    if found != magic {
        return Err(FormatError::BadMagic {
            expected: magic,
            found: found.to_string(),
        });
    }
    let d = field_usize(v, "d")?;
    let level = field_usize(v, "J")?;
    let cap = max_level(d).ok_or(FormatError::UnsupportedDimension(d))?;
    if level < 1 || level > cap {
        return Err(FormatError::LevelMismatch { dim: d, level });
    }
    DyadicGrid::new(d, level).map_err(|_| FormatError::LevelMismatch { dim: d, level })
}

fn check_payload(payload: &[u8], expected: usize) -> std::result::Result<(), FormatError> {
    if payload.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(FormatError::TrailingData(payload.len() - expected));
    }
    Ok(())
}

fn read_f64s(payload: &[u8]) -> impl Iterator<Item = f64> + '_ {
    payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
}

fn push_complex(out: &mut Vec<u8>, values: &[Complex64]) {
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

fn header_line<T: Serialize>(header: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(header).expect("header serializes");
    out.push(b'\n');
    out
}

/// Serializes a field; real fields are written as `f64`, others as `c128`.
pub fn encode_field(f: &SampledField) -> Vec<u8> {
    let grid = f.grid();
    let dtype = if f.is_real() { Dtype::F64 } else { Dtype::C128 };
    let header = GrdHeader {
        magic: GRD_MAGIC.into(),
        d: grid.dim(),
        level: grid.level(),
        dtype: if dtype == Dtype::F64 { "f64" } else { "c128" }.into(),
        layout: "row-major".into(),
    };
    let mut out = header_line(&header);
    match dtype {
        Dtype::F64 => {
            out.reserve(8 * grid.len());
            for v in f.values() {
                out.extend_from_slice(&v.re.to_le_bytes());
            }
        }
        Dtype::C128 => {
            out.reserve(16 * grid.len());
            push_complex(&mut out, f.values());
        }
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<SampledField> {
    let (header, payload) = split_header(bytes)?;
    let grid = header_grid(&header, GRD_MAGIC)?;
    let dtype = match field_str(&header, "dtype")? {
        "f64" => Dtype::F64,
        "c128" => Dtype::C128,
        other => return Err(FormatError::UnsupportedDtype(other.to_string()).into()),
    };
    let layout = field_str(&header, "layout")?;
    if layout != "row-major" {
        return Err(FormatError::MalformedHeader(format!("unsupported layout {layout:?}")).into());
    }
    match dtype {
        Dtype::F64 => {
            check_payload(payload, 8 * grid.len())?;
            SampledField::from_real(grid, read_f64s(payload).collect())
        }
        Dtype::C128 => {
            check_payload(payload, 16 * grid.len())?;
            SampledField::new(grid, decode_complex(payload))
        }
    }
}

fn decode_complex(payload: &[u8]) -> Vec<Complex64> {
    let flat: Vec<f64> = read_f64s(payload).collect();
    flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

pub fn write_field(f: &SampledField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_field(f))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SampledField> {
    decode_field(&fs::read(path)?)
}

pub fn encode_coefficients(c: &CoefficientField) -> Vec<u8> {
    let grid = c.grid();
    let header = HwcHeader {
        magic: HWC_MAGIC.into(),
        d: grid.dim(),
        level: grid.level(),
        wavelet: c.spec().clone(),
        order: "j-lex".into(),
    };
    let mut out = header_line(&header);
    out.reserve(16 * grid.len());
    push_complex(&mut out, c.data());
    out
}

pub fn decode_coefficients(bytes: &[u8]) -> Result<CoefficientField> {
    let (header, payload) = split_header(bytes)?;
    let grid = header_grid(&header, HWC_MAGIC)?;
    let parsed: HwcHeader = serde_json::from_value(header)
        .map_err(|e| FormatError::MalformedHeader(e.to_string()))?;
    if parsed.order != "j-lex" {
        return Err(FormatError::MalformedHeader(format!("unsupported order {:?}", parsed.order)).into());
    }
    parsed
        .wavelet
        .validate()
        .map_err(|e| FormatError::MalformedHeader(e.to_string()))?;
    check_payload(payload, 16 * grid.len())?;
    CoefficientField::from_data(grid, parsed.wavelet, decode_complex(payload))
}

pub fn write_coefficients(c: &CoefficientField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_coefficients(c))?;
    Ok(())
}

pub fn read_coefficients(path: impl AsRef<Path>) -> Result<CoefficientField> {
    decode_coefficients(&fs::read(path)?)
}
