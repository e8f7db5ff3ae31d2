//! On-disk formats: a little-endian binary container for fields, magnitudes
//! and masks; iteration traces as CSV; 8-bit P5 graymaps for inspection.
//!
//! Field file layout:
//!
//! ```text
//! offset  size  content
//! 0       8     magic "CGPRFLD1"
//! 8       8     rows (u64 LE)
//! 16      8     cols (u64 LE)
//! 24      8     dx   (f64 LE)
//! 32      8     dy   (f64 LE)
//! 40      1     kind: 0 complex, 1 magnitude, 2 mask
//! 41      ..    row-major payload: (re, im) f64 pairs | f64 | u8 0/1
//! ```

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::complexity::MagnitudeData;
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::solver::{IterationRecord, IterationTrace, SupportMask};

pub const MAGIC: &[u8; 8] = b"CGPRFLD1";
const HEADER_LEN: usize = 41;

const KIND_COMPLEX: u8 = 0;
const KIND_MAGNITUDE: u8 = 1;
const KIND_MASK: u8 = 2;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldPayload {
    Complex(ComplexField),
    Magnitude(MagnitudeData),
    Mask(SupportMask),
}

impl FieldPayload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FieldPayload::Complex(_) => "complex field",
            FieldPayload::Magnitude(_) => "magnitude",
            FieldPayload::Mask(_) => "mask",
        }
    }

    pub fn into_complex(self) -> Result<ComplexField> {
        match self {
            FieldPayload::Complex(f) => Ok(f),
            other => Err(Error::WrongKind {
                expected: "complex field",
                found: other.kind_name(),
            }),
        }
    }

    pub fn into_magnitude(self) -> Result<MagnitudeData> {
        match self {
            FieldPayload::Magnitude(m) => Ok(m),
            other => Err(Error::WrongKind {
                expected: "magnitude",
                found: other.kind_name(),
            }),
        }
    }

    pub fn into_mask(self) -> Result<SupportMask> {
        match self {
            FieldPayload::Mask(m) => Ok(m),
            other => Err(Error::WrongKind {
                expected: "mask",
                found: other.kind_name(),
            }),
        }
    }
}

impl From<ComplexField> for FieldPayload {
    fn from(f: ComplexField) -> Self {
        FieldPayload::Complex(f)
    }
}

impl From<MagnitudeData> for FieldPayload {
    fn from(m: MagnitudeData) -> Self {
        FieldPayload::Magnitude(m)
    }
}

impl From<SupportMask> for FieldPayload {
    fn from(m: SupportMask) -> Self {
        FieldPayload::Mask(m)
    }
}

pub fn encode_field(payload: &FieldPayload) -> Vec<u8> {
    let (rows, cols, dx, dy, kind) = match payload {
        FieldPayload::Complex(f) => (f.rows(), f.cols(), f.dx(), f.dy(), KIND_COMPLEX),
        FieldPayload::Magnitude(m) => (m.rows(), m.cols(), m.dx(), m.dy(), KIND_MAGNITUDE),
        // masks carry no sampling metadata
        FieldPayload::Mask(m) => (m.rows(), m.cols(), 1.0, 1.0, KIND_MASK),
    };
    let mut buf = Vec::with_capacity(HEADER_LEN + rows * cols * bytes_per_pixel(kind));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(rows as u64).to_le_bytes());
    buf.extend_from_slice(&(cols as u64).to_le_bytes());
    buf.extend_from_slice(&dx.to_le_bytes());
    buf.extend_from_slice(&dy.to_le_bytes());
    buf.push(kind);
    match payload {
        FieldPayload::Complex(f) => {
            for z in f.samples() {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        FieldPayload::Magnitude(m) => {
            for v in m.values() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        FieldPayload::Mask(m) => buf.extend(m.inside().iter().map(|&b| b as u8)),
    }
    buf
}

pub fn decode_field(bytes: &[u8]) -> Result<FieldPayload> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedPayload {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let f64_at = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let rows = usize::try_from(u64_at(8)).map_err(|_| Error::InvalidShape {
        rows: usize::MAX,
        cols: 0,
    })?;
    let cols = usize::try_from(u64_at(16)).map_err(|_| Error::InvalidShape {
        rows: 0,
        cols: usize::MAX,
    })?;
    let (dx, dy) = (f64_at(24), f64_at(32));
    let kind = bytes[40];
    if kind > KIND_MASK {
        return Err(Error::UnknownKind(kind));
    }
    let payload = &bytes[HEADER_LEN..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(bytes_per_pixel(kind)))
        .ok_or(Error::InvalidShape { rows, cols })?;
    if payload.len() != expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }

    let f64s = || payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    Ok(match kind {
        KIND_COMPLEX => {
            let values: Vec<f64> = f64s().collect();
            let samples = values
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            FieldPayload::Complex(ComplexField::new(rows, cols, samples)?.with_spacing(dx, dy)?)
        }
        KIND_MAGNITUDE => {
            FieldPayload::Magnitude(MagnitudeData::new(rows, cols, f64s().collect())?.with_spacing(dx, dy)?)
        }
        _ => {
            let inside = payload
                .iter()
                .map(|&b| match b {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::InvalidMaskByte(other)),
                })
                .collect::<Result<Vec<_>>>()?;
            FieldPayload::Mask(SupportMask::new(rows, cols, inside)?)
        }
    })
}

fn bytes_per_pixel(kind: u8) -> usize {
    match kind {
        KIND_COMPLEX => 16,
        KIND_MAGNITUDE => 8,
        _ => 1,
    }
}

pub fn write_field(path: impl AsRef<Path>, payload: &FieldPayload) -> Result<()> {
    fs::write(path, encode_field(payload))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<FieldPayload> {
    decode_field(&fs::read(path)?)
}

pub const TRACE_HEADER: &str = "iter,zeta,error_sq,tv,tv_substeps,elapsed_ms";

/// 17 significant digits; enough for an exact decimal round trip.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trace_to_csv(trace: &IterationTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iter,
            format_f64(r.zeta),
            r.error_sq.map(format_f64).unwrap_or_default(),
            format_f64(r.tv),
            r.tv_substeps,
            format_f64(r.elapsed_ms),
        ));
    }
    out
}

pub fn write_trace_csv(trace: &IterationTrace, path: impl AsRef<Path>) -> Result<()> {
    if trace.records.is_empty() {
        return Err(Error::MalformedTrace("refusing to write an empty trace".into()));
    }
    fs::write(path, trace_to_csv(trace))?;
    Ok(())
}

/// Parses the CSV written by [`write_trace_csv`]. Fields not stored in the
/// file (`zeta_entry`, `cap_hit`, `zeta_target`) come back empty.
pub fn parse_trace_csv(text: &str) -> Result<IterationTrace> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => return Err(Error::MalformedTrace(format!("bad header {other:?}"))),
    }
    let bad = |line: &str| Error::MalformedTrace(format!("bad row {line:?}"));
    let mut records = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(bad(line));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
        records.push(IterationRecord {
            iter: cells[0].parse().map_err(|_| bad(line))?,
            zeta: float(cells[1])?,
            zeta_entry: None,
            error_sq: if cells[2].is_empty() {
                None
            } else {
                Some(float(cells[2])?)
            },
            tv: float(cells[3])?,
            tv_substeps: cells[4].parse().map_err(|_| bad(line))?,
            cap_hit: false,
            elapsed_ms: float(cells[5])?,
        });
    }
    Ok(IterationTrace {
        zeta_target: None,
        records,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Amplitude,
    Phase,
}

/// 8-bit gray levels, row-major. Amplitude maps [min, max] → [0, 255]
/// (a constant image maps to 0); phase maps [−π, π] → [0, 255].
pub fn grayscale(f: &ComplexField, channel: Channel) -> Vec<u8> {
    match channel {
        Channel::Amplitude => {
            let amps: Vec<f64> = f.samples().iter().map(|z| z.norm()).collect();
            let lo = amps.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = amps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            amps.iter()
                .map(|a| {
                    if range > 0.0 {
                        ((a - lo) / range * 255.0).round() as u8
                    } else {
                        0
                    }
                })
                .collect()
        }
        Channel::Phase => f
            .samples()
            .iter()
            .map(|z| ((z.arg() + PI) / (2.0 * PI) * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect(),
    }
}

pub fn encode_pgm(f: &ComplexField, channel: Channel) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", f.cols(), f.rows()).into_bytes();
    out.extend(grayscale(f, channel));
    out
}

pub fn export_grayscale(f: &ComplexField, channel: Channel, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_pgm(f, channel))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_field;
    use proptest::prelude::*;

    fn sample_trace(with_error: bool) -> IterationTrace {
        IterationTrace {
            zeta_target: None,
            records: (1..=3)
                .map(|i| IterationRecord {
                    iter: i,
                    zeta: 1.0 / 3.0 * i as f64,
                    zeta_entry: None,
                    error_sq: with_error.then(|| 0.1_f64.powi(i as i32) + 1e-17),
                    tv: std::f64::consts::PI * i as f64,
                    tv_substeps: i * 7,
                    cap_hit: false,
                    elapsed_ms: 0.125 * i as f64,
                })
                .collect(),
        }
    }

    #[test]
    fn complex_round_trip_is_bit_exact() {
        let f = random_field(16, 16, 3).with_spacing(0.3, 7.0).unwrap();
        let back = decode_field(&encode_field(&f.clone().into())).unwrap();
        assert_eq!(back, FieldPayload::Complex(f));
    }

    #[test]
    fn magnitude_and_mask_round_trip() {
        let m = MagnitudeData::new(3, 4, (0..12).map(|i| i as f64 * 0.1).collect()).unwrap();
        assert_eq!(
            decode_field(&encode_field(&m.clone().into())).unwrap(),
            FieldPayload::Magnitude(m)
        );
        let mask = SupportMask::from_fn(4, 5, |r, c| r == 1 && c > 2).unwrap();
        assert_eq!(
            decode_field(&encode_field(&mask.clone().into())).unwrap(),
            FieldPayload::Mask(mask)
        );
    }

    #[test]
    fn header_layout() {
        let f = ComplexField::zeros(2, 3).unwrap();
        let bytes = encode_field(&f.into());
        assert_eq!(&bytes[..8], b"CGPRFLD1");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 1.0);
        assert_eq!(bytes[40], 0);
        assert_eq!(bytes.len(), 41 + 6 * 16);
    }

    #[test]
    fn rejects_malformed_files() {
        let good = encode_field(&random_field(16, 16, 1).into());

        let mut bad_magic = good.clone();
        bad_magic[..8].copy_from_slice(b"XXXXXXXX");
        assert!(matches!(decode_field(&bad_magic), Err(Error::BadMagic)));
        assert!(matches!(decode_field(b"CG"), Err(Error::BadMagic)));

        let short = &good[..41 + 100 * 16];
        assert!(matches!(
            decode_field(short),
            Err(Error::TruncatedPayload { expected: 4096, found: 1600 })
        ));

        let mut unknown = good.clone();
        unknown[40] = 9;
        assert!(matches!(decode_field(&unknown), Err(Error::UnknownKind(9))));

        let mut mask = encode_field(&SupportMask::from_fn(2, 2, |r, _| r == 0).unwrap().into());
        mask[41] = 7;
        assert!(matches!(decode_field(&mask), Err(Error::InvalidMaskByte(7))));
    }

    #[test]
    fn payload_kind_accessors() {
        let f: FieldPayload = random_field(3, 3, 2).into();
        assert!(f.clone().into_complex().is_ok());
        assert!(matches!(f.into_mask(), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn trace_csv_layout() {
        let csv = trace_to_csv(&sample_trace(true));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], TRACE_HEADER);
        assert!(lines[1].starts_with("1,3.3333333333333331e-1,"));

        let bare = trace_to_csv(&sample_trace(false));
        for line in bare.lines().skip(1) {
            assert_eq!(line.split(',').nth(2), Some(""));
        }
    }

    #[test]
    fn trace_csv_reparses_exactly() {
        for with_error in [true, false] {
            let trace = sample_trace(with_error);
            let parsed = parse_trace_csv(&trace_to_csv(&trace)).unwrap();
            assert_eq!(parsed, trace);
        }
        assert!(parse_trace_csv("nope\n").is_err());
    }

    #[test]
    fn empty_trace_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_trace_csv(&IterationTrace::default(), dir.path().join("t.csv")).is_err());
    }

    #[test]
    fn grayscale_conventions() {
        let flat = ComplexField::new(3, 3, vec![Complex64::new(2.0, 0.0); 9]).unwrap();
        assert!(grayscale(&flat, Channel::Amplitude).iter().all(|&v| v == 0));

        let two_level = ComplexField::from_fn(4, 4, |r, _| {
            Complex64::from_polar(1.0, if r < 2 { 0.0 } else { 2.0 * PI / 3.0 })
        })
        .unwrap();
        let mut levels = grayscale(&two_level, Channel::Phase);
        levels.sort_unstable();
        levels.dedup();
        assert_eq!(levels, vec![128, 212]);

        let pgm = encode_pgm(&two_level, Channel::Phase);
        assert!(pgm.starts_with(b"P5\n4 4\n255\n"));
        assert_eq!(pgm.len(), 11 + 16);
    }

    #[test]
    fn pgm_export_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("amp.pgm");
        let f = random_field(5, 6, 1);
        export_grayscale(&f, Channel::Amplitude, &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), encode_pgm(&f, Channel::Amplitude));
    }

    proptest! {
        #[test]
        fn csv_floats_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(format_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }

        #[test]
        fn field_files_round_trip(rows in 2usize..9, cols in 2usize..9, seed in any::<u64>()) {
            let f = random_field(rows, cols, seed);
            let back = decode_field(&encode_field(&f.clone().into())).unwrap().into_complex().unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
