//! The MLQD measurement-record file format.
//!
//! Layout (little-endian throughout):
//!
//! ```text
//! header:  magic "MLQD" | version u32 | record_count u64 | pixel_dt_ns f64
//!          | flags u32 (bit 0: truth values present)
//! record:  n_pixels u32 | prep u8 | axis u8 | n_shots u32 | label f32
//!          | truth f32 (NaN when absent) | s_i f32 × n_pixels
//!          | s_q f32 × n_pixels
//! ```
//!
//! Reading is strict: bad magic, unknown versions, truncation, out-of-range
//! preparation/axis codes, and trailing bytes are all distinct errors, and a
//! failed read never yields a partial record set.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use mlqoc_device::PulseRecord;
use mlqoc_pulse::PixelPulse;

use crate::error::CliError;

const MAGIC: &[u8; 4] = b"MLQD";
const VERSION: u32 = 1;
const FLAG_TRUTH: u32 = 1;

/// Upper bound on plausible pixel counts; reads beyond it are corruption.
const MAX_PIXELS: u32 = 100_000;

/// An in-memory dataset: records plus the pixel clock they share.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Pixel duration in ns, common to every record.
    pub pixel_dt_ns: f64,
    /// Whether truth values are meaningful (otherwise every truth is NaN).
    pub has_truth: bool,
    /// The records.
    pub records: Vec<PulseRecord>,
}

impl Dataset {
    /// Wraps simulated records (which always carry truth).
    pub fn new(records: Vec<PulseRecord>, pixel_dt_ns: f64) -> Self {
        Self { pixel_dt_ns, has_truth: true, records }
    }

    /// Drops the truth channel, as for datasets shipped to a real device.
    pub fn without_truth(mut self) -> Self {
        self.has_truth = false;
        for r in &mut self.records {
            r.truth = f64::NAN;
        }
        self
    }
}

/// Serializes `ds` to `path`.
pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e: std::io::Error| CliError::io(path, e);

    w.write_all(MAGIC).map_err(io)?;
    w.write_u32::<LittleEndian>(VERSION).map_err(io)?;
    w.write_u64::<LittleEndian>(ds.records.len() as u64).map_err(io)?;
    w.write_f64::<LittleEndian>(ds.pixel_dt_ns).map_err(io)?;
    w.write_u32::<LittleEndian>(if ds.has_truth { FLAG_TRUTH } else { 0 })
        .map_err(io)?;

    for r in &ds.records {
        let n = r.pulse.n_pixels();
        w.write_u32::<LittleEndian>(n as u32).map_err(io)?;
        w.write_u8(r.prep).map_err(io)?;
        w.write_u8(r.axis).map_err(io)?;
        w.write_u32::<LittleEndian>(r.n_shots).map_err(io)?;
        w.write_f32::<LittleEndian>(r.label as f32).map_err(io)?;
        let truth = if ds.has_truth { r.truth as f32 } else { f32::NAN };
        w.write_f32::<LittleEndian>(truth).map_err(io)?;
        for &a in &r.pulse.s_i {
            w.write_f32::<LittleEndian>(a as f32).map_err(io)?;
        }
        for &a in &r.pulse.s_q {
            w.write_f32::<LittleEndian>(a as f32).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Deserializes the dataset at `path`.
pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = BufReader::new(file);
    let corrupt = |msg: &str| CliError::Data(format!("{}: {msg}", path.display()));
    let io = |e: std::io::Error| {
        CliError::Data(format!("{}: truncated or unreadable ({e})", path.display()))
    };

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(corrupt("not a dataset file (bad magic)"));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io)?;
    if version != VERSION {
        return Err(corrupt(&format!("unsupported version {version} (expected {VERSION})")));
    }
    let count = r.read_u64::<LittleEndian>().map_err(io)?;
    let pixel_dt_ns = r.read_f64::<LittleEndian>().map_err(io)?;
    if !(pixel_dt_ns.is_finite() && pixel_dt_ns > 0.0) {
        return Err(corrupt("non-positive pixel duration"));
    }
    let flags = r.read_u32::<LittleEndian>().map_err(io)?;
    let has_truth = flags & FLAG_TRUTH != 0;

    let mut records = Vec::with_capacity(usize::try_from(count).unwrap_or(0));
    for i in 0..count {
        let n = r.read_u32::<LittleEndian>().map_err(io)?;
        if n == 0 || n > MAX_PIXELS {
            return Err(corrupt(&format!("record {i}: implausible pixel count {n}")));
        }
        let prep = r.read_u8().map_err(io)?;
        let axis = r.read_u8().map_err(io)?;
        if prep > 5 {
            return Err(corrupt(&format!("record {i}: preparation code {prep} out of range")));
        }
        if axis > 2 {
            return Err(corrupt(&format!("record {i}: axis code {axis} out of range")));
        }
        let n_shots = r.read_u32::<LittleEndian>().map_err(io)?;
        let label = f64::from(r.read_f32::<LittleEndian>().map_err(io)?);
        let raw_truth = f64::from(r.read_f32::<LittleEndian>().map_err(io)?);
        let truth = if has_truth { raw_truth } else { f64::NAN };
        let mut read_channel = |n: u32| -> Result<Vec<f64>, CliError> {
            (0..n)
                .map(|_| r.read_f32::<LittleEndian>().map(f64::from).map_err(io))
                .collect()
        };
        let s_i = read_channel(n)?;
        let s_q = read_channel(n)?;
        let pulse = PixelPulse::new(pixel_dt_ns, s_i, s_q)
            .map_err(|e| corrupt(&format!("record {i}: {e}")))?;
        records.push(PulseRecord { pulse, prep, axis, n_shots, label, truth });
    }

    let mut trailing = [0u8; 1];
    match r.read(&mut trailing) {
        Ok(0) => {}
        Ok(_) => return Err(corrupt("trailing bytes after the last record")),
        Err(e) => return Err(io(e)),
    }
    Ok(Dataset { pixel_dt_ns, has_truth, records })
}

/// Concatenates shard files (in the given record-index order) into one
/// dataset. Shards must agree on pixel clock and truth flag.
pub fn merge_shards(shards: &[std::path::PathBuf]) -> Result<Dataset, CliError> {
    let mut merged: Option<Dataset> = None;
    for path in shards {
        let ds = read_dataset(path)?;
        match &mut merged {
            None => merged = Some(ds),
            Some(m) => {
                if ds.pixel_dt_ns != m.pixel_dt_ns || ds.has_truth != m.has_truth {
                    return Err(CliError::Data(format!(
                        "{}: shard header disagrees with the first shard",
                        path.display()
                    )));
                }
                m.records.extend(ds.records);
            }
        }
    }
    merged.ok_or_else(|| CliError::Data("no shards given".into()))
}
