//! `gen-data`: synthesize a pulse set, simulate the records, write a dataset.

use std::path::{Path, PathBuf};

use mlqoc_device::generate_records_from;
use mlqoc_pulse::build_dataset_pulses;

use crate::config::LoadedConfig;
use crate::dataset::{merge_shards, write_dataset, Dataset};
use crate::error::CliError;

/// Records simulated per progress tick.
const CHUNK: usize = 2_000;

/// Runs dataset generation.
///
/// With a shard spec `(index, count)`, only the contiguous slice of global
/// record indices belonging to that shard is simulated. Per-record
/// randomness keys on the global index, so the shards of a set merge back
/// into exactly the file an unsharded run would have written.
pub fn run(cfg: &LoadedConfig, out: &Path, shard: Option<(usize, usize)>) -> Result<(), CliError> {
    let data = &cfg.study.data;
    if let Some((index, count)) = shard {
        if count == 0 || index >= count {
            return Err(CliError::Config(format!(
                "shard index {index} out of range for {count} shards"
            )));
        }
    }

    let pulse_cfg = data.pulse_set();
    let pulses = build_dataset_pulses(&pulse_cfg)?;
    let device = cfg.study.device()?;

    let (start, end) = match shard {
        Some((i, c)) => (i * pulses.len() / c, (i + 1) * pulses.len() / c),
        None => (0, pulses.len()),
    };
    let slice = &pulses[start..end];

    eprintln!(
        "gen-data: {} records (global indices {start}..{end}), {} shots, seed {}, λ {}",
        slice.len(),
        data.n_shots,
        data.seed,
        cfg.study.device.distortion_lambda,
    );

    let mut records = Vec::with_capacity(slice.len());
    for (chunk_idx, chunk) in slice.chunks(CHUNK).enumerate() {
        let first = start + chunk_idx * CHUNK;
        records.extend(generate_records_from(
            chunk,
            first as u64,
            data.n_shots,
            &device,
            data.seed,
        )?);
        eprintln!("gen-data: {}/{} records simulated", records.len(), slice.len());
    }

    write_dataset(out, &Dataset::new(records, pulse_cfg.dt_ns))?;
    println!(
        "wrote {} records to {} (config {})",
        end - start,
        out.display(),
        &cfg.hash[..12]
    );
    Ok(())
}

/// Runs shard merging: concatenates `shards` in order into `out`.
pub fn merge(out: &Path, shards: &[PathBuf]) -> Result<(), CliError> {
    let merged = merge_shards(shards)?;
    let n = merged.records.len();
    write_dataset(out, &merged)?;
    println!("merged {} shards ({n} records) into {}", shards.len(), out.display());
    Ok(())
}
