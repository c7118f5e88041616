//! File-format contracts: datasets round-trip bit-exactly, corruption is
//! detected loudly, and checkpoints restore the exact weights.

use mlqoc_cli::checkpoint::{read_checkpoint, write_checkpoint, CheckpointMeta};
use mlqoc_cli::dataset::{merge_shards, read_dataset, write_dataset, Dataset};
use mlqoc_cli::error::CliError;
use mlqoc_device::PulseRecord;
use mlqoc_model::ModelParams;
use mlqoc_pulse::PixelPulse;
use tempfile::tempdir;

fn sample_records(n: usize) -> Vec<PulseRecord> {
    (0..n)
        .map(|i| {
            let len = 5 + i % 7;
            let s_i: Vec<f64> = (0..len).map(|p| (i as f64 - 3.0) * 0.5 + p as f64).collect();
            let s_q: Vec<f64> = (0..len).map(|p| 40.0 - (p as f64) * (i % 5) as f64).collect();
            PulseRecord {
                pulse: PixelPulse::new(1.0, s_i, s_q).unwrap(),
                prep: (i % 6) as u8,
                axis: (i % 3) as u8,
                n_shots: 32,
                label: (i % 33) as f64 / 32.0,
                truth: 0.25 + 0.5 * (i as f64 / n as f64),
            }
        })
        .collect()
}

/// f32 storage quantizes amplitudes and truths; this is the round-trip the
/// pipeline actually performs before any record reaches the model.
fn quantize(mut records: Vec<PulseRecord>) -> Vec<PulseRecord> {
    for r in &mut records {
        r.pulse = PixelPulse::new(
            r.pulse.dt_ns,
            r.pulse.s_i.iter().map(|&x| x as f32 as f64).collect(),
            r.pulse.s_q.iter().map(|&x| x as f32 as f64).collect(),
        )
        .unwrap();
        r.label = r.label as f32 as f64;
        r.truth = r.truth as f32 as f64;
    }
    records
}

#[test]
fn datasets_round_trip_and_rewrite_byte_identically() {
    let dir = tempdir().unwrap();
    let path_a = dir.path().join("a.mlqd");
    let path_b = dir.path().join("b.mlqd");

    let ds = Dataset::new(sample_records(40), 1.0);
    write_dataset(&path_a, &ds).unwrap();
    let loaded = read_dataset(&path_a).unwrap();

    // Semantic round trip, modulo the documented f32 quantization.
    let expected = Dataset::new(quantize(ds.records.clone()), 1.0);
    assert_eq!(loaded, expected);

    // Write-after-read reproduces the file bit for bit.
    write_dataset(&path_b, &loaded).unwrap();
    assert_eq!(std::fs::read(&path_a).unwrap(), std::fs::read(&path_b).unwrap());
}

#[test]
fn shot_count_labels_survive_storage_exactly() {
    // Labels are multiples of 1/n_shots; those are exact in f32, so shot
    // fractions must survive storage without any quantization error at all.
    let dir = tempdir().unwrap();
    let path = dir.path().join("labels.mlqd");
    let ds = Dataset::new(sample_records(66), 1.0);
    write_dataset(&path, &ds).unwrap();
    let loaded = read_dataset(&path).unwrap();
    for (orig, back) in ds.records.iter().zip(&loaded.records) {
        assert_eq!(orig.label, back.label);
    }
}

#[test]
fn a_dataset_without_truth_reads_back_as_nan_truths() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("blind.mlqd");
    let ds = Dataset::new(sample_records(10), 1.0).without_truth();
    write_dataset(&path, &ds).unwrap();
    let loaded = read_dataset(&path).unwrap();
    assert!(!loaded.has_truth);
    assert!(loaded.records.iter().all(|r| r.truth.is_nan()));
    // Labels are unaffected.
    assert_eq!(loaded.records[3].label, ds.records[3].label);
}

#[test]
fn corruption_is_reported_as_data_errors() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("ds.mlqd");
    write_dataset(&path, &Dataset::new(sample_records(12), 1.0)).unwrap();
    let good = std::fs::read(&path).unwrap();

    let expect_data_err = |bytes: &[u8], what: &str| {
        let p = dir.path().join("bad.mlqd");
        std::fs::write(&p, bytes).unwrap();
        match read_dataset(&p) {
            Err(CliError::Data(_)) => {}
            other => panic!("{what}: expected a data error, got {other:?}"),
        }
    };

    expect_data_err(&good[..good.len() - 3], "truncated record");
    expect_data_err(&good[..20], "truncated header");
    expect_data_err(&[], "empty file");

    let mut bad_magic = good.clone();
    bad_magic[0] = b'X';
    expect_data_err(&bad_magic, "bad magic");

    let mut bad_version = good.clone();
    bad_version[4] = 99;
    expect_data_err(&bad_version, "unknown version");

    let mut trailing = good.clone();
    trailing.push(0);
    expect_data_err(&trailing, "trailing bytes");

    // Corrupt the first record's prep code (header is 4+4+8+8+4 = 28 bytes,
    // prep sits after the record's 4-byte pixel count).
    let mut bad_prep = good.clone();
    bad_prep[32] = 17;
    expect_data_err(&bad_prep, "prep out of range");
}

#[test]
fn merging_shards_concatenates_in_order() {
    let dir = tempdir().unwrap();
    let records = sample_records(30);
    let full = Dataset::new(records.clone(), 1.0);

    let shard_paths: Vec<_> = (0..3)
        .map(|i| {
            let p = dir.path().join(format!("shard{i}.mlqd"));
            let part = Dataset::new(records[i * 10..(i + 1) * 10].to_vec(), 1.0);
            write_dataset(&p, &part).unwrap();
            p
        })
        .collect();

    let merged = merge_shards(&shard_paths).unwrap();
    let full_path = dir.path().join("full.mlqd");
    let merged_path = dir.path().join("merged.mlqd");
    write_dataset(&full_path, &full).unwrap();
    write_dataset(&merged_path, &merged).unwrap();
    assert_eq!(
        std::fs::read(&full_path).unwrap(),
        std::fs::read(&merged_path).unwrap()
    );

    // Mismatched headers are rejected.
    let odd = dir.path().join("odd.mlqd");
    write_dataset(&odd, &Dataset::new(records[..5].to_vec(), 0.5)).unwrap();
    let mut with_odd = shard_paths.clone();
    with_odd.push(odd);
    assert!(matches!(merge_shards(&with_odd), Err(CliError::Data(_))));
}

#[test]
fn checkpoints_restore_the_exact_weights_and_metadata() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("model.mlqc");
    let params = ModelParams::init(99);
    let meta = CheckpointMeta {
        config_hash: "deadbeef".into(),
        seed: 31,
        best_epoch: 412,
        best_val_loss: 3.25e-4,
        full_val_loss: 3.5e-4,
    };
    write_checkpoint(&path, &params, &meta).unwrap();
    let (restored, meta_back) = read_checkpoint(&path).unwrap();
    assert_eq!(meta_back, meta);
    for (a, b) in params.tensors().iter().zip(restored.tensors()) {
        assert_eq!(a, &b, "weights must restore bit-exactly");
    }
}

#[test]
fn checkpoint_corruption_is_detected() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("model.mlqc");
    write_checkpoint(
        &path,
        &ModelParams::zeros(),
        &CheckpointMeta {
            config_hash: String::new(),
            seed: 0,
            best_epoch: 0,
            best_val_loss: 0.0,
            full_val_loss: 0.0,
        },
    )
    .unwrap();
    let good = std::fs::read(&path).unwrap();

    let bad = dir.path().join("bad.mlqc");
    std::fs::write(&bad, &good[..good.len() - 8]).unwrap();
    assert!(matches!(read_checkpoint(&bad), Err(CliError::Data(_))));

    let mut trailing = good.clone();
    trailing.extend_from_slice(&[0; 8]);
    std::fs::write(&bad, &trailing).unwrap();
    assert!(matches!(read_checkpoint(&bad), Err(CliError::Data(_))));

    let mut wrong_magic = good;
    wrong_magic[0] = b'Z';
    std::fs::write(&bad, &wrong_magic).unwrap();
    assert!(matches!(read_checkpoint(&bad), Err(CliError::Data(_))));
}
