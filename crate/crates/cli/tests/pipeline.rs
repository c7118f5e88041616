//! End-to-end checks of the `mlqoc` binary: reproducible dataset generation,
//! shard equivalence, a miniature training run, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use mlqoc_cli::checkpoint::read_checkpoint;
use mlqoc_cli::dataset::read_dataset;
use tempfile::tempdir;

fn mlqoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlqoc"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn assert_success(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed with {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
}

/// Overrides making a run small enough for a test while still exercising the
/// full pipeline.
const TINY: &[&str] = &[
    "--set",
    "data.n_pulses=60",
    "--set",
    "data.duration_pixels=[5,12]",
];

fn gen(path: &Path, extra: &[&str]) {
    let mut args = vec!["gen-data"];
    args.extend_from_slice(TINY);
    args.extend_from_slice(extra);
    let out_s = path.to_str().unwrap().to_string();
    args.push("--out");
    args.push(&out_s);
    assert_success(&mlqoc(&args), "gen-data");
}

#[test]
fn dataset_generation_is_bitwise_reproducible() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.mlqd");
    let b = dir.path().join("b.mlqd");
    gen(&a, &[]);
    gen(&b, &[]);
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());

    // A different seed changes the content.
    let c = dir.path().join("c.mlqd");
    gen(&c, &["--set", "data.seed=2"]);
    assert_ne!(bytes_a, std::fs::read(&c).unwrap());

    let ds = read_dataset(&a).unwrap();
    assert_eq!(ds.records.len(), 60);
    assert!(ds.has_truth);
    assert!(ds.records.iter().all(|r| r.n_shots == 32));
    // 32-shot labels are exact multiples of 1/32.
    assert!(ds.records.iter().all(|r| (r.label * 32.0).fract() == 0.0));
}

#[test]
fn sharded_generation_merges_into_the_unsharded_file() {
    let dir = tempdir().unwrap();
    let full = dir.path().join("full.mlqd");
    gen(&full, &[]);

    let shard_paths: Vec<_> = (0..3)
        .map(|i| {
            let p = dir.path().join(format!("s{i}.mlqd"));
            gen(
                &p,
                &[
                    "--shard-index",
                    &i.to_string(),
                    "--shard-count",
                    "3",
                ],
            );
            p
        })
        .collect();

    let merged = dir.path().join("merged.mlqd");
    let mut args = vec!["merge-shards", "--out", merged.to_str().unwrap()];
    let shard_strs: Vec<String> =
        shard_paths.iter().map(|p| p.to_str().unwrap().to_string()).collect();
    args.extend(shard_strs.iter().map(|s| s.as_str()));
    assert_success(&mlqoc(&args), "merge-shards");

    assert_eq!(
        std::fs::read(&full).unwrap(),
        std::fs::read(&merged).unwrap(),
        "sharded generation must reproduce the unsharded dataset bit for bit"
    );
}

#[test]
fn a_miniature_training_run_writes_all_artifacts() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("tiny.mlqd");
    gen(&data, &[]);

    let out_dir = dir.path().join("run");
    let out = mlqoc(&[
        "train",
        "--set",
        "train.max_epochs=2",
        "--set",
        "train.initial_batch=16",
        "--set",
        "train.val_subsample=8",
        "--data",
        data.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out, "train");

    let (params, meta) = read_checkpoint(&out_dir.join("model.mlqc")).unwrap();
    assert!(meta.best_epoch >= 1 && meta.best_epoch <= 2);
    assert!(meta.best_val_loss.is_finite());
    assert!(params.tensors().iter().all(|t| t.iter().all(|x| x.is_finite())));

    let history = std::fs::read_to_string(out_dir.join("history.csv")).unwrap();
    let mut lines = history.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert_eq!(
        lines.next().unwrap(),
        "epoch,train_loss,val_loss,l_pred,l_posit,l_prep,batch_size"
    );
    assert_eq!(lines.count(), 2, "one row per epoch");

    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.contains("test_mse"));
    assert!(summary.contains("noise_floor_test"));

    let mse = std::fs::read_to_string(out_dir.join("mse_vs_duration.csv")).unwrap();
    assert!(mse.lines().nth(1).unwrap().starts_with("duration_pixels,axis,n,mse"));
}

#[test]
fn failures_map_to_the_documented_exit_codes() {
    let dir = tempdir().unwrap();

    // Unknown configuration key: exit 2.
    let out = mlqoc(&[
        "gen-data",
        "--set",
        "data.bogus=1",
        "--out",
        dir.path().join("x.mlqd").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "config errors exit 2");

    // Missing dataset: exit 3.
    let out = mlqoc(&[
        "train",
        "--data",
        dir.path().join("absent.mlqd").to_str().unwrap(),
        "--out-dir",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "data errors exit 3");

    // Corrupt dataset: exit 3 with a complaint naming the file.
    let bad = dir.path().join("bad.mlqd");
    std::fs::write(&bad, b"MLQDgarbage").unwrap();
    let out = mlqoc(&[
        "train",
        "--data",
        bad.to_str().unwrap(),
        "--out-dir",
        dir.path().join("run2").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.mlqd"));
}
