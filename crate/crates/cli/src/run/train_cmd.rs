//! `train`: fit the characterization model to a dataset and report test-set
//! accuracy against the exact simulated probabilities.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use mlqoc_model::ModelParams;
use mlqoc_train::{
    dataset_loss, history_csv, mse_vs_duration, noise_floor, split_dataset, train_with_progress,
};

use crate::checkpoint::{write_checkpoint, CheckpointMeta};
use crate::config::LoadedConfig;
use crate::dataset::read_dataset;
use crate::error::CliError;
use crate::report::{provenance_line, write_csv};

/// Runs training end to end and writes the artifacts into `out_dir`:
/// `model.mlqc`, `history.csv`, `summary.csv`, and (when the dataset carries
/// truth values) `mse_vs_duration.csv`.
pub fn run(cfg: &LoadedConfig, data_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let ds = read_dataset(data_path)?;
    let train_cfg = cfg.study.train.build();
    let provenance = provenance_line(
        &cfg.hash,
        &[("train_seed", train_cfg.seed), ("data_seed", cfg.study.data.seed)],
    );
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let n_total = ds.records.len();
    let (train_r, val_r, test_r) = split_dataset(ds.records, train_cfg.split, train_cfg.seed)?;
    eprintln!(
        "train: {n_total} records split {}/{}/{}, batch {} doubling at {:?}",
        train_r.len(),
        val_r.len(),
        test_r.len(),
        train_cfg.initial_batch,
        train_cfg.doubling_epochs,
    );

    // The history file is written incrementally so a long run can be
    // monitored (and survives an interruption); rows match `history_csv`.
    let history_path = out_dir.join("history.csv");
    let mut history_file = fs::File::create(&history_path)
        .map_err(|e| CliError::io(&history_path, e))?;
    history_file
        .write_all(provenance.as_bytes())
        .and_then(|_| {
            history_file
                .write_all(b"epoch,train_loss,val_loss,l_pred,l_posit,l_prep,batch_size\n")
        })
        .map_err(|e| CliError::io(&history_path, e))?;

    let started = Instant::now();
    let init = ModelParams::init(train_cfg.seed);
    let outcome = train_with_progress(&train_r, &val_r, init, &train_cfg, &mut |s| {
        let _ = writeln!(
            history_file,
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            s.epoch, s.train_loss, s.val_loss, s.train_l_pred, s.train_l_posit, s.train_l_prep,
            s.batch_size
        );
        let _ = history_file.flush();
        eprintln!(
            "epoch {:4}  train {:.6e}  val {:.6e}  pred {:.6e}  batch {}  [{:.0} s]",
            s.epoch,
            s.train_loss,
            s.val_loss,
            s.train_l_pred,
            s.batch_size,
            started.elapsed().as_secs_f64()
        );
    })?;
    drop(history_file);
    // Rewrite canonically (identical content; guards against partial lines).
    fs::write(
        &history_path,
        format!("{provenance}{}", history_csv(&outcome.history)),
    )
    .map_err(|e| CliError::io(&history_path, e))?;

    let meta = CheckpointMeta {
        config_hash: cfg.hash.clone(),
        seed: train_cfg.seed,
        best_epoch: outcome.best_epoch,
        best_val_loss: outcome.best_val_loss,
        full_val_loss: outcome.full_val_loss,
    };
    let model_path = out_dir.join("model.mlqc");
    write_checkpoint(&model_path, &outcome.params, &meta)?;

    // Exact end-of-run losses at the selected weights.
    let train_b = dataset_loss(&outcome.params, &train_r, train_cfg.loss_weights)?;
    let test_b = dataset_loss(&outcome.params, &test_r, train_cfg.loss_weights)?;

    let mut summary_header = String::from(
        "best_epoch,epochs_run,best_val_loss,full_val_loss,train_loss,train_l_pred,test_l_pred",
    );
    let mut summary_row = format!(
        "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
        outcome.best_epoch,
        outcome.history.len(),
        outcome.best_val_loss,
        outcome.full_val_loss,
        train_b.total,
        train_b.l_pred,
        test_b.l_pred,
    );

    if ds.has_truth {
        let floor_train = noise_floor(&train_r)?;
        let floor_test = noise_floor(&test_r)?;
        let table = mse_vs_duration(&outcome.params, &test_r)?;

        let mut rows: Vec<String> = table
            .by_duration
            .iter()
            .map(|(d, c)| format!("{d},,{},{:.17e}", c.n, c.mse))
            .collect();
        rows.extend(
            table
                .by_duration_axis
                .iter()
                .map(|((d, a), c)| format!("{d},{a},{},{:.17e}", c.n, c.mse)),
        );
        write_csv(
            &out_dir.join("mse_vs_duration.csv"),
            &provenance,
            "duration_pixels,axis,n,mse",
            &rows,
        )?;

        summary_header.push_str(",test_mse,test_median_mse,noise_floor_train,noise_floor_test");
        summary_row.push_str(&format!(
            ",{:.17e},{:.17e},{:.17e},{:.17e}",
            table.overall_mse, table.median_mse, floor_train, floor_test
        ));
        println!(
            "test MSE {:.4e} (median over durations {:.4e}), shot-noise floor {:.4e}",
            table.overall_mse, table.median_mse, floor_test
        );
        println!(
            "train loss {:.4e} vs training-set floor {:.4e} (ratio {:.3})",
            train_b.l_pred,
            floor_train,
            train_b.l_pred / floor_train
        );
    } else {
        eprintln!("train: dataset has no truth channel; skipping accuracy-vs-truth reports");
    }
    write_csv(
        &out_dir.join("summary.csv"),
        &provenance,
        &summary_header,
        &[summary_row],
    )?;

    println!(
        "best epoch {} of {} (val {:.6e}); model written to {}",
        outcome.best_epoch,
        outcome.history.len(),
        outcome.best_val_loss,
        model_path.display()
    );
    Ok(())
}
