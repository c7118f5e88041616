//! Accuracy metrics against simulation ground truth.

use std::collections::BTreeMap;

use mlqoc_device::PulseRecord;
use mlqoc_model::{predict, ModelParams};

use crate::error::TrainError;

/// Mean squared shot noise of the labels: `mean((label − truth)²)`. This is
/// the loss a perfect predictor would incur, so it lower-bounds (up to
/// statistical fluctuation) the prediction loss of any trained model.
pub fn noise_floor(records: &[PulseRecord]) -> Result<f64, TrainError> {
    if records.is_empty() {
        return Err(TrainError::EmptyRecords("noise floor"));
    }
    let mut sum = 0.0;
    for (index, r) in records.iter().enumerate() {
        if !r.truth.is_finite() {
            return Err(TrainError::MissingTruth { index });
        }
        sum += (r.label - r.truth) * (r.label - r.truth);
    }
    Ok(sum / records.len() as f64)
}

/// One cell of the duration/axis error table.
#[derive(Debug, Clone, Copy, Default)]
pub struct MseCell {
    /// Mean squared error over the cell's records.
    pub mse: f64,
    /// Number of records in the cell.
    pub n: usize,
}

/// Prediction error against exact probabilities, resolved by pulse duration.
#[derive(Debug, Clone)]
pub struct MseTable {
    /// Error per (duration in pixels, measurement axis).
    pub by_duration_axis: BTreeMap<(usize, u8), MseCell>,
    /// Error per duration, pooled over axes.
    pub by_duration: BTreeMap<usize, MseCell>,
    /// Median of the pooled per-duration errors.
    pub median_mse: f64,
    /// Pooled error over the whole record set.
    pub overall_mse: f64,
}

/// Aggregates `(duration, axis, predicted, truth)` squared errors into the
/// duration/axis table. Split out from [`mse_vs_duration`] so the grouping
/// and median arithmetic can be checked independently of any model.
pub fn mse_table(entries: &[(usize, u8, f64, f64)]) -> Result<MseTable, TrainError> {
    if entries.is_empty() {
        return Err(TrainError::EmptyRecords("duration error table"));
    }
    let mut by_duration_axis: BTreeMap<(usize, u8), (f64, usize)> = BTreeMap::new();
    let mut by_duration: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let mut total = (0.0, 0usize);
    for &(duration, axis, predicted, truth) in entries {
        let sq = (predicted - truth) * (predicted - truth);
        let cell = by_duration_axis.entry((duration, axis)).or_default();
        cell.0 += sq;
        cell.1 += 1;
        let pooled = by_duration.entry(duration).or_default();
        pooled.0 += sq;
        pooled.1 += 1;
        total.0 += sq;
        total.1 += 1;
    }

    let finish =
        |&(sum, n): &(f64, usize)| MseCell { mse: sum / n as f64, n };
    let by_duration: BTreeMap<usize, MseCell> =
        by_duration.iter().map(|(&d, c)| (d, finish(c))).collect();

    let mut pooled: Vec<f64> = by_duration.values().map(|c| c.mse).collect();
    pooled.sort_by(f64::total_cmp);
    let mid = pooled.len() / 2;
    let median_mse = if pooled.len() % 2 == 1 {
        pooled[mid]
    } else {
        0.5 * (pooled[mid - 1] + pooled[mid])
    };

    Ok(MseTable {
        by_duration_axis: by_duration_axis
            .iter()
            .map(|(&k, c)| (k, finish(c)))
            .collect(),
        by_duration,
        median_mse,
        overall_mse: total.0 / total.1 as f64,
    })
}

/// Squared error of the model's final-pixel probability against the exact
/// simulated probability, grouped by pulse duration and measurement axis,
/// with the median taken over durations.
pub fn mse_vs_duration(
    params: &ModelParams,
    records: &[PulseRecord],
) -> Result<MseTable, TrainError> {
    if records.is_empty() {
        return Err(TrainError::EmptyRecords("duration error table"));
    }
    let mut entries = Vec::with_capacity(records.len());
    for (index, r) in records.iter().enumerate() {
        if !r.truth.is_finite() {
            return Err(TrainError::MissingTruth { index });
        }
        let p = predict(params, r.prep, &r.pulse.s_i, &r.pulse.s_q)?;
        entries.push((
            r.pulse.n_pixels(),
            r.axis,
            p.final_probs()[usize::from(r.axis)],
            r.truth,
        ));
    }
    mse_table(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn a_perfect_predictor_yields_an_all_zero_table() {
        let entries: Vec<(usize, u8, f64, f64)> = (0..30)
            .map(|i| (5 + i % 6, (i % 3) as u8, 0.1 * (i % 10) as f64, 0.1 * (i % 10) as f64))
            .collect();
        let t = mse_table(&entries).unwrap();
        assert_eq!(t.median_mse, 0.0);
        assert_eq!(t.overall_mse, 0.0);
        assert!(t.by_duration_axis.values().all(|c| c.mse == 0.0));
    }

    #[test]
    fn grouping_and_median_match_a_hand_computation() {
        // Duration 5: errors 0.1² and 0.3² → mse 0.05; duration 7: error 0.2²
        // → mse 0.04; duration 9: 0 → median of {0.05, 0.04, 0.0} = 0.04.
        let entries = [
            (5usize, 0u8, 0.6, 0.5),
            (5, 1, 0.1, 0.4),
            (7, 0, 0.9, 0.7),
            (9, 2, 0.3, 0.3),
        ];
        let t = mse_table(&entries).unwrap();
        assert_relative_eq!(t.by_duration[&5].mse, 0.05, max_relative = 1e-12);
        assert_eq!(t.by_duration[&5].n, 2);
        assert_relative_eq!(t.by_duration[&7].mse, 0.04, max_relative = 1e-12);
        assert_relative_eq!(t.median_mse, 0.04, max_relative = 1e-12);
        assert_relative_eq!(
            t.overall_mse,
            (0.01 + 0.09 + 0.04) / 4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(t.by_duration_axis[&(5, 1)].mse, 0.09, max_relative = 1e-12);
    }

    #[test]
    fn noise_floor_averages_squared_label_deviations() {
        let mk = |label: f64, truth: f64| PulseRecord {
            pulse: mlqoc_pulse::PixelPulse::zeros(6, 1.0),
            prep: 0,
            axis: 2,
            n_shots: 32,
            label,
            truth,
        };
        let records = vec![mk(0.40625, 0.5), mk(0.5625, 0.5), mk(0.5, 0.5)];
        let sq = |x: f64| x * x;
        assert_relative_eq!(
            noise_floor(&records).unwrap(),
            (sq(0.09375) + sq(0.0625) + 0.0) / 3.0,
            max_relative = 1e-12
        );
        assert!(noise_floor(&[]).is_err());
        assert!(matches!(
            noise_floor(&[mk(0.5, f64::NAN)]),
            Err(TrainError::MissingTruth { index: 0 })
        ));
        let exact = vec![mk(0.3, 0.3), mk(0.8, 0.8)];
        assert_eq!(noise_floor(&exact).unwrap(), 0.0);
    }
}
