use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::config::check_split;
use crate::error::TrainError;

/// Shuffles `records` deterministically from `seed` and partitions them into
/// train / validation / test sets with sizes `⌊n·f⌋` for the first two
/// fractions and the remainder as test, so 100 records at (0.75, 0.15, 0.10)
/// give exactly (75, 15, 10).
pub fn split_dataset<T>(
    mut records: Vec<T>,
    split: (f64, f64, f64),
    seed: u64,
) -> Result<(Vec<T>, Vec<T>, Vec<T>), TrainError> {
    check_split(split)?;
    let n = records.len();
    let n_train = (n as f64 * split.0).floor() as usize;
    let n_val = (n as f64 * split.1).floor() as usize;
    let n_test = n - n_train - n_val;
    if n_train == 0 || n_val == 0 || n_test == 0 {
        return Err(TrainError::DegenerateSplit {
            n,
            train: n_train,
            val: n_val,
            test: n_test,
        });
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    records.shuffle(&mut rng);
    let mut rest = records.split_off(n_train);
    let test = rest.split_off(n_val);
    Ok((records, rest, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hundred_records_split_75_15_10() {
        let (train, val, test) =
            split_dataset((0..100).collect(), (0.75, 0.15, 0.10), 7).unwrap();
        assert_eq!((train.len(), val.len(), test.len()), (75, 15, 10));
    }

    #[test]
    fn the_partition_is_a_permutation_of_the_input() {
        let (train, val, test) =
            split_dataset((0..137).collect(), (0.75, 0.15, 0.10), 3).unwrap();
        let mut all: Vec<i32> = train.into_iter().chain(val).chain(test).collect();
        all.sort_unstable();
        assert_eq!(all, (0..137).collect::<Vec<_>>());
    }

    #[test]
    fn the_same_seed_reproduces_the_partition_and_another_seed_changes_it() {
        let a = split_dataset((0..60).collect::<Vec<i32>>(), (0.75, 0.15, 0.10), 11).unwrap();
        let b = split_dataset((0..60).collect::<Vec<i32>>(), (0.75, 0.15, 0.10), 11).unwrap();
        let c = split_dataset((0..60).collect::<Vec<i32>>(), (0.75, 0.15, 0.10), 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn too_few_records_are_rejected() {
        assert!(matches!(
            split_dataset((0..5).collect::<Vec<i32>>(), (0.75, 0.15, 0.10), 0),
            Err(TrainError::DegenerateSplit { .. })
        ));
    }
}
