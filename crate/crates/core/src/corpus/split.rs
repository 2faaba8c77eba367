use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, Sample};

/// Partitions samples into `(train, test)` by source file so that no
/// recording contributes to both sides.
///
/// The file list is sorted, shuffled with a ChaCha8 stream seeded from
/// `seed`, and the first `round(n * test_fraction)` files (clamped to
/// `1..n`) go to test. Sample order within each side follows the input.
pub fn split_by_file(
    samples: &[Sample],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<Sample>, Vec<Sample>), CorpusError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(test_fraction));
    }
    let files: BTreeSet<&str> = samples.iter().map(|s| s.source_file.as_str()).collect();
    let n = files.len();
    if n < 2 {
        return Err(CorpusError::InsufficientFiles(n));
    }
    let mut files: Vec<&str> = files.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    files.shuffle(&mut rng);
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
    let test_files: BTreeSet<&str> = files[..n_test].iter().copied().collect();

    let (test, train): (Vec<Sample>, Vec<Sample>) = samples
        .iter()
        .cloned()
        .partition(|s| test_files.contains(s.source_file.as_str()));
    Ok((train, test))
}
