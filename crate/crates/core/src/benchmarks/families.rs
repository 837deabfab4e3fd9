use crate::error::Result;
use crate::query::{ControlSetFamily, InputDistribution};

fn zero_based(sets: &[&[usize]]) -> Vec<Vec<usize>> {
    sets.iter().map(|s| s.iter().map(|v| v - 1).collect()).collect()
}

/// Seven sets over the 12-D synthetic embeddings, cheapest first.
pub fn synthetic_family(distribution: InputDistribution) -> Result<ControlSetFamily> {
    let sets: [&[usize]; 7] = [
        &[1, 2, 3],
        &[4, 5, 6],
        &[7, 8, 9],
        &[10, 11, 12],
        &[1, 2, 3, 4, 5, 6],
        &[7, 8, 9, 10, 11, 12],
        &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
    ];
    ControlSetFamily::with_shared_distribution(12, zero_based(&sets), distribution)
}

/// Seven two-variable sets over the 5-D airfoil inputs.
pub fn airfoil_family(distribution: InputDistribution) -> Result<ControlSetFamily> {
    let sets: [&[usize]; 7] = [&[4, 5], &[2, 5], &[1, 4], &[2, 3], &[3, 5], &[1, 2], &[3, 4]];
    ControlSetFamily::with_shared_distribution(5, zero_based(&sets), distribution)
}
