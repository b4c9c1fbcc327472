//! Weight assignment for a fixed collection of increments.
//!
//! With nondecreasing weights `lambda`, the maximum of
//! `sum_i a_{sigma(i)} / lambda_i` over orderings pairs the largest
//! increment with the smallest weight: sort descending. The exhaustive
//! permutation oracle validates this on every small instance.

use crate::sequences::LambdaSequence;

/// Maximum of `sum a_(i) / lambda_i` over orderings of the collection.
pub fn optimal_assignment(increments: &[f64], lambda: &LambdaSequence) -> f64 {
    let (value, _) = assignment_with_order(increments, lambda, increments.len());
    value
}

/// Sorted-descending assignment truncated to the best `cap` increments;
/// returns the value and the indices of the used increments in rank order.
pub(crate) fn assignment_with_order(
    increments: &[f64],
    lambda: &LambdaSequence,
    cap: usize,
) -> (f64, Vec<usize>) {
    let mut idx: Vec<usize> = (0..increments.len()).collect();
    idx.sort_by(|&a, &b| {
        increments[b]
            .abs()
            .total_cmp(&increments[a].abs())
            .then(a.cmp(&b))
    });
    idx.truncate(cap);
    let weights = lambda.weights_prefix(idx.len());
    idx.truncate(weights.len());
    let mut total = 0.0;
    for (rank, &i) in idx.iter().enumerate() {
        total += increments[i].abs() * weights[rank];
    }
    (total, idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn worked_example() {
        let h = LambdaSequence::harmonic();
        let v = optimal_assignment(&[0.9, 0.4, 0.7], &h);
        assert_relative_eq!(v, 0.9 + 0.7 / 2.0 + 0.4 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn empty_and_ties() {
        let h = LambdaSequence::harmonic();
        assert_eq!(optimal_assignment(&[], &h), 0.0);
        let c = 0.37;
        assert_relative_eq!(
            optimal_assignment(&[c, c, c], &h),
            c * (1.0 + 0.5 + 1.0 / 3.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn cap_keeps_largest() {
        let h = LambdaSequence::harmonic();
        let (v, order) = assignment_with_order(&[0.1, 0.9, 0.5], &h, 2);
        assert_eq!(order, vec![1, 2]);
        assert_relative_eq!(v, 0.9 + 0.25, max_relative = 1e-15);
    }

    #[test]
    fn truncates_at_table_end() {
        let t = LambdaSequence::new(crate::sequences::LambdaKind::Table {
            values: vec![2.0, 4.0],
            extend: crate::sequences::TableExtend::Reject,
        })
        .unwrap();
        let v = optimal_assignment(&[1.0, 1.0, 1.0], &t);
        assert_relative_eq!(v, 0.5 + 0.25, max_relative = 1e-15);
    }
}
