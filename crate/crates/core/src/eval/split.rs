use std::collections::{BTreeSet, HashSet};

use super::EvalError;
use crate::rng::SeededRng;

/// Item indices and study IDs on each side of a study-level split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StudySplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub train_studies: Vec<String>,
    pub test_studies: Vec<String>,
}

/// Splits items by study so no study straddles the two sides.
///
/// Distinct study IDs are sorted, shuffled with `seed`, and the first
/// `round(n_studies * train_fraction)` (clamped to `1..n_studies`) go to
/// training. Returned index lists are ascending.
pub fn study_split<S: AsRef<str>>(
    study_ids: &[S],
    train_fraction: f64,
    seed: u64,
) -> Result<StudySplit, EvalError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(EvalError::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut studies: Vec<&str> = study_ids
        .iter()
        .map(AsRef::as_ref)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if studies.len() < 2 {
        return Err(EvalError::TooFewStudies(studies.len()));
    }
    SeededRng::new(seed).shuffle(&mut studies);
    let n = studies.len();
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let train_set: HashSet<&str> = studies[..n_train].iter().copied().collect();

    let (train, test) = (0..study_ids.len()).partition(|&i| train_set.contains(study_ids[i].as_ref()));
    let mut train_studies: Vec<String> = studies[..n_train].iter().map(|s| s.to_string()).collect();
    let mut test_studies: Vec<String> = studies[n_train..].iter().map(|s| s.to_string()).collect();
    train_studies.sort();
    test_studies.sort();
    Ok(StudySplit {
        train,
        test,
        train_studies,
        test_studies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_studies_seventy_percent() {
        let ids: Vec<String> = (0..10).flat_map(|s| vec![format!("s{s}"); 3]).collect();
        let split = study_split(&ids, 0.7, 1).unwrap();
        assert_eq!(split.train_studies.len(), 7);
        assert_eq!(split.test_studies.len(), 3);
        assert_eq!(split.train.len() + split.test.len(), 30);
        for i in &split.train {
            assert!(!split.test_studies.contains(&ids[*i]));
        }
    }

    #[test]
    fn cohort_of_265_studies() {
        let ids: Vec<String> = (0..265).map(|s| format!("study-{s}")).collect();
        let split = study_split(&ids, 0.7, 0).unwrap();
        assert_eq!((split.train_studies.len(), split.test_studies.len()), (186, 79));
    }

    #[test]
    fn single_study_rejected() {
        let ids = vec!["only"; 5];
        assert!(matches!(study_split(&ids, 0.5, 0), Err(EvalError::TooFewStudies(1))));
    }

    #[test]
    fn bad_fraction() {
        let ids = ["a", "b"];
        assert!(study_split(&ids, 0.0, 0).is_err());
        assert!(study_split(&ids, 1.0, 0).is_err());
        let s = study_split(&ids, 0.99, 0).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (1, 1));
    }

    #[test]
    fn input_order_does_not_matter() {
        let a = ["x", "y", "z", "w", "x"];
        let b = ["w", "z", "y", "x", "x"];
        let sa = study_split(&a, 0.5, 7).unwrap();
        let sb = study_split(&b, 0.5, 7).unwrap();
        assert_eq!(sa.train_studies, sb.train_studies);
    }
}
