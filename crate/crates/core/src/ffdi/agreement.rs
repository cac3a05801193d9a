use serde::{Deserialize, Serialize};

use super::FfdiError;
use crate::domain::FwiClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// The five major classes.
    Major,
    /// All fifteen classes.
    Full15,
}

/// Fraction of aligned positions whose classes agree at `granularity`.
pub fn agreement(a: &[FwiClass], b: &[FwiClass], granularity: Granularity) -> Result<f64, FfdiError> {
    if a.len() != b.len() {
        return Err(FfdiError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(FfdiError::EmptyInput);
    }
    let same = a
        .iter()
        .zip(b)
        .filter(|(x, y)| match granularity {
            Granularity::Major => x.major() == y.major(),
            Granularity::Full15 => x == y,
        })
        .count();
    Ok(same as f64 / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(o: u8) -> FwiClass {
        FwiClass::from_ordinal(o).unwrap()
    }

    #[test]
    fn counting_definition() {
        let a: Vec<FwiClass> = (0..100).map(|i| c(1 + (i % 15) as u8)).collect();
        assert_eq!(agreement(&a, &a, Granularity::Full15).unwrap(), 1.0);
        let other: Vec<FwiClass> = a.iter().map(|x| c(if x.ordinal() > 3 { 1 } else { 15 })).collect();
        assert_eq!(agreement(&a, &other, Granularity::Major).unwrap(), 0.0);
        let mut b = a.clone();
        for x in b.iter_mut().take(4) {
            *x = c(if x.ordinal() == 15 { 1 } else { 15 });
        }
        assert_eq!(agreement(&a, &b, Granularity::Full15).unwrap(), 0.96);
    }

    #[test]
    fn major_granularity_ignores_sub_levels() {
        assert_eq!(agreement(&[c(1)], &[c(3)], Granularity::Major).unwrap(), 1.0);
        assert_eq!(agreement(&[c(1)], &[c(3)], Granularity::Full15).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(agreement(&[c(1)], &[], Granularity::Major), Err(FfdiError::LengthMismatch(1, 0))));
        assert!(matches!(agreement(&[], &[], Granularity::Major), Err(FfdiError::EmptyInput)));
    }
}
