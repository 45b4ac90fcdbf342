//! Divergence between two traces on the same sampling grid.

use serde::Serialize;

use crate::output::Table;
use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub from: f64,
    pub to: f64,
    pub samples: usize,
    /// Max `|a - b|` per channel present in both traces, in the column order of `a`.
    pub channels: Vec<(String, f64)>,
}

impl Divergence {
    pub fn channel(&self, name: &str) -> Option<f64> {
        self.channels.iter().find(|(c, _)| c == name).map(|(_, v)| *v)
    }
}

/// Per-channel max `|a - b|` over samples with `from <= t <= to`.
pub fn compare(a: &Table, b: &Table, from: f64, to: f64) -> Result<Divergence, LabError> {
    let err = |m: String| Err(LabError::Compare(m));
    let (ta, tb) = match (a.column("t"), b.column("t")) {
        (Some(ta), Some(tb)) => (ta, tb),
        _ => return err("both traces need a `t` column".into()),
    };
    if a.rows.len() != b.rows.len() {
        return err(format!("grid mismatch: {} samples vs {}", a.rows.len(), b.rows.len()));
    }
    for (i, (ra, rb)) in a.rows.iter().zip(&b.rows).enumerate() {
        if (ra[ta] - rb[tb]).abs() > 1e-9 * ra[ta].abs().max(1.0) {
            return err(format!("grid mismatch at sample {i}: t = {} vs {}", ra[ta], rb[tb]));
        }
    }
    let pairs: Vec<(usize, usize)> = a
        .columns
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != ta)
        .filter_map(|(i, c)| b.column(c).map(|j| (i, j)))
        .collect();
    let mut channels: Vec<(String, f64)> = pairs.iter().map(|&(i, _)| (a.columns[i].clone(), 0.0)).collect();
    let mut samples = 0;
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        if ra[ta] < from || ra[ta] > to {
            continue;
        }
        samples += 1;
        for (slot, &(i, j)) in channels.iter_mut().zip(&pairs) {
            let d = (ra[i] - rb[j]).abs();
            if d > slot.1 || d.is_nan() {
                slot.1 = d;
            }
        }
    }
    Ok(Divergence { from, to, samples, channels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cols: &[&str], rows: Vec<Vec<f64>>) -> Table {
        Table { columns: cols.iter().map(|s| s.to_string()).collect(), rows }
    }

    #[test]
    fn windowed_maxima() {
        let a = table(&["t", "e1", "theta_1_2"], vec![vec![0.0, 1.0, 5.0], vec![1.0, 2.0, 5.0], vec![2.0, 3.0, 5.0]]);
        let b = table(&["t", "e1"], vec![vec![0.0, 0.0], vec![1.0, 2.5], vec![2.0, 2.9]]);
        let d = compare(&a, &b, 0.5, 2.0).unwrap();
        assert_eq!(d.samples, 2);
        assert_eq!(d.channels.len(), 1);
        assert_eq!(d.channel("e1"), Some(0.5));
        let self_d = compare(&a, &a, 0.0, 2.0).unwrap();
        assert!(self_d.channels.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = table(&["t", "e1"], vec![vec![0.0, 1.0], vec![1.0, 2.0]]);
        let b = table(&["t", "e1"], vec![vec![0.0, 1.0], vec![1.5, 2.0]]);
        assert!(matches!(compare(&a, &b, 0.0, 2.0), Err(LabError::Compare(_))));
        let c = table(&["t", "e1"], vec![vec![0.0, 1.0]]);
        assert!(compare(&a, &c, 0.0, 2.0).is_err());
    }
}
