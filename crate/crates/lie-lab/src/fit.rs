//! Log-log slope fitting for convergence-rate experiments.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the least-squares fit in log space.
    pub residual: f64,
    pub used_rows: usize,
}

/// Errors below this floor are treated as exact zeros and excluded.
pub const ERR_FLOOR: f64 = 1e-9;

/// Ordinary least squares on `(log eps, log err)`; rows with `err` below the
/// floor or nonpositive `eps` are excluded. Requires at least four usable
/// rows.
pub fn fit_exponent(rows: &[(f64, f64)]) -> Result<Fit, String> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(e, err)| *e > 0.0 && *err >= ERR_FLOOR)
        .map(|(e, err)| (e.ln(), err.ln()))
        .collect();
    if usable.len() < 4 {
        return Err(format!(
            "need at least 4 usable rows for a slope fit, got {}",
            usable.len()
        ));
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|(x, _)| x).sum();
    let sy: f64 = usable.iter().map(|(_, y)| y).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 {
        return Err("epsilon values are degenerate".into());
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = usable
        .iter()
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(Fit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        used_rows: usable.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_laws() {
        let rows: Vec<(f64, f64)> = (1..=6).map(|k| {
            let e = 0.5f64.powi(k);
            (e, e.sqrt())
        })
        .collect();
        let fit = fit_exponent(&rows).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn recovers_slope_and_intercept() {
        let rows: Vec<(f64, f64)> = (1..=8).map(|k| {
            let e = 0.5f64.powi(k);
            (e, 3.0 * e)
        })
        .collect();
        let fit = fit_exponent(&rows).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_rows_are_excluded_by_the_floor() {
        let mut rows: Vec<(f64, f64)> = (1..=5).map(|k| {
            let e = 0.5f64.powi(k);
            (e, e)
        })
        .collect();
        rows.push((0.25, 0.0));
        let fit = fit_exponent(&rows).unwrap();
        assert_eq!(fit.used_rows, 5);
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let rows = vec![(0.5, 0.1), (0.25, 0.05), (0.125, 0.02)];
        assert!(fit_exponent(&rows).is_err());
    }
}
