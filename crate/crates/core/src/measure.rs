//! The unique invariant measure of a validated system, estimated through the
//! exact frequency ratios `P_{l,k}(n,m)/h_l(n)`.
//!
//! For fixed `(m,k)` these ratios, taken over the towers `l` of level `n`,
//! span an interval; positivity of the incidence matrices makes the next
//! level's interval a weighted mediant of the previous one, so the hulls are
//! nested. The midpoint is reported once every width drops below the
//! tolerance, and half the largest width is a rigorous error radius. All
//! interval arithmetic is exact rational; nothing is rounded before output.

use crate::model::{ModelError, TowerSystem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_DEPTH_CAP: u32 = 200;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("DepthExhausted: level {level}: width {width:.3e} after depth {depth} (target {target:.3e})")]
    DepthExhausted {
        level: u32,
        depth: u32,
        width: f64,
        target: f64,
    },
    #[error("NonContraction: frequency intervals escaped their hull at level {0}; system data is corrupted")]
    NonContraction(u32),
    #[error("LevelMismatch: estimates at levels {0} and {1} are not consecutive")]
    LevelMismatch(u32, u32),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl MeasureError {
    pub fn code(&self) -> &'static str {
        match self {
            MeasureError::DepthExhausted { .. } => "DepthExhausted",
            MeasureError::NonContraction(_) => "NonContraction",
            MeasureError::LevelMismatch(..) => "LevelMismatch",
            MeasureError::Model(e) => e.code(),
        }
    }
}

/// Base-measure vector at one level with a certified absolute error radius.
#[derive(Debug, Clone)]
pub struct MeasureEstimate {
    pub level: u32,
    /// Interval midpoints approximating the base measures of the level.
    pub values: Vec<BigRational>,
    /// Every true value lies within this radius of the reported one.
    pub error_radius: BigRational,
    /// Level whose frequency ratios produced the estimate.
    pub depth_used: u32,
}

impl MeasureEstimate {
    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn radius_f64(&self) -> f64 {
        self.error_radius.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_exact(&self) -> bool {
        self.error_radius.is_zero()
    }
}

pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    BigRational::from_float(x)
}

/// Estimate the base measures at level `m` to absolute tolerance `tol`.
pub fn invariant_measure(
    sys: &TowerSystem,
    m: u32,
    tol: f64,
) -> Result<MeasureEstimate, MeasureError> {
    let tol = rational_from_f64(tol)
        .filter(|t| !t.is_negative())
        .ok_or_else(|| ModelError::BadParameter(format!("bad tolerance {tol}")))?;
    invariant_measure_exact(sys, m, &tol, DEFAULT_DEPTH_CAP)
}

/// As [`invariant_measure`] with an exact rational tolerance and an explicit
/// cap on how many levels past `m` may be materialized.
pub fn invariant_measure_exact(
    sys: &TowerSystem,
    m: u32,
    tol: &BigRational,
    depth_cap: u32,
) -> Result<MeasureEstimate, MeasureError> {
    assert!(m >= 1, "measure levels start at 1");
    let c_m = sys.towers_at(m)?;
    let mut product = sys.matrix_at(m + 1)?; // P(m+1, m)
    let mut hull: Option<Vec<(BigRational, BigRational)>> = None;
    let mut n = m + 1;
    loop {
        let heights = sys.heights(n)?;
        let c_n = heights.len();
        let mut intervals = Vec::with_capacity(c_m);
        for k in 0..c_m {
            let mut lo: Option<BigRational> = None;
            let mut hi: Option<BigRational> = None;
            for l in 0..c_n {
                let ratio = BigRational::new(product.get(l, k).clone(), heights[l].clone());
                if lo.as_ref().map_or(true, |v| ratio < *v) {
                    lo = Some(ratio.clone());
                }
                if hi.as_ref().map_or(true, |v| ratio > *v) {
                    hi = Some(ratio);
                }
            }
            intervals.push((lo.unwrap(), hi.unwrap()));
        }
        if let Some(prev) = &hull {
            for (k, (lo, hi)) in intervals.iter().enumerate() {
                if *lo < prev[k].0 || *hi > prev[k].1 {
                    return Err(MeasureError::NonContraction(n));
                }
            }
        }
        let max_width = intervals
            .iter()
            .map(|(lo, hi)| hi - lo)
            .max()
            .expect("at least one tower");
        if max_width <= *tol {
            let values = intervals
                .iter()
                .map(|(lo, hi)| (lo + hi) / BigRational::from(BigInt::from(2)))
                .collect();
            return Ok(MeasureEstimate {
                level: m,
                values,
                error_radius: max_width / BigRational::from(BigInt::from(2)),
                depth_used: n,
            });
        }
        hull = Some(intervals);
        if n - m >= depth_cap {
            return Err(MeasureError::DepthExhausted {
                level: m,
                depth: n - m,
                width: max_width.to_f64().unwrap_or(f64::NAN),
                target: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        n += 1;
        match sys.matrix_at(n) {
            Ok(next) => product = next.mul(&product),
            Err(ModelError::LevelUnavailable(_)) => {
                return Err(MeasureError::DepthExhausted {
                    level: m,
                    depth: n - 1 - m,
                    width: max_width.to_f64().unwrap_or(f64::NAN),
                    target: tol.to_f64().unwrap_or(f64::NAN),
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Outcome of checking the measure identities on a pair of estimates at
/// consecutive levels.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// refinement identity: values(m) against the level-(m+1) matrix
    pub b1_pass: bool,
    pub b1_max_residual: f64,
    /// normalization: heights dotted with values sum to 1
    pub b2_pass: bool,
    pub b2_max_residual: f64,
    /// mass lower bound: h_k * value_k >= 1 / padded recurrence constant
    pub lemma3_pass: bool,
    pub lemma3_min_margin: f64,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.b1_pass && self.b2_pass && self.lemma3_pass
    }
}

/// Verify the refinement, normalization, and mass lower-bound identities for
/// estimates at levels `m` and `m+1` of the same system.
pub fn check_measure_identities(
    sys: &TowerSystem,
    est: &MeasureEstimate,
    deeper: &MeasureEstimate,
) -> Result<IdentityReport, MeasureError> {
    if deeper.level != est.level + 1 {
        return Err(MeasureError::LevelMismatch(est.level, deeper.level));
    }
    let m = est.level;
    let matrix = sys.matrix_at(m + 1)?;

    let mut b1_pass = true;
    let mut b1_max_residual = 0.0f64;
    for k in 0..est.values.len() {
        let mut combined = BigRational::zero();
        let mut colsum = BigInt::zero();
        for l in 0..deeper.values.len() {
            let entry = matrix.get(l, k);
            combined += BigRational::from(entry.clone()) * &deeper.values[l];
            colsum += entry;
        }
        let residual = (&est.values[k] - combined).abs();
        let bound = &est.error_radius + BigRational::from(colsum) * &deeper.error_radius;
        if residual > bound {
            b1_pass = false;
        }
        b1_max_residual = b1_max_residual.max(residual.to_f64().unwrap_or(f64::NAN));
    }

    let mut b2_pass = true;
    let mut b2_max_residual = 0.0f64;
    for e in [est, deeper] {
        let h = sys.heights(e.level)?;
        let total: BigRational = h
            .iter()
            .zip(&e.values)
            .map(|(hk, v)| BigRational::from(hk.clone()) * v)
            .sum();
        let residual = (total - BigRational::one()).abs();
        let hmax = h.iter().max().unwrap().clone();
        let bound =
            BigRational::from(BigInt::from(h.len()) * hmax) * &e.error_radius;
        if residual > bound {
            b2_pass = false;
        }
        b2_max_residual = b2_max_residual.max(residual.to_f64().unwrap_or(f64::NAN));
    }

    let lr = sys.lr_constant(deeper.depth_used.max(2))?;
    let l_padded = lr.padded();
    let mut lemma3_pass = true;
    let mut lemma3_min_margin = f64::INFINITY;
    for e in [est, deeper] {
        let h = sys.heights(e.level)?;
        for (hk, v) in h.iter().zip(&e.values) {
            let floor = (BigRational::from(hk.clone()) * &l_padded).recip();
            let margin = v + &e.error_radius - floor;
            if margin.is_negative() {
                lemma3_pass = false;
            }
            lemma3_min_margin = lemma3_min_margin.min(margin.to_f64().unwrap_or(f64::NAN));
        }
    }

    Ok(IdentityReport {
        b1_pass,
        b1_max_residual,
        b2_pass,
        b2_max_residual,
        lemma3_pass,
        lemma3_min_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gallery, GallerySpec};

    fn fib() -> TowerSystem {
        gallery(&GallerySpec::Fibonacci).unwrap()
    }

    #[test]
    fn odometer_measure_is_exact() {
        let sys = gallery(&GallerySpec::Odometer { base: 2 }).unwrap();
        let est = invariant_measure(&sys, 3, 0.0).unwrap();
        assert!(est.is_exact());
        assert_eq!(est.values, vec![BigRational::new(BigInt::from(1), BigInt::from(4))]);
    }

    #[test]
    fn fibonacci_measure_level1() {
        // oracle: dominant left eigenvector of [[2,1],[1,1]] normalized so
        // mu1 + mu2 = 1, i.e. ((sqrt5-1)/2, (3-sqrt5)/2)
        let mu1 = (5f64.sqrt() - 1.0) / 2.0;
        let mu2 = 1.0 - mu1;
        assert!((mu1 - 0.618_033_988_7).abs() < 1e-9);
        assert!((mu2 - 0.381_966_011_3).abs() < 1e-9);

        let est = invariant_measure(&fib(), 1, 1e-10).unwrap();
        let v = est.values_f64();
        assert!((v[0] - mu1).abs() < 1e-9);
        assert!((v[1] - mu2).abs() < 1e-9);
        assert!(est.radius_f64() <= 5e-11);
    }

    #[test]
    fn fibonacci_measure_level2() {
        let est = invariant_measure(&fib(), 2, 1e-10).unwrap();
        let v = est.values_f64();
        assert!((v[0] - 0.236_067_9).abs() < 1e-6);
        assert!((v[1] - 0.145_898_0).abs() < 1e-6);
        assert!((3.0 * v[0] + 2.0 * v[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identities_hold_for_fibonacci() {
        let sys = fib();
        let e1 = invariant_measure(&sys, 1, 1e-10).unwrap();
        let e2 = invariant_measure(&sys, 2, 1e-10).unwrap();
        let report = check_measure_identities(&sys, &e1, &e2).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(report.b1_max_residual < 1e-9);
    }

    #[test]
    fn identities_exact_for_odometer() {
        let sys = gallery(&GallerySpec::Odometer { base: 3 }).unwrap();
        for m in 1..=3 {
            let e1 = invariant_measure(&sys, m, 1e-10).unwrap();
            let e2 = invariant_measure(&sys, m + 1, 1e-10).unwrap();
            let report = check_measure_identities(&sys, &e1, &e2).unwrap();
            assert!(report.all_pass());
            assert_eq!(report.b1_max_residual, 0.0);
            assert_eq!(report.b2_max_residual, 0.0);
        }
    }

    #[test]
    fn perturbed_estimate_fails_b2() {
        let sys = fib();
        let mut e1 = invariant_measure(&sys, 1, 1e-10).unwrap();
        let e2 = invariant_measure(&sys, 2, 1e-10).unwrap();
        e1.values[0] += BigRational::new(BigInt::from(1), BigInt::from(100));
        let report = check_measure_identities(&sys, &e1, &e2).unwrap();
        assert!(!report.b2_pass);
        // height 1 at level 1, so the residual is the perturbation itself
        assert!((report.b2_max_residual - 0.01).abs() < 1e-6);
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let sys = fib();
        let e1 = invariant_measure(&sys, 1, 1e-8).unwrap();
        let e3 = invariant_measure(&sys, 3, 1e-8).unwrap();
        assert!(matches!(
            check_measure_identities(&sys, &e1, &e3),
            Err(MeasureError::LevelMismatch(1, 3))
        ));
    }

    #[test]
    fn estimates_at_different_tolerances_agree() {
        let sys = fib();
        for (t1, t2) in [(1e-4, 1e-8), (1e-6, 1e-12)] {
            let a = invariant_measure(&sys, 1, t1).unwrap();
            let b = invariant_measure(&sys, 1, t2).unwrap();
            for (x, y) in a.values_f64().iter().zip(b.values_f64().iter()) {
                assert!((x - y).abs() <= t1 + t2);
            }
            assert!(b.depth_used >= a.depth_used);
        }
    }

    #[test]
    fn finite_description_exhausts() {
        use crate::model::{validate_system, SystemDescription};
        let desc = SystemDescription {
            name: "short".into(),
            levels: vec![
                vec![vec![1], vec![1]],
                vec![vec![1, 1, 2], vec![1, 2]],
                vec![vec![1, 1, 2], vec![1, 2]],
            ],
            tail: None,
            gallery: None,
        };
        let sys = validate_system(&desc).unwrap();
        let err = invariant_measure(&sys, 1, 1e-30).unwrap_err();
        assert_eq!(err.code(), "DepthExhausted");
    }

    #[test]
    fn rank_one_level_collapses_to_exact_values() {
        let sys = gallery(&GallerySpec::Rank1Interleaved { period: 2 }).unwrap();
        let est = invariant_measure(&sys, 1, 1e-10).unwrap();
        assert!(est.is_exact());
    }
}
