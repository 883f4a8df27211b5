//! Pearson chi-squared goodness of fit against fixed reference proportions.

use serde::{Deserialize, Serialize};

use crate::edp::ConfusionDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi2Result {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
///
/// Series expansion of P(a, x) below `x < a + 1`, Lentz continued fraction
/// for Q above.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        (1.0 - sum * log_prefix.exp()).clamp(0.0, 1.0)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        (log_prefix.exp() * h).clamp(0.0, 1.0)
    }
}

/// Upper tail P(X >= stat) of a chi-squared variable with `df` degrees of
/// freedom. `df == 0` gives 1.
pub fn chi2_sf(stat: f64, df: usize) -> f64 {
    if df == 0 || stat <= 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, stat / 2.0)
}

/// Goodness of fit of `observed` counts to reference proportions.
///
/// Cells with zero reference proportion are dropped (they must have zero
/// observed count). With `pool_min_expected`, cells whose expected count is
/// below the threshold are merged into one pseudo-cell first. Degrees of
/// freedom are the remaining cell count minus one; with a single cell the
/// p-value is 1.
pub fn chi2_gof(
    observed: &[u64],
    reference: &[f64],
    pool_min_expected: Option<f64>,
) -> Result<Chi2Result> {
    if observed.len() != reference.len() {
        return Err(Error::Chi2Input(format!(
            "{} observed cells vs {} reference cells",
            observed.len(),
            reference.len()
        )));
    }
    if reference.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Chi2Input(
            "reference proportions must be finite and >= 0".into(),
        ));
    }
    let psum: f64 = reference.iter().sum();
    if (psum - 1.0).abs() > 1e-9 {
        return Err(Error::Chi2Input(format!(
            "reference proportions sum to {psum}"
        )));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::Chi2Input("empty observed sample".into()));
    }
    let nf = n as f64;

    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(observed.len());
    for (&o, &p) in observed.iter().zip(reference) {
        if p == 0.0 {
            if o > 0 {
                return Err(Error::Chi2Input(
                    "observed count in a cell with zero reference proportion".into(),
                ));
            }
            continue;
        }
        cells.push((o as f64, nf * p));
    }

    if let Some(threshold) = pool_min_expected {
        let (small, mut kept): (Vec<_>, Vec<_>) = cells.into_iter().partition(|c| c.1 < threshold);
        if !small.is_empty() {
            let pooled = small
                .iter()
                .fold((0.0, 0.0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
            kept.push(pooled);
        }
        cells = kept;
    }

    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let df = cells.len().saturating_sub(1);
    Ok(Chi2Result {
        statistic,
        df,
        p_value: chi2_sf(statistic, df),
    })
}

/// Tests a subgroup's distribution against a reference distribution over the
/// reference's non-zero cells.
pub fn chi2_vs(
    observed: &ConfusionDistribution,
    reference: &ConfusionDistribution,
    pool_min_expected: Option<f64>,
) -> Result<Chi2Result> {
    let cells = reference.cells();
    let covered: u64 = cells.iter().map(|&(c, _)| observed.count(c)).sum();
    if covered != observed.total() {
        return Err(Error::Chi2Input(
            "observed distribution has codes absent from the reference".into(),
        ));
    }
    let obs: Vec<u64> = cells.iter().map(|&(c, _)| observed.count(c)).collect();
    let props: Vec<f64> = cells
        .iter()
        .map(|&(_, k)| k as f64 / reference.total() as f64)
        .collect();
    chi2_gof(&obs, &props, pool_min_expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed form for even df: Q(m, x/2) = e^{-x/2} Σ_{j<m} (x/2)^j / j!
    fn sf_even_df(stat: f64, df: usize) -> f64 {
        let h = stat / 2.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..df / 2 {
            term *= h / j as f64;
            sum += term;
        }
        (-h).exp() * sum
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn survival_matches_even_df_closed_form() {
        for df in (2..=30).step_by(2) {
            for i in 0..=50 {
                let stat = f64::from(i) * 2.0;
                let a = chi2_sf(stat, df);
                let b = sf_even_df(stat, df);
                assert!((a - b).abs() < 1e-12, "df {df} stat {stat}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn spot_values() {
        // scipy.stats.chi2.sf
        assert!((chi2_sf(4.0, 1) - 0.045_500_263_896_358_57).abs() < 1e-12);
        assert!((chi2_sf(3.841, 1) - 0.050_013_683_763_956_8).abs() < 1e-12);
    }

    #[test]
    fn sixty_forty_against_even_split() {
        let r = chi2_gof(&[60, 40], &[0.5, 0.5], None).unwrap();
        // (10^2 / 50) * 2
        assert!((r.statistic - 4.0).abs() < 1e-12);
        assert_eq!(r.df, 1);
        assert!((r.p_value - 0.0455).abs() < 5e-5);
    }

    #[test]
    fn textbook_uniform_dice() {
        let r = chi2_gof(&[28, 31, 40, 35], &[0.25; 4], None).unwrap();
        assert!((r.statistic - 2.417_910_447_761_194).abs() < 1e-12);
        assert!((r.p_value - 0.490_309_306_965_388_3).abs() < 1e-12);
    }

    #[test]
    fn exact_fit_and_single_cell() {
        let r = chi2_gof(&[25, 75], &[0.25, 0.75], None).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let r = chi2_gof(&[10, 0], &[1.0, 0.0], None).unwrap();
        assert_eq!(r.df, 0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn pooling_merges_small_cells() {
        let obs = [90, 5, 3, 2];
        let refp = [0.9, 0.04, 0.03, 0.03];
        let plain = chi2_gof(&obs, &refp, None).unwrap();
        assert_eq!(plain.df, 3);
        let pooled = chi2_gof(&obs, &refp, Some(5.0)).unwrap();
        // expected 90, 4, 3, 3: the last three pool into (10, 10)
        assert_eq!(pooled.df, 1);
        assert!(pooled.statistic.abs() < 1e-12);
    }

    #[test]
    fn input_errors() {
        assert!(chi2_gof(&[], &[], None).is_err());
        assert!(chi2_gof(&[1, 2], &[0.5], None).is_err());
        assert!(chi2_gof(&[1, 2], &[0.7, 0.7], None).is_err());
        assert!(chi2_gof(&[1, 2], &[1.0, 0.0], None).is_err());
        assert!(chi2_gof(&[0, 0], &[0.5, 0.5], None).is_err());
    }
}
