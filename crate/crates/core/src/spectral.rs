//! Unfolding, nearest-neighbour spacing statistics and the level statistics
//! indicator η.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, Matrix};

/// Minimum number of levels left after edge trimming.
pub const MIN_LEVELS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnfoldingConfig {
    /// Degree of the polynomial fitted to the level staircase.
    pub poly_degree: usize,
    /// Fraction of levels dropped at each spectrum edge.
    pub edge_trim: f64,
}

impl Default for UnfoldingConfig {
    fn default() -> Self {
        Self { poly_degree: 9, edge_trim: 0.02 }
    }
}

impl UnfoldingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=20).contains(&self.poly_degree) {
            return Err(Error::Config(format!(
                "poly_degree must be in 1..=20, got {}",
                self.poly_degree
            )));
        }
        if !(0.0..0.25).contains(&self.edge_trim) {
            return Err(Error::Config(format!(
                "edge_trim must be in [0, 0.25), got {}",
                self.edge_trim
            )));
        }
        Ok(())
    }
}

/// Unfolded nearest-neighbour spacings, normalized to unit mean.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpacingSample {
    pub spacings: Vec<f64>,
    /// Spacings that came out negative from the fit and were set to zero.
    pub clamped: usize,
    /// Raw level pairs that are degenerate to numerical precision.
    pub degeneracies: usize,
    /// True when the fitted staircase decreases somewhere on the data.
    pub non_monotone: bool,
}

impl SpacingSample {
    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }

    /// Concatenation of several samples, for pooled statistics.
    pub fn pooled<'a>(samples: impl IntoIterator<Item = &'a SpacingSample>) -> SpacingSample {
        let mut out = SpacingSample::default();
        for s in samples {
            out.spacings.extend_from_slice(&s.spacings);
            out.clamped += s.clamped;
            out.degeneracies += s.degeneracies;
            out.non_monotone |= s.non_monotone;
        }
        out
    }
}

pub fn poisson_pdf(s: f64) -> f64 {
    (-s).exp()
}

pub fn wigner_dyson_pdf(s: f64) -> f64 {
    0.5 * PI * s * (-0.25 * PI * s * s).exp()
}

/// Cumulative Poisson and Wigner–Dyson distributions at `s`.
pub fn reference_cdfs(s: f64) -> Result<(f64, f64)> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!("spacing must be non-negative, got {s}")));
    }
    Ok((1.0 - (-s).exp(), 1.0 - (-0.25 * PI * s * s).exp()))
}

/// First positive crossing of the Poisson and Wigner–Dyson densities.
pub fn intersection_s0() -> f64 {
    let f = |s: f64| poisson_pdf(s) - wigner_dyson_pdf(s);
    // f > 0 just above zero and f(1) < 0.
    let (mut lo, mut hi) = (0.1, 1.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Legendre polynomials `P_0..=P_degree` at `x`.
fn legendre_row(x: f64, degree: usize, out: &mut [f64]) {
    out[0] = 1.0;
    if degree >= 1 {
        out[1] = x;
    }
    for k in 2..=degree {
        out[k] = ((2 * k - 1) as f64 * x * out[k - 1] - (k - 1) as f64 * out[k - 2]) / k as f64;
    }
}

/// Unfolds an ascending spectrum by a least-squares polynomial fit to the
/// counting staircase on the edge-trimmed window.
pub fn unfold(values: &[f64], cfg: &UnfoldingConfig) -> Result<SpacingSample> {
    cfg.validate()?;
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Contract("eigenvalues must be sorted ascending".into()));
    }
    let n = values.len();
    let cut = (cfg.edge_trim * n as f64).floor() as usize;
    if n < 2 * cut + MIN_LEVELS {
        return Err(Error::Statistics(format!(
            "{} levels after trimming, need at least {MIN_LEVELS}",
            n.saturating_sub(2 * cut)
        )));
    }
    let window = &values[cut..n - cut];
    let m = window.len();
    let (lo, hi) = (window[0], window[m - 1]);
    let width = hi - lo;
    if width <= 0.0 {
        return Err(Error::Statistics("spectrum window has zero width".into()));
    }

    let deg = cfg.poly_degree;
    let xs: Vec<f64> = window.iter().map(|&e| 2.0 * (e - lo) / width - 1.0).collect();
    let mut design = Matrix::zeros(m, deg + 1);
    for (k, &x) in xs.iter().enumerate() {
        legendre_row(x, deg, design.row_mut(k));
    }
    let staircase: Vec<f64> = (0..m).map(|k| (cut + k + 1) as f64).collect();
    let coeffs = lstsq(&design, &staircase)?;
    let unfolded: Vec<f64> =
        (0..m).map(|k| design.row(k).iter().zip(&coeffs).map(|(a, c)| a * c).sum()).collect();

    let degenerate_tol = 1e-10 * width.max(hi.abs()).max(lo.abs()).max(1.0);
    let degeneracies = window.windows(2).filter(|w| w[1] - w[0] <= degenerate_tol).count();
    let mut clamped = 0;
    let mut spacings: Vec<f64> = unfolded
        .windows(2)
        .map(|w| {
            let s = w[1] - w[0];
            if s < 0.0 {
                clamped += 1;
                0.0
            } else {
                s
            }
        })
        .collect();
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    if mean <= 0.0 || !mean.is_finite() {
        return Err(Error::Statistics("unfolded spectrum has no positive spacing".into()));
    }
    spacings.iter_mut().for_each(|s| *s /= mean);
    Ok(SpacingSample { spacings, clamped, degeneracies, non_monotone: clamped > 0 })
}

/// η from the empirical fraction of spacings below `s_0`.
///
/// Zero for Wigner–Dyson statistics and one for Poisson; not clamped, so
/// sampling noise can push it slightly outside `[0, 1]`.
pub fn lsi(sample: &SpacingSample) -> Result<f64> {
    lsi_from_spacings(&sample.spacings)
}

pub fn lsi_from_spacings(spacings: &[f64]) -> Result<f64> {
    if spacings.is_empty() {
        return Err(Error::Statistics("empty spacing sample".into()));
    }
    let s0 = intersection_s0();
    let below = spacings.iter().filter(|&&s| s < s0).count() as f64 / spacings.len() as f64;
    let (fp, fwd) = reference_cdfs(s0)?;
    Ok((below - fwd) / (fp - fwd))
}

/// Density histogram of spacings on `[0, 4)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    /// Left edge of each bin.
    pub edges: Vec<f64>,
    /// Count / (total spacings · bin width).
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.iter().map(move |e| e + 0.5 * self.bin_width)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,density\n");
        for (c, d) in self.centers().zip(&self.density) {
            let _ = writeln!(out, "{c:.16e},{d:.16e}");
        }
        out
    }
}

pub const HISTOGRAM_RANGE: f64 = 4.0;

pub fn spacing_histogram(sample: &SpacingSample, bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0) {
        return Err(Error::Domain(format!("bin width must be positive, got {bin_width}")));
    }
    if sample.is_empty() {
        return Err(Error::Statistics("empty spacing sample".into()));
    }
    let bins = (HISTOGRAM_RANGE / bin_width).ceil() as usize;
    let mut counts = vec![0usize; bins];
    for &s in &sample.spacings {
        if s < HISTOGRAM_RANGE {
            let b = ((s / bin_width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let norm = 1.0 / (sample.len() as f64 * bin_width);
    Ok(Histogram {
        bin_width,
        edges: (0..bins).map(|b| b as f64 * bin_width).collect(),
        density: counts.into_iter().map(|c| c as f64 * norm).collect(),
    })
}

/// Empirical CDF of a sample on a uniform grid of `points` values in `[0, 4]`.
pub fn cdf_csv(sample: &SpacingSample, points: usize) -> String {
    let mut sorted = sample.spacings.clone();
    sorted.sort_by(f64::total_cmp);
    let mut out = String::from("s,cdf\n");
    let steps = points.max(2) - 1;
    for k in 0..=steps {
        let s = HISTOGRAM_RANGE * k as f64 / steps as f64;
        let below = sorted.partition_point(|&x| x <= s);
        let _ = writeln!(out, "{s:.16e},{:.16e}", below as f64 / sorted.len().max(1) as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cdf_endpoints_and_values() {
        assert_eq!(reference_cdfs(0.0).unwrap(), (0.0, 0.0));
        let (p, w) = reference_cdfs(1e3).unwrap();
        assert!((p - 1.0).abs() < 1e-15 && (w - 1.0).abs() < 1e-15);
        // Direct evaluation of the two closed forms at s = 0.4729.
        let (p, w) = reference_cdfs(0.4729).unwrap();
        assert!((p - 0.376_807_6).abs() < 1e-6, "{p}");
        assert!((w - 0.161_082_6).abs() < 1e-6, "{w}");
        assert!(matches!(reference_cdfs(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn s0_root() {
        let s0 = intersection_s0();
        assert!((s0 - 0.4729).abs() < 5e-5, "{s0}");
        assert!((poisson_pdf(s0) - wigner_dyson_pdf(s0)).abs() < 1e-9);
        // Exactly one sign change of P_P − P_WD on a 1e-4 grid over (0, 1).
        let changes = (1..10_000)
            .map(|k| k as f64 * 1e-4)
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|w| {
                let f = |s: f64| poisson_pdf(s) - wigner_dyson_pdf(s);
                f(w[0]).signum() != f(w[1]).signum()
            })
            .count();
        assert_eq!(changes, 1);
    }

    #[test]
    fn equally_spaced_levels_unfold_to_unit_spacings() {
        let levels: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let cfg = UnfoldingConfig { poly_degree: 1, edge_trim: 0.02 };
        let s = unfold(&levels, &cfg).unwrap();
        assert!(s.spacings.iter().all(|x| (x - 1.0).abs() < 1e-12));
        assert_eq!(s.clamped, 0);
        assert_eq!(s.degeneracies, 0);
    }

    #[test]
    fn unfold_errors() {
        let few: Vec<f64> = (0..40).map(|k| k as f64).collect();
        assert!(matches!(unfold(&few, &UnfoldingConfig::default()), Err(Error::Statistics(_))));
        let levels: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let bad = UnfoldingConfig { poly_degree: 0, edge_trim: 0.0 };
        assert!(matches!(unfold(&levels, &bad), Err(Error::Config(_))));
        let bad = UnfoldingConfig { poly_degree: 3, edge_trim: 0.3 };
        assert!(matches!(unfold(&levels, &bad), Err(Error::Config(_))));
        let mut rev = levels.clone();
        rev.reverse();
        assert!(matches!(unfold(&rev, &UnfoldingConfig::default()), Err(Error::Contract(_))));
    }

    #[test]
    fn degeneracies_are_kept_and_counted() {
        let mut levels: Vec<f64> = (0..120).map(|k| (k / 2) as f64).collect();
        levels.sort_by(f64::total_cmp);
        let s = unfold(&levels, &UnfoldingConfig { poly_degree: 1, edge_trim: 0.0 }).unwrap();
        assert_eq!(s.degeneracies, 60);
        assert_eq!(s.len(), 119);
    }

    #[test]
    fn unit_mean_after_unfolding() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut levels: Vec<f64> = (0..500).map(|_| rng.random_range(-3.0..3.0)).collect();
        levels.sort_by(f64::total_cmp);
        let s = unfold(&levels, &UnfoldingConfig::default()).unwrap();
        assert!((s.mean() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lsi_of_ideal_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let poisson: Vec<f64> = (0..100_000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let wd: Vec<f64> = (0..100_000)
            .map(|_| (-4.0 / PI * (1.0 - rng.random::<f64>()).ln()).sqrt())
            .collect();
        let eta_p = lsi_from_spacings(&poisson).unwrap();
        let eta_w = lsi_from_spacings(&wd).unwrap();
        assert!((eta_p - 1.0).abs() < 0.02, "{eta_p}");
        assert!(eta_w.abs() < 0.02, "{eta_w}");
        // Half-half mixture.
        let mix: Vec<f64> = poisson[..50_000].iter().chain(&wd[..50_000]).copied().collect();
        assert!((lsi_from_spacings(&mix).unwrap() - 0.5).abs() < 0.03);
        assert!(matches!(lsi_from_spacings(&[]), Err(Error::Statistics(_))));
    }

    #[test]
    fn lsi_matches_fine_binned_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let sample = SpacingSample {
            spacings: (0..20_000).map(|_| -(1.0 - rng.random::<f64>()).ln() * 0.8).collect(),
            ..Default::default()
        };
        let bw = 1e-3;
        let h = spacing_histogram(&sample, bw).unwrap();
        let s0 = intersection_s0();
        // ∫_0^{s0} P(s) ds from the histogram, with a partial last bin.
        let mut integral = 0.0;
        for (edge, d) in h.edges.iter().zip(&h.density) {
            if edge + bw <= s0 {
                integral += d * bw;
            } else if *edge < s0 {
                integral += d * (s0 - edge);
            }
        }
        let (fp, fwd) = reference_cdfs(s0).unwrap();
        let binned = (integral - fwd) / (fp - fwd);
        assert!((binned - lsi(&sample).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn histogram_mass_and_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let poisson = SpacingSample {
            spacings: (0..50_000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect(),
            ..Default::default()
        };
        let h = spacing_histogram(&poisson, 0.1).unwrap();
        let mass: f64 = h.density.iter().sum::<f64>() * 0.1;
        let inside =
            poisson.spacings.iter().filter(|&&s| s < 4.0).count() as f64 / poisson.len() as f64;
        assert!((mass - inside).abs() < 1e-12);
        let peak = h
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(peak, 0);
        assert!(spacing_histogram(&poisson, 0.0).is_err());
        assert!(h.to_csv().starts_with("s,density\n"));
        assert!(cdf_csv(&poisson, 5).lines().count() == 6);
    }
}
