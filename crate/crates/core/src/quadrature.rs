// SPDX-License-Identifier: Apache-2.0

//! Gauss-Legendre rules on intervals and composite panels.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule on a fixed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `degree`-point Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, degree: usize) -> Result<Rule> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(
            "quadrature interval",
            format!("need a < b, got [{a}, {b}]"),
        ));
    }
    let rule = GaussLegendre::new(degree)
        .map_err(|e| Error::invalid("quadrature degree", e.to_string()))?;
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let (nodes, weights) = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .unzip();
    Ok(Rule { nodes, weights })
}

/// Composite rule: `[breaks[i], breaks[i+1]]` split into panels no wider than
/// `max_panel`, each carrying a `degree`-point rule.
pub fn composite(breaks: &[f64], max_panel: f64, degree: usize) -> Result<Rule> {
    if breaks.len() < 2 {
        return Err(Error::Empty("quadrature breakpoints"));
    }
    if !(max_panel > 0.0) {
        return Err(Error::invalid(
            "panel width",
            format!("must be > 0, got {max_panel}"),
        ));
    }
    let reference = gauss_legendre(-1.0, 1.0, degree)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(b > a) {
            return Err(Error::invalid(
                "quadrature breakpoints",
                "must be strictly increasing",
            ));
        }
        let panels = ((b - a) / max_panel).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let mid = a + h * (p as f64 + 0.5);
            for (x, w) in reference.iter() {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
    }
    Ok(Rule { nodes, weights })
}

/// A sharp peak of a sampled function: center and half width at half
/// maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub center: f64,
    pub half_width: f64,
}

/// Locates peaks of positive `f` on `[lo, hi]` narrower than `max_width`
/// that rise at least `contrast` times above the neighbouring samples.
///
/// `f` is scanned at `scan` uniform points; each interior local maximum is
/// refined by golden-section search and its half width found by bisection.
pub fn narrow_peaks(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    scan: usize,
    max_width: f64,
    contrast: f64,
) -> Result<Vec<Peak>> {
    if scan < 3 {
        return Err(Error::invalid(
            "scan points",
            format!("need >= 3, got {scan}"),
        ));
    }
    let h = (hi - lo) / (scan - 1) as f64;
    let xs: Vec<f64> = (0..scan).map(|i| lo + h * i as f64).collect();
    let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut peaks = Vec::new();
    for i in 1..scan - 1 {
        if !(ys[i] >= ys[i - 1] && ys[i] > ys[i + 1]) {
            continue;
        }
        let (center, top) = golden_max(&mut f, xs[i - 1], xs[i + 1])?;
        let floor = ys[i - 1].min(ys[i + 1]);
        if !(top >= contrast * floor) {
            continue;
        }
        let half = 0.5 * (top + floor.min(top));
        // Half maximum must be reached inside the bracket, otherwise the
        // uniform rule already resolves the peak.
        if !(f(xs[i - 1])? < half && f(xs[i + 1])? < half) {
            continue;
        }
        let left = bisect_level(&mut f, xs[i - 1], center, half)?;
        let right = bisect_level(&mut f, center, xs[i + 1], half)?;
        let half_width = 0.5 * (right - left);
        if half_width < max_width && half_width > 0.0 {
            peaks.push(Peak { center, half_width });
        }
    }
    Ok(peaks)
}

fn golden_max(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
) -> Result<(f64, f64)> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Point in `[a, b]` where `f` crosses `level`, assuming one crossing.
fn bisect_level(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    level: f64,
) -> Result<f64> {
    let above_at_a = f(a)? >= level;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m)? >= level) == above_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Gauss-Legendre panels on `[lo, hi]` with about `background` nodes spread
/// evenly, plus panels graded geometrically around each peak down to a
/// quarter of its half width.
pub fn graded_rule(
    lo: f64,
    hi: f64,
    background: usize,
    peaks: &[Peak],
    degree: usize,
) -> Result<Rule> {
    if peaks.is_empty() {
        return gauss_legendre(lo, hi, background);
    }
    let mut breaks = vec![lo, hi];
    for p in peaks {
        if !(p.center > lo && p.center < hi) {
            continue;
        }
        breaks.push(p.center);
        let mut step = 0.25 * p.half_width;
        while step < hi - lo {
            for x in [p.center - step, p.center + step] {
                if x > lo && x < hi {
                    breaks.push(x);
                }
            }
            step *= 2.0;
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (a.abs() + b.abs()));
    let max_panel = (hi - lo) * degree as f64 / background.max(degree) as f64;
    composite(&breaks, max_panel, degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = gauss_legendre(0.0, 2.0, 5).unwrap();
        // Degree-9 polynomial is exact for 5 points.
        let v = rule.integrate(|x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn composite_gaussian_and_oscillation() {
        let rule = composite(&[-10.0, 0.0, 3.0], 0.5, 16).unwrap();
        let v = rule.integrate(|x| (-x * x).exp());
        let expected = std::f64::consts::PI.sqrt() / 2.0 * (1.0 + libm::erf(3.0));
        assert!((v - expected).abs() < 1e-12);
        let osc = rule.integrate(|x| (20.0 * x).cos());
        assert!((osc - ((60.0f64).sin() + (200.0f64).sin()) / 20.0).abs() < 1e-12);
    }

    #[test]
    fn finds_and_resolves_a_narrow_lorentzian() {
        let (c, w) = (0.4137, 3e-8);
        let lorentz = |x: f64| w * w / ((x - c) * (x - c) + w * w);
        let peaks =
            narrow_peaks(|x| Ok(1.0 + lorentz(x) * 1e4), 0.0, 1.0, 1001, 1e-3, 2.0).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].center - c).abs() < 1e-3 * w);
        assert!((peaks[0].half_width / w - 1.0).abs() < 1e-3);

        let rule = graded_rule(0.0, 1.0, 200, &peaks, 20).unwrap();
        let exact = w * (((1.0 - c) / w).atan() + (c / w).atan());
        // Limited by rounding of node positions relative to the peak width.
        assert!((rule.integrate(lorentz) / exact - 1.0).abs() < 1e-8);
        // A plain rule of similar size misses it badly.
        let plain = gauss_legendre(0.0, 1.0, rule.len()).unwrap();
        assert!((plain.integrate(lorentz) / exact - 1.0).abs() > 1e-3);
    }

    #[test]
    fn broad_peaks_are_left_to_the_uniform_rule() {
        let peaks = narrow_peaks(
            |x| Ok((-(x - 0.5) * (x - 0.5) * 100.0).exp()),
            0.0,
            1.0,
            101,
            1e-3,
            2.0,
        )
        .unwrap();
        assert!(peaks.is_empty());
        // Rounding ripples on a flat curve are not peaks.
        let flat = narrow_peaks(
            |x| Ok(2.0 + 1e-15 * (1e4 * x).sin()),
            0.0,
            1.0,
            1001,
            1e-3,
            2.0,
        )
        .unwrap();
        assert!(flat.is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_legendre(1.0, 1.0, 4).is_err());
        assert!(composite(&[0.0], 1.0, 4).is_err());
        assert!(composite(&[0.0, -1.0], 1.0, 4).is_err());
    }
}
