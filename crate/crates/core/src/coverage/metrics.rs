//! Shape measurements on enhancement maps.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::{CoverageError, EnhancementMap};

/// Slack when comparing dB values that should be equal by symmetry.
const LEVEL_SLACK_DB: f64 = 1e-9;
const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;
const MIN_EXPLAINED_VARIANCE: f64 = 0.5;
/// Peak-to-peak power variation, relative to the mean, below which a map is flat.
const FLAT_RELATIVE_SPREAD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringeMetrics {
    pub period_m: f64,
    pub bright_width_m: f64,
    /// Direction of the fringe lines, in [0, pi) from the +x axis.
    pub orientation_rad: f64,
    pub explained_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotMetrics {
    pub area_m2: f64,
    pub equivalent_radius_m: f64,
    pub diagonal_m: f64,
    pub cells: usize,
    pub peak_db: f64,
}

/// Period, bright width and direction of a straight fringe pattern.
///
/// The power map is projected onto the dominant gradient direction and a
/// single sinusoid is fitted to the resulting profile.
pub fn fringe_metrics(map: &EnhancementMap) -> Result<FringeMetrics, CoverageError> {
    let n = map.resolution;
    let pitch = map.pitch_m();
    let linear: Vec<f64> = map.values_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let mean = linear.iter().sum::<f64>() / linear.len() as f64;
    let hi = linear.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = linear.iter().copied().fold(f64::INFINITY, f64::min);
    if !(hi - lo > FLAT_RELATIVE_SPREAD * mean) {
        return Err(CoverageError::NoFringes("map is flat".into()));
    }

    let (mut jxx, mut jxy, mut jyy) = (0.0, 0.0, 0.0);
    for r in 1..n - 1 {
        for c in 1..n - 1 {
            let gx = linear[r * n + c + 1] - linear[r * n + c - 1];
            let gy = linear[(r + 1) * n + c] - linear[(r - 1) * n + c];
            jxx += gx * gx;
            jxy += gx * gy;
            jyy += gy * gy;
        }
    }
    let wave_dir = 0.5 * (2.0 * jxy).atan2(jxx - jyy);
    let trace = jxx + jyy;
    let spread = ((jxx - jyy).powi(2) + 4.0 * jxy * jxy).sqrt();
    if trace <= 0.0 || spread / trace < 0.5 {
        return Err(CoverageError::NoFringes("no dominant stripe direction".into()));
    }

    let profile = Profile::project(map, &linear, wave_dir);
    let fit = profile.best_sinusoid(pitch);
    if fit.explained < MIN_EXPLAINED_VARIANCE {
        return Err(CoverageError::NoFringes(format!("sinusoid explains only {:.2} of the variance", fit.explained)));
    }
    let period = 1.0 / fit.frequency;
    if period / pitch < MIN_SAMPLES_PER_PERIOD {
        return Err(CoverageError::UnderSampledFringes { period_m: period, pitch_m: pitch });
    }
    let bright = profile.bright_width().unwrap_or(period / 2.0);
    Ok(FringeMetrics {
        period_m: period,
        bright_width_m: bright,
        orientation_rad: (wave_dir + FRAC_PI_2).rem_euclid(PI),
        explained_variance: fit.explained,
    })
}

struct Profile {
    positions: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

struct SinusoidFit {
    frequency: f64,
    explained: f64,
}

impl Profile {
    fn project(map: &EnhancementMap, linear: &[f64], dir: f64) -> Self {
        let n = map.resolution;
        let bin = map.pitch_m();
        let (c, s) = (dir.cos(), dir.sin());
        let reach = map.extent_m * std::f64::consts::SQRT_2 / 2.0 + bin;
        let bins = (2.0 * reach / bin).ceil() as usize + 1;
        let mut sums = vec![0.0; bins];
        let mut counts = vec![0.0; bins];
        for r in 0..n {
            let y = map.y_at(r);
            for col in 0..n {
                let u = map.x_at(col) * c + y * s;
                let k = ((u + reach) / bin).round() as usize;
                sums[k] += linear[r * n + col];
                counts[k] += 1.0;
            }
        }
        let mut out = Profile { positions: Vec::new(), values: Vec::new(), weights: Vec::new() };
        for k in 0..bins {
            if counts[k] > 0.0 {
                out.positions.push(k as f64 * bin - reach);
                out.values.push(sums[k] / counts[k]);
                out.weights.push(counts[k]);
            }
        }
        out
    }

    /// Weighted residual of the least-squares fit `a + b cos(2 pi f u) + c sin(2 pi f u)`.
    fn residual(&self, f: f64) -> f64 {
        let mut m = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        let mut yy = 0.0;
        for ((&u, &y), &w) in self.positions.iter().zip(&self.values).zip(&self.weights) {
            let (s, c) = (2.0 * PI * f * u).sin_cos();
            let basis = [1.0, c, s];
            for i in 0..3 {
                rhs[i] += w * basis[i] * y;
                for j in 0..3 {
                    m[i][j] += w * basis[i] * basis[j];
                }
            }
            yy += w * y * y;
        }
        match solve3(m, rhs) {
            Some(beta) => yy - (0..3).map(|i| beta[i] * rhs[i]).sum::<f64>(),
            None => yy,
        }
    }

    fn best_sinusoid(&self, pitch: f64) -> SinusoidFit {
        let span = self.positions.last().unwrap() - self.positions.first().unwrap();
        let f_lo = 0.25 / span;
        let f_hi = 0.5 / pitch;
        let step = 0.05 / span;
        let mut best = (f_lo, f64::INFINITY);
        let mut f = f_lo;
        while f <= f_hi {
            let r = self.residual(f);
            if r < best.1 {
                best = (f, r);
            }
            f += step;
        }
        let (mut a, mut b) = ((best.0 - step).max(f_lo), (best.0 + step).min(f_hi));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut r1, mut r2) = (self.residual(x1), self.residual(x2));
        for _ in 0..80 {
            if r1 < r2 {
                b = x2;
                x2 = x1;
                r2 = r1;
                x1 = b - g * (b - a);
                r1 = self.residual(x1);
            } else {
                a = x1;
                x1 = x2;
                r1 = r2;
                x2 = a + g * (b - a);
                r2 = self.residual(x2);
            }
        }
        let (freq, res) = if r1 < r2 { (x1, r1) } else { (x2, r2) };
        let (freq, res) = if res <= best.1 { (freq, res) } else { best };

        let total_w: f64 = self.weights.iter().sum();
        let mean = self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum::<f64>() / total_w;
        let ss = self.values.iter().zip(&self.weights).map(|(v, w)| w * (v - mean).powi(2)).sum::<f64>();
        SinusoidFit { frequency: freq, explained: if ss > 0.0 { 1.0 - res / ss } else { 0.0 } }
    }

    /// Mean width of the complete runs above the profile midlevel.
    fn bright_width(&self) -> Option<f64> {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let level = (max + min) / 2.0;
        let above: Vec<bool> = self.values.iter().map(|&v| v > level).collect();
        let crossing = |i: usize| {
            let (u0, u1) = (self.positions[i], self.positions[i + 1]);
            let (v0, v1) = (self.values[i], self.values[i + 1]);
            u0 + (level - v0) / (v1 - v0) * (u1 - u0)
        };
        let mut widths = Vec::new();
        let mut start = None;
        for i in 0..above.len() - 1 {
            match (above[i], above[i + 1]) {
                (false, true) => start = Some(crossing(i)),
                (true, false) => {
                    if let Some(s) = start.take() {
                        widths.push(crossing(i) - s);
                    }
                }
                _ => {}
            }
        }
        (!widths.is_empty()).then(|| widths.iter().sum::<f64>() / widths.len() as f64)
    }
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, src) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / m[row][row];
    }
    Some(x)
}

/// The central spot: cells at or above `threshold_db` that can be reached from
/// the peak nearest the UE without climbing. Neighbouring spots that touch
/// the central one across a saddle above the threshold are left out.
pub fn spot_metrics(map: &EnhancementMap, threshold_db: f64) -> Result<SpotMetrics, CoverageError> {
    if !threshold_db.is_finite() {
        return Err(CoverageError::Domain("spot threshold must be finite".into()));
    }
    let n = map.resolution;
    let pitch = map.pitch_m();
    let at = |r: usize, c: usize| map.get(r, c);

    let mid = (n - 1) / 2;
    let mut peak = (mid, mid);
    for (r, c) in [(mid, mid + 1), (mid + 1, mid), (mid + 1, mid + 1)] {
        if r < n && c < n && n.is_multiple_of(2) && at(r, c) > at(peak.0, peak.1) {
            peak = (r, c);
        }
    }
    loop {
        let (r, c) = peak;
        let mut next = peak;
        for (dr, dc) in [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
            let (rr, cc) = (r as isize + dr, c as isize + dc);
            if rr < 0 || cc < 0 || rr >= n as isize || cc >= n as isize {
                continue;
            }
            let cand = (rr as usize, cc as usize);
            if at(cand.0, cand.1) > at(next.0, next.1) + LEVEL_SLACK_DB {
                next = cand;
            }
        }
        if next == peak {
            break;
        }
        peak = next;
    }
    let peak_db = at(peak.0, peak.1);
    if peak_db < threshold_db {
        return Ok(SpotMetrics { area_m2: 0.0, equivalent_radius_m: 0.0, diagonal_m: 0.0, cells: 0, peak_db });
    }

    let mut inside = vec![false; n * n];
    let mut queue = VecDeque::from([peak]);
    inside[peak.0 * n + peak.1] = true;
    let mut members = Vec::new();
    while let Some((r, c)) = queue.pop_front() {
        members.push((map.x_at(c), map.y_at(r)));
        let here = at(r, c);
        for (dr, dc) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
            let (rr, cc) = (r as isize + dr, c as isize + dc);
            if rr < 0 || cc < 0 || rr >= n as isize || cc >= n as isize {
                continue;
            }
            let (rr, cc) = (rr as usize, cc as usize);
            let v = at(rr, cc);
            if !inside[rr * n + cc] && v >= threshold_db && v <= here + LEVEL_SLACK_DB {
                inside[rr * n + cc] = true;
                queue.push_back((rr, cc));
            }
        }
    }

    let area = members.len() as f64 * pitch * pitch;
    Ok(SpotMetrics {
        area_m2: area,
        equivalent_radius_m: (area / PI).sqrt(),
        diagonal_m: max_extent(&members),
        cells: members.len(),
        peak_db,
    })
}

/// Largest distance between any two points, via their convex hull.
fn max_extent(points: &[(f64, f64)]) -> f64 {
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a.0 - b.0).hypot(a.1 - b.1));
        }
    }
    best
}

fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Ground radius of a single-satellite cell, km.
pub fn single_sat_cell_radius(beamwidth_rad: f64, altitude_km: f64) -> Result<f64, CoverageError> {
    if !(beamwidth_rad > 0.0 && beamwidth_rad < PI) {
        return Err(CoverageError::Domain(format!("beamwidth must lie in (0, pi), got {beamwidth_rad}")));
    }
    if !(altitude_km > 0.0) || !altitude_km.is_finite() {
        return Err(CoverageError::Domain(format!("altitude must be positive, got {altitude_km}")));
    }
    Ok(altitude_km * (beamwidth_rad / 2.0).tan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{CaseId, ScenarioEcho, ScenarioParams};

    fn synthetic(n: usize, extent: f64, f: impl Fn(f64, f64) -> f64) -> EnhancementMap {
        let cfg = crate::coverage::build_scenario(CaseId::Single, &ScenarioParams { grid_resolution: n, grid_side_m: extent, ..Default::default() }).unwrap();
        let pitch = extent / (n - 1) as f64;
        let coord = |i: usize| (i as f64 - (n - 1) as f64 / 2.0) * pitch;
        let mut values = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                values.push(f(coord(c), coord(r)));
            }
        }
        EnhancementMap { values_db: values, resolution: n, extent_m: extent, metadata: ScenarioEcho::new(&cfg, None) }
    }

    fn cos_fringes(period: f64, angle: f64) -> impl Fn(f64, f64) -> f64 {
        move |x, y| {
            let u = x * angle.cos() + y * angle.sin();
            10.0 * (2.0 + 2.0 * (2.0 * PI * u / period).cos()).max(1e-6).log10()
        }
    }

    #[test]
    fn recovers_synthetic_fringe_period() {
        let m = fringe_metrics(&synthetic(241, 48.0, cos_fringes(10.0, 0.0))).unwrap();
        assert!((m.period_m - 10.0).abs() < 0.01, "{m:?}");
        assert!((m.bright_width_m - 5.0).abs() < 0.1, "{m:?}");
        assert!((m.orientation_rad - FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn recovers_rotated_fringes() {
        let m = fringe_metrics(&synthetic(241, 48.0, cos_fringes(12.0, 0.4))).unwrap();
        assert!((m.period_m - 12.0).abs() < 0.05, "{m:?}");
        assert!((m.orientation_rad - (0.4 + FRAC_PI_2)).abs() < 1e-3, "{m:?}");
    }

    #[test]
    fn flat_map_has_no_fringes() {
        assert!(matches!(fringe_metrics(&synthetic(41, 48.0, |_, _| 0.0)), Err(CoverageError::NoFringes(_))));
    }

    #[test]
    fn under_sampled_fringes_are_rejected() {
        let r = fringe_metrics(&synthetic(97, 48.0, cos_fringes(3.0, 0.0)));
        assert!(matches!(r, Err(CoverageError::UnderSampledFringes { .. })), "{r:?}");
    }

    #[test]
    fn disk_spot_area() {
        let m = spot_metrics(&synthetic(241, 48.0, |x, y| 10.0 - x.hypot(y)), 0.0).unwrap();
        assert!((m.area_m2 / (PI * 100.0) - 1.0).abs() < 0.02, "{m:?}");
        assert!((m.diagonal_m - 20.0).abs() < 0.5, "{m:?}");
    }

    #[test]
    fn neighbouring_peaks_are_excluded() {
        let bumps = |x: f64, y: f64| (-(x * x + y * y) / 20.0).exp().max((-((x - 8.0).powi(2) + y * y) / 20.0).exp());
        let map = synthetic(161, 48.0, move |x, y| 10.0 * bumps(x, y).log10());
        let m = spot_metrics(&map, -20.0).unwrap();
        let plain = map.values_db.iter().filter(|v| **v >= -20.0).count();
        assert!(m.cells < plain);
        assert!(m.peak_db.abs() < 1e-9);
    }

    #[test]
    fn spot_below_threshold_is_empty() {
        let m = spot_metrics(&synthetic(21, 48.0, |_, _| -3.0), 0.0).unwrap();
        assert_eq!(m.cells, 0);
        assert_eq!(m.area_m2, 0.0);
    }

    #[test]
    fn hull_extent_of_square() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, 0.5)];
        assert!((max_extent(&pts) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cell_radius_examples() {
        assert!((single_sat_cell_radius(2.5f64.to_radians(), 550.0).unwrap() - 12.0).abs() < 0.01);
        assert!((single_sat_cell_radius(2.5f64.to_radians(), 600.0).unwrap() - 13.09).abs() < 0.01);
        assert!(single_sat_cell_radius(0.0, 550.0).is_err());
        assert!(single_sat_cell_radius(0.1, -1.0).is_err());
    }
}
