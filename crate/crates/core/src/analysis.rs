//! Threshold crossings of rate curves and the plateau fit across dimensions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::RatePoint;

/// Relative half-width of the fit window around the coarse crossing.
pub const WINDOW: f64 = 0.3;

/// Binomial resamples used for the crossing's standard error.
pub const BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub p_thresh: f64,
    pub distances: (usize, usize),
    pub window: (f64, f64),
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauFit {
    pub t_plateau: f64,
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl PlateauFit {
    pub fn eval(&self, dim: f64) -> f64 {
        plateau(self.t_plateau, self.alpha, self.beta, dim)
    }
}

fn plateau(t: f64, alpha: f64, beta: f64, dim: f64) -> f64 {
    t - alpha / (beta - dim)
}

/// One rate curve: `(p, rate)` sorted by `p`.
type Curve = Vec<(f64, f64)>;

fn curve_of(points: &[RatePoint], distance: usize) -> Vec<&RatePoint> {
    let mut c: Vec<&RatePoint> = points.iter().filter(|r| r.distance == distance).collect();
    c.sort_by(|a, b| a.p.total_cmp(&b.p));
    c
}

/// Least-squares `c0 + c1 x + c2 x^2` on `x = (p - at) / scale`.
fn quadratic(curve: &[(f64, f64)], at: f64, scale: f64) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for &(p, r) in curve {
        let x = (p - at) / scale;
        let basis = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += basis[i] * basis[j];
            }
            b[i] += basis[i] * r;
        }
    }
    solve3(a, b)
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Linear interpolation of the sign change of `a - b` closest to the middle
/// of the shared grid.
fn coarse_crossing(a: &Curve, b: &Curve) -> Option<f64> {
    let shared: Vec<(f64, f64)> = a
        .iter()
        .filter_map(|&(p, ra)| {
            b.iter()
                .find(|&&(q, _)| (q - p).abs() <= 1e-12 * p.abs().max(1.0))
                .map(|&(_, rb)| (p, ra - rb))
        })
        .collect();
    let mid = shared.len() as f64 / 2.0;
    shared
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum() && w[1].1 != 0.0)
        .min_by(|(i, _), (j, _)| (*i as f64 - mid).abs().total_cmp(&(*j as f64 - mid).abs()))
        .map(|(_, w)| {
            let ((p0, d0), (p1, d1)) = (w[0], w[1]);
            if d0 == 0.0 {
                p0
            } else {
                p0 + (p1 - p0) * d0 / (d0 - d1)
            }
        })
}

fn in_window(curve: &Curve, lo: f64, hi: f64, at: f64) -> Curve {
    let inside: Curve = curve.iter().copied().filter(|&(p, _)| p >= lo && p <= hi).collect();
    if inside.len() >= 3 {
        return inside;
    }
    // too sparse: the four points nearest the coarse crossing
    let mut near = curve.clone();
    near.sort_by(|x, y| (x.0 - at).abs().total_cmp(&(y.0 - at).abs()));
    near.truncate(4);
    near.sort_by(|x, y| x.0.total_cmp(&y.0));
    near
}

/// Crossing of two curves and the window it was fitted on.
fn crossing(a: &Curve, b: &Curve) -> Result<(f64, (f64, f64))> {
    let coarse = coarse_crossing(a, b).ok_or(Error::NoCrossing)?;
    let (lo, hi) = (coarse * (1.0 - WINDOW), coarse * (1.0 + WINDOW));
    let wa = in_window(a, lo, hi, coarse);
    let wb = in_window(b, lo, hi, coarse);
    let span = |c: &Curve| (c[0].0, c[c.len() - 1].0);
    let (alo, ahi) = span(&wa);
    let (blo, bhi) = span(&wb);
    let (lo, hi) = (alo.max(blo), ahi.min(bhi));
    let scale = (hi - lo).max(f64::EPSILON);
    let ca = quadratic(&wa, coarse, scale).ok_or(Error::NoCrossing)?;
    let cb = quadratic(&wb, coarse, scale).ok_or(Error::NoCrossing)?;
    let [c0, c1, c2] = [ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]];
    let size = ca.iter().chain(&cb).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let tiny = 1e-10 * size;
    let roots: Vec<f64> = if c2.abs() <= tiny {
        if c1.abs() <= tiny {
            return Err(Error::NoCrossing);
        }
        vec![-c0 / c1]
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return Err(Error::NoCrossing);
        }
        let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
        if q == 0.0 {
            vec![0.0]
        } else {
            vec![q / c2, c0 / q]
        }
    };
    let to_p = |x: f64| coarse + x * scale;
    roots
        .into_iter()
        .map(to_p)
        .filter(|&p| p >= lo - 1e-12 && p <= hi + 1e-12)
        .min_by(|x, y| (x - coarse).abs().total_cmp(&(y - coarse).abs()))
        .map(|p| (p, (lo, hi)))
        .ok_or(Error::NoCrossing)
}

/// Crossing of the rate curves of two distances with a binomial bootstrap
/// standard error. `resamples = 0` skips the bootstrap.
pub fn find_threshold(
    points: &[RatePoint],
    pair: (usize, usize),
    resamples: usize,
    seed: u64,
) -> Result<ThresholdEstimate> {
    let pa = curve_of(points, pair.0);
    let pb = curve_of(points, pair.1);
    for (d, c) in [(pair.0, &pa), (pair.1, &pb)] {
        if c.len() < 4 {
            return Err(Error::Precondition(format!(
                "distance {d} needs at least 4 p-values, got {}",
                c.len()
            )));
        }
    }
    let rates = |c: &[&RatePoint]| -> Curve { c.iter().map(|r| (r.p, r.rate)).collect() };
    let (p_thresh, window) = crossing(&rates(&pa), &rates(&pb))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |c: &[&RatePoint], rng: &mut ChaCha8Rng| -> Curve {
        c.iter()
            .map(|r| {
                let hits = Binomial::new(r.trials, r.rate.clamp(0.0, 1.0)).map_or(r.failures, |b| b.sample(rng));
                (r.p, hits as f64 / r.trials.max(1) as f64)
            })
            .collect()
    };
    let mut samples = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let a = draw(&pa, &mut rng);
        let b = draw(&pb, &mut rng);
        if let Ok((p, _)) = crossing(&a, &b) {
            samples.push(p);
        }
    }
    let std_err = if samples.len() > 1 {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        (samples.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ThresholdEstimate {
        p_thresh,
        distances: pair,
        window,
        std_err,
    })
}

fn sum_sq(data: &[(f64, f64)], x: [f64; 3]) -> f64 {
    data.iter().map(|&(d, t)| (t - plateau(x[0], x[1], x[2], d)).powi(2)).sum()
}

/// Levenberg-Marquardt fit of `T(D) = T_plateau - alpha / (beta - D)`.
pub fn fit_plateau(thresholds: &[(f64, f64)]) -> Result<PlateauFit> {
    if thresholds.len() < 4 {
        return Err(Error::Precondition(format!(
            "plateau fit needs at least 4 points, got {}",
            thresholds.len()
        )));
    }
    for (i, a) in thresholds.iter().enumerate() {
        if thresholds[i + 1..].iter().any(|b| b.0 == a.0) {
            return Err(Error::Precondition(format!("dimension {} appears twice", a.0)));
        }
    }
    let top = thresholds.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let mut x = [top + 0.005, -1.0, 0.0];
    let mut cost = sum_sq(thresholds, x);
    let mut lambda = 1e-3;
    const MAX_ITER: usize = 2000;
    for iter in 1..=MAX_ITER {
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(d, t) in thresholds {
            let g = x[2] - d;
            let r = t - plateau(x[0], x[1], x[2], d);
            // partial derivatives of the model
            let jac = [1.0, -1.0 / g, x[1] / (g * g)];
            for i in 0..3 {
                for j in 0..3 {
                    jtj[i][j] += jac[i] * jac[j];
                }
                jtr[i] += jac[i] * r;
            }
        }
        let mut stepped = false;
        while lambda < 1e16 {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let Some(step) = solve3(a, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
            let c = sum_sq(thresholds, trial);
            if c.is_finite() && c <= cost {
                let small = step.iter().zip(&trial).all(|(s, v)| s.abs() <= 1e-13 * v.abs().max(1e-8));
                x = trial;
                let gain = cost - c;
                cost = c;
                lambda = (lambda / 10.0).max(1e-15);
                stepped = true;
                if small || gain <= 1e-30 || cost <= 1e-30 {
                    return Ok(PlateauFit {
                        t_plateau: x[0],
                        alpha: x[1],
                        beta: x[2],
                        residual: cost.sqrt(),
                        iterations: iter,
                    });
                }
                break;
            }
            lambda *= 10.0;
        }
        if !stepped {
            // no downhill step at any damping: a stationary point
            return Ok(PlateauFit {
                t_plateau: x[0],
                alpha: x[1],
                beta: x[2],
                residual: cost.sqrt(),
                iterations: iter,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual: cost.sqrt(),
    })
}
