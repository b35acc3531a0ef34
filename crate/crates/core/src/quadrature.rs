//! One-dimensional quadrature: Gauss-Laguerre rules, adaptive
//! Gauss-Kronrod 15/7 integration and a semi-infinite transform.

#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)]
use crate::math::*;
use crate::{Error, Result};

/// Largest supported Gauss-Laguerre order.
pub const MAX_LAGUERRE_ORDER: usize = 128;

/// Maximum bisection depth of the adaptive integrator.
pub const MAX_DEPTH: u32 = 50;

/// Nodes and weights of an `n`-point Gauss-Laguerre rule,
/// `∫₀^∞ f(u) e^{-u} du ≈ Σ ωᵢ f(uᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerreRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerreRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f`, i.e. approximates `∫₀^∞ f(u) e^{-u} du`.
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

/// Builds the `n`-point Gauss-Laguerre rule.
///
/// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of
/// the Laguerre recurrence (diagonal `2i+1`, off-diagonal `i`), found with
/// implicit QL iterations and polished by Newton steps on `L_n`. Weights use the Christoffel form `ωᵢ = 1/Σ_{k<n} L_k(uᵢ)²`.
pub fn gauss_laguerre(n: usize) -> Result<GaussLaguerreRule> {
    if n == 0 || n > MAX_LAGUERRE_ORDER {
        return Err(Error::config(alloc::format!(
            "Gauss-Laguerre order must lie in 1..={MAX_LAGUERRE_ORDER}, got {n}"
        )));
    }
    let mut diag: Vec<f64> = (0..n).map(|i| (2 * i + 1) as f64).collect();
    let mut off: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
    off[n - 1] = 0.0;
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);
    for u in diag.iter_mut() {
        for _ in 0..2 {
            let (ln, lm) = laguerre_pair(n, *u);
            let step = ln * *u / (n as f64 * (ln - lm));
            if step.is_finite() {
                *u -= step;
            }
        }
    }

    let weights = diag
        .iter()
        .map(|&u| {
            let mut prev = 1.0;
            let mut cur = 1.0 - u;
            let mut sum = 1.0;
            for k in 1..n {
                sum += cur * cur;
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0 - u) * cur - kf * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            1.0 / sum
        })
        .collect();
    Ok(GaussLaguerreRule {
        nodes: diag,
        weights,
    })
}

/// `(L_n(x), L_{n−1}(x))` by the three-term recurrence, with `L_{−1} = 0`.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Eigenvalues of a symmetric tridiagonal matrix by QL with implicit
/// Wilkinson shifts. `off[i]` couples rows `i` and `i+1`; on return `diag`
/// holds the eigenvalues (unsorted).
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::config("tridiagonal eigensolver did not converge"));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// A quadrature result with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Tolerances and limits for [`integrate_adaptive_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl AdaptiveOptions {
    pub fn relative(rel_tol: f64) -> Self {
        AdaptiveOptions {
            rel_tol,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(centre);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let x = half * XGK[jtwm1];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Estimate { value, error }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Adaptive Gauss-Kronrod 15/7 integration of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// error falls below `max(abs_tol, rel_tol·|I|)`. Hitting the subdivision
/// limit or [`MAX_DEPTH`] yields [`Error::NonConvergence`] with the best
/// estimate.
pub fn integrate_adaptive_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(
            "interval end",
            if a.is_finite() { b } else { a },
            "finite",
        ));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if a > b {
        return integrate_adaptive_with(f, b, a, opts).map(|e| Estimate {
            value: -e.value,
            error: e.error,
        });
    }
    adaptive_over(&mut f, &[a, b], opts)
}

/// Global adaptive integration over the panels `[p₀,p₁], [p₁,p₂], …`: the
/// worst panel anywhere is bisected until the summed error meets the
/// tolerance on the total. `points` must be finite and increasing.
fn adaptive_over<F: FnMut(f64) -> f64>(
    f: &mut F,
    points: &[f64],
    opts: AdaptiveOptions,
) -> Result<Estimate> {
    let mut heap = BinaryHeap::with_capacity(32 + points.len());
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let est = gk15(f, w[0], w[1]);
        total += est.value;
        total_err += est.error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            est,
            depth: 0,
        });
    }
    if !total.is_finite() {
        return Err(Error::NonConvergence {
            estimate: total,
            error: f64::INFINITY,
        });
    }
    if total_err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
        return Ok(Estimate {
            value: total,
            error: total_err,
        });
    }
    let mut panels = heap.len();

    loop {
        let worst = heap.pop().expect("heap holds at least one panel");
        if worst.depth >= MAX_DEPTH || panels >= opts.max_subdivisions {
            heap.push(worst);
            let (value, error) = resum(&heap);
            return Err(Error::NonConvergence {
                estimate: value,
                error,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.est.value;
        total_err += left.error + right.error - worst.est.error;
        panels += 1;
        let depth = worst.depth + 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: left,
            depth,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: right,
            depth,
        });
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            // Incremental sums drift; confirm with a fresh summation.
            let (value, error) = resum(&heap);
            total = value;
            total_err = error;
            if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
                return Ok(Estimate { value, error });
            }
        }
    }
}

fn resum(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error))
}

/// Adaptive integration over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    integrate_adaptive_with(f, a, b, AdaptiveOptions::relative(rel_tol))
}

/// Integrates `f` over `[a, ∞)` through `x = a + t/(1−t)`, `t ∈ [0, 1)`.
pub fn integrate_semi_infinite_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    opts: AdaptiveOptions,
) -> Result<Estimate> {
    if !a.is_finite() {
        return Err(Error::domain("lower limit", a, "finite"));
    }
    integrate_adaptive_with(
        |t| {
            let om = 1.0 - t;
            let x = a + t / om;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (om * om)
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Integrates `f` over `[a, ∞)` to relative tolerance `rel_tol`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    integrate_semi_infinite_with(f, a, AdaptiveOptions::relative(rel_tol))
}

/// Value of a single 15-point Kronrod panel.
pub(crate) fn kronrod15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    gk15(&mut f, a, b).value
}

/// Integrates over consecutive panels `[p₀,p₁], [p₁,p₂], …` to a relative
/// tolerance on the sum; accepts the best estimate if refinement stalls.
pub(crate) fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    rel_tol: f64,
) -> f64 {
    let pts: Vec<f64> = points.iter().copied().fold(Vec::new(), |mut v, p| {
        if v.last().map_or(true, |&q| p > q) {
            v.push(p);
        }
        v
    });
    if pts.len() < 2 {
        return 0.0;
    }
    best(adaptive_over(
        &mut f,
        &pts,
        AdaptiveOptions::relative(rel_tol),
    ))
}

/// The value of an estimate, falling back to the best estimate carried by
/// a non-convergence error. Nested integrals feed noisy integrands to outer
/// layers, where a stalled panel is harmless.
pub(crate) fn best(r: Result<Estimate>) -> f64 {
    match r {
        Ok(e) => e.value,
        Err(Error::NonConvergence { estimate, .. }) => estimate,
        Err(_) => f64::NAN,
    }
}

/// Sorted, de-duplicated split points restricted to `[lo, hi]`, endpoints
/// included.
pub(crate) fn split_points(lo: f64, hi: f64, interior: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo];
    pts.extend(interior.iter().copied().filter(|&p| p > lo && p < hi));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
