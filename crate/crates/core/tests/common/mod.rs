#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use ulcov_core::montecarlo::{rng_from_seed, sample_serving};
use ulcov_core::pathloss::LinkType;
use ulcov_core::NetworkScenario;

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Interference transform of the analytical model estimated by simulation:
/// Poisson BSs in a disk around the typical BS, each with an independent
/// LoS mark and an independent interferer serving link drawn from the
/// typical-UE law; BSs inside the exclusion region, or whose UE would
/// rather associate with the typical BS, stay silent. Rayleigh fading is
/// averaged out exactly.
pub fn model_laplace(
    sc: &NetworkScenario,
    s: f64,
    serving_zeta: f64,
    radius: f64,
    realizations: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = rng_from_seed(seed);
    let count = Poisson::new(sc.lambda * PI * radius * radius).unwrap();
    let pc = sc.power;
    let mut vals = Vec::with_capacity(realizations);
    for _ in 0..realizations {
        let n: f64 = count.sample(&mut rng);
        let mut prod = 1.0;
        for _ in 0..n as usize {
            let x = radius * rng.random::<f64>().sqrt();
            let path = if rng.random::<f64>() < sc.profile.los_prob(x) {
                LinkType::Los
            } else {
                LinkType::Nlos
            };
            let zp = sc.model.attenuation(x, path);
            if zp < serving_zeta {
                continue;
            }
            let (link, u) = sample_serving(sc, &mut rng);
            let zu = sc.model.attenuation(u, link);
            if zu > zp {
                continue;
            }
            prod /= 1.0 + s * pc.p0 * zu.powf(pc.epsilon) / zp;
        }
        vals.push(prod);
    }
    mean_se(&vals)
}

/// SINR of the typical BS under the analytical model: serving link drawn
/// from the typical-UE law, interferers as in [`model_laplace`], Rayleigh
/// fading on every link and noise.
pub fn model_sinr(sc: &NetworkScenario, radius: f64, realizations: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let count = Poisson::new(sc.lambda * PI * radius * radius).unwrap();
    let pc = sc.power;
    let mut out = Vec::with_capacity(realizations);
    for _ in 0..realizations {
        let (link, r) = sample_serving(sc, &mut rng);
        let zs = sc.model.attenuation(r, link);
        let n: f64 = count.sample(&mut rng);
        let mut interference = 0.0;
        for _ in 0..n as usize {
            let x = radius * rng.random::<f64>().sqrt();
            let path = if rng.random::<f64>() < sc.profile.los_prob(x) {
                LinkType::Los
            } else {
                LinkType::Nlos
            };
            let zp = sc.model.attenuation(x, path);
            if zp < zs {
                continue;
            }
            let (l, u) = sample_serving(sc, &mut rng);
            let zu = sc.model.attenuation(u, l);
            if zu > zp {
                continue;
            }
            let g: f64 = rand_distr::Exp1.sample(&mut rng);
            interference += pc.p0 * zu.powf(pc.epsilon) * g / zp;
        }
        let g: f64 = rand_distr::Exp1.sample(&mut rng);
        out.push(pc.p0 * zs.powf(pc.epsilon - 1.0) * g / (sc.noise + interference));
    }
    out
}
