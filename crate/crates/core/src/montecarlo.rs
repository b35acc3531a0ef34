//! Event-level simulator: Poisson drops of BSs and UEs on a torus, per-link
//! LoS marks, smallest-path-loss association, fractional power control and
//! fading, sampled as uplink SINR at the BS serving a typical UE.
//!
//! Each drop builds one network realization and then observes
//! `ues_per_drop` typical UEs: a UE placed uniformly at random associates
//! with its best BS, which schedules it; every other non-empty BS schedules
//! one of its own UEs picked uniformly, and those UEs interfere from their
//! true positions.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

#[allow(unused_imports)]
use crate::math::*;
use crate::pathloss::{LinkType, LosProfile, PathLossModel};
use crate::scenario::{Fading, NetworkScenario};
use crate::{Error, Result};

/// Expected number of BSs per drop.
pub const DEFAULT_TARGET_BS: f64 = 2000.0;

/// A point in the square `[0, side)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Square region with wrap-around distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    side: f64,
}

impl Torus {
    pub fn new(side: f64) -> Result<Self> {
        if side > 0.0 && side.is_finite() {
            Ok(Torus { side })
        } else {
            Err(Error::domain("region side", side, "finite and > 0"))
        }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    #[inline]
    fn wrap(&self, d: f64) -> f64 {
        let d = d.abs();
        if d > 0.5 * self.side {
            self.side - d
        } else {
            d
        }
    }

    /// Minimum-image distance.
    #[inline]
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        self.wrap(a.x - b.x).hypot(self.wrap(a.y - b.y))
    }

    pub fn uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point {
            x: rng.random::<f64>() * self.side,
            y: rng.random::<f64>() * self.side,
        }
    }
}

/// Side length giving about `target_bs` BSs at density `lambda`, but at
/// least four LoS breakpoints across.
pub fn region_side(scenario: &NetworkScenario, target_bs: f64) -> f64 {
    let floor = 4.0 * scenario.profile.d1().unwrap_or(0.0);
    (target_bs / scenario.lambda).sqrt().max(floor)
}

/// Poisson number of uniform points with the given intensity.
pub fn sample_hppp<R: Rng + ?Sized>(
    intensity: f64,
    region: &Torus,
    rng: &mut R,
) -> Result<Vec<Point>> {
    let mean = intensity * region.area();
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::domain("intensity", intensity, "finite and > 0"));
    }
    let n = Poisson::new(mean)
        .map_err(|_| Error::domain("mean count", mean, "valid Poisson mean"))?
        .sample(rng) as usize;
    Ok((0..n).map(|_| region.uniform(rng)).collect())
}

/// Channel power gain with unit mean.
pub fn draw_fading<R: Rng + ?Sized>(fading: &Fading, rng: &mut R) -> f64 {
    match *fading {
        Fading::Rayleigh => Exp1.sample(rng),
        Fading::Ricean { k } => {
            let los = (k / (k + 1.0)).sqrt();
            let sd = (0.5 / (k + 1.0)).sqrt();
            let i: f64 = StandardNormal.sample(rng);
            let q: f64 = StandardNormal.sample(rng);
            let re = los + sd * i;
            let im = sd * q;
            re * re + im * im
        }
    }
}

#[inline]
fn draw_mark<R: Rng + ?Sized>(profile: &LosProfile, d: f64, rng: &mut R) -> LinkType {
    let p = profile.los_prob(d);
    if p > 0.0 && rng.random::<f64>() < p {
        LinkType::Los
    } else {
        LinkType::Nlos
    }
}

/// Largest distance at which any link type could still beat path loss
/// `zeta`.
#[inline]
fn reach(model: &PathLossModel, profile: &LosProfile, zeta: f64) -> f64 {
    let nlos = model.inverse(LinkType::Nlos, zeta);
    let los_end = match profile {
        LosProfile::Exponential { r2, .. } => profile.d1().unwrap_or(0.0).max(r2 * (5e30f64).ln()),
        _ => profile.los_support_end(),
    };
    if los_end > 0.0 {
        nlos.max(model.inverse(LinkType::Los, zeta).min(los_end))
    } else {
        nlos
    }
}

/// Uniform grid of BS indices on the torus; the cell count per side is odd
/// so that rings around any cell never overlap.
#[derive(Debug, Clone)]
struct BsGrid {
    n: usize,
    cell: f64,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl BsGrid {
    fn new(region: &Torus, bs: &[Point], lambda: f64) -> Self {
        let mut n = ((region.side * lambda.sqrt()).ceil() as usize).max(1);
        if n % 2 == 0 {
            n += 1;
        }
        let cell = region.side / n as f64;
        let mut counts = vec![0u32; n * n + 1];
        let keys: Vec<usize> = bs.iter().map(|p| Self::key_of(n, cell, *p)).collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 0..n * n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; bs.len()];
        for (i, &k) in keys.iter().enumerate() {
            items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        BsGrid {
            n,
            cell,
            start: counts,
            items,
        }
    }

    #[inline]
    fn coord(n: usize, cell: f64, v: f64) -> usize {
        ((v / cell) as usize).min(n - 1)
    }

    #[inline]
    fn key_of(n: usize, cell: f64, p: Point) -> usize {
        Self::coord(n, cell, p.y) * n + Self::coord(n, cell, p.x)
    }

    #[inline]
    fn cell_items(&self, cx: usize, cy: usize) -> &[u32] {
        let k = cy * self.n + cx;
        &self.items[self.start[k] as usize..self.start[k + 1] as usize]
    }
}

/// Outcome of one association.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub bs: u32,
    pub link: LinkType,
    pub distance: f64,
    pub zeta: f64,
}

/// Positions plus a grid index, shared by association routines.
#[derive(Debug, Clone)]
struct Layout<'a> {
    region: Torus,
    bs: &'a [Point],
    grid: BsGrid,
    model: &'a PathLossModel,
    profile: &'a LosProfile,
}

impl Layout<'_> {
    /// Smallest-path-loss BS for a UE at `p`. Rings of grid cells are
    /// scanned outwards until no unseen BS can win; every examined link's
    /// mark is appended to `marks`. Ties go to the lower BS index.
    fn associate<R: Rng + ?Sized>(
        &self,
        p: Point,
        rng: &mut R,
        marks: &mut Vec<(u32, LinkType)>,
    ) -> Association {
        let g = &self.grid;
        let n = g.n as isize;
        let h = g.cell;
        let cx = BsGrid::coord(g.n, h, p.x) as isize;
        let cy = BsGrid::coord(g.n, h, p.y) as isize;
        let fx = p.x - cx as f64 * h;
        let fy = p.y - cy as f64 * h;
        let mut best = Association {
            bs: u32::MAX,
            link: LinkType::Nlos,
            distance: f64::INFINITY,
            zeta: f64::INFINITY,
        };
        let mut limit = f64::INFINITY;
        let kmax = (n - 1) / 2;
        for k in 0..=kmax {
            if k > 0 {
                let kf = (k - 1) as f64;
                let lb = (fx + kf * h)
                    .min((kf + 1.0) * h - fx)
                    .min(fy + kf * h)
                    .min((kf + 1.0) * h - fy);
                if lb > limit {
                    break;
                }
            }
            for dy in -k..=k {
                let step = if dy == -k || dy == k { 1 } else { 2 * k.max(1) };
                let mut dx = -k;
                while dx <= k {
                    let gx = (cx + dx).rem_euclid(n) as usize;
                    let gy = (cy + dy).rem_euclid(n) as usize;
                    for &b in g.cell_items(gx, gy) {
                        let d = self.region.distance(p, self.bs[b as usize]);
                        if d > limit {
                            continue;
                        }
                        let link = draw_mark(self.profile, d, rng);
                        marks.push((b, link));
                        let z = self.model.attenuation(d, link);
                        if z < best.zeta || (z == best.zeta && b < best.bs) {
                            best = Association {
                                bs: b,
                                link,
                                distance: d,
                                zeta: z,
                            };
                            limit = reach(self.model, self.profile, z);
                        }
                    }
                    dx += step;
                }
            }
        }
        best
    }
}

/// One network realization.
#[derive(Debug, Clone)]
pub struct NetworkDrop {
    pub region: Torus,
    pub bs_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    /// Serving BS of every UE.
    pub association: Vec<Association>,
    /// Active UE of every BS, `None` for empty BSs.
    pub active_ues: Vec<Option<u32>>,
    mark_start: Vec<u32>,
    marks: Vec<(u32, LinkType)>,
}

impl NetworkDrop {
    /// LoS marks sampled while associating UE `ue`, as `(bs, link)` pairs.
    pub fn examined_links(&self, ue: usize) -> &[(u32, LinkType)] {
        &self.marks[self.mark_start[ue] as usize..self.mark_start[ue + 1] as usize]
    }
}

fn draw_bs<R: Rng + ?Sized>(lambda: f64, region: &Torus, rng: &mut R) -> Result<Vec<Point>> {
    for _ in 0..1000 {
        let bs = sample_hppp(lambda, region, rng)?;
        if !bs.is_empty() {
            return Ok(bs);
        }
    }
    Err(Error::domain(
        "lambda·area",
        lambda * region.area(),
        "large enough to place a BS",
    ))
}

/// Drops BSs and UEs on `region` and associates every UE. UEs arrive in
/// random order, and the first UE to reach a BS becomes its active UE,
/// which is a uniform pick among the BS's UEs.
pub fn build_drop<R: Rng + ?Sized>(
    scenario: &NetworkScenario,
    region: Torus,
    rng: &mut R,
) -> Result<NetworkDrop> {
    scenario.validate()?;
    let bs = draw_bs(scenario.lambda, &region, rng)?;
    let ues = sample_hppp(scenario.lambda * scenario.ue_density_ratio, &region, rng)?;
    let layout = Layout {
        region,
        bs: &bs,
        grid: BsGrid::new(&region, &bs, scenario.lambda),
        model: &scenario.model,
        profile: &scenario.profile,
    };
    let mut association = Vec::with_capacity(ues.len());
    let mut active = vec![None; bs.len()];
    let mut marks = Vec::with_capacity(ues.len() * 4);
    let mut mark_start = Vec::with_capacity(ues.len() + 1);
    mark_start.push(0u32);
    for (i, &p) in ues.iter().enumerate() {
        let a = layout.associate(p, rng, &mut marks);
        mark_start.push(marks.len() as u32);
        if active[a.bs as usize].is_none() {
            active[a.bs as usize] = Some(i as u32);
        }
        association.push(a);
    }
    Ok(NetworkDrop {
        region,
        bs_positions: bs,
        ue_positions: ues,
        association,
        active_ues: active,
        mark_start,
        marks,
    })
}

/// Monte Carlo sizing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    /// Network realizations.
    pub drops: usize,
    /// Typical UEs observed per realization.
    pub ues_per_drop: usize,
    /// Expected BS count per realization.
    pub target_bs: f64,
    /// Overrides the region side, km.
    pub region_side: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            drops: 200,
            ues_per_drop: 500,
            target_bs: DEFAULT_TARGET_BS,
            region_side: None,
        }
    }
}

impl McConfig {
    /// At least `samples` observations in drops of `ues_per_drop`.
    pub fn with_samples(samples: usize) -> Self {
        let d = McConfig::default();
        McConfig {
            drops: samples.div_ceil(d.ues_per_drop).max(1),
            ..d
        }
    }

    pub fn samples(&self) -> usize {
        self.drops * self.ues_per_drop
    }
}

/// SINR samples with the inputs that reproduce them.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSampleSet {
    pub samples: Vec<f64>,
    pub seed: u64,
    pub config: McConfig,
    pub scenario: NetworkScenario,
}

/// Random stream of one drop: the master seed selects the key, the drop
/// index the ChaCha stream.
pub fn drop_rng(seed: u64, drop_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(drop_index);
    rng
}

/// Interferer of one drop: its position and transmit power.
#[derive(Debug, Clone, Copy)]
struct Transmitter {
    pos: Point,
    power: f64,
}

/// SINR observations of one drop.
pub fn simulate_drop(
    scenario: &NetworkScenario,
    cfg: &McConfig,
    seed: u64,
    drop_index: u64,
) -> Result<Vec<f64>> {
    scenario.validate()?;
    let mut rng = drop_rng(seed, drop_index);
    let side = cfg
        .region_side
        .unwrap_or_else(|| region_side(scenario, cfg.target_bs));
    let region = Torus::new(side)?;
    let model = &scenario.model;
    let profile = &scenario.profile;
    let pc = scenario.power;

    let bs = draw_bs(scenario.lambda, &region, &mut rng)?;
    let layout = Layout {
        region,
        bs: &bs,
        grid: BsGrid::new(&region, &bs, scenario.lambda),
        model,
        profile,
    };

    // Active UEs only: once every BS has one, later arrivals change nothing.
    let ue_mean = scenario.lambda * scenario.ue_density_ratio * region.area();
    let n_ue = Poisson::new(ue_mean)
        .map_err(|_| Error::domain("UE mean count", ue_mean, "valid Poisson mean"))?
        .sample(&mut rng) as usize;
    let mut tx: Vec<Option<Transmitter>> = vec![None; bs.len()];
    // (serving BS of the interferer, examined BS, mark) for active UEs.
    let mut known: Vec<(u32, u32, LinkType)> = Vec::new();
    let mut scratch = Vec::new();
    let mut filled = 0usize;
    for _ in 0..n_ue {
        if filled == bs.len() {
            break;
        }
        let p = region.uniform(&mut rng);
        scratch.clear();
        let a = layout.associate(p, &mut rng, &mut scratch);
        let slot = &mut tx[a.bs as usize];
        if slot.is_none() {
            *slot = Some(Transmitter {
                pos: p,
                power: pc.p0 * a.zeta.powf(pc.epsilon),
            });
            filled += 1;
            known.extend(scratch.iter().map(|&(b, l)| (b, a.bs, l)));
        }
    }
    // Index cached marks by the examined BS.
    known.sort_unstable_by_key(|&(b, z, _)| (b, z));
    let mut known_start = vec![0usize; bs.len() + 1];
    for &(b, _, _) in &known {
        known_start[b as usize + 1] += 1;
    }
    for i in 0..bs.len() {
        known_start[i + 1] += known_start[i];
    }

    let mut out = Vec::with_capacity(cfg.ues_per_drop);
    // Marks of interference paths into the serving BS, per interferer's BS.
    let mut path_marks: Vec<Option<LinkType>> = vec![None; bs.len()];
    let mut observations: Vec<(Point, Association)> = Vec::with_capacity(cfg.ues_per_drop);
    for _ in 0..cfg.ues_per_drop {
        let p = region.uniform(&mut rng);
        scratch.clear();
        let a = layout.associate(p, &mut rng, &mut scratch);
        observations.push((p, a));
    }
    // Group by serving BS so each interference path's mark is drawn once.
    let mut order: Vec<usize> = (0..observations.len()).collect();
    order.sort_by_key(|&i| (observations[i].1.bs, i));
    let mut sinr = vec![0.0; observations.len()];
    let mut current = u32::MAX;
    for &i in &order {
        let (_, a) = observations[i];
        let b0 = a.bs as usize;
        if a.bs != current {
            current = a.bs;
            path_marks.iter_mut().for_each(|m| *m = None);
            for &(_, z, l) in &known[known_start[b0]..known_start[b0 + 1]] {
                path_marks[z as usize] = Some(l);
            }
            for (z, t) in tx.iter().enumerate() {
                if let Some(t) = t {
                    if z != b0 && path_marks[z].is_none() {
                        let d = region.distance(t.pos, bs[b0]);
                        path_marks[z] = Some(draw_mark(profile, d, &mut rng));
                    }
                }
            }
        }
        let mut interference = 0.0;
        for (z, t) in tx.iter().enumerate() {
            if let (Some(t), Some(l)) = (t, path_marks[z]) {
                if z == b0 {
                    continue;
                }
                let d = region.distance(t.pos, bs[b0]);
                let g = draw_fading(&scenario.fading, &mut rng);
                interference += t.power * g / model.attenuation(d, l);
            }
        }
        let g = draw_fading(&scenario.fading, &mut rng);
        let signal = pc.p0 * a.zeta.powf(pc.epsilon - 1.0) * g;
        sinr[i] = signal / (scenario.noise + interference);
    }
    out.extend(sinr);
    Ok(out)
}

/// SINR samples over `cfg.drops` drops, in drop order.
pub fn simulate_sinr(
    scenario: &NetworkScenario,
    cfg: &McConfig,
    seed: u64,
) -> Result<SinrSampleSet> {
    if cfg.drops == 0 || cfg.ues_per_drop == 0 {
        return Err(Error::config("drops and ues_per_drop must be ≥ 1"));
    }
    let mut samples = Vec::with_capacity(cfg.samples());
    for d in 0..cfg.drops {
        samples.extend(simulate_drop(scenario, cfg, seed, d as u64)?);
    }
    Ok(SinrSampleSet {
        samples,
        seed,
        config: *cfg,
        scenario: scenario.clone(),
    })
}

/// Fraction of samples strictly above `t` with a 95% normal-approximation
/// half-width.
pub fn empirical_ccdf(samples: &[f64], t: f64) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::domain("sample count", 0.0, "≥ 1"));
    }
    let n = samples.len() as f64;
    let p = samples.iter().filter(|&&s| s > t).count() as f64 / n;
    Ok((p, 1.96 * (p * (1.0 - p) / n).sqrt()))
}

/// `λ·mean(log2(1+SINR)·1{SINR > T0})`.
pub fn empirical_ase(samples: &[f64], lambda: f64, t0: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("sample count", 0.0, "≥ 1"));
    }
    let sum: f64 = samples
        .iter()
        .filter(|&&s| s > t0)
        .map(|&s| (1.0 + s).log2())
        .sum();
    Ok(lambda * sum / samples.len() as f64)
}

/// Association of a typical UE at the origin of an infinite Poisson field.
///
/// BS distances are generated in increasing order (`πλr_k²` are the arrival
/// times of a unit-rate Poisson process) and marked on the fly, so the
/// search stops exactly when no farther BS can win.
pub fn sample_serving<R: Rng + ?Sized>(scenario: &NetworkScenario, rng: &mut R) -> (LinkType, f64) {
    let model = &scenario.model;
    let profile = &scenario.profile;
    let pl = PI * scenario.lambda;
    let mut arrival = 0.0;
    let mut best = (LinkType::Nlos, f64::INFINITY, f64::INFINITY);
    let mut limit = f64::INFINITY;
    loop {
        let e: f64 = Exp1.sample(rng);
        arrival += e;
        let d = (arrival / pl).sqrt();
        if d > limit {
            return (best.0, best.1);
        }
        let link = draw_mark(profile, d, rng);
        let z = model.attenuation(d, link);
        if z < best.2 {
            best = (link, d, z);
            limit = reach(model, profile, z);
        }
    }
}

/// Seeded RNG for auxiliary sampling.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
