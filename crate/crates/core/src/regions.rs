//! Rate regions for each CSI scenario, built as convex hulls of the
//! per-policy pentagons (or quadrilaterals in the cooperative case).

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::{cooperative_kernel, strategy_channel, RateTriple, StrategyKernel};
use crate::model::equivalent_channel;
use crate::optimize::{maximize_cooperative_kernel, maximize_team_objective, team_weights, OptimizerConfig};
use crate::spec_file::ChannelModel;

pub const DEFAULT_LAMBDA_SAMPLES: usize = 33;

/// Which coding theorem the region is computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Noisy CSI at both encoders, complete CSI at the receiver.
    CausalNoisyCsitFullCsir,
    /// Noisy CSI at the receiver, reduced through the equivalent channel.
    NoisyCsir,
    /// Encoder CSI given by deterministic functions of the receiver CSI.
    DeterministicCsitOfCsir,
    /// Delayed CSI at both encoders: the region is over input distributions.
    Delayed,
    /// Common message at both encoders, private message at encoder b.
    Cooperative,
    /// Cooperative channel with noisy receiver CSI.
    CooperativeNoisyCsir,
}

impl ScenarioKind {
    pub fn parse(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(name.to_string()))
            .map_err(|_| Error::InvalidConfig(format!("unknown scenario `{name}`")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::CausalNoisyCsitFullCsir => "causal_noisy_csit_full_csir",
            ScenarioKind::NoisyCsir => "noisy_csir",
            ScenarioKind::DeterministicCsitOfCsir => "deterministic_csit_of_csir",
            ScenarioKind::Delayed => "delayed",
            ScenarioKind::Cooperative => "cooperative",
            ScenarioKind::CooperativeNoisyCsir => "cooperative_noisy_csir",
        }
    }

    pub fn is_cooperative(&self) -> bool {
        matches!(self, ScenarioKind::Cooperative | ScenarioKind::CooperativeNoisyCsir)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioDescriptor {
    pub kind: ScenarioKind,
    /// CSI delays. Recorded only; the regions do not depend on them.
    #[serde(default)]
    pub delay_a: u32,
    #[serde(default)]
    pub delay_b: u32,
    /// Lookup tables `s^r -> s^a` and `s^r -> s^b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_a: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_b: Option<Vec<usize>>,
}

impl ScenarioDescriptor {
    pub fn new(kind: ScenarioKind) -> Self {
        let delay = match kind {
            ScenarioKind::Delayed => 1,
            ScenarioKind::Cooperative | ScenarioKind::CooperativeNoisyCsir => 1,
            _ => 0,
        };
        ScenarioDescriptor {
            kind,
            delay_a: delay,
            delay_b: if kind == ScenarioKind::Delayed { 1 } else { 0 },
            f_a: None,
            f_b: None,
        }
    }

    pub fn deterministic(f_a: Vec<usize>, f_b: Vec<usize>) -> Self {
        ScenarioDescriptor {
            f_a: Some(f_a),
            f_b: Some(f_b),
            ..Self::new(ScenarioKind::DeterministicCsitOfCsir)
        }
    }

    /// Default scenario for a model: full CSIR for plain channels, noisy CSIR
    /// for noisy-receiver models.
    pub fn default_for(model: &ChannelModel) -> Self {
        match model {
            ChannelModel::FsMac(_) => Self::new(ScenarioKind::CausalNoisyCsitFullCsir),
            ChannelModel::NoisyReceiver(_) => Self::new(ScenarioKind::NoisyCsir),
        }
    }
}

/// A scenario reduced to a kernel and the policy structure optimized over it.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    /// Product team policies over `(t_a, t_b)`.
    Team(StrategyKernel),
    /// Joint policies over `(x_a, t_b)`.
    Cooperative(StrategyKernel),
}

impl Problem {
    pub fn kernel(&self) -> &StrategyKernel {
        match self {
            Problem::Team(k) | Problem::Cooperative(k) => k,
        }
    }
}

fn mismatch(kind: ScenarioKind, needs: &str) -> Error {
    Error::ScenarioMismatch(format!("scenario {} requires {needs}", kind.name()))
}

/// Checks scenario/model consistency and builds the kernel to optimize over.
pub fn resolve_scenario(model: &ChannelModel, scenario: &ScenarioDescriptor, limit: usize) -> Result<Problem> {
    use ScenarioKind::*;
    let kind = scenario.kind;
    if kind != DeterministicCsitOfCsir && (scenario.f_a.is_some() || scenario.f_b.is_some()) {
        return Err(mismatch(kind, "no CSIT maps"));
    }
    match (kind, model) {
        (CausalNoisyCsitFullCsir, ChannelModel::FsMac(c)) => Ok(Problem::Team(strategy_channel(c, limit)?)),
        (NoisyCsir, ChannelModel::NoisyReceiver(m)) => Ok(Problem::Team(strategy_channel(&equivalent_channel(m)?, limit)?)),
        (DeterministicCsitOfCsir, ChannelModel::NoisyReceiver(m)) => {
            let (f_a, f_b) = match (&scenario.f_a, &scenario.f_b) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(mismatch(kind, "maps fA and fB")),
            };
            let size = |f: &[usize]| f.iter().max().map_or(1, |m| m + 1);
            let reduced = m.with_deterministic_csit(f_a, size(f_a), f_b, size(f_b))?;
            Ok(Problem::Team(strategy_channel(&equivalent_channel(&reduced)?, limit)?))
        }
        (Delayed, model) => {
            if scenario.delay_a == 0 || scenario.delay_b == 0 {
                return Err(mismatch(kind, "delays of at least 1"));
            }
            Ok(Problem::Team(StrategyKernel::from_inputs(&model.reduced()?)))
        }
        (Cooperative, ChannelModel::FsMac(c)) => {
            if scenario.delay_a == 0 {
                return Err(mismatch(kind, "encoder a to see delayed CSI (delayA >= 1)"));
            }
            Ok(Problem::Cooperative(cooperative_kernel(c, limit)?))
        }
        (CooperativeNoisyCsir, ChannelModel::NoisyReceiver(m)) => {
            if m.alphabets().n_sa != 1 {
                return Err(mismatch(kind, "an uninformed encoder a (nSa = 1)"));
            }
            Ok(Problem::Cooperative(cooperative_kernel(&equivalent_channel(m)?, limit)?))
        }
        (kind, ChannelModel::FsMac(_)) => Err(mismatch(kind, "a noisy_receiver model")),
        (kind, ChannelModel::NoisyReceiver(_)) => Err(mismatch(kind, "an fsmac model")),
    }
}

/// One optimized policy's rate bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionPiece {
    pub lambda: f64,
    /// For cooperative pieces `r_a` is unused and set to `r_sum`.
    pub triple: RateTriple,
    pub vertices: Vec<(f64, f64)>,
    pub source: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRegion {
    /// Counterclockwise hull vertices, starting at the lowest-leftmost point.
    pub hull: Vec<(f64, f64)>,
    pub pieces: Vec<RegionPiece>,
    pub outer_sum_rate: Option<f64>,
}

impl RateRegion {
    /// Largest `R_b` on the hull at abscissa `ra`, or `None` outside its range.
    pub fn max_rb_at(&self, ra: f64, tol: f64) -> Option<f64> {
        upper_boundary(&self.hull, ra, tol)
    }

    /// Whether `p` is dominated by a point of the hull (the regions are
    /// closed under decreasing either rate).
    pub fn dominates(&self, p: (f64, f64), tol: f64) -> bool {
        match self.max_rb_at(p.0.max(0.0), tol) {
            Some(rb) => p.1 <= rb + tol,
            None => false,
        }
    }

    pub fn max_sum(&self) -> f64 {
        self.hull.iter().map(|&(a, b)| a + b).fold(0.0, f64::max)
    }
}

/// Largest `y` on a convex polygon at abscissa `x`.
pub fn upper_boundary(hull: &[(f64, f64)], x: f64, tol: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    let n = hull.len();
    for i in 0..n {
        let (p, q) = (hull[i], hull[(i + 1) % n]);
        let (lo, hi) = if p.0 <= q.0 { (p, q) } else { (q, p) };
        if x < lo.0 - tol || x > hi.0 + tol {
            continue;
        }
        let y = if hi.0 - lo.0 <= 0.0 {
            lo.1.max(hi.1)
        } else {
            let t = ((x - lo.0) / (hi.0 - lo.0)).clamp(0.0, 1.0);
            lo.1 + t * (hi.1 - lo.1)
        };
        best = Some(best.map_or(y, |b: f64| b.max(y)));
    }
    best
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Coordinates within this distance of zero are snapped to zero, and hull
/// points closer than this are merged.
pub const HULL_TOLERANCE: f64 = 1e-12;

/// Counterclockwise convex hull by the monotone chain; duplicate and
/// collinear points (up to [`HULL_TOLERANCE`]) are dropped.
pub fn convex_hull_2d(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if let Some(i) = points.iter().position(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::NonFinitePoint(i));
    }
    let snap = |v: f64| if v.abs() < HULL_TOLERANCE { 0.0 } else { v };
    let mut sorted: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (snap(x), snap(y))).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for p in sorted {
        match pts.last_mut() {
            Some(last) if (last.0 - p.0).abs() <= HULL_TOLERANCE && (last.1 - p.1).abs() <= HULL_TOLERANCE => {
                *last = (last.0.max(p.0), last.1.max(p.1));
            }
            _ => pts.push(p),
        }
    }
    if pts.len() < 3 {
        return Ok(pts);
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= HULL_TOLERANCE {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= HULL_TOLERANCE {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(lower)
}

/// Whether `p` lies in the convex polygon `hull` within `tol`.
pub fn hull_contains(hull: &[(f64, f64)], p: (f64, f64), tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => (hull[0].0 - p.0).hypot(hull[0].1 - p.1) <= tol,
        2 => segment_distance(hull[0], hull[1], p) <= tol,
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            cross(a, b, p) >= -tol * len
        }),
    }
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a.0 + t * dx - p.0).hypot(a.1 + t * dy - p.1)
}

/// Signed distance of `p` outside a down-closed convex hull, with the outward
/// normal of the most violated facet.
pub fn hull_violation(hull: &[(f64, f64)], p: (f64, f64)) -> (f64, (f64, f64)) {
    if hull.len() < 3 {
        let max_x = hull.iter().map(|q| q.0).fold(0.0, f64::max);
        if p.0 > max_x {
            return (p.0 - max_x, (1.0, 0.0));
        }
        let ub = upper_boundary(hull, p.0, 0.0).unwrap_or(0.0);
        return (p.1 - ub, (1.0, 1.0));
    }
    let mut worst = (f64::NEG_INFINITY, (0.0, 0.0));
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        let n = (b.1 - a.1, a.0 - b.0);
        let len = n.0.hypot(n.1);
        if len == 0.0 {
            continue;
        }
        let d = (n.0 * (p.0 - a.0) + n.1 * (p.1 - a.1)) / len;
        if d > worst.0 {
            worst = (d, (n.0 / len, n.1 / len));
        }
    }
    worst
}

/// `lambdas` evenly spaced values `i / (lambdas - 1)` in `[0, 1]`.
pub fn lambda_grid(lambdas: usize) -> Vec<f64> {
    match lambdas {
        0 => Vec::new(),
        1 => vec![0.5],
        n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn optimize_piece(problem: &Problem, lambda: f64, config: &OptimizerConfig) -> Result<RegionPiece> {
    match problem {
        Problem::Team(k) => {
            let r = maximize_team_objective(k, team_weights(lambda), config)?;
            Ok(RegionPiece {
                lambda,
                triple: r.rates,
                vertices: r.rates.pentagon_vertices().to_vec(),
                source: "pentagon",
            })
        }
        Problem::Cooperative(k) => {
            let r = maximize_cooperative_kernel(k, lambda, config)?;
            Ok(RegionPiece {
                lambda,
                triple: RateTriple {
                    r_a: r.rates.r_sum,
                    r_b: r.rates.r_b,
                    r_sum: r.rates.r_sum,
                },
                vertices: r.rates.vertices().to_vec(),
                source: "cooperative",
            })
        }
    }
}

/// Traces the region boundary with one optimization per `lambda` and returns
/// the hull of all pieces together with the outer sum-rate line.
pub fn region_for_problem(problem: &Problem, lambdas: &[f64], config: &OptimizerConfig) -> Result<RateRegion> {
    let pieces: Vec<RegionPiece> = lambdas
        .par_iter()
        .map(|&l| optimize_piece(problem, l, config))
        .collect::<Result<Vec<_>>>()?;
    // every piece is itself feasible for the sum-rate problem
    let outer = pieces
        .iter()
        .map(|p| p.triple.r_sum)
        .fold(outer_sum_rate_for_problem(problem, config)?, f64::max);
    let mut points = vec![(0.0, 0.0)];
    points.extend(pieces.iter().flat_map(|p| p.vertices.iter().copied()));
    Ok(RateRegion {
        hull: convex_hull_2d(&points)?,
        pieces,
        outer_sum_rate: Some(outer),
    })
}

/// Adds pieces in the directions of hull facets violated by `targets` until
/// every target lies within `tol` of the hull or `max_refinements` pieces
/// have been added. Returns the number of pieces added.
pub fn refine_region(
    problem: &Problem,
    region: &mut RateRegion,
    targets: &[(f64, f64)],
    tol: f64,
    max_refinements: usize,
    config: &OptimizerConfig,
) -> Result<usize> {
    let mut added = 0;
    while added < max_refinements {
        let worst = targets
            .iter()
            .map(|&q| hull_violation(&region.hull, q))
            .fold(None, |acc: Option<(f64, (f64, f64))>, x| match acc {
                Some(b) if b.0 >= x.0 => Some(b),
                _ => Some(x),
            });
        let Some((d, n)) = worst else { break };
        if d <= tol {
            break;
        }
        let (nx, ny) = (n.0.max(0.0), n.1.max(0.0));
        let lambda = if nx + ny > 0.0 { nx / (nx + ny) } else { 0.5 };
        let piece = optimize_piece(problem, lambda, config)?;
        let mut points = region.hull.clone();
        points.extend(piece.vertices.iter().copied());
        region.hull = convex_hull_2d(&points)?;
        region.pieces.push(piece);
        added += 1;
    }
    Ok(added)
}

pub fn outer_sum_rate_for_problem(problem: &Problem, config: &OptimizerConfig) -> Result<f64> {
    match problem {
        Problem::Team(k) => Ok(maximize_team_objective(k, (1.0, 0.0, 0.0), config)?.value),
        Problem::Cooperative(k) => Ok(maximize_cooperative_kernel(k, 1.0, config)?.rates.r_sum),
    }
}

/// Inner-bound region of a scenario.
pub fn inner_bound_region(model: &ChannelModel, scenario: &ScenarioDescriptor, lambdas: &[f64], config: &OptimizerConfig) -> Result<RateRegion> {
    let problem = resolve_scenario(model, scenario, config.enumeration_limit)?;
    region_for_problem(&problem, lambdas, config)
}

/// Outer sum-rate bound, equal to the sum-rate capacity.
pub fn outer_sum_rate(model: &ChannelModel, scenario: &ScenarioDescriptor, config: &OptimizerConfig) -> Result<f64> {
    let problem = resolve_scenario(model, scenario, config.enumeration_limit)?;
    outer_sum_rate_for_problem(&problem, config)
}

/// Writes `lambda,Ra,Rb,Rsum,source`, one row per piece vertex.
pub fn write_pieces_csv(region: &RateRegion, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "lambda,Ra,Rb,Rsum,source")?;
    for piece in &region.pieces {
        for &(a, b) in &piece.vertices {
            writeln!(out, "{},{},{},{},{}", piece.lambda, a, b, piece.triple.r_sum, piece.source)?;
        }
    }
    Ok(())
}

/// Writes `Ra,Rb`, one row per hull vertex.
pub fn write_hull_csv(region: &RateRegion, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "Ra,Rb")?;
    for &(a, b) in &region.hull {
        writeln!(out, "{a},{b}")?;
    }
    Ok(())
}

/// Writes both CSV files.
pub fn save_region(region: &RateRegion, hull_path: &Path, pieces_path: &Path) -> Result<()> {
    let write = |path: &Path, f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf).expect("writing to memory");
        std::fs::write(path, buf).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    write(hull_path, &|b| write_hull_csv(region, b))?;
    write(pieces_path, &|b| write_pieces_csv(region, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_binary_multiplier, BinaryMultiplierSpec, FsMacChannel, StochasticKernel};
    use crate::rng::{role, Stream};

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 3,
            ..OptimizerConfig::default()
        }
    }

    fn xor() -> ChannelModel {
        ChannelModel::FsMac(FsMacChannel::without_csit(1, 2, 2, 2, vec![1.0], StochasticKernel::deterministic(&[0, 1, 1, 0], 2).unwrap()).unwrap())
    }

    #[test]
    fn hull_basics() {
        let tri = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        assert_eq!(convex_hull_2d(&tri).unwrap(), tri);
        let dup = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 0.0), (0.5, 0.0), (0.2, 0.2)];
        assert_eq!(convex_hull_2d(&dup).unwrap(), tri);
        assert!(matches!(convex_hull_2d(&[(f64::NAN, 0.0)]), Err(Error::NonFinitePoint(0))));
        assert_eq!(convex_hull_2d(&[(0.0, 0.0), (0.0, 0.0)]).unwrap(), vec![(0.0, 0.0)]);
    }

    #[test]
    fn random_points_inside_hull() {
        let mut rng = Stream::new(11, role::SAMPLING, 0);
        let pts: Vec<(f64, f64)> = (0..100).map(|_| (rng.next_f64(), rng.next_f64())).collect();
        let hull = convex_hull_2d(&pts).unwrap();
        for &p in &pts {
            assert!(hull_contains(&hull, p, 1e-12));
        }
        for i in 0..hull.len() {
            let (a, b, c) = (hull[i], hull[(i + 1) % hull.len()], hull[(i + 2) % hull.len()]);
            assert!(cross(a, b, c) > 0.0);
        }
    }

    #[test]
    fn xor_region_reaches_axes() {
        let r = inner_bound_region(&xor(), &ScenarioDescriptor::default_for(&xor()), &lambda_grid(5), &quick()).unwrap();
        assert!(r.hull.iter().any(|&(a, b)| (a - 1.0).abs() < 1e-6 && b.abs() < 1e-6));
        assert!(r.hull.iter().any(|&(a, b)| a.abs() < 1e-6 && (b - 1.0).abs() < 1e-6));
        assert!((r.max_sum() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn point_channel_region_is_origin() {
        let m = ChannelModel::FsMac(FsMacChannel::without_csit(1, 2, 2, 1, vec![1.0], StochasticKernel::constant_rows(4, &[1.0])).unwrap());
        let r = inner_bound_region(&m, &ScenarioDescriptor::default_for(&m), &lambda_grid(5), &quick()).unwrap();
        assert_eq!(r.hull, vec![(0.0, 0.0)]);
    }

    #[test]
    fn scenario_mismatches() {
        let nr = ChannelModel::NoisyReceiver(build_binary_multiplier(&BinaryMultiplierSpec { p_s: 0.5, p_r: 0.1 }).unwrap());
        let lim = 4096;
        assert!(matches!(
            resolve_scenario(&xor(), &ScenarioDescriptor::new(ScenarioKind::NoisyCsir), lim),
            Err(Error::ScenarioMismatch(_))
        ));
        assert!(matches!(
            resolve_scenario(&nr, &ScenarioDescriptor::new(ScenarioKind::Cooperative), lim),
            Err(Error::ScenarioMismatch(_))
        ));
        assert!(matches!(
            resolve_scenario(&nr, &ScenarioDescriptor::new(ScenarioKind::DeterministicCsitOfCsir), lim),
            Err(Error::ScenarioMismatch(_))
        ));
        let mut coop = ScenarioDescriptor::new(ScenarioKind::Cooperative);
        coop.delay_a = 0;
        assert!(matches!(resolve_scenario(&xor(), &coop, lim), Err(Error::ScenarioMismatch(_))));
        assert!(resolve_scenario(&nr, &ScenarioDescriptor::new(ScenarioKind::CooperativeNoisyCsir), lim).is_ok());
        assert!(resolve_scenario(&nr, &ScenarioDescriptor::deterministic(vec![0, 1], vec![0, 0]), lim).is_ok());
        assert_eq!(ScenarioKind::parse("delayed").unwrap(), ScenarioKind::Delayed);
        assert!(ScenarioKind::parse("bogus").is_err());
    }

    #[test]
    fn csv_headers() {
        let r = inner_bound_region(&xor(), &ScenarioDescriptor::default_for(&xor()), &[0.5], &quick()).unwrap();
        let mut buf = Vec::new();
        write_hull_csv(&r, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("Ra,Rb\n0,0\n"));
        let mut buf = Vec::new();
        write_pieces_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lambda,Ra,Rb,Rsum,source\n"));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn upper_boundary_of_triangle() {
        let tri = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        assert!((upper_boundary(&tri, 0.25, 0.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(upper_boundary(&tri, 1.5, 1e-9).is_none());
    }
}
