use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use crate::construct::Method;

use super::{run_experiment, ExperimentOptions, ExperimentRow, Family, FamilySpec};

/// Largest `|E_T| * parts` solved exhaustively by the oracle corpus.
pub const ORACLE_BITS: usize = 24;

/// Multiplier applied to the largest observed ratio.
pub const HEADROOM: f64 = 1.25;

/// Fitted constants: each is the largest ratio seen on the corpus times
/// [`HEADROOM`], rounded up to four decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub instances: usize,
    pub headroom: f64,
    /// `block <= C * d_T`
    pub block_per_d: f64,
    /// `congestion <= C * d_T * log2(n)^2`
    pub congestion_per_d_log2n: f64,
    /// `clique-sum depth <= C * log2(n)^2`
    pub depth_per_log2n: f64,
    /// `aggregate rounds <= C * (block * d_T + congestion + log2 n)`
    pub rounds_per_quality: f64,
    /// `quality <= C * optimal quality`, when the corpus has oracle rows.
    pub oracle_ratio: Option<f64>,
}

/// Ratios of one row against the fitted forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios {
    pub block_per_d: f64,
    pub congestion_per_d_log2n: f64,
    pub depth_per_log2n: f64,
    pub rounds_per_quality: f64,
    pub oracle_ratio: Option<f64>,
}

/// `ceil(log2 n)`, at least 1.
pub fn log2_ceil(n: usize) -> f64 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as f64
}

impl Ratios {
    pub fn of(row: &ExperimentRow) -> Ratios {
        let d = row.d_t.max(1) as f64;
        let lg = log2_ceil(row.n);
        let q = row.block as f64 * d + row.congestion as f64 + lg;
        Ratios {
            block_per_d: row.block as f64 / d,
            congestion_per_d_log2n: row.congestion as f64 / (d * lg * lg),
            depth_per_log2n: row.decomposition_depth as f64 / (lg * lg),
            rounds_per_quality: row.aggregate_rounds as f64 / q,
            oracle_ratio: row.optimal_quality.map(|opt| row.quality as f64 / opt.max(1) as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub constants: Calibration,
    /// Metrics whose observed ratio exceeds the stored constant.
    pub regressions: Vec<String>,
}

fn headroom(x: f64) -> f64 {
    (x * HEADROOM * 1e4).ceil() / 1e4
}

/// Fits constants over the error-free rows, and compares the observed
/// maxima with `stored` when given.
pub fn calibrate(rows: &[ExperimentRow], stored: Option<&Calibration>) -> Result<CalibrationOutcome> {
    let ok: Vec<Ratios> = rows.iter().filter(|r| r.error.is_empty()).map(Ratios::of).collect();
    if ok.is_empty() {
        return Err(Error::Empty("calibration needs at least one successful row"));
    }
    let max = |f: fn(&Ratios) -> f64| ok.iter().map(f).fold(0.0, f64::max);
    let oracle = ok.iter().filter_map(|r| r.oracle_ratio).reduce(f64::max);
    let observed = [
        ("block_per_d", max(|r| r.block_per_d)),
        ("congestion_per_d_log2n", max(|r| r.congestion_per_d_log2n)),
        ("depth_per_log2n", max(|r| r.depth_per_log2n)),
        ("rounds_per_quality", max(|r| r.rounds_per_quality)),
    ];
    let mut regressions = Vec::new();
    if let Some(old) = stored {
        let limits = [old.block_per_d, old.congestion_per_d_log2n, old.depth_per_log2n, old.rounds_per_quality];
        for ((name, seen), limit) in observed.iter().zip(limits) {
            if *seen > limit {
                regressions.push(format!("{name}: observed {seen:.4} exceeds {limit:.4}"));
            }
        }
        if let (Some(seen), Some(limit)) = (oracle, old.oracle_ratio) {
            if seen > limit {
                regressions.push(format!("oracle_ratio: observed {seen:.4} exceeds {limit:.4}"));
            }
        }
    }
    let constants = Calibration {
        instances: ok.len(),
        headroom: HEADROOM,
        block_per_d: headroom(observed[0].1),
        congestion_per_d_log2n: headroom(observed[1].1),
        depth_per_log2n: headroom(observed[2].1),
        rounds_per_quality: headroom(observed[3].1),
        oracle_ratio: oracle.map(headroom),
    };
    Ok(CalibrationOutcome { constants, regressions })
}

/// The standard corpus: every family over a range of sizes (n up to about
/// 2000), several seeds each, with and without random weights. Seeds are
/// offset by `seed`.
pub fn default_corpus(seed: u64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    let mut push = |family: Family, params: &[(&str, u64)], seeds: u64| {
        for s in 0..seeds {
            let mut spec = FamilySpec::new(family, seed.wrapping_add(s));
            for &(k, v) in params {
                spec = spec.with(k, v);
            }
            out.push(spec.with("weighted", s % 2));
        }
    };
    for k in [3, 4, 6, 8, 12, 16, 24, 32, 44] {
        push(Family::Grid, &[("k", k)], 8);
    }
    for n in [3, 8, 16, 64, 256, 1024, 2000] {
        push(Family::Cycle, &[("n", n), ("parts", 1 + n / 16)], 8);
    }
    for n in [9, 16, 64, 128, 512, 2000] {
        push(Family::Wheel, &[("n", n)], 8);
    }
    for n in [16, 64, 256, 1000, 2000] {
        push(Family::RandomPlanar, &[("n", n), ("parts", 2 + n / 64)], 16);
    }
    for k in [4, 8, 12, 16, 24, 32, 44] {
        for apices in [1, 2, 3] {
            push(Family::ApexedPlanar, &[("k", k), ("apices", apices)], 4);
        }
    }
    for k in [6, 8, 12, 16, 24] {
        for depth in [1, 2, 3] {
            push(Family::PlanarWithVortex, &[("k", k), ("depth", depth), ("internals", 2 + depth)], 4);
        }
    }
    for bags in [8, 32, 128, 512, 1000] {
        for drop in [0, 30] {
            push(Family::CliquesumChain, &[("bags", bags), ("drop", drop), ("parts", 2 + bags / 32)], 6);
        }
        for caterpillar in [0, 1] {
            push(
                Family::CliquesumTree,
                &[("bags", bags), ("caterpillar", caterpillar), ("parts", 2 + bags / 32)],
                6,
            );
        }
    }
    out
}

/// Tiny instances of every family small enough for the exhaustive oracle
/// (most have `|E_T| * parts <= ORACLE_BITS`).
pub fn oracle_corpus(seed: u64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    let mut push = |family: Family, params: &[(&str, u64)]| {
        for s in 0..4 {
            let mut spec = FamilySpec::new(family, seed.wrapping_add(s));
            for &(k, v) in params {
                spec = spec.with(k, v);
            }
            out.push(spec.with("weighted", s % 2));
        }
    };
    for (rows, cols, seg) in [(2, 2, 2), (2, 3, 2), (2, 3, 3), (3, 3, 3)] {
        push(Family::Grid, &[("rows", rows), ("cols", cols), ("seg", seg)]);
    }
    for n in 3..=8 {
        for parts in 1..=3 {
            push(Family::Cycle, &[("n", n), ("parts", parts)]);
        }
    }
    for n in 4..=7 {
        push(Family::Wheel, &[("n", n)]);
    }
    for n in 4..=7 {
        for parts in [2, 3] {
            push(Family::RandomPlanar, &[("n", n), ("parts", parts)]);
        }
    }
    for attach in 2..=4 {
        push(Family::ApexedPlanar, &[("k", 2), ("apices", 1), ("attach", attach), ("seg", 2)]);
    }
    for bags in 1..=4 {
        for parts in [2, 3] {
            push(Family::CliquesumChain, &[("bags", bags), ("parts", parts)]);
        }
    }
    for bags in [2, 3] {
        push(Family::CliquesumTree, &[("bags", bags), ("parts", 2)]);
    }
    out
}

/// The rows the stored constants are fitted on: the default corpus under
/// the automatic method, plus the oracle corpus under the automatic and
/// treewidth methods with the exhaustive optimum. No MST, no timing.
pub fn calibration_rows(seed: u64) -> Vec<ExperimentRow> {
    let opts = ExperimentOptions { mst: false, ..ExperimentOptions::default() };
    let mut rows = run_experiment(&default_corpus(seed), &[Method::Auto], 1, &opts);
    let oracle = ExperimentOptions { oracle_bits: ORACLE_BITS, ..opts };
    rows.extend(run_experiment(&oracle_corpus(seed), &[Method::Auto, Method::Treewidth], 1, &oracle));
    rows
}
