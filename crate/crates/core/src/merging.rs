//! Finite-horizon merging diagnostics.
//!
//! The distance between the conditional forecasts of two opinions after a
//! history is measured by total variation over events decided within the
//! next `L` periods. That is a lower bound on the distance over all events,
//! nondecreasing in `L`.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{check_enumerable, Error, Result, ENUMERATION_LIMIT};
use crate::history::{all_histories, Alphabet, History};
use crate::measures::{halving_limit, Example1Surrogate, Opinion};
use crate::number::Number;

/// Depth-to-depth factor above which a likelihood-ratio sequence is flagged
/// as growing geometrically.
pub const GEOMETRIC_GROWTH_FACTOR: f64 = 1.25;

fn same_alphabet<N: Number>(p: &Opinion<N>, q: &Opinion<N>) -> Result<Alphabet> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::Precondition(format!("{p} and {q} are defined on different alphabets")));
    }
    Ok(p.alphabet())
}

/// Total variation between the next-`lookahead` marginals of two opinions
/// that have already been conditioned on the same history.
fn tv_of_conditionals<N: Number>(p: &Opinion<N>, q: &Opinion<N>, lookahead: usize) -> Result<N> {
    let mp = p.depth_marginal(lookahead)?;
    let mq = q.depth_marginal(lookahead)?;
    let sum = mp.iter().zip(&mq).fold(N::zero(), |acc, (a, b)| acc + (a.clone() - b).abs());
    Ok(sum / N::from_usize(2))
}

/// `½ Σ_s |P(s|h) − Q(s|h)|` over suffixes `s` of length `lookahead`.
pub fn tv_lookahead<N: Number>(p: &Opinion<N>, q: &Opinion<N>, history: &History, lookahead: usize) -> Result<N> {
    let alphabet = same_alphabet(p, q)?;
    if lookahead < 1 {
        return Err(Error::Precondition("lookahead must be at least 1".into()));
    }
    check_enumerable("lookahead suffixes", alphabet.size(), lookahead)?;
    let pc = p.condition(history)?;
    let qc = q.condition(history)?;
    tv_of_conditionals(&pc, &qc, lookahead)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMode {
    /// Weighted over every history reachable under `Q`. Histories whose
    /// conditional pair of forecasts coincide are lumped together, so the
    /// cost grows with the number of distinct forecast states rather than
    /// with `m^t`.
    Exact,
    MonteCarlo {
        seed: u64,
        paths: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow<N> {
    pub t: usize,
    pub mean: N,
    pub max: N,
    pub exceedance: N,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergingCurve<N> {
    pub lookahead: usize,
    pub threshold: N,
    pub mode: CurveMode,
    pub rows: Vec<CurveRow<N>>,
}

impl<N: Number> MergingCurve<N> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mean,max,exceedance\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.t, r.mean.to_text(), r.max.to_text(), r.exceedance.to_text()));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mode = match self.mode {
            CurveMode::Exact => json!({ "kind": "exact-enumeration" }),
            CurveMode::MonteCarlo { seed, paths } => {
                json!({ "kind": "monte-carlo", "seed": seed, "paths": paths })
            }
        };
        json!({
            "lookahead": self.lookahead,
            "threshold": self.threshold.to_json(),
            "mode": mode,
            "number_mode": N::MODE,
            "rows": self.rows.iter().map(|r| json!({
                "t": r.t,
                "mean": r.mean.to_json(),
                "max": r.max.to_json(),
                "exceedance": r.exceedance.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

struct PairState<N> {
    p: Option<Opinion<N>>,
    q: Opinion<N>,
    weight: N,
}

fn pair_tv<N: Number>(p: &Option<Opinion<N>>, q: &Opinion<N>, lookahead: usize) -> Result<N> {
    match p {
        Some(p) => tv_of_conditionals(p, q, lookahead),
        None => Ok(N::one()),
    }
}

/// Merging curve of `P` towards `Q` for `t = 0..=t_max`, with paths drawn
/// from `Q`. A path on which `P`'s conditional is undefined counts as
/// maximal disagreement from then on.
pub fn merging_curve<N: Number>(
    p: &Opinion<N>,
    q: &Opinion<N>,
    t_max: usize,
    lookahead: usize,
    threshold: N,
    mode: CurveMode,
) -> Result<MergingCurve<N>> {
    let alphabet = same_alphabet(p, q)?;
    if lookahead < 1 {
        return Err(Error::Precondition("lookahead must be at least 1".into()));
    }
    check_enumerable("lookahead suffixes", alphabet.size(), lookahead)?;
    let rows = match mode {
        CurveMode::Exact => exact_rows(p, q, t_max, lookahead, &threshold)?,
        CurveMode::MonteCarlo { seed, paths } => {
            if paths == 0 {
                return Err(Error::Precondition("monte-carlo mode needs at least one path".into()));
            }
            monte_carlo_rows(p, q, t_max, lookahead, &threshold, seed, paths)?
        }
    };
    Ok(MergingCurve { lookahead, threshold, mode, rows })
}

fn exact_rows<N: Number>(
    p: &Opinion<N>,
    q: &Opinion<N>,
    t_max: usize,
    lookahead: usize,
    threshold: &N,
) -> Result<Vec<CurveRow<N>>> {
    let mut states = vec![PairState { p: Some(p.clone()), q: q.clone(), weight: N::one() }];
    let mut rows = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut mean = N::zero();
        let mut max = N::zero();
        let mut exceedance = N::zero();
        for s in &states {
            let tv = pair_tv(&s.p, &s.q, lookahead)?;
            mean = mean + s.weight.clone() * &tv;
            if tv > *threshold {
                exceedance = exceedance + &s.weight;
            }
            if tv > max {
                max = tv;
            }
        }
        rows.push(CurveRow { t, mean, max, exceedance });
        if t == t_max {
            break;
        }

        let mut index: HashMap<String, usize> = HashMap::new();
        let mut next: Vec<PairState<N>> = Vec::new();
        for s in &states {
            for (symbol, qs) in s.q.root_distribution().into_iter().enumerate() {
                if qs.is_zero() {
                    continue;
                }
                let symbol = symbol as u8;
                let q_next = s.q.step(symbol).expect("positive forecast");
                let p_next = s.p.as_ref().and_then(|p| p.step(symbol));
                let weight = s.weight.clone() * qs;
                let key = format!(
                    "{}|{}",
                    p_next.as_ref().map_or_else(|| "null".to_string(), Opinion::state_key),
                    q_next.state_key()
                );
                match index.get(&key) {
                    Some(&i) => next[i].weight = next[i].weight.clone() + weight,
                    None => {
                        index.insert(key, next.len());
                        next.push(PairState { p: p_next, q: q_next, weight });
                    }
                }
            }
        }
        if next.len() as u128 > ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                what: format!("distinct forecast states at t={}", t + 1),
                needed: next.len() as u128,
                limit: ENUMERATION_LIMIT,
            });
        }
        states = next;
    }
    Ok(rows)
}

fn monte_carlo_rows<N: Number>(
    p: &Opinion<N>,
    q: &Opinion<N>,
    t_max: usize,
    lookahead: usize,
    threshold: &N,
    seed: u64,
    paths: usize,
) -> Result<Vec<CurveRow<N>>> {
    let per_path: Vec<Vec<N>> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut pc = Some(p.clone());
            let mut qc = q.clone();
            let mut tvs = Vec::with_capacity(t_max + 1);
            for t in 0..=t_max {
                tvs.push(pair_tv(&pc, &qc, lookahead)?);
                if t == t_max {
                    break;
                }
                let symbol = qc.sample_path_with(1, &mut rng).symbols()[0];
                pc = pc.and_then(|p| p.step(symbol));
                qc = qc.step(symbol).expect("sampled symbol has positive probability");
            }
            Ok(tvs)
        })
        .collect::<Result<_>>()?;

    let n = N::from_usize(paths);
    let rows = (0..=t_max)
        .map(|t| {
            let mut sum = N::zero();
            let mut max = N::zero();
            let mut over = 0usize;
            for tvs in &per_path {
                let tv = &tvs[t];
                sum = sum + tv;
                if tv > threshold {
                    over += 1;
                }
                if *tv > max {
                    max = tv.clone();
                }
            }
            CurveRow { t, mean: sum / &n, max, exceedance: N::from_usize(over) / &n }
        })
        .collect();
    Ok(rows)
}

/// Finite-horizon evidence about whether `Q` is absolutely continuous with
/// respect to `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsContinuityReport<N> {
    pub horizon: usize,
    /// `max Q(h)/P(h)` over depth-`horizon` histories with `Q(h) > 0`;
    /// `None` means infinite (some history has `P(h) = 0 < Q(h)`).
    pub max_ratio: Option<N>,
    /// Smallest `P(h)` among histories in the support of `Q`.
    pub min_p_mass: Option<N>,
    pub violations: Vec<History>,
    /// `max_ratio` at each depth `1..=horizon`.
    pub ratio_by_depth: Vec<Option<N>>,
    pub min_growth_factor: Option<f64>,
    pub grows_geometrically: bool,
}

impl<N: Number> AbsContinuityReport<N> {
    pub fn to_json(&self) -> Value {
        let ratio = |r: &Option<N>| r.as_ref().map_or(json!("inf"), Number::to_json);
        json!({
            "horizon": self.horizon,
            "max_ratio": ratio(&self.max_ratio),
            "min_p_mass": self.min_p_mass.as_ref().map(Number::to_json),
            "violations": self.violations.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "ratio_by_depth": self.ratio_by_depth.iter().map(ratio).collect::<Vec<_>>(),
            "min_growth_factor": self.min_growth_factor,
            "grows_geometrically": self.grows_geometrically,
        })
    }
}

struct DepthScan<N> {
    max_ratio: Option<N>,
    min_p_mass: Option<N>,
    violations: Vec<History>,
}

fn scan_depth<N: Number>(p: &Opinion<N>, q: &Opinion<N>, depth: usize) -> Result<DepthScan<N>> {
    let mp = p.depth_marginal(depth)?;
    let mq = q.depth_marginal(depth)?;
    let mut scan = DepthScan { max_ratio: Some(N::zero()), min_p_mass: None, violations: Vec::new() };
    for (h, (pp, qq)) in all_histories(p.alphabet(), depth).zip(mp.iter().zip(&mq)) {
        if qq.is_zero() {
            continue;
        }
        if scan.min_p_mass.as_ref().is_none_or(|m| pp < m) {
            scan.min_p_mass = Some(pp.clone());
        }
        if pp.is_zero() {
            scan.violations.push(h);
            scan.max_ratio = None;
            continue;
        }
        let r = qq.clone() / pp;
        if let Some(m) = &scan.max_ratio {
            if r > *m {
                scan.max_ratio = Some(r);
            }
        }
    }
    Ok(scan)
}

pub fn abs_continuity_report<N: Number>(
    p: &Opinion<N>,
    q: &Opinion<N>,
    horizon: usize,
) -> Result<AbsContinuityReport<N>> {
    let alphabet = same_alphabet(p, q)?;
    check_enumerable("abs-continuity histories", alphabet.size(), horizon)?;
    let mut ratio_by_depth = Vec::with_capacity(horizon);
    for depth in 1..horizon {
        ratio_by_depth.push(scan_depth(p, q, depth)?.max_ratio);
    }
    let last = scan_depth(p, q, horizon)?;
    if horizon >= 1 {
        ratio_by_depth.push(last.max_ratio.clone());
    }

    let finite: Option<Vec<f64>> = ratio_by_depth.iter().map(|r| r.as_ref().map(Number::to_f64)).collect();
    let min_growth_factor =
        finite.filter(|v| v.len() >= 2).map(|v| v.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min));
    let grows_geometrically = min_growth_factor.is_some_and(|f| f >= GEOMETRIC_GROWTH_FACTOR);

    Ok(AbsContinuityReport {
        horizon,
        max_ratio: last.max_ratio,
        min_p_mass: last.min_p_mass,
        violations: last.violations,
        ratio_by_depth,
        min_growth_factor,
        grows_geometrically,
    })
}

/// `P_inf(A|ω^t) − P(A|ω^t)` for the surrogate `P` and the tail event
/// `A = {symbol 1 occurs infinitely often}`.
///
/// `A` is invisible at any finite depth and enters only through two tail
/// constants: `P_n(A) = 0` for every switching component (all zeros after
/// period `n`) and `P_inf(A ∩ ω^t) = P_inf(ω^t)` (the probabilities of
/// symbol 1 have a divergent sum, so it recurs almost surely).
pub fn example1_gap<N: Number>(truncation: usize, window: usize, reference: &History) -> Result<N> {
    let t = reference.len();
    if t > truncation {
        return Err(Error::Precondition(format!("history length {t} exceeds truncation depth {truncation}")));
    }
    reference.validate(Alphabet::BINARY)?;
    let surrogate = Example1Surrogate::<N>::new(truncation, window)?;
    let limit: Opinion<N> = halving_limit();
    let limit_mass = limit.cylinder_prob(reference);
    let surrogate_mass = surrogate.opinion.cylinder_prob(reference);
    if limit_mass.is_zero() || surrogate_mass.is_zero() {
        return Err(Error::ConditioningOnNullEvent {
            opinion: surrogate.opinion.label().to_string(),
            history: reference.to_string(),
        });
    }
    let half = N::one() / N::from_usize(2);
    let limit_conditional = N::one();
    let switch_tail_mass = N::zero();
    let surrogate_conditional = (half.clone() * &limit_mass + half * switch_tail_mass) / surrogate_mass;
    Ok(limit_conditional - surrogate_conditional)
}
