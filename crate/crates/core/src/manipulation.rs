//! Strategic experts: randomized reports, the Nature-vs-expert game at a
//! finite horizon, and path-by-path verification of manipulation and
//! non-manipulability claims.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{check_enumerable, Error, Result};
use crate::game::{solve_matrix_game, GameSolution, MatrixGame};
use crate::history::{all_histories, Alphabet, History, PathPattern};
use crate::measures::Opinion;
use crate::number::Number;
use crate::testing::{RejectionRegion, Test, TestRule};

/// Weights at or below this level in solver output are treated as zero.
const WEIGHT_FLOOR: f64 = 1e-12;
pub const HEDGE_SHARPNESS: f64 = 2.0;
/// Caps the Hedge exponent so every weight survives the floor above.
const HEDGE_EXPONENT_CAP: f64 = 20.0;
/// Share of μ* mixed into the Hedge response so that, among equally
/// rejected cells, those Nature currently plays are rejected last.
const HEDGE_ANCHOR: f64 = 0.01;

/// Finite-support randomization over opinions.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy<N> {
    support: Vec<Opinion<N>>,
    weights: Vec<N>,
}

impl<N: Number> Strategy<N> {
    pub fn new(support: Vec<Opinion<N>>, weights: Vec<N>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::Precondition("strategy needs one positive weight per opinion".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) || !N::sums_to_one(&weights) {
            return Err(Error::Precondition("strategy weights must be positive and sum to 1".into()));
        }
        let mut labels = HashSet::new();
        if let Some(dup) = support.iter().find(|o| !labels.insert(o.label().to_string())) {
            return Err(Error::Precondition(format!("duplicate label {:?} in strategy support", dup.label())));
        }
        Ok(Strategy { support, weights })
    }

    pub fn uniform(support: Vec<Opinion<N>>) -> Result<Self> {
        let w = N::one() / N::from_usize(support.len().max(1));
        let weights = vec![w; support.len()];
        Self::new(support, weights)
    }

    pub fn support(&self) -> &[Opinion<N>] {
        &self.support
    }

    pub fn weights(&self) -> &[N] {
        &self.weights
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.support
                .iter()
                .zip(&self.weights)
                .map(|(o, w)| json!({ "weight": w.to_json(), "opinion": o.to_json() }))
                .collect(),
        )
    }

    fn regions(&self, test: &Test<N>) -> Result<Vec<RejectionRegion>> {
        self.support.iter().map(|o| test.region(o)).collect()
    }
}

fn pass_prob_in<N: Number>(strategy: &Strategy<N>, regions: &[RejectionRegion], history: &History) -> Result<N> {
    let mut pass = N::zero();
    for ((opinion, weight), region) in strategy.support.iter().zip(&strategy.weights).zip(regions) {
        match region.membership(history) {
            Some(true) => {}
            Some(false) => pass = pass + weight,
            None => {
                return Err(Error::UndecidedMembership {
                    opinion: opinion.label().to_string(),
                    history: history.to_string(),
                })
            }
        }
    }
    Ok(pass)
}

/// Total weight of the opinions whose rejection region misses `history`.
pub fn pass_prob<N: Number>(strategy: &Strategy<N>, test: &Test<N>, history: &History) -> Result<N> {
    let regions = strategy.regions(test)?;
    pass_prob_in(strategy, &regions, history)
}

/// Pass probability of `strategy` on every depth-`horizon` history, by a
/// straight scan of the test's regions.
pub fn pass_prob_table<N: Number>(strategy: &Strategy<N>, test: &Test<N>, horizon: usize) -> Result<Vec<(History, N)>> {
    let alphabet = strategy.support[0].alphabet();
    check_enumerable("horizon histories", alphabet.size(), horizon)?;
    let regions = strategy.regions(test)?;
    all_histories(alphabet, horizon)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|h| pass_prob_in(strategy, &regions, &h).map(|p| (h, p)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonManipulabilityWitness<N> {
    pub cylinder: History,
    pub pass_prob: N,
}

/// For a reference-cylinder test, returns the cylinder `ω^t` with `t` the
/// largest `t_P` over the support. Every opinion in the support rejects it.
pub fn verify_nonmanipulable<N: Number>(test: &Test<N>, strategy: &Strategy<N>) -> Result<NonManipulabilityWitness<N>> {
    let TestRule::ReferenceCylinder { reference, .. } = &test.rule else {
        return Err(Error::Precondition(format!("{} is not a reference-cylinder test", test.label)));
    };
    let mut depth = 0;
    for opinion in &strategy.support {
        depth = depth.max(test.reference_depth(opinion)?);
    }
    let cylinder = reference.truncate(depth);
    let pass_prob = pass_prob(strategy, test, &cylinder)?;
    Ok(NonManipulabilityWitness { cylinder, pass_prob })
}

/// Reference path of a reference-cylinder test.
pub fn reference_of<N: Number>(test: &Test<N>) -> Option<&PathPattern> {
    match &test.rule {
        TestRule::ReferenceCylinder { reference, .. } => Some(reference),
        _ => None,
    }
}

fn payoff_column(region: &RejectionRegion, alphabet: Alphabet, horizon: usize) -> Vec<f64> {
    all_histories(alphabet, horizon).map(|h| if region.membership(&h) == Some(true) { 0.0 } else { 1.0 }).collect()
}

fn checked_region<N: Number>(test: &Test<N>, opinion: &Opinion<N>, horizon: usize) -> Result<RejectionRegion> {
    let region = test.region(opinion)?;
    if let Some(deep) = region.cylinders().iter().find(|c| c.len() > horizon) {
        return Err(Error::RegionDeeperThanHorizon {
            opinion: opinion.label().to_string(),
            cylinder: deep.to_string(),
            horizon,
        });
    }
    Ok(region)
}

/// Payoff matrix with Nature's depth-`horizon` histories as rows and menu
/// opinions as columns; an entry is 1 when the history passes the opinion.
pub fn build_game<N: Number>(test: &Test<N>, horizon: usize, menu: &[Opinion<N>]) -> Result<MatrixGame> {
    let alphabet = menu.first().ok_or_else(|| Error::Precondition("menu must contain an opinion".into()))?.alphabet();
    let rows = check_enumerable("game rows", alphabet.size(), horizon)?;
    let columns = menu
        .par_iter()
        .map(|o| checked_region(test, o, horizon).map(|r| payoff_column(&r, alphabet, horizon)))
        .collect::<Result<Vec<_>>>()?;
    let payoffs = (0..rows).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let row_labels = all_histories(alphabet, horizon).map(|h| h.to_string()).collect();
    let col_labels = menu.iter().map(|o| o.label().to_string()).collect();
    MatrixGame::with_labels(payoffs, row_labels, col_labels)
}

/// Lifts a distribution over depth-`horizon` histories (lexicographic
/// order) to a table kernel with exactly that marginal, continuing as IID
/// uniform.
pub fn nature_to_opinion<N: Number>(
    label: impl Into<String>,
    distribution: &[N],
    horizon: usize,
    alphabet: Alphabet,
) -> Result<Opinion<N>> {
    let leaves = check_enumerable("nature distribution", alphabet.size(), horizon)?;
    if distribution.len() != leaves {
        return Err(Error::Precondition(format!("distribution has {} entries, expected {leaves}", distribution.len())));
    }
    if distribution.iter().any(|p| p.is_negative()) || !N::sums_to_one(distribution) {
        return Err(Error::Precondition("nature distribution must be nonnegative and sum to 1".into()));
    }
    let m = alphabet.size();
    // Node masses level by level, deepest first.
    let mut levels: Vec<Vec<N>> = vec![distribution.to_vec()];
    for _ in 0..horizon {
        let below = levels.last().expect("nonempty");
        let above: Vec<N> = below.chunks(m).map(|c| c.iter().fold(N::zero(), |acc, x| acc + x)).collect();
        levels.push(above);
    }
    levels.reverse();
    let uniform = vec![N::one() / N::from_usize(m); m];
    let mut entries = BTreeMap::new();
    for depth in 0..horizon {
        for (i, h) in all_histories(alphabet, depth).enumerate() {
            let mass = &levels[depth][i];
            let next = if mass.is_zero() {
                uniform.clone()
            } else {
                levels[depth + 1][i * m..(i + 1) * m].iter().map(|c| c.clone() / mass).collect()
            };
            entries.insert(h, next);
        }
    }
    Opinion::table(label, alphabet, horizon, entries, Opinion::uniform(alphabet))
}

/// Converts solver output to an exact distribution: tiny or negative
/// entries are dropped and the rest renormalized.
fn clean_distribution<N: Number>(raw: &[f64]) -> Vec<N> {
    let kept: Vec<N> = raw.iter().map(|&x| if x > WEIGHT_FLOOR { N::from_f64(x) } else { N::zero() }).collect();
    let total = kept.iter().fold(N::zero(), |acc, x| acc + x);
    kept.into_iter().map(|x| x / &total).collect()
}

#[derive(Debug, Clone)]
pub struct DoubleOracleConfig<N> {
    pub max_iters: usize,
    /// Duality-gap tolerance of each restricted solve, and the minimum
    /// improvement a new column must offer.
    pub tol: f64,
    /// Starting columns; defaults to the opinion lifted from the uniform
    /// distribution over histories.
    pub initial_menu: Option<Vec<Opinion<N>>>,
    /// When set, each iteration also lifts Nature's Hedge response
    /// `μ_i ∝ exp(-β · pass_i)` to the current expert mixture. It has full
    /// support, so its lift rejects only the least-rejected cells instead
    /// of every cell μ* leaves at zero.
    pub hedge_sharpness: Option<f64>,
}

impl<N> Default for DoubleOracleConfig<N> {
    fn default() -> Self {
        DoubleOracleConfig { max_iters: 300, tol: 1e-6, initial_menu: None, hedge_sharpness: Some(HEDGE_SHARPNESS) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TargetReached,
    /// No new column improved on the restricted value by more than `tol`.
    Stalled,
    IterationBudget,
}

#[derive(Debug, Clone)]
pub struct ManipulationReport<N> {
    pub horizon: usize,
    pub test_label: String,
    pub epsilon: N,
    pub delta: N,
    pub value: f64,
    pub strategy: Strategy<N>,
    pub path_pass_probs: Vec<(History, N)>,
    pub iterations: usize,
    pub certified: bool,
    pub stop_reason: StopReason,
    /// Restricted game value after each iteration.
    pub value_trace: Vec<f64>,
    /// Payoff of each added column against the Nature mixture it answers.
    pub best_response_payoffs: Vec<f64>,
    pub final_game: MatrixGame,
}

impl<N: Number> ManipulationReport<N> {
    pub fn min_pass_prob(&self) -> Option<&N> {
        self.path_pass_probs.iter().map(|(_, p)| p).min_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
    }

    pub fn target(&self) -> N {
        N::one() - &self.epsilon - &self.delta
    }

    pub fn to_json(&self) -> Value {
        json!({
            "horizon": self.horizon,
            "test": self.test_label,
            "epsilon": self.epsilon.to_json(),
            "delta": self.delta.to_json(),
            "target": self.target().to_json(),
            "value": self.value,
            "certified": self.certified,
            "stop_reason": self.stop_reason,
            "iterations": self.iterations,
            "min_pass_prob": self.min_pass_prob().map(Number::to_json),
            "value_trace": self.value_trace,
            "best_response_payoffs": self.best_response_payoffs,
            "strategy": self.strategy.to_json(),
        })
    }

    pub fn paths_csv(&self) -> String {
        let mut out = String::from("history,pass_prob\n");
        for (h, p) in &self.path_pass_probs {
            out.push_str(&format!("{h},{}\n", p.to_text()));
        }
        out
    }
}

fn strategy_from_solution<N: Number>(menu: &[Opinion<N>], solution: &GameSolution) -> Result<Strategy<N>> {
    let weights: Vec<N> = clean_distribution(&solution.col_strategy);
    let (support, weights): (Vec<_>, Vec<_>) =
        menu.iter().cloned().zip(weights).filter(|(_, w)| w.is_positive()).unzip();
    Strategy::new(support, weights)
}

/// Searches for a randomized report that passes `test` with probability at
/// least `1 − ε − δ` on every depth-`horizon` history.
///
/// Column generation on the Nature-vs-expert game: solve the game over the
/// current menu, lift Nature's optimal mixture to an opinion, and add that
/// opinion as a new column. Against the mixture it was built from, the
/// new column passes with probability at least `1 − ε` whenever the test
/// controls type-I error at level `ε`.
/// Softmin of pass probabilities: Nature's entropy-regularized response.
fn hedge_response(pass: &[f64], beta: f64) -> Vec<f64> {
    let floor = pass.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = pass.iter().map(|p| (-(beta * (p - floor)).min(HEDGE_EXPONENT_CAP)).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

pub fn double_oracle_manipulate<N: Number>(
    test: &Test<N>,
    horizon: usize,
    alphabet: Alphabet,
    epsilon: N,
    delta: N,
    config: &DoubleOracleConfig<N>,
) -> Result<ManipulationReport<N>> {
    if !delta.is_positive() || delta > N::one() - &epsilon {
        return Err(Error::Precondition(format!("delta must lie in (0, 1 - epsilon], got {}", delta.to_text())));
    }
    if config.max_iters < 1 {
        return Err(Error::Precondition("max_iters must be at least 1".into()));
    }
    let leaves = check_enumerable("game rows", alphabet.size(), horizon)?;
    let target = N::one() - &epsilon - &delta;
    let target_f64 = target.to_f64();
    let type1_bound = 1.0 - epsilon.to_f64();

    let mut menu = match &config.initial_menu {
        Some(m) if !m.is_empty() => m.clone(),
        _ => {
            let uniform = vec![N::one() / N::from_usize(leaves); leaves];
            vec![nature_to_opinion("nature-0", &uniform, horizon, alphabet)?]
        }
    };
    let mut game = build_game(test, horizon, &menu)?;
    let mut value_trace = Vec::new();
    let mut best_response_payoffs = Vec::new();

    let mut iterations = 0;
    let (solution, stop_reason) = loop {
        iterations += 1;
        let solution = solve_matrix_game(&game, config.tol)?;
        value_trace.push(solution.value);

        if solution.value >= target_f64 {
            let strategy = strategy_from_solution(&menu, &solution)?;
            let scan = pass_prob_table(&strategy, test, horizon)?;
            if scan.iter().all(|(_, p)| *p >= target) {
                break (solution, StopReason::TargetReached);
            }
        }
        if iterations >= config.max_iters {
            break (solution, StopReason::IterationBudget);
        }

        let optimal: Vec<f64> = solution.row_strategy.clone();
        let mut candidates = vec![(format!("nature-{iterations}"), clean_distribution::<N>(&optimal))];
        if let Some(beta) = config.hedge_sharpness {
            let pass = game.row_payoffs(&solution.col_strategy);
            let hedge: Vec<f64> = hedge_response(&pass, beta)
                .iter()
                .zip(&optimal)
                .map(|(h, m)| (1.0 - HEDGE_ANCHOR) * h + HEDGE_ANCHOR * m)
                .collect();
            candidates.push((format!("hedge-{iterations}"), clean_distribution(&hedge)));
        }
        let mut improved = false;
        for (k, (label, nature)) in candidates.into_iter().enumerate() {
            let candidate = nature_to_opinion(label, &nature, horizon, alphabet)?;
            let region = checked_region(test, &candidate, horizon)?;
            let column = payoff_column(&region, alphabet, horizon);
            let own: f64 = column.iter().zip(&nature).map(|(a, x)| a * x.to_f64()).sum();
            if k == 0 {
                best_response_payoffs.push(own);
            }
            if own < type1_bound - 1e-9 {
                return Err(Error::Precondition(format!(
                    "{} does not control type-I error at level {}: lifted opinion passes with {own}",
                    test.label,
                    epsilon.to_text()
                )));
            }
            let against_optimal: f64 = column.iter().zip(&optimal).map(|(a, x)| a * x).sum();
            if against_optimal > solution.value + config.tol {
                game.push_column(candidate.label().to_string(), column)?;
                menu.push(candidate);
                improved = true;
            }
        }
        if !improved {
            break (solution, StopReason::Stalled);
        }
    };

    let strategy = strategy_from_solution(&menu, &solution)?;
    let path_pass_probs = pass_prob_table(&strategy, test, horizon)?;
    let certified = path_pass_probs.iter().all(|(_, p)| *p >= target);
    Ok(ManipulationReport {
        horizon,
        test_label: test.label.clone(),
        epsilon,
        delta,
        value: solution.value,
        strategy,
        path_pass_probs,
        iterations,
        certified,
        stop_reason,
        value_trace,
        best_response_payoffs,
        final_game: game,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{ratio, Exact};
    use crate::testing::{normalize_region, reference_cylinder_test, tail_rejection_test};

    fn h(s: &str) -> History {
        s.parse().unwrap()
    }

    #[test]
    fn pass_prob_examples() {
        let p1 = Opinion::bern(ratio(1, 2)).unwrap().with_label("P1");
        let p2 = Opinion::bern(ratio(1, 3)).unwrap().with_label("P2");
        let test = Test::custom("split", ratio(1, 2), |o: &Opinion<Exact>| {
            let cyl = if o.label() == "P1" { "0" } else { "1" };
            Ok(normalize_region(o.alphabet(), [cyl.parse().unwrap()]))
        });
        let zeta = Strategy::new(vec![p1.clone(), p2], vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        assert_eq!(pass_prob(&zeta, &test, &h("01")).unwrap(), ratio(2, 5));

        let never: Test<Exact> = Test::never("never");
        let single = Strategy::uniform(vec![p1]).unwrap();
        assert_eq!(pass_prob(&single, &never, &h("0110")).unwrap(), ratio(1, 1));
    }

    #[test]
    fn undecided_membership() {
        let zeros = PathPattern::parse("0", Alphabet::BINARY).unwrap();
        let test = reference_cylinder_test(zeros, ratio(1, 20), 64).unwrap();
        let zeta = Strategy::uniform(vec![Opinion::bern(ratio(1, 2)).unwrap()]).unwrap();
        assert!(matches!(pass_prob(&zeta, &test, &h("00")), Err(Error::UndecidedMembership { .. })));
        assert_eq!(pass_prob(&zeta, &test, &h("01")).unwrap(), ratio(1, 1));
    }

    #[test]
    fn nonmanipulability_witness() {
        let zeros = PathPattern::parse("0", Alphabet::BINARY).unwrap();
        let test = reference_cylinder_test(zeros, ratio(1, 20), 64).unwrap();
        let half = Opinion::bern(ratio(1, 2)).unwrap();
        let tq = Opinion::iid("B0(3/4)", vec![ratio(3, 4), ratio(1, 4)]).unwrap();
        let zeta = Strategy::uniform(vec![half.clone(), tq]).unwrap();
        let w = verify_nonmanipulable(&test, &zeta).unwrap();
        assert_eq!(w.cylinder, h("00000000000"));
        assert_eq!(w.pass_prob, ratio(0, 1));
        assert_eq!(pass_prob(&zeta, &test, &h("00000000000")).unwrap(), ratio(0, 1));

        let single = Strategy::uniform(vec![half.clone()]).unwrap();
        assert_eq!(verify_nonmanipulable(&test, &single).unwrap().cylinder, h("00000"));
        let twins = Strategy::uniform(vec![half.clone(), half.clone().with_label("twin")]).unwrap();
        assert_eq!(verify_nonmanipulable(&test, &twins).unwrap().cylinder, h("00000"));
    }

    #[test]
    fn strategy_validation() {
        let b = Opinion::bern(ratio(1, 2)).unwrap();
        assert!(Strategy::new(vec![b.clone(), b.clone()], vec![ratio(1, 2), ratio(1, 2)]).is_err());
        assert!(Strategy::new(vec![b.clone()], vec![ratio(1, 2)]).is_err());
        assert!(Strategy::<Exact>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn game_construction() {
        let test = tail_rejection_test(2, ratio(3, 10)).unwrap();
        let g = build_game(&test, 2, &[Opinion::bern(ratio(1, 2)).unwrap()]).unwrap();
        assert_eq!(g.rows(), 4);
        let col: Vec<f64> = g.payoffs.iter().map(|r| r[0]).collect();
        assert_eq!(col, vec![0.0, 1.0, 1.0, 1.0]);

        let never: Test<Exact> = Test::never("never");
        let g = build_game(&never, 3, &[Opinion::bern(ratio(1, 2)).unwrap()]).unwrap();
        assert!(g.payoffs.iter().flatten().all(|&x| x == 1.0));

        let deep = tail_rejection_test(4, ratio(3, 10)).unwrap();
        assert!(matches!(
            build_game(&deep, 2, &[Opinion::bern(ratio(1, 2)).unwrap()]),
            Err(Error::RegionDeeperThanHorizon { .. })
        ));

        let a = Opinion::bern(ratio(1, 3)).unwrap();
        let b = Opinion::bern(ratio(2, 3)).unwrap();
        let g = build_game(&test, 2, &[a, b]).unwrap();
        let differing = g.payoffs.iter().filter(|r| r[0] != r[1]).count();
        assert_eq!(differing, 2);
    }

    #[test]
    fn nature_lifting() {
        let a = Alphabet::BINARY;
        let mut point = vec![ratio(0, 1); 8];
        point[0] = ratio(1, 1);
        let op = nature_to_opinion("pt", &point, 3, a).unwrap();
        assert_eq!(op.cylinder_prob(&h("000")), ratio(1, 1));

        let uniform = vec![ratio(1, 8); 8];
        let op = nature_to_opinion("u", &uniform, 3, a).unwrap();
        for hist in all_histories(a, 3) {
            assert_eq!(op.cylinder_prob(&hist), ratio(1, 8));
        }

        let split = vec![ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(1, 2)];
        let op = nature_to_opinion("s", &split, 2, a).unwrap();
        assert_eq!(op.cylinder_prob(&h("0")), ratio(1, 2));
        assert_eq!(op.cylinder_prob(&h("1")), ratio(1, 2));
        assert_eq!(op.next_distribution(&h("0")).unwrap(), vec![ratio(1, 1), ratio(0, 1)]);

        assert!(nature_to_opinion("bad", &[ratio(1, 2)], 2, a).is_err());
    }

    #[test]
    fn manipulates_small_tail_test() {
        let test = tail_rejection_test(3, ratio(1, 4)).unwrap();
        let report = double_oracle_manipulate(
            &test,
            3,
            Alphabet::BINARY,
            ratio(1, 4),
            ratio(1, 20),
            &DoubleOracleConfig::default(),
        )
        .unwrap();
        assert!(report.certified);
        assert!(report.value >= 0.7);
        assert!(report.iterations <= 50);
        assert_eq!(report.path_pass_probs.len(), 8);
        assert!(report.path_pass_probs.iter().all(|(_, p)| *p >= ratio(7, 10)));
    }

    #[test]
    fn empty_regions_need_one_iteration() {
        let never: Test<Exact> = Test::never("never");
        let report = double_oracle_manipulate(
            &never,
            3,
            Alphabet::BINARY,
            ratio(1, 10),
            ratio(1, 20),
            &DoubleOracleConfig::default(),
        )
        .unwrap();
        assert_eq!(report.value, 1.0);
        assert_eq!(report.iterations, 1);
        assert!(report.certified);
    }

    #[test]
    fn delta_must_be_in_range() {
        let test = tail_rejection_test(3, ratio(1, 4)).unwrap();
        let cfg = DoubleOracleConfig::default();
        assert!(double_oracle_manipulate(&test, 3, Alphabet::BINARY, ratio(1, 4), ratio(0, 1), &cfg).is_err());
        assert!(double_oracle_manipulate(&test, 3, Alphabet::BINARY, ratio(1, 4), ratio(4, 5), &cfg).is_err());
    }
}
