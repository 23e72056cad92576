//! Opinions: probability processes on the outcome tree given by their
//! next-symbol forecasts.
//!
//! Every opinion is total: it assigns a next-symbol distribution to every
//! finite history. Conditioning on a history of positive probability
//! yields another opinion of the same family, so the conditional forecasts
//! `P(·|ω^t)` are themselves opinions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::history::{Alphabet, History};
use crate::number::Number;

/// Forecast rule for periods beyond the explicitly listed ones.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule<N> {
    /// The same distribution in every remaining period.
    Constant(Vec<N>),
    /// `Prob(X_k = symbol) = base^k` at period `k` (1-based); the remaining
    /// mass is split evenly over the other symbols.
    Geometric { symbol: u8, base: N },
}

impl<N: Number> TailRule<N> {
    fn distribution(&self, period: usize, alphabet: Alphabet) -> Vec<N> {
        match self {
            TailRule::Constant(p) => p.clone(),
            TailRule::Geometric { symbol, base } => {
                let mut mass = N::one();
                for _ in 0..period {
                    mass = mass * base;
                }
                let rest = (N::one() - &mass) / N::from_usize(alphabet.size() - 1);
                alphabet.symbols().map(|a| if a == *symbol { mass.clone() } else { rest.clone() }).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpinionKind<N> {
    /// Independent draws from one distribution.
    Iid(Vec<N>),
    /// Independent draws whose distribution depends on the period.
    /// `periods[k]` is used at period `k + 1`; `start` periods have
    /// already elapsed.
    TimeVarying {
        periods: Arc<Vec<Vec<N>>>,
        start: usize,
        tail: TailRule<N>,
    },
    Markov {
        initial: Vec<N>,
        transition: Arc<Vec<Vec<N>>>,
    },
    /// Bayesian mixture with strictly positive weights summing to one.
    Mixture(Vec<(N, Opinion<N>)>),
    /// Explicit forecasts for every history shorter than `depth`. Beyond
    /// that, `tail` runs as a fresh opinion on the outcomes after period
    /// `depth`. `prefix` is the history already conditioned on.
    Table {
        depth: usize,
        entries: Arc<BTreeMap<History, Vec<N>>>,
        prefix: History,
        tail: Box<Opinion<N>>,
    },
}

/// A labelled forecast kernel over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Opinion<N> {
    label: String,
    alphabet: Alphabet,
    kind: OpinionKind<N>,
}

fn validate_distribution<N: Number>(label: &str, p: &[N], alphabet: Alphabet) -> Result<()> {
    let invalid = |reason: String| Error::InvalidOpinion { label: label.to_string(), reason };
    if p.len() != alphabet.size() {
        return Err(invalid(format!("distribution has {} entries, alphabet has {}", p.len(), alphabet.size())));
    }
    if p.iter().any(|x| x.is_negative()) {
        return Err(invalid(format!("negative probability in {p:?}")));
    }
    if !N::sums_to_one(p) {
        return Err(invalid(format!("distribution {p:?} does not sum to 1")));
    }
    Ok(())
}

impl<N: Number> Opinion<N> {
    pub fn iid(label: impl Into<String>, probs: Vec<N>) -> Result<Self> {
        let label = label.into();
        let alphabet = Alphabet::new(probs.len())?;
        validate_distribution(&label, &probs, alphabet)?;
        Ok(Opinion { label, alphabet, kind: OpinionKind::Iid(probs) })
    }

    /// Binary IID opinion with `Prob(symbol 1) = p1`.
    pub fn bernoulli(label: impl Into<String>, p1: N) -> Result<Self> {
        Self::iid(label, vec![N::one() - &p1, p1])
    }

    /// Binary IID opinion written as `Bern(p)` with `p = Prob(symbol 1)`.
    pub fn bern(p1: N) -> Result<Self> {
        let label = format!("Bern({})", p1.to_text());
        Self::bernoulli(label, p1)
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let p = N::one() / N::from_usize(alphabet.size());
        Opinion { label: "uniform".into(), alphabet, kind: OpinionKind::Iid(vec![p; alphabet.size()]) }
    }

    pub fn time_varying(
        label: impl Into<String>,
        alphabet: Alphabet,
        periods: Vec<Vec<N>>,
        tail: TailRule<N>,
    ) -> Result<Self> {
        let label = label.into();
        for p in &periods {
            validate_distribution(&label, p, alphabet)?;
        }
        match &tail {
            TailRule::Constant(p) => validate_distribution(&label, p, alphabet)?,
            TailRule::Geometric { symbol, base } => {
                if *symbol as usize >= alphabet.size() || base.is_negative() || *base > N::one() {
                    return Err(Error::InvalidOpinion {
                        label,
                        reason: "geometric tail needs a valid symbol and base in [0,1]".into(),
                    });
                }
            }
        }
        Ok(Opinion { label, alphabet, kind: OpinionKind::TimeVarying { periods: Arc::new(periods), start: 0, tail } })
    }

    pub fn markov(label: impl Into<String>, initial: Vec<N>, transition: Vec<Vec<N>>) -> Result<Self> {
        let label = label.into();
        let alphabet = Alphabet::new(initial.len())?;
        validate_distribution(&label, &initial, alphabet)?;
        if transition.len() != alphabet.size() {
            return Err(Error::InvalidOpinion {
                label,
                reason: "transition matrix must have one row per symbol".into(),
            });
        }
        for row in &transition {
            validate_distribution(&label, row, alphabet)?;
        }
        Ok(Opinion { label, alphabet, kind: OpinionKind::Markov { initial, transition: Arc::new(transition) } })
    }

    pub fn mixture(label: impl Into<String>, components: Vec<(N, Opinion<N>)>) -> Result<Self> {
        let label = label.into();
        let invalid = |reason: &str| Error::InvalidOpinion { label: label.clone(), reason: reason.into() };
        let first = components.first().ok_or_else(|| invalid("mixture needs a component"))?;
        let alphabet = first.1.alphabet;
        if components.iter().any(|(_, c)| c.alphabet != alphabet) {
            return Err(invalid("mixture components use different alphabets"));
        }
        if components.iter().any(|(w, _)| !w.is_positive()) {
            return Err(invalid("mixture weights must be positive"));
        }
        let weights: Vec<N> = components.iter().map(|(w, _)| w.clone()).collect();
        if !N::sums_to_one(&weights) {
            return Err(invalid("mixture weights must sum to 1"));
        }
        Ok(Opinion { label, alphabet, kind: OpinionKind::Mixture(components) })
    }

    /// Table kernel. `entries` must hold a distribution for every history of
    /// length below `depth`.
    pub fn table(
        label: impl Into<String>,
        alphabet: Alphabet,
        depth: usize,
        entries: BTreeMap<History, Vec<N>>,
        tail: Opinion<N>,
    ) -> Result<Self> {
        let label = label.into();
        if tail.alphabet != alphabet {
            return Err(Error::InvalidOpinion { label, reason: "tail rule uses another alphabet".into() });
        }
        for t in 0..depth {
            for h in crate::history::all_histories(alphabet, t) {
                match entries.get(&h) {
                    Some(p) => validate_distribution(&label, p, alphabet)?,
                    None => {
                        return Err(Error::InvalidOpinion {
                            label,
                            reason: format!("table has no entry for history {h:?}"),
                        })
                    }
                }
            }
        }
        if let Some(h) = entries.keys().find(|h| h.len() >= depth) {
            return Err(Error::InvalidOpinion {
                label,
                reason: format!("table entry {h} lies at or beyond depth {depth}"),
            });
        }
        if depth == 0 {
            return Ok(tail.with_label(label));
        }
        Ok(Opinion {
            label,
            alphabet,
            kind: OpinionKind::Table {
                depth,
                entries: Arc::new(entries),
                prefix: History::empty(),
                tail: Box::new(tail),
            },
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// For time-varying kernels, marks `start` periods as already elapsed.
    pub fn with_start(mut self, elapsed: usize) -> Self {
        if let OpinionKind::TimeVarying { start, .. } = &mut self.kind {
            *start = elapsed;
        }
        self
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn kind(&self) -> &OpinionKind<N> {
        &self.kind
    }

    /// Forecast for the next period, given what has been conditioned on.
    pub fn root_distribution(&self) -> Vec<N> {
        match &self.kind {
            OpinionKind::Iid(p) => p.clone(),
            OpinionKind::TimeVarying { periods, start, tail } => match periods.get(*start) {
                Some(p) => p.clone(),
                None => tail.distribution(start + 1, self.alphabet),
            },
            OpinionKind::Markov { initial, .. } => initial.clone(),
            OpinionKind::Mixture(components) => {
                let mut out = vec![N::zero(); self.alphabet.size()];
                for (w, c) in components {
                    for (o, p) in out.iter_mut().zip(c.root_distribution()) {
                        *o = o.clone() + w.clone() * p;
                    }
                }
                out
            }
            OpinionKind::Table { entries, prefix, .. } => entries[prefix].clone(),
        }
    }

    /// Conditions on one more symbol. `None` when that symbol has zero
    /// forecast probability.
    pub fn step(&self, symbol: u8) -> Option<Opinion<N>> {
        let root = self.root_distribution();
        if root.get(symbol as usize).is_none_or(|p| p.is_zero()) {
            return None;
        }
        Some(self.step_unchecked(symbol, &root[symbol as usize]))
    }

    fn step_unchecked(&self, symbol: u8, symbol_prob: &N) -> Opinion<N> {
        let kind = match &self.kind {
            OpinionKind::Iid(_) => return self.clone(),
            OpinionKind::TimeVarying { periods, start, tail } => {
                OpinionKind::TimeVarying { periods: periods.clone(), start: start + 1, tail: tail.clone() }
            }
            OpinionKind::Markov { transition, .. } => {
                OpinionKind::Markov { initial: transition[symbol as usize].clone(), transition: transition.clone() }
            }
            OpinionKind::Mixture(components) => {
                let mut next = Vec::with_capacity(components.len());
                for (w, c) in components {
                    let p = c.root_distribution().swap_remove(symbol as usize);
                    if p.is_zero() {
                        continue;
                    }
                    let weight = w.clone() * &p / symbol_prob;
                    next.push((weight, c.step_unchecked(symbol, &p)));
                }
                OpinionKind::Mixture(next)
            }
            OpinionKind::Table { depth, entries, prefix, tail } => {
                let prefix = prefix.child(symbol);
                if prefix.len() >= *depth {
                    return tail.as_ref().clone().with_label(self.label.clone());
                }
                OpinionKind::Table { depth: *depth, entries: entries.clone(), prefix, tail: tail.clone() }
            }
        };
        Opinion { label: self.label.clone(), alphabet: self.alphabet, kind }
    }

    /// Probability of the cylinder named by `history`, by the chain rule.
    pub fn cylinder_prob(&self, history: &History) -> N {
        match &self.kind {
            OpinionKind::Iid(p) => history.symbols().iter().fold(N::one(), |acc, &s| acc * &p[s as usize]),
            OpinionKind::Mixture(components) => {
                components.iter().fold(N::zero(), |acc, (w, c)| acc + w.clone() * c.cylinder_prob(history))
            }
            _ => {
                let mut prob = N::one();
                let mut current = self.clone();
                for &s in history.symbols() {
                    let p = current.root_distribution().swap_remove(s as usize);
                    if p.is_zero() {
                        return N::zero();
                    }
                    prob = prob * &p;
                    current = current.step_unchecked(s, &p);
                }
                prob
            }
        }
    }

    /// The conditional opinion `P(·|history)`.
    pub fn condition(&self, history: &History) -> Result<Opinion<N>> {
        history.validate(self.alphabet)?;
        let mut current = self.clone();
        for &s in history.symbols() {
            current = current.step(s).ok_or_else(|| self.null_event(history))?;
        }
        Ok(current)
    }

    /// One-step forecast after `history`.
    pub fn next_distribution(&self, history: &History) -> Result<Vec<N>> {
        Ok(self.condition(history)?.root_distribution())
    }

    /// Posterior mixture weights after `history`, aligned with the prior
    /// components. Components that give the history probability zero get
    /// weight zero.
    pub fn posterior_weights(&self, history: &History) -> Result<Vec<N>> {
        let OpinionKind::Mixture(components) = &self.kind else {
            return Err(Error::Precondition(format!("{} is not a Bayes mixture", self.label)));
        };
        history.validate(self.alphabet)?;
        let joint: Vec<N> = components.iter().map(|(w, c)| w.clone() * c.cylinder_prob(history)).collect();
        let total = joint.iter().fold(N::zero(), |acc, x| acc + x);
        if total.is_zero() {
            return Err(self.null_event(history));
        }
        Ok(joint.into_iter().map(|x| x / &total).collect())
    }

    /// Draws a path of length `depth`; deterministic given `seed`.
    pub fn sample_path(&self, depth: usize, seed: u64) -> History {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_path_with(depth, &mut rng)
    }

    pub fn sample_path_with<R: Rng + ?Sized>(&self, depth: usize, rng: &mut R) -> History {
        let mut path = History::empty();
        let mut current = self.clone();
        for _ in 0..depth {
            let root = current.root_distribution();
            let symbol = draw_symbol(&root, rng);
            let p = root[symbol as usize].clone();
            current = current.step_unchecked(symbol, &p);
            path.push(symbol);
        }
        path
    }

    /// Probabilities of all histories of length `depth`, lexicographic order.
    pub fn depth_marginal(&self, depth: usize) -> Result<Vec<N>> {
        let count = crate::error::check_enumerable("depth marginal", self.alphabet.size(), depth)?;
        let mut out = Vec::with_capacity(count);
        self.fill_marginal(N::one(), depth, &mut out);
        Ok(out)
    }

    fn fill_marginal(&self, mass: N, remaining: usize, out: &mut Vec<N>) {
        if remaining == 0 {
            out.push(mass);
            return;
        }
        let root = self.root_distribution();
        for (s, p) in root.iter().enumerate() {
            if p.is_zero() || mass.is_zero() {
                let zeros = self.alphabet.size().pow(remaining as u32 - 1);
                out.extend(std::iter::repeat_n(N::zero(), zeros));
                continue;
            }
            let child = self.step_unchecked(s as u8, p);
            child.fill_marginal(mass.clone() * p, remaining - 1, out);
        }
    }

    /// Canonical description of the forecast state, ignoring the label.
    /// Opinions with equal keys give identical forecasts everywhere.
    pub fn state_key(&self) -> String {
        format!("{:?}", self.kind)
    }

    fn null_event(&self, history: &History) -> Error {
        Error::ConditioningOnNullEvent { opinion: self.label.clone(), history: history.to_string() }
    }
}

fn draw_symbol<N: Number, R: Rng + ?Sized>(probs: &[N], rng: &mut R) -> u8 {
    let u: f64 = rng.gen();
    let total: f64 = probs.iter().map(Number::to_f64).sum();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (s, p) in probs.iter().enumerate() {
        let p = p.to_f64();
        if p > 0.0 {
            last_positive = s;
            acc += p / total;
            if u < acc {
                return s as u8;
            }
        }
    }
    last_positive as u8
}

impl<N: Number> fmt::Display for Opinion<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `P_n`: independent coordinates with `Prob(X_k = 0) = 2^-k` for `k <= n`
/// and `Prob(X_k = 0) = 1` afterwards.
pub fn halving_switch<N: Number>(n: usize) -> Opinion<N> {
    let two = N::from_usize(2);
    let mut mass = N::one();
    let periods = (0..n)
        .map(|_| {
            mass = mass.clone() / &two;
            vec![mass.clone(), N::one() - &mass]
        })
        .collect();
    Opinion::time_varying(format!("P_{n}"), Alphabet::BINARY, periods, TailRule::Constant(vec![N::one(), N::zero()]))
        .expect("halving switch kernel is valid")
}

/// `P_inf`: independent coordinates with `Prob(X_k = 0) = 2^-k` for all `k`.
pub fn halving_limit<N: Number>() -> Opinion<N> {
    Opinion::time_varying(
        "P_inf",
        Alphabet::BINARY,
        Vec::new(),
        TailRule::Geometric { symbol: 0, base: N::one() / N::from_usize(2) },
    )
    .expect("halving limit kernel is valid")
}

/// Truncated stand-in for the non-merging opinion
/// `½ P_inf + ½ ∫ P_n dλ(n)` with a diffuse finitely additive `λ`: the
/// mixing measure is replaced by the uniform distribution on the window
/// `{N+1, .., N+K}`.
#[derive(Debug, Clone)]
pub struct Example1Surrogate<N> {
    pub truncation: usize,
    pub window: usize,
    pub opinion: Opinion<N>,
}

impl<N: Number> Example1Surrogate<N> {
    pub fn new(truncation: usize, window: usize) -> Result<Self> {
        if truncation < 1 || window < 1 {
            return Err(Error::Precondition(format!(
                "surrogate needs N >= 1 and K >= 1, got N={truncation}, K={window}"
            )));
        }
        let half = N::one() / N::from_usize(2);
        let each = half.clone() / N::from_usize(window);
        let mut components = vec![(half, halving_limit())];
        for n in truncation + 1..=truncation + window {
            components.push((each.clone(), halving_switch(n)));
        }
        let opinion = Opinion::mixture(format!("example1(N={truncation},K={window})"), components)?;
        Ok(Example1Surrogate { truncation, window, opinion })
    }
}

pub fn make_example1_surrogate<N: Number>(truncation: usize, window: usize) -> Result<Example1Surrogate<N>> {
    Example1Surrogate::new(truncation, window)
}
