//! Expert tests: rules that map an announced opinion to a rejection region
//! made of finitely many cylinders.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{check_enumerable, Error, Result, ENUMERATION_LIMIT};
use crate::history::{all_histories, Alphabet, History, PathPattern};
use crate::measures::Opinion;
use crate::number::Number;

/// Finite union of cylinders, stored prefix-free and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectionRegion {
    cylinders: Vec<History>,
    full_cover: bool,
}

impl RejectionRegion {
    pub fn empty() -> Self {
        RejectionRegion { cylinders: Vec::new(), full_cover: false }
    }

    pub fn cylinders(&self) -> &[History] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    /// True when the cylinders cover the whole path space.
    pub fn is_full_cover(&self) -> bool {
        self.full_cover
    }

    pub fn max_depth(&self) -> usize {
        self.cylinders.iter().map(History::len).max().unwrap_or(0)
    }

    /// `Some(true)` if `history` lies in the region, `Some(false)` if it lies
    /// outside, `None` if it is too short to tell.
    pub fn membership(&self, history: &History) -> Option<bool> {
        if self.cylinders.iter().any(|c| c.is_prefix_of(history)) {
            Some(true)
        } else if self.cylinders.iter().any(|c| history.is_prefix_of(c)) {
            None
        } else {
            Some(false)
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cylinders": self.cylinders.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "full_cover": self.full_cover,
        })
    }
}

impl fmt::Display for RejectionRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.cylinders.iter().map(|h| format!("\"{h}\"")).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

fn covers(prefix: &History, sorted: &[History], alphabet: Alphabet) -> bool {
    if sorted.is_empty() {
        return false;
    }
    if sorted.iter().any(|c| c == prefix) {
        return true;
    }
    alphabet.symbols().all(|a| {
        let child = prefix.child(a);
        let below: Vec<History> = sorted.iter().filter(|c| child.is_prefix_of(c)).cloned().collect();
        covers(&child, &below, alphabet)
    })
}

/// Drops every cylinder that has a proper prefix in the list. The union is
/// unchanged.
pub fn normalize_region(alphabet: Alphabet, cylinders: impl IntoIterator<Item = History>) -> RejectionRegion {
    let mut sorted: Vec<History> = cylinders.into_iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<History> = Vec::with_capacity(sorted.len());
    for c in sorted {
        if kept.last().is_none_or(|last| !last.is_prefix_of(&c)) {
            kept.push(c);
        }
    }
    let full_cover = covers(&History::empty(), &kept, alphabet);
    RejectionRegion { cylinders: kept, full_cover }
}

pub fn region_prob<N: Number>(opinion: &Opinion<N>, region: &RejectionRegion) -> N {
    region.cylinders.iter().fold(N::zero(), |acc, c| acc + opinion.cylinder_prob(c))
}

/// Partition of the path space into cylinders of small probability.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPartition<N> {
    pub epsilon: N,
    /// Cells in lexicographic order with their probabilities.
    pub cells: Vec<(History, N)>,
}

impl<N: Number> CylinderPartition<N> {
    pub fn histories(&self) -> impl Iterator<Item = &History> {
        self.cells.iter().map(|(h, _)| h)
    }

    pub fn total(&self) -> N {
        self.cells.iter().fold(N::zero(), |acc, (_, p)| acc + p)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "epsilon": self.epsilon.to_json(),
            "cells": self.cells.iter().map(|(h, p)| json!({
                "history": h.to_string(),
                "prob": p.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Indented tree: inner nodes as `history/`, cells with probabilities.
    pub fn render_tree(&self) -> String {
        let mut out = String::new();
        let mut printed: Vec<History> = Vec::new();
        for (cell, p) in &self.cells {
            for depth in 0..cell.len() {
                let node = cell.prefix(depth);
                if printed.last().is_none_or(|l| l.len() < depth + 1 || l.prefix(depth + 1) != node)
                    && !printed.contains(&node)
                {
                    out.push_str(&format!("{}{}/\n", "  ".repeat(depth), display_root(&node)));
                    printed.push(node);
                }
            }
            out.push_str(&format!("{}{}  {}\n", "  ".repeat(cell.len()), display_root(cell), p.to_text()));
        }
        out
    }
}

fn display_root(h: &History) -> String {
    if h.is_empty() {
        "Ω".to_string()
    } else {
        h.to_string()
    }
}

/// Splits cells of probability above `epsilon` into their children until
/// every cell carries at most `epsilon`.
pub fn epsilon_cylinder_partition<N: Number>(
    opinion: &Opinion<N>,
    epsilon: N,
    max_depth: usize,
) -> Result<CylinderPartition<N>> {
    if !epsilon.is_positive() || epsilon > N::one() {
        return Err(Error::Precondition(format!("epsilon must lie in (0,1], got {epsilon}")));
    }
    if max_depth < 1 {
        return Err(Error::Precondition("max_depth must be at least 1".into()));
    }
    let mut cells = Vec::new();
    let mut queue = VecDeque::from([(History::empty(), Some(opinion.clone()), N::one())]);
    while let Some((history, current, prob)) = queue.pop_front() {
        if prob <= epsilon {
            cells.push((history, prob));
            continue;
        }
        if history.len() >= max_depth {
            return Err(Error::AtomDetected {
                opinion: opinion.label().to_string(),
                history: history.to_string(),
                epsilon: epsilon.to_text(),
                depth: max_depth,
            });
        }
        let current = current.expect("cells of positive probability keep their conditional");
        for (s, p) in current.root_distribution().into_iter().enumerate() {
            let s = s as u8;
            let child = history.child(s);
            if p.is_zero() {
                queue.push_back((child, None, N::zero()));
            } else {
                queue.push_back((child, current.step(s), prob.clone() * p));
            }
        }
        if (cells.len() + queue.len()) as u128 > ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                what: "partition cells".into(),
                needed: (cells.len() + queue.len()) as u128,
                limit: ENUMERATION_LIMIT,
            });
        }
    }
    cells.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CylinderPartition { epsilon, cells })
}

pub type RegionFn<N> = dyn Fn(&Opinion<N>) -> Result<RejectionRegion> + Send + Sync;

#[derive(Clone)]
pub enum TestRule<N> {
    /// Rejects the shortest cylinder of the reference path whose
    /// probability falls strictly below epsilon.
    ReferenceCylinder {
        reference: PathPattern,
        max_depth: usize,
    },
    /// Rejects the least likely depth-`depth` cylinders while their total
    /// stays within epsilon.
    TailRejection {
        depth: usize,
    },
    /// Never rejects.
    Never,
    Custom(Arc<RegionFn<N>>),
}

impl<N> fmt::Debug for TestRule<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestRule::ReferenceCylinder { reference, max_depth } => f
                .debug_struct("ReferenceCylinder")
                .field("reference", &reference.to_string())
                .field("max_depth", max_depth)
                .finish(),
            TestRule::TailRejection { depth } => f.debug_struct("TailRejection").field("depth", depth).finish(),
            TestRule::Never => f.write_str("Never"),
            TestRule::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A test: a deterministic rule from opinions to rejection regions, with
/// its nominal level.
#[derive(Debug, Clone)]
pub struct Test<N> {
    pub label: String,
    pub epsilon: N,
    pub rule: TestRule<N>,
}

impl<N: Number> Test<N> {
    pub fn never(label: impl Into<String>) -> Self {
        Test { label: label.into(), epsilon: N::zero(), rule: TestRule::Never }
    }

    pub fn custom(
        label: impl Into<String>,
        epsilon: N,
        rule: impl Fn(&Opinion<N>) -> Result<RejectionRegion> + Send + Sync + 'static,
    ) -> Self {
        Test { label: label.into(), epsilon, rule: TestRule::Custom(Arc::new(rule)) }
    }

    pub fn region(&self, opinion: &Opinion<N>) -> Result<RejectionRegion> {
        match &self.rule {
            TestRule::ReferenceCylinder { reference, .. } => {
                let t = self.reference_depth(opinion)?;
                Ok(normalize_region(opinion.alphabet(), [reference.truncate(t)]))
            }
            TestRule::TailRejection { depth } => tail_region(opinion, *depth, &self.epsilon),
            TestRule::Never => Ok(RejectionRegion::empty()),
            TestRule::Custom(rule) => rule(opinion),
        }
    }

    /// For reference-cylinder tests: the smallest `t >= 1` with
    /// `P(ω^t) < epsilon`.
    pub fn reference_depth(&self, opinion: &Opinion<N>) -> Result<usize> {
        let TestRule::ReferenceCylinder { reference, max_depth } = &self.rule else {
            return Err(Error::Precondition(format!("{} is not a reference-cylinder test", self.label)));
        };
        reference.prefix.validate(opinion.alphabet())?;
        reference.cycle.validate(opinion.alphabet())?;
        let mut prob = N::one();
        let mut current = Some(opinion.clone());
        for t in 1..=*max_depth {
            let symbol = reference.symbol_at(t - 1);
            match current.take() {
                Some(op) => {
                    let p = op.root_distribution().swap_remove(symbol as usize);
                    prob = prob * &p;
                    current = op.step(symbol);
                }
                None => prob = N::zero(),
            }
            if prob < self.epsilon {
                return Ok(t);
            }
        }
        Err(Error::AtomDetected {
            opinion: opinion.label().to_string(),
            history: reference.truncate(*max_depth).to_string(),
            epsilon: self.epsilon.to_text(),
            depth: *max_depth,
        })
    }
}

/// Test that rejects `ω^{t_P}`, the first cylinder along `reference` to
/// which the announced opinion assigns probability below `epsilon`.
pub fn reference_cylinder_test<N: Number>(reference: PathPattern, epsilon: N, max_depth: usize) -> Result<Test<N>> {
    if !epsilon.is_positive() || epsilon > N::one() {
        return Err(Error::Precondition(format!("epsilon must lie in (0,1], got {epsilon}")));
    }
    if max_depth < 1 {
        return Err(Error::Precondition("max_depth must be at least 1".into()));
    }
    Ok(Test {
        label: format!("reference-cylinder({reference}, eps={})", epsilon.to_text()),
        epsilon,
        rule: TestRule::ReferenceCylinder { reference, max_depth },
    })
}

/// Test that rejects the least likely depth-`depth` cylinders (ties broken
/// lexicographically) while their total probability stays at most
/// `epsilon`. Controls type-I error for every opinion by construction.
pub fn tail_rejection_test<N: Number>(depth: usize, epsilon: N) -> Result<Test<N>> {
    if !epsilon.is_positive() || epsilon >= N::one() {
        return Err(Error::Precondition(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    check_enumerable("tail-rejection cells", 2, depth)?;
    Ok(Test {
        label: format!("tail-rejection(d={depth}, eps={})", epsilon.to_text()),
        epsilon,
        rule: TestRule::TailRejection { depth },
    })
}

fn tail_region<N: Number>(opinion: &Opinion<N>, depth: usize, epsilon: &N) -> Result<RejectionRegion> {
    let marginal = opinion.depth_marginal(depth)?;
    let mut order: Vec<usize> = (0..marginal.len()).collect();
    order.sort_by(|&a, &b| marginal[a].partial_cmp(&marginal[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut total = N::zero();
    let mut chosen = Vec::new();
    for i in order {
        let next = total.clone() + &marginal[i];
        if next > *epsilon {
            break;
        }
        total = next;
        chosen.push(History::from_index(i, depth, opinion.alphabet()));
    }
    Ok(normalize_region(opinion.alphabet(), chosen))
}

/// Probability that an honest expert reporting `opinion` is rejected.
pub fn type1_error<N: Number>(test: &Test<N>, opinion: &Opinion<N>) -> Result<N> {
    Ok(region_prob(opinion, &test.region(opinion)?))
}

/// Lists every history of length `depth` together with its probability.
pub fn cylinder_table<N: Number>(opinion: &Opinion<N>, depth: usize) -> Result<Vec<(History, N)>> {
    let marginal = opinion.depth_marginal(depth)?;
    Ok(all_histories(opinion.alphabet(), depth).zip(marginal).collect())
}
