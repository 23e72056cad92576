//! Finite two-player zero-sum games.
//!
//! Rows belong to the minimizing player, columns to the maximizer. The
//! primary solver runs the simplex method (via `microlp`) on each player's
//! LP. A multiplicative-weights self-play solver is the fallback.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ties in best responses are resolved within this absolute margin.
const TIE_MARGIN: f64 = 1e-12;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    pub payoffs: Vec<Vec<f64>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl MatrixGame {
    pub fn new(payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let rows = payoffs.len();
        let cols = payoffs.first().map_or(0, Vec::len);
        let row_labels = (0..rows).map(|i| format!("r{i}")).collect();
        let col_labels = (0..cols).map(|j| format!("c{j}")).collect();
        Self::with_labels(payoffs, row_labels, col_labels)
    }

    pub fn with_labels(payoffs: Vec<Vec<f64>>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let rows = payoffs.len();
        let cols = payoffs.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Precondition("a matrix game needs at least one row and one column".into()));
        }
        if payoffs.iter().any(|r| r.len() != cols) {
            return Err(Error::Precondition("payoff matrix is not rectangular".into()));
        }
        if payoffs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("payoffs must be finite".into()));
        }
        if row_labels.len() != rows || col_labels.len() != cols {
            return Err(Error::Precondition("label counts do not match the matrix shape".into()));
        }
        Ok(MatrixGame { payoffs, row_labels, col_labels })
    }

    pub fn rows(&self) -> usize {
        self.payoffs.len()
    }

    pub fn cols(&self) -> usize {
        self.payoffs[0].len()
    }

    /// Appends a column (a new maximizer strategy).
    pub fn push_column(&mut self, label: impl Into<String>, column: Vec<f64>) -> Result<()> {
        if column.len() != self.rows() || column.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("column does not fit the game".into()));
        }
        for (row, x) in self.payoffs.iter_mut().zip(column) {
            row.push(x);
        }
        self.col_labels.push(label.into());
        Ok(())
    }

    /// Expected payoff of each row against a column mixture.
    pub fn row_payoffs(&self, col_strategy: &[f64]) -> Vec<f64> {
        self.payoffs.iter().map(|row| row.iter().zip(col_strategy).map(|(a, y)| a * y).sum()).collect()
    }

    /// Expected payoff of each column against a row mixture.
    pub fn col_payoffs(&self, row_strategy: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for (row, x) in self.payoffs.iter().zip(row_strategy) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * x;
            }
        }
        out
    }

    /// Plain text: one row per line, entries separated by spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.payoffs {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the plain text format; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let payoffs = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|x| x.parse::<f64>().map_err(|_| Error::Precondition(format!("bad payoff {x:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixGame::new(payoffs)
    }

    fn bounds(&self) -> (f64, f64) {
        self.payoffs.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Simplex,
    MultiplicativeWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
    /// `max_j (x·A)_j − min_i (A·y)_i` for the returned strategies.
    pub duality_gap: f64,
    pub solver: SolverKind,
    pub iterations: usize,
}

/// Row that minimizes the expected payoff against `col_strategy`; ties go
/// to the lowest index.
pub fn best_row_response(game: &MatrixGame, col_strategy: &[f64]) -> (usize, f64) {
    let payoffs = game.row_payoffs(col_strategy);
    let best = payoffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let index = payoffs.iter().position(|&p| p <= best + TIE_MARGIN).unwrap_or(0);
    (index, payoffs[index])
}

/// Column that maximizes the expected payoff against `row_strategy`; ties
/// go to the lowest index.
pub fn best_col_response(game: &MatrixGame, row_strategy: &[f64]) -> (usize, f64) {
    let payoffs = game.col_payoffs(row_strategy);
    let best = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let index = payoffs.iter().position(|&p| p >= best - TIE_MARGIN).unwrap_or(0);
    (index, payoffs[index])
}

fn duality_gap(game: &MatrixGame, row_strategy: &[f64], col_strategy: &[f64]) -> (f64, f64, f64) {
    let upper = best_col_response(game, row_strategy).1;
    let lower = best_row_response(game, col_strategy).1;
    (lower, upper, (upper - lower).max(0.0))
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    for x in v.iter_mut() {
        if *x < 0.0 || !x.is_finite() {
            *x = 0.0;
        }
    }
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    } else {
        let n = v.len() as f64;
        v.iter_mut().for_each(|x| *x = 1.0 / n);
    }
    v
}

/// Solves the game by linear programming and certifies the result by its
/// duality gap.
pub fn solve_matrix_game(game: &MatrixGame, tol: f64) -> Result<GameSolution> {
    solve_with(game, SolverKind::Simplex, tol, MAX_PIVOTS)
}

pub fn solve_with(game: &MatrixGame, solver: SolverKind, tol: f64, max_iters: usize) -> Result<GameSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let solution = match solver {
        SolverKind::Simplex => simplex(game, max_iters)?,
        SolverKind::MultiplicativeWeights => multiplicative_weights(game, tol, max_iters)?,
    };
    if solution.duality_gap > tol {
        return Err(Error::NonConvergence {
            iterations: solution.iterations,
            detail: format!("duality gap {:e} exceeds tolerance {tol:e}", solution.duality_gap),
        });
    }
    Ok(solution)
}

/// Solves the row player's LP (minimize `v` with `xA <= v`) and the
/// column player's LP (maximize `u` with `Ay >= u`) separately.
fn simplex(game: &MatrixGame, max_pivots: usize) -> Result<GameSolution> {
    let (row_strategy, upper, row_pivots) = player_lp(game, true)?;
    let (col_strategy, lower, col_pivots) = player_lp(game, false)?;
    let pivots = row_pivots + col_pivots;
    if pivots > max_pivots {
        return Err(Error::NonConvergence { iterations: pivots, detail: "simplex pivot budget exhausted".into() });
    }
    let (lo, hi, gap) = duality_gap(game, &row_strategy, &col_strategy);
    Ok(GameSolution {
        value: (0.5 * (upper + lower)).clamp(lo.min(hi), hi),
        row_strategy,
        col_strategy,
        duality_gap: gap,
        solver: SolverKind::Simplex,
        iterations: pivots,
    })
}

fn player_lp(game: &MatrixGame, rows: bool) -> Result<(Vec<f64>, f64, usize)> {
    let (own, other) = if rows { (game.rows(), game.cols()) } else { (game.cols(), game.rows()) };
    let entry = |k: usize, j: usize| if rows { game.payoffs[k][j] } else { game.payoffs[j][k] };
    let direction = if rows { OptimizationDirection::Minimize } else { OptimizationDirection::Maximize };
    let mut lp = Problem::new(direction);
    let probs: Vec<_> = (0..own).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let level = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for j in 0..other {
        let mut expr = LinearExpr::empty();
        for (k, &var) in probs.iter().enumerate() {
            expr.add(var, entry(k, j));
        }
        expr.add(level, -1.0);
        lp.add_constraint(expr, if rows { ComparisonOp::Le } else { ComparisonOp::Ge }, 0.0);
    }
    lp.add_constraint(probs.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>().as_slice(), ComparisonOp::Eq, 1.0);
    let failed = |detail: String| Error::NonConvergence { iterations: 0, detail };
    let outcome = lp.solve().map_err(|e| failed(format!("game LP: {e}")))?;
    let pivots = outcome.stats().lp_iterations as usize;
    let solution = outcome.into_solution().map_err(|_| failed("game LP interrupted".into()))?;
    let strategy = normalized(probs.iter().map(|&v| solution.var_value(v)).collect());
    Ok((strategy, solution.objective(), pivots))
}

/// Hedge self-play with averaged strategies. Learning rates are
/// `sqrt(ln n / T)` on payoffs rescaled to `[0, 1]`, restarted with a
/// doubled horizon whenever the averaged gap is still above `tol`.
fn multiplicative_weights(game: &MatrixGame, tol: f64, max_iters: usize) -> Result<GameSolution> {
    let (lo, hi) = game.bounds();
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (r, c) = (game.rows(), game.cols());
    let mut horizon = 1024usize;
    let mut used = 0usize;
    loop {
        let horizon_now = horizon.min(max_iters.saturating_sub(used)).max(1);
        let eta_row = ((r as f64).ln().max(1e-3) / horizon_now as f64).sqrt();
        let eta_col = ((c as f64).ln().max(1e-3) / horizon_now as f64).sqrt();
        let mut row_log = vec![0.0; r];
        let mut col_log = vec![0.0; c];
        let mut row_avg = vec![0.0; r];
        let mut col_avg = vec![0.0; c];
        for _ in 0..horizon_now {
            let x = softmax(&row_log);
            let y = softmax(&col_log);
            for (a, v) in row_avg.iter_mut().zip(&x) {
                *a += v;
            }
            for (a, v) in col_avg.iter_mut().zip(&y) {
                *a += v;
            }
            let row_loss = game.row_payoffs(&y);
            let col_gain = game.col_payoffs(&x);
            for (l, p) in row_log.iter_mut().zip(row_loss) {
                *l -= eta_row * (p - lo) / span;
            }
            for (l, p) in col_log.iter_mut().zip(col_gain) {
                *l += eta_col * (p - lo) / span;
            }
        }
        used += horizon_now;
        let row_strategy = normalized(row_avg);
        let col_strategy = normalized(col_avg);
        let (lower, upper, gap) = duality_gap(game, &row_strategy, &col_strategy);
        if gap <= tol || used >= max_iters {
            return Ok(GameSolution {
                value: 0.5 * (lower + upper),
                row_strategy,
                col_strategy,
                duality_gap: gap,
                solver: SolverKind::MultiplicativeWeights,
                iterations: used,
            });
        }
        horizon *= 2;
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

fn simplex_grid(parts: usize, grid: usize, visit: &mut dyn FnMut(&[f64])) {
    fn rec(parts: usize, left: usize, grid: usize, acc: &mut Vec<f64>, visit: &mut dyn FnMut(&[f64])) {
        if parts == 1 {
            acc.push(left as f64 / grid as f64);
            visit(acc);
            acc.pop();
            return;
        }
        for k in 0..=left {
            acc.push(k as f64 / grid as f64);
            rec(parts - 1, left - k, grid, acc, visit);
            acc.pop();
        }
    }
    rec(parts, grid, grid, &mut Vec::with_capacity(parts), visit);
}

/// Grid-search estimate of the game value for games of at most 3×3.
///
/// The row simplex grid gives an upper bound `min_x max_j (xA)_j`, the
/// column grid a lower bound `max_y min_i (Ay)_i`; the midpoint is
/// returned. Both bounds lie within `(max A − min A)·(n−1)/grid` of the
/// value, `n` the side length of the searched simplex.
pub fn brute_force_value(game: &MatrixGame, grid: usize) -> Result<f64> {
    if game.rows() > 3 || game.cols() > 3 {
        return Err(Error::Precondition("brute-force oracle handles at most 3x3 games".into()));
    }
    if grid < 1 {
        return Err(Error::Precondition("grid must be at least 1".into()));
    }
    let mut upper = f64::INFINITY;
    simplex_grid(game.rows(), grid, &mut |x| {
        let worst = game.col_payoffs(x).into_iter().fold(f64::NEG_INFINITY, f64::max);
        upper = upper.min(worst);
    });
    let mut lower = f64::NEG_INFINITY;
    simplex_grid(game.cols(), grid, &mut |y| {
        let worst = game.row_payoffs(y).into_iter().fold(f64::INFINITY, f64::min);
        lower = lower.max(worst);
    });
    Ok(0.5 * (upper + lower))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(rows: &[&[f64]]) -> MatrixGame {
        MatrixGame::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn matching_pennies() {
        let g = game(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let s = solve_matrix_game(&g, 1e-9).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        for p in s.row_strategy.iter().chain(&s.col_strategy) {
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_game() {
        let s = solve_matrix_game(&game(&[&[1.0, 1.0], &[1.0, 1.0]]), 1e-9).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.duality_gap, 0.0);
    }

    #[test]
    fn closed_form_two_by_two() {
        let g = game(&[&[0.9, 0.1], &[0.2, 0.8]]);
        let closed = (0.8 * 0.9 - 0.1 * 0.2) / (0.9 + 0.8 - 0.1 - 0.2);
        let s = solve_matrix_game(&g, 1e-9).unwrap();
        assert!((s.value - closed).abs() < 1e-9);
        assert!((brute_force_value(&g, 1000).unwrap() - 0.5).abs() < 0.002);
    }

    #[test]
    fn best_responses() {
        let g = game(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(best_row_response(&g, &[1.0, 0.0]), (1, 0.0));
        let g = game(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(best_row_response(&g, &[0.5, 0.5]).0, 0);
        let g = game(&[&[0.9, 0.1], &[0.2, 0.8]]);
        assert_eq!(best_row_response(&g, &[0.5, 0.5]).0, 0);
    }

    #[test]
    fn brute_force_examples() {
        let g = game(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!((brute_force_value(&g, 1000).unwrap() - 0.5).abs() < 0.002);
        assert_eq!(brute_force_value(&game(&[&[0.3]]), 1000).unwrap(), 0.3);
        let big = MatrixGame::new(vec![vec![0.0; 4]; 4]).unwrap();
        assert!(brute_force_value(&big, 10).is_err());
    }

    #[test]
    fn multiplicative_weights_fallback() {
        let g = game(&[&[0.9, 0.1], &[0.2, 0.8]]);
        let s = solve_with(&g, SolverKind::MultiplicativeWeights, 1e-3, 2_000_000).unwrap();
        assert!((s.value - 0.5).abs() < 1e-3);
        assert!(s.duality_gap <= 1e-3);
        assert!(matches!(
            solve_with(&g, SolverKind::MultiplicativeWeights, 1e-9, 2000),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn degenerate_duplicate_rows() {
        let g = game(&[&[1.0, 0.0, 1.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]]);
        let s = solve_matrix_game(&g, 1e-9).unwrap();
        assert!((s.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn text_round_trip_and_validation() {
        let g = game(&[&[0.9, 0.1], &[0.2, 0.8]]);
        assert_eq!(MatrixGame::from_text(&g.to_text()).unwrap(), g);
        assert!(MatrixGame::from_text("1 2\n3").is_err());
        assert!(MatrixGame::new(vec![]).is_err());
        assert!(MatrixGame::new(vec![vec![f64::NAN]]).is_err());
        assert!(solve_matrix_game(&g, 0.0).is_err());
    }
}
