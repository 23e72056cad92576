use exptest::game::{
    best_col_response, best_row_response, brute_force_value, solve_matrix_game, solve_with, MatrixGame, SolverKind,
};
use proptest::prelude::*;

fn matrix(max_side: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec((-20i32..=20).prop_map(|x| x as f64 / 4.0), c), r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_is_bracketed_by_best_responses(m in matrix(6)) {
        let game = MatrixGame::new(m).unwrap();
        let s = solve_matrix_game(&game, 1e-7).unwrap();
        let upper = best_col_response(&game, &s.row_strategy).1;
        let lower = best_row_response(&game, &s.col_strategy).1;
        prop_assert!(lower - 1e-7 <= s.value && s.value <= upper + 1e-7);
        prop_assert!((s.row_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((s.col_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn value_is_affine_equivariant(m in matrix(5), scale in 1i32..5, shift in -3i32..4) {
        let (a, b) = (scale as f64 / 2.0, shift as f64);
        let base = solve_matrix_game(&MatrixGame::new(m.clone()).unwrap(), 1e-7).unwrap().value;
        let moved: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|x| a * x + b).collect()).collect();
        let value = solve_matrix_game(&MatrixGame::new(moved).unwrap(), 1e-7).unwrap().value;
        prop_assert!((value - (a * base + b)).abs() < 1e-6);
    }

    #[test]
    fn negated_transpose_negates_value(m in matrix(5)) {
        let value = solve_matrix_game(&MatrixGame::new(m.clone()).unwrap(), 1e-7).unwrap().value;
        let t: Vec<Vec<f64>> = (0..m[0].len()).map(|j| m.iter().map(|r| -r[j]).collect()).collect();
        let flipped = solve_matrix_game(&MatrixGame::new(t).unwrap(), 1e-7).unwrap().value;
        prop_assert!((value + flipped).abs() < 1e-6);
    }

    #[test]
    fn lp_agrees_with_grid_oracle(m in matrix(3)) {
        let game = MatrixGame::new(m).unwrap();
        let value = solve_matrix_game(&game, 1e-7).unwrap().value;
        let grid = brute_force_value(&game, 120).unwrap();
        // Grid bounds sit within span·(n−1)/grid of the value.
        prop_assert!((value - grid).abs() <= 10.0 * 2.0 / 120.0 + 1e-9);
    }

    #[test]
    fn text_format_round_trips(m in matrix(4)) {
        let game = MatrixGame::new(m).unwrap();
        prop_assert_eq!(MatrixGame::from_text(&game.to_text()).unwrap(), game);
    }
}

#[test]
fn multiplicative_weights_approximates_lp() {
    let game = MatrixGame::new(vec![vec![3.0, -1.0, 0.5], vec![-2.0, 4.0, 1.0], vec![0.0, 0.0, 2.0]]).unwrap();
    let lp = solve_matrix_game(&game, 1e-9).unwrap();
    let mw = solve_with(&game, SolverKind::MultiplicativeWeights, 1e-2, 1 << 22).unwrap();
    assert!((lp.value - mw.value).abs() < 1e-2, "lp {} mw {}", lp.value, mw.value);
}
