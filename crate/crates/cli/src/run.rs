use std::path::{Path, PathBuf};
use std::time::Instant;

use exptest::game::{solve_with, MatrixGame, SolverKind};
use exptest::history::PathPattern;
use exptest::manipulation::{double_oracle_manipulate, verify_nonmanipulable, DoubleOracleConfig, Strategy};
use exptest::measures::{halving_limit, make_example1_surrogate};
use exptest::merging::{example1_gap, merging_curve, CurveMode};
use exptest::testing::{epsilon_cylinder_partition, reference_cylinder_test, type1_error};
use exptest::{Alphabet, Exact, Number};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    BdtestConfig, ColumnRule, CurveMethod, Example1Config, GameConfig, GameSolver, ManipulateConfig, MergeConfig, Mode,
    PartitionConfig, ScenarioConfig, ScenarioKind,
};
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, Artifact};

pub struct RunOptions {
    pub out: PathBuf,
    /// Directory that relative paths inside the config resolve against.
    pub base_dir: PathBuf,
    pub quiet: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: ScenarioKind,
    pub mode: Mode,
    pub version: &'static str,
    pub config: ScenarioConfig,
    pub artifacts: Vec<Artifact>,
    pub duration_ms: u128,
    /// `false` only for manipulation runs that did not reach the target.
    pub success: bool,
}

/// What a scenario produced: named payloads, a one-line summary, and
/// whether its claim was established.
struct Outcome {
    files: Vec<(&'static str, String)>,
    summary: String,
    success: bool,
    display: Option<String>,
}

pub fn run_scenario(config: &ScenarioConfig, options: &RunOptions) -> CliResult<RunManifest> {
    let kind = config.kind()?;
    let started = Instant::now();
    let outcome = match (kind, config.mode) {
        (ScenarioKind::Merge, Mode::Rational) => merge::<Exact>(config.merge.as_ref().unwrap(), config.seed),
        (ScenarioKind::Merge, Mode::Float) => merge::<f64>(config.merge.as_ref().unwrap(), config.seed),
        (ScenarioKind::Example1, Mode::Rational) => example1::<Exact>(config.example1.as_ref().unwrap()),
        (ScenarioKind::Example1, Mode::Float) => example1::<f64>(config.example1.as_ref().unwrap()),
        (ScenarioKind::Bdtest, Mode::Rational) => bdtest::<Exact>(config.bdtest.as_ref().unwrap()),
        (ScenarioKind::Bdtest, Mode::Float) => bdtest::<f64>(config.bdtest.as_ref().unwrap()),
        (ScenarioKind::Partition, Mode::Rational) => partition::<Exact>(config.partition.as_ref().unwrap()),
        (ScenarioKind::Partition, Mode::Float) => partition::<f64>(config.partition.as_ref().unwrap()),
        (ScenarioKind::Manipulate, Mode::Rational) => manipulate::<Exact>(config.manipulate.as_ref().unwrap()),
        (ScenarioKind::Manipulate, Mode::Float) => manipulate::<f64>(config.manipulate.as_ref().unwrap()),
        (ScenarioKind::Game, _) => game(config.game.as_ref().unwrap(), &options.base_dir),
    }?;

    std::fs::create_dir_all(&options.out)
        .map_err(|source| CliError::Io { path: options.out.display().to_string(), source })?;
    let mut artifacts = Vec::new();
    for (name, contents) in &outcome.files {
        artifacts.push(write_atomic(&options.out, name, contents)?);
    }
    let manifest = RunManifest {
        scenario: kind,
        mode: config.mode,
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        artifacts,
        duration_ms: started.elapsed().as_millis(),
        success: outcome.success,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_atomic(&options.out, "manifest.json", &text)?;

    if !options.quiet {
        if let Some(display) = &outcome.display {
            print!("{display}");
        }
        println!("{}: {}", kind.name(), outcome.summary);
    }
    Ok(manifest)
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json serializes") + "\n"
}

fn num<N: Number>(field: &str, text: &exptest::opinion_spec::NumText) -> CliResult<N> {
    text.value::<N>().map_err(|e| CliError::config(field, e.to_string()))
}

fn merge<N: Number>(cfg: &MergeConfig, seed: Option<u64>) -> CliResult<Outcome> {
    let p = cfg.p.build::<N>()?;
    let q = cfg.q.build::<N>()?;
    let threshold = num::<N>("merge.threshold", &cfg.threshold)?;
    let mode = match cfg.method {
        CurveMethod::Exact => CurveMode::Exact,
        CurveMethod::MonteCarlo => CurveMode::MonteCarlo {
            seed: seed.ok_or_else(|| CliError::config("seed", "monte-carlo requires a seed"))?,
            paths: cfg.paths,
        },
    };
    let curve = merging_curve(&p, &q, cfg.t_max, cfg.lookahead, threshold, mode)?;
    let last = curve.rows.last().expect("t = 0 row always present");
    let summary = format!("t={} mean TV {} exceedance {}", last.t, last.mean.to_text(), last.exceedance.to_text());
    let mut json = curve.to_json();
    json["p"] = p.to_json();
    json["q"] = q.to_json();
    Ok(Outcome {
        files: vec![("curve.csv", curve.to_csv()), ("curve.json", pretty(&json))],
        summary,
        success: true,
        display: None,
    })
}

fn example1<N: Number>(cfg: &Example1Config) -> CliResult<Outcome> {
    let reference = PathPattern::parse(&cfg.reference, Alphabet::BINARY)?;
    let surrogate = make_example1_surrogate::<N>(cfg.n, cfg.k)?;
    let limit = halving_limit::<N>();
    let mut csv = String::from("t,history,gap,surrogate_prob,limit_prob\n");
    let mut rows = Vec::new();
    let half = N::one() / N::from_usize(2);
    let mut all_half = true;
    for t in 0..=cfg.n {
        let h = reference.truncate(t);
        let gap = example1_gap::<N>(cfg.n, cfg.k, &h)?;
        let sp = surrogate.opinion.cylinder_prob(&h);
        let lp = limit.cylinder_prob(&h);
        all_half &= gap == half;
        csv.push_str(&format!("{t},{h},{},{},{}\n", gap.to_text(), sp.to_text(), lp.to_text()));
        rows.push(json!({
            "t": t,
            "history": h.to_string(),
            "gap": gap.to_json(),
            "surrogate_prob": sp.to_json(),
            "limit_prob": lp.to_json(),
        }));
    }
    let json = json!({
        "n": cfg.n,
        "k": cfg.k,
        "reference": reference.to_string(),
        "number_mode": N::MODE,
        "rows": rows,
    });
    Ok(Outcome {
        files: vec![("gap.csv", csv), ("gap.json", pretty(&json))],
        summary: format!("gap {} for every t <= {}", if all_half { "= 1/2" } else { "varies" }, cfg.n),
        success: true,
        display: None,
    })
}

fn bdtest<N: Number>(cfg: &BdtestConfig) -> CliResult<Outcome> {
    let corpus = cfg.corpus.iter().map(|s| s.build::<N>()).collect::<Result<Vec<_>, _>>()?;
    let alphabet = corpus[0].alphabet();
    let reference = PathPattern::parse(&cfg.reference, alphabet)?;
    let epsilon = num::<N>("bdtest.epsilon", &cfg.epsilon)?;
    let test = reference_cylinder_test(reference.clone(), epsilon.clone(), cfg.max_depth)?;
    let mut csv = String::from("opinion,t,region,type1_error\n");
    let mut rows = Vec::new();
    for op in &corpus {
        let t = test.reference_depth(op)?;
        let err = type1_error(&test, op)?;
        let region = reference.truncate(t);
        csv.push_str(&format!("{},{t},{region},{}\n", csv_field(op.label()), err.to_text()));
        rows.push(json!({
            "opinion": op.label(),
            "t": t,
            "region": region.to_string(),
            "type1_error": err.to_json(),
            "below_epsilon": err < epsilon,
        }));
    }
    let strategy = match &cfg.weights {
        Some(w) => {
            let weights = w.iter().map(|x| num::<N>("bdtest.weights", x)).collect::<CliResult<Vec<_>>>()?;
            let total = weights.iter().fold(N::zero(), |a, b| a + b);
            Strategy::new(corpus.clone(), weights.into_iter().map(|x| x / &total).collect())?
        }
        None => Strategy::uniform(corpus.clone())?,
    };
    let witness = verify_nonmanipulable(&test, &strategy)?;
    let json = json!({
        "test": test.label,
        "epsilon": epsilon.to_json(),
        "number_mode": N::MODE,
        "opinions": rows,
        "strategy": strategy.to_json(),
        "witness": { "cylinder": witness.cylinder.to_string(), "pass_prob": witness.pass_prob.to_json() },
    });
    Ok(Outcome {
        files: vec![("bdtest.csv", csv), ("bdtest.json", pretty(&json))],
        summary: format!("witness cylinder \"{}\" passes with {}", witness.cylinder, witness.pass_prob.to_text()),
        success: true,
        display: None,
    })
}

fn partition<N: Number>(cfg: &PartitionConfig) -> CliResult<Outcome> {
    let opinion = cfg.opinion.build::<N>()?;
    let epsilon = num::<N>("partition.epsilon", &cfg.epsilon)?;
    let partition = epsilon_cylinder_partition(&opinion, epsilon, cfg.max_depth)?;
    let mut csv = String::from("history,depth,prob\n");
    for (h, p) in &partition.cells {
        csv.push_str(&format!("{h},{},{}\n", h.len(), p.to_text()));
    }
    let mut json = partition.to_json();
    json["opinion"] = opinion.to_json();
    Ok(Outcome {
        files: vec![("partition.csv", csv), ("partition.json", pretty(&json))],
        summary: format!("{} cells, total {}", partition.cells.len(), partition.total().to_text()),
        success: true,
        display: Some(partition.render_tree()),
    })
}

fn manipulate<N: Number>(cfg: &ManipulateConfig) -> CliResult<Outcome> {
    let epsilon = num::<N>("manipulate.epsilon", &cfg.epsilon)?;
    let delta = num::<N>("manipulate.delta", &cfg.delta)?;
    let alphabet = Alphabet::new(cfg.alphabet)?;
    let test = exptest::testing::tail_rejection_test(cfg.depth, epsilon.clone())?;
    let config = DoubleOracleConfig::<N> {
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        initial_menu: None,
        hedge_sharpness: match cfg.column_rule {
            ColumnRule::Pure => None,
            ColumnRule::Hedge => Some(cfg.hedge_sharpness),
        },
    };
    let report = double_oracle_manipulate(&test, cfg.depth, alphabet, epsilon, delta, &config)?;
    let min = report.min_pass_prob().map(|p| p.to_f64()).unwrap_or(f64::NAN);
    Ok(Outcome {
        files: vec![("paths.csv", report.paths_csv()), ("report.json", pretty(&report.to_json()))],
        summary: format!(
            "{} after {} iterations ({:?}), value {:.6}, min pass {min:.6}",
            if report.certified { "certified" } else { "NOT certified" },
            report.iterations,
            report.stop_reason,
            report.value,
        ),
        success: report.certified,
        display: None,
    })
}

fn game(cfg: &GameConfig, base_dir: &Path) -> CliResult<Outcome> {
    let game = match (&cfg.matrix_file, &cfg.payoffs) {
        (Some(file), _) => {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            MatrixGame::from_text(&text).map_err(|e| CliError::config("game.matrix_file", e.to_string()))?
        }
        (None, Some(rows)) => MatrixGame::new(rows.clone())?,
        (None, None) => return Err(CliError::config("game", "set exactly one of matrix_file and payoffs")),
    };
    let solver = match cfg.solver {
        GameSolver::Simplex => SolverKind::Simplex,
        GameSolver::MultiplicativeWeights => SolverKind::MultiplicativeWeights,
    };
    let solution = solve_with(&game, solver, cfg.tol, cfg.max_iters)?;
    let mut csv = String::from("player,index,label,probability\n");
    for (player, labels, strategy) in
        [("row", &game.row_labels, &solution.row_strategy), ("col", &game.col_labels, &solution.col_strategy)]
    {
        for (i, (label, p)) in labels.iter().zip(strategy).enumerate() {
            csv.push_str(&format!("{player},{i},{},{p:?}\n", csv_field(label)));
        }
    }
    let json = json!({ "game": game, "solution": solution });
    Ok(Outcome {
        files: vec![("strategies.csv", csv), ("solution.json", pretty(&json))],
        summary: format!("value {:?} (duality gap {:e})", solution.value, solution.duality_gap),
        success: true,
        display: None,
    })
}

/// Quotes a CSV field when it contains a separator or quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
