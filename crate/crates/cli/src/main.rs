use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ifgame::apps::{
    birthday_closed_form, birthday_sentence, cyclic_structure, hash_structure, hashing_equilibrium,
    hashing_sentence, matching_pennies, minimal_degree_indices, AppError,
};
use ifgame::formula::{parse, Formula, ParseError};
use ifgame::game::{Game, GameError, DEFAULT_STRATEGY_BUDGET};
use ifgame::matrix::{reduce, tallies, GameMatrix};
use ifgame::rational::{fmt_decimal, fmt_pq, Rational};
use ifgame::structure::Structure;
use ifgame::value::{
    balanced_submatrix_certificate, balanced_value, best_report, detect_trivial, solve_value,
    submatrix_lower_bound, verify_equilibrium, SearchMode, ValueReport, EXHAUSTIVE_ROW_LIMIT,
};

#[derive(Parser)]
#[command(name = "ifgame", version, about = "Equilibrium values of IF sentences on finite structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Keep every connective as a move instead of evaluating quantifier-free ones
    #[arg(long, global = true)]
    no_collapse: bool,
    /// Pure-strategy budget per player
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_STRATEGY_BUDGET)]
    max_strategies: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct Input {
    /// Structure file (JSON)
    #[arg(long, value_name = "PATH")]
    structure: Option<PathBuf>,
    /// Sentence text
    #[arg(long, value_name = "TEXT")]
    formula: Option<String>,
    /// File holding the sentence text
    #[arg(long, value_name = "PATH")]
    formula_file: Option<PathBuf>,
    /// Matrix file: "m n" header, then m rows of 0/1 entries
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact value with an equilibrium certificate
    Value(Input),
    /// floor/ceil and the best row-submatrix lower bound
    Bounds(Input),
    /// Equilibrium pair, preferring the cheapest certificate
    Equilibrium(Input),
    /// Remove duplicate and weakly dominated rows and columns
    Reduce(Input),
    /// Print the strategic form
    Matrix(Input),
    /// Matching Pennies on N elements
    Mp { n: usize },
    /// Birthday game: N days, M people
    Birthday { n: usize, m: usize },
    /// Universal hashing game
    Hashing { keys: usize, values: usize },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }
    fn parse(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        let code = if matches!(e, ParseError::Invalid(_)) { 3 } else { 2 };
        Failure { code, msg: e.to_string() }
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        let code = match e {
            GameError::BudgetExceeded { .. } => 4,
            _ => 3,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<AppError> for Failure {
    fn from(e: AppError) -> Self {
        match e {
            AppError::TooSmall { .. } => Failure::usage(e.to_string()),
            AppError::TooLarge { .. } => Failure { code: 4, msg: e.to_string() },
            AppError::Game(g) => g.into(),
        }
    }
}

/// Ordered `key value` pairs, printed as `key value` or `key=value`.
struct Report {
    format: Format,
    lines: Vec<(String, String)>,
}

impl Report {
    fn new(format: Format) -> Self {
        Report { format, lines: Vec::new() }
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Text output adds a 6-place decimal; machine output never does.
    fn rational(&mut self, key: &str, q: &Rational) {
        match self.format {
            Format::Text => self.put(key, format!("{} ({})", fmt_pq(q), fmt_decimal(q, 6))),
            Format::Machine => self.put(key, fmt_pq(q)),
        }
    }

    fn render(&self) -> String {
        let sep = match self.format {
            Format::Text => ' ',
            Format::Machine => '=',
        };
        let mut out = String::new();
        for (k, v) in &self.lines {
            writeln!(out, "{k}{sep}{v}").unwrap();
        }
        out
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

struct Built {
    matrix: GameMatrix,
    from_game: Option<(usize, usize, Vec<String>)>,
}

fn load_formula(input: &Input, s: &Structure) -> Result<Formula, Failure> {
    let text = match (&input.formula, &input.formula_file) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) => read(p)?,
        _ => return Err(Failure::usage("give exactly one of --formula and --formula-file")),
    };
    Ok(parse(text.trim(), &s.vocabulary())?)
}

fn build(input: &Input, cli: &Cli) -> Result<Built, Failure> {
    let formula_given = input.formula.is_some() || input.formula_file.is_some();
    match (&input.matrix, &input.structure) {
        (Some(p), None) if !formula_given => {
            let matrix = GameMatrix::parse_text(&read(p)?)
                .map_err(|e| Failure::parse(format!("{}: {e}", p.display())))?;
            Ok(Built { matrix, from_game: None })
        }
        (None, Some(p)) if formula_given => {
            let s = Structure::load(&read(p)?)
                .map_err(|e| Failure::parse(format!("{}: {e}", p.display())))?;
            let f = load_formula(input, &s)?;
            let game = Game::new(&s, &f, !cli.no_collapse)?;
            let r = game.build_matrix(cli.max_strategies)?;
            let loci = r.collapsed_loci.iter().map(ToString::to_string).collect();
            Ok(Built {
                matrix: r.matrix,
                from_game: Some((r.eloise_count, r.abelard_count, loci)),
            })
        }
        _ => Err(Failure::usage(
            "give either --matrix, or --structure with one of --formula/--formula-file",
        )),
    }
}

fn vector(p: &[Rational]) -> String {
    p.iter().map(fmt_pq).collect::<Vec<_>>().join(" ")
}

fn indices(s: &BTreeSet<usize>) -> String {
    s.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn header(r: &mut Report, b: &Built) {
    r.put("rows", b.matrix.rows());
    r.put("cols", b.matrix.cols());
    if let Some((e, a, loci)) = &b.from_game {
        r.put("eloise_strategies", e);
        r.put("abelard_strategies", a);
        r.put("collapsed", loci.join(" "));
    }
}

fn bounds(r: &mut Report, u: &GameMatrix) {
    let t = tallies(u);
    r.rational("floor", &t.floor);
    r.rational("ceil", &t.ceil);
}

fn value_lines(r: &mut Report, v: &ValueReport, strategies: bool) {
    r.rational("value", &v.value);
    r.put("method", v.method);
    if strategies {
        r.put("eloise", vector(v.eloise.probs()));
        r.put("abelard", vector(v.abelard.probs()));
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let mut r = Report::new(cli.format);
    match &cli.command {
        Command::Value(input) => {
            let b = build(input, cli)?;
            header(&mut r, &b);
            bounds(&mut r, &b.matrix);
            value_lines(&mut r, &best_report(&b.matrix), true);
        }
        Command::Bounds(input) => {
            let b = build(input, cli)?;
            header(&mut r, &b);
            let t = tallies(&b.matrix);
            r.rational("floor", &t.floor);
            r.rational("ceil", &t.ceil);
            r.put("colargmin", indices(&t.colargmin));
            r.put("rowargmax", indices(&t.rowargmax));
            let mode = if b.matrix.rows() <= EXHAUSTIVE_ROW_LIMIT {
                SearchMode::Exhaustive
            } else {
                SearchMode::Greedy
            };
            let (lb, rows) = submatrix_lower_bound(&b.matrix, mode).expect("mode fits the size");
            r.rational("submatrix_floor", &lb);
            r.put("submatrix_rows", indices(&rows));
            r.put(
                "submatrix_search",
                if mode == SearchMode::Exhaustive { "exhaustive" } else { "greedy" },
            );
        }
        Command::Equilibrium(input) => {
            let b = build(input, cli)?;
            header(&mut r, &b);
            let u = &b.matrix;
            let v = detect_trivial(u)
                .or_else(|| balanced_value(u))
                .or_else(|| balanced_submatrix_certificate(u))
                .unwrap_or_else(|| solve_value(u));
            value_lines(&mut r, &v, true);
            let ok = verify_equilibrium(u, &v.eloise, &v.abelard).expect("dimensions match");
            r.put("verified", ok);
        }
        Command::Reduce(input) => {
            let b = build(input, cli)?;
            header(&mut r, &b);
            let red = reduce(&b.matrix);
            let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            r.put("reduced_rows", red.matrix.rows());
            r.put("reduced_cols", red.matrix.cols());
            r.put("row_map", join(&red.row_map));
            r.put("col_map", join(&red.col_map));
            let mut out = r.render();
            out.push_str(&red.matrix.to_text());
            return Ok(out);
        }
        Command::Matrix(input) => {
            let b = build(input, cli)?;
            header(&mut r, &b);
            let mut out = r.render();
            out.push_str(&b.matrix.to_text());
            return Ok(out);
        }
        Command::Mp { n } => {
            let (f, s) = matching_pennies(*n)?;
            let game = Game::new(&s, &f, !cli.no_collapse)?;
            let u = game.build_matrix(cli.max_strategies)?.matrix;
            r.put("sentence", &f);
            r.put("rows", u.rows());
            r.put("cols", u.cols());
            bounds(&mut r, &u);
            value_lines(&mut r, &best_report(&u), false);
        }
        Command::Birthday { n, m } => {
            let f = birthday_sentence(*m)?;
            let s = cyclic_structure(*n)?;
            let game = Game::new(&s, &f, !cli.no_collapse)?;
            let u = game.build_matrix(cli.max_strategies)?.matrix;
            r.put("sentence", &f);
            r.put("rows", u.rows());
            r.put("cols", u.cols());
            bounds(&mut r, &u);
            let v = best_report(&u);
            value_lines(&mut r, &v, false);
            let (distinct, dup) = birthday_closed_form(*n, *m);
            r.rational("all_distinct", &distinct);
            r.rational("duplicate", &dup);
            let matches = match (v.value == dup, v.value == distinct) {
                (true, false) => "duplicate",
                (false, true) => "all-distinct",
                (true, true) => "both",
                (false, false) => "none",
            };
            r.put("matches", matches);
        }
        Command::Hashing { keys, values } => {
            let (s, spec) = hash_structure(*keys, *values)?;
            let f = hashing_sentence(&spec);
            let s_star = minimal_degree_indices(&spec);
            r.put("tables", spec.functions.len());
            r.put("minimal_degree_indices", indices(&s_star));
            if *keys < 2 {
                let u = Game::new(&s, &f, !cli.no_collapse)?
                    .build_matrix(cli.max_strategies)?
                    .matrix;
                r.put("rows", u.rows());
                r.put("cols", u.cols());
                bounds(&mut r, &u);
                value_lines(&mut r, &best_report(&u), false);
            } else {
                let h = hashing_equilibrium(&spec, cli.max_strategies)?;
                r.put("rows", h.matrix.rows());
                r.put("cols", h.matrix.cols());
                bounds(&mut r, &h.matrix);
                let v = best_report(&h.matrix);
                value_lines(&mut r, &v, false);
                r.rational("uniform_pair_value", &h.value);
                r.put("uniform_pair_verified", h.verified);
            }
        }
    }
    Ok(r.render())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
