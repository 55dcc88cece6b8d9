//! Argument handling and subcommand dispatch for `ncr`.

use std::fmt::Write as _;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncr_core::granularity::{GranularityTable, Padding, TableConfig};
use ncr_core::measures::Measure;
use ncr_core::modulus::free_positions_below;
use ncr_core::rea::{construction_one, lift_test};
use ncr_core::selfmod::{
    construction_two, domination_check, failure_indices, nscr_s_membership, tk_enumerate,
    tk_weight_bound, weakly_generic_build, DenseSet,
};
use ncr_core::solovay::{build_cover, check_nesting_elements, LevelTest, LevelTestFile};
use ncr_core::{BitString, Dyadic};
use serde_json::{json, Value};

use crate::input::{parse_measure, parse_modulus, parse_operator, parse_stream, read_json_arg};
use crate::suites::{run_suite, SuiteConfig, SUITES};

#[derive(Debug, Parser)]
#[command(
    name = "ncr",
    version,
    about = "Granularity tables, level-n Solovay tests and padding constructions"
)]
pub struct Cli {
    /// lebesgue, bernoulli:P, perfect:MODULUS, split:SEED, inline JSON, or a JSON file
    #[arg(long, global = true, default_value = "lebesgue")]
    pub measure: String,
    /// Depth of the granularity table (command-specific default)
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Test level, or `k` for the `T_k` commands
    #[arg(long, global = true)]
    pub level: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    pub out: OutFormat,
    /// Seed for generated corpora
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate h, ĥ, g and ĝ
    Table {
        /// Largest n for g and ĝ (defaults to the depth)
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Build and check level-n tests
    #[command(subcommand)]
    Test(TestCommand),
    /// Padding along an enumeration operator
    #[command(subcommand)]
    Rea(ReaCommand),
    /// Self-modulus padding
    #[command(subcommand)]
    Selfmod(SelfmodCommand),
    /// The tree of self-modulus padded strings
    #[command(subcommand)]
    Nscr(NscrCommand),
    /// Run verification suites
    Verify {
        /// all, or one of the listed suites
        #[arg(long, default_value = "all")]
        suite: String,
        /// Randomized cases per round-trip family
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum TestCommand {
    /// Cover of a stream by prefixes with summable level-n weights
    BuildCover {
        #[arg(long, default_value = "alt")]
        stream: String,
        /// Number of elements
        #[arg(long, default_value_t = 12)]
        count: usize,
    },
    /// Read a level-n test as a test at every lower level down to `--down-to`
    CheckNesting {
        /// Test JSON as written by `test build-cover`
        #[arg(long)]
        file: String,
        #[arg(long)]
        down_to: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct ReaArgs {
    /// `example`, inline JSON, or a JSON file
    #[arg(long, default_value = "example")]
    pub op: String,
    #[arg(long)]
    pub imax: Option<u64>,
    /// Steps simulated before an index is treated as never enumerated
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
}

#[derive(Debug, Subcommand)]
pub enum ReaCommand {
    /// Build the padded set and print its block table
    Demo {
        #[command(flatten)]
        rea: ReaArgs,
        #[arg(long, default_value = "ones")]
        oracle: String,
    },
    /// Lift a level-2n test of the oracle to a level-n test of the padded set
    Lift {
        #[command(flatten)]
        rea: ReaArgs,
        #[arg(long, default_value = "alt")]
        oracle: String,
        /// Source test JSON; a cover of the oracle is built when absent
        #[arg(long)]
        test: Option<String>,
        /// Elements of the built cover
        #[arg(long, default_value_t = 12)]
        count: usize,
    },
}

#[derive(Debug, Args)]
pub struct ModulusArgs {
    /// poly:D, exp, table:V0,V1,... or JSON
    #[arg(long, default_value = "poly:1")]
    pub modulus: String,
    #[arg(long, default_value = "alt")]
    pub stream: String,
    #[arg(long, default_value_t = 3)]
    pub blocks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaddingArg {
    Approx,
    Exact,
}

impl From<PaddingArg> for Padding {
    fn from(p: PaddingArg) -> Self {
        match p {
            PaddingArg::Approx => Padding::Approx,
            PaddingArg::Exact => Padding::Exact,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SelfmodCommand {
    /// Pad a stream by its modulus
    Build {
        #[command(flatten)]
        m: ModulusArgs,
    },
    /// Enumerate T_k and bound its weight (k from --level)
    Tk {
        #[arg(long, default_value_t = 10)]
        max_len: usize,
        #[arg(long, value_enum, default_value_t = PaddingArg::Approx)]
        padding: PaddingArg,
    },
    /// Blocks where the modulus outgrows the padding, with T_k witnesses
    Failures {
        #[command(flatten)]
        m: ModulusArgs,
        /// First block of the domination replay
        #[arg(long, default_value_t = 0)]
        n0: usize,
    },
    /// Weakly generic variant meeting a list of dense sets
    Generic {
        #[command(flatten)]
        m: ModulusArgs,
        /// JSON array of dense sets, inline or a file
        #[arg(long)]
        sets: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum NscrCommand {
    /// Place a string relative to the padded tree of a modulus
    Classify {
        #[arg(long, default_value = "poly:1")]
        modulus: String,
        #[arg(long)]
        string: String,
    },
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub value: Value,
    pub csv: Option<String>,
    pub pretty: Option<String>,
    /// A checked inequality or claim failed.
    pub failed: bool,
}

impl Outcome {
    fn json(value: Value, failed: bool) -> Self {
        Outcome {
            value,
            csv: None,
            pretty: None,
            failed,
        }
    }

    pub fn render(&self, out: OutFormat) -> Result<String> {
        Ok(match out {
            OutFormat::Json => serde_json::to_string_pretty(&self.value)? + "\n",
            OutFormat::Csv => match &self.csv {
                Some(c) => c.clone(),
                None => bail!("this command has no CSV form; use --out json or --out pretty"),
            },
            OutFormat::Pretty => match &self.pretty {
                Some(p) => p.clone(),
                None => serde_json::to_string_pretty(&self.value)? + "\n",
            },
        })
    }
}

fn table_for(mu: &Measure, depth: usize) -> Result<GranularityTable> {
    Ok(GranularityTable::build(
        &**mu,
        TableConfig::new(depth, depth as u64),
    )?)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    if let Some(d) = cli.depth {
        ensure!(d >= 1, "--depth must be positive");
    }
    if let Some(l) = cli.level {
        ensure!(l >= 1, "--level must be at least 1");
    }
    let depth = |default: usize| cli.depth.unwrap_or(default);
    let measure = || parse_measure(&cli.measure).map(|(mu, _)| mu);
    match &cli.command {
        Command::Table { n_max } => {
            let mu = measure()?;
            let d = depth(14);
            let t = GranularityTable::build(&*mu, TableConfig::new(d, n_max.unwrap_or(d as u64)))?;
            Ok(Outcome {
                value: t.to_json(),
                csv: Some(t.to_csv()),
                pretty: Some(pretty_table(&t)),
                failed: false,
            })
        }
        Command::Test(TestCommand::BuildCover { stream, count }) => {
            let mu = measure()?;
            let a = parse_stream(stream)?;
            let t = table_for(&mu, depth(64))?;
            let cover = build_cover(&a, cli.level.unwrap_or(1), &t, *count)?;
            Ok(Outcome::json(cover.to_json(), false))
        }
        Command::Test(TestCommand::CheckNesting { file, down_to }) => {
            let mu = measure()?;
            let t = table_for(&mu, depth(64))?;
            let parsed: LevelTestFile =
                serde_json::from_str(&read_json_arg(file)?).context("level test file")?;
            let test = LevelTest::replay(&parsed, &t)?;
            let bottom = down_to.unwrap_or(test.level().saturating_sub(1)).max(1);
            ensure!(
                test.level() >= 2,
                "nesting needs a test of level at least 2"
            );
            ensure!(
                bottom < test.level(),
                "--down-to must lie below the test level"
            );
            let mut budget: Dyadic = test.budget().clone();
            let mut steps = Vec::new();
            let mut violations = 0;
            for n in (bottom + 1..=test.level()).rev() {
                let r = check_nesting_elements(test.elements(), n, &budget, &t)?;
                violations += r.violations.len() + r.inconclusive.len() + usize::from(!r.holds);
                budget = r.tail_sum_lower.hi() + r.head_constant.hi();
                steps.push(serde_json::to_value(&r)?);
            }
            Ok(Outcome::json(
                json!({ "level": test.level(), "steps": steps, "violations": violations }),
                violations > 0,
            ))
        }
        Command::Rea(ReaCommand::Demo { rea, oracle }) => {
            let op = parse_operator(&rea.op)?;
            let a = parse_stream(oracle)?;
            let run = construction_one(&op, &a, rea.imax.unwrap_or(4), rea.cap)?;
            let rows = run.table_rows();
            let mut csv = String::from("i,b_i,f_i,block\n");
            let mut pretty = format!("{:>4}  {:>3}  {:>8}  block\n", "i", "b_i", "f(i)");
            for (i, bi, fi, block) in &rows {
                let _ = writeln!(csv, "{i},{},{fi},{block}", u8::from(*bi));
                let _ = writeln!(pretty, "{i:>4}  {:>3}  {fi:>8}  {block}", u8::from(*bi));
            }
            let _ = writeln!(pretty, "B = {}", run.b());
            let _ = writeln!(pretty, "|C| = {}", run.c().len());
            let table: Vec<Value> = rows
                .iter()
                .map(|(i, bi, fi, block)| json!({ "i": i, "b_i": u8::from(*bi), "f_i": fi, "block": block }))
                .collect();
            let mut value = serde_json::to_value(&run)?;
            value["operator"] = op.to_json();
            value["table"] = Value::Array(table);
            Ok(Outcome {
                value,
                csv: Some(csv),
                pretty: Some(pretty),
                failed: false,
            })
        }
        Command::Rea(ReaCommand::Lift {
            rea,
            oracle,
            test,
            count,
        }) => {
            let mu = measure()?;
            let op = parse_operator(&rea.op)?;
            let a = parse_stream(oracle)?;
            let t = table_for(&mu, depth(64))?;
            let source = match test {
                Some(path) => {
                    let parsed: LevelTestFile =
                        serde_json::from_str(&read_json_arg(path)?).context("level test file")?;
                    LevelTest::replay(&parsed, &t)?
                }
                None => build_cover(&a, cli.level.unwrap_or(2), &t, *count)?,
            };
            let run = construction_one(&op, &a, rea.imax.unwrap_or(6), rea.cap)?;
            let r = lift_test(&source, &op, &t, &run)?;
            let failed = !r.violations.is_empty();
            let mut value = serde_json::to_value(&r)?;
            value["source"] = source.to_json();
            Ok(Outcome::json(value, failed))
        }
        Command::Selfmod(SelfmodCommand::Build { m }) => {
            let f = parse_modulus(&m.modulus)?;
            let a = parse_stream(&m.stream)?;
            let run = construction_two(&f, &a, m.blocks)?;
            Ok(Outcome::json(run.to_json(), false))
        }
        Command::Selfmod(SelfmodCommand::Tk { max_len, padding }) => {
            let mu = measure()?;
            let k = cli.level.unwrap_or(1) as u32;
            let t = table_for(&mu, depth(1500))?;
            let test = tk_enumerate(&t, k, *max_len, (*padding).into())?;
            let bound = tk_weight_bound(&t, k, *max_len as u64, (*padding).into())?;
            let within = test.weight_sum().hi() <= bound.hi();
            Ok(Outcome::json(
                json!({
                    "k": k,
                    "max_len": max_len,
                    "elements": test.elements().len(),
                    "weight_sum": test.weight_sum(),
                    "bound": bound,
                    "within_bound": within,
                    "violations": usize::from(!within),
                }),
                !within,
            ))
        }
        Command::Selfmod(SelfmodCommand::Failures { m, n0 }) => {
            let mu = measure()?;
            let k = cli.level.unwrap_or(1) as u32;
            let f = parse_modulus(&m.modulus)?;
            let a = parse_stream(&m.stream)?;
            let run = construction_two(&f, &a, m.blocks)?;
            let t = table_for(&mu, depth(16_500))?;
            let r = failure_indices(&run, &t, k)?;
            let dom = domination_check(&run, &t, k, *n0, Padding::Approx).ok();
            let failed = !r.unverified.is_empty();
            Ok(Outcome::json(
                json!({ "lengths": run.lengths(), "report": r, "domination": dom, "violations": r.unverified.len() }),
                failed,
            ))
        }
        Command::Selfmod(SelfmodCommand::Generic { m, sets }) => {
            let f = parse_modulus(&m.modulus)?;
            let a = parse_stream(&m.stream)?;
            let sets: Vec<DenseSet> =
                serde_json::from_str(&read_json_arg(sets)?).context("dense sets")?;
            let run = weakly_generic_build(&f, &a, &sets, m.blocks)?;
            let unmet = run
                .stages
                .iter()
                .filter(|st| {
                    st.choice == ncr_core::selfmod::StageChoice::Met
                        && !(sets[st.i].contains(&st.sigma) && st.sigma.is_prefix_of(&run.b))
                })
                .count();
            let mut value = run.to_json();
            value["violations"] = json!(unmet);
            Ok(Outcome::json(value, unmet > 0))
        }
        Command::Nscr(NscrCommand::Classify { modulus, string }) => {
            let f = parse_modulus(modulus)?;
            let sigma: BitString = string
                .parse()
                .map_err(|e| anyhow::anyhow!("bad string {string:?}: {e}"))?;
            let pos = nscr_s_membership(&f, &sigma);
            Ok(Outcome::json(
                json!({
                    "string": sigma,
                    "modulus": f,
                    "position": pos,
                    "free_positions_below": free_positions_below(&f, sigma.len() as u64),
                }),
                false,
            ))
        }
        Command::Verify { suite, cases } => {
            let cfg = SuiteConfig {
                depth: depth(14),
                seed: cli.seed,
                cases: *cases,
            };
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut reports = Vec::new();
            let mut pretty = String::new();
            let mut violations = 0;
            for name in names {
                let r = run_suite(name, cfg)?;
                violations += r.violations;
                let _ = writeln!(
                    pretty,
                    "{} {name} ({} violations)",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.violations
                );
                reports.push(r);
            }
            Ok(Outcome {
                value: json!({ "suites": reports, "violations": violations, "passed": violations == 0 }),
                csv: None,
                pretty: Some(pretty),
                failed: violations > 0,
            })
        }
    }
}

fn pretty_table(t: &GranularityTable) -> String {
    let cell = |v: Option<&u64>| v.map(u64::to_string).unwrap_or_else(|| "-".into());
    let rows = t.h_values().len().max(t.g_values().len());
    let mut s = format!(
        "{:>5} {:>5} {:>5} | {:>5} {:>5} {:>5}\n",
        "l", "h", "h_hat", "n", "g", "g_hat"
    );
    for i in 0..rows {
        let _ = writeln!(
            s,
            "{i:>5} {:>5} {:>5} | {i:>5} {:>5} {:>5}",
            cell(t.h_values().get(i)),
            cell(t.h_hat_values().get(i)),
            cell(t.g_values().get(i)),
            cell(t.g_hat_values().get(i)),
        );
    }
    s
}

/// Exit codes: 0 success, 1 a checked claim failed, 2 usage or input error.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                (0, text, String::new())
            } else {
                (2, String::new(), text)
            };
        }
    };
    match execute(&cli).and_then(|o| Ok((o.render(cli.out)?, o.failed))) {
        Ok((text, failed)) => (i32::from(failed), text, String::new()),
        Err(e) => {
            let code = e
                .downcast_ref::<ncr_core::Error>()
                .map_or("usage", ncr_core::Error::code);
            (2, String::new(), format!("error[{code}]: {e:#}\n"))
        }
    }
}
