//! `prophet`: evaluate threshold schedules, compute benchmarks, generate
//! instances and rerun the built-in experiments.
//!
//! Exit codes: 0 success, 1 invalid input, 2 computation budget exceeded,
//! 3 a `repro` check failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use prophet_core::benchmark::{
    optimal_online_max, optimal_online_max_fixed_order, optimal_online_min, optimal_online_min_fixed_order,
    optimal_online_min_one_exchange, ArrivalOrder, PolicyValue,
};
use prophet_core::exact::{evaluate_bruteforce, evaluate_exact, single_threshold_candidates, sweep_single_threshold};
use prophet_core::instances::{
    gen_075_hard, gen_min_exchange_hard, gen_min_iid_hard, gen_one_threshold_hard, gen_prophet_hard, instance_to_json,
    load_instance,
};
use prophet_core::montecarlo::{estimate, estimate_secretary, MCReport};
use prophet_core::repro::{run_claim, Claim};
use prophet_core::schedule::{alpha_factors, ScheduleSpec};
use prophet_core::{Error, Instance, Objective};

#[derive(Parser)]
#[command(
    name = "prophet",
    version,
    about = "Threshold strategies for the prophet secretary problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the threshold factors alpha_1..alpha_n.
    Alphas {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate a schedule on an instance file.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        /// theorem1 | uniform:<t> | two:<t1>,<t2> | list:<t1>,...,<tn> | secretary
        #[arg(long, default_value = "theorem1")]
        schedule: ScheduleSpec,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Required with `--method mc`.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Find the best single threshold for an instance.
    Sweep {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated thresholds; defaults to support values and midpoints.
        #[arg(long, value_delimiter = ',')]
        candidates: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Optimal online value by backward induction.
    Bench {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::Random)]
        order: Order,
        /// Allow one exchange of the held value (minimization only).
        #[arg(long)]
        exchange: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Write one of the built-in hard instances as JSON.
    Gen {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun a built-in experiment and check it against its bound.
    Repro {
        claim: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Brute,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Order {
    Random,
    Fixed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    ProphetHard,
    OneThresholdHard,
    Hard075,
    MinIidHard,
    MinExchangeHard,
}

enum Failure {
    Core(Error),
    Usage(String),
    ReproFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ReproFailed) => ExitCode::from(3),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 2 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Alphas { n, output } => cmd_alphas(n, &output),
        Command::Eval {
            instance,
            schedule,
            method,
            trials,
            seed,
            output,
        } => cmd_eval(&instance, &schedule, method, trials, seed, &output),
        Command::Sweep {
            instance,
            candidates,
            output,
        } => cmd_sweep(&instance, candidates, &output),
        Command::Bench {
            instance,
            order,
            exchange,
            output,
        } => cmd_bench(&instance, order, exchange, &output),
        Command::Gen { family, eps, n, out } => cmd_gen(family, eps, n, out.as_deref()),
        Command::Repro { claim, output } => cmd_repro(&claim, &output),
    }
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Core(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_alphas(n: usize, output: &Output) -> CmdResult {
    let alphas = alpha_factors(n)?;
    let limit = 1.0 - (-1.0f64).exp();
    let gap = alphas[0] - limit;
    let text = match output.format {
        Format::Json => {
            json_text(&json!({ "n": n, "alphas": alphas, "alpha_1": alphas[0], "limit": limit, "gap": gap }))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = alphas
                .iter()
                .enumerate()
                .map(|(k, a)| vec![(k + 1).to_string(), a.to_string()])
                .collect();
            csv_text(&["k", "alpha"], &rows)
        }
        Format::Table => {
            let mut s = format!("{:>6}  {:>20}\n", "k", "alpha_k");
            for (k, a) in alphas.iter().enumerate() {
                let _ = writeln!(s, "{:>6}  {a:>20.16}", k + 1);
            }
            let _ = writeln!(s, "alpha_1 - (1 - 1/e) = {gap:.6e}");
            s
        }
    };
    emit(&text, output.out.as_deref())
}

fn cmd_eval(
    path: &Path,
    spec: &ScheduleSpec,
    method: Method,
    trials: u64,
    seed: Option<u64>,
    output: &Output,
) -> CmdResult {
    let instance = load_instance(path)?;
    let opt = instance.opt();
    let schedule = spec.build(instance.len(), opt)?;
    if method == Method::Mc {
        let seed = seed.ok_or_else(|| Failure::Usage("--method mc requires --seed".into()))?;
        let report = match &schedule {
            Some(s) => estimate(&instance, s, trials, seed)?,
            None => estimate_secretary(&instance, trials, seed)?,
        };
        return emit(
            &mc_text(&instance, spec, &report, opt, output.format),
            output.out.as_deref(),
        );
    }
    let schedule = schedule.ok_or_else(|| Failure::Usage(format!("schedule '{spec}' is adaptive; use --method mc")))?;
    let (name, report) = match method {
        Method::Exact => ("exact", evaluate_exact(&instance, &schedule)?),
        _ => ("brute", evaluate_bruteforce(&instance, &schedule)?),
    };
    let thresholds = schedule.thresholds();
    let text = match output.format {
        Format::Json => json_text(&json!({
            "instance": instance.name(),
            "method": name,
            "schedule": spec.to_string(),
            "thresholds": thresholds,
            "alg_value": report.alg_value,
            "opt_value": report.opt_value,
            "ratio": report.ratio,
            "theta": report.pass.theta,
            "q_minus": report.pass.q_minus,
            "per_step_value": report.per_step_value,
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = (0..instance.len())
                .map(|k| {
                    vec![
                        (k + 1).to_string(),
                        thresholds[k].to_string(),
                        report.pass.theta[k].to_string(),
                        report.per_step_value[k].to_string(),
                        report.alg_value.to_string(),
                        report.opt_value.to_string(),
                        report.ratio.to_string(),
                    ]
                })
                .collect();
            csv_text(
                &[
                    "k",
                    "threshold",
                    "theta",
                    "per_step_value",
                    "alg_value",
                    "opt_value",
                    "ratio",
                ],
                &rows,
            )
        }
        Format::Table => {
            let mut s = format!("instance  {}\nmethod    {name}\nschedule  {spec}\n", instance.name());
            let _ = writeln!(
                s,
                "E[ALG]    {:.12}\nOPT       {:.12}\nratio     {:.12}\n",
                report.alg_value, report.opt_value, report.ratio
            );
            let _ = writeln!(
                s,
                "{:>4}  {:>14}  {:>14}  {:>14}",
                "k", "threshold", "theta(k)", "E[z_k]"
            );
            for (k, t) in thresholds.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{:>4}  {t:>14.6}  {:>14.10}  {:>14.10}",
                    k + 1,
                    report.pass.theta[k],
                    report.per_step_value[k]
                );
            }
            s
        }
    };
    emit(&text, output.out.as_deref())
}

fn mc_text(instance: &Instance, spec: &ScheduleSpec, r: &MCReport, opt: f64, format: Format) -> String {
    let (lo, hi) = (r.mean - r.half_width_95, r.mean + r.half_width_95);
    match format {
        Format::Json => json_text(&json!({
            "instance": instance.name(),
            "method": "mc",
            "schedule": spec.to_string(),
            "mean": r.mean,
            "half_width_95": r.half_width_95,
            "ci_low": lo,
            "ci_high": hi,
            "trials": r.trials,
            "seed": r.seed,
            "opt_value": opt,
            "ratio": r.mean / opt,
        })),
        Format::Csv => csv_text(
            &["instance", "schedule", "mean", "half_width_95", "ci_low", "ci_high", "trials", "seed", "opt_value", "ratio"],
            &[vec![
                csv_field(instance.name()),
                csv_field(&spec.to_string()),
                r.mean.to_string(),
                r.half_width_95.to_string(),
                lo.to_string(),
                hi.to_string(),
                r.trials.to_string(),
                r.seed.to_string(),
                opt.to_string(),
                (r.mean / opt).to_string(),
            ]],
        ),
        Format::Table => format!(
            "instance  {}\nmethod    mc\nschedule  {spec}\nE[ALG]    {:.6} ± {:.6} (95%)\nOPT       {opt:.12}\nratio     {:.6}\ntrials    {}\nseed      {}\n",
            instance.name(),
            r.mean,
            r.half_width_95,
            r.mean / opt,
            r.trials,
            r.seed
        ),
    }
}

fn cmd_sweep(path: &Path, candidates: Option<Vec<f64>>, output: &Output) -> CmdResult {
    let instance = load_instance(path)?;
    let candidates = candidates.unwrap_or_else(|| single_threshold_candidates(&instance));
    let best = sweep_single_threshold(&instance, &candidates)?;
    let text = match output.format {
        Format::Json => json_text(&json!({
            "instance": instance.name(),
            "opt_value": best.opt_value,
            "best": { "threshold": best.threshold, "ratio": best.ratio, "alg_value": best.alg_value },
            "evaluated": best.evaluated.iter().map(|(t, r)| json!({ "threshold": t, "ratio": r })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = best
                .evaluated
                .iter()
                .map(|(t, r)| vec![t.to_string(), r.to_string()])
                .collect();
            csv_text(&["threshold", "ratio"], &rows)
        }
        Format::Table => {
            let mut s = format!(
                "instance  {}\nOPT       {:.12}\n\n{:>14}  {:>14}\n",
                instance.name(),
                best.opt_value,
                "threshold",
                "ratio"
            );
            for (t, r) in &best.evaluated {
                let mark = if *t == best.threshold { "  <- best" } else { "" };
                let _ = writeln!(s, "{t:>14.6}  {r:>14.10}{mark}");
            }
            s
        }
    };
    emit(&text, output.out.as_deref())
}

fn cmd_bench(path: &Path, order: Order, exchange: bool, output: &Output) -> CmdResult {
    let instance = load_instance(path)?;
    let arrival = match order {
        Order::Random => ArrivalOrder::Random,
        Order::Fixed => ArrivalOrder::Fixed,
    };
    let value: PolicyValue = match (instance.objective(), exchange) {
        (Objective::Maximize, true) => {
            return Err(Failure::Usage(
                "--exchange applies to minimization instances only".into(),
            ))
        }
        (Objective::Maximize, false) => match arrival {
            ArrivalOrder::Random => optimal_online_max(&instance)?,
            ArrivalOrder::Fixed => optimal_online_max_fixed_order(&instance)?,
        },
        (Objective::Minimize, true) => optimal_online_min_one_exchange(&instance, arrival)?,
        (Objective::Minimize, false) => match arrival {
            ArrivalOrder::Random => optimal_online_min(&instance)?,
            ArrivalOrder::Fixed => optimal_online_min_fixed_order(&instance)?,
        },
    };
    let opt = instance.opt();
    let ratio = value.ratio_to(opt);
    let order_name = match order {
        Order::Random => "random",
        Order::Fixed => "fixed",
    };
    let objective = instance.objective().as_str();
    let text = match output.format {
        Format::Json => json_text(&json!({
            "instance": instance.name(),
            "objective": objective,
            "order": order_name,
            "exchange": exchange,
            "value": value.value,
            "opt_value": opt,
            "ratio": ratio,
            "state_count": value.state_count,
        })),
        Format::Csv => csv_text(
            &["instance", "objective", "order", "exchange", "value", "opt_value", "ratio", "state_count"],
            &[vec![
                csv_field(instance.name()),
                objective.to_string(),
                order_name.to_string(),
                exchange.to_string(),
                value.value.to_string(),
                opt.to_string(),
                ratio.to_string(),
                value.state_count.to_string(),
            ]],
        ),
        Format::Table => format!(
            "instance  {}\nobjective {objective}\norder     {order_name}\nexchange  {exchange}\nonline    {:.12}\noffline   {opt:.12}\nratio     {ratio:.12}\nstates    {}\n",
            instance.name(),
            value.value,
            value.state_count
        ),
    };
    emit(&text, output.out.as_deref())
}

fn cmd_gen(family: Family, eps: Option<f64>, n: Option<usize>, out: Option<&Path>) -> CmdResult {
    let need_eps = || eps.ok_or_else(|| Failure::Usage("this family requires --eps".into()));
    let need_n = || n.ok_or_else(|| Failure::Usage("this family requires --n".into()));
    let instance = match family {
        Family::ProphetHard => gen_prophet_hard(need_eps()?)?,
        Family::Hard075 => gen_075_hard(need_eps()?)?,
        Family::MinExchangeHard => gen_min_exchange_hard(need_eps()?)?,
        Family::OneThresholdHard => gen_one_threshold_hard(need_n()?)?,
        Family::MinIidHard => gen_min_iid_hard(need_n()?)?,
    };
    let mut text = instance_to_json(&instance);
    text.push('\n');
    emit(&text, out)
}

fn short(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

fn cmd_repro(id: &str, output: &Output) -> CmdResult {
    let claim: Claim = id.parse()?;
    let report = run_claim(claim)?;
    let text = match output.format {
        Format::Json => json_text(&serde_json::to_value(&report).expect("report serializes")),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        csv_field(&c.label),
                        c.value.to_string(),
                        csv_field(&c.requirement),
                        c.passed.to_string(),
                    ]
                })
                .collect();
            csv_text(&["label", "value", "requirement", "passed"], &rows)
        }
        Format::Table => {
            let mut s = String::new();
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "[{}] {}: {} ({})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.label,
                    short(c.value),
                    c.requirement
                );
            }
            let _ = writeln!(s, "{}: {}", report.claim, if report.passed { "PASS" } else { "FAIL" });
            s
        }
    };
    emit(&text, output.out.as_deref())?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::ReproFailed)
    }
}
