use std::io::{self as stdio, BufRead, Write};
use std::net::SocketAddr;
use std::path::Path;

use prefforge::elicitation::{default_pipeline, Session};
use prefforge::generation::{generate_comparisons, GenerationConfig};
use prefforge::io::{self, Document};
use prefforge::learner::{learn_objective, LearnConfig};
use prefforge::model::{Comparison, ComparisonSet, InstanceCatalog, Preference, Verdict};
use prefforge::objective::{global_error, render_rules, ErrorModel, ObjectiveFunction};
use prefforge::oracle::{run_closed_loop, Oracle, OracleConfig, SimulationConfig};
use prefforge::partition::{label_solutions, Label};
use prefforge_server::ServerConfig;

use crate::Command;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] prefforge::Error),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_validation() => 2,
            _ => 3,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn load_or_default<T: Document + Default>(path: Option<&Path>) -> Result<T, CliError> {
    Ok(match path {
        Some(p) => io::load(p)?,
        None => T::default(),
    })
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate {
            instances,
            config,
            seed,
            out,
        } => {
            let catalog: InstanceCatalog = io::load(&instances)?;
            let mut config: GenerationConfig = load_or_default(config.as_deref())?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let generated = generate_comparisons(&catalog.schema, &catalog.instances, &config)?;
            io::save(&out, &generated.set)?;
            println!(
                "{} comparisons written to {}",
                generated.set.comparisons.len(),
                out.display()
            );
        }
        Command::Elicit {
            set,
            max_questions,
            seed,
            measure_tolerance,
            out,
            session_out,
        } => {
            let mut set: ComparisonSet = io::load(&set)?;
            set.preferences.clear();
            let pipeline = default_pipeline(&set.schema, max_questions);
            let mut session = Session::new(set, pipeline, max_questions, measure_tolerance, seed)?;
            let stdin = stdio::stdin();
            elicit(&mut session, &mut stdin.lock(), &mut stdio::stdout().lock()).map_err(runtime)?;
            io::save(&out, &session.set.answered_subset())?;
            if let Some(path) = session_out {
                io::save(&path, &session)?;
            }
            let flags = session.consistency_flags();
            println!("{} answers written to {}", session.asked.len(), out.display());
            if !flags.is_empty() {
                println!(
                    "equal measures judged unequal ({}): the measures may miss something",
                    flags.join(", ")
                );
            }
        }
        Command::Learn {
            set,
            config,
            val_error,
            tie_epsilon,
            seed,
            out,
            report,
            trace,
            debug_examples,
        } => {
            let set: ComparisonSet = io::load(&set)?;
            let mut config: LearnConfig = load_or_default(config.as_deref())?;
            config.val_error = val_error.unwrap_or(config.val_error);
            config.tie_epsilon = tie_epsilon.unwrap_or(config.tie_epsilon);
            config.seed = seed.unwrap_or(config.seed);
            config.trace |= trace;
            let mut learned = learn_objective(&set, &config)?;
            // Timing would make otherwise identical runs differ.
            learned.report.wall_time_ms = None;
            io::save(&out, &learned.function)?;
            if let Some(path) = report {
                io::save(&path, &learned.report)?;
            }
            if let Some(path) = debug_examples {
                write_examples(&path, &learned.function, &set, &config.error_model()?)?;
            }
            print!("{}", render_rules(&learned.function));
            println!(
                "incompatible: {}, global_error: {:.2}, stop: {:?}",
                learned.report.final_incompatible, learned.report.final_error, learned.report.stop_reason
            );
        }
        Command::Eval {
            function,
            set,
            val_error,
            tie_epsilon,
        } => {
            let f: ObjectiveFunction = io::load(&function)?;
            let set: ComparisonSet = io::load(&set)?;
            let g = global_error(&f, &set, &ErrorModel::new(val_error, tie_epsilon)?)?;
            println!("incompatible: {}, global_error: {:.2}", g.incompatible, g.error);
        }
        Command::Simulate {
            instances,
            oracle,
            config,
            out,
        } => {
            let catalog: InstanceCatalog = io::load(&instances)?;
            let oracle: OracleConfig = io::load(&oracle)?;
            let config: SimulationConfig = load_or_default(config.as_deref())?;
            let mut report = run_closed_loop(&catalog, &mut Oracle::new(oracle)?, &config)?;
            report.learn.wall_time_ms = None;
            match out {
                Some(path) => {
                    io::save(&path, &report)?;
                    println!(
                        "train {:.2} ({} incompatible), test {:.2} ({} incompatible); report written to {}",
                        report.train.error,
                        report.train.incompatible,
                        report.test.error,
                        report.test.incompatible,
                        path.display()
                    );
                }
                None => print!("{}", io::to_json(&report)?),
            }
        }
        Command::Serve {
            host,
            port,
            data_dir,
            static_dir,
        } => {
            let rt = tokio::runtime::Runtime::new().map_err(runtime)?;
            rt.block_on(prefforge_server::serve(
                SocketAddr::new(host, port),
                ServerConfig { data_dir, static_dir },
            ))
            .map_err(runtime)?;
        }
        Command::Render { function } => {
            let f: ObjectiveFunction = io::load(&function)?;
            print!("{}", render_rules(&f));
        }
    }
    Ok(())
}

fn show(out: &mut impl Write, session: &Session, c: &Comparison) -> stdio::Result<()> {
    writeln!(
        out,
        "\nquestion {} of at most {} [{}]",
        session.asked.len() + 1,
        session.max_questions,
        session.stage_label().unwrap_or_default()
    )?;
    writeln!(out, "{:<20} {:>10} {:>10}", "measure", "1", "2")?;
    for (i, m) in session.set.schema.measures.iter().enumerate() {
        writeln!(
            out,
            "{:<20} {:>10.2} {:>10.2}",
            m.label, c.sol1.measures[i], c.sol2.measures[i]
        )?;
    }
    write!(out, "better? [1/2/t, q to stop] ")?;
    out.flush()
}

/// Question loop: `1` and `2` pick a side, `t` is a tie, `q` or end of input
/// stops early.
fn elicit(session: &mut Session, input: &mut impl BufRead, out: &mut impl Write) -> stdio::Result<()> {
    let mut line = String::new();
    while let Some(c) = session.next_comparison() {
        show(out, session, &c)?;
        let verdict = loop {
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                return Ok(());
            }
            match line.trim() {
                "1" => break Verdict::PreferSol1,
                "2" => break Verdict::PreferSol2,
                "t" | "T" | "=" => break Verdict::Tie,
                "q" | "Q" => return Ok(()),
                _ => write!(out, "answer 1, 2, t or q: ")?,
            }
            out.flush()?;
        };
        session
            .submit_preference(Preference::new(&c.id, verdict))
            .map_err(stdio::Error::other)?;
    }
    Ok(())
}

fn write_examples(path: &Path, f: &ObjectiveFunction, set: &ComparisonSet, model: &ErrorModel) -> Result<(), CliError> {
    let examples = label_solutions(f, set, model)?;
    let io_err = |e: csv::Error| runtime(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    let mut header: Vec<&str> = set.schema.ids().collect();
    header.push("label");
    w.write_record(&header).map_err(io_err)?;
    for e in &examples {
        let mut row: Vec<String> = e.measures.iter().map(f64::to_string).collect();
        row.push(match e.label {
            Label::Compatible => "compatible".into(),
            Label::Incompatible => "incompatible".into(),
        });
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| runtime(format!("{}: {e}", path.display())))
}
