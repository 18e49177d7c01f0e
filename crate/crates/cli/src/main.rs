use std::error::Error;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thompson_core::structure::{
    Generator, MachineLibrary, Structure, StructureOptions, MACHINES_ENV,
};
use thompson_core::verification::{verify_all, VerificationParams};
use thompson_core::{
    decode, encode, multiply_word, reduce, ConvolvedWord, CounterAutomaton, GeneratorWord, Pair,
    Sym, SymbolWord,
};

/// Thompson's group F: normal forms, encodings and one-counter multipliers.
#[derive(Parser, Debug)]
#[command(name = "thompson", version)]
struct Cli {
    /// Directory of `.cam` files overriding the built-in machines.
    #[arg(long, global = true, env = MACHINES_ENV, value_name = "DIR")]
    machines: Option<PathBuf>,

    /// Leave out the machines that cover gaps in the case analysis.
    #[arg(long, global = true)]
    no_patches: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form of a generator word, e.g. "x1^1 x0^1".
    Reduce { word: String },
    /// Encoding over {a, b, #} of a generator word.
    Encode { word: String },
    /// Normal form of a word over {a, b, #}.
    Decode { word: String },
    /// Normal form of the product of two generator words.
    Mult { left: String, right: String },
    /// Whether ⊗(u, v) is in the multiplier language of a generator.
    Member {
        generator: Generator,
        u: String,
        v: String,
    },
    /// The image of u under a generator, read off the multiplier machines.
    Apply { u: String, generator: Generator },
    /// Encoding of a word in x0^±1, x1^±1 computed with the multipliers alone.
    Nf { word: String },
    /// Run the verification sweeps.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 7)]
        radius: u32,
        #[arg(long, default_value_t = 7)]
        len_cap: usize,
        #[arg(long, default_value_t = 50)]
        p_max: usize,
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        /// Also write the report to this file.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Graphviz rendering of a machine.
    ExportDot {
        machine: String,
        /// Resolve placeholders and remove ε-moves first.
        #[arg(long)]
        assembled: bool,
    },
    /// Print a machine definition.
    Show {
        machine: String,
        #[arg(long)]
        assembled: bool,
    },
    /// Words of length at most N accepted by a machine.
    Enumerate { machine: String, max_len: usize },
    /// List the machine names.
    Machines,
}

enum Outcome {
    Ok,
    /// Printed successfully but the checked property does not hold.
    Negative,
}

fn library(cli: &Cli) -> MachineLibrary {
    cli.machines
        .as_ref()
        .map_or_else(MachineLibrary::embedded, MachineLibrary::with_dir)
}

fn structure(cli: &Cli) -> Result<Structure, Box<dyn Error>> {
    Ok(Structure::new(
        &library(cli),
        StructureOptions {
            patches: !cli.no_patches,
        },
    )?)
}

enum Loaded {
    Symbols(CounterAutomaton<Sym>),
    Pairs(CounterAutomaton<Pair>),
}

fn load(lib: &MachineLibrary, name: &str, assembled: bool) -> Result<Loaded, Box<dyn Error>> {
    if let Ok(m) = lib.symbol_machine(name) {
        return Ok(Loaded::Symbols(m));
    }
    let m = if assembled {
        lib.assembled(name)?
    } else {
        lib.pair_machine(name)?
    };
    Ok(Loaded::Pairs(m))
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<Outcome, Box<dyn Error>> {
    match &cli.command {
        Command::Reduce { word } => writeln!(out, "{}", reduce(&word.parse()?))?,
        Command::Encode { word } => writeln!(out, "{}", encode(&reduce(&word.parse()?)))?,
        Command::Decode { word } => writeln!(out, "{}", decode(&word.parse()?)?)?,
        Command::Mult { left, right } => {
            let right: GeneratorWord = right.parse()?;
            writeln!(out, "{}", multiply_word(&reduce(&left.parse()?), &right))?;
        }
        Command::Member { generator, u, v } => {
            let (u, v): (SymbolWord, SymbolWord) = (u.parse()?, v.parse()?);
            let s = structure(cli)?;
            let cases = s.accepting_cases(*generator, &u, &v);
            if cases.is_empty() {
                writeln!(out, "reject")?;
                return Ok(Outcome::Ok);
            }
            let labels: Vec<&str> = cases.iter().map(|c| c.label.as_str()).collect();
            let swapped = if s.multiplier(*generator).track_swapped {
                ", tracks swapped"
            } else {
                ""
            };
            writeln!(out, "accept ({}{swapped})", labels.join(", "))?;
        }
        Command::Apply { u, generator } => writeln!(
            out,
            "{}",
            structure(cli)?.multiplier_apply(&u.parse()?, *generator)?
        )?,
        Command::Nf { word } => writeln!(
            out,
            "{}",
            structure(cli)?.word_to_normal_form(&word.parse()?)?
        )?,
        Command::Verify {
            max_len,
            radius,
            len_cap,
            p_max,
            m_max,
            report,
        } => {
            let params = VerificationParams {
                language_len: *max_len,
                radius: *radius,
                len_cap: *len_cap,
                p_max: *p_max,
                m_max: *m_max,
            };
            params.validate()?;
            let s = structure(cli)?;
            let r = verify_all(&s, &library(cli), params)?;
            let text = r.to_string();
            write!(out, "{text}")?;
            if let Some(path) = report {
                std::fs::write(path, &text)?;
            }
            if !r.ok() {
                return Ok(Outcome::Negative);
            }
        }
        Command::ExportDot { machine, assembled } => {
            match load(&library(cli), machine, *assembled)? {
                Loaded::Symbols(m) => write!(out, "{}", m.to_dot())?,
                Loaded::Pairs(m) => write!(out, "{}", m.to_dot())?,
            }
        }
        Command::Show { machine, assembled } => match load(&library(cli), machine, *assembled)? {
            Loaded::Symbols(m) => write!(out, "{}", m.to_definition())?,
            Loaded::Pairs(m) => write!(out, "{}", m.to_definition())?,
        },
        Command::Enumerate { machine, max_len } => match load(&library(cli), machine, true)? {
            Loaded::Symbols(m) => {
                for w in m.enumerate_accepted(*max_len)? {
                    writeln!(out, "{}", SymbolWord(w))?;
                }
            }
            Loaded::Pairs(m) => {
                for w in m.enumerate_accepted(*max_len)? {
                    writeln!(out, "{}", ConvolvedWord::from_pairs(&w)?)?;
                }
            }
        },
        Command::Machines => {
            for name in MachineLibrary::names() {
                writeln!(out, "{name}")?;
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::BufWriter::new(io::stdout().lock());
    let result = run(&cli, &mut out).and_then(|o| {
        out.flush()?;
        Ok(o)
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
