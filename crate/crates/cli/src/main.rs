use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kleene_core::adn::{
    adn_totalizer, adn_uniform, const_builder_code, empty_avoider, fpf_probe_with, hat_delta, parity_psi,
    totalization_report, zero_avoider, PartialFpfCode,
};
use kleene_core::arslanov::{
    audit, decide, parse_scenario, render_trace, run_construction, validate_scenario, Mode, Scenario,
};
use kleene_core::fixedpoint::{
    apply_binary, apply_transformer, binary_corpus, fixed_point_with_params, kleene_fixed_point, quine,
    transformer_corpus, verify_extensional, BinaryTransformerCode, TransformerCode, LAW_FUEL,
};
use kleene_core::kernel::{decode_any, encode, eval, parse, phi, pretty, stdlib_term};
use kleene_core::{Code, EvalOutcome, Nat, Term};

/// Programs, fixed points, totalizers and the stage-construction simulator.
///
/// PROGRAM arguments accept inline program text, a path to a file holding
/// one, a decimal code, or `std:NAME` for a library entry.
#[derive(Parser)]
#[command(name = "kleene", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program on naturals.
    Run {
        program: String,
        args: Vec<String>,
        /// Step budget.
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
    },
    /// Print the code of a program.
    Encode { program: String },
    /// Print the program a code names.
    Decode { code: String },
    /// Kleene fixed point of a transformer (corpus name or program).
    Fixpoint {
        transformer: String,
        #[arg(long, default_value_t = LAW_FUEL)]
        fuel: u64,
        /// Compare on inputs 0..GRID.
        #[arg(long, default_value_t = 10)]
        grid: u64,
    },
    /// Fixed points with a parameter for a binary transformer (corpus name or program).
    FixpointParam {
        transformer: String,
        #[arg(long, default_value_t = LAW_FUEL)]
        fuel: u64,
        /// Compare on inputs 0..GRID, for parameters 0..GRID.
        #[arg(long, default_value_t = 10)]
        grid: u64,
        /// Also print every f(n).
        #[arg(long)]
        codes: bool,
    },
    /// Build a quine and check it.
    Quine {
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
    },
    /// Totalize psi while avoiding delta; report at a stage.
    Totalize {
        /// `parity` or a program.
        #[arg(long, default_value = "parity")]
        psi: String,
        /// `empty-avoider`, `zero-avoider`, `hat-delta`, `nowhere`, or a program.
        #[arg(long, default_value = "empty-avoider")]
        delta: String,
        /// Report indices 0..GRID.
        #[arg(long, default_value_t = 10)]
        grid: u64,
        #[arg(long, default_value_t = 1000)]
        stage: u64,
        /// Fuel for psi(n).
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        /// Fuel for delta(f(n)).
        #[arg(long, default_value_t = 1_000_000)]
        delta_fuel: u64,
    },
    /// Sections of the uniform totalizer for one program e.
    UniformTotalize {
        /// `parity`, `const-builder`, or a program.
        #[arg(long)]
        e: String,
        #[arg(long, default_value = "empty-avoider")]
        delta: String,
        #[arg(long, default_value_t = 10)]
        grid: u64,
        #[arg(long, default_value_t = 1000)]
        stage: u64,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[arg(long, default_value_t = 1_000_000)]
        delta_fuel: u64,
    },
    /// Look for evidence against delta being fixed point free.
    ProbeFpf {
        delta: String,
        /// Probe codes 0..=BOUND.
        #[arg(long, default_value_t = 50)]
        bound: u64,
        #[arg(long, default_value_t = 500)]
        stage: u64,
        /// Fuel for delta(a); defaults to the stage.
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Run the construction on a scenario.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        x: u64,
        /// Print every event.
        #[arg(long)]
        trace: bool,
        /// Replace the scenario's horizon.
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Decide whether x is in the target set of a scenario.
    Decide {
        scenario: PathBuf,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Check a scenario, and with --x audit its construction.
    Validate {
        scenario: PathBuf,
        #[arg(long)]
        x: Option<u64>,
        #[arg(long)]
        horizon: Option<u64>,
    },
}

type Res = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> Res {
    match cmd {
        Command::Run { program, args, fuel } => run(&program, &args, fuel),
        Command::Encode { program } => {
            println!("{}", encode(&program_term(&program)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Decode { code } => {
            let n: Nat = code.parse().map_err(|_| format!("`{code}` is not a natural"))?;
            match decode_any(&n) {
                Some(t) => println!("{}", pretty(&t)),
                None => println!("{}", pretty(&Term::bottom())),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fixpoint { transformer, fuel, grid } => fixpoint(&transformer, fuel, grid),
        Command::FixpointParam {
            transformer,
            fuel,
            grid,
            codes,
        } => fixpoint_param(&transformer, fuel, grid, codes),
        Command::Quine { fuel } => {
            let e = quine();
            println!("# fuel {fuel}");
            println!("e = {e}");
            let ok = phi(&e, 0u64, fuel).value() == Some(e.nat());
            println!("phi_e(0) = e: {}", if ok { "OK" } else { "FAIL" });
            Ok(exit(ok))
        }
        Command::Totalize {
            psi,
            delta,
            grid,
            stage,
            fuel,
            delta_fuel,
        } => {
            let psi = match psi.as_str() {
                "parity" => parity_psi(),
                other => program_code(other)?,
            };
            let t = adn_totalizer(&psi, &delta_code(&delta)?);
            let ns: Vec<Nat> = (0..grid).map(Nat::small).collect();
            let report = totalization_report(&t, &ns, stage, fuel, delta_fuel);
            println!("{report}");
            Ok(exit(report.consistent()))
        }
        Command::UniformTotalize {
            e,
            delta,
            grid,
            stage,
            fuel,
            delta_fuel,
        } => {
            let e = match e.as_str() {
                "parity" => parity_psi(),
                "const-builder" => const_builder_code(),
                other => program_code(other)?,
            };
            let t = adn_uniform(&delta_code(&delta)?);
            let ns: Vec<Nat> = (0..grid).map(|n| Nat::pair(e.nat(), &Nat::small(n))).collect();
            let mut report = totalization_report(&t, &ns, stage, fuel, delta_fuel);
            for (i, r) in report.records.iter_mut().enumerate() {
                r.n = Nat::small(i as u64);
            }
            println!("# section of e = {e}");
            println!("{report}");
            Ok(exit(report.consistent()))
        }
        Command::ProbeFpf {
            delta,
            bound,
            stage,
            fuel,
        } => {
            let d = delta_code(&delta)?;
            let report = fpf_probe_with(&d.code, bound, stage, fuel.unwrap_or(stage));
            println!("{report}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            scenario,
            x,
            trace,
            horizon,
        } => {
            let sc = checked_scenario(&scenario, horizon)?;
            let st = run_construction(&sc, x);
            if trace {
                print!("{}", render_trace(&st.trace));
            }
            let mode = match &st.mode {
                Mode::Totalizing => "totalizing".to_string(),
                Mode::Frozen { n, l, .. } => format!("frozen n={n} l={l}"),
                Mode::Following { n, target } => format!("following n={n} target={target}"),
            };
            println!("final stage={} mode={mode}", st.stage);
            let discarded: Vec<String> = st.discarded.iter().map(u64::to_string).collect();
            println!("discarded [{}]", discarded.join(" "));
            for (n, w) in st.w_tables.iter().filter(|(_, w)| !w.is_empty()) {
                let w: Vec<String> = w.iter().map(u64::to_string).collect();
                println!("W f({n}) = {{{}}}", w.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Decide {
            scenario,
            x,
            trace,
            horizon,
        } => {
            let sc = checked_scenario(&scenario, horizon)?;
            let d = decide(&sc, x);
            if trace {
                print!("{}", render_trace(&d.trace));
            }
            println!("{}", d.verdict);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario, x, horizon } => {
            let sc = load_scenario(&scenario, horizon)?;
            let violations = validate_scenario(&sc);
            for v in &violations {
                println!("{v}");
            }
            if !violations.is_empty() {
                return Ok(ExitCode::from(1));
            }
            if let Some(x) = x {
                let fails = audit(&sc, x);
                for f in &fails {
                    println!("{f}");
                }
                if !fails.is_empty() {
                    return Ok(ExitCode::from(1));
                }
            }
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn program_term(arg: &str) -> Result<Term, String> {
    if let Some(name) = arg.strip_prefix("std:") {
        return stdlib_term(name).map_err(|e| e.to_string());
    }
    if !arg.is_empty() && arg.bytes().all(|b| b.is_ascii_digit()) {
        let n: Nat = arg.parse().map_err(|_| format!("bad code `{arg}`"))?;
        return Ok(decode_any(&n).unwrap_or_else(Term::bottom));
    }
    let path = Path::new(arg);
    let text = if path.is_file() {
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        arg.to_string()
    };
    parse(&text).map_err(|e| e.to_string())
}

fn program_code(arg: &str) -> Result<Code, String> {
    program_term(arg).map(|t| encode(&t))
}

fn delta_code(arg: &str) -> Result<PartialFpfCode, String> {
    let bottom = encode(&Term::bottom());
    Ok(match arg {
        "empty-avoider" => empty_avoider(&bottom),
        "zero-avoider" => zero_avoider(),
        "hat-delta" => hat_delta(&zero_avoider(), &bottom),
        "nowhere" => PartialFpfCode::nowhere(),
        other => PartialFpfCode::user(program_code(other)?),
    })
}

fn run(program: &str, args: &[String], fuel: u64) -> Res {
    let t = program_term(program)?;
    let args = args
        .iter()
        .map(|a| a.parse::<Nat>().map_err(|_| format!("`{a}` is not a natural")))
        .collect::<Result<Vec<_>, _>>()?;
    match eval(&t, &args, None, fuel).map_err(|e| e.to_string())? {
        EvalOutcome::Converged { value, .. } => println!("{value}"),
        EvalOutcome::Exhausted { fuel } => println!("exhausted (fuel {fuel})"),
    }
    Ok(ExitCode::SUCCESS)
}

fn fixpoint(arg: &str, fuel: u64, grid: u64) -> Res {
    let f = match transformer_corpus().into_iter().find(|(n, _)| *n == arg) {
        Some((_, f)) => f,
        None => TransformerCode(program_code(arg)?),
    };
    let e = kleene_fixed_point(&f);
    println!("# fuel {fuel} grid {grid}");
    println!("e = {e}");
    let Some(fe) = apply_transformer(&f, &e, fuel) else {
        println!("f(e): none within budget");
        return Ok(ExitCode::from(1));
    };
    println!("f(e) = {fe}");
    let inputs: Vec<Nat> = (0..grid).map(Nat::small).collect();
    let report = verify_extensional(&e, &fe, &inputs, fuel);
    println!("{report}");
    Ok(exit(report.disagreements() == 0))
}

fn fixpoint_param(arg: &str, fuel: u64, grid: u64, codes: bool) -> Res {
    let h = match binary_corpus().into_iter().find(|(n, _)| *n == arg) {
        Some((_, h)) => h,
        None => BinaryTransformerCode(program_code(arg)?),
    };
    let fp = fixed_point_with_params(&h);
    let inputs: Vec<Nat> = (0..grid).map(Nat::small).collect();
    println!("# fuel {fuel} grid {grid}");
    if codes {
        println!("object = {}", fp.object_code());
    }
    let mut ok = true;
    for n in 0..grid {
        let n = Nat::small(n);
        let f_n = fp.at(&n);
        if codes {
            println!("f({n}) = {f_n}");
        }
        let object = phi(fp.object_code(), n.clone(), fuel).value() == Some(f_n.nat());
        let Some(target) = apply_binary(&h, &n, &f_n, fuel) else {
            println!("n={n} h(n, f(n)): none within budget");
            ok = false;
            continue;
        };
        let r = verify_extensional(&f_n, &target, &inputs, fuel);
        ok &= r.disagreements() == 0 && object;
        println!(
            "n={n} agree {} disagree {} both-exhausted {} suspicious {} object-code {}",
            r.agreements(),
            r.disagreements(),
            r.both_exhausted(),
            r.suspicious(),
            if object { "ok" } else { "MISMATCH" }
        );
    }
    Ok(exit(ok))
}

fn load_scenario(path: &Path, horizon: Option<u64>) -> Result<Scenario, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut sc = parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(h) = horizon {
        sc.horizon = h;
    }
    Ok(sc)
}

fn checked_scenario(path: &Path, horizon: Option<u64>) -> Result<Scenario, String> {
    let sc = load_scenario(path, horizon)?;
    let violations = validate_scenario(&sc);
    if violations.is_empty() {
        return Ok(sc);
    }
    let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
    Err(format!("{} is not valid:\n{}", path.display(), lines.join("\n")))
}
