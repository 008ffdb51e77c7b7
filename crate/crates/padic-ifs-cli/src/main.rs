//! Command-line front end for p-adic IFS analysis.
//!
//! Subcommands: analyze, decimate, measure, normalize, oracle. Inputs are
//! JSON files holding either an IFS system ("maps" key) or a hand-built
//! digit automaton ("edges" key). All reports are deterministic: states are
//! numbered in breadth-first discovery order and floats print to 6 decimals
//! (full precision under --json).
//!
//! Exit codes: 0 success; 1 domain error (invalid system, unsupported
//! query); 2 usage or parse error; 3 oracle verification mismatch.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num::ToPrimitive;
use padic_ifs::automaton::{
    classes, determinize, minimize, to_nfa, assert_unique_essential, AutomatonFile, DigitDfa,
    DigitNfa,
};
use padic_ifs::decimation::{
    coprime_cycle_test, decimate, decimation_dimension_profile, DecimationSpec,
};
use padic_ifs::dot::{dfa_dot, nfa_dot, transducer_dot};
use padic_ifs::ifs::IfsSystem;
use padic_ifs::measure::{build_measure, LocalDimension, PadicPoint};
use padic_ifs::oracle::{brute_cylinder_mass, brute_prefixes};
use padic_ifs::spectral::{
    adjacency, dimension_from_rho, hausdorff_dimension, hausdorff_dimension_exact,
    rational_to_f64, spectral_radius,
};
use padic_ifs::transducer::build;
use padic_ifs::{ratio, Rational};

#[derive(Parser)]
#[command(
    name = "padic-ifs",
    version,
    about = "Digit automata, dimensions, and self-similar measures of p-adic iterated function systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the digit-rewriting transducer and automata, report dimensions
    Analyze {
        /// System or automaton JSON file
        input: PathBuf,
        /// Cross-check recognized prefixes against brute-force enumeration
        #[arg(long)]
        verify: bool,
        /// Prefix depth used by --verify
        #[arg(long, default_value_t = 6)]
        depth: u32,
        /// Directory for transducer.dot, nfa.dot, dfa.dot, minimal.dot
        #[arg(long, value_name = "DIR")]
        dot: Option<PathBuf>,
        /// Certified rational enclosure of the spectral radius
        #[arg(long)]
        exact: bool,
        /// Structured output
        #[arg(long)]
        json: bool,
    },
    /// Dimension of the digit decimation keeping positions j, j+k, ...
    Decimate {
        /// System or automaton JSON file
        input: PathBuf,
        /// Stride between kept digit positions
        #[arg(long, default_value_t = 1, conflicts_with = "profile")]
        k: u32,
        /// Offset of the first kept position
        #[arg(long, default_value_t = 0, conflicts_with = "profile")]
        j: u32,
        /// Full table over strides 1..=K_MAX and offsets 0..=J_MAX
        #[arg(long, num_args = 2, value_names = ["K_MAX", "J_MAX"])]
        profile: Option<Vec<u32>>,
        /// Structured output
        #[arg(long)]
        json: bool,
    },
    /// Self-similar measure reports (requires probabilities in the system)
    Measure {
        /// System JSON file with probs
        input: PathBuf,
        /// Digit string like 0,2,0 (empty string for the whole space)
        #[arg(long)]
        cylinder: Option<String>,
        /// Point as a rational (-1/8) or digit lists pre;period (1,0;2)
        #[arg(long, allow_hyphen_values = true)]
        localdim: Option<String>,
        /// Sample periodic local dimensions on cycles up to L digits
        #[arg(long, value_name = "L")]
        spectrum: Option<u32>,
        /// Structured output
        #[arg(long)]
        json: bool,
    },
    /// Conjugate the system to integer offsets with canonical signs
    Normalize {
        /// System JSON file
        input: PathBuf,
        /// Structured output
        #[arg(long)]
        json: bool,
    },
    /// Brute-force enumeration, independent of the automata
    Oracle {
        /// System JSON file
        input: PathBuf,
        /// Prefix depth to enumerate
        #[arg(long, default_value_t = 6)]
        depth: u32,
        /// Exact mass of a digit cylinder instead of prefix listing
        #[arg(long)]
        cylinder: Option<String>,
        /// Structured output
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
            Failure::Verify(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Verify(m) => m,
        }
    }
}

fn domain(e: padic_ifs::error::Error) -> Failure {
    Failure::Domain(e.to_string())
}

enum Input {
    System(IfsSystem),
    Automaton(AutomatonFile),
}

fn load_input(path: &PathBuf) -> Result<Input, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
    if value.get("maps").is_some() {
        let system: IfsSystem = serde_json::from_value(value)
            .map_err(|e| Failure::Usage(format!("{}: bad system: {e}", path.display())))?;
        Ok(Input::System(system))
    } else if value.get("edges").is_some() {
        let automaton: AutomatonFile = serde_json::from_value(value)
            .map_err(|e| Failure::Usage(format!("{}: bad automaton: {e}", path.display())))?;
        Ok(Input::Automaton(automaton))
    } else {
        Err(Failure::Usage(format!(
            "{}: expected a \"maps\" (system) or \"edges\" (automaton) key",
            path.display()
        )))
    }
}

fn load_system(path: &PathBuf) -> Result<IfsSystem, Failure> {
    match load_input(path)? {
        Input::System(system) => Ok(system),
        Input::Automaton(_) => Err(Failure::Usage(format!(
            "{}: this command needs a system file, not an automaton",
            path.display()
        ))),
    }
}

fn parse_digits(text: &str) -> Result<Vec<u32>, Failure> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| Failure::Usage(format!("bad digit {tok:?} in cylinder string")))
        })
        .collect()
}

fn digits_csv(digits: &[u32]) -> String {
    digits
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn rational_decimal(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Everything analyze derives from an input, shared by text and JSON modes.
struct Pipeline {
    system: Option<IfsSystem>,
    nfa: DigitNfa,
    dfa: DigitDfa,
    minimal: DigitDfa,
    transducer: Option<padic_ifs::transducer::Transducer>,
    input_states: usize,
}

fn run_pipeline(input: Input) -> Result<Pipeline, Failure> {
    match input {
        Input::System(system) => {
            let t = build(&system).map_err(domain)?;
            let nfa = to_nfa(&t);
            let dfa = determinize(&nfa);
            let minimal = minimize(&dfa).map_err(domain)?;
            let decomposition = classes(&minimal);
            assert_unique_essential(&decomposition, true).map_err(domain)?;
            Ok(Pipeline {
                system: Some(system),
                input_states: t.states.len(),
                transducer: Some(t),
                nfa,
                dfa,
                minimal,
            })
        }
        Input::Automaton(file) => {
            let nfa = file.into_nfa().map_err(domain)?;
            let dfa = determinize(&nfa);
            let minimal = minimize(&dfa).map_err(domain)?;
            Ok(Pipeline {
                system: None,
                input_states: nfa.state_count(),
                transducer: None,
                nfa,
                dfa,
                minimal,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    input: PathBuf,
    verify: bool,
    depth: u32,
    dot: Option<PathBuf>,
    exact: bool,
    json: bool,
) -> Result<(), Failure> {
    let pipe = run_pipeline(load_input(&input)?)?;
    let decomposition = classes(&pipe.minimal);
    let report = hausdorff_dimension(&pipe.minimal, 1e-12).map_err(domain)?;
    let full = padic_ifs::automaton::is_full_dimension(&pipe.minimal);

    let class_dims: Vec<f64> = decomposition
        .essential_classes()
        .iter()
        .map(|class| {
            let rho = spectral_radius(&adjacency(&pipe.minimal, class), 1e-12)?;
            Ok(dimension_from_rho(rho, pipe.minimal.p))
        })
        .collect::<Result<_, padic_ifs::error::Error>>()
        .map_err(domain)?;

    let exact_enclosure = if exact {
        let width = ratio(1, 1_000_000_000_000);
        let (lo, hi, _) = hausdorff_dimension_exact(&pipe.minimal, &width).map_err(domain)?;
        Some((lo, hi))
    } else {
        None
    };

    let verified = if verify {
        let system = pipe.system.as_ref().ok_or_else(|| {
            Failure::Usage("--verify needs a system input, not an automaton".into())
        })?;
        let brute = brute_prefixes(system, depth).map_err(domain)?;
        let recognized = pipe.minimal.language_prefixes(depth as usize);
        if brute != recognized {
            return Err(Failure::Verify(format!(
                "prefix mismatch at depth {depth}: enumeration found {} prefixes, automaton recognizes {}",
                brute.len(),
                recognized.len()
            )));
        }
        Some(brute.len())
    } else {
        None
    };

    if let Some(dir) = &dot {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        let mut files = Vec::new();
        if let Some(t) = &pipe.transducer {
            files.push(("transducer.dot", transducer_dot(t)));
        }
        files.push(("nfa.dot", nfa_dot(&pipe.nfa)));
        files.push(("dfa.dot", dfa_dot(&pipe.dfa)));
        files.push(("minimal.dot", dfa_dot(&pipe.minimal)));
        for (name, contents) in files {
            let path = dir.join(name);
            std::fs::write(&path, contents)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    if json {
        let mut object = serde_json::Map::new();
        object.insert("p".into(), pipe.minimal.p.into());
        if let Some(system) = &pipe.system {
            object.insert("system".into(), system.to_string().into());
            object.insert("transducer_states".into(), pipe.input_states.into());
        } else {
            object.insert("automaton_states".into(), pipe.input_states.into());
        }
        object.insert("nfa_states".into(), pipe.nfa.state_count().into());
        object.insert("dfa_states".into(), pipe.dfa.state_count().into());
        object.insert("minimal_states".into(), pipe.minimal.state_count().into());
        object.insert(
            "essential_classes".into(),
            decomposition.essential_count().into(),
        );
        object.insert("essential_class_dimensions".into(), class_dims.clone().into());
        object.insert("rho".into(), report.rho.into());
        object.insert("dimension".into(), report.dimension.into());
        object.insert("full_dimension".into(), full.is_some().into());
        if let Some((state, word)) = &full {
            object.insert("full_dimension_state".into(), (*state).into());
            object.insert("full_dimension_access".into(), digits_csv(word).into());
        }
        if let Some((lo, hi)) = &exact_enclosure {
            object.insert("rho_enclosure".into(), vec![lo.to_string(), hi.to_string()].into());
            object.insert(
                "dimension_enclosure".into(),
                vec![
                    dimension_from_rho(rational_to_f64(lo), pipe.minimal.p),
                    dimension_from_rho(rational_to_f64(hi), pipe.minimal.p),
                ]
                .into(),
            );
        }
        if let Some(count) = verified {
            object.insert("verified_depth".into(), depth.into());
            object.insert("verified_prefixes".into(), count.into());
        }
        println!("{}", serde_json::Value::Object(object));
        return Ok(());
    }

    if let Some(system) = &pipe.system {
        println!("system: {system}");
        println!("transducer states: {}", pipe.input_states);
    } else {
        println!("automaton states: {}", pipe.input_states);
    }
    println!("nfa states: {}", pipe.nfa.state_count());
    println!("dfa states: {}", pipe.dfa.state_count());
    println!("minimal dfa states: {}", pipe.minimal.state_count());
    let unique = if decomposition.essential_count() == 1 {
        " (unique)"
    } else {
        ""
    };
    println!(
        "essential classes: {}{unique}",
        decomposition.essential_count()
    );
    if pipe.system.is_none() {
        let dims = class_dims
            .iter()
            .map(|d| format!("{d:.6}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!("essential class dimensions: {dims}");
    }
    println!("spectral radius: {:.6}", report.rho);
    println!("dimension: {:.6}", report.dimension);
    if let Some((lo, hi)) = &exact_enclosure {
        println!(
            "dimension enclosure: [{:.12}, {:.12}]",
            dimension_from_rho(rational_to_f64(lo), pipe.minimal.p),
            dimension_from_rho(rational_to_f64(hi), pipe.minimal.p)
        );
    }
    match &full {
        Some((state, word)) => println!(
            "full dimension: yes (state {state}, access word \"{}\")",
            digits_csv(word)
        ),
        None => println!("full dimension: no"),
    }
    if let Some(count) = verified {
        println!("verify: prefixes match enumeration to depth {depth} ({count} prefixes)");
    }
    Ok(())
}

/// Per essential class: its index, the coprime verdict, and witness cycle
/// lengths when coprime ones exist.
type CoprimeVerdict = (usize, bool, Option<(u64, u64)>);

fn cmd_decimate(
    input: PathBuf,
    k: u32,
    j: u32,
    profile: Option<Vec<u32>>,
    json: bool,
) -> Result<(), Failure> {
    let pipe = run_pipeline(load_input(&input)?)?;
    let minimal = &pipe.minimal;

    if let Some(bounds) = profile {
        let (k_max, j_max) = (bounds[0], bounds[1]);
        if k_max < 1 {
            return Err(Failure::Usage("profile K_MAX must be at least 1".into()));
        }
        let table =
            decimation_dimension_profile(minimal, k_max, j_max, 1e-12).map_err(domain)?;
        let decomposition = classes(minimal);
        let verdicts: Vec<CoprimeVerdict> = decomposition
            .essential_classes()
            .iter()
            .enumerate()
            .map(|(i, class)| {
                let (coprime, witness) = coprime_cycle_test(minimal, class);
                (i, coprime, witness)
            })
            .collect();

        if json {
            let mut object = serde_json::Map::new();
            object.insert("p".into(), minimal.p.into());
            object.insert(
                "digit_support".into(),
                table.support.iter().copied().collect::<Vec<u32>>().into(),
            );
            object.insert("plateau_value".into(), table.plateau_value.into());
            object.insert(
                "rows".into(),
                table
                    .rows
                    .iter()
                    .map(|row| {
                        serde_json::json!({
                            "k": row.stride,
                            "dims": row.dims,
                            "plateau": row.plateau,
                        })
                    })
                    .collect::<Vec<_>>()
                    .into(),
            );
            object.insert(
                "coprime".into(),
                verdicts
                    .iter()
                    .map(|(i, coprime, witness)| {
                        serde_json::json!({
                            "class": i,
                            "coprime": coprime,
                            "witness": witness.map(|(a, b)| vec![a, b]),
                        })
                    })
                    .collect::<Vec<_>>()
                    .into(),
            );
            println!("{}", serde_json::Value::Object(object));
            return Ok(());
        }

        println!(
            "digit support: {} ({} digits)",
            table.support.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
            table.support.len()
        );
        println!("plateau value: {:.6}", table.plateau_value);
        for (i, coprime, witness) in &verdicts {
            match (coprime, witness) {
                (true, Some((a, b))) => {
                    println!("coprime cycles (class {i}): yes (lengths {a}, {b})")
                }
                (true, None) => println!("coprime cycles (class {i}): yes"),
                (false, _) => println!("coprime cycles (class {i}): no"),
            }
        }
        let mut header = String::from(" k\\j");
        for j in 0..=j_max {
            let _ = write!(header, "  {j:>8}");
        }
        println!("{header}");
        for row in &table.rows {
            let mut line = format!("{:>4}", row.stride);
            for d in &row.dims {
                let _ = write!(line, "  {d:>8.6}");
            }
            if row.plateau {
                line.push_str("  plateau");
            }
            println!("{line}");
        }
        return Ok(());
    }

    if k < 1 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let decimated = decimate(minimal, DecimationSpec { stride: k, offset: j }).map_err(domain)?;
    let report = hausdorff_dimension(&decimated, 1e-12).map_err(domain)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "p": minimal.p,
                "k": k,
                "j": j,
                "states": decimated.state_count(),
                "rho": report.rho,
                "dimension": report.dimension,
            })
        );
    } else {
        println!(
            "decimation k={k} j={j}: states {}, dimension {:.6}",
            decimated.state_count(),
            report.dimension
        );
    }
    Ok(())
}

fn cmd_measure(
    input: PathBuf,
    cylinder: Option<String>,
    localdim: Option<String>,
    spectrum: Option<u32>,
    json: bool,
) -> Result<(), Failure> {
    let system = load_system(&input)?;
    let measure = build_measure(&system).map_err(domain)?;

    if let Some(text) = cylinder {
        let digits = parse_digits(&text)?;
        let mass = measure.cylinder_measure(&digits).map_err(domain)?;
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "cylinder": digits_csv(&digits),
                    "mass": mass.to_string(),
                    "mass_decimal": rational_decimal(&mass),
                })
            );
        } else {
            println!(
                "cylinder {}: mass = {} ({:.6})",
                digits_csv(&digits),
                mass,
                rational_decimal(&mass)
            );
        }
        return Ok(());
    }

    if let Some(text) = localdim {
        let point: PadicPoint = text
            .parse()
            .map_err(|e: padic_ifs::error::Error| Failure::Usage(e.to_string()))?;
        let expansion = point.to_expansion(system.p).map_err(domain)?;
        let report = measure.local_dimension(&point).map_err(domain)?;
        if json {
            let mut object = serde_json::Map::new();
            object.insert("point".into(), text.clone().into());
            object.insert("expansion".into(), expansion.to_string().into());
            object.insert("preperiod_digits".into(), report.preperiod_digits.into());
            object.insert("cycle_digits".into(), report.cycle_digits.into());
            match report.kind {
                LocalDimension::Exact { rho, value } => {
                    object.insert("kind".into(), "exact".into());
                    object.insert("rho".into(), rho.into());
                    object.insert("local_dimension".into(), value.into());
                }
                LocalDimension::Bounds { lower, upper } => {
                    object.insert("kind".into(), "bounds".into());
                    object.insert("lower".into(), lower.into());
                    object.insert("upper".into(), upper.into());
                }
            }
            println!("{}", serde_json::Value::Object(object));
        } else {
            println!("point: {text} = expansion {expansion}");
            println!(
                "preperiod digits: {}, cycle digits: {}",
                report.preperiod_digits, report.cycle_digits
            );
            match report.kind {
                LocalDimension::Exact { rho, value } => println!(
                    "local dimension: exact {value:.6} (cycle spectral radius {rho:.6})"
                ),
                LocalDimension::Bounds { lower, upper } => println!(
                    "local dimension: bounds [{lower:.6}, {upper:.6}] (non-primitive cycle product)"
                ),
            }
        }
        return Ok(());
    }

    if let Some(max_len) = spectrum {
        let report = measure.periodic_spectrum(max_len).map_err(domain)?;
        if json {
            let mut object = serde_json::Map::new();
            object.insert("max_cycle_digits".into(), max_len.into());
            object.insert("samples".into(), report
                .samples
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "state": s.state,
                        "digits": digits_csv(&s.digits),
                        "rho": s.rho,
                        "local_dimension": s.local_dim,
                    })
                })
                .collect::<Vec<_>>()
                .into());
            if let Some((lo, hi)) = report.bounds() {
                object.insert("inf".into(), lo.into());
                object.insert("sup".into(), hi.into());
            }
            println!("{}", serde_json::Value::Object(object));
        } else {
            println!(
                "periodic spectrum on cycles up to {max_len} digits: {} samples",
                report.samples.len()
            );
            match report.bounds() {
                Some((lo, hi)) => println!("I = {lo:.6}, S = {hi:.6}"),
                None => println!("no strictly positive cycles found"),
            }
        }
        return Ok(());
    }

    // No query: print the transfer data.
    if json {
        let mut object = serde_json::Map::new();
        object.insert("system".into(), system.to_string().into());
        object.insert("minimal_states".into(), measure.dfa.state_count().into());
        object.insert(
            "carries".into(),
            measure
                .carries
                .iter()
                .map(|c| c.iter().map(|&i| i as u64).collect::<Vec<u64>>())
                .collect::<Vec<_>>()
                .into(),
        );
        object.insert(
            "matrices".into(),
            measure
                .matrices
                .iter()
                .map(|(&(q, digit), t)| {
                    serde_json::json!({
                        "from": q,
                        "digit": digit,
                        "to": measure.dfa.step(q, digit).unwrap(),
                        "rows": t.data
                            .iter()
                            .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>()
                .into(),
        );
        println!("{}", serde_json::Value::Object(object));
    } else {
        println!("system: {system}");
        println!("minimal dfa states: {}", measure.dfa.state_count());
        for (q, carries) in measure.carries.iter().enumerate() {
            println!(
                "state {q} carries: {{{}}}",
                carries
                    .iter()
                    .map(|c| measure.transducer.states[*c].to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            );
        }
        for (&(q, digit), t) in &measure.matrices {
            println!(
                "T[state {q}, digit {digit}] -> state {}:",
                measure.dfa.step(q, digit).unwrap()
            );
            for row in &t.data {
                println!(
                    "  [{}]",
                    row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
                );
            }
        }
    }
    Ok(())
}

fn cmd_normalize(input: PathBuf, json: bool) -> Result<(), Failure> {
    let system = load_system(&input)?;
    let (normalized, conjugation) = system.normalize().map_err(domain)?;
    let system_json = serde_json::to_value(&normalized)
        .map_err(|e| Failure::Domain(format!("cannot serialize system: {e}")))?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "a": conjugation.a.to_string(),
                "c": conjugation.c.to_string(),
                "system": system_json,
            })
        );
    } else {
        println!("input: {system}");
        println!("normalized: {normalized}");
        println!("witness: {conjugation}");
        println!(
            "{}",
            serde_json::to_string_pretty(&system_json)
                .map_err(|e| Failure::Domain(e.to_string()))?
        );
    }
    Ok(())
}

fn cmd_oracle(
    input: PathBuf,
    depth: u32,
    cylinder: Option<String>,
    json: bool,
) -> Result<(), Failure> {
    let system = load_system(&input)?;
    if let Some(text) = cylinder {
        let digits = parse_digits(&text)?;
        let mass = brute_cylinder_mass(&system, &digits).map_err(domain)?;
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "cylinder": digits_csv(&digits),
                    "mass": mass.to_string(),
                    "mass_decimal": rational_decimal(&mass),
                })
            );
        } else {
            println!(
                "cylinder {}: mass = {} ({:.6})",
                digits_csv(&digits),
                mass,
                rational_decimal(&mass)
            );
        }
        return Ok(());
    }
    let prefixes = brute_prefixes(&system, depth).map_err(domain)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "depth": depth,
                "count": prefixes.len(),
                "prefixes": prefixes.iter().map(|w| digits_csv(w)).collect::<Vec<_>>(),
            })
        );
    } else {
        println!("depth {depth}: {} prefixes", prefixes.len());
        for prefix in &prefixes {
            println!("{}", digits_csv(prefix));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            input,
            verify,
            depth,
            dot,
            exact,
            json,
        } => cmd_analyze(input, verify, depth, dot, exact, json),
        Command::Decimate {
            input,
            k,
            j,
            profile,
            json,
        } => cmd_decimate(input, k, j, profile, json),
        Command::Measure {
            input,
            cylinder,
            localdim,
            spectrum,
            json,
        } => cmd_measure(input, cylinder, localdim, spectrum, json),
        Command::Normalize { input, json } => cmd_normalize(input, json),
        Command::Oracle {
            input,
            depth,
            cylinder,
            json,
        } => cmd_oracle(input, depth, cylinder, json),
    }
}

/// Restore the default SIGPIPE disposition so that piping into `head` ends
/// the process quietly instead of panicking on a closed stdout.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
