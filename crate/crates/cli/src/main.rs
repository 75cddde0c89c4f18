//! `pi2` command-line front end: check rules on finite algebras, decide
//! admissibility, print chain spectra, verify derivations, classify
//! inductive classes and test cover-preserving embeddings.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pi2_core::decide::{
    chain_in_class, classify_minimal, decide_lc, is_inductively_complete, ClassDescriptor,
};
use pi2_core::proofcheck::{check_derivation, parse_derivation_file};
use pi2_core::semantics::{make_density, make_lambda, make_rho, rule_holds};
use pi2_core::symbolic::{chain_spectrum, Spectrum};
use pi2_core::syntax::parse_rule;
use pi2_core::{
    is_cover_preserving_embedding, EmbeddingError, EmbeddingMap, FiniteGodelAlgebra, Pi2Rule,
    TableDescription,
};

/// Exit codes: 0 for success (and for "holds"/"accepted"/"cover-preserving"),
/// 1 for a negative outcome, 2 for input errors.
#[derive(Parser)]
#[command(name = "pi2", version, about = "Pi2-rules over Goedel-Dummett logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a rule on one finite algebra by exhaustive evaluation.
    Check {
        /// Algebra descriptor: chain:N, product:chain:N,chain:M,... or table:<path>
        #[arg(long)]
        algebra: String,
        /// Rule text, or a named rule: @density, @rho:N, @lambda:K, @lambda-axiom:K
        #[arg(long)]
        rule: String,
        #[arg(long)]
        json: bool,
    },
    /// Decide derivability and admissibility over Goedel-Dummett logic.
    Decide {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        json: bool,
    },
    /// Print on which finite chains a rule is valid.
    Spectrum {
        #[arg(long)]
        rule: String,
        /// Show explicit values up to this chain size (default: the threshold).
        #[arg(long)]
        max_explicit: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Verify a derivation file.
    Prove {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Classify inductive classes: minimal class of an algebra, chain
    /// membership, and inductive completeness of a descriptor.
    Classify {
        /// Report the minimal inductive class containing this algebra.
        #[arg(long)]
        algebra: Option<String>,
        /// Ask whether the chain with this many elements lies in the class
        /// generated by --generators.
        #[arg(long)]
        member: Option<usize>,
        /// Comma-separated chain sizes generating the class.
        #[arg(long)]
        generators: Option<String>,
        /// Add the dense chain to the generators.
        #[arg(long)]
        include_q: bool,
        /// Ask whether the descriptor names an inductively complete class.
        #[arg(long)]
        complete: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check whether an element map between two chains is a
    /// cover-preserving embedding.
    Embed {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Comma-separated images of the source elements, e.g. 0,1,3
        #[arg(long)]
        map: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    // die silently on a closed pipe instead of panicking mid-print
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if let Ok(threads) = std::env::var("PI2_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("pi2: ignoring PI2_THREADS={threads:?}: expected a positive integer");
            }
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("pi2: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check {
            algebra,
            rule,
            json,
        } => cmd_check(&algebra, &rule, json),
        Command::Decide { rule, json } => cmd_decide(&rule, json),
        Command::Spectrum {
            rule,
            max_explicit,
            json,
        } => cmd_spectrum(&rule, max_explicit, json),
        Command::Prove { file, json } => cmd_prove(&file, json),
        Command::Classify {
            algebra,
            member,
            generators,
            include_q,
            complete,
            json,
        } => cmd_classify(algebra, member, generators, include_q, complete, json),
        Command::Embed {
            from,
            to,
            map,
            json,
        } => cmd_embed(&from, &to, &map, json),
    }
}

fn cmd_check(algebra: &str, rule: &str, json: bool) -> Result<ExitCode, String> {
    let alg = parse_algebra(algebra)?;
    let rule = parse_rule_source(rule)?;
    let result = rule_holds(&alg, &rule);
    if json {
        let value = serde_json::json!({
            "algebra": algebra,
            "rule": rule.to_string(),
            "holds": result.holds,
            "counterexample": result.counterexample,
        });
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else if result.holds {
        println!("holds on {algebra}");
    } else {
        let cex = result.counterexample.as_ref().unwrap();
        let listing: Vec<String> = rule
            .free_variables()
            .iter()
            .map(|v| {
                let value = cex.get(v).unwrap();
                format!("{v}={}", alg.element_name(value))
            })
            .collect();
        println!("refuted on {algebra}");
        println!("counterexample: {}", listing.join(","));
    }
    Ok(ExitCode::from(if result.holds { 0 } else { 1 }))
}

fn cmd_decide(rule: &str, json: bool) -> Result<ExitCode, String> {
    let rule = parse_rule_source(rule)?;
    let verdict = decide_lc(&rule);
    if json {
        println!("{}", serde_json::to_string_pretty(&verdict).unwrap());
    } else {
        println!("rule: {rule}");
        println!("derivable: {}", verdict.derivable);
        println!("admissible: {}", verdict.admissible);
        println!(
            "hereditarily admissible: {}",
            verdict.hereditarily_admissible
        );
        println!("valid on the dense chain: {}", verdict.q_valid);
        match verdict.refuting_chain {
            Some(n) => println!("refuting chain: {n}"),
            None => println!("refuting chain: none"),
        }
        println!("{}", describe_spectrum(&verdict.spectrum));
    }
    Ok(ExitCode::SUCCESS)
}

fn describe_spectrum(spectrum: &Spectrum) -> String {
    let valid: Vec<String> = spectrum
        .explicit
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(i, _)| (i + 2).to_string())
        .collect();
    format!(
        "spectrum: valid on sizes {{{}}} of 2..={}; beyond that: {}",
        valid.join(","),
        spectrum.threshold,
        if spectrum.tail { "valid" } else { "refuted" }
    )
}

fn cmd_spectrum(rule: &str, max_explicit: Option<usize>, json: bool) -> Result<ExitCode, String> {
    let rule = parse_rule_source(rule)?;
    let spectrum = chain_spectrum(&rule);
    let show_up_to = max_explicit.unwrap_or(spectrum.threshold).max(2);
    if json {
        let shown: Vec<bool> = (2..=show_up_to).map(|n| spectrum.is_valid_at(n)).collect();
        let value = serde_json::json!({
            "rule": rule.to_string(),
            "explicit": shown,
            "tail": spectrum.tail,
            "threshold": spectrum.threshold,
        });
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else {
        println!("rule: {rule}");
        for n in 2..=show_up_to {
            println!(
                "size {n}: {}",
                if spectrum.is_valid_at(n) {
                    "valid"
                } else {
                    "refuted"
                }
            );
        }
        println!(
            "every larger chain: {}  (threshold {})",
            if spectrum.tail { "valid" } else { "refuted" },
            spectrum.threshold
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_prove(file: &PathBuf, json: bool) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let (rs, derivation) = parse_derivation_file(&text).map_err(|e| e.to_string())?;
    let report = check_derivation(&rs, &derivation);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("goal: {}", derivation.context);
        for step in &report.steps {
            match (&step.status, &step.formula) {
                (pi2_core::proofcheck::StepStatus::Ok, Some(f)) => {
                    println!("step {}: ok   {f}", step.index)
                }
                (pi2_core::proofcheck::StepStatus::Failed, _) => {
                    println!("step {}: FAILED", step.index)
                }
                _ => println!("step {}: skipped", step.index),
            }
        }
        match &report.failure {
            None => println!("accepted"),
            Some(failure) => match failure.step {
                Some(step) => println!("rejected at step {step}: {}", failure.error),
                None => println!("rejected: {}", failure.error),
            },
        }
    }
    Ok(ExitCode::from(if report.accepted { 0 } else { 1 }))
}

fn cmd_classify(
    algebra: Option<String>,
    member: Option<usize>,
    generators: Option<String>,
    include_q: bool,
    complete: bool,
    json: bool,
) -> Result<ExitCode, String> {
    let generator_set = |generators: &Option<String>| -> Result<BTreeSet<usize>, String> {
        match generators {
            None => Ok(BTreeSet::new()),
            Some(text) if text.trim().is_empty() => Ok(BTreeSet::new()),
            Some(text) => text
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad chain size: {part:?}"))
                })
                .collect(),
        }
    };
    match (algebra, member, complete) {
        (Some(descriptor), None, false) => {
            let alg = parse_algebra(&descriptor)?;
            if alg.size() > 128 {
                return Err(format!(
                    "classification searches chain subalgebras exhaustively and is limited \
                     to 128 elements; {descriptor} has {}",
                    alg.size()
                ));
            }
            let class = classify_minimal(&alg);
            if json {
                println!("{}", serde_json::to_string_pretty(&class).unwrap());
            } else {
                let n = class.finite_generators.iter().next().unwrap();
                println!("minimal inductive class: generated by the chain with {n} elements");
            }
            Ok(ExitCode::SUCCESS)
        }
        (None, Some(m), false) => {
            if include_q {
                return Err(
                    "membership queries mixing finite generators with the dense chain are not decided; \
                     drop --include-q"
                        .into(),
                );
            }
            let generators = generator_set(&generators)?;
            let membership = chain_in_class(m, &generators).map_err(|e| e.to_string())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&membership).unwrap());
            } else if membership.member {
                println!("member: the chain with {m} elements is a generator");
            } else {
                match &membership.witness {
                    Some(witness) => println!(
                        "not a member; separating formula: {witness} (valid on every \
                         generator below {m}, refuted on the chain with {m} elements)"
                    ),
                    None => {
                        println!("not a member; no separating formula: every generator exceeds {m}")
                    }
                }
            }
            Ok(ExitCode::from(if membership.member { 0 } else { 1 }))
        }
        (None, None, true) => {
            let descriptor = ClassDescriptor {
                finite_generators: generator_set(&generators)?,
                include_q,
            };
            let complete = is_inductively_complete(&descriptor);
            if json {
                let value = serde_json::json!({
                    "descriptor": descriptor,
                    "inductively_complete": complete,
                });
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            } else {
                println!(
                    "{}",
                    if complete {
                        "inductively complete"
                    } else {
                        "not inductively complete"
                    }
                );
            }
            Ok(ExitCode::from(if complete { 0 } else { 1 }))
        }
        _ => Err("pick exactly one of --algebra, --member or --complete".into()),
    }
}

fn cmd_embed(from: &str, to: &str, map: &str, json: bool) -> Result<ExitCode, String> {
    let source = parse_algebra(from)?;
    let target = parse_algebra(to)?;
    let map: Vec<u32> = map
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad map entry: {part:?}"))
        })
        .collect::<Result<_, _>>()?;
    let embedding = EmbeddingMap {
        source,
        target,
        map,
    };
    match is_cover_preserving_embedding(&embedding) {
        Ok(answer) => {
            if json {
                let value = serde_json::json!({ "cover_preserving": answer });
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            } else {
                println!(
                    "{}",
                    if answer {
                        "cover-preserving"
                    } else {
                        "not cover-preserving"
                    }
                );
            }
            Ok(ExitCode::from(if answer { 0 } else { 1 }))
        }
        Err(e @ (EmbeddingError::NotLinear(_) | EmbeddingError::NotAnEmbedding(_))) => {
            Err(e.to_string())
        }
    }
}

fn parse_rule_source(src: &str) -> Result<Pi2Rule, String> {
    let Some(name) = src.strip_prefix('@') else {
        return parse_rule(src).map_err(|e| e.to_string());
    };
    if name == "density" {
        return Ok(make_density());
    }
    if let Some(n) = name.strip_prefix("rho:") {
        let n: usize = n.parse().map_err(|_| format!("bad rho index: {n:?}"))?;
        return make_rho(n).map_err(|e| e.to_string());
    }
    for prefix in ["lambda:", "lambda-axiom:"] {
        if let Some(k) = name.strip_prefix(prefix) {
            let k: usize = k.parse().map_err(|_| format!("bad lambda index: {k:?}"))?;
            let formula = make_lambda(k).map_err(|e| e.to_string())?;
            return Ok(Pi2Rule::axiom(formula));
        }
    }
    Err(format!(
        "unknown named rule @{name}; available: @density, @rho:N, @lambda:K, @lambda-axiom:K"
    ))
}

fn parse_algebra(desc: &str) -> Result<FiniteGodelAlgebra, String> {
    if let Some(rest) = desc.strip_prefix("product:") {
        let factors: Vec<FiniteGodelAlgebra> = rest
            .split(',')
            .map(parse_single_algebra)
            .collect::<Result<_, _>>()?;
        return FiniteGodelAlgebra::make_product(&factors).map_err(|e| e.to_string());
    }
    parse_single_algebra(desc)
}

fn parse_single_algebra(desc: &str) -> Result<FiniteGodelAlgebra, String> {
    if let Some(n) = desc.strip_prefix("chain:") {
        let n: usize = n.parse().map_err(|_| format!("bad chain size: {n:?}"))?;
        return FiniteGodelAlgebra::make_chain(n).map_err(|e| e.to_string());
    }
    if let Some(path) = desc.strip_prefix("table:") {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        let table: TableDescription =
            serde_json::from_str(&text).map_err(|e| format!("bad table file {path}: {e}"))?;
        return FiniteGodelAlgebra::from_table(&table).map_err(|e| e.to_string());
    }
    Err(format!(
        "bad algebra descriptor {desc:?}; expected chain:N, product:chain:N,chain:M,... or table:<path>"
    ))
}
