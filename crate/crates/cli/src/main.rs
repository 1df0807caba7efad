use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use deltapoly::elim::{elim_ideal, has_nonzero_constant_term, projective_elim_ideal, IdealPresentation};
use deltapoly::homogenize::{
    dehomogenize, delta_homogenize_with_degree, evaluate_at, is_delta_homogeneous, ProjectivePoint,
};
use deltapoly::syntax::{
    format_diffpoly, format_factored, format_laurent_equation, parse_diffpoly, parse_laurent_equation,
    parse_laurent_rule, parse_rewrite_rule, VarNames,
};
use deltapoly::valuative::{combine, derive_type2, verify_certificate, Certificate, LaurentRule};
use deltapoly::{reduce, separant, DiffPoly, Error, Rational};

#[derive(Parser)]
#[command(name = "deltapoly", version, about = "Exact differential polynomial algebra")]
struct Cli {
    /// Print results as JSON
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate an expression
    Diff {
        expr: String,
        /// Print the expanded form instead of pulling out common factors
        #[arg(long)]
        expanded: bool,
    },
    /// Separant with respect to the leader
    Sep { expr: String },
    /// Rewrite with a solved equation such as "x'' = x^2"
    Reduce {
        expr: String,
        #[arg(long)]
        rule: String,
    },
    /// Delta-homogenize with respect to a new variable
    Homogenize {
        expr: String,
        #[arg(long)]
        by: String,
    },
    /// Set a variable to a constant and its derivatives to zero
    Dehomogenize {
        expr: String,
        #[arg(long)]
        by: String,
        #[arg(long, default_value = "1")]
        chart: String,
    },
    /// Test delta-homogeneity
    IsHomog { expr: String },
    /// Evaluate at a projective point with constant coordinates, e.g. "1:0"
    EvalAt {
        expr: String,
        #[arg(long)]
        point: String,
    },
    /// Run a truncated elimination job file
    Elim {
        job: PathBuf,
        /// Override the job's order bound
        #[arg(long)]
        bound: Option<usize>,
        /// Report whether this expression lies in the result
        #[arg(long)]
        member: Vec<String>,
    },
    /// Compare two expressions, optionally after rewriting both
    CheckIdentity {
        lhs: String,
        rhs: String,
        #[arg(long)]
        rule: Option<String>,
    },
    /// Combine a type I and a type II Laurent equation
    ValuativeCombine {
        type_i: String,
        type_ii: String,
        /// Write the certificate JSON to this file
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Turn a type I equation into a type II one
    ValuativeDerive2 {
        equation: String,
        #[arg(long, default_value = "x'' = x'/x")]
        rule: String,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Replay a certificate file
    VerifyCert {
        cert: PathBuf,
        /// Input equations in order
        #[arg(long = "input", required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        output: String,
    },
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. } | Error::UnknownVariable(_) | Error::InvalidPresentation(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Domain(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// A result in both renderings.
struct Output {
    text: String,
    json: Value,
    success: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            success: true,
        }
    }
}

fn names_for(texts: &[&str]) -> CliResult<VarNames> {
    Ok(VarNames::infer(texts.iter().copied())?)
}

fn parse_constant(text: &str) -> CliResult<Rational> {
    let p = parse_diffpoly(text, &VarNames::default())?;
    if !p.is_constant() {
        return Err(Failure::Usage(format!("`{text}` is not a number")));
    }
    Ok(p.constant_term())
}

fn show(p: &DiffPoly, names: &VarNames) -> String {
    format_diffpoly(p, names)
}

fn read(path: &PathBuf) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_cert(path: &Option<PathBuf>, cert: &Certificate) -> CliResult<()> {
    if let Some(path) = path {
        fs::write(path, cert.to_json() + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Job {
    variables: Vec<String>,
    generators: Vec<String>,
    #[serde(default)]
    eliminate: Vec<String>,
    order_bound: Option<usize>,
    saturate: Option<String>,
    projective: Option<Vec<String>>,
    #[serde(default)]
    members: Vec<String>,
}

fn run_elim(job_path: &PathBuf, bound: Option<usize>, extra_members: &[String]) -> CliResult<Output> {
    let job: Job = serde_json::from_str(&read(job_path)?)
        .map_err(|e| Failure::Usage(format!("invalid job file: {e}")))?;
    let mut names = VarNames::new(job.variables.iter().map(String::as_str))?;
    let generators = job
        .generators
        .iter()
        .map(|g| parse_diffpoly(g, &names))
        .collect::<Result<Vec<_>, _>>()?;
    let resolve = |list: &[String], names: &VarNames| -> CliResult<BTreeSet<usize>> {
        list.iter().map(|n| Ok(names.resolve(n)?)).collect()
    };
    let eliminate = resolve(&job.eliminate, &names)?;
    let keep: BTreeSet<usize> = (0..names.len()).filter(|i| !eliminate.contains(i)).collect();
    let mut pres = IdealPresentation::new(generators, eliminate, keep, bound.or(job.order_bound))?;
    if let Some(witness) = &job.saturate {
        let g = parse_diffpoly(witness, &names)?;
        let t = pres.saturate(&g);
        let mut fresh = "t".to_string();
        while names.index(&fresh).is_some() {
            fresh.push('t');
        }
        let pushed = names.push(&fresh);
        debug_assert_eq!(pushed, t);
    }
    let result = match &job.projective {
        Some(proj) => projective_elim_ideal(&pres, &resolve(proj, &names)?)?,
        None => elim_ideal(&pres)?,
    };

    let gens: Vec<String> = result.generators.iter().map(|g| show(g, &names)).collect();
    let constant = has_nonzero_constant_term(&result);
    let mut members = BTreeMap::new();
    for m in job.members.iter().chain(extra_members) {
        let p = parse_diffpoly(m, &names)?;
        members.insert(show(&p, &names), result.contains(&p));
    }

    let mut text = String::new();
    text.push_str(&format!("order_bound_used: {}\n", result.order_bound_used));
    text.push_str(&format!("has_unit: {}\n", result.has_unit));
    text.push_str(&format!("has_nonzero_constant_term: {constant}\n"));
    text.push_str(&format!("generators ({}):\n", gens.len()));
    for g in &gens {
        text.push_str(&format!("  {g}\n"));
    }
    for (m, inside) in &members {
        text.push_str(&format!("member {m}: {inside}\n"));
    }
    let json = json!({
        "generators": gens,
        "order_bound_used": result.order_bound_used,
        "has_unit": result.has_unit,
        "has_nonzero_constant_term": constant,
        "members": members,
    });
    Ok(Output::ok(text.trim_end().to_string(), json))
}

fn run(command: Command) -> CliResult<Output> {
    match command {
        Command::Diff { expr, expanded } => {
            let names = names_for(&[&expr])?;
            let d = parse_diffpoly(&expr, &names)?.differentiate();
            let text = if expanded {
                show(&d, &names)
            } else {
                format_factored(&d, &names)
            };
            Ok(Output::ok(
                text,
                json!({ "result": show(&d, &names), "factored": format_factored(&d, &names) }),
            ))
        }
        Command::Sep { expr } => {
            let names = names_for(&[&expr])?;
            let s = separant(&parse_diffpoly(&expr, &names)?)?;
            Ok(Output::ok(show(&s, &names), json!({ "result": show(&s, &names) })))
        }
        Command::Reduce { expr, rule } => {
            let names = names_for(&[&expr, &rule])?;
            let r = parse_rewrite_rule(&rule, &names)?;
            let out = reduce(&parse_diffpoly(&expr, &names)?, &r);
            Ok(Output::ok(show(&out, &names), json!({ "result": show(&out, &names) })))
        }
        Command::Homogenize { expr, by } => {
            let names = names_for(&[&expr, &by])?;
            let h = names.resolve(&by)?;
            let (out, degree) = delta_homogenize_with_degree(&parse_diffpoly(&expr, &names)?, h)?;
            Ok(Output::ok(
                show(&out, &names),
                json!({ "result": show(&out, &names), "degree": degree }),
            ))
        }
        Command::Dehomogenize { expr, by, chart } => {
            let names = names_for(&[&expr, &by])?;
            let h = names.resolve(&by)?;
            let out = dehomogenize(&parse_diffpoly(&expr, &names)?, h, &parse_constant(&chart)?);
            Ok(Output::ok(show(&out, &names), json!({ "result": show(&out, &names) })))
        }
        Command::IsHomog { expr } => {
            let names = names_for(&[&expr])?;
            let report = is_delta_homogeneous(&parse_diffpoly(&expr, &names)?);
            let text = match report.degree {
                Some(d) => format!("homogeneous of degree {d}"),
                None => "not homogeneous".to_string(),
            };
            Ok(Output::ok(
                text,
                json!({ "homogeneous": report.homogeneous, "degree": report.degree }),
            ))
        }
        Command::EvalAt { expr, point } => {
            let names = names_for(&[&expr])?;
            let coords = point.split(':').map(parse_constant).collect::<CliResult<Vec<_>>>()?;
            let value = evaluate_at(&parse_diffpoly(&expr, &names)?, &ProjectivePoint::new(coords)?)?;
            let shown = show(&DiffPoly::constant(value), &names);
            Ok(Output::ok(shown.clone(), json!({ "value": shown })))
        }
        Command::Elim { job, bound, member } => run_elim(&job, bound, &member),
        Command::CheckIdentity { lhs, rhs, rule } => {
            let mut texts = vec![lhs.as_str(), rhs.as_str()];
            texts.extend(rule.as_deref());
            let names = names_for(&texts)?;
            let mut a = parse_diffpoly(&lhs, &names)?;
            let mut b = parse_diffpoly(&rhs, &names)?;
            if let Some(rule) = &rule {
                let r = parse_rewrite_rule(rule, &names)?;
                a = reduce(&a, &r);
                b = reduce(&b, &r);
            }
            let equal = a == b;
            let diff = &a - &b;
            let text = if equal {
                "equal".to_string()
            } else {
                format!("not equal; difference: {}", show(&diff, &names))
            };
            Ok(Output {
                text,
                json: json!({ "equal": equal, "difference": show(&diff, &names) }),
                success: equal,
            })
        }
        Command::ValuativeCombine {
            type_i,
            type_ii,
            cert_out,
        } => {
            let e1 = parse_laurent_equation(&type_i)?;
            let e2 = parse_laurent_equation(&type_ii)?;
            let out = combine(&e1, &e2)?;
            write_cert(&cert_out, &out.certificate)?;
            let eq = format_laurent_equation(&out.equation);
            Ok(Output::ok(
                format!("{eq}\niterations: {}", out.trace.len() - 1),
                json!({
                    "equation": eq,
                    "iterations": out.trace.len() - 1,
                    "trace": out.trace,
                    "certificate": out.certificate,
                }),
            ))
        }
        Command::ValuativeDerive2 {
            equation,
            rule,
            cert_out,
        } => {
            let e = parse_laurent_equation(&equation)?;
            let rule: LaurentRule = parse_laurent_rule(&rule)?;
            let out = derive_type2(&e, &rule)?;
            write_cert(&cert_out, &out.certificate)?;
            let eq = format_laurent_equation(&out.equation);
            Ok(Output::ok(
                format!("{eq}\niterations: {}", out.targets.len()),
                json!({
                    "equation": eq,
                    "iterations": out.targets.len(),
                    "targets": out.targets,
                    "certificate": out.certificate,
                }),
            ))
        }
        Command::VerifyCert { cert, inputs, output } => {
            let cert = Certificate::from_json(&read(&cert)?)?;
            let inputs = inputs
                .iter()
                .map(|t| parse_laurent_equation(t))
                .collect::<Result<Vec<_>, _>>()?;
            let output = parse_laurent_equation(&output)?;
            let valid = verify_certificate(&inputs, &cert, &output)?;
            Ok(Output {
                text: if valid { "valid" } else { "invalid" }.to_string(),
                json: json!({ "valid": valid }),
                success: valid,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                println!("{}", out.text);
            }
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
