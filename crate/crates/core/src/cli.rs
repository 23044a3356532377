//! Command-line front end. Reports are line-oriented `KEY: value` text.
//!
//! Exit codes: 0 on success, 1 when a property check fails (a witness is
//! printed), 2 on usage, parse or evaluation errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use num_traits::One;

use crate::aut::{classify, factorize, Automorphism, FactorMode};
use crate::derivation::{check_derivation, exp_apply};
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement};
use crate::report::{Check, Witness};
use crate::sample::Sampler;
use crate::series::{Precision, Series};
use crate::session::SessionConfig;
use crate::syntax::{self, Notation};
use crate::Rational;

#[derive(Parser, Debug)]
#[command(name = "hahn-aut", version, about = "Exact Hahn series and automorphism workbench")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Value group: Z, Q, Lex(n) or SD(d).
    #[arg(long, global = true, default_value = "Q")]
    group: String,
    /// Truncation bound as a group element, or `inf`.
    #[arg(long, global = true, default_value = "inf")]
    precision: String,
    /// Series notation: `t` or `omega`.
    #[arg(long, global = true, default_value = "t")]
    notation: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long = "sample-count", global = true, default_value_t = 50)]
    sample_count: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an arithmetic expression over series.
    Eval { expr: String },
    /// Apply an automorphism spec to a series.
    Apply { spec: String, series: String },
    /// Compose specs (rightmost applied first).
    Compose {
        #[arg(required = true)]
        specs: Vec<String>,
        /// Also apply the composite to this series.
        #[arg(long)]
        on: Option<String>,
    },
    /// Invert a spec.
    Invert {
        spec: String,
        #[arg(long)]
        on: Option<String>,
    },
    /// Run the structural predicates on seeded samples.
    Classify { spec: String },
    /// Split an automorphism into reconstruction and residual.
    Factorize {
        spec: String,
        #[arg(long, default_value = "field")]
        mode: String,
        /// Sample exponents separated by `;`.
        #[arg(long)]
        samples: Option<String>,
    },
    /// Apply a derivation spec to a series.
    Derive { derivation: String, series: String },
    /// Apply exp of a derivation, truncated at the session precision.
    ExpDeriv { derivation: String, series: String },
    /// Check the Leibniz rule, additivity and contraction on samples.
    CheckDeriv { derivation: String },
    /// Run the built-in property suites.
    Selftest,
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let mut out = String::new();
    let code = match session(&cli.global).and_then(|cfg| dispatch(&cfg, &cli.command, &mut out)) {
        Ok(ok) => {
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            out.push_str(&error_line(&e));
            2
        }
    };
    (code, out)
}

pub fn error_line(e: &Error) -> String {
    match e.path() {
        Some(path) => format!("ERROR: {} at {}: {}\n", e.kind(), path, e.root()),
        None => format!("ERROR: {}: {}\n", e.kind(), e),
    }
}

fn session(g: &GlobalOpts) -> Result<SessionConfig> {
    let group: GroupDescriptor = g.group.parse()?;
    let notation: Notation = g.notation.parse()?;
    let precision = match g.precision.trim() {
        "inf" | "infinity" | "none" => Precision::Infinite,
        text => Precision::Finite(syntax::parse_group_element(text, group)?),
    };
    if g.sample_count == 0 {
        return Err(Error::DomainError("--sample-count must be at least 1".into()));
    }
    Ok(SessionConfig {
        group,
        precision,
        notation,
        seed: g.seed,
        sample_count: g.sample_count,
    })
}

/// Spec arguments naming an existing file are read from disk.
fn spec_text(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Error::DomainError(format!("cannot read {arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn load(cfg: &SessionConfig, arg: &str) -> Result<Automorphism> {
    cfg.load_aut(&spec_text(arg)?)
}

fn require_finite(cfg: &SessionConfig, what: &str) -> Result<GroupElement> {
    cfg.precision
        .finite()
        .cloned()
        .ok_or_else(|| Error::InsufficientPrecision(format!("{what} needs a finite --precision")))
}

/// Returns `Ok(false)` when a property check failed.
fn dispatch(cfg: &SessionConfig, command: &Command, out: &mut String) -> Result<bool> {
    let ctx = cfg.apply_context();
    match command {
        Command::Eval { expr } => {
            let value = syntax::eval_expression(expr, cfg.group, cfg.notation, &cfg.precision)?;
            line(out, "RESULT", cfg.format_series(&value));
        }
        Command::Apply { spec, series } => {
            let a = load(cfg, spec)?;
            let s = cfg.parse_series(series)?;
            line(out, "RESULT", cfg.format_series(&a.apply_with(&s, &ctx)?));
        }
        Command::Compose { specs, on } => {
            let parts = specs.iter().map(|s| load(cfg, s)).collect::<Result<Vec<_>>>()?;
            let a = Automorphism::compose(cfg.group, parts)?;
            describe(cfg, &a, on.as_deref(), out)?;
        }
        Command::Invert { spec, on } => {
            require_finite(cfg, "invert")?;
            let a = load(cfg, spec)?.inverse();
            describe(cfg, &a, on.as_deref(), out)?;
        }
        Command::Classify { spec } => {
            let a = load(cfg, spec)?;
            let report = classify(&a, &cfg.sample_spec(), &ctx);
            line(out, "CLASS", report.class);
            line(out, "SAMPLES", format!("seed={} count={}", cfg.seed, cfg.sample_count));
            for (name, check) in report.checks() {
                write_check(cfg, name, check, out);
            }
            return Ok(!report.any_failed());
        }
        Command::Factorize { spec, mode, samples } => {
            let a = load(cfg, spec)?;
            let mode: FactorMode = mode.parse()?;
            let samples = match samples {
                Some(text) => text
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| syntax::parse_group_element(s, cfg.group))
                    .collect::<Result<Vec<_>>>()?,
                None => default_exponents(cfg.group),
            };
            let f = factorize(&a, mode, &samples, &cfg.sample_spec(), &ctx)?;
            let g = |e: &GroupElement| syntax::format_group_element(e, cfg.notation);
            for (x, y) in &f.exponent_map {
                line(out, "EXPONENT", format!("{} -> {}", g(x), g(y)));
            }
            for (x, c) in &f.coefficients {
                line(out, "COEFFICIENT", format!("{} -> {}", g(x), syntax::format_rational(c)));
            }
            line(out, "RECONSTRUCTION", cfg.format_aut(&f.reconstruction));
            line(out, "RESIDUAL", cfg.format_aut(&f.residual));
            for (name, check) in &f.certificates {
                write_check(cfg, name, check, out);
            }
            return Ok(f.passed());
        }
        Command::Derive { derivation, series } => {
            let d = syntax::parse_derivation(&spec_text(derivation)?, cfg)?;
            let s = cfg.parse_series(series)?;
            line(out, "RESULT", cfg.format_series(&d.apply(&s)?));
        }
        Command::ExpDeriv { derivation, series } => {
            let target = require_finite(cfg, "exp-deriv")?;
            let d = syntax::parse_derivation(&spec_text(derivation)?, cfg)?;
            if !d.is_contracting() && !d.is_zero() {
                return Err(Error::NonContracting("exp needs a contracting derivation".into()));
            }
            let s = cfg.parse_series(series)?;
            line(out, "RESULT", cfg.format_series(&exp_apply(&d, &target, &s)?));
        }
        Command::CheckDeriv { derivation } => {
            let d = syntax::parse_derivation(&spec_text(derivation)?, cfg)?;
            let report = check_derivation(&d, &cfg.sample_spec());
            line(out, "SAMPLES", format!("seed={} count={}", cfg.seed, cfg.sample_count));
            for (name, check) in [
                ("leibniz", &report.leibniz),
                ("additive", &report.additive),
                ("contracting", &report.contracting),
            ] {
                write_check(cfg, name, check, out);
            }
            return Ok(report.passed());
        }
        Command::Selftest => return Ok(selftest(cfg, out)),
    }
    Ok(true)
}

fn describe(cfg: &SessionConfig, a: &Automorphism, on: Option<&str>, out: &mut String) -> Result<()> {
    line(out, "AUT", cfg.format_aut(a));
    line(out, "CLASS", a.class());
    if let Some(text) = on {
        let s = cfg.parse_series(text)?;
        line(out, "RESULT", cfg.format_series(&a.apply_with(&s, &cfg.apply_context())?));
    }
    Ok(())
}

fn default_exponents(desc: GroupDescriptor) -> Vec<GroupElement> {
    let mut out = Sampler::basic_exponents(desc);
    out.extend(desc.standard_generators().unwrap_or_default());
    out
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}: {value}");
}

fn write_check(cfg: &SessionConfig, name: &str, check: &Check, out: &mut String) {
    let mut value = format!("{} (evaluated {}, skipped {})", check.status, check.evaluated, check.skipped);
    if let Some(note) = &check.note {
        let _ = write!(value, " [{note}]");
    }
    line(out, name, value);
    if let Some(w) = &check.witness {
        line(out, &format!("WITNESS {name}"), format_witness(w, cfg.notation));
    }
}

/// Witness series print in the active notation so they can be re-run.
pub fn format_witness(w: &Witness, notation: Notation) -> String {
    let parts: Vec<String> = w
        .inputs
        .iter()
        .chain(&w.sides)
        .map(|(k, s)| format!("{k} = {}", syntax::format_series(s, notation)))
        .collect();
    let mut text = parts.join("; ");
    if let Some(note) = &w.note {
        let _ = write!(text, " ({note})");
    }
    text
}

type Suite = fn(&SessionConfig) -> std::result::Result<(), String>;

/// Small seeded versions of the property suites.
fn selftest(cfg: &SessionConfig, out: &mut String) -> bool {
    let suites: [(&str, Suite); 4] = [
        ("ring_axioms", suite_ring),
        ("parse_roundtrip", suite_roundtrip),
        ("exp_oracle", suite_exp_oracle),
        ("negative_controls", suite_negative_controls),
    ];
    let mut ok = true;
    for (name, suite) in suites {
        match suite(cfg) {
            Ok(()) => line(out, &format!("SUITE {name}"), "pass"),
            Err(witness) => {
                ok = false;
                line(out, &format!("SUITE {name}"), "fail");
                line(out, &format!("WITNESS {name}"), witness);
            }
        }
    }
    ok
}

fn suite_ring(cfg: &SessionConfig) -> std::result::Result<(), String> {
    let mut sampler = Sampler::new(cfg.group, cfg.seed);
    let f = |s: &Series| cfg.format_series(s);
    for _ in 0..cfg.sample_count {
        let (a, b, c) = (sampler.series(3), sampler.series(3), sampler.series(3));
        let lhs = a.add_unchecked(&b).mul_unchecked(&c);
        let rhs = a.mul_unchecked(&c).add_unchecked(&b.mul_unchecked(&c));
        if !lhs.agrees(&rhs) {
            return Err(format!("a = {}; b = {}; c = {}; (a+b)c = {}; ac+bc = {}", f(&a), f(&b), f(&c), f(&lhs), f(&rhs)));
        }
        let ab = a.mul_unchecked(&b).mul_unchecked(&c);
        let ba = c.mul_unchecked(&b).mul_unchecked(&a);
        if !ab.agrees(&ba) {
            return Err(format!("a = {}; b = {}; c = {}; (ab)c = {}; (cb)a = {}", f(&a), f(&b), f(&c), f(&ab), f(&ba)));
        }
    }
    Ok(())
}

fn suite_roundtrip(cfg: &SessionConfig) -> std::result::Result<(), String> {
    let mut sampler = Sampler::new(cfg.group, cfg.seed);
    for _ in 0..cfg.sample_count {
        let s = sampler.series(4);
        let s = sampler.maybe_truncate(s);
        for notation in [Notation::T, Notation::Omega] {
            let text = syntax::format_series(&s, notation);
            match syntax::parse_series(&text, cfg.group, notation) {
                Ok(back) if back == s => {}
                Ok(back) => return Err(format!("s = {text}; reparsed = {}", syntax::format_series(&back, notation))),
                Err(e) => return Err(format!("s = {text}; {e}")),
            }
        }
    }
    Ok(())
}

fn suite_exp_oracle(_: &SessionConfig) -> std::result::Result<(), String> {
    let desc = GroupDescriptor::Rationals;
    let spec = "exp_derivation{phi: linear(1), shift: 1, precision: 10}";
    let a = SessionConfig::new(desc).load_aut(spec).map_err(|e| e.to_string())?;
    let ten = GroupElement::rational(Rational::from_integer(10.into()));
    let t = Series::monomial(desc, desc.one(), Rational::one());
    let one_minus_t = Series::one(desc).add_unchecked(&t.neg());
    let ratio = t.mul_unchecked(&one_minus_t.invert(&ten).map_err(|e| e.to_string())?);
    let mut oracle = Series::one(desc);
    for n in 1..=5i64 {
        oracle = oracle.mul_unchecked(&ratio).truncate_to(&ten);
        let tn = Series::monomial(desc, GroupElement::rational(Rational::from_integer(n.into())), Rational::one());
        let got = a.apply(&tn).map_err(|e| e.to_string())?;
        if got.truncate_to(&ten) != oracle {
            return Err(format!("n = {n}; exp = {got}; oracle = {oracle}"));
        }
    }
    Ok(())
}

fn suite_negative_controls(_: &SessionConfig) -> std::result::Result<(), String> {
    let cfg = SessionConfig {
        seed: 7,
        ..SessionConfig::new(GroupDescriptor::Rationals)
    };
    let a = cfg.load_aut("internal_mult{eps: t^(1)}").map_err(|e| e.to_string())?;
    let report = classify(&a, &cfg.sample_spec(), &cfg.apply_context());
    if !report.multiplicative.failed() || report.multiplicative.witness.is_none() {
        return Err("internal_mult{eps: t^(1)} was not caught as non-multiplicative".into());
    }
    let d = syntax::parse_derivation("table{1: t^(2), 2: t^(3)}", &cfg).map_err(|e| e.to_string())?;
    if !check_derivation(&d, &cfg.sample_spec()).leibniz.failed() {
        return Err("non-additive table passed the Leibniz check".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut argv = vec!["hahn-aut"];
        argv.extend_from_slice(args);
        run(argv)
    }

    #[test]
    fn documented_commands() {
        let (code, out) = run_args(&[
            "apply",
            "--group=Q",
            "--precision=5",
            "exp_derivation{phi: linear(1), shift: 1, precision: 5}",
            "t^(1)",
        ]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out, "RESULT: t^(1) + t^(2) + t^(3) + t^(4) (mod t^(5))\n");

        let (code, out) = run_args(&["eval", "(1 + t^(1)) * (1 - t^(1))"]);
        assert_eq!((code, out.as_str()), (0, "RESULT: 1 - t^(2)\n"));

        let (code, out) = run_args(&[
            "classify",
            "--group=Q",
            "--seed=7",
            "--sample-count=50",
            "internal_mult{eps: t^(1)}",
        ]);
        assert_eq!(code, 1, "{out}");
        assert!(out.contains("additive: pass"), "{out}");
        assert!(out.contains("multiplicative: fail"), "{out}");
        assert!(out.contains("WITNESS multiplicative: x = "), "{out}");
    }

    #[test]
    fn errors_map_to_exit_two() {
        let (code, out) = run_args(&["eval", "t^("]);
        assert_eq!(code, 2);
        assert!(out.starts_with("ERROR: ParseError"), "{out}");
        let (code, out) = run_args(&["apply", "internal_mult{eps: 1}", "t^(1)"]);
        assert_eq!(code, 2);
        assert!(out.starts_with("ERROR: NotInfinitesimal at internal_mult.eps"), "{out}");
        let (code, _) = run_args(&["frobnicate"]);
        assert_eq!(code, 2);
        let (code, out) = run_args(&["invert", "internal_mult{eps: t^(1)}"]);
        assert_eq!(code, 2);
        assert!(out.starts_with("ERROR: InsufficientPrecision"), "{out}");
    }

    #[test]
    fn omega_notation_and_inverse() {
        let (code, out) = run_args(&["eval", "--notation=omega", "w^(2) + 3"]);
        assert_eq!((code, out.as_str()), (0, "RESULT: w^(2) + 3\n"));
        let (code, out) = run_args(&["invert", "--precision=4", "--on=t^(1)", "internal_mult{eps: t^(1)}"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("AUT: inverse(internal_mult{eps: t^(1)})"), "{out}");
        assert!(out.contains("RESULT: t^(1) - t^(2) + t^(3) (mod t^(4))"), "{out}");
    }

    #[test]
    fn factorize_and_derivations() {
        let (code, out) = run_args(&["factorize", "--mode=field", "compose(character{1: 2}, external_field{tau: scalar(2)})"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("EXPONENT: 1 -> 2"), "{out}");
        assert!(out.contains("COEFFICIENT: 1 -> 4"), "{out}");

        let (code, out) = run_args(&["derive", "phi_shift{phi: linear(1), shift: 1}", "t^(2)"]);
        assert_eq!((code, out.as_str()), (0, "RESULT: 2*t^(3)\n"));
        let (code, out) = run_args(&["check-deriv", "table{1: t^(2), 2: t^(3)}"]);
        assert_eq!(code, 1, "{out}");
        assert!(out.contains("WITNESS leibniz: a = t^(1); b = t^(1)"), "{out}");
        let (code, out) = run_args(&["exp-deriv", "--precision=3", "phi_shift{phi: linear(1), shift: 1}", "t^(1)"]);
        assert_eq!((code, out.as_str()), (0, "RESULT: t^(1) + t^(2) (mod t^(3))\n"));
    }

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let first = run_args(&["selftest", "--sample-count=20"]);
        assert_eq!(first.0, 0, "{}", first.1);
        assert_eq!(first, run_args(&["selftest", "--sample-count=20"]));
    }
}
