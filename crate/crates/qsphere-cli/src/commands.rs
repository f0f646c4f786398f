//! The `qs` command set: argument parsing, config resolution, text/JSON
//! rendering, and the exit-code contract.
//!
//! Exit codes: `0` for success and positive verdicts, `1` for mathematical
//! negative verdicts (violated relations, stalled descents, non-unitary
//! elements, failed suites), `2` for usage, parse, IO, and config errors.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use qsphere_core::coeffq::{parse_rat, rat_text, QMode};
use qsphere_core::descent::{
    run_descent, verify_nonvanishing_obstruction, DescentCase, DescentOutcome, GeneratorVerdict,
    ImageForm,
};
use qsphere_core::parser::{parse_poly, ExprContext};
use qsphere_core::quotients::{
    check_homomorphism, commutator_ideal_certificate, is_unitary_laurent, project_to_circle,
    unitary_defect, HomVerdict, IdealCertificate, LaurentPoly,
};
use qsphere_core::rewrite::RuleSet;
use qsphere_core::suq2::{word_to_basis, BasisVector};
use qsphere_core::Error as CoreError;

use crate::config::{read_config_file, OutputMode, RunConfig, RunConfigDto};
use crate::json::{
    case_text, certificate_to_dto, confluence_to_dto, descent_outcome_to_dto,
    filtration_to_dto, hom_verdict_to_dto, obstruction_to_dto, unitary_to_dto, BasisCmdDto,
    BasisDto, CircleDto, DescentRunDto, HomSpecDto, LaurentDto, NormalizeDto, PolyDto,
    SuiteRunDto,
};
use crate::suites::{run_all, run_suite, SuiteConfig, SuiteReport};
use crate::{CliError, CliResult, EXIT_USAGE, EXIT_VERDICT};

/// Exact symbolic computation in quantum-sphere algebras: canonical normal
/// forms, basis arithmetic, filtration degrees, commutator-ideal
/// certificates, and the descent obstruction pipeline.
#[derive(Parser, Debug)]
#[command(name = "qs", version, max_term_width = 100)]
struct Cli {
    /// JSON run-configuration file (all fields optional).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Emit JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Rewrite a generator polynomial to its canonical normal form.
    Normalize {
        /// Generator indices run over 0..=n.
        #[arg(long)]
        n: Option<u32>,
        /// Deformation parameter: "symbolic" or a rational in [0,1).
        #[arg(long)]
        q: Option<String>,
        /// Allow Gaussian-rational coefficients (a + bi).
        #[arg(long)]
        gaussian: Option<bool>,
        /// Expression in z0..zn and their adjoints z0'..zn'.
        expr: String,
    },
    /// Convert an arity-1 polynomial to the canonical basis representation.
    Basis {
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        gaussian: Option<bool>,
        expr: String,
    },
    /// Apply the *-involution (to a polynomial, or with --basis to a basis
    /// vector) and canonicalize.
    Star {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        gaussian: Option<bool>,
        /// Interpret the input as a basis expression e(j,k,l).
        #[arg(long)]
        basis: bool,
        expr: String,
    },
    /// Filtration degree of a basis vector (least k+l in its support).
    Filtration {
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        gaussian: Option<bool>,
        expr: String,
    },
    /// Audit local confluence: enumerate critical pairs and check they join.
    Confluence {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        q: Option<String>,
        /// Width bound for gap-schema overlaps.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Produce and re-verify a commutator-ideal membership certificate.
    IdealCert {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        gaussian: Option<bool>,
        expr: String,
    },
    /// Project a polynomial to the circle quotient (z0 -> u, zi -> 0).
    Circle {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        gaussian: Option<bool>,
        expr: String,
    },
    /// Decide whether a Laurent polynomial is a unitary of the circle
    /// algebra (single term with unit coefficient).
    Unitary {
        #[arg(long)]
        gaussian: Option<bool>,
        expr: String,
    },
    /// Check a candidate *-homomorphism spec against every defining
    /// relation of its source.
    CheckHom {
        /// JSON homomorphism spec file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
    /// Run the filtration descent on a candidate generator image.
    Descent {
        /// Source deformation parameter (rational in [0,1)).
        #[arg(long)]
        q: String,
        /// Target deformation parameter (rational in (0,1)).
        #[arg(long)]
        qprime: String,
        /// Twisting case: "alpha"/"A" or "alpha-star"/"B".
        #[arg(long)]
        case: String,
        /// Candidate image as a basis expression, e.g. "e(0,1,0)".
        #[arg(long)]
        y: String,
        #[arg(long)]
        depth: Option<u64>,
        /// Render text instead of the default JSON.
        #[arg(long)]
        text: bool,
    },
    /// Run the full non-isomorphism obstruction pipeline on a spec.
    Obstruct {
        /// JSON homomorphism spec file (target must be "suq2").
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[arg(long)]
        depth: Option<u64>,
        /// Render text instead of the default JSON.
        #[arg(long)]
        text: bool,
    },
    /// Run the exact verification suites (all, or one with --suite).
    VerifyLemmas {
        /// One suite name; omit to run all of them.
        #[arg(long)]
        suite: Option<String>,
        /// Upper arity bound for the multi-sphere suites (default 3).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        q: Option<String>,
        /// Gap-schema width bound for the confluence audit.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        depth: Option<u64>,
        /// Seed for the randomized property suites.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Resolves base config + config file + per-command flag overrides.
/// The second component records whether the arity was set explicitly.
fn resolve(config_path: Option<&Path>, flags: &RunConfigDto) -> CliResult<(RunConfig, bool)> {
    let mut cfg = RunConfig::base()?;
    let mut n_explicit = flags.n.is_some();
    let mut depth_explicit = flags.depth.is_some();
    if let Some(path) = config_path {
        let file = read_config_file(path)?;
        n_explicit |= file.n.is_some();
        depth_explicit |= file.depth.is_some();
        cfg.apply(&file)?;
    }
    cfg.apply(flags)?;
    let _ = depth_explicit;
    Ok((cfg, n_explicit))
}

fn flags(
    n: Option<u32>,
    q: Option<String>,
    gaussian: Option<bool>,
    depth: Option<u64>,
    schema_bound: Option<usize>,
    seed: Option<u64>,
) -> RunConfigDto {
    RunConfigDto {
        n,
        q,
        gaussian,
        depth,
        schema_bound,
        output: None,
        seed,
    }
}

fn output_mode(cfg: &RunConfig, json_flag: bool) -> OutputMode {
    if json_flag {
        OutputMode::Json
    } else {
        cfg.output
    }
}

/// descent/obstruct default to JSON; --text opts out, --json always wins.
fn report_output(json_flag: bool, text_flag: bool) -> OutputMode {
    if json_flag || !text_flag {
        OutputMode::Json
    } else {
        OutputMode::Text
    }
}

/// Writes one finished block of output. A consumer that closed the pipe
/// early (`head`, `grep -q`) is a normal way to stop reading, not an
/// error: the process ends quietly instead of panicking mid-print.
fn emit(text: &str) -> CliResult<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let done = writeln!(out, "{text}").and_then(|()| out.flush());
    match done {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(e.into()),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    emit(&serde_json::to_string_pretty(value)?)
}

fn word_text(w: &qsphere_core::ncpoly::Word) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        w.to_string()
    }
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    let config_path = cli.config.as_deref();
    let json_flag = cli.json;
    match cli.cmd {
        Cmd::Normalize {
            n,
            q,
            gaussian,
            expr,
        } => {
            let (cfg, _) = resolve(config_path, &flags(n, q, gaussian, None, None, None))?;
            cmd_normalize(&cfg, output_mode(&cfg, json_flag), &expr)
        }
        Cmd::Basis { q, gaussian, expr } => {
            let (cfg, _) = resolve(config_path, &flags(None, q, gaussian, None, None, None))?;
            cmd_basis(&cfg, output_mode(&cfg, json_flag), &expr)
        }
        Cmd::Star {
            n,
            q,
            gaussian,
            basis,
            expr,
        } => {
            let (cfg, _) = resolve(config_path, &flags(n, q, gaussian, None, None, None))?;
            cmd_star(&cfg, output_mode(&cfg, json_flag), basis, &expr)
        }
        Cmd::Filtration { q, gaussian, expr } => {
            let (cfg, _) = resolve(config_path, &flags(None, q, gaussian, None, None, None))?;
            cmd_filtration(&cfg, output_mode(&cfg, json_flag), &expr)
        }
        Cmd::Confluence { n, q, bound } => {
            let (cfg, _) = resolve(config_path, &flags(n, q, None, None, bound, None))?;
            cmd_confluence(&cfg, output_mode(&cfg, json_flag))
        }
        Cmd::IdealCert {
            n,
            q,
            gaussian,
            expr,
        } => {
            let (cfg, _) = resolve(config_path, &flags(n, q, gaussian, None, None, None))?;
            cmd_ideal_cert(&cfg, output_mode(&cfg, json_flag), &expr)
        }
        Cmd::Circle {
            n,
            q,
            gaussian,
            expr,
        } => {
            let (cfg, _) = resolve(config_path, &flags(n, q, gaussian, None, None, None))?;
            cmd_circle(&cfg, output_mode(&cfg, json_flag), &expr)
        }
        Cmd::Unitary { gaussian, expr } => {
            let (cfg, _) = resolve(config_path, &flags(None, None, gaussian, None, None, None))?;
            cmd_unitary(&cfg, output_mode(&cfg, json_flag), &expr)
        }
        Cmd::CheckHom { spec } => {
            let (cfg, _) = resolve(config_path, &RunConfigDto::default())?;
            cmd_check_hom(&cfg, output_mode(&cfg, json_flag), &spec)
        }
        Cmd::Descent {
            q,
            qprime,
            case,
            y,
            depth,
            text,
        } => {
            let (cfg, _) = resolve(config_path, &flags(None, None, None, depth, None, None))?;
            cmd_descent(&cfg, report_output(json_flag, text), &q, &qprime, &case, &y)
        }
        Cmd::Obstruct { spec, depth, text } => {
            let (cfg, _) = resolve(config_path, &flags(None, None, None, depth, None, None))?;
            cmd_obstruct(&cfg, report_output(json_flag, text), &spec)
        }
        Cmd::VerifyLemmas {
            suite,
            n,
            q,
            bound,
            depth,
            seed,
        } => {
            let (cfg, n_explicit) =
                resolve(config_path, &flags(n, q, None, depth, bound, seed))?;
            cmd_verify_lemmas(&cfg, output_mode(&cfg, json_flag), n_explicit, suite.as_deref())
        }
    }
}

// ---------------------------------------------------------------------------
// Individual commands
// ---------------------------------------------------------------------------

fn cmd_normalize(cfg: &RunConfig, out: OutputMode, expr: &str) -> CliResult<i32> {
    let rules = RuleSet::new(cfg.n, cfg.qmode.clone())?;
    let ctx = ExprContext::new(cfg.n, cfg.gaussian);
    let nf = rules.normalize(&parse_poly(expr, &ctx)?)?;
    match out {
        OutputMode::Text => emit(&nf.poly.to_string())?,
        OutputMode::Json => print_json(&NormalizeDto {
            input: expr.to_string(),
            text: nf.poly.to_string(),
            normal_form: PolyDto::from_core(&nf.poly, &cfg.qmode),
            steps: nf.steps,
        })?,
    }
    Ok(0)
}

fn cmd_basis(cfg: &RunConfig, out: OutputMode, expr: &str) -> CliResult<i32> {
    let rules = RuleSet::new(1, cfg.qmode.clone())?;
    let ctx = ExprContext::new(1, cfg.gaussian);
    let nf = rules.normalize(&parse_poly(expr, &ctx)?)?;
    let v = word_to_basis(&nf.poly, &cfg.qmode)?;
    match out {
        OutputMode::Text => emit(&v.to_string())?,
        OutputMode::Json => print_json(&BasisCmdDto {
            input: expr.to_string(),
            text: v.to_string(),
            basis: BasisDto::from_core(&v),
        })?,
    }
    Ok(0)
}

fn cmd_star(cfg: &RunConfig, out: OutputMode, basis_mode: bool, expr: &str) -> CliResult<i32> {
    if basis_mode {
        let v = BasisVector::parse(expr, cfg.qmode.clone(), cfg.gaussian)?;
        let s = v.basis_star();
        match out {
            OutputMode::Text => emit(&s.to_string())?,
            OutputMode::Json => print_json(&BasisCmdDto {
                input: expr.to_string(),
                text: s.to_string(),
                basis: BasisDto::from_core(&s),
            })?,
        }
    } else {
        let rules = RuleSet::new(cfg.n, cfg.qmode.clone())?;
        let ctx = ExprContext::new(cfg.n, cfg.gaussian);
        let nf = rules.normalize(&parse_poly(expr, &ctx)?.involution())?;
        match out {
            OutputMode::Text => emit(&nf.poly.to_string())?,
            OutputMode::Json => print_json(&NormalizeDto {
                input: expr.to_string(),
                text: nf.poly.to_string(),
                normal_form: PolyDto::from_core(&nf.poly, &cfg.qmode),
                steps: nf.steps,
            })?,
        }
    }
    Ok(0)
}

fn cmd_filtration(cfg: &RunConfig, out: OutputMode, expr: &str) -> CliResult<i32> {
    let v = BasisVector::parse(expr, cfg.qmode.clone(), cfg.gaussian)?;
    let d = v.filtration_degree();
    match out {
        OutputMode::Text => emit(&d.to_string())?,
        OutputMode::Json => print_json(&filtration_to_dto(expr, d))?,
    }
    Ok(0)
}

fn cmd_confluence(cfg: &RunConfig, out: OutputMode) -> CliResult<i32> {
    let rules = RuleSet::new(cfg.n, cfg.qmode.clone())?;
    rules.verify_termination_measure()?;
    let report = rules.check_local_confluence(cfg.schema_bound)?;
    match out {
        OutputMode::Text => {
            let mut lines = vec![format!(
                "n = {}, q = {}, schema bound {}: {} critical pairs, {}",
                cfg.n,
                cfg.q_text(),
                cfg.schema_bound,
                report.pairs.len(),
                if report.all_joined {
                    "all joined".to_string()
                } else {
                    format!("{} unjoined", report.unjoined().count())
                }
            )];
            for p in report.unjoined() {
                lines.push(format!(
                    "  overlap {} ({} vs {}): {} != {}",
                    p.overlap, p.left_rule, p.right_rule, p.left_nf, p.right_nf
                ));
            }
            emit(&lines.join("\n"))?;
        }
        OutputMode::Json => print_json(&confluence_to_dto(&report, &cfg.qmode))?,
    }
    Ok(if report.all_joined { 0 } else { EXIT_VERDICT })
}

fn certificate_text(cert: &IdealCertificate, verified: bool) -> String {
    let mut lines = vec![format!("target: {}", cert.target())];
    for t in cert.terms() {
        lines.push(format!(
            "  {} * {} [ {} , {} ] {}",
            t.coeff,
            word_text(&t.pre),
            t.left,
            t.right,
            word_text(&t.post)
        ));
    }
    lines.push(format!("verified: {verified}"));
    lines.join("\n")
}

fn cmd_ideal_cert(cfg: &RunConfig, out: OutputMode, expr: &str) -> CliResult<i32> {
    let rules = RuleSet::new(cfg.n, cfg.qmode.clone())?;
    let ctx = ExprContext::new(cfg.n, cfg.gaussian);
    let target = parse_poly(expr, &ctx)?;
    match commutator_ideal_certificate(&target, &rules) {
        Ok(cert) => {
            let verified = cert.verify(&rules)?;
            match out {
                OutputMode::Text => emit(&certificate_text(&cert, verified))?,
                OutputMode::Json => {
                    print_json(&certificate_to_dto(&cert, &cfg.qmode, verified))?
                }
            }
            Ok(if verified { 0 } else { EXIT_VERDICT })
        }
        Err(CoreError::NotCertifiable { detail }) => {
            match out {
                OutputMode::Text => emit(&format!("not certifiable: {detail}"))?,
                OutputMode::Json => print_json(&serde_json::json!({
                    "certifiable": false,
                    "detail": detail,
                }))?,
            }
            Ok(EXIT_VERDICT)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_circle(cfg: &RunConfig, out: OutputMode, expr: &str) -> CliResult<i32> {
    let rules = RuleSet::new(cfg.n, cfg.qmode.clone())?;
    let ctx = ExprContext::new(cfg.n, cfg.gaussian);
    let image = project_to_circle(&parse_poly(expr, &ctx)?, &rules)?;
    match out {
        OutputMode::Text => emit(&image.to_string())?,
        OutputMode::Json => print_json(&CircleDto {
            input: expr.to_string(),
            text: image.to_string(),
            image: LaurentDto::from_core(&image),
        })?,
    }
    Ok(0)
}

fn cmd_unitary(cfg: &RunConfig, out: OutputMode, expr: &str) -> CliResult<i32> {
    let a = LaurentPoly::parse(expr, cfg.gaussian)?;
    let verdict = is_unitary_laurent(&a);
    let defect = unitary_defect(&a);
    let unitary = matches!(
        verdict,
        qsphere_core::quotients::UnitaryVerdict::Unitary { .. }
    );
    match out {
        OutputMode::Text => match &verdict {
            qsphere_core::quotients::UnitaryVerdict::Unitary { lambda, exponent } => {
                emit(&format!("unitary: lambda = {lambda}, exponent = {exponent}"))?
            }
            qsphere_core::quotients::UnitaryVerdict::NotUnitary { exponent, coeff } => {
                emit(&format!(
                    "not unitary: witness coefficient {coeff} at exponent {exponent} \
                     (a a* - 1 = {defect})"
                ))?
            }
        },
        OutputMode::Json => print_json(&unitary_to_dto(expr, &verdict, &defect))?,
    }
    Ok(if unitary { 0 } else { EXIT_VERDICT })
}

fn read_hom_spec(path: &Path) -> CliResult<qsphere_core::quotients::HomSpec> {
    let text = std::fs::read_to_string(path)?;
    let dto: HomSpecDto = serde_json::from_str(&text)?;
    dto.to_core()
}

fn cmd_check_hom(cfg: &RunConfig, out: OutputMode, spec_path: &Path) -> CliResult<i32> {
    let _ = cfg;
    let spec = read_hom_spec(spec_path)?;
    let verdict = check_homomorphism(&spec)?;
    match out {
        OutputMode::Text => match &verdict {
            HomVerdict::Holds => emit("homomorphism check: holds")?,
            HomVerdict::Violated(vs) => {
                let mut lines =
                    vec![format!("homomorphism check: {} relation(s) violated", vs.len())];
                for v in vs {
                    lines.push(format!("  {}: residue {}", v.relation, v.residue));
                }
                emit(&lines.join("\n"))?;
            }
        },
        OutputMode::Json => print_json(&hom_verdict_to_dto(&verdict))?,
    }
    Ok(if verdict.holds() { 0 } else { EXIT_VERDICT })
}

fn parse_case(s: &str) -> CliResult<DescentCase> {
    match s {
        "alpha" | "A" | "a" => Ok(DescentCase::Alpha),
        "alpha-star" | "B" | "b" => Ok(DescentCase::AlphaStar),
        other => Err(CliError::Usage(format!(
            "unknown case {other:?}: expected \"alpha\"/\"A\" or \"alpha-star\"/\"B\""
        ))),
    }
}

fn descent_outcome_text(outcome: &DescentOutcome) -> String {
    let mut lines = Vec::new();
    for step in outcome.steps() {
        let conds: Vec<String> = step
            .conditions
            .iter()
            .map(|c| {
                format!(
                    "e({},{},{}) factor {}",
                    c.term.j,
                    c.term.k,
                    c.term.l,
                    rat_text(&c.factor)
                )
            })
            .collect();
        lines.push(format!(
            "level {}: [{}] {}",
            step.m,
            conds.join(", "),
            if step.forced_zero {
                "slice forced to zero"
            } else {
                "zero factor, not forced"
            }
        ));
    }
    match outcome {
        DescentOutcome::ZeroCertificate {
            residual,
            fully_annihilated,
            ..
        } => {
            if *fully_annihilated {
                lines.push("zero certificate: support fully annihilated".to_string());
            } else {
                lines.push(format!(
                    "zero certificate with untested residual {residual}"
                ));
            }
        }
        DescentOutcome::Stalled { m, term, .. } => {
            lines.push(format!(
                "stalled at level {m} on e({},{},{})",
                term.j, term.k, term.l
            ));
        }
    }
    lines.join("\n")
}

fn cmd_descent(
    cfg: &RunConfig,
    out: OutputMode,
    q: &str,
    qprime: &str,
    case: &str,
    y_src: &str,
) -> CliResult<i32> {
    let q = parse_rat(q)?;
    let qmode = QMode::Fixed(parse_rat(qprime)?);
    let case = parse_case(case)?;
    let y = BasisVector::parse(y_src, qmode, cfg.gaussian)?;
    let outcome = run_descent(&y, &q, case, cfg.depth)?;
    let certified = matches!(outcome, DescentOutcome::ZeroCertificate { .. });
    match out {
        OutputMode::Text => emit(&descent_outcome_text(&outcome))?,
        OutputMode::Json => print_json(&DescentRunDto {
            q: rat_text(&q),
            qprime: qprime.trim().to_string(),
            case: case_text(case),
            depth: cfg.depth,
            input: BasisDto::from_core(&y),
            result: descent_outcome_to_dto(&outcome),
        })?,
    }
    Ok(if certified { 0 } else { EXIT_VERDICT })
}

fn generator_verdict_text(v: &GeneratorVerdict) -> String {
    match v {
        GeneratorVerdict::Descent(DescentOutcome::ZeroCertificate {
            fully_annihilated,
            residual,
            steps,
        }) => {
            if *fully_annihilated {
                format!("forced to zero over {} levels", steps.len())
            } else {
                format!("certificate with untested residual {residual}")
            }
        }
        GeneratorVerdict::Descent(DescentOutcome::Stalled { m, term, .. }) => {
            format!("stalled at level {m} on e({},{},{})", term.j, term.k, term.l)
        }
        GeneratorVerdict::CirclePartNonzero { circle_part } => {
            format!("nonzero circle part {circle_part}")
        }
    }
}

fn cmd_obstruct(cfg: &RunConfig, out: OutputMode, spec_path: &Path) -> CliResult<i32> {
    let spec = read_hom_spec(spec_path)?;
    let report = verify_nonvanishing_obstruction(&spec, cfg.depth)?;
    let obstructed = matches!(
        report.conclusion,
        qsphere_core::descent::ObstructionConclusion::Obstructed { .. }
    );
    match out {
        OutputMode::Text => {
            let mut lines = Vec::new();
            match &report.hom {
                HomVerdict::Holds => lines.push("stage 1 - relations: hold".to_string()),
                HomVerdict::Violated(vs) => {
                    lines.push(format!("stage 1 - relations: {} violated", vs.len()));
                    for v in vs {
                        lines.push(format!("  {}: residue {}", v.relation, v.residue));
                    }
                }
            }
            lines.push(format!(
                "stage 2 - parameter power: {}",
                match report.power {
                    Some(m) => format!("q = q'^{m}"),
                    None => "no power relation".to_string(),
                }
            ));
            match &report.decomposition {
                ImageForm::Shift {
                    case,
                    lambda,
                    remainder,
                } => lines.push(format!(
                    "stage 3 - z0 image: unitary shift, case {case}, unit {lambda}, \
                     remainder {remainder}"
                )),
                ImageForm::NotOfForm { circle_part } => lines.push(format!(
                    "stage 3 - z0 image: not a unitary shift (circle part {circle_part})"
                )),
            }
            lines.push(format!("stage 4 - descents to depth {}:", report.depth));
            for d in &report.descents {
                lines.push(format!(
                    "  z{}: {}",
                    d.index,
                    generator_verdict_text(&d.verdict)
                ));
            }
            lines.push(format!("conclusion: {}", report.conclusion));
            emit(&lines.join("\n"))?;
        }
        OutputMode::Json => print_json(&obstruction_to_dto(&report))?,
    }
    Ok(if obstructed { 0 } else { EXIT_VERDICT })
}

fn cmd_verify_lemmas(
    cfg: &RunConfig,
    out: OutputMode,
    n_explicit: bool,
    suite: Option<&str>,
) -> CliResult<i32> {
    let suite_cfg = SuiteConfig {
        qmode: cfg.qmode.clone(),
        // The multi-sphere suites default to arities 1..=3 unless the user
        // narrowed them explicitly.
        arity_max: if n_explicit { cfg.n } else { 3 },
        schema_bound: cfg.schema_bound,
        depth: cfg.depth,
        seed: cfg.seed,
    };
    let reports: Vec<SuiteReport> = match suite {
        Some(name) => vec![run_suite(name, &suite_cfg)?],
        None => run_all(&suite_cfg)?,
    };
    let all_pass = reports.iter().all(|r| !r.failed());
    match out {
        OutputMode::Text => {
            let lines: Vec<String> = reports.iter().map(|r| r.line()).collect();
            emit(&lines.join("\n"))?;
        }
        OutputMode::Json => print_json(&SuiteRunDto {
            reports: reports.iter().map(|r| r.to_dto()).collect(),
            all_pass,
        })?,
    }
    Ok(if all_pass { 0 } else { EXIT_VERDICT })
}
