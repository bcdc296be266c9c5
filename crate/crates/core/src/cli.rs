//! Command-line front end. [`run`] is pure: it returns the exit code and
//! both output streams, and `main` only prints them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::addpoly::AdditivePoly;
use crate::cokernel::{self, certify_infinite_cokernel, CokernelError, OracleResult, Verdict};
use crate::edim::{self, EdimError, FieldContext, GroupProfile, UnipotentProfile};
use crate::field_tower::{ParseError, Tower, TowerElement};
use crate::pgroup::{self, FiniteGroup};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "woundcert", version, about = "Certificates for cokernels of additive polynomials over F_p(t1,..,tr)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separability, principal part and woundness witness of a p-polynomial.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Infinite-cokernel certificate for a p-polynomial.
    Cokernel {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        json: bool,
        /// Take the principal part as nowhere vanishing without checking.
        #[arg(long)]
        assume_nowhere_vanishing: bool,
    },
    /// Brute-force search for a preimage among Laurent polynomials in [-bound, bound].
    Oracle {
        file: PathBuf,
        target: String,
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Frattini subgroup and the finite-group bounds of a p-group.
    Frattini {
        /// `cyclic:27`, `abelian:3,3,9` or `perm:p=2;(1 2)(3 4),(1 3)`.
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// Interval bound on the essential dimension of a group profile.
    Edim(EdimArgs),
    /// Basic data of a tower F_p(vars).
    FieldInfo {
        #[arg(long)]
        p: u32,
        /// Comma-separated variable names, innermost first.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, clap::Args)]
pub struct EdimArgs {
    /// Finite constant p-group, as accepted by `frattini`.
    #[arg(long, conflicts_with_all = ["dim", "split_part_dim", "n", "l", "split", "not_split", "wound", "char_zero", "commutative_p_torsion"])]
    pub group: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub dim: u32,
    #[arg(long, default_value_t = 0)]
    pub split_part_dim: u32,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long, conflicts_with = "not_split")]
    pub split: bool,
    #[arg(long)]
    pub not_split: bool,
    #[arg(long)]
    pub wound: bool,
    #[arg(long)]
    pub char_zero: bool,
    #[arg(long)]
    pub commutative_p_torsion: bool,
    /// The base field is finite.
    #[arg(long)]
    pub finite: bool,
    /// The base field is geometric over a perfect field.
    #[arg(long)]
    pub geometric: bool,
    /// Characteristic of a concrete tower base field.
    #[arg(long)]
    pub p: Option<u32>,
    /// Variables of the tower, comma-separated; empty means F_p.
    #[arg(long, value_delimiter = ',', requires = "p")]
    pub vars: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Outcome { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

/// Parses an element of `tower` in the text grammar.
pub fn parse_element(src: &str, tower: &Tower) -> Result<TowerElement, ParseError> {
    tower.parse(src)
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Analyze { file, json } => analyze(&file, json),
        Command::Cokernel { file, count, json, assume_nowhere_vanishing } => {
            cokernel_cmd(&file, count, json, assume_nowhere_vanishing)
        }
        Command::Oracle { file, target, bound, jobs, json } => oracle(&file, &target, bound, jobs, json),
        Command::Frattini { spec, json } => frattini(&spec, json),
        Command::Edim(args) => edim_cmd(&args),
        Command::FieldInfo { p, vars, json } => field_info(p, &vars, json),
    }
}

fn load(file: &Path) -> Result<AdditivePoly, Outcome> {
    let src =
        std::fs::read_to_string(file).map_err(|e| Outcome::fail(EXIT_INPUT, format!("{}: {e}", file.display())))?;
    AdditivePoly::from_json(&src).map_err(|e| Outcome::fail(EXIT_INPUT, format!("{}: {e}", file.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AnalyzeJson {
    polynomial: String,
    separable: bool,
    principal_part: String,
    d: u32,
    progressions_disjoint: bool,
    s: u64,
    capacity: u64,
    verdict: &'static str,
}

fn analyze(file: &Path, json: bool) -> Outcome {
    let poly = match load(file) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let lead = poly.principal_part();
    let k = poly.tower();
    let (p, m, d) = (k.p() as u64, k.depth() as u32, lead.d());
    let s = lead.terms.iter().map(|t| p.pow(m * (d - t.m))).sum();
    let disjoint = poly.progressions_disjoint();
    let report = AnalyzeJson {
        polynomial: poly.to_string(),
        separable: poly.is_separable(),
        principal_part: poly.principal_poly().to_string(),
        d,
        progressions_disjoint: disjoint,
        s,
        capacity: p.pow(m * d),
        verdict: if disjoint { "wound-witnessed" } else { "woundness-inconclusive" },
    };
    if json {
        return Outcome::ok(to_json(&report));
    }
    let mut out = String::new();
    writeln!(out, "polynomial: {}", report.polynomial).unwrap();
    writeln!(out, "field: {k}").unwrap();
    writeln!(out, "separable: {}", report.separable).unwrap();
    writeln!(out, "principal part: {} (d = {d})", report.principal_part).unwrap();
    writeln!(out, "progressions disjoint: {disjoint}").unwrap();
    writeln!(out, "s = {s}, p^(md) = {}", report.capacity).unwrap();
    writeln!(out, "verdict: {}", report.verdict).unwrap();
    Outcome::ok(out)
}

fn cokernel_cmd(file: &Path, count: usize, json: bool, assume: bool) -> Outcome {
    let poly = match load(file) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let cert = match certify_infinite_cokernel(&poly, count, assume) {
        Ok(c) => c,
        Err(e @ CokernelError::HypothesisUnverified) => return Outcome::fail(EXIT_HYPOTHESIS, e),
        Err(e) => return Outcome::fail(EXIT_INPUT, e),
    };
    let code = match cert.verdict {
        Verdict::InfiniteCokernel => EXIT_OK,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let stdout = if json {
        let mut s = cert.to_json();
        s.push('\n');
        s
    } else {
        let mut out = String::new();
        writeln!(out, "polynomial: {poly}").unwrap();
        writeln!(out, "d = {}, s = {}, p^(md) = {}", cert.dk.d, cert.s, cert.capacity).unwrap();
        for (i, g) in cert.dk.g.iter().enumerate() {
            writeln!(out, "g{} = {g}", i + 1).unwrap();
        }
        writeln!(out, "C0 = {}", cert.c0).unwrap();
        match cert.verdict {
            Verdict::InfiniteCokernel => {
                let ell = cert.missing_residue.as_ref().expect("infinite verdict has a residue");
                writeln!(out, "verdict: infinite cokernel").unwrap();
                writeln!(out, "missing residue: {} mod {}", ell.rep(), ell.modulus()).unwrap();
                for e in &cert.representatives {
                    writeln!(out, "  {e}").unwrap();
                }
            }
            Verdict::Inconclusive => {
                writeln!(out, "verdict: inconclusive (s = p^(md))").unwrap();
                if let Some(div) = cert.divisibility {
                    writeln!(out, "(p^m - 1) | (r - 1): {div}").unwrap();
                }
            }
        }
        out
    };
    Outcome { code, stdout, stderr: String::new() }
}

#[derive(Serialize)]
struct OracleJson {
    target: String,
    bound: u32,
    found: bool,
    witness: Option<Vec<String>>,
}

fn oracle(file: &Path, target: &str, bound: u32, jobs: usize, json: bool) -> Outcome {
    let poly = match load(file) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let target = match parse_element(target, poly.tower()) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("target: {e}")),
    };
    let result = match cokernel::oracle_image_contains(&poly, &target, bound, jobs) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_INPUT, e),
    };
    let witness = match &result {
        OracleResult::Yes(a) => Some(a.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        OracleResult::NoWithinBound => None,
    };
    if json {
        let report = OracleJson { target: target.to_string(), bound, found: witness.is_some(), witness };
        return Outcome::ok(to_json(&report));
    }
    Outcome::ok(match witness {
        Some(w) => format!("{target} = P({})\n", w.join(", ")),
        None => format!("{target} is not P(a) for any a supported in [-{bound}, {bound}]\n"),
    })
}

#[derive(Serialize)]
struct FrattiniJson {
    p: u32,
    order: usize,
    log_order: u32,
    phi_order: usize,
    quotient_rank: u32,
    quotient_elementary: bool,
    phi_order_by_kernels: Option<usize>,
    elementary: bool,
    ledet_bound: u32,
    jly_bound_infinite: u32,
    jly_bound_finite: u32,
    elementary_bound_infinite: Option<u32>,
    elementary_bound_finite: Option<u32>,
    pgl2_lower_bound: u32,
}

fn frattini(spec: &str, json: bool) -> Outcome {
    let report = (|| -> Result<FrattiniJson, pgroup::PGroupError> {
        let g = FiniteGroup::from_spec(spec)?;
        let f = pgroup::frattini(&g)?;
        Ok(FrattiniJson {
            p: g.p(),
            order: g.order(),
            log_order: g.log_order(),
            phi_order: f.phi_order,
            quotient_rank: f.quotient_rank,
            quotient_elementary: f.quotient_elementary,
            phi_order_by_kernels: f.oracle_order,
            elementary: g.is_elementary(),
            ledet_bound: pgroup::ledet_bound(&g),
            jly_bound_infinite: pgroup::jly_bound(&g, false)?,
            jly_bound_finite: pgroup::jly_bound(&g, true)?,
            elementary_bound_infinite: pgroup::elementary_bound(&g, false),
            elementary_bound_finite: pgroup::elementary_bound(&g, true),
            pgl2_lower_bound: pgroup::pgl2_lower_bound(&g),
        })
    })();
    let r = match report {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_INPUT, e),
    };
    if json {
        return Outcome::ok(to_json(&r));
    }
    let opt = |x: Option<u32>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
    let mut out = String::new();
    writeln!(out, "|G| = {} = {}^{}", r.order, r.p, r.log_order).unwrap();
    writeln!(out, "|Phi(G)| = {}, rank of G/Phi(G) = {}", r.phi_order, r.quotient_rank).unwrap();
    if let Some(o) = r.phi_order_by_kernels {
        writeln!(out, "|Phi(G)| via kernels = {o}").unwrap();
    }
    writeln!(out, "ledet bound: {}", r.ledet_bound).unwrap();
    writeln!(out, "jly bound: {} (infinite k), {} (finite k)", r.jly_bound_infinite, r.jly_bound_finite).unwrap();
    writeln!(
        out,
        "elementary bound: {} (infinite k), {} (finite k)",
        opt(r.elementary_bound_infinite),
        opt(r.elementary_bound_finite)
    )
    .unwrap();
    writeln!(out, "lower bound over F_{}: {}", r.p, r.pgl2_lower_bound).unwrap();
    Outcome::ok(out)
}

fn edim_inputs(a: &EdimArgs) -> Result<(GroupProfile, FieldContext), EdimError> {
    let tower = match a.p {
        Some(p) => Some(Tower::new(p, &a.vars).map_err(|e| EdimError::InconsistentProfile(e.to_string()))?),
        None => None,
    };
    let finite = a.finite || tower.as_ref().is_some_and(|t| t.depth() == 0);
    let field = FieldContext { finite, geometric_over_perfect: a.geometric, tower };
    let profile = match &a.group {
        Some(spec) => GroupProfile::FinitePGroup(FiniteGroup::from_spec(spec)?),
        None => GroupProfile::SmoothUnipotent(UnipotentProfile {
            dim: a.dim,
            split_part_dim: a.split_part_dim,
            n: a.n,
            l: a.l,
            is_split: if a.split {
                Some(true)
            } else if a.not_split {
                Some(false)
            } else {
                None
            },
            is_wound_witnessed: a.wound,
            char_zero: a.char_zero,
            commutative_p_torsion: a.commutative_p_torsion,
        }),
    };
    Ok((profile, field))
}

fn edim_cmd(a: &EdimArgs) -> Outcome {
    let report = match edim_inputs(a).and_then(|(g, k)| edim::bound(&g, &k)) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_INPUT, e),
    };
    if a.json {
        let mut s = report.to_json();
        s.push('\n');
        return Outcome::ok(s);
    }
    let upper = report.upper.map_or_else(|| "inf".to_string(), |u| u.to_string());
    let mut out = String::new();
    if report.is_exact() {
        writeln!(out, "ed = {} (exact)", report.lower).unwrap();
    } else {
        writeln!(out, "{} <= ed <= {upper}", report.lower).unwrap();
    }
    for t in &report.trail {
        let mut v = Vec::new();
        if let Some(l) = t.value.lower {
            v.push(format!(">= {l}"));
        }
        if let Some(u) = t.value.upper {
            v.push(format!("<= {u}"));
        }
        writeln!(out, "  {} [{}] {}: {}", t.rule, t.inputs, t.cite, v.join(", ")).unwrap();
    }
    Outcome::ok(out)
}

#[derive(Serialize)]
struct FieldInfoJson {
    field: String,
    p: u32,
    vars: Vec<String>,
    depth: usize,
    /// `[k : k^p]`.
    p_degree: u64,
    value_group_rank: usize,
}

fn field_info(p: u32, vars: &[String], json: bool) -> Outcome {
    let tower = match Tower::new(p, vars) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(EXIT_INPUT, e),
    };
    let r = FieldInfoJson {
        field: tower.to_string(),
        p,
        vars: tower.vars().to_vec(),
        depth: tower.depth(),
        p_degree: (p as u64).pow(tower.depth() as u32),
        value_group_rank: tower.depth(),
    };
    if json {
        return Outcome::ok(to_json(&r));
    }
    Outcome::ok(format!(
        "field: {}\ncharacteristic: {p}\n[k : k^p] = {}\nvalue group: Z^{} (lexicographic, last variable most significant)\n",
        r.field, r.p_degree, r.value_group_rank
    ))
}
