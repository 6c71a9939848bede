//! One function per subcommand: parameters in, deterministic payload out.

use std::fmt::Write as _;

use exactla::{modular_check, ChainComplex, ExactlaError};
use koszul_core::brauer::FiniteSetObject;
use koszul_core::graphcx::{build_complex, transfer_check, GraphError, GraphFamily, Variant};
use koszul_core::harrison::{hcom_species, koszul_report, relative_hcom, HarrisonError, HcomTable};
use koszul_core::realize::{realize_dims, RealizeError};
use koszul_core::repchar::{decompose, format_decomposition, parse_expr, weyl_dimension, GroupType, RepcharError};
use koszul_core::species::{basis, Species};
use koszul_core::torelli::{johnson_tau, TorelliError, TorelliPresentation};
use koszul_core::verify::{render, verify_all, Profile};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("{what} = {value} exceeds the guard {limit}; pass --force to lift it")]
    Guard {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("{0}; pass --force to lift the guard")]
    LibraryGuard(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    /// A property the computation asserts internally did not hold.
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error("{0}")]
    Compute(String),
}

impl JobError {
    /// Usage and guard errors exit with 2, everything else with 1.
    pub fn is_usage(&self) -> bool {
        matches!(self, Self::Guard { .. } | Self::LibraryGuard(_) | Self::Invalid(_))
    }
}

impl From<ExactlaError> for JobError {
    fn from(e: ExactlaError) -> Self {
        Self::Compute(e.to_string())
    }
}

impl From<serde_json::Error> for JobError {
    fn from(e: serde_json::Error) -> Self {
        Self::Compute(e.to_string())
    }
}

impl From<RepcharError> for JobError {
    fn from(e: RepcharError) -> Self {
        match e {
            RepcharError::Parse { .. } | RepcharError::TooLong(..) | RepcharError::NotAPartition(_) => {
                Self::Invalid(e.to_string())
            }
            e => Self::Compute(e.to_string()),
        }
    }
}

impl From<GraphError> for JobError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::TooLarge(_) => Self::LibraryGuard(e.to_string()),
            e => Self::Compute(e.to_string()),
        }
    }
}

impl From<HarrisonError> for JobError {
    fn from(e: HarrisonError) -> Self {
        match e {
            HarrisonError::TooLarge { .. } => Self::LibraryGuard(e.to_string()),
            e => Self::Compute(e.to_string()),
        }
    }
}

impl From<RealizeError> for JobError {
    fn from(e: RealizeError) -> Self {
        match e {
            RealizeError::TooLarge { .. } => Self::LibraryGuard(e.to_string()),
            RealizeError::ZeroGenus => Self::Invalid(e.to_string()),
            e => Self::Compute(e.to_string()),
        }
    }
}

impl From<TorelliError> for JobError {
    fn from(e: TorelliError) -> Self {
        match e {
            TorelliError::TooLarge { .. } => Self::LibraryGuard(e.to_string()),
            TorelliError::GenusTooSmall { .. } | TorelliError::WeightOutOfRange(_) => Self::Invalid(e.to_string()),
            TorelliError::TauNotWellDefined(_) => Self::Invariant(e.to_string()),
            TorelliError::Realize(e) => e.into(),
            e => Self::Compute(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, JobError>;

/// Checks recorded beside the payload. `None` means not applicable.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub d_squared_zero: Option<bool>,
    pub modular_check: Option<bool>,
    /// The invariant the subcommand exists to test, when it has one.
    pub invariants: Option<bool>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        [self.d_squared_zero, self.modular_check, self.invariants]
            .iter()
            .all(|f| f.unwrap_or(true))
    }
}

#[derive(Serialize, Deserialize)]
pub struct Output {
    pub payload: Value,
    pub verification: Verification,
    /// Tab-separated table for `--tsv`.
    pub tsv: String,
    /// Human summary for the terminal.
    pub text: String,
}

pub fn guard(what: &'static str, value: usize, limit: usize, force: bool) -> Result<()> {
    if value > limit && !force {
        return Err(JobError::Guard { what, value, limit });
    }
    Ok(())
}

pub fn parse_species(text: &str) -> Result<Species> {
    match text {
        "z1" => Ok(Species::z(1)),
        "z2" => Ok(Species::z(2)),
        "e1" => Ok(Species::e(1)),
        "e2" => Ok(Species::e(2)),
        "e1k" => Ok(Species::e_mod_kappa2()),
        other => Err(JobError::Invalid(format!(
            "species {other:?} (expected z1, z2, e1, e2 or e1k)"
        ))),
    }
}

pub fn parse_variant(text: &str) -> Result<Variant> {
    match text {
        "z" => Ok(Variant::Z),
        "e" => Ok(Variant::E),
        other => Err(JobError::Invalid(format!("variant {other:?} (expected z or e)"))),
    }
}

pub fn parse_family(text: &str) -> Result<GraphFamily> {
    match text {
        "rb" => Ok(GraphFamily::Rb),
        "rb-conn" => Ok(GraphFamily::RbConn),
        "g" => Ok(GraphFamily::G),
        other => Err(JobError::Invalid(format!(
            "family {other:?} (expected rb, rb-conn or g)"
        ))),
    }
}

pub fn parse_group(text: &str) -> Result<GroupType> {
    match text {
        "sp" => Ok(GroupType::Sp),
        "o" => Ok(GroupType::O),
        other => Err(JobError::Invalid(format!("group {other:?} (expected sp or o)"))),
    }
}

/// `d²`, then ranks modulo each prime against the rational ranks.
fn check_complex(cx: &ChainComplex, primes: &[u64], v: &mut Verification) -> Result<()> {
    let square_zero = cx.check_square_zero().is_ok();
    v.d_squared_zero = Some(v.d_squared_zero.unwrap_or(true) && square_zero);
    if !primes.is_empty() {
        let mut ok = true;
        for k in cx.degrees() {
            let d = cx.differential(k);
            if d.is_zero() {
                continue;
            }
            let r = modular_check(&d, primes)?;
            ok &= r.consistent && r.confirmed;
        }
        v.modular_check = Some(v.modular_check.unwrap_or(true) && ok);
    }
    Ok(())
}

pub struct GraphJob {
    pub family: GraphFamily,
    pub variant: Variant,
    pub n: u32,
    pub legs: usize,
    pub min_w: u32,
    pub max_w: u32,
}

pub const MAX_LEGS: usize = 6;
pub const MAX_GRAPH_WEIGHT: usize = 6;

pub fn graph_homology(job: &GraphJob, primes: &[u64], force: bool) -> Result<Output> {
    guard("legs", job.legs, MAX_LEGS, force)?;
    guard("weight", job.max_w as usize, MAX_GRAPH_WEIGHT, force)?;
    let set = FiniteSetObject::range(job.legs);
    let mut v = Verification::default();
    let mut cells = Vec::new();
    let mut resolution_ok = true;
    let mut vanishing_ok = true;
    let mut tsv = String::from("p\tq\tw\tdim\n");
    for w in job.min_w..=job.max_w {
        let gc = build_complex(job.family, job.variant, job.n, &set, w)?;
        check_complex(&gc.complex, primes, &mut v)?;
        let qd = gc.q();
        let by_p = gc.homology_by_p()?;
        for (p, dim) in &by_p {
            cells.push(json!({"p": p, "q": qd, "w": w, "dim": dim}));
            writeln!(tsv, "{p}\t{qd}\t{w}\t{dim}").expect("write to String");
            if job.family == GraphFamily::G && *dim > 0 {
                let n = i64::from(job.n);
                let vanishes = if job.legs > 0 { n * (p + 1) < qd } else { n * p < qd };
                vanishing_ok &= !vanishes;
            }
        }
        if job.family == GraphFamily::Rb && job.n == 1 {
            let sp = match job.variant {
                Variant::Z => Species::z(1),
                Variant::E => Species::e(1),
            };
            let total: usize = by_p.values().sum();
            let top = by_p.get(&1).copied().unwrap_or(0);
            resolution_ok &= total == top && top == basis(&sp, &set, w).len();
        }
    }
    let mut payload = json!({
        "family": format!("{:?}", job.family),
        "variant": format!("{:?}", job.variant),
        "n": job.n,
        "legs": job.legs,
        "cells": cells,
    });
    match job.family {
        GraphFamily::G => {
            payload["vanishing_ranges_hold"] = json!(vanishing_ok);
            v.invariants = Some(vanishing_ok);
        }
        GraphFamily::Rb if job.n == 1 => {
            payload["resolves_species"] = json!(resolution_ok);
            v.invariants = Some(resolution_ok);
        }
        _ => {}
    }
    let text = format!(
        "{} homology cells; verification {:?}",
        payload["cells"].as_array().map_or(0, Vec::len),
        v
    );
    Ok(Output {
        payload,
        verification: v,
        tsv,
        text,
    })
}

pub const MAX_HARRISON_LEGS: usize = 4;
pub const MAX_HARRISON_WEIGHT: usize = 4;

fn table_tsv(tables: &[HcomTable]) -> String {
    let mut tsv = String::from("family\tS\tp\tq\tw\tdim\n");
    for t in tables {
        let set: Vec<String> = t.set.iter().map(ToString::to_string).collect();
        for c in &t.cells {
            writeln!(
                tsv,
                "{}\t{}\t{}\t{}\t{}\t{}",
                t.family,
                set.join(","),
                c.p,
                c.q,
                c.w,
                c.dim
            )
            .expect("write to String");
        }
    }
    tsv
}

pub fn harrison(species: &str, legs: usize, max_w: u32, relative: bool, force: bool) -> Result<Output> {
    guard("legs", legs, MAX_HARRISON_LEGS, force)?;
    guard("weight", max_w as usize, MAX_HARRISON_WEIGHT, force)?;
    let set = FiniteSetObject::range(legs);
    let table = if relative {
        if species != "z1" && species != "z2" {
            return Err(JobError::Invalid(
                "--relative compares Z_n with E_n; pass z1 or z2".into(),
            ));
        }
        let n = if species == "z1" { 1 } else { 2 };
        relative_hcom(n, &set, max_w)?
    } else {
        hcom_species(&parse_species(species)?, &set, max_w)?
    };
    let tsv = table_tsv(std::slice::from_ref(&table));
    let text = format!("{} nonzero cells", table.cells.len());
    let v = Verification {
        d_squared_zero: Some(true),
        ..Default::default()
    };
    Ok(Output {
        payload: serde_json::to_value(&table)?,
        verification: v,
        tsv,
        text,
    })
}

pub fn koszul_check(species: &[String], max_legs: usize, max_w: u32, force: bool) -> Result<Output> {
    guard("legs", max_legs, MAX_HARRISON_LEGS, force)?;
    guard("weight", max_w as usize, MAX_HARRISON_WEIGHT, force)?;
    let mut tables = Vec::new();
    for name in species {
        let sp = parse_species(name)?;
        for s in 0..=max_legs {
            tables.push(hcom_species(&sp, &FiniteSetObject::range(s), max_w)?);
        }
    }
    let off = koszul_report(&tables, max_w);
    let diagonal = off.is_empty();
    let payload = json!({
        "species": species,
        "max_legs": max_legs,
        "max_w": max_w,
        "diagonal": diagonal,
        "off_diagonal": serde_json::to_value(&off)?,
        "tables": serde_json::to_value(&tables)?,
    });
    let text = if diagonal {
        "Koszul on the window: every nonzero cell has p = w".to_string()
    } else {
        format!("{} off-diagonal cells", off.len())
    };
    let v = Verification {
        d_squared_zero: Some(true),
        modular_check: None,
        invariants: Some(diagonal),
    };
    Ok(Output {
        payload,
        verification: v,
        tsv: table_tsv(&tables),
        text,
    })
}

pub const MAX_DECOMPOSE_GENUS: usize = 12;

pub fn decompose_expr(expr: &str, g: usize, group: GroupType, force: bool) -> Result<Output> {
    guard("g", g, MAX_DECOMPOSE_GENUS, force)?;
    let e = parse_expr(expr)?;
    let ch = e.evaluate(g, group)?;
    let parts = decompose(&ch, group)?;
    let mut tsv = String::from("label\tmultiplicity\tdim\n");
    let mut items = Vec::new();
    for (label, m) in &parts {
        let d = weyl_dimension(label, g, group)?;
        writeln!(tsv, "{label}\t{m}\t{d}").expect("write to String");
        items.push(json!({"label": label.to_string(), "multiplicity": m, "dim": d}));
    }
    let text = format_decomposition(&parts);
    let payload = json!({
        "expr": e.to_string(),
        "g": g,
        "type": group.to_string(),
        "dim": ch.dim(),
        "decomposition": text,
        "summands": items,
    });
    Ok(Output {
        payload,
        verification: Verification::default(),
        tsv,
        text,
    })
}

pub const MAX_REALIZE_GENUS: usize = 6;
pub const MAX_REALIZE_WEIGHT: usize = 3;

pub fn realize(species: &str, g: usize, max_w: u32, force: bool) -> Result<Output> {
    guard("g", g, MAX_REALIZE_GENUS, force)?;
    guard("weight", max_w as usize, MAX_REALIZE_WEIGHT, force)?;
    let sp = parse_species(species)?;
    let (report, reals) = realize_dims(&sp, g, max_w)?;
    let mut payload = serde_json::to_value(&report)?;
    let mut decompositions = Vec::new();
    for r in &reals {
        decompositions.push(format_decomposition(&r.decomposition()?));
    }
    payload["decompositions"] = json!(decompositions);
    let mut tsv = String::from("deg\tw\tdim\n");
    for d in payload["dims"].as_array().into_iter().flatten() {
        writeln!(tsv, "{}\t{}\t{}", d["deg"], d["w"], d["dim"]).expect("write to String");
    }
    Ok(Output {
        payload,
        verification: Verification::default(),
        tsv,
        text: report.to_string(),
    })
}

pub const MAX_TORELLI_GENUS: usize = 8;

pub fn torelli(g: usize, max_w: usize, force: bool) -> Result<Output> {
    guard("g", g, MAX_TORELLI_GENUS, force)?;
    let p = TorelliPresentation::build(g)?;
    let report = johnson_tau(&p, max_w, force)?;
    let weights: Vec<Value> = report
        .weights
        .iter()
        .map(|t| {
            json!({
                "w": t.w,
                "dim_t": t.dim_t,
                "dim_h": t.dim_h,
                "dim_ker": t.dim_ker,
                "ker_trivial": t.ker_trivial,
                "ker_central": t.ker_central,
            })
        })
        .collect();
    let mut tsv = String::from("w\tdim_t\tdim_h\tdim_ker\tker_trivial\tker_central\tker\n");
    let mut text = String::new();
    for t in &report.weights {
        let central = t.ker_central.map_or("n/a".to_string(), |c| c.to_string());
        writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.w, t.dim_t, t.dim_h, t.dim_ker, t.ker_trivial, central, t.ker_decomposition
        )
        .expect("write to String");
        writeln!(
            text,
            "weight {}: dim {} → {}, kernel {} ({})",
            t.w, t.dim_t, t.dim_h, t.dim_ker, t.ker_decomposition
        )
        .expect("write to String");
    }
    text.push_str(&format!(
        "stable expectation (not checked): {}",
        report.stable_expectation
    ));
    let payload = json!({
        "g": g,
        "weights": weights,
        "stable_expectation": report.stable_expectation,
    });
    // τ(R^⊥) = 0 is asserted inside johnson_tau; reaching here means it held.
    let v = Verification {
        invariants: Some(true),
        ..Default::default()
    };
    Ok(Output {
        payload,
        verification: v,
        tsv,
        text,
    })
}

pub fn transfer(n: u32, max_q: u32, force: bool) -> Result<Output> {
    if n == 0 {
        return Err(JobError::Invalid("--n must be positive".into()));
    }
    let max_w = max_q / n;
    guard("weight", max_w as usize, MAX_GRAPH_WEIGHT, force)?;
    let mut rows = Vec::new();
    let mut tsv = String::from("variant\tq\tgenerators\tclasses\tinjected\tpassed\n");
    let mut pi_t = true;
    let mut chain = true;
    let mut injective = true;
    for variant in [Variant::Z, Variant::E] {
        for w in 1..=max_w {
            let t = transfer_check(variant, n, w)?;
            pi_t &= t.pi_t_failures == 0;
            chain &= t.t_chain_failures == 0 && t.pi_chain_failures == 0;
            injective &= t.injected == t.classes;
            writeln!(
                tsv,
                "{:?}\t{}\t{}\t{}\t{}\t{}",
                variant,
                t.q,
                t.generators,
                t.classes,
                t.injected,
                t.passed()
            )
            .expect("write to String");
            rows.push(serde_json::to_value(&t)?);
        }
    }
    let status = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let text = format!(
        "π∘t = q·id: {}\nt, π chain maps: {}\nt injective on homology: {}",
        status(pi_t),
        status(chain),
        status(injective)
    );
    let payload =
        json!({"n": n, "max_q": max_q, "checks": rows, "pi_t": pi_t, "chain_maps": chain, "injective": injective});
    let v = Verification {
        invariants: Some(pi_t && chain && injective),
        ..Default::default()
    };
    Ok(Output {
        payload,
        verification: v,
        tsv,
        text,
    })
}

pub fn verify(profile: Profile) -> Result<Output> {
    let outcomes = verify_all(profile);
    let all = outcomes.iter().all(|o| o.passed);
    let mut tsv = String::from("id\tpassed\tchecks\telapsed_secs\ttitle\n");
    for o in &outcomes {
        writeln!(
            tsv,
            "{}\t{}\t{}\t{:.1}\t{}",
            o.id, o.passed, o.checks, o.elapsed_secs, o.title
        )
        .expect("write to String");
    }
    // Timings live in the text and TSV only, so the payload stays deterministic.
    let criteria: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({"id": o.id, "title": o.title, "passed": o.passed, "checks": o.checks, "failures": o.failures, "notes": o.notes}))
        .collect();
    let payload = json!({"profile": profile, "passed": all, "criteria": criteria});
    let v = Verification {
        invariants: Some(all),
        ..Default::default()
    };
    Ok(Output {
        payload,
        verification: v,
        tsv,
        text: render(&outcomes),
    })
}
