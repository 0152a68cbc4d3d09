//! Grid search over either family, optionally on a rayon pool.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tworay_core::classify::dp2_grid;
use tworay_core::dp3::dp3_grid;
use tworay_core::{analyze_dp2, analyze_dp3, Dp2Bounds, Dp3Bounds};

use crate::error::{usage, CliError};
use crate::fixtures::{annotate, Reference};
use crate::report::{Family, LinkReport, Params, SCHEMA};

const MAX_WEIGHT: i64 = 64;
const MAX_DEGREE: i64 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bounds {
    Dp2(Dp2Bounds),
    Dp3(Dp3Bounds),
}

impl Bounds {
    pub fn default_for(family: Family) -> Bounds {
        match family {
            Family::Dp2 => Bounds::Dp2(Dp2Bounds::default()),
            Family::Dp3 => Bounds::Dp3(Dp3Bounds::default()),
        }
    }
}

/// Parses `key<=N` / `key>=N` clauses separated by commas, applied over the
/// family defaults.
///
/// dP2 keys: `w<=` (each of α,β,γ,δ), `e>=`, `e<=`, and `n<=N` meaning
/// `w<=N, e>=-4, e<=2N`. dP3 keys: `c<=`, `d>=`, `d<=`, and `n<=N` meaning
/// `c<=N, d>=-N, d<=3`.
pub fn parse_bounds(family: Family, spec: &str) -> Result<Bounds, CliError> {
    let mut b = Bounds::default_for(family);
    for clause in spec.split(',').map(str::trim).filter(|c| !c.is_empty()) {
        let (key, le, num) = if let Some((k, n)) = clause.split_once("<=") {
            (k.trim(), true, n.trim())
        } else if let Some((k, n)) = clause.split_once(">=") {
            (k.trim(), false, n.trim())
        } else {
            return Err(usage(format!("bound `{}`: expected key<=N or key>=N", clause)));
        };
        let n: i64 = num.parse().map_err(|_| usage(format!("bound `{}`: `{}` is not an integer", clause, num)))?;
        let bad = || usage(format!("bound `{}` is not understood for {}", clause, family));
        match (&mut b, key, le) {
            (Bounds::Dp2(x), "w", true) => x.w_max = n,
            (Bounds::Dp2(x), "e", true) => x.e_max = n,
            (Bounds::Dp2(x), "e", false) => x.e_min = n,
            (Bounds::Dp2(x), "n", true) => *x = Dp2Bounds { w_max: n, e_min: -4, e_max: 2 * n },
            (Bounds::Dp3(x), "c", true) => x.c_max = n,
            (Bounds::Dp3(x), "d", true) => x.d_max = n,
            (Bounds::Dp3(x), "d", false) => x.d_min = n,
            (Bounds::Dp3(x), "n", true) => *x = Dp3Bounds { c_max: n, d_min: -n, d_max: 3 },
            _ => return Err(bad()),
        }
    }
    let (w, lo, hi) = match b {
        Bounds::Dp2(x) => (x.w_max, x.e_min, x.e_max),
        Bounds::Dp3(x) => (x.c_max, x.d_min, x.d_max),
    };
    if w > MAX_WEIGHT || lo.abs() > MAX_DEGREE || hi.abs() > MAX_DEGREE {
        return Err(usage(format!("bounds exceed |weight| <= {} or |degree| <= {}", MAX_WEIGHT, MAX_DEGREE)));
    }
    Ok(b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anomaly {
    pub params: Params,
    pub reason: String,
    pub report: LinkReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema: String,
    pub family: Family,
    pub bounds: Bounds,
    pub inputs: usize,
    pub links: Vec<LinkReport>,
    /// Count of non-link inputs per verdict tag.
    pub rejected: BTreeMap<String, usize>,
    pub undetermined: Vec<Params>,
    pub paper_strict: bool,
    pub anomalies: Vec<Anomaly>,
}

enum Outcome {
    Link(Box<LinkReport>),
    Rejected(String, Option<Params>),
}

fn dp2_one(w: [i64; 4], e: i64) -> Outcome {
    let a = analyze_dp2(w, e).expect("grid inputs are normalised");
    if a.verdict.is_link() {
        Outcome::Link(Box::new(LinkReport::from_dp2(&a)))
    } else {
        let und = matches!(a.verdict, tworay_core::Verdict::Undetermined { .. }).then(|| Params::dp2(w, e));
        Outcome::Rejected(a.verdict.tag(), und)
    }
}

fn dp3_one(p: tworay_core::DP3Params) -> Outcome {
    let a = analyze_dp3(p);
    if a.verdict.is_link() {
        Outcome::Link(Box::new(LinkReport::from_dp3(&a)))
    } else {
        let und = matches!(a.verdict, tworay_core::Verdict::Undetermined { .. }).then(|| Params::dp3(p.a, p.b, p.c, p.d));
        Outcome::Rejected(a.verdict.tag(), und)
    }
}

/// Classifies the whole grid. Results come back in grid order whatever the
/// number of workers.
pub fn run(bounds: Bounds, jobs: usize) -> Result<SearchReport, CliError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| usage(format!("--jobs: {}", e)))?;
    let (family, outcomes, inputs) = match bounds {
        Bounds::Dp2(b) => {
            let grid = dp2_grid(&b);
            let out: Vec<Outcome> = pool.install(|| grid.par_iter().map(|&(w, e)| dp2_one(w, e)).collect());
            (Family::Dp2, out, grid.len())
        }
        Bounds::Dp3(b) => {
            let grid = dp3_grid(&b);
            let out: Vec<Outcome> = pool.install(|| grid.par_iter().map(|&p| dp3_one(p)).collect());
            (Family::Dp3, out, grid.len())
        }
    };
    let mut rep = SearchReport {
        schema: SCHEMA.into(),
        family,
        bounds,
        inputs,
        links: Vec::new(),
        rejected: BTreeMap::new(),
        undetermined: Vec::new(),
        paper_strict: false,
        anomalies: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Link(r) => rep.links.push(*r),
            Outcome::Rejected(tag, und) => {
                *rep.rejected.entry(tag).or_default() += 1;
                rep.undetermined.extend(und);
            }
        }
    }
    Ok(rep)
}

/// Flags every link against the tables and moves the ones absent from them
/// into the anomaly section.
pub fn apply_paper_strict(rep: &mut SearchReport, reference: &Reference) {
    rep.paper_strict = true;
    let mut kept = Vec::new();
    for mut r in std::mem::take(&mut rep.links) {
        annotate(reference, &mut r);
        if reference.find(&r.params).is_some() {
            kept.push(r);
        } else {
            rep.anomalies.push(Anomaly { params: r.params.clone(), reason: "passes every screen but is absent from the reference table".into(), report: r });
        }
    }
    rep.links = kept;
}
