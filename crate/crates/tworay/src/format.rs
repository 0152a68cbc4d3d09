//! Text, LaTeX and CSV renderings. JSON is [`crate::report::canonical_json`].

use std::fmt::Write as _;

use tworay_core::{EndModel, RestrictedStep};

use crate::report::{Family, LinkReport};
use crate::search::SearchReport;

fn list(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `P(1,1,2)`, or `P^n` when all weights are 1.
fn proj(w: &[i64], latex: bool) -> String {
    let p = if latex { "\\mathbb{P}" } else { "P" };
    if w.iter().all(|&x| x == 1) {
        if latex {
            format!("{}^{{{}}}", p, w.len() - 1)
        } else {
            format!("{}^{}", p, w.len() - 1)
        }
    } else {
        format!("{}({})", p, list(w))
    }
}

fn sub(s: impl std::fmt::Display, latex: bool) -> String {
    if latex {
        format!("_{{{}}}", s)
    } else {
        s.to_string()
    }
}

/// Prose inside a math-mode cell.
fn words(s: &str, latex: bool) -> String {
    if latex {
        format!("\\text{{{}}}", s)
    } else {
        s.to_string()
    }
}

pub fn model_text(m: &EndModel, latex: bool) -> String {
    let sub_in = if latex { "\\subset " } else { " in " };
    match m {
        EndModel::FanoImage { weights, degree: None, .. } => proj(weights, latex),
        EndModel::FanoImage { weights, degree: Some(k), .. } => format!("Y{}{}{}", sub(k, latex), sub_in, proj(weights, latex)),
        EndModel::DpFibration { base_weights, dp_degree: Some(k), .. } => {
            format!("dP{}{}{}", sub(k, latex), words(" fibration over ", latex), proj(base_weights, latex))
        }
        EndModel::DpFibration { base_weights, fiber_weights, fiber_degree, dp_degree: None } => {
            format!("(Y{}{}{}) / {}", sub(fiber_degree, latex), sub_in, proj(fiber_weights, latex), proj(base_weights, latex))
        }
        EndModel::ConicBundle { base_weights, discriminant, .. } => {
            let mut s = format!("{}{}", words("conic bundle over ", latex), proj(base_weights, latex));
            if let Some(d) = discriminant {
                s += &words(&format!(" with discriminant of degree {}", d), latex);
            }
            s
        }
    }
}

pub fn step_text(s: &RestrictedStep, family: Family, latex: bool) -> String {
    let kind = |k: tworay_core::StepKind| words(&format!(" {}", k), latex);
    match s {
        RestrictedStep::Iso { .. } => (if latex { "\\cong" } else { "iso" }).into(),
        RestrictedStep::DisjointFlops { count, local_type, kind: k, .. } => match family {
            Family::Dp2 => format!("{}{}", words(&format!("{} of {} disjoint ", k, count), latex), proj(&[1, 1], latex)),
            Family::Dp3 => {
                let times = if latex { "\\times" } else { "x" };
                format!("{}{}({}){}", count, times, list(local_type), words(&format!(" {}s", k), latex))
            }
        },
        RestrictedStep::EliminatedFlip { local_type, kind: k, .. } => match family {
            Family::Dp2 => words(k.as_str(), latex),
            Family::Dp3 => format!("({}){}", list(local_type), kind(*k)),
        },
        RestrictedStep::ContainsLocus { delta, locus_degree, kind: k, .. } => format!("({};{}){}", list(delta), locus_degree, kind(*k)),
        RestrictedStep::Undetermined { reason } => words(&format!("undetermined: {}", reason), latex),
    }
}

fn cells(r: &LinkReport, latex: bool) -> [String; 4] {
    let na = || "n/a".to_string();
    let psi = |i: usize| r.restricted_steps.get(i).map(|s| step_text(s, r.family, latex)).unwrap_or_else(na);
    let (phi, model) = match &r.end_model {
        Some(m) => ((if m.is_fibration() { "fibration" } else { "contraction" }).to_string(), model_text(m, latex)),
        None => (na(), na()),
    };
    [psi(0), psi(1), phi, model]
}

/// A readable multi-line account of one input.
pub fn report_text(r: &LinkReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", r.family, r.params);
    if let Some(nf) = &r.normal_form {
        let _ = writeln!(s, "  normal form {:?} (a,b,c;e) = ({},{},{};{}) shift {}", nf.kind, nf.a, nf.b, nf.c, nf.e, nf.shift);
    }
    let vars: Vec<String> = r.bundle.variables.iter().map(|v| format!("{}{}", v.name, v.weight)).collect();
    let _ = writeln!(s, "  variables {}", vars.join(" "));
    let _ = writeln!(s, "  class {}  -K_X {}", r.bundle.class, r.bundle.anticanonical);
    let p = &r.polygon;
    let _ = write!(s, "  polygon {} classes, {} monomials", p.size, p.full_size);
    if let Some(k) = p.t2_coefficient_degree {
        let _ = write!(s, ", t^2 coefficient of degree {}", k);
    }
    let _ = writeln!(s);
    for (i, a) in r.ambient_steps.iter().enumerate() {
        let _ = writeln!(s, "  ambient {}: wall {} crossing {} type ({}) {}", i + 1, a.wall, a.crossing.join(""), list(&a.delta), a.kind);
    }
    for (i, st) in r.restricted_steps.iter().enumerate() {
        let extra = match st {
            RestrictedStep::Iso { witness } => format!(" via {}", witness),
            RestrictedStep::EliminatedFlip { eliminated_var, witness, .. } => format!(" eliminating {} via {}", eliminated_var, witness),
            _ => String::new(),
        };
        let _ = writeln!(s, "  psi{}: {}{}", i + 1, step_text(st, r.family, false), extra);
    }
    if let Some(m) = &r.end_model {
        let _ = writeln!(s, "  end: {}", model_text(m, false));
    }
    if let Some(n) = r.sing {
        let _ = writeln!(s, "  1/2(1,1,1) points: {}", n);
    }
    let _ = write!(s, "  verdict: {}", r.verdict.kind);
    if let Some(d) = &r.verdict.detail {
        let _ = write!(s, " ({})", d);
    }
    let _ = writeln!(s);
    for a in &r.anomalies {
        let _ = writeln!(s, "  anomaly: {}", a);
    }
    s
}

pub fn search_text(rep: &SearchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} search over {} inputs: {} links", rep.family, rep.inputs, rep.links.len());
    for (i, r) in rep.links.iter().enumerate() {
        let c = cells(r, false);
        let _ = writeln!(s, "{:>3}  {:<16} {} | {} | {} | {}", i + 1, r.params.to_string(), c[0], c[1], c[2], c[3]);
    }
    let _ = writeln!(s, "rejected:");
    for (tag, n) in &rep.rejected {
        let _ = writeln!(s, "  {:<40} {}", tag, n);
    }
    for p in &rep.undetermined {
        let _ = writeln!(s, "undetermined {}", p);
    }
    if rep.paper_strict {
        let _ = writeln!(s, "anomalies: {}", rep.anomalies.len());
        for a in &rep.anomalies {
            let c = cells(&a.report, false);
            let _ = writeln!(s, "  {:<16} {} | {} | {} | {}", a.params.to_string(), c[0], c[1], c[2], c[3]);
        }
    }
    s
}

/// One `array` environment with the columns No., params, ψ₁, ψ₂, φ′ and new
/// model.
pub fn search_latex(rep: &SearchReport) -> String {
    let mut s = String::new();
    let label = if rep.family == Family::Dp2 { "(\\alpha,\\beta,\\gamma,\\delta;e)" } else { "(a,b,c;d)" };
    let _ = writeln!(s, "\\[\\begin{{array}}{{cc||c|c|c|c}}");
    let _ = writeln!(s, "\\text{{No.}}&{}&\\psi_1&\\psi_2&\\varphi^\\prime&\\text{{new model}}\\\\", label);
    let _ = writeln!(s, "\\hline\n\\hline");
    for (i, r) in rep.links.iter().enumerate() {
        let c = cells(r, true).map(|x| if x.contains('\\') { x } else { format!("\\text{{{}}}", x) });
        let _ = writeln!(s, "{}&{}&{}&{}&{}&{}\\\\\n\\hline", i + 1, r.params, c[0], c[1], c[2], c[3]);
    }
    let _ = writeln!(s, "\\end{{array}}\\]");
    s
}

pub fn search_csv(rep: &SearchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["no", "family", "params", "psi1", "psi2", "phi", "model", "anomalies"]);
    let rows = rep.links.iter().chain(rep.anomalies.iter().map(|a| &a.report));
    for (i, r) in rows.enumerate() {
        let c = cells(r, false);
        let no = (i + 1).to_string();
        let fam = r.family.to_string();
        let params = r.params.to_string();
        let an = r.anomalies.join(";");
        let _ = w.write_record([&no, &fam, &params, &c[0], &c[1], &c[2], &c[3], &an]);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}
