//! Report rendering. JSON goes through `serde_json::Value`, whose maps are
//! ordered, so keys come out sorted; text is plain aligned columns.

use std::fmt::Write as _;

use serde_json::{json, Value};

use scheme_forge::classify::{
    p_polynomial_orderings, ClassificationReport, CrosscheckReport, Verdict, Witness,
};
use scheme_forge::closure::wreath_decompositions;
use scheme_forge::digraph::{profile, Digraph, UNREACHABLE};
use scheme_forge::io::{to_json_string, SCHEMA_VERSION};
use scheme_forge::scheme::{relation_profile, IdentityReport, Scheme, SchemeError};
use scheme_forge::wdrd::{attached_scheme, distance_regular_test, DrdType};

use crate::Format;

fn emit(v: Value) -> String {
    to_json_string(&v)
}

fn pass_fail(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn set_text(set: &[usize]) -> String {
    let inner: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn sets_text(sets: &[Vec<usize>]) -> String {
    if sets.is_empty() {
        return "(none)".into();
    }
    sets.iter()
        .map(|s| set_text(s))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn verify(s: &Scheme, result: &Result<IdentityReport, SchemeError>, format: Format) -> String {
    match format {
        Format::Json => {
            let (checks, violation) = match result {
                Ok(r) => (
                    r.checks
                        .iter()
                        .map(|c| json!({ "identity": c.identity, "instances": c.instances, "status": "PASS" }))
                        .collect(),
                    Value::Null,
                ),
                Err(e) => (Vec::new(), json!(e.to_string())),
            };
            emit(json!({
                "schema_version": SCHEMA_VERSION,
                "scheme": s.name(),
                "size": s.size(),
                "classes": s.d(),
                "valencies": s.valencies(),
                "checks": checks,
                "violation": violation,
                "status": pass_fail(result.is_ok()),
            }))
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "scheme   {}", s.name()).unwrap();
            writeln!(out, "points   {}", s.size()).unwrap();
            writeln!(out, "classes  {}", s.d()).unwrap();
            match result {
                Ok(r) => {
                    writeln!(out, "{:<48} {:>10}  status", "identity", "instances").unwrap();
                    for c in &r.checks {
                        writeln!(out, "{:<48} {:>10}  PASS", c.identity.label(), c.instances)
                            .unwrap();
                    }
                }
                Err(e) => writeln!(out, "violation  {e}").unwrap(),
            }
            writeln!(out, "result   {}", pass_fail(result.is_ok())).unwrap();
            out
        }
    }
}

pub fn analyze_scheme(s: &Scheme, format: Format) -> String {
    let prof = relation_profile(s);
    let orderings = p_polynomial_orderings(s);
    let wreaths: Vec<usize> = wreath_decompositions(s).iter().map(|w| w.a).collect();
    let symmetric: Vec<usize> = (1..=s.d()).filter(|&i| prof.symmetric[i]).collect();
    match format {
        Format::Json => {
            let d = s.d();
            let tensor = (d <= 10).then(|| {
                (0..=d)
                    .map(|i| {
                        (0..=d)
                            .map(|j| (0..=d).map(|h| s.p(i, j, h)).collect::<Vec<_>>())
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            });
            emit(json!({
                "schema_version": SCHEMA_VERSION,
                "scheme": s.name(),
                "size": s.size(),
                "classes": d,
                "valencies": s.valencies(),
                "star": prof.star,
                "symmetric": symmetric,
                "nonsymmetric_pairs": prof.nonsymmetric_pairs,
                "commutative": prof.commutative,
                "p_polynomial_orderings": orderings
                    .iter()
                    .map(|o| json!({ "generator": o.generator, "ordering": o.ordering }))
                    .collect::<Vec<_>>(),
                "wreath_fiber_classes": wreaths,
                "intersection_numbers": tensor,
            }))
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "scheme       {}", s.name()).unwrap();
            writeln!(out, "points       {}", s.size()).unwrap();
            writeln!(out, "classes      {}", s.d()).unwrap();
            writeln!(out, "commutative  {}", prof.commutative).unwrap();
            writeln!(out, "symmetric    {}", set_text(&symmetric)).unwrap();
            let pairs: Vec<String> = prof
                .nonsymmetric_pairs
                .iter()
                .map(|(i, j)| format!("({i},{j})"))
                .collect();
            writeln!(
                out,
                "nonsym pairs {}",
                if pairs.is_empty() {
                    "(none)".into()
                } else {
                    pairs.join(" ")
                }
            )
            .unwrap();
            writeln!(out, "relation  valency  star").unwrap();
            for i in 0..=s.d() {
                writeln!(out, "{i:>8}  {:>7}  {:>4}", s.valency(i), s.star(i)).unwrap();
            }
            for o in &orderings {
                writeln!(
                    out,
                    "P-polynomial via {}: ordering {:?}",
                    o.generator, o.ordering
                )
                .unwrap();
            }
            for a in &wreaths {
                writeln!(out, "wreath product over fibers of {{0,{a}}}").unwrap();
            }
            out
        }
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::NotApplicable { reason } => format!("not applicable: {reason}"),
        Witness::ShapeNotAdmitted => "shape not admitted".into(),
        Witness::PPolynomial { generator, ordering } => {
            format!("P-polynomial: generator {generator}, ordering {ordering:?}")
        }
        Witness::WreathProduct {
            a,
            quotient_generator,
            quotient_ordering,
        } => format!(
            "wreath product over {{0,{a}}}, quotient P-polynomial via {quotient_generator} {quotient_ordering:?}"
        ),
        Witness::WedgeProduct { closed_subset } => {
            format!("wedge product over {}", set_text(closed_subset))
        }
    }
}

fn crosscheck_value(c: &CrosscheckReport) -> Value {
    json!({
        "applicable": c.applicable,
        "classifier": c.classifier,
        "oracle": c.oracle,
        "diff": c.diff,
        "pass": c.pass,
    })
}

pub fn classify(r: &ClassificationReport, cross: &CrosscheckReport, format: Format) -> String {
    match format {
        Format::Json => {
            let candidates: Vec<Value> = r
                .candidates
                .iter()
                .map(|c| {
                    let (verdict, case, witness) = match &c.verdict {
                        Verdict::Admissible { case } => ("admissible", json!(case), Value::Null),
                        Verdict::Excluded { witness } => (
                            "excluded",
                            Value::Null,
                            serde_json::to_value(witness).expect("witness serializes"),
                        ),
                    };
                    json!({ "arcs": c.arcs, "verdict": verdict, "case": case, "witness": witness })
                })
                .collect();
            emit(json!({
                "schema_version": SCHEMA_VERSION,
                "scheme_name": r.scheme_name,
                "labeling": r.labeling,
                "applicable": r.applicable,
                "candidates": candidates,
                "admissible": r.admissible,
                "crosscheck": crosscheck_value(cross),
            }))
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "scheme      {}", r.scheme_name).unwrap();
            let labels: Vec<String> = r.labeling.iter().map(usize::to_string).collect();
            writeln!(
                out,
                "labeling    {}  (canonical index -> original index)",
                labels.join(" ")
            )
            .unwrap();
            if !r.applicable {
                writeln!(out, "classification does not apply").unwrap();
            }
            writeln!(out, "{:<12}{:<12}detail", "candidate", "verdict").unwrap();
            for c in &r.candidates {
                let (verdict, detail) = match &c.verdict {
                    Verdict::Admissible { case } => ("admissible", format!("case {case}")),
                    Verdict::Excluded { witness } => ("excluded", witness_text(witness)),
                };
                writeln!(out, "{:<12}{:<12}{detail}", set_text(&c.arcs), verdict).unwrap();
            }
            writeln!(out, "admissible  {}", sets_text(&r.admissible)).unwrap();
            writeln!(out, "oracle      {}", sets_text(&cross.oracle)).unwrap();
            writeln!(out, "crosscheck  {}", pass_fail(cross.pass)).unwrap();
            out
        }
    }
}

pub fn crosscheck(name: &str, c: &CrosscheckReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut v = crosscheck_value(c);
            v["schema_version"] = json!(SCHEMA_VERSION);
            v["scheme_name"] = json!(name);
            v["labeling"] = json!(c.labeling);
            emit(v)
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "scheme      {name}").unwrap();
            if !c.applicable {
                writeln!(out, "classification does not apply; nothing compared").unwrap();
            }
            writeln!(out, "classifier  {}", sets_text(&c.classifier)).unwrap();
            writeln!(out, "oracle      {}", sets_text(&c.oracle)).unwrap();
            writeln!(out, "diff        {}", sets_text(&c.diff)).unwrap();
            writeln!(out, "result      {}", pass_fail(c.pass)).unwrap();
            out
        }
    }
}

pub fn oracle(s: &Scheme, found: &[Vec<usize>], format: Format) -> String {
    match format {
        Format::Json => emit(json!({
            "schema_version": SCHEMA_VERSION,
            "scheme_name": s.name(),
            "diameter_two_arc_sets": found,
        })),
        Format::Text => format!(
            "scheme      {}\narc sets    {}\n",
            s.name(),
            sets_text(found)
        ),
    }
}

pub fn enumerate(schemes: &[Scheme], format: Format) -> String {
    match format {
        Format::Json => emit(Value::Array(
            schemes
                .iter()
                .map(|s| {
                    json!({
                        "name": s.name(),
                        "size": s.size(),
                        "classes": s.d(),
                        "nonsymmetric_pairs": s.nonsymmetric_pairs().len(),
                        "provenance": s.provenance(),
                    })
                })
                .collect(),
        )),
        Format::Text => {
            let mut out = String::new();
            for s in schemes {
                writeln!(
                    out,
                    "{:<16} n={:<3} d={:<3} nonsym={}  {}",
                    s.name(),
                    s.size(),
                    s.d(),
                    s.nonsymmetric_pairs().len(),
                    s.provenance().unwrap_or("")
                )
                .unwrap();
            }
            out
        }
    }
}

/// Distance data and weak distance-regularity of one digraph.
pub struct DigraphReport {
    size: usize,
    arcs: usize,
    strongly_connected: bool,
    diameter: Option<u32>,
    girth: Option<u32>,
    cells: Vec<(u32, u32)>,
    witnesses: Vec<String>,
    kind: Option<DrdType>,
}

impl DigraphReport {
    pub fn new(g: &Digraph) -> Self {
        let prof = profile(g);
        let mut witnesses = Vec::new();
        let cells = match attached_scheme(g) {
            Ok(a) => a.cell_labels,
            Err(e) => {
                witnesses.push(e.to_string());
                Vec::new()
            }
        };
        let kind = match distance_regular_test(g) {
            Ok(Some(drd)) => Some(drd.kind),
            Ok(None) => None,
            Err(e) => {
                witnesses.push(e.to_string());
                None
            }
        };
        Self {
            size: g.size(),
            arcs: g.arc_count(),
            strongly_connected: prof.strongly_connected,
            diameter: (prof.diameter != UNREACHABLE && prof.strongly_connected)
                .then_some(prof.diameter),
            girth: prof.girth,
            cells,
            witnesses,
            kind,
        }
    }

    pub fn is_wdrd(&self) -> bool {
        !self.cells.is_empty()
    }

    pub fn render(&self, format: Format) -> String {
        let status = if self.is_wdrd() { "wdrd" } else { "not_wdrd" };
        let kind = self.kind.map(|k| match k {
            DrdType::Short => "short",
            DrdType::Long => "long",
        });
        match format {
            Format::Json => emit(json!({
                "schema_version": SCHEMA_VERSION,
                "size": self.size,
                "arcs": self.arcs,
                "strongly_connected": self.strongly_connected,
                "diameter": self.diameter,
                "girth": self.girth,
                "status": status,
                "cells": self.cells.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
                "witnesses": self.witnesses,
                "type": kind,
            })),
            Format::Text => {
                let mut out = String::new();
                writeln!(out, "vertices    {}", self.size).unwrap();
                writeln!(out, "arcs        {}", self.arcs).unwrap();
                writeln!(out, "strongly connected  {}", self.strongly_connected).unwrap();
                let opt = |v: Option<u32>| v.map_or("-".to_string(), |v| v.to_string());
                writeln!(out, "diameter    {}", opt(self.diameter)).unwrap();
                writeln!(out, "girth       {}", opt(self.girth)).unwrap();
                let cells: Vec<String> = self
                    .cells
                    .iter()
                    .map(|(a, b)| format!("({a},{b})"))
                    .collect();
                writeln!(
                    out,
                    "cells       {}",
                    if cells.is_empty() {
                        "-".into()
                    } else {
                        cells.join(" ")
                    }
                )
                .unwrap();
                writeln!(out, "distance-regular  {}", kind.unwrap_or("no")).unwrap();
                for w in &self.witnesses {
                    writeln!(out, "witness     {w}").unwrap();
                }
                writeln!(out, "status      {}", status).unwrap();
                out
            }
        }
    }
}
