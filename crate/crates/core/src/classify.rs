//! Classification of diameter-2 weakly distance-regular digraphs attached to
//! a scheme with exactly one pair of non-symmetric relations, together with
//! a definition-level enumeration oracle and the cross-check between them.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::closure::{closure, complex_product, wedge_conditions, wreath_decompositions, IndexSet};
use crate::digraph::{arc_union, profile, Digraph};
use crate::scheme::Scheme;
use crate::wdrd::wdrd_with_scheme_from_profile;

/// Largest class count the enumeration oracle accepts (`2^d - 1` candidates).
pub const ORACLE_MAX_CLASSES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("oracle needs d <= {ORACLE_MAX_CLASSES}, scheme has d = {0}")]
    TooManyClasses(usize),
}

/// A P-polynomial ordering `R_0, R_g, ...` generated by relation `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PPolynomialOrdering {
    pub generator: usize,
    pub ordering: Vec<usize>,
}

/// Checks that `A_{o_t}` is a polynomial of degree `t` in `A_{o_1}` for the
/// ordering `o`: `R_{o_1} R_{o_t} ⊆ {R_{o_0}, ..., R_{o_{t+1}}}` with
/// `p_{o_1, o_t}^{o_{t+1}} > 0`.
pub fn is_polynomial_ordering(s: &Scheme, ordering: &[usize]) -> bool {
    let d = s.d();
    if ordering.len() != d + 1 || ordering[0] != 0 || d == 0 {
        return false;
    }
    let seen: BTreeSet<usize> = ordering.iter().copied().collect();
    if seen.len() != d + 1 || seen.iter().any(|&i| i > d) {
        return false;
    }
    let first = IndexSet::from([ordering[1]]);
    (1..=d).all(|t| {
        let allowed: IndexSet = ordering[..(t + 2).min(d + 1)].iter().copied().collect();
        let prod = complex_product(s, &first, &IndexSet::from([ordering[t]])).expect("in range");
        prod.is_subset(&allowed) && (t == d || s.p(ordering[1], ordering[t], ordering[t + 1]) > 0)
    })
}

/// Every relation whose digraph has distance classes equal to the scheme's
/// relations, with the induced ordering by distance.
pub fn p_polynomial_orderings(s: &Scheme) -> Vec<PPolynomialOrdering> {
    let d = s.d();
    (1..=d)
        .filter_map(|r| {
            let g = arc_union(s, &[r]).expect("r in range");
            let prof = profile(&g);
            if !prof.strongly_connected || prof.diameter as usize != d {
                return None;
            }
            let mut at_distance = vec![usize::MAX; d + 1];
            for x in 0..s.size() {
                for y in 0..s.size() {
                    let t = prof.distance(x, y) as usize;
                    let l = s.label(x, y);
                    if at_distance[t] == usize::MAX {
                        at_distance[t] = l;
                    } else if at_distance[t] != l {
                        return None;
                    }
                }
            }
            let distinct: BTreeSet<usize> = at_distance.iter().copied().collect();
            if distinct.len() != d + 1 || !is_polynomial_ordering(s, &at_distance) {
                return None;
            }
            Some(PPolynomialOrdering {
                generator: r,
                ordering: at_distance,
            })
        })
        .collect()
}

/// Why a candidate arc set is not admissible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The scheme does not have exactly one non-symmetric pair, or `d ∉ {2,3,4}`.
    NotApplicable { reason: String },
    /// The arc set is not one of the shapes admitted by the classification.
    ShapeNotAdmitted,
    PPolynomial {
        generator: usize,
        ordering: Vec<usize>,
    },
    /// Wreath product of a 1-class scheme on the fibers of `{0, a}` and a
    /// P-polynomial quotient.
    WreathProduct {
        a: usize,
        quotient_generator: usize,
        quotient_ordering: Vec<usize>,
    },
    /// Wedge product over the closed subset `K = F`.
    WedgeProduct { closed_subset: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Admissible { case: u8 },
    Excluded { witness: Witness },
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Verdict::Admissible { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub arcs: Vec<usize>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub scheme_name: String,
    /// `labeling[c]` is the original index of canonical relation `c`.
    pub labeling: Vec<usize>,
    pub applicable: bool,
    pub candidates: Vec<Candidate>,
    /// Admissible arc sets in canonical indices, ascending.
    pub admissible: Vec<Vec<usize>>,
    /// The scheme relabeled canonically (the input itself when not applicable).
    pub canonical: Scheme,
}

/// Non-symmetric pair first (smaller original index as relation 1), then
/// the symmetric relations by original index. `None` unless the scheme has
/// exactly one non-symmetric pair.
pub fn canonical_labeling(s: &Scheme) -> Option<Vec<usize>> {
    let pairs = s.nonsymmetric_pairs();
    let [(u, v)] = pairs.as_slice() else {
        return None;
    };
    let mut order = vec![0, *u, *v];
    order.extend((1..=s.d()).filter(|&i| s.is_symmetric_relation(i)));
    Some(order)
}

fn subsets(d: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << d)).map(move |mask| (1..=d).filter(|&i| mask >> (i - 1) & 1 == 1).collect())
}

fn sort_sets(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    sets.sort();
    sets
}

fn wedge_witness(s: &Scheme, generators: IndexSet, expected: IndexSet) -> Option<Witness> {
    let c = closure(s, &generators).ok()?;
    if c.indices() != &expected || !c.is_proper(s) {
        return None;
    }
    wedge_conditions(s, &expected, &expected)
        .ok()
        .filter(|&ok| ok)
        .map(|_| Witness::WedgeProduct {
            closed_subset: expected.into_iter().collect(),
        })
}

fn wreath_witness(s: &Scheme, j: usize) -> Option<Witness> {
    wreath_decompositions(s)
        .into_iter()
        .filter(|w| w.a == j)
        .find_map(|w| {
            p_polynomial_orderings(&w.quotient.scheme)
                .into_iter()
                .next()
                .map(|pp| Witness::WreathProduct {
                    a: w.a,
                    quotient_generator: pp.generator,
                    quotient_ordering: pp.ordering,
                })
        })
}

pub fn classify_scheme(s: &Scheme) -> ClassificationReport {
    let d = s.d();
    let labeling = canonical_labeling(s);
    let not_applicable = match &labeling {
        None => Some(format!(
            "scheme has {} non-symmetric pairs, not exactly one",
            s.nonsymmetric_pairs().len()
        )),
        Some(_) if !(2..=4).contains(&d) => Some(format!("class count d = {d} is not 2, 3 or 4")),
        Some(_) => None,
    };
    if let Some(reason) = not_applicable {
        let candidates = if d <= 4 {
            subsets(d)
                .map(|arcs| Candidate {
                    arcs,
                    verdict: Verdict::Excluded {
                        witness: Witness::NotApplicable {
                            reason: reason.clone(),
                        },
                    },
                })
                .collect()
        } else {
            Vec::new()
        };
        return ClassificationReport {
            scheme_name: s.name().to_string(),
            labeling: (0..=d).collect(),
            applicable: false,
            candidates,
            admissible: Vec::new(),
            canonical: s.clone(),
        };
    }

    let labeling = labeling.expect("applicable implies a labeling");
    let c = s.relabel(&labeling);
    let mut p_poly: Option<Option<PPolynomialOrdering>> = None;
    let mut p_poly_first = || {
        p_poly
            .get_or_insert_with(|| p_polynomial_orderings(&c).into_iter().next())
            .clone()
    };

    let candidates: Vec<Candidate> = subsets(d)
        .map(|arcs| {
            let verdict = match (d, arcs.as_slice()) {
                (2, [1] | [2]) => Verdict::Admissible { case: 1 },
                (3, [1 | 2, 3]) => Verdict::Admissible { case: 2 },
                (3, [1] | [2]) => {
                    if let Some(pp) = p_poly_first() {
                        Verdict::Excluded {
                            witness: Witness::PPolynomial {
                                generator: pp.generator,
                                ordering: pp.ordering,
                            },
                        }
                    } else if let Some(w) =
                        wedge_witness(&c, IndexSet::from([1]), IndexSet::from([0, 1, 2]))
                    {
                        Verdict::Excluded { witness: w }
                    } else {
                        Verdict::Admissible { case: 3 }
                    }
                }
                (4, &[1 | 2, j @ (3 | 4)]) => {
                    if let Some(w) = wreath_witness(&c, j) {
                        Verdict::Excluded { witness: w }
                    } else if let Some(w) =
                        wedge_witness(&c, IndexSet::from([1, j]), IndexSet::from([0, 1, 2, j]))
                    {
                        Verdict::Excluded { witness: w }
                    } else {
                        Verdict::Admissible { case: 4 }
                    }
                }
                _ => Verdict::Excluded {
                    witness: Witness::ShapeNotAdmitted,
                },
            };
            Candidate { arcs, verdict }
        })
        .collect();
    let admissible = sort_sets(
        candidates
            .iter()
            .filter(|c| c.verdict.is_admissible())
            .map(|c| c.arcs.clone())
            .collect(),
    );
    ClassificationReport {
        scheme_name: s.name().to_string(),
        labeling,
        applicable: true,
        candidates,
        admissible,
        canonical: c,
    }
}

/// Whether `(X, ∪_{i∈T} R_i)` is a weakly distance-regular digraph of
/// diameter 2 whose two-way distance partition is exactly `s`.
pub fn is_diameter_two_wdrd(s: &Scheme, arcs: &[usize]) -> bool {
    let g: Digraph = match arc_union(s, arcs) {
        Ok(g) => g,
        Err(_) => return false,
    };
    let prof = profile(&g);
    prof.strongly_connected && prof.diameter == 2 && wdrd_with_scheme_from_profile(&prof, s)
}

/// Every nonempty `T ⊆ {1..d}` whose arc union is a diameter-2 weakly
/// distance-regular digraph with `s` attached, in ascending order.
pub fn oracle_enumerate(s: &Scheme) -> Result<Vec<Vec<usize>>, ClassifyError> {
    let d = s.d();
    if d > ORACLE_MAX_CLASSES {
        return Err(ClassifyError::TooManyClasses(d));
    }
    let candidates: Vec<Vec<usize>> = subsets(d).collect();
    let found: Vec<Vec<usize>> = candidates
        .into_par_iter()
        .filter(|t| is_diameter_two_wdrd(s, t))
        .collect();
    Ok(sort_sets(found))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    /// False when the classification does not cover the scheme; the oracle
    /// is still reported but nothing is compared.
    pub applicable: bool,
    pub labeling: Vec<usize>,
    pub classifier: Vec<Vec<usize>>,
    pub oracle: Vec<Vec<usize>>,
    /// Symmetric difference of the two lists.
    pub diff: Vec<Vec<usize>>,
    pub pass: bool,
}

/// Compares two lists of arc sets.
pub fn compare(
    labeling: Vec<usize>,
    classifier: Vec<Vec<usize>>,
    oracle: Vec<Vec<usize>>,
) -> CrosscheckReport {
    let a: BTreeSet<Vec<usize>> = classifier.iter().cloned().collect();
    let b: BTreeSet<Vec<usize>> = oracle.iter().cloned().collect();
    let diff: Vec<Vec<usize>> = a.symmetric_difference(&b).cloned().collect();
    CrosscheckReport {
        applicable: true,
        labeling,
        pass: diff.is_empty(),
        classifier: sort_sets(classifier),
        oracle: sort_sets(oracle),
        diff,
    }
}

/// Runs classifier and oracle on the canonically labeled scheme (or on the
/// scheme as given when the classifier does not apply) and compares them.
pub fn crosscheck(s: &Scheme) -> Result<CrosscheckReport, ClassifyError> {
    let report = classify_scheme(s);
    crosscheck_report(&report)
}

/// Cross-check for an existing classification.
pub fn crosscheck_report(report: &ClassificationReport) -> Result<CrosscheckReport, ClassifyError> {
    let oracle = oracle_enumerate(&report.canonical)?;
    if !report.applicable {
        return Ok(CrosscheckReport {
            applicable: false,
            labeling: report.labeling.clone(),
            classifier: Vec::new(),
            oracle,
            diff: Vec::new(),
            pass: true,
        });
    }
    Ok(compare(
        report.labeling.clone(),
        report.admissible.clone(),
        oracle,
    ))
}
