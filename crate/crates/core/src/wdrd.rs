//! Recognition of weakly distance-regular and distance-regular digraphs.

use serde::Serialize;
use thiserror::Error;

use crate::closure::{closure, IndexSet};
use crate::digraph::{
    arc_union, lex_decompose, lexicographic_product, profile, quotient_digraph, Digraph,
    DigraphProfile,
};
use crate::scheme::{Scheme, SchemeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WdrdError {
    #[error("digraph has {digraph} vertices but scheme has {scheme} points")]
    SizeMismatch { digraph: usize, scheme: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(Precondition),
    #[error("distance-regular digraph with diameter {diameter} and girth {girth:?} breaks d = g-1 or d = g")]
    DichotomyViolation { diameter: u32, girth: Option<u32> },
    #[error("long-type distance-regular digraph does not decompose: {0}")]
    DecompositionFailure(String),
}

/// Why a digraph is not weakly distance-regular.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotWdrd {
    #[error("not strongly connected")]
    NotStronglyConnected,
    #[error("two-way distance partition is not a scheme: {reason}")]
    NotAScheme {
        reason: String,
        #[serde(skip)]
        error: SchemeError,
    },
}

/// The attached scheme of a weakly distance-regular digraph; relation `i`
/// is the two-way distance cell `cell_labels[i]`.
#[derive(Debug, Clone)]
pub struct AttachedScheme {
    pub scheme: Scheme,
    pub cell_labels: Vec<(u32, u32)>,
}

impl AttachedScheme {
    pub fn index_of(&self, cell: (u32, u32)) -> Option<usize> {
        self.cell_labels.iter().position(|&c| c == cell)
    }
}

/// Labels every pair by the rank of its two-way distance among all
/// occurring two-way distances (lexicographic, `(0,0)` first).
fn two_way_labels(prof: &DigraphProfile) -> (Vec<(u32, u32)>, Vec<u16>) {
    let n = prof.size;
    let mut cells: Vec<(u32, u32)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| prof.two_way(x, y))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    let labels = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| cells.binary_search(&prof.two_way(x, y)).unwrap() as u16)
        .collect();
    (cells, labels)
}

pub fn attached_scheme(g: &Digraph) -> Result<AttachedScheme, NotWdrd> {
    let prof = profile(g);
    if !prof.strongly_connected {
        return Err(NotWdrd::NotStronglyConnected);
    }
    let (cells, labels) = two_way_labels(&prof);
    match Scheme::from_labels(g.size(), cells.len() - 1, labels) {
        Ok(scheme) => Ok(AttachedScheme {
            scheme,
            cell_labels: cells,
        }),
        Err(error) => Err(NotWdrd::NotAScheme {
            reason: error.to_string(),
            error,
        }),
    }
}

/// True iff two label tables induce the same partition of `X × X`.
pub(crate) fn same_partition(a: &[u16], b: &[u16]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut forward = std::collections::HashMap::new();
    let mut backward = std::collections::HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| *forward.entry(x).or_insert(y) == y && *backward.entry(y).or_insert(x) == x)
}

/// Whether `g` is weakly distance-regular with attached scheme equal to
/// `s` as a partition of `X × X` (relation labels are ignored).
pub fn is_wdrd_with_scheme(g: &Digraph, s: &Scheme) -> Result<bool, WdrdError> {
    if g.size() != s.size() {
        return Err(WdrdError::SizeMismatch {
            digraph: g.size(),
            scheme: s.size(),
        });
    }
    let prof = profile(g);
    Ok(wdrd_with_scheme_from_profile(&prof, s))
}

/// Partition equality with a validated scheme already certifies that the
/// two-way partition is a scheme.
pub(crate) fn wdrd_with_scheme_from_profile(prof: &DigraphProfile, s: &Scheme) -> bool {
    if !prof.strongly_connected {
        return false;
    }
    let (_, labels) = two_way_labels(prof);
    same_partition(&labels, s.labels())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DrdType {
    Short,
    Long,
}

/// A long-type distance-regular digraph as `lex(outer, empty(m))`.
#[derive(Debug, Clone)]
pub struct LexDecomposition {
    pub fibers: Vec<Vec<usize>>,
    pub outer: Digraph,
    pub inner: Digraph,
}

impl LexDecomposition {
    /// `lex(outer, inner)` with vertex `(b, t)` placed at the `t`-th vertex
    /// of fiber `b`, i.e. in the original labelling.
    pub fn reconstruct(&self) -> Digraph {
        let product = lexicographic_product(&self.outer, &self.inner);
        let at: Vec<usize> = self.fibers.iter().flatten().copied().collect();
        Digraph::from_arcs(at.len(), product.arcs().map(|(x, y)| (at[x], at[y])))
            .expect("fibers partition the vertex set")
    }
}

#[derive(Debug, Clone)]
pub struct DistanceRegularDigraph {
    /// The distance scheme `(X, {Γ_0, ..., Γ_d})`, relation `i` = distance `i`.
    pub scheme: Scheme,
    pub kind: DrdType,
    pub diameter: u32,
    pub girth: u32,
    pub decomposition: Option<LexDecomposition>,
}

/// Tests whether the one-way distance partition of `g` is a non-symmetric
/// scheme. Successful results satisfy `d = g - 1` or `d = g`; long-type
/// results carry their verified lexicographic decomposition.
pub fn distance_regular_test(g: &Digraph) -> Result<Option<DistanceRegularDigraph>, WdrdError> {
    let prof = profile(g);
    if !prof.strongly_connected || g.size() < 2 {
        return Ok(None);
    }
    let n = g.size();
    let labels: Vec<u16> = prof.dist.iter().map(|&d| d as u16).collect();
    let scheme = match Scheme::from_labels(n, prof.diameter as usize, labels) {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };
    if scheme.nonsymmetric_pairs().is_empty() {
        return Ok(None);
    }
    let diameter = prof.diameter;
    let girth = match prof.girth {
        Some(g) if diameter + 1 == g || diameter == g => g,
        other => {
            return Err(WdrdError::DichotomyViolation {
                diameter,
                girth: other,
            })
        }
    };
    if diameter + 1 == girth {
        return Ok(Some(DistanceRegularDigraph {
            scheme,
            kind: DrdType::Short,
            diameter,
            girth,
            decomposition: None,
        }));
    }

    let fail = |why: &str| WdrdError::DecompositionFailure(why.to_string());
    let d = diameter as usize;
    let fiber_class = closure(&scheme, &IndexSet::from([d])).map_err(|e| fail(&e.to_string()))?;
    if fiber_class.indices() != &IndexSet::from([0, d]) {
        return Err(fail("distance-d relation does not close on itself"));
    }
    let fibers = fiber_class.fibers().to_vec();
    let (outer, inner) = lex_decompose(g, &fibers)
        .map_err(|e| fail(&e.to_string()))?
        .ok_or_else(|| fail("not a lexicographic product over the distance-d fibers"))?;
    if inner.arc_count() != 0 {
        return Err(fail("inner factor is not an empty graph"));
    }
    match distance_regular_test(&outer)? {
        Some(o) if o.kind == DrdType::Short && o.diameter + 1 == diameter && o.girth == girth => {}
        _ => {
            return Err(fail(
                "outer factor is not a short distance-regular digraph of diameter g-1",
            ))
        }
    }
    Ok(Some(DistanceRegularDigraph {
        scheme,
        kind: DrdType::Long,
        diameter,
        girth,
        decomposition: Some(LexDecomposition {
            fibers,
            outer,
            inner,
        }),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precondition {
    Commutative,
    /// `R_1^T = R_2`.
    StarOfOne,
    /// `3 ≤ a ≤ d`.
    FiberIndexRange,
    /// `⟨R_a⟩ = {R_0, R_a}`.
    FiberClosure,
    /// `p_{1,1*}^a = k_1`.
    ValencyCondition,
    /// `l ∈ {1, a}`.
    ArcIndex,
}

impl std::fmt::Display for Precondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Precondition::Commutative => "scheme is not commutative",
            Precondition::StarOfOne => "R_1 transposed is not R_2",
            Precondition::FiberIndexRange => "a is not in 3..=d",
            Precondition::FiberClosure => "<R_a> is not {R_0, R_a}",
            Precondition::ValencyCondition => "p_{1,1*}^a differs from k_1",
            Precondition::ArcIndex => "l is not 1 or a",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerFactor {
    Empty,
    Complete,
}

/// Outcome of checking the lexicographic structure of `Δ_l = (X, R_1 ∪ R_l)`
/// over the fibers of `{R_0, R_a}`.
#[derive(Debug, Clone, Serialize)]
pub struct FiberLexReport {
    pub a: usize,
    pub l: usize,
    pub fiber_size: usize,
    pub expected_inner: InnerFactor,
    /// `Δ_l` equals `lex(Δ_l / ⟨R_a⟩, expected inner)`.
    pub decomposes: bool,
    pub delta_is_wdrd_with_scheme: bool,
    /// Only evaluated when `Δ_l` is weakly distance-regular with `s` attached.
    pub quotient_is_wdrd: Option<bool>,
    pub holds: bool,
}

pub fn verify_fiber_lex(s: &Scheme, a: usize, l: usize) -> Result<FiberLexReport, WdrdError> {
    let violated = |p| Err(WdrdError::PreconditionViolated(p));
    if !s.is_commutative() {
        return violated(Precondition::Commutative);
    }
    if s.d() < 2 || s.star(1) != 2 {
        return violated(Precondition::StarOfOne);
    }
    if a < 3 || a > s.d() {
        return violated(Precondition::FiberIndexRange);
    }
    let fibers = closure(s, &IndexSet::from([a])).expect("a is in range");
    if fibers.indices() != &IndexSet::from([0, a]) {
        return violated(Precondition::FiberClosure);
    }
    if s.p(1, s.star(1), a) != s.valency(1) {
        return violated(Precondition::ValencyCondition);
    }
    if l != 1 && l != a {
        return violated(Precondition::ArcIndex);
    }

    let idxs: Vec<usize> = if l == 1 { vec![1] } else { vec![1, l] };
    let delta = arc_union(s, &idxs).expect("indices checked");
    let expected_inner = if l == 1 {
        InnerFactor::Empty
    } else {
        InnerFactor::Complete
    };
    let m = fibers.fiber_size();
    let want_inner = match expected_inner {
        InnerFactor::Empty => Digraph::empty(m),
        InnerFactor::Complete => Digraph::complete(m),
    };
    let decomposes = matches!(
        lex_decompose(&delta, fibers.fibers()),
        Ok(Some((_, ref inner))) if *inner == want_inner
    );
    let delta_is_wdrd_with_scheme = is_wdrd_with_scheme(&delta, s)?;
    let quotient_is_wdrd = delta_is_wdrd_with_scheme.then(|| {
        let q = quotient_digraph(&delta, fibers.fibers()).expect("fibers partition X");
        attached_scheme(&q).is_ok()
    });
    Ok(FiberLexReport {
        a,
        l,
        fiber_size: m,
        expected_inner,
        decomposes,
        delta_is_wdrd_with_scheme,
        quotient_is_wdrd,
        holds: decomposes && quotient_is_wdrd != Some(false),
    })
}
