//! Association schemes: construction from a relation partition, the
//! intersection-number tensor, and exact verification of the standard
//! intersection-number identities.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::{and_count, BitMatrix};

/// Largest point count accepted by [`build_scheme`].
pub const MAX_POINTS: usize = 2048;

/// Largest class count accepted; the tensor holds `(d+1)^3` entries.
pub const MAX_CLASSES: usize = 255;

const UNASSIGNED: u16 = u16::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("point count {0} is outside 1..={MAX_POINTS}")]
    BadSize(usize),
    #[error("class count {0} exceeds {MAX_CLASSES}")]
    TooManyClasses(usize),
    #[error("pair ({x}, {y}) in relation {relation} is a loop or out of range")]
    InvalidPair { relation: usize, x: usize, y: usize },
    #[error("relations do not partition X×X: pair ({x}, {y}) is {kind}")]
    NotPartition {
        x: usize,
        y: usize,
        kind: PartitionDefect,
    },
    #[error("relation {0} is empty")]
    EmptyRelation(usize),
    #[error("transpose of relation {relation} is not a relation (pair ({x}, {y}))")]
    NotTransposeClosed { relation: usize, x: usize, y: usize },
    #[error(
        "p[{i}][{j}][{h}] is not constant: {} at ({}, {}) but {} at ({}, {})",
        reference.2, reference.0, reference.1, witness.2, witness.0, witness.1
    )]
    NonConstantIntersection {
        i: usize,
        j: usize,
        h: usize,
        reference: (usize, usize, u64),
        witness: (usize, usize, u64),
    },
    #[error("identity {identity} violated at indices {indices:?}")]
    IdentityViolation {
        identity: Identity,
        indices: Vec<usize>,
    },
    #[error("integer overflow while checking identity {identity} at {indices:?}")]
    Overflow {
        identity: Identity,
        indices: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionDefect {
    Uncovered,
    Duplicated,
}

impl fmt::Display for PartitionDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionDefect::Uncovered => "uncovered",
            PartitionDefect::Duplicated => "covered twice",
        })
    }
}

/// A finite association scheme `(X, {R_0, ..., R_d})` with its intersection
/// numbers.
///
/// Relation indices are kept exactly as supplied; relation 0 is the diagonal.
#[derive(Clone)]
pub struct Scheme {
    name: String,
    provenance: Option<String>,
    n: usize,
    labels: Vec<u16>,
    relations: Vec<BitMatrix>,
    p: Vec<u64>,
    valency: Vec<u64>,
    star: Vec<usize>,
}

impl PartialEq for Scheme {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.labels == other.labels && self.p == other.p
    }
}

impl Eq for Scheme {}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scheme")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("d", &self.d())
            .field("valency", &self.valency)
            .field("star", &self.star)
            .finish()
    }
}

/// Builds a scheme on `0..n` from relations `R_1..R_d` given as pair lists.
/// The diagonal is implicit as relation 0.
pub fn build_scheme(n: usize, rels: &[Vec<(usize, usize)>]) -> Result<Scheme, SchemeError> {
    if n == 0 || n > MAX_POINTS {
        return Err(SchemeError::BadSize(n));
    }
    if rels.len() > MAX_CLASSES {
        return Err(SchemeError::TooManyClasses(rels.len()));
    }
    let mut labels = vec![UNASSIGNED; n * n];
    for x in 0..n {
        labels[x * n + x] = 0;
    }
    for (k, pairs) in rels.iter().enumerate() {
        let idx = k + 1;
        for &(x, y) in pairs {
            if x >= n || y >= n || x == y {
                return Err(SchemeError::InvalidPair {
                    relation: idx,
                    x,
                    y,
                });
            }
            let slot = &mut labels[x * n + y];
            if *slot != UNASSIGNED {
                return Err(SchemeError::NotPartition {
                    x,
                    y,
                    kind: PartitionDefect::Duplicated,
                });
            }
            *slot = idx as u16;
        }
    }
    Scheme::from_labels(n, rels.len(), labels)
}

/// The 1-class scheme on `m ≥ 2` points (all off-diagonal pairs in `R_1`).
pub fn one_class_scheme(m: usize) -> Scheme {
    assert!(m >= 2, "a 1-class scheme needs at least two points");
    let labels = (0..m * m).map(|i| u16::from(i / m != i % m)).collect();
    Scheme::from_labels(m, 1, labels)
        .expect("complete graph partition is a scheme")
        .with_name(format!("one_class({m})"))
}

impl Scheme {
    /// Builds and fully validates a scheme from an `n × n` label table
    /// (`labels[x * n + y]` is the relation index of `(x, y)`).
    pub fn from_labels(n: usize, d: usize, labels: Vec<u16>) -> Result<Self, SchemeError> {
        if n == 0 || n > MAX_POINTS {
            return Err(SchemeError::BadSize(n));
        }
        if d > MAX_CLASSES {
            return Err(SchemeError::TooManyClasses(d));
        }
        assert_eq!(labels.len(), n * n, "label table must be n*n");
        let classes = d + 1;
        let mut relations = vec![BitMatrix::new(n); classes];
        for x in 0..n {
            for y in 0..n {
                let l = labels[x * n + y];
                if l == UNASSIGNED {
                    return Err(SchemeError::NotPartition {
                        x,
                        y,
                        kind: PartitionDefect::Uncovered,
                    });
                }
                let l = l as usize;
                if (l == 0) != (x == y) || l > d {
                    return Err(SchemeError::InvalidPair { relation: l, x, y });
                }
                relations[l].set(x, y);
            }
        }
        for (i, r) in relations.iter().enumerate() {
            if r.is_empty() {
                return Err(SchemeError::EmptyRelation(i));
            }
        }

        // Transpose closure: the label of (y,x) must depend only on the label of (x,y).
        let mut star = vec![usize::MAX; classes];
        for x in 0..n {
            for y in 0..n {
                let i = labels[x * n + y] as usize;
                let t = labels[y * n + x] as usize;
                if star[i] == usize::MAX {
                    star[i] = t;
                } else if star[i] != t {
                    return Err(SchemeError::NotTransposeClosed { relation: i, x, y });
                }
            }
        }

        // Intersection numbers from one representative pair per relation.
        let reps: Vec<(usize, usize)> = relations
            .iter()
            .map(|r| r.ones().next().expect("relations are nonempty"))
            .collect();
        let mut p = vec![0u64; classes * classes * classes];
        for (h, &(x, y)) in reps.iter().enumerate() {
            for i in 0..classes {
                for j in 0..classes {
                    p[(i * classes + j) * classes + h] =
                        and_count(relations[i].row(x), relations[star[j]].row(y));
                }
            }
        }

        // Constancy over every pair, not a sample.
        let failure = (0..n).into_par_iter().find_map_first(|x| {
            for y in 0..n {
                let h = labels[x * n + y] as usize;
                for i in 0..classes {
                    let ri = relations[i].row(x);
                    for j in 0..classes {
                        let c = and_count(ri, relations[star[j]].row(y));
                        let expect = p[(i * classes + j) * classes + h];
                        if c != expect {
                            let (rx, ry) = reps[h];
                            return Some(SchemeError::NonConstantIntersection {
                                i,
                                j,
                                h,
                                reference: (rx, ry, expect),
                                witness: (x, y, c),
                            });
                        }
                    }
                }
            }
            None
        });
        if let Some(e) = failure {
            return Err(e);
        }

        let valency = (0..classes)
            .map(|i| p[(i * classes + star[i]) * classes])
            .collect();
        Ok(Self {
            name: String::new(),
            provenance: None,
            n,
            labels,
            relations,
            p,
            valency,
            star,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    /// Number of points `|X|`.
    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of classes `d` (non-diagonal relations).
    #[inline]
    pub fn d(&self) -> usize {
        self.relations.len() - 1
    }

    /// Relation index of the pair `(x, y)`.
    #[inline]
    pub fn label(&self, x: usize, y: usize) -> usize {
        self.labels[x * self.n + y] as usize
    }

    pub(crate) fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn relation(&self, i: usize) -> &BitMatrix {
        &self.relations[i]
    }

    pub fn relations(&self) -> &[BitMatrix] {
        &self.relations
    }

    /// Pairs of relation `i` in row-major order.
    pub fn pairs(&self, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.relations[i].ones()
    }

    /// The intersection number `p_{i,j}^h`.
    #[inline]
    pub fn p(&self, i: usize, j: usize, h: usize) -> u64 {
        let c = self.relations.len();
        self.p[(i * c + j) * c + h]
    }

    #[inline]
    pub fn valency(&self, i: usize) -> u64 {
        self.valency[i]
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valency
    }

    #[inline]
    pub fn star(&self, i: usize) -> usize {
        self.star[i]
    }

    pub fn star_map(&self) -> &[usize] {
        &self.star
    }

    pub fn is_symmetric_relation(&self, i: usize) -> bool {
        self.star[i] == i
    }

    pub fn is_commutative(&self) -> bool {
        let c = self.relations.len();
        (0..c).all(|i| (0..c).all(|j| (0..c).all(|h| self.p(i, j, h) == self.p(j, i, h))))
    }

    /// Unordered non-symmetric pairs `(i, i*)` with `i < i*`.
    pub fn nonsymmetric_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.d())
            .filter(|&i| self.star[i] > i)
            .map(|i| (i, self.star[i]))
            .collect()
    }

    /// Renumbers relations: new relation `k` is old relation `order[k]`.
    /// `order[0]` must be 0 and `order` a permutation of `0..=d`.
    pub fn relabel(&self, order: &[usize]) -> Scheme {
        let c = self.relations.len();
        assert_eq!(order.len(), c, "relabel needs a full permutation");
        assert_eq!(order[0], 0, "diagonal stays relation 0");
        let mut inverse = vec![usize::MAX; c];
        for (new, &old) in order.iter().enumerate() {
            assert!(inverse[old] == usize::MAX, "order is not a permutation");
            inverse[old] = new;
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| inverse[l as usize] as u16)
            .collect();
        let relations = order.iter().map(|&o| self.relations[o].clone()).collect();
        let mut p = vec![0; c * c * c];
        for i in 0..c {
            for j in 0..c {
                for h in 0..c {
                    p[(i * c + j) * c + h] = self.p(order[i], order[j], order[h]);
                }
            }
        }
        Scheme {
            name: self.name.clone(),
            provenance: self.provenance.clone(),
            n: self.n,
            labels,
            relations,
            p,
            valency: order.iter().map(|&o| self.valency[o]).collect(),
            star: order.iter().map(|&o| inverse[self.star[o]]).collect(),
        }
    }

    /// Overwrites one tensor entry without revalidation. Exists so that
    /// identity checkers can be exercised against a corrupted tensor.
    #[doc(hidden)]
    pub fn set_intersection_number_unchecked(&mut self, i: usize, j: usize, h: usize, value: u64) {
        let c = self.relations.len();
        self.p[(i * c + j) * c + h] = value;
    }
}

/// Identities checked by [`verify_identities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `p_{i,0}^h = p_{0,i}^h = δ_{i,h}`.
    Unit,
    /// `k_i = k_{i*}` and `Σ k_i = n`.
    Valency,
    /// `k_i k_j = Σ_h p_{i,j}^h k_h`.
    ValencyProduct,
    /// `p_{i,j}^h k_h = p_{h,j*}^i k_i = p_{i*,h}^j k_j`.
    IndexRaising,
    /// `Σ_j p_{i,j}^h = k_i`.
    RowSum,
    /// `Σ_r p_{e,l}^r p_{m,r}^h = Σ_t p_{m,e}^t p_{t,l}^h`.
    Associativity,
    /// `A_i A_j = Σ_h p_{i,j}^h A_h`, checked entrywise.
    BoseMesner,
}

impl Identity {
    pub fn label(&self) -> &'static str {
        match self {
            Identity::Unit => "unit",
            Identity::Valency => "valency",
            Identity::ValencyProduct => "(1) k_i k_j = sum_h p_ij^h k_h",
            Identity::IndexRaising => "(2) p_ij^h k_h = p_hj*^i k_i = p_i*h^j k_j",
            Identity::RowSum => "(3) sum_j p_ij^h = k_i",
            Identity::Associativity => "(4) sum_r p_el^r p_mr^h = sum_t p_me^t p_tl^h",
            Identity::BoseMesner => "A_i A_j = sum_h p_ij^h A_h",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub instances: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub size: usize,
    pub classes: usize,
    pub checks: Vec<IdentityCheck>,
}

fn mul(a: u64, b: u64, identity: Identity, idx: &[usize]) -> Result<u64, SchemeError> {
    a.checked_mul(b).ok_or_else(|| SchemeError::Overflow {
        identity,
        indices: idx.to_vec(),
    })
}

fn add(a: u64, b: u64, identity: Identity, idx: &[usize]) -> Result<u64, SchemeError> {
    a.checked_add(b).ok_or_else(|| SchemeError::Overflow {
        identity,
        indices: idx.to_vec(),
    })
}

fn violated(identity: Identity, indices: &[usize]) -> SchemeError {
    SchemeError::IdentityViolation {
        identity,
        indices: indices.to_vec(),
    }
}

/// Checks every intersection-number identity exactly, plus the Bose–Mesner
/// product relation computed from the incidence tables by sparse integer
/// matrix multiplication.
// index loops mirror the identities as written
#[allow(clippy::needless_range_loop)]
pub fn verify_identities(s: &Scheme) -> Result<IdentityReport, SchemeError> {
    let c = s.d() + 1;
    let k = s.valencies();
    let mut checks = Vec::new();

    let mut count = 0;
    for i in 0..c {
        for h in 0..c {
            let delta = u64::from(i == h);
            if s.p(i, 0, h) != delta || s.p(0, i, h) != delta {
                return Err(violated(Identity::Unit, &[i, h]));
            }
            count += 1;
        }
    }
    checks.push(IdentityCheck {
        identity: Identity::Unit,
        instances: count,
    });

    let mut total = 0u64;
    for i in 0..c {
        if s.star(s.star(i)) != i || k[i] != k[s.star(i)] || k[i] != s.p(i, s.star(i), 0) {
            return Err(violated(Identity::Valency, &[i]));
        }
        total = add(total, k[i], Identity::Valency, &[i])?;
    }
    if total != s.size() as u64 {
        return Err(violated(Identity::Valency, &[]));
    }
    checks.push(IdentityCheck {
        identity: Identity::Valency,
        instances: c as u64 + 1,
    });

    let id = Identity::ValencyProduct;
    for i in 0..c {
        for j in 0..c {
            let idx = [i, j];
            let mut rhs = 0u64;
            for h in 0..c {
                rhs = add(rhs, mul(s.p(i, j, h), k[h], id, &idx)?, id, &idx)?;
            }
            if mul(k[i], k[j], id, &idx)? != rhs {
                return Err(violated(id, &idx));
            }
        }
    }
    checks.push(IdentityCheck {
        identity: id,
        instances: (c * c) as u64,
    });

    let id = Identity::IndexRaising;
    for i in 0..c {
        for j in 0..c {
            for h in 0..c {
                let idx = [i, j, h];
                let a = mul(s.p(i, j, h), k[h], id, &idx)?;
                let b = mul(s.p(h, s.star(j), i), k[i], id, &idx)?;
                let e = mul(s.p(s.star(i), h, j), k[j], id, &idx)?;
                if a != b || b != e {
                    return Err(violated(id, &idx));
                }
            }
        }
    }
    checks.push(IdentityCheck {
        identity: id,
        instances: (c * c * c) as u64,
    });

    let id = Identity::RowSum;
    for i in 0..c {
        for h in 0..c {
            let sum: u64 = (0..c).map(|j| s.p(i, j, h)).sum();
            if sum != k[i] {
                return Err(violated(id, &[i, h]));
            }
        }
    }
    checks.push(IdentityCheck {
        identity: id,
        instances: (c * c) as u64,
    });

    let id = Identity::Associativity;
    let failure = (0..c).into_par_iter().find_map_first(|e| {
        for l in 0..c {
            for m in 0..c {
                for h in 0..c {
                    let idx = [e, l, m, h];
                    let lhs = (0..c).try_fold(0u64, |acc, r| {
                        add(acc, mul(s.p(e, l, r), s.p(m, r, h), id, &idx)?, id, &idx)
                    });
                    let rhs = (0..c).try_fold(0u64, |acc, t| {
                        add(acc, mul(s.p(m, e, t), s.p(t, l, h), id, &idx)?, id, &idx)
                    });
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) if a == b => {}
                        (Err(err), _) | (_, Err(err)) => return Some(err),
                        _ => return Some(violated(id, &idx)),
                    }
                }
            }
        }
        None
    });
    if let Some(err) = failure {
        return Err(err);
    }
    checks.push(IdentityCheck {
        identity: id,
        instances: (c * c * c * c) as u64,
    });

    let n = s.size();
    let failure = (0..n).into_par_iter().find_map_first(|x| {
        // product[(i*c + j)*n + y] = (A_i A_j)[x][y]
        let mut product = vec![0u64; c * c * n];
        for z in 0..n {
            let i = s.label(x, z);
            for y in 0..n {
                let j = s.label(z, y);
                product[(i * c + j) * n + y] += 1;
            }
        }
        for i in 0..c {
            for j in 0..c {
                for y in 0..n {
                    if product[(i * c + j) * n + y] != s.p(i, j, s.label(x, y)) {
                        return Some(violated(Identity::BoseMesner, &[i, j, x, y]));
                    }
                }
            }
        }
        None
    });
    if let Some(err) = failure {
        return Err(err);
    }
    checks.push(IdentityCheck {
        identity: Identity::BoseMesner,
        instances: (c * c * n * n) as u64,
    });

    Ok(IdentityReport {
        size: n,
        classes: s.d(),
        checks,
    })
}

/// Symmetry structure of a scheme's relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationProfile {
    pub star: Vec<usize>,
    pub symmetric: Vec<bool>,
    pub nonsymmetric_pairs: Vec<(usize, usize)>,
    pub commutative: bool,
}

impl RelationProfile {
    pub fn nonsymmetric_pair_count(&self) -> usize {
        self.nonsymmetric_pairs.len()
    }
}

pub fn relation_profile(s: &Scheme) -> RelationProfile {
    RelationProfile {
        star: s.star_map().to_vec(),
        symmetric: (0..=s.d()).map(|i| s.is_symmetric_relation(i)).collect(),
        nonsymmetric_pairs: s.nonsymmetric_pairs(),
        commutative: s.is_commutative(),
    }
}
