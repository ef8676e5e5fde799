//! Complex products, closed subsets, subschemes, quotient schemes, wreath
//! products and the wedge-product conditions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::bits::{and_count, BitMatrix};
use crate::scheme::{one_class_scheme, Scheme, SchemeError};

/// A set of relation indices of some host scheme.
pub type IndexSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("relation index {0} out of range 0..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("relation set {0:?} is not closed")]
    NotClosed(IndexSet),
    #[error("closed subset {inner:?} is not contained in {outer:?}")]
    NotNested { inner: IndexSet, outer: IndexSet },
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
    /// A construction that must yield a scheme failed validation.
    #[error("internal error: constructed configuration is not a scheme: {0}")]
    Internal(#[from] SchemeError),
}

fn check_indices(s: &Scheme, set: &IndexSet) -> Result<(), ClosureError> {
    if set.is_empty() {
        return Err(ClosureError::EmptyIndexSet);
    }
    match set.iter().find(|&&i| i > s.d()) {
        Some(&i) => Err(ClosureError::IndexOutOfRange(i, s.d())),
        None => Ok(()),
    }
}

/// `EF`: every `h` with `p_{i,j}^h > 0` for some `i ∈ E`, `j ∈ F`.
pub fn complex_product(s: &Scheme, e: &IndexSet, f: &IndexSet) -> Result<IndexSet, ClosureError> {
    check_indices(s, e)?;
    check_indices(s, f)?;
    Ok(product_unchecked(s, e, f))
}

fn product_unchecked(s: &Scheme, e: &IndexSet, f: &IndexSet) -> IndexSet {
    (0..=s.d())
        .filter(|&h| e.iter().any(|&i| f.iter().any(|&j| s.p(i, j, h) > 0)))
        .collect()
}

pub fn is_closed(s: &Scheme, set: &IndexSet) -> bool {
    set.contains(&0)
        && set.iter().all(|&i| i <= s.d() && set.contains(&s.star(i)))
        && set.iter().all(|&i| {
            set.iter()
                .all(|&j| (0..=s.d()).all(|h| s.p(s.star(i), j, h) == 0 || set.contains(&h)))
        })
}

/// A closed subset together with its fibers `F(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedSubset {
    indices: IndexSet,
    fibers: Vec<Vec<usize>>,
    #[serde(skip)]
    fiber_of: Vec<usize>,
}

impl ClosedSubset {
    /// Validates that `indices` is closed in `s` and computes its fibers.
    pub fn from_indices(s: &Scheme, indices: IndexSet) -> Result<Self, ClosureError> {
        check_indices(s, &indices)?;
        if !is_closed(s, &indices) {
            return Err(ClosureError::NotClosed(indices));
        }
        let n = s.size();
        let mut fiber_of = vec![usize::MAX; n];
        let mut fibers = Vec::new();
        for x in 0..n {
            if fiber_of[x] != usize::MAX {
                continue;
            }
            let id = fibers.len();
            let fiber: Vec<usize> = (0..n)
                .filter(|&y| indices.contains(&s.label(x, y)))
                .collect();
            for &y in &fiber {
                // closedness makes F(x) an equivalence class
                debug_assert_eq!(fiber_of[y], usize::MAX);
                fiber_of[y] = id;
            }
            fibers.push(fiber);
        }
        Ok(Self {
            indices,
            fibers,
            fiber_of,
        })
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    /// Fibers ordered by smallest member; each fiber sorted.
    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn fiber_of(&self, x: usize) -> usize {
        self.fiber_of[x]
    }

    pub fn fiber_size(&self) -> usize {
        self.fibers[0].len()
    }

    /// Neither `{0}` nor every relation.
    pub fn is_proper(&self, s: &Scheme) -> bool {
        self.indices.len() > 1 && self.indices.len() < s.d() + 1
    }
}

/// `⟨K⟩`, the smallest closed subset containing `K`.
pub fn closure(s: &Scheme, k: &IndexSet) -> Result<ClosedSubset, ClosureError> {
    check_indices(s, k)?;
    let mut set = k.clone();
    set.insert(0);
    loop {
        let stars: IndexSet = set.iter().map(|&i| s.star(i)).collect();
        let grown: IndexSet = set
            .iter()
            .copied()
            .chain(stars.iter().copied())
            .chain(product_unchecked(s, &stars, &set))
            .collect();
        if grown == set {
            break;
        }
        set = grown;
    }
    ClosedSubset::from_indices(s, set)
}

/// A subscheme on one fiber, with the map from host relation index to its
/// dense index in the subscheme.
#[derive(Debug, Clone)]
pub struct Subscheme {
    pub scheme: Scheme,
    pub points: Vec<usize>,
    pub index_map: BTreeMap<usize, usize>,
}

pub fn subscheme(s: &Scheme, f: &ClosedSubset, x: usize) -> Result<Subscheme, ClosureError> {
    if x >= s.size() {
        return Err(ClosureError::PointOutOfRange(x));
    }
    let points = f.fibers()[f.fiber_of(x)].clone();
    let index_map: BTreeMap<usize, usize> = f
        .indices()
        .iter()
        .enumerate()
        .map(|(dense, &orig)| (orig, dense))
        .collect();
    let m = points.len();
    let mut labels = vec![0u16; m * m];
    for (a, &u) in points.iter().enumerate() {
        for (b, &v) in points.iter().enumerate() {
            labels[a * m + b] = index_map[&s.label(u, v)] as u16;
        }
    }
    let scheme = Scheme::from_labels(m, index_map.len() - 1, labels)?
        .with_name(format!("{}[{:?}]({x})", s.name(), f.indices()))
        .with_provenance(format!("subscheme({}, {:?}, {x})", s.name(), f.indices()));
    Ok(Subscheme {
        scheme,
        points,
        index_map,
    })
}

/// The quotient scheme over a closed subset. `relation_map[i]` is the
/// quotient relation containing `R_i^F`.
#[derive(Debug, Clone)]
pub struct QuotientScheme {
    pub scheme: Scheme,
    pub fibers: Vec<Vec<usize>>,
    pub relation_map: Vec<usize>,
}

pub fn quotient_scheme(s: &Scheme, f: &ClosedSubset) -> Result<QuotientScheme, ClosureError> {
    let m = f.fibers().len();
    let c = s.d() + 1;
    // fiber-pair sets R_i^F
    let mut images = vec![BitMatrix::new(m); c];
    for x in 0..s.size() {
        for y in 0..s.size() {
            images[s.label(x, y)].set(f.fiber_of(x), f.fiber_of(y));
        }
    }
    let mut classes: Vec<BitMatrix> = Vec::new();
    let mut relation_map = vec![0; c];
    for (i, img) in images.into_iter().enumerate() {
        match classes.iter().position(|cl| *cl == img) {
            Some(q) => relation_map[i] = q,
            None => {
                relation_map[i] = classes.len();
                classes.push(img);
            }
        }
    }
    let mut labels = vec![u16::MAX; m * m];
    for (q, cl) in classes.iter().enumerate() {
        for (b, cc) in cl.ones() {
            if labels[b * m + cc] != u16::MAX {
                return Err(SchemeError::NotPartition {
                    x: b,
                    y: cc,
                    kind: crate::scheme::PartitionDefect::Duplicated,
                }
                .into());
            }
            labels[b * m + cc] = q as u16;
        }
    }
    let scheme = Scheme::from_labels(m, classes.len() - 1, labels)?
        .with_name(format!("{}/{:?}", s.name(), f.indices()))
        .with_provenance(format!("quotient({}, {:?})", s.name(), f.indices()));
    Ok(QuotientScheme {
        scheme,
        fibers: f.fibers().to_vec(),
        relation_map,
    })
}

/// Wreath product on `X × Y`: point `(x, y)` is numbered `y * |X| + x`.
/// Relations `1..=d_inner` live inside the fibers `X × {y}`, the remaining
/// ones are the outer relations lifted to fibers.
pub fn wreath_product(inner: &Scheme, outer: &Scheme) -> Scheme {
    let (nx, ny) = (inner.size(), outer.size());
    let n = nx * ny;
    let di = inner.d();
    let mut labels = vec![0u16; n * n];
    for y1 in 0..ny {
        for x1 in 0..nx {
            let p = y1 * nx + x1;
            for y2 in 0..ny {
                for x2 in 0..nx {
                    let l = if y1 == y2 {
                        inner.label(x1, x2)
                    } else {
                        di + outer.label(y1, y2)
                    };
                    labels[p * n + y2 * nx + x2] = l as u16;
                }
            }
        }
    }
    Scheme::from_labels(n, di + outer.d(), labels)
        .expect("wreath product of schemes is a scheme")
        .with_name(format!("wreath({},{})", inner.name(), outer.name()))
        .with_provenance(format!(
            "wreath_product({}, {})",
            inner.name(),
            outer.name()
        ))
}

/// Muzychuk's conditions for nested closed subsets `K ⊆ F`:
/// (a) `Σ_{i∈K} A_i A_j = (Σ_{i∈K} k_i) A_j = Σ_{i∈K} A_j A_i` for every
/// `j ∉ F`, evaluated entrywise on the incidence tables, and
/// (b) `K R_i = R_i K` for every relation.
pub fn wedge_conditions(s: &Scheme, k: &IndexSet, f: &IndexSet) -> Result<bool, ClosureError> {
    for set in [k, f] {
        check_indices(s, set)?;
        if !is_closed(s, set) {
            return Err(ClosureError::NotClosed(set.clone()));
        }
    }
    if !k.is_subset(f) {
        return Err(ClosureError::NotNested {
            inner: k.clone(),
            outer: f.clone(),
        });
    }
    let n = s.size();
    let mut k_union = BitMatrix::new(n);
    for &i in k {
        k_union.union_with(s.relation(i));
    }
    let k_total: u64 = k.iter().map(|&i| s.valency(i)).sum();
    for j in (0..=s.d()).filter(|j| !f.contains(j)) {
        let rj = s.relation(j);
        let rj_t = s.relation(s.star(j));
        for x in 0..n {
            for y in 0..n {
                let expect = if rj.get(x, y) { k_total } else { 0 };
                let left = and_count(k_union.row(x), rj_t.row(y));
                let right = and_count(rj.row(x), k_union.row(y));
                if left != expect || right != expect {
                    return Ok(false);
                }
            }
        }
    }
    for i in 0..=s.d() {
        let single = IndexSet::from([i]);
        if product_unchecked(s, k, &single) != product_unchecked(s, &single, k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `s` as the wreath product of a 1-class scheme (on the fibers of
/// `{0, a}`) and `quotient`.
#[derive(Debug, Clone)]
pub struct WreathDecomposition {
    pub a: usize,
    pub fibers: ClosedSubset,
    pub quotient: QuotientScheme,
}

/// All symmetric `a` with `⟨R_a⟩ = {R_0, R_a}` such that every other relation
/// is blind to the fibers of `{0, a}`, each re-verified by reconstructing
/// the wreath product.
pub fn wreath_decompositions(s: &Scheme) -> Vec<WreathDecomposition> {
    (1..=s.d()).filter_map(|a| decompose_at(s, a)).collect()
}

/// The least-index decomposition from [`wreath_decompositions`].
pub fn wreath_decomposition(s: &Scheme) -> Option<WreathDecomposition> {
    (1..=s.d()).find_map(|a| decompose_at(s, a))
}

fn decompose_at(s: &Scheme, a: usize) -> Option<WreathDecomposition> {
    let pair = IndexSet::from([0, a]);
    let fibers = closure(s, &IndexSet::from([a])).ok()?;
    if fibers.indices() != &pair {
        return None;
    }
    let ka = s.valency(a);
    if (1..=s.d()).any(|j| j != a && s.p(a, j, j) != ka) {
        return None;
    }
    let quotient = quotient_scheme(s, &fibers).ok()?;

    // reconstruction: s ≅ wreath(one_class(k_a + 1), quotient)
    let m = fibers.fiber_size();
    let rebuilt = wreath_product(&one_class_scheme(m), &quotient.scheme);
    let mut place = vec![0; s.size()];
    for (q, fiber) in fibers.fibers().iter().enumerate() {
        for (t, &x) in fiber.iter().enumerate() {
            place[x] = q * m + t;
        }
    }
    let relabel = |i: usize| match i {
        0 => 0,
        i if i == a => 1,
        i => 1 + quotient.relation_map[i],
    };
    let consistent = (0..s.size()).all(|x| {
        (0..s.size()).all(|y| rebuilt.label(place[x], place[y]) == relabel(s.label(x, y)))
    });
    let injective = {
        let outer: BTreeSet<usize> = (1..=s.d())
            .filter(|&j| j != a)
            .map(|j| quotient.relation_map[j])
            .collect();
        outer.len() == s.d() - 1
    };
    (consistent && injective).then_some(WreathDecomposition {
        a,
        fibers,
        quotient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{build_scheme, verify_identities};

    fn cyclic(n: usize, classes: &[&[usize]]) -> Scheme {
        let rels: Vec<Vec<(usize, usize)>> = classes
            .iter()
            .map(|c| {
                (0..n)
                    .flat_map(|x| c.iter().map(move |&g| (x, (x + g) % n)))
                    .collect()
            })
            .collect();
        build_scheme(n, &rels).unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    fn z3() -> Scheme {
        cyclic(3, &[&[1], &[2]])
    }

    fn z4() -> Scheme {
        cyclic(4, &[&[1], &[3], &[2]])
    }

    #[test]
    fn complex_products() {
        assert_eq!(
            complex_product(&z3(), &set(&[1]), &set(&[1])).unwrap(),
            set(&[2])
        );
        assert_eq!(
            complex_product(&z4(), &set(&[3]), &set(&[3])).unwrap(),
            set(&[0])
        );
        let paley = cyclic(7, &[&[1, 2, 4], &[3, 5, 6]]);
        assert_eq!(
            complex_product(&paley, &set(&[1]), &set(&[1])).unwrap(),
            set(&[1, 2])
        );
        assert_eq!(
            complex_product(&z3(), &set(&[3]), &set(&[1])).unwrap_err(),
            ClosureError::IndexOutOfRange(3, 2)
        );
    }

    #[test]
    fn closures_in_z4() {
        let c = closure(&z4(), &set(&[3])).unwrap();
        assert_eq!(c.indices(), &set(&[0, 3]));
        assert_eq!(c.fibers(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(
            closure(&z4(), &set(&[1])).unwrap().indices(),
            &set(&[0, 1, 2, 3])
        );
    }

    #[test]
    fn closure_of_wreath_inner() {
        let w = wreath_product(&z3(), &one_class_scheme(2));
        let c = closure(&w, &set(&[1])).unwrap();
        assert_eq!(c.indices(), &set(&[0, 1, 2]));
        assert_eq!(c.fibers(), &[vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(c.is_proper(&w));
    }

    #[test]
    fn subschemes() {
        let w = wreath_product(&z3(), &one_class_scheme(2));
        let c = closure(&w, &set(&[1])).unwrap();
        for x in 0..6 {
            let sub = subscheme(&w, &c, x).unwrap();
            assert_eq!(sub.scheme, z3());
        }
        let trivial = ClosedSubset::from_indices(&w, set(&[0])).unwrap();
        assert_eq!(subscheme(&w, &trivial, 4).unwrap().scheme.size(), 1);
        let full = closure(&w, &set(&[1, 3])).unwrap();
        assert_eq!(subscheme(&w, &full, 2).unwrap().scheme, w);
    }

    #[test]
    fn quotients() {
        let w = wreath_product(&z3(), &one_class_scheme(2));
        let c = closure(&w, &set(&[1])).unwrap();
        let q = quotient_scheme(&w, &c).unwrap();
        assert_eq!(q.scheme, one_class_scheme(2));
        assert_eq!(q.relation_map, vec![0, 0, 0, 1]);

        let trivial = ClosedSubset::from_indices(&z4(), set(&[0])).unwrap();
        assert_eq!(quotient_scheme(&z4(), &trivial).unwrap().scheme, z4());

        let anti = closure(&z4(), &set(&[3])).unwrap();
        assert_eq!(
            quotient_scheme(&z4(), &anti).unwrap().scheme,
            one_class_scheme(2)
        );
    }

    #[test]
    fn wreath_shapes() {
        let a = wreath_product(&one_class_scheme(2), &z3());
        assert_eq!((a.size(), a.d()), (6, 3));
        assert_eq!(a.valencies(), &[1, 1, 2, 2]);
        verify_identities(&a).unwrap();

        let b = wreath_product(&z3(), &one_class_scheme(2));
        assert_eq!(b.valencies(), &[1, 1, 1, 3]);

        let point = build_scheme(1, &[]).unwrap();
        assert_eq!(wreath_product(&z4(), &point), z4());
    }

    #[test]
    fn wedge_condition_cases() {
        let w = wreath_product(&z3(), &one_class_scheme(2));
        let f = set(&[0, 1, 2]);
        assert!(wedge_conditions(&w, &f, &f).unwrap());
        assert!(wedge_conditions(&z4(), &set(&[0]), &set(&[0])).unwrap());
        // A_3 A_1 = A_2 ≠ A_1 in Z_4
        assert!(!wedge_conditions(&z4(), &set(&[0, 3]), &set(&[0, 3])).unwrap());
        assert!(matches!(
            wedge_conditions(&z4(), &set(&[0, 1]), &set(&[0, 1])),
            Err(ClosureError::NotClosed(_))
        ));
        assert!(matches!(
            wedge_conditions(&w, &f, &set(&[0])),
            Err(ClosureError::NotNested { .. })
        ));
    }

    #[test]
    fn wreath_decomposition_cases() {
        let w = wreath_product(&one_class_scheme(2), &z3());
        let dec = wreath_decomposition(&w).unwrap();
        assert_eq!(dec.a, 1);
        assert_eq!(dec.quotient.scheme, z3());
        assert!(wreath_decomposition(&z3()).is_none());
        // p[3][1][1] = 0 ≠ k_3 in Z_4
        assert_eq!(z4().p(3, 1, 1), 0);
        assert!(wreath_decomposition(&z4()).is_none());
    }
}
