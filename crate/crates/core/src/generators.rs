//! Scheme corpus: circulant schemes on `Z_n`, their enumeration, and a
//! small catalog of named constructions.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::closure::wreath_product;
use crate::digraph::Digraph;
use crate::scheme::{one_class_scheme, Scheme, SchemeError};

/// Largest modulus searched by exhaustive set-partition enumeration.
pub const EXHAUSTIVE_MAX_MODULUS: usize = 8;
/// Largest modulus [`enumerate_circulant`] accepts.
pub const MAX_MODULUS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("bad circulant spec: {0}")]
    BadSpec(String),
    #[error("modulus {0} outside 2..={MAX_MODULUS}")]
    BadRange(usize),
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("cannot parse catalog expression `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CirculantError {
    #[error(transparent)]
    BadSpec(#[from] GenError),
    #[error("difference classes do not form a scheme: {0}")]
    NotSchurRing(SchemeError),
}

/// A partition of `{1..n-1}` into difference classes on `Z_n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CirculantSpec {
    pub modulus: usize,
    pub classes: Vec<Vec<usize>>,
}

impl CirculantSpec {
    pub fn new(modulus: usize, classes: Vec<Vec<usize>>) -> Self {
        Self { modulus, classes }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let n = self.modulus;
        if n == 0 {
            return Err(GenError::BadSpec("modulus must be positive".into()));
        }
        let mut seen = vec![false; n];
        for class in &self.classes {
            if class.is_empty() {
                return Err(GenError::BadSpec("empty class".into()));
            }
            for &c in class {
                if c == 0 || c >= n {
                    return Err(GenError::BadSpec(format!("element {c} not in 1..{n}")));
                }
                if seen[c] {
                    return Err(GenError::BadSpec(format!("element {c} appears twice")));
                }
                seen[c] = true;
            }
        }
        if let Some(c) = (1..n).find(|&c| !seen[c]) {
            return Err(GenError::BadSpec(format!("element {c} is not covered")));
        }
        let sets: BTreeSet<Vec<usize>> = self.classes.iter().map(|c| sorted(c.clone())).collect();
        for class in &self.classes {
            let neg = sorted(class.iter().map(|&c| n - c).collect());
            if !sets.contains(&neg) {
                return Err(GenError::BadSpec(format!(
                    "negation of class {class:?} is not a class"
                )));
            }
        }
        Ok(())
    }

    fn class_of(&self) -> Vec<u16> {
        let mut of = vec![0u16; self.modulus];
        for (k, class) in self.classes.iter().enumerate() {
            for &c in class {
                of[c] = (k + 1) as u16;
            }
        }
        of
    }
}

impl fmt::Display for CirculantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circulant({};", self.modulus)?;
        for (k, class) in self.classes.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{class:?}")?;
        }
        f.write_str(")")
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// The translation scheme `R_C = {(x, y) : y - x ∈ C}` on `Z_n`.
pub fn circulant_scheme(spec: &CirculantSpec) -> Result<Scheme, CirculantError> {
    spec.validate()?;
    let n = spec.modulus;
    let of = spec.class_of();
    let labels = (0..n * n).map(|i| of[(i % n + n - i / n) % n]).collect();
    Scheme::from_labels(n, spec.classes.len(), labels)
        .map(|s| s.with_name(spec.to_string()))
        .map_err(CirculantError::NotSchurRing)
}

/// Options for [`enumerate_circulant`] above the exhaustive range.
#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    /// Generators of one multiplier subgroup; `None` scans every subgroup of
    /// the units generated by at most two elements.
    pub multipliers: Option<Vec<usize>>,
    /// Subgroups with more orbits on `{1..n-1}` than this are skipped.
    pub max_orbits: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            multipliers: None,
            max_orbits: 10,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn units(n: usize) -> Vec<usize> {
    (1..n).filter(|&u| gcd(u, n) == 1).collect()
}

fn subgroup(n: usize, gens: &[usize]) -> BTreeSet<usize> {
    let mut group = BTreeSet::from([1 % n]);
    loop {
        let next: BTreeSet<usize> = group
            .iter()
            .flat_map(|&g| gens.iter().map(move |&h| g * h % n))
            .chain(group.iter().copied())
            .collect();
        if next == group {
            return group;
        }
        group = next;
    }
}

/// Orbits of a multiplier group on `{1..n-1}`, each sorted, ordered by minimum.
fn orbits(n: usize, group: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for c in 1..n {
        if done[c] {
            continue;
        }
        let orbit: BTreeSet<usize> = group.iter().map(|&g| c * g % n).collect();
        for &o in &orbit {
            done[o] = true;
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

/// Calls `visit` with every set partition of `0..k` as a restricted growth
/// string.
fn for_each_partition(k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(rgs: &mut Vec<usize>, k: usize, max: usize, visit: &mut dyn FnMut(&[usize])) {
        if rgs.len() == k {
            visit(rgs);
            return;
        }
        for b in 0..=max + 1 {
            if rgs.is_empty() && b > 0 {
                break;
            }
            rgs.push(b);
            let next_max = if rgs.len() == 1 { 0 } else { max.max(b) };
            rec(rgs, k, next_max, visit);
            rgs.pop();
        }
    }
    if k == 0 {
        visit(&[]);
        return;
    }
    let mut rgs = Vec::with_capacity(k);
    rec(&mut rgs, k, 0, visit);
}

/// Coarsenings of `atoms` (a partition of `{1..n-1}`) that are closed under
/// negation, in canonical form: classes sorted, ordered by minimum.
fn negation_closed_coarsenings(
    n: usize,
    atoms: &[Vec<usize>],
    out: &mut BTreeSet<Vec<Vec<usize>>>,
) {
    let mut atom_of = vec![0; n];
    for (a, atom) in atoms.iter().enumerate() {
        for &c in atom {
            atom_of[c] = a;
        }
    }
    for_each_partition(atoms.len(), &mut |rgs| {
        let blocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        // negation must map blocks onto blocks
        let mut image = vec![usize::MAX; blocks];
        for (a, atom) in atoms.iter().enumerate() {
            let b = rgs[a];
            let nb = rgs[atom_of[n - atom[0]]];
            if image[b] == usize::MAX {
                image[b] = nb;
            } else if image[b] != nb {
                return;
            }
        }
        let mut classes = vec![Vec::new(); blocks];
        for (a, atom) in atoms.iter().enumerate() {
            classes[rgs[a]].extend_from_slice(atom);
        }
        let mut classes: Vec<Vec<usize>> = classes.into_iter().map(sorted).collect();
        classes.sort();
        out.insert(classes);
    });
}

/// Candidate difference-class partitions of `Z_n` in deterministic order.
pub fn circulant_candidates(
    n: usize,
    opts: &EnumerateOptions,
) -> Result<Vec<CirculantSpec>, GenError> {
    if !(2..=MAX_MODULUS).contains(&n) {
        return Err(GenError::BadRange(n));
    }
    let mut found = BTreeSet::new();
    if n <= EXHAUSTIVE_MAX_MODULUS {
        let atoms: Vec<Vec<usize>> = (1..n).map(|c| vec![c]).collect();
        negation_closed_coarsenings(n, &atoms, &mut found);
    } else {
        let groups: BTreeSet<BTreeSet<usize>> = match &opts.multipliers {
            Some(gens) => {
                if let Some(&g) = gens.iter().find(|&&g| gcd(g % n, n) != 1) {
                    return Err(GenError::BadParams(format!("{g} is not a unit mod {n}")));
                }
                BTreeSet::from([subgroup(n, gens)])
            }
            None => {
                let u = units(n);
                let mut gs = BTreeSet::new();
                for (i, &a) in u.iter().enumerate() {
                    for &b in &u[i..] {
                        gs.insert(subgroup(n, &[a, b]));
                    }
                }
                gs
            }
        };
        for group in groups {
            let atoms = orbits(n, &group);
            if atoms.len() <= opts.max_orbits {
                negation_closed_coarsenings(n, &atoms, &mut found);
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|classes| CirculantSpec::new(n, classes))
        .collect())
}

/// Circulant schemes on `Z_n`, named `circ-n{n}-{index}` in emission order.
pub fn enumerate_circulant(
    n: usize,
    opts: &EnumerateOptions,
) -> Result<impl Iterator<Item = Scheme>, GenError> {
    let specs = circulant_candidates(n, opts)?;
    Ok(specs
        .into_iter()
        .filter_map(|spec| {
            let scheme = circulant_scheme(&spec).ok()?;
            Some(scheme.with_provenance(spec.to_string()))
        })
        .enumerate()
        .map(move |(i, s)| s.with_name(format!("circ-n{n}-{i}"))))
}

fn is_prime(q: usize) -> bool {
    q >= 2
        && (2..)
            .take_while(|d| d * d <= q)
            .all(|d| !q.is_multiple_of(d))
}

/// Nonzero squares modulo a prime.
pub fn quadratic_residues(q: usize) -> Vec<usize> {
    sorted(
        (1..q)
            .map(|x| x * x % q)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    )
}

/// Arcs `x → x + g` for every `g` in `gens`.
pub fn circulant_digraph(n: usize, gens: &[usize]) -> Digraph {
    Digraph::from_arcs(
        n,
        (0..n).flat_map(|x| gens.iter().map(move |&g| (x, (x + g) % n))),
    )
    .expect("generators are nonzero residues")
}

pub fn directed_cycle_digraph(n: usize) -> Digraph {
    circulant_digraph(n, &[1])
}

pub fn paley_digraph(q: usize) -> Result<Digraph, GenError> {
    check_paley(q)?;
    Ok(circulant_digraph(q, &quadratic_residues(q)))
}

fn check_paley(q: usize) -> Result<(), GenError> {
    if !is_prime(q) || q % 4 != 3 {
        return Err(GenError::BadParams(format!(
            "paley_tournament needs a prime q ≡ 3 (mod 4), got {q}"
        )));
    }
    Ok(())
}

/// A parsed catalog expression such as `wreath(thin_cyclic(3),one_class(2))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogExpr {
    DirectedCycle(usize),
    PaleyTournament(usize),
    ThinCyclic(usize),
    OneClass(usize),
    Wreath(Box<CatalogExpr>, Box<CatalogExpr>),
    LexBlowup(Box<CatalogExpr>, usize),
}

impl fmt::Display for CatalogExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogExpr::DirectedCycle(n) => write!(f, "directed_cycle({n})"),
            CatalogExpr::PaleyTournament(q) => write!(f, "paley_tournament({q})"),
            CatalogExpr::ThinCyclic(n) => write!(f, "thin_cyclic({n})"),
            CatalogExpr::OneClass(m) => write!(f, "one_class({m})"),
            CatalogExpr::Wreath(a, b) => write!(f, "wreath({a},{b})"),
            CatalogExpr::LexBlowup(a, m) => write!(f, "lex_blowup({a},{m})"),
        }
    }
}

enum Arg {
    Int(usize),
    Expr(CatalogExpr),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self) -> GenError {
        GenError::Parse(self.src.to_string())
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> Result<(), GenError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err())
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(&pred) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn arg(&mut self) -> Result<Arg, GenError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            let digits = self.take_while(|c| c.is_ascii_digit());
            digits.parse().map(Arg::Int).map_err(|_| self.err())
        } else {
            self.expr().map(Arg::Expr)
        }
    }

    fn expr(&mut self) -> Result<CatalogExpr, GenError> {
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if name.is_empty() {
            return Err(self.err());
        }
        self.eat('(')?;
        let mut args = vec![self.arg()?];
        loop {
            self.skip_ws();
            if self.src[self.pos..].starts_with(',') {
                self.pos += 1;
                args.push(self.arg()?);
            } else {
                break;
            }
        }
        self.eat(')')?;
        let bad = || GenError::BadParams(format!("wrong arguments for {name}"));
        let mut it = args.into_iter();
        let expr = match (name, it.next(), it.next(), it.next()) {
            ("directed_cycle", Some(Arg::Int(n)), None, None) => CatalogExpr::DirectedCycle(n),
            ("paley_tournament", Some(Arg::Int(q)), None, None) => CatalogExpr::PaleyTournament(q),
            ("thin_cyclic", Some(Arg::Int(n)), None, None) => CatalogExpr::ThinCyclic(n),
            ("one_class", Some(Arg::Int(m)), None, None) => CatalogExpr::OneClass(m),
            ("wreath", Some(Arg::Expr(a)), Some(Arg::Expr(b)), None) => {
                CatalogExpr::Wreath(Box::new(a), Box::new(b))
            }
            ("lex_blowup", Some(Arg::Expr(a)), Some(Arg::Int(m)), None) => {
                CatalogExpr::LexBlowup(Box::new(a), m)
            }
            (
                "directed_cycle" | "paley_tournament" | "thin_cyclic" | "one_class" | "wreath"
                | "lex_blowup",
                ..,
            ) => return Err(bad()),
            (other, ..) => return Err(GenError::UnknownName(other.to_string())),
        };
        Ok(expr)
    }
}

impl CatalogExpr {
    pub fn parse(src: &str) -> Result<Self, GenError> {
        let mut p = Parser { src, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.err());
        }
        Ok(e)
    }

    pub fn build(&self) -> Result<Scheme, GenError> {
        let at_least = |what: &str, v: usize, min: usize| {
            if v < min {
                Err(GenError::BadParams(format!(
                    "{what} needs at least {min}, got {v}"
                )))
            } else {
                Ok(())
            }
        };
        let scheme = match self {
            CatalogExpr::DirectedCycle(n) => {
                at_least("directed_cycle", *n, 2)?;
                let classes = (1..*n).map(|c| vec![c]).collect();
                circulant_from(*n, classes)?
            }
            CatalogExpr::PaleyTournament(q) => {
                check_paley(*q)?;
                let qr = quadratic_residues(*q);
                let nqr = (1..*q).filter(|c| !qr.contains(c)).collect();
                circulant_from(*q, vec![qr, nqr])?
            }
            CatalogExpr::ThinCyclic(n) => {
                at_least("thin_cyclic", *n, 2)?;
                let mut classes = Vec::new();
                for c in 1..=*n / 2 {
                    classes.push(vec![c]);
                    if n - c != c {
                        classes.push(vec![n - c]);
                    }
                }
                circulant_from(*n, classes)?
            }
            CatalogExpr::OneClass(m) => {
                at_least("one_class", *m, 2)?;
                one_class_scheme(*m)
            }
            CatalogExpr::Wreath(a, b) => wreath_product(&a.build()?, &b.build()?),
            CatalogExpr::LexBlowup(a, m) => {
                at_least("lex_blowup", *m, 2)?;
                wreath_product(&one_class_scheme(*m), &a.build()?)
            }
        };
        Ok(scheme.with_name(self.to_string()))
    }
}

fn circulant_from(n: usize, classes: Vec<Vec<usize>>) -> Result<Scheme, GenError> {
    circulant_scheme(&CirculantSpec::new(n, classes))
        .map_err(|e| GenError::BadParams(e.to_string()))
}

/// Builds a catalog scheme from its expression string.
pub fn catalog(expr: &str) -> Result<Scheme, GenError> {
    CatalogExpr::parse(expr)?.build()
}

/// Named schemes used alongside the circulant corpus.
pub fn catalog_corpus() -> Vec<Scheme> {
    let mut names = vec![
        "thin_cyclic(3)".to_string(),
        "thin_cyclic(4)".to_string(),
        "paley_tournament(7)".to_string(),
    ];
    for m in 2..=4 {
        names.push(format!("wreath(one_class({m}),thin_cyclic(3))"));
        names.push(format!("wreath(thin_cyclic(3),one_class({m}))"));
    }
    names
        .iter()
        .map(|n| catalog(n).expect("catalog corpus entries are valid"))
        .collect()
}

/// Every circulant scheme on `Z_n` for `2 ≤ n ≤ max_modulus`, with default
/// enumeration options.
pub fn circulant_corpus(max_modulus: usize) -> Vec<Scheme> {
    (2..=max_modulus.min(MAX_MODULUS))
        .flat_map(|n| {
            enumerate_circulant(n, &EnumerateOptions::default())
                .expect("modulus in range")
                .collect::<Vec<_>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paley7_circulant() {
        let s =
            circulant_scheme(&CirculantSpec::new(7, vec![vec![1, 2, 4], vec![3, 5, 6]])).unwrap();
        assert_eq!(s.p(1, 1, 2), 2);
        assert_eq!(s, catalog("paley_tournament(7)").unwrap());
    }

    #[test]
    fn z4_thin() {
        let s = circulant_scheme(&CirculantSpec::new(4, vec![vec![1], vec![3], vec![2]])).unwrap();
        assert_eq!(s, catalog("thin_cyclic(4)").unwrap());
        assert_eq!(s.star(1), 2);
    }

    #[test]
    fn non_schur_partition() {
        let spec = CirculantSpec::new(6, vec![vec![1, 2], vec![4, 5], vec![3]]);
        assert!(matches!(
            circulant_scheme(&spec),
            Err(CirculantError::NotSchurRing(
                SchemeError::NonConstantIntersection { .. }
            ))
        ));
    }

    #[test]
    fn bad_specs() {
        for classes in [
            vec![vec![1, 2]],
            vec![vec![1], vec![1, 2, 3]],
            vec![vec![1], vec![2, 3]],
            vec![vec![], vec![1, 2, 3]],
        ] {
            assert!(matches!(
                circulant_scheme(&CirculantSpec::new(4, classes)),
                Err(CirculantError::BadSpec(_))
            ));
        }
    }

    #[test]
    fn small_enumerations() {
        let opts = EnumerateOptions::default();
        let three: Vec<Scheme> = enumerate_circulant(3, &opts).unwrap().collect();
        assert_eq!(three.len(), 2);
        let four: Vec<Scheme> = enumerate_circulant(4, &opts).unwrap().collect();
        let ds: Vec<usize> = four.iter().map(Scheme::d).collect();
        assert!(ds.contains(&1) && ds.contains(&2) && ds.contains(&3));
        assert!(four
            .iter()
            .any(|s| s.nonsymmetric_pairs().len() == 1 && s.d() == 3));
        let seven: Vec<Scheme> = enumerate_circulant(7, &opts).unwrap().collect();
        let paley = catalog("paley_tournament(7)").unwrap();
        assert!(seven.contains(&paley));
        assert_eq!(
            enumerate_circulant(1, &opts).err(),
            Some(GenError::BadRange(1))
        );
    }

    #[test]
    fn partitions_counted_by_bell_numbers() {
        for (k, bell) in [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (7, 877)] {
            let mut count = 0;
            for_each_partition(k, &mut |_| count += 1);
            assert_eq!(count, bell, "Bell({k})");
        }
    }

    #[test]
    fn multiplier_orbits() {
        let g = subgroup(13, &[3]);
        assert_eq!(g, BTreeSet::from([1, 3, 9]));
        let o = orbits(13, &g);
        assert_eq!(o.len(), 4);
        assert_eq!(o[0], vec![1, 3, 9]);
    }

    #[test]
    fn catalog_parsing() {
        let w = catalog("wreath(thin_cyclic(3), one_class(2))").unwrap();
        assert_eq!((w.size(), w.d()), (6, 3));
        assert_eq!(w.name(), "wreath(thin_cyclic(3),one_class(2))");
        assert_eq!(catalog("lex_blowup(directed_cycle(3),2)").unwrap().d(), 3);
        assert!(matches!(
            catalog("petersen(10)"),
            Err(GenError::UnknownName(_))
        ));
        assert!(matches!(
            catalog("paley_tournament(5)"),
            Err(GenError::BadParams(_))
        ));
        assert!(matches!(
            catalog("wreath(3,4)"),
            Err(GenError::BadParams(_))
        ));
        assert!(matches!(catalog("thin_cyclic(3"), Err(GenError::Parse(_))));
    }
}
