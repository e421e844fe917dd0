//! Orbits of a base point under a finitely generated automorphism group.
//!
//! Orbits are enumerated breadth-first by word length. A candidate point is
//! dropped when it lies within `dedup_tol` (pseudo-hyperbolic) of a point
//! already accepted, so each orbit point is recorded once with the first word
//! that reaches it.
//!
//! For the two amenable examples (the hyperbolic cyclic group and the group
//! generated by `β(z) = −z`, `γ(z) = (a − z)/(1 − az)`) orbit points are
//! evaluated from the closed form of `γ^(n)` rather than by chaining
//! compositions, and the Blaschke sum carries a geometric tail bound.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{
    cyclic_center_complement, pseudo_hyperbolic, DiskAutomorphism, DiskPoint, BOUNDARY_MARGIN,
};

pub const DEFAULT_DEDUP_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupKind {
    Cyclic { a: f64 },
    Z2Z2 { a: f64 },
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPresentation {
    kind: GroupKind,
    generators: Vec<DiskAutomorphism>,
}

impl GroupPresentation {
    /// Infinite cyclic group generated by `γ(z) = (z − a)/(1 − az)`.
    pub fn cyclic(a: f64) -> Result<Self> {
        check_hyperbolic_parameter(a)?;
        Ok(Self {
            kind: GroupKind::Cyclic { a },
            generators: vec![DiskAutomorphism::hyperbolic(a)?],
        })
    }

    /// `Z₂ ∗ Z₂` generated by `β(z) = −z` and `γ(z) = (a − z)/(1 − az)`.
    pub fn z2z2(a: f64) -> Result<Self> {
        check_hyperbolic_parameter(a)?;
        let one = Complex64::new(1.0, 0.0);
        let beta = DiskAutomorphism::rotation(-one)?;
        let gamma = DiskAutomorphism::new(DiskPoint::real(a)?, one)?;
        Ok(Self { kind: GroupKind::Z2Z2 { a }, generators: vec![beta, gamma] })
    }

    pub fn generic(generators: Vec<DiskAutomorphism>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidGroup("at least one generator is required".into()));
        }
        if let Some(i) = generators.iter().position(|g| g.is_identity(1e-12)) {
            return Err(Error::InvalidGroup(format!("generator {i} is the identity")));
        }
        if generators.len() > 26 {
            return Err(Error::InvalidGroup("at most 26 generators are supported".into()));
        }
        Ok(Self { kind: GroupKind::Generic, generators })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn generators(&self) -> &[DiskAutomorphism] {
        &self.generators
    }

    fn letter_map(&self, letter: Letter) -> DiskAutomorphism {
        let g = self.generators[letter.generator];
        if letter.inverse {
            g.inverse()
        } else {
            g
        }
    }

    /// The automorphism a word denotes (leftmost letter applied last).
    pub fn word_map(&self, word: &Word) -> Result<DiskAutomorphism> {
        if let Some(l) = word.0.iter().find(|l| l.generator >= self.generators.len()) {
            return Err(Error::InvalidInput(format!("word uses unknown generator {}", l.generator)));
        }
        Ok(match self.kind {
            GroupKind::Cyclic { a } => {
                DiskAutomorphism::iterate_cyclic(a, cyclic_exponent(word))?
            }
            GroupKind::Z2Z2 { a } => {
                let (m, has_beta) = z2z2_normal_form(&Z2Letter::from_word(word)?);
                z2z2_element(a, m, has_beta)?
            }
            GroupKind::Generic => word
                .0
                .iter()
                .rev()
                .fold(DiskAutomorphism::identity(), |acc, &l| self.letter_map(l).compose(&acc)),
        })
    }
}

fn check_hyperbolic_parameter(a: f64) -> Result<()> {
    if !(a.abs() < 1.0) || a == 0.0 {
        return Err(Error::InvalidGroup(format!(
            "hyperbolic parameter must satisfy 0 < |a| < 1, got {a}"
        )));
    }
    Ok(())
}

/// One letter of a word: a generator or its formal inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

/// A word over the generators. Generator `i` prints as the `i`-th lowercase
/// letter, its inverse as the uppercase one; `"ab"` denotes `g₀ ∘ g₁`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                'a'..='z' => Ok(Letter { generator: ch as usize - 'a' as usize, inverse: false }),
                'A'..='Z' => Ok(Letter { generator: ch as usize - 'A' as usize, inverse: true }),
                _ => Err(Error::InvalidInput(format!("bad word letter {ch:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    fn prepend(&self, letter: Letter) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            let base = if l.inverse { b'A' } else { b'a' };
            write!(f, "{}", (base + l.generator as u8) as char)?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn cyclic_exponent(word: &Word) -> i64 {
    word.0.iter().map(|l| if l.inverse { -1 } else { 1 }).sum()
}

/// Letters of the `Z₂ ∗ Z₂` presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Z2Letter {
    Beta,
    Gamma,
}

impl Z2Letter {
    /// Accepts `β`/`γ` (or the generator letters `a`/`b`, either case).
    pub fn parse_word(s: &str) -> Result<Vec<Z2Letter>> {
        s.chars()
            .map(|ch| match ch {
                'β' | 'a' | 'A' => Ok(Z2Letter::Beta),
                'γ' | 'b' | 'B' => Ok(Z2Letter::Gamma),
                _ => Err(Error::InvalidInput(format!("bad Z2*Z2 letter {ch:?}"))),
            })
            .collect()
    }

    fn from_word(word: &Word) -> Result<Vec<Z2Letter>> {
        word.0
            .iter()
            .map(|l| match l.generator {
                0 => Ok(Z2Letter::Beta),
                1 => Ok(Z2Letter::Gamma),
                g => Err(Error::InvalidInput(format!("Z2*Z2 has no generator {g}"))),
            })
            .collect()
    }
}

/// Reduces a word in `β, γ` to `α^m β^ε` with `α = βγ`.
///
/// Uses `β² = γ² = 1`, `γ = βα` and `βα^kβ = α^{-k}`.
pub fn z2z2_normal_form(word: &[Z2Letter]) -> (i64, bool) {
    word.iter().fold((0i64, false), |(m, has_beta), letter| match (letter, has_beta) {
        (Z2Letter::Beta, _) => (m, !has_beta),
        // α^m β γ = α^m β β α = α^{m+1}
        (Z2Letter::Gamma, true) => (m + 1, false),
        // α^m γ = α^m β α = α^{m-1} β
        (Z2Letter::Gamma, false) => (m - 1, true),
    })
}

/// The reduced alternating word for `α^m β^ε`.
pub fn z2z2_word(m: i64, has_beta: bool) -> Word {
    let beta = Letter { generator: 0, inverse: false };
    let gamma = Letter { generator: 1, inverse: false };
    let k = m.unsigned_abs() as usize;
    let mut letters = Vec::with_capacity(2 * k + 1);
    if m >= 0 {
        for _ in 0..k {
            letters.extend([beta, gamma]);
        }
        if has_beta {
            letters.push(beta);
        }
    } else {
        for _ in 0..k {
            letters.extend([gamma, beta]);
        }
        if has_beta {
            // (γβ)^k β = (γβ)^{k-1} γ
            letters.pop();
        }
    }
    Word(letters)
}

fn z2z2_element(a: f64, m: i64, has_beta: bool) -> Result<DiskAutomorphism> {
    let alpha_m = DiskAutomorphism::iterate_cyclic(a, m)?;
    Ok(if has_beta {
        alpha_m.compose(&DiskAutomorphism::rotation(Complex64::new(-1.0, 0.0))?)
    } else {
        alpha_m
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    pub max_word_length: usize,
    pub dedup_tol: f64,
    pub max_points: usize,
    /// Candidates with `1 − |p| < horizon` are counted as saturated and
    /// dropped: they are numerically on the circle.
    pub horizon: f64,
}

impl OrbitOptions {
    pub fn new(max_word_length: usize) -> Self {
        Self {
            max_word_length,
            dedup_tol: DEFAULT_DEDUP_TOL,
            max_points: DEFAULT_MAX_POINTS,
            horizon: BOUNDARY_MARGIN,
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_dedup_tol(mut self, tol: f64) -> Self {
        self.dedup_tol = tol;
        self
    }

    pub fn with_max_points(mut self, cap: usize) -> Self {
        self.max_points = cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub word: Word,
    pub level: usize,
    pub point: DiskPoint,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub base: DiskPoint,
    pub entries: Vec<OrbitEntry>,
    pub dedup_tol: f64,
    pub max_word_length: usize,
    /// Largest word length up to which no candidate was saturated.
    pub complete_depth: usize,
    pub saturated: usize,
    pub partial_sum: f64,
    pub tail_bound: Option<f64>,
}

impl Orbit {
    pub fn points(&self) -> impl Iterator<Item = DiskPoint> + '_ {
        self.entries.iter().map(|e| e.point)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of leading entries with word length at most `depth`.
    pub fn prefix_len(&self, depth: usize) -> usize {
        self.entries.partition_point(|e| e.level <= depth)
    }
}

/// Spatial hash over accepted points. Pseudo-hyperbolic distance at most
/// `tol` forces Euclidean distance at most `2·tol`, so the 3×3 neighborhood
/// of cells of side `2·tol` holds every possible duplicate.
struct DedupIndex {
    cell: f64,
    tol: f64,
    buckets: HashMap<(i64, i64), Vec<Complex64>>,
}

impl DedupIndex {
    fn new(tol: f64) -> Self {
        Self { cell: 2.0 * tol, tol, buckets: HashMap::new() }
    }

    fn key(&self, z: Complex64) -> (i64, i64) {
        ((z.re / self.cell).floor() as i64, (z.im / self.cell).floor() as i64)
    }

    fn contains_near(&self, z: Complex64) -> bool {
        let (kx, ky) = self.key(z);
        (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                self.buckets
                    .get(&(kx + dx, ky + dy))
                    .is_some_and(|pts| pts.iter().any(|&p| pseudo_hyperbolic(z, p) <= self.tol))
            })
        })
    }

    fn insert(&mut self, z: Complex64) {
        self.buckets.entry(self.key(z)).or_default().push(z);
    }
}

struct Builder {
    opts: OrbitOptions,
    index: DedupIndex,
    entries: Vec<OrbitEntry>,
    saturated: usize,
    first_saturated_level: Option<usize>,
}

impl Builder {
    fn new(opts: OrbitOptions) -> Self {
        Self {
            opts,
            index: DedupIndex::new(opts.dedup_tol),
            entries: Vec::new(),
            saturated: 0,
            first_saturated_level: None,
        }
    }

    /// Returns true when the candidate was accepted.
    fn offer(&mut self, word: Word, level: usize, z: Complex64) -> Result<bool> {
        if !(1.0 - z.norm() >= self.opts.horizon) || DiskPoint::new(z).is_err() {
            self.saturated += 1;
            self.first_saturated_level.get_or_insert(level);
            return Ok(false);
        }
        if self.index.contains_near(z) {
            return Ok(false);
        }
        if self.entries.len() >= self.opts.max_points {
            return Err(Error::OrbitExplosion { cap: self.opts.max_points });
        }
        self.index.insert(z);
        let point = DiskPoint::new(z)?;
        self.entries.push(OrbitEntry { word, level, point, weight: 1.0 - point.norm() });
        Ok(true)
    }
}

/// Enumerates `Γ(base)` up to word length `opts.max_word_length`.
///
/// For `Z₂ ∗ Z₂` the length is counted in the normal form `α^m β^ε`: depth `N`
/// covers every element with `|m| ≤ N`, which makes the orbit of the origin
/// coincide, point for point and in order, with that of the cyclic subgroup
/// generated by `α = βγ`. Words are still reported as reduced strings in `β`
/// (`a`) and `γ` (`b`).
pub fn enumerate_orbit(
    group: &GroupPresentation,
    base: DiskPoint,
    opts: OrbitOptions,
) -> Result<Orbit> {
    if !(opts.dedup_tol > 0.0 && opts.dedup_tol <= 1e-6) {
        return Err(Error::InvalidInput(format!(
            "dedup_tol must lie in (0, 1e-6], got {}",
            opts.dedup_tol
        )));
    }
    let mut b = Builder::new(opts);
    match group.kind {
        GroupKind::Z2Z2 { a } => enumerate_z2z2(&mut b, a, base)?,
        _ => enumerate_bfs(&mut b, group, base)?,
    }
    let complete_depth = match b.first_saturated_level {
        Some(level) => level - 1,
        None => opts.max_word_length,
    };
    let partial_sum = b.entries.iter().map(|e| e.weight).sum();
    let tail_bound = orbit_tail_bound(group.kind, base, complete_depth);
    Ok(Orbit {
        base,
        entries: b.entries,
        dedup_tol: opts.dedup_tol,
        max_word_length: opts.max_word_length,
        complete_depth,
        saturated: b.saturated,
        partial_sum,
        tail_bound,
    })
}

fn enumerate_bfs(b: &mut Builder, group: &GroupPresentation, base: DiskPoint) -> Result<()> {
    let n = group.generators.len();
    let letters: Vec<Letter> = (0..n)
        .map(|g| Letter { generator: g, inverse: false })
        .chain((0..n).map(|g| Letter { generator: g, inverse: true }))
        .collect();
    let maps: Vec<DiskAutomorphism> = letters.iter().map(|&l| group.letter_map(l)).collect();

    b.offer(Word::empty(), 0, base.value())?;
    // Frontier holds (entry index, group element reaching it).
    let mut frontier = vec![(0usize, DiskAutomorphism::identity())];
    for level in 1..=b.opts.max_word_length {
        let mut next = Vec::new();
        for (idx, element) in frontier {
            let parent = b.entries[idx].word.clone();
            for (&letter, map) in letters.iter().zip(&maps) {
                let word = parent.prepend(letter);
                let (z, g) = match group.kind {
                    GroupKind::Cyclic { a } => {
                        let g = DiskAutomorphism::iterate_cyclic(a, cyclic_exponent(&word))?;
                        (g.apply(base.value()), g)
                    }
                    _ => {
                        let g = map.compose(&element);
                        (g.apply(base.value()), g)
                    }
                };
                if b.offer(word, level, z)? {
                    next.push((b.entries.len() - 1, g));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(())
}

fn enumerate_z2z2(b: &mut Builder, a: f64, base: DiskPoint) -> Result<()> {
    let z = base.value();
    b.offer(Word::empty(), 0, z)?;
    b.offer(z2z2_word(0, true), 0, -z)?;
    for k in 1..=b.opts.max_word_length as i64 {
        for (m, has_beta) in [(k, false), (-k, false), (k, true), (-k, true)] {
            let alpha_m = DiskAutomorphism::iterate_cyclic(a, m)?;
            let image = alpha_m.apply(if has_beta { -z } else { z });
            b.offer(z2z2_word(m, has_beta), k as usize, image)?;
        }
    }
    Ok(())
}

/// Geometric tail bound `Σ_{|n| > N} (1 − |γ^(n)(w)|)`.
///
/// Uses `1 − a_n ≤ 2((1 − a)/(1 + a))^n` for both signs of `n`, hence
/// `4q^{N+1}/(1 − q)`. Off the origin each term picks up the factor
/// `2(1 + |w|)/(1 − |w|)` from `1 − |φ(w)| ≤ 1 − |φ(w)|² ≤ 2(1 − |φ(0)|)(1 + |w|)/(1 − |w|)`.
/// `Z₂ ∗ Z₂` has two group elements per exponent, doubling the bound.
pub fn orbit_tail_bound(kind: GroupKind, base: DiskPoint, depth: usize) -> Option<f64> {
    let (a, multiplicity) = match kind {
        GroupKind::Cyclic { a } => (a, 1.0),
        GroupKind::Z2Z2 { a } => (a, 2.0),
        GroupKind::Generic => return None,
    };
    let q = (1.0 - a.abs()) / (1.0 + a.abs());
    let r = base.norm();
    let displacement = if r == 0.0 { 1.0 } else { 2.0 * (1.0 + r) / (1.0 - r) };
    Some(multiplicity * displacement * 4.0 * q.powi(depth as i32 + 1) / (1.0 - q))
}

/// `(partial_sum, tail_bound)` of the Blaschke sum `Σ(1 − |ζ|)` over the orbit.
pub fn blaschke_sum(orbit: &Orbit) -> (f64, Option<f64>) {
    (orbit.partial_sum, orbit.tail_bound)
}

/// Exact weights `1 − a_n` for the cyclic orbit of the origin, used to check
/// the geometric bound without the rounding of `1 − |p|`.
pub fn cyclic_weight(a: f64, n: i64) -> f64 {
    cyclic_center_complement(a, n.unsigned_abs())
}

/// Order of the stabilizer of the origin.
///
/// Exact for the two named families. For generic presentations this counts
/// the distinct rotations found among words of length at most
/// `max_word_length`, so it is only a lower bound.
pub fn stabilizer_order_origin(group: &GroupPresentation, max_word_length: usize) -> usize {
    match group.kind {
        GroupKind::Cyclic { .. } => 1,
        GroupKind::Z2Z2 { .. } => 2,
        GroupKind::Generic => {
            let n = group.generators.len();
            let maps: Vec<DiskAutomorphism> = (0..n)
                .flat_map(|g| [false, true].map(|inverse| Letter { generator: g, inverse }))
                .map(|l| group.letter_map(l))
                .collect();
            let mut rotations: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
            let mut frontier = vec![DiskAutomorphism::identity()];
            for _ in 0..max_word_length {
                let mut next = Vec::new();
                for element in &frontier {
                    for m in &maps {
                        let g = m.compose(element);
                        if g.a().norm() <= DEFAULT_DEDUP_TOL {
                            let mu = -g.lambda();
                            if !rotations.iter().any(|r| (r - mu).norm() <= 1e-9) {
                                rotations.push(mu);
                            }
                        }
                        next.push(g);
                    }
                }
                frontier = next;
                if frontier.len() > DEFAULT_MAX_POINTS {
                    break;
                }
            }
            rotations.len()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(o: &Orbit) -> Vec<f64> {
        o.points().map(|p| p.value().re).collect()
    }

    #[test]
    fn cyclic_orbit_of_origin() {
        let g = GroupPresentation::cyclic(0.5).unwrap();
        let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(2)).unwrap();
        let pts = reals(&o);
        let expected = [0.0, -0.5, 0.5, -0.8, 0.8];
        assert_eq!(pts.len(), 5);
        for (p, e) in pts.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15, "{pts:?}");
        }
        assert_eq!(o.entries[3].word.to_string(), "aa");
        assert_eq!(o.entries[4].word.to_string(), "AA");
    }

    #[test]
    fn z2z2_orbit_matches_cyclic() {
        let c = enumerate_orbit(&GroupPresentation::cyclic(0.5).unwrap(), DiskPoint::origin(), OrbitOptions::new(2))
            .unwrap();
        let z = enumerate_orbit(&GroupPresentation::z2z2(0.5).unwrap(), DiskPoint::origin(), OrbitOptions::new(2))
            .unwrap();
        assert_eq!(reals(&c), reals(&z));
    }

    #[test]
    fn depth_zero_is_base() {
        let base = DiskPoint::from_re_im(0.1, 0.2).unwrap();
        for g in [GroupPresentation::cyclic(0.3).unwrap(), GroupPresentation::z2z2(0.3).unwrap()] {
            let o = enumerate_orbit(&g, base, OrbitOptions::new(0)).unwrap();
            assert_eq!(o.points().next().unwrap(), base);
            if g.kind() == (GroupKind::Cyclic { a: 0.3 }) {
                assert_eq!(o.len(), 1);
            }
        }
    }

    #[test]
    fn blaschke_sum_examples() {
        let g = GroupPresentation::cyclic(0.5).unwrap();
        let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(2)).unwrap();
        let (sum, tail) = blaschke_sum(&o);
        assert!((sum - 2.4).abs() < 1e-14);
        assert!((tail.unwrap() - 2.0 / 9.0).abs() < 1e-15);
        let o0 = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(0)).unwrap();
        let (sum0, tail0) = blaschke_sum(&o0);
        assert_eq!(sum0, 1.0);
        // Rest of the orbit: 2 Σ_{n≥1} (1 − a_n).
        let rest: f64 = (1..200).map(|n| 2.0 * cyclic_weight(0.5, n)).sum();
        assert!(tail0.unwrap() >= rest);
    }

    #[test]
    fn z2z2_tail_is_doubled() {
        let g = GroupPresentation::z2z2(0.5).unwrap();
        let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(2)).unwrap();
        assert!((o.tail_bound.unwrap() - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn generic_has_no_tail_bound() {
        let g = GroupPresentation::generic(vec![DiskAutomorphism::hyperbolic(0.5).unwrap()]).unwrap();
        let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(3)).unwrap();
        assert_eq!(o.tail_bound, None);
        let c = enumerate_orbit(&GroupPresentation::cyclic(0.5).unwrap(), DiskPoint::origin(), OrbitOptions::new(3))
            .unwrap();
        for (p, q) in o.points().zip(c.points()) {
            assert!((p.value() - q.value()).norm() < 1e-14);
        }
    }

    #[test]
    fn deep_orbits_saturate_at_the_boundary() {
        let g = GroupPresentation::cyclic(0.5).unwrap();
        let o = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(200)).unwrap();
        assert!(o.saturated > 0);
        assert!(o.complete_depth < 200 && o.complete_depth > 20);
        assert_eq!(o.len(), 2 * o.complete_depth + 1);
        assert!(o.tail_bound.unwrap() < 1e-12);
    }

    #[test]
    fn explosion_cap() {
        let g = GroupPresentation::generic(vec![
            DiskAutomorphism::hyperbolic(0.5).unwrap(),
            DiskAutomorphism::new(DiskPoint::from_re_im(0.0, 0.5).unwrap(), Complex64::new(-1.0, 0.0)).unwrap(),
        ])
        .unwrap();
        let err = enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(6).with_max_points(50)).unwrap_err();
        assert_eq!(err, Error::OrbitExplosion { cap: 50 });
    }

    #[test]
    fn bad_dedup_tol_rejected() {
        let g = GroupPresentation::cyclic(0.5).unwrap();
        assert!(enumerate_orbit(&g, DiskPoint::origin(), OrbitOptions::new(1).with_dedup_tol(1e-3)).is_err());
    }

    #[test]
    fn stabilizer_orders() {
        assert_eq!(stabilizer_order_origin(&GroupPresentation::cyclic(0.5).unwrap(), 4), 1);
        assert_eq!(stabilizer_order_origin(&GroupPresentation::z2z2(0.5).unwrap(), 4), 2);
        // The same Z2*Z2 presented generically: β and γ.
        let z = GroupPresentation::z2z2(0.5).unwrap();
        let generic = GroupPresentation::generic(z.generators().to_vec()).unwrap();
        assert_eq!(stabilizer_order_origin(&generic, 4), 2);
        assert!(GroupPresentation::generic(vec![DiskAutomorphism::identity()]).is_err());
        assert!(GroupPresentation::cyclic(0.0).is_err());
    }

    #[test]
    fn normal_form_examples() {
        let nf = |s: &str| z2z2_normal_form(&Z2Letter::parse_word(s).unwrap());
        assert_eq!(nf("βγ"), (1, false));
        assert_eq!(nf("ββ"), (0, false));
        assert_eq!(nf("γ"), (-1, true));
        assert_eq!(nf(""), (0, false));
    }

    #[test]
    fn gamma_equals_alpha_inverse_beta_on_probes() {
        let a = 0.5;
        let group = GroupPresentation::z2z2(a).unwrap();
        let gamma = group.generators()[1];
        let reduced = z2z2_element(a, -1, true).unwrap();
        for k in 0..5 {
            let z = Complex64::from_polar(0.15 * k as f64, 0.9 * k as f64);
            assert!((gamma.apply(z) - reduced.apply(z)).norm() < 1e-14);
        }
    }

    #[test]
    fn reduced_words_round_trip_and_count() {
        let mut by_len: HashMap<usize, usize> = HashMap::new();
        for m in -6i64..=6 {
            for has_beta in [false, true] {
                let w = z2z2_word(m, has_beta);
                assert_eq!(z2z2_normal_form(&Z2Letter::from_word(&w).unwrap()), (m, has_beta));
                *by_len.entry(w.len()).or_default() += 1;
            }
        }
        assert_eq!(by_len[&0], 1);
        for len in 1..=11 {
            assert_eq!(by_len[&len], 2, "length {len}");
        }
    }

    #[test]
    fn word_map_matches_orbit_points() {
        for g in [
            GroupPresentation::cyclic(0.4).unwrap(),
            GroupPresentation::z2z2(0.4).unwrap(),
            GroupPresentation::generic(GroupPresentation::z2z2(0.4).unwrap().generators().to_vec()).unwrap(),
        ] {
            let base = DiskPoint::from_re_im(0.2, -0.3).unwrap();
            let o = enumerate_orbit(&g, base, OrbitOptions::new(4)).unwrap();
            for e in &o.entries {
                let p = g.word_map(&e.word).unwrap().apply(base.value());
                assert!((p - e.point.value()).norm() < 1e-12, "{:?} {}", g.kind(), e.word);
            }
        }
    }
}
