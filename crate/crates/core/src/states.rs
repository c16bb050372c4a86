//! States, additive maps, classical realizability, and state extension.
//!
//! A state assigns a rational in [0,1] to every element, sends 1 to 1, and
//! is additive on defined sums. Two-valued states are the classical points;
//! a state is classically realizable when it is a convex mixture of them,
//! which here is an exact LP over the finite vertex list. State extension
//! along an injective morphism is again an LP: additivity plus agreement on
//! the image, with positivity only in positive mode. The cyclic obstruction
//! of an extension problem is the chain-level form of the degree-two
//! relative cohomology class attached to a state: it vanishes exactly when
//! the state difference extends to an additive complement-antisymmetric map
//! on the bigger algebra.
//!
//! Positivity constraints are imposed on atoms only: an additive map that is
//! nonnegative on atoms is nonnegative everywhere (walk down any strictly
//! decreasing decomposition), and every witness is re-verified on all
//! elements before being returned.

use crate::algebra::{AlgebraError, EffectAlgebra, ElementId, Morphism};
use crate::lp::{lp_feasible, lp_solve, LpOutcome, RationalLp};
use crate::rational::{int, rat, Rational};
use num::traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateError {
    WrongLength { expected: usize, got: usize },
    NotUnital,
    NotAdditive { a: ElementId, b: ElementId },
    OutOfRange { a: ElementId },
    InvalidInclusion(String),
    NoFaithfulState,
    EmptyStateSpace,
}

impl fmt::Display for StateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateError::WrongLength { expected, got } => {
                write!(f, "value table has length {got}, expected {expected}")
            }
            StateError::NotUnital => write!(f, "value at 1 is not 1"),
            StateError::NotAdditive { a, b } => {
                write!(f, "not additive at elements {} and {}", a.0, b.0)
            }
            StateError::OutOfRange { a } => write!(f, "value at element {} is outside [0,1]", a.0),
            StateError::InvalidInclusion(d) => write!(f, "invalid inclusion: {d}"),
            StateError::NoFaithfulState => write!(f, "no faithful state found"),
            StateError::EmptyStateSpace => write!(f, "the state space is empty"),
        }
    }
}

impl std::error::Error for StateError {}

impl From<AlgebraError> for StateError {
    fn from(e: AlgebraError) -> Self {
        StateError::InvalidInclusion(e.to_string())
    }
}

/// A rational element-assignment intended as a state: unital, additive,
/// valued in [0,1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector {
    pub values: Vec<Rational>,
}

impl StateVector {
    pub fn get(&self, e: ElementId) -> &Rational {
        &self.values[e.idx()]
    }

    pub fn validate(&self, alg: &EffectAlgebra) -> Result<(), StateError> {
        if self.values.len() != alg.element_count() {
            return Err(StateError::WrongLength {
                expected: alg.element_count(),
                got: self.values.len(),
            });
        }
        if !self.values[alg.one().idx()].is_one() {
            return Err(StateError::NotUnital);
        }
        check_additive(alg, &self.values)?;
        for a in alg.elements() {
            let v = self.get(a);
            if v.is_negative() || *v > Rational::one() {
                return Err(StateError::OutOfRange { a });
            }
        }
        Ok(())
    }
}

/// An additive rational map; complement antisymmetry (the HC¹ condition
/// φ(a⊥) = −φ(a)) is a derived property, not an invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveMap {
    pub values: Vec<Rational>,
}

impl AdditiveMap {
    pub fn zero(alg: &EffectAlgebra) -> AdditiveMap {
        AdditiveMap { values: vec![Rational::zero(); alg.element_count()] }
    }

    pub fn get(&self, e: ElementId) -> &Rational {
        &self.values[e.idx()]
    }

    pub fn validate(&self, alg: &EffectAlgebra) -> Result<(), StateError> {
        if self.values.len() != alg.element_count() {
            return Err(StateError::WrongLength {
                expected: alg.element_count(),
                got: self.values.len(),
            });
        }
        check_additive(alg, &self.values)
    }

    pub fn is_complement_antisymmetric(&self, alg: &EffectAlgebra) -> bool {
        alg.elements().all(|a| {
            *self.get(alg.complement(a)) == -self.get(a).clone()
        })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }
}

fn check_additive(alg: &EffectAlgebra, values: &[Rational]) -> Result<(), StateError> {
    for a in alg.elements() {
        for &b in alg.partners(a) {
            if b < a {
                continue;
            }
            let s = alg.sum(a, b).unwrap();
            if &values[a.idx()] + &values[b.idx()] != values[s.idx()] {
                return Err(StateError::NotAdditive { a, b });
            }
        }
    }
    Ok(())
}

/// Additivity as sparse equality rows over one value-variable per element.
pub(crate) fn additivity_equalities(alg: &EffectAlgebra, lp: &mut RationalLp, offset: usize) {
    for a in alg.elements() {
        for &b in alg.partners(a) {
            if b < a {
                continue;
            }
            let s = alg.sum(a, b).unwrap();
            let mut row: Vec<(usize, Rational)> = Vec::with_capacity(3);
            for (i, c) in [(a, 1i64), (b, 1), (s, -1)] {
                match row.iter_mut().find(|(j, _)| *j == offset + i.idx()) {
                    Some((_, v)) => *v += crate::rational::int(c),
                    None => row.push((offset + i.idx(), crate::rational::int(c))),
                }
            }
            row.retain(|(_, v)| !v.is_zero());
            if !row.is_empty() {
                lp.eq_sparse(row, Rational::zero());
            }
        }
    }
}

/// All {0,1}-valued states, by depth-first assignment with propagation
/// through sums and complements.
pub fn two_valued_states(alg: &EffectAlgebra) -> Vec<StateVector> {
    let n = alg.element_count();
    #[derive(Clone)]
    struct Partial {
        assign: Vec<Option<bool>>,
    }
    fn propagate(alg: &EffectAlgebra, p: &mut Partial) -> bool {
        loop {
            let mut progressed = false;
            for a in alg.elements() {
                if let Some(va) = p.assign[a.idx()] {
                    let c = alg.complement(a);
                    match p.assign[c.idx()] {
                        None => {
                            p.assign[c.idx()] = Some(!va);
                            progressed = true;
                        }
                        Some(vc) if vc == va => return false,
                        _ => {}
                    }
                }
                for &b in alg.partners(a) {
                    if b < a {
                        continue;
                    }
                    let s = alg.sum(a, b).unwrap();
                    let (va, vb, vs) = (p.assign[a.idx()], p.assign[b.idx()], p.assign[s.idx()]);
                    let total = |x: bool| if x { 1i8 } else { 0 };
                    match (va, vb, vs) {
                        (Some(x), Some(y), None) => {
                            let t = total(x) + total(y);
                            if t > 1 {
                                return false;
                            }
                            p.assign[s.idx()] = Some(t == 1);
                            progressed = true;
                        }
                        (Some(x), None, Some(z)) => {
                            let r = total(z) - total(x);
                            if !(0..=1).contains(&r) {
                                return false;
                            }
                            p.assign[b.idx()] = Some(r == 1);
                            progressed = true;
                        }
                        (None, Some(y), Some(z)) => {
                            let r = total(z) - total(y);
                            if !(0..=1).contains(&r) {
                                return false;
                            }
                            p.assign[a.idx()] = Some(r == 1);
                            progressed = true;
                        }
                        (Some(x), Some(y), Some(z)) => {
                            if total(x) + total(y) != total(z) {
                                return false;
                            }
                        }
                        _ => {}
                    }
                }
            }
            if !progressed {
                return true;
            }
        }
    }
    fn search(alg: &EffectAlgebra, p: Partial, out: &mut Vec<StateVector>) {
        let mut p = p;
        if !propagate(alg, &mut p) {
            return;
        }
        match p.assign.iter().position(|v| v.is_none()) {
            None => {
                let values = p
                    .assign
                    .iter()
                    .map(|v| if v.unwrap() { Rational::one() } else { Rational::zero() })
                    .collect();
                let sv = StateVector { values };
                debug_assert!(sv.validate(alg).is_ok());
                out.push(sv);
            }
            Some(i) => {
                for choice in [false, true] {
                    let mut q = p.clone();
                    q.assign[i] = Some(choice);
                    search(alg, q, out);
                }
            }
        }
    }
    let mut start = Partial { assign: vec![None; n] };
    start.assign[alg.zero().idx()] = Some(false);
    start.assign[alg.one().idx()] = Some(true);
    let mut out = Vec::new();
    search(alg, start, &mut out);
    out.sort_by(|a, b| a.values.cmp(&b.values));
    out
}

/// Convex weights over the two-valued states expressing σ, or None when σ is
/// not classically realizable. The weights index [`two_valued_states`] in
/// their sorted order.
pub fn is_classical(alg: &EffectAlgebra, sigma: &StateVector) -> Option<Vec<Rational>> {
    sigma.validate(alg).ok()?;
    let verts = two_valued_states(alg);
    if verts.is_empty() {
        return None;
    }
    let mut lp = RationalLp::new(verts.len());
    for i in 0..verts.len() {
        lp.nonneg(i);
    }
    lp.eq(vec![Rational::one(); verts.len()], Rational::one());
    for a in alg.elements() {
        let row: Vec<Rational> = verts.iter().map(|v| v.get(a).clone()).collect();
        lp.eq(row, sigma.get(a).clone());
    }
    let w = lp_feasible(&lp)?;
    // exact verification of the mixture
    for a in alg.elements() {
        let mix: Rational = verts.iter().zip(w.iter()).map(|(v, wi)| v.get(a) * wi).sum();
        assert_eq!(&mix, sigma.get(a));
    }
    Some(w)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtensionMode {
    Positive,
    Signed,
}

/// A state on the source together with an injective morphism into a target.
pub struct ExtensionProblem<'a> {
    pub source: &'a EffectAlgebra,
    pub target: &'a EffectAlgebra,
    pub inclusion: Morphism,
    pub state: StateVector,
    pub mode: ExtensionMode,
}

impl<'a> ExtensionProblem<'a> {
    pub fn new(
        source: &'a EffectAlgebra,
        target: &'a EffectAlgebra,
        inclusion: Morphism,
        state: StateVector,
        mode: ExtensionMode,
    ) -> Result<Self, StateError> {
        inclusion.verify(source, target)?;
        if !inclusion.is_injective() {
            return Err(StateError::InvalidInclusion("not injective".into()));
        }
        state.validate(source)?;
        Ok(ExtensionProblem { source, target, inclusion, state, mode })
    }
}

/// The result of a successful extension: a genuine state in positive mode, a
/// signed state (additive, unital, possibly negative) in signed mode.
#[derive(Clone, Debug)]
pub enum Extension {
    State(StateVector),
    Signed(AdditiveMap),
}

impl Extension {
    pub fn values(&self) -> &[Rational] {
        match self {
            Extension::State(s) => &s.values,
            Extension::Signed(a) => &a.values,
        }
    }
}

/// Searches for τ on the target with τ∘i = σ, additive, and (in positive
/// mode) nonnegative. By the order-cohomology extension criterion this LP is
/// the computational form of membership of σ in the precone of the
/// connecting homomorphism.
pub fn extend_state(p: &ExtensionProblem) -> Option<Extension> {
    let b = p.target;
    let nb = b.element_count();
    let mut lp = RationalLp::new(nb);
    additivity_equalities(b, &mut lp, 0);
    for a in p.source.elements() {
        let mut row = vec![Rational::zero(); nb];
        row[p.inclusion.apply(a).idx()] = Rational::one();
        lp.eq(row, p.state.get(a).clone());
    }
    if p.mode == ExtensionMode::Positive {
        // nonnegativity on atoms pins down nonnegativity everywhere for an
        // additive map; the witness is still verified on all elements below
        for atom in b.atoms() {
            lp.nonneg(atom.idx());
        }
    }
    let x = lp_feasible(&lp)?;
    match p.mode {
        ExtensionMode::Positive => {
            let sv = StateVector { values: x };
            sv.validate(b).expect("extension witness must verify exactly");
            for a in p.source.elements() {
                assert_eq!(sv.get(p.inclusion.apply(a)), p.state.get(a));
            }
            Some(Extension::State(sv))
        }
        ExtensionMode::Signed => {
            let am = AdditiveMap { values: x };
            am.validate(b).expect("extension witness must verify exactly");
            assert!(am.get(b.one()).is_one());
            Some(Extension::Signed(am))
        }
    }
}

/// Whether the relative degree-two class of σ against the base state σ₀
/// vanishes: equivalently, whether σ − σ₀ extends to an additive
/// complement-antisymmetric map on the target.
pub fn cyclic_obstruction_vanishes(p: &ExtensionProblem, sigma0: &StateVector) -> bool {
    assert!(sigma0.validate(p.source).is_ok(), "σ₀ must be a state on the source");
    let b = p.target;
    let nb = b.element_count();
    let mut lp = RationalLp::new(nb);
    additivity_equalities(b, &mut lp, 0);
    for x in b.elements() {
        // ψ(x⊥) = −ψ(x)
        let c = b.complement(x);
        let mut row = vec![Rational::zero(); nb];
        row[x.idx()] += Rational::one();
        row[c.idx()] += Rational::one();
        if row.iter().any(|v| !v.is_zero()) {
            lp.eq(row, Rational::zero());
        }
    }
    for a in p.source.elements() {
        let mut row = vec![Rational::zero(); nb];
        row[p.inclusion.apply(a).idx()] = Rational::one();
        lp.eq(row, p.state.get(a) - sigma0.get(a));
    }
    match lp_feasible(&lp) {
        Some(x) => {
            let am = AdditiveMap { values: x };
            assert!(am.validate(b).is_ok());
            assert!(am.is_complement_antisymmetric(b));
            true
        }
        None => false,
    }
}

/// Difference of two positive additive maps equal to α, found by direct LP.
pub fn decompose_additive_lp(
    alg: &EffectAlgebra,
    alpha: &AdditiveMap,
) -> Option<(AdditiveMap, AdditiveMap)> {
    alpha.validate(alg).ok()?;
    let n = alg.element_count();
    let mut lp = RationalLp::new(2 * n);
    additivity_equalities(alg, &mut lp, 0);
    {
        // second block must also be additive
        let mut shifted = RationalLp::new(2 * n);
        additivity_equalities(alg, &mut shifted, n);
        for (row, rhs) in shifted.equalities {
            lp.eq_sparse(row, rhs);
        }
    }
    for e in alg.elements() {
        let mut row = vec![Rational::zero(); 2 * n];
        row[e.idx()] = Rational::one();
        row[n + e.idx()] = -Rational::one();
        lp.eq(row, alpha.get(e).clone());
    }
    for atom in alg.atoms() {
        lp.nonneg(atom.idx());
        lp.nonneg(n + atom.idx());
    }
    let x = lp_feasible(&lp)?;
    let a1 = AdditiveMap { values: x[..n].to_vec() };
    let a2 = AdditiveMap { values: x[n..].to_vec() };
    assert!(a1.validate(alg).is_ok() && a1.is_nonnegative());
    assert!(a2.validate(alg).is_ok() && a2.is_nonnegative());
    for e in alg.elements() {
        assert_eq!(a1.get(e) - a2.get(e), *alpha.get(e));
    }
    Some((a1, a2))
}

/// A faithful state: strictly positive on every nonzero element, obtained by
/// maximizing the minimum atom value over the state polytope.
pub fn faithful_state(alg: &EffectAlgebra) -> Result<StateVector, StateError> {
    let n = alg.element_count();
    // variables: state values plus the minimum t
    let mut lp = RationalLp::new(n + 1);
    additivity_equalities(alg, &mut lp, 0);
    let mut unit_row = vec![Rational::zero(); n + 1];
    unit_row[alg.one().idx()] = Rational::one();
    lp.eq(unit_row, Rational::one());
    for atom in alg.atoms() {
        lp.nonneg(atom.idx());
        let mut row = vec![Rational::zero(); n + 1];
        row[atom.idx()] = Rational::one();
        row[n] = -Rational::one();
        lp.ge(row, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    lp.objective = Some(objective);
    match lp_solve(&lp) {
        LpOutcome::Infeasible => Err(StateError::EmptyStateSpace),
        LpOutcome::Optimal { point, value } => {
            if !value.is_positive() {
                return Err(StateError::NoFaithfulState);
            }
            let sv = StateVector { values: point[..n].to_vec() };
            sv.validate(alg).expect("faithful state verifies");
            for e in alg.elements() {
                if e != alg.zero() {
                    assert!(sv.get(e).is_positive(), "faithful state is strictly positive");
                }
            }
            Ok(sv)
        }
        other => unreachable!("faithful-state LP cannot be {other:?}"),
    }
}

/// Constructive decomposition of an additive map as a difference of positive
/// additive maps: scale a faithful state β by K = −min α / min_{a≠0} β and
/// shift. Returns (α₁, α₂, β).
pub fn decompose_additive_constructive(
    alg: &EffectAlgebra,
    alpha: &AdditiveMap,
) -> Result<(AdditiveMap, AdditiveMap, StateVector), StateError> {
    alpha.validate(alg)?;
    let beta = faithful_state(alg)?;
    if alpha.is_nonnegative() {
        return Ok((alpha.clone(), AdditiveMap::zero(alg), beta));
    }
    let min_alpha = alg.elements().map(|e| alpha.get(e).clone()).min().unwrap();
    let min_beta = alg
        .elements()
        .filter(|e| *e != alg.zero())
        .map(|e| beta.get(e).clone())
        .min()
        .unwrap();
    let k = -min_alpha / min_beta;
    let a2 = AdditiveMap {
        values: beta.values.iter().map(|v| v * &k).collect(),
    };
    let a1 = AdditiveMap {
        values: alpha.values.iter().zip(a2.values.iter()).map(|(x, y)| x + y).collect(),
    };
    assert!(a1.validate(alg).is_ok() && a1.is_nonnegative());
    assert!(a2.validate(alg).is_ok() && a2.is_nonnegative());
    Ok((a1, a2, beta))
}

/// The class of σ against the base point σ₀ in degree-one cyclic cohomology:
/// the difference is additive and complement-antisymmetric.
pub fn embed_state_space(
    alg: &EffectAlgebra,
    sigma0: &StateVector,
    sigma: &StateVector,
) -> Result<AdditiveMap, StateError> {
    sigma0.validate(alg)?;
    sigma.validate(alg)?;
    let m = AdditiveMap {
        values: sigma
            .values
            .iter()
            .zip(sigma0.values.iter())
            .map(|(a, b)| a - b)
            .collect(),
    };
    debug_assert!(m.validate(alg).is_ok());
    debug_assert!(m.is_complement_antisymmetric(alg));
    Ok(m)
}

/// Embeds an algebra into the power set of its two-valued states, sending a
/// to the set of states mapping it to 1. Injective exactly when the
/// two-valued states separate points; returns None otherwise.
pub fn separating_powerset_embedding(
    alg: &EffectAlgebra,
) -> Option<(EffectAlgebra, Morphism)> {
    let verts = two_valued_states(alg);
    if verts.is_empty() || verts.len() > 30 {
        return None;
    }
    let target = EffectAlgebra::powerset(verts.len() as u32).ok()?;
    let map: Vec<ElementId> = alg
        .elements()
        .map(|a| {
            let mask: usize = verts
                .iter()
                .enumerate()
                .filter(|(_, v)| v.get(a).is_one())
                .map(|(i, _)| 1usize << i)
                .sum();
            ElementId(mask as u32)
        })
        .collect();
    let m = Morphism { map };
    if !m.is_injective() || m.verify(alg, &target).is_err() {
        return None;
    }
    Some((target, m))
}

/// Random additive maps with small integer coordinates in the kernel basis
/// of the additivity equations; deterministic in the seed.
pub fn random_additive_maps(alg: &EffectAlgebra, count: usize, seed: u64) -> Vec<AdditiveMap> {
    use crate::linalg::sparse::SparseMat;
    let n = alg.element_count();
    let mut eqs = RationalLp::new(n);
    additivity_equalities(alg, &mut eqs, 0);
    let mut m = SparseMat::new(eqs.equalities.len(), n);
    for (r, (row, _)) in eqs.equalities.iter().enumerate() {
        for (c, v) in row {
            m.add_entry(r, *c, v.clone());
        }
    }
    let basis = m.kernel_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut values = vec![Rational::zero(); n];
            for vec in &basis {
                let c = rng.gen_range(-3i64..=3);
                if c == 0 {
                    continue;
                }
                for (x, v) in values.iter_mut().zip(vec.iter()) {
                    *x += v * int(c);
                }
            }
            let am = AdditiveMap { values };
            debug_assert!(am.validate(alg).is_ok());
            am
        })
        .collect()
}

/// Random classical states: convex mixtures of the two-valued states with
/// random rational weights; deterministic in the seed.
pub fn random_classical_states(alg: &EffectAlgebra, count: usize, seed: u64) -> Vec<StateVector> {
    let verts = two_valued_states(alg);
    assert!(!verts.is_empty(), "need at least one two-valued state");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let raw: Vec<i64> = (0..verts.len()).map(|_| rng.gen_range(0..5)).collect();
            let total: i64 = raw.iter().sum::<i64>().max(1);
            let mut values = vec![Rational::zero(); alg.element_count()];
            for (w, v) in raw.iter().zip(verts.iter()) {
                if *w == 0 {
                    continue;
                }
                for (x, y) in values.iter_mut().zip(v.values.iter()) {
                    *x += y * rat(*w, total);
                }
            }
            // all weights zero collapses to the first vertex
            if raw.iter().all(|w| *w == 0) {
                values = verts[0].values.clone();
            }
            let sv = StateVector { values };
            debug_assert!(sv.validate(alg).is_ok());
            sv
        })
        .collect()
}

/// The pentagon's half-state: 1/2 on the shared atoms, 0 on the middles.
/// A state that is not a mixture of the two-valued states.
pub fn pentagon_half_state(pentagon: &EffectAlgebra) -> StateVector {
    let mut partial = Vec::new();
    for a in pentagon.elements() {
        let lbl = pentagon.label(a);
        if lbl.contains('+') || lbl == "0" || lbl == "1" {
            continue;
        }
        let v = if lbl.starts_with('x') { rat(1, 2) } else { Rational::zero() };
        partial.push((a, v));
    }
    let values = complete_additively(pentagon, &partial).expect("half-state is consistent");
    let sv = StateVector { values };
    sv.validate(pentagon).expect("half-state is a state");
    sv
}

/// Extends a partial assignment to a full value table through v(0)=0,
/// v(1)=1, sums, and complements. Used by state files that specify atoms
/// only. Fails when some element stays underdetermined or the givens clash
/// with the propagation.
pub fn complete_additively(
    alg: &EffectAlgebra,
    partial: &[(ElementId, Rational)],
) -> Result<Vec<Rational>, StateError> {
    let n = alg.element_count();
    let mut values = vec![Rational::zero(); n];
    let mut known = vec![false; n];
    for (e, v) in partial {
        if known[e.idx()] && values[e.idx()] != *v {
            return Err(StateError::InvalidInclusion(format!(
                "conflicting values for element {}",
                e.0
            )));
        }
        values[e.idx()] = v.clone();
        known[e.idx()] = true;
    }
    let seeded_zero = known[alg.zero().idx()];
    if seeded_zero && !values[alg.zero().idx()].is_zero() {
        return Err(StateError::OutOfRange { a: alg.zero() });
    }
    let seeded_one = known[alg.one().idx()];
    if seeded_one && !values[alg.one().idx()].is_one() {
        return Err(StateError::NotUnital);
    }
    known[alg.zero().idx()] = true;
    values[alg.zero().idx()] = Rational::zero();
    known[alg.one().idx()] = true;
    values[alg.one().idx()] = Rational::one();
    loop {
        let mut progressed = false;
        for a in alg.elements() {
            if known[a.idx()] {
                let c = alg.complement(a);
                let target = Rational::one() - &values[a.idx()];
                if !known[c.idx()] {
                    values[c.idx()] = target;
                    known[c.idx()] = true;
                    progressed = true;
                } else if values[c.idx()] != target {
                    return Err(StateError::InvalidInclusion(format!(
                        "complement clash at element {}",
                        a.0
                    )));
                }
            }
            for &b in alg.partners(a) {
                if b < a {
                    continue;
                }
                let s = alg.sum(a, b).unwrap();
                let k = (known[a.idx()], known[b.idx()], known[s.idx()]);
                match k {
                    (true, true, false) => {
                        values[s.idx()] = &values[a.idx()] + &values[b.idx()];
                        known[s.idx()] = true;
                        progressed = true;
                    }
                    (true, false, true) => {
                        values[b.idx()] = &values[s.idx()] - &values[a.idx()];
                        known[b.idx()] = true;
                        progressed = true;
                    }
                    (false, true, true) => {
                        values[a.idx()] = &values[s.idx()] - &values[b.idx()];
                        known[a.idx()] = true;
                        progressed = true;
                    }
                    (true, true, true) => {
                        if &values[a.idx()] + &values[b.idx()] != values[s.idx()] {
                            return Err(StateError::NotAdditive { a, b });
                        }
                    }
                    _ => {}
                }
            }
        }
        if !progressed {
            break;
        }
    }
    if let Some(i) = known.iter().position(|k| !k) {
        return Err(StateError::InvalidInclusion(format!(
            "value at element {i} is underdetermined"
        )));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn powerset_two_valued_states_are_points() {
        for m in 1..=4u32 {
            let p = corpus::powerset(m);
            assert_eq!(two_valued_states(&p).len(), m as usize);
        }
    }

    #[test]
    fn firefly_has_five_two_valued_states() {
        assert_eq!(two_valued_states(&corpus::firefly()).len(), 5);
    }

    #[test]
    fn pentagon_has_eleven_two_valued_states() {
        assert_eq!(two_valued_states(&corpus::pentagon()).len(), 11);
    }

    #[test]
    fn two_valued_states_are_classical_with_unit_weight() {
        let ff = corpus::firefly();
        for v in two_valued_states(&ff) {
            let w = is_classical(&ff, &v).unwrap();
            assert_eq!(w.iter().filter(|x| x.is_one()).count(), 1);
            assert_eq!(w.iter().filter(|x| !x.is_zero()).count(), 1);
        }
    }

    #[test]
    fn firefly_quarter_state_is_classical() {
        let ff = corpus::firefly();
        let mut partial: Vec<(ElementId, Rational)> = ["a", "b", "c", "d"]
            .iter()
            .map(|l| (ff.element_by_label(l).unwrap(), rat(1, 4)))
            .collect();
        partial.push((ff.element_by_label("e").unwrap(), rat(1, 2)));
        let sigma = StateVector { values: complete_additively(&ff, &partial).unwrap() };
        assert!(is_classical(&ff, &sigma).is_some());
    }

    #[test]
    fn pentagon_half_state_is_not_classical() {
        let p = corpus::pentagon();
        let sigma = pentagon_half_state(&p);
        assert!(is_classical(&p, &sigma).is_none());
    }

    #[test]
    fn identity_extension_returns_the_state() {
        let ff = corpus::firefly();
        let sigma = random_classical_states(&ff, 1, 7)[0].clone();
        let p = ExtensionProblem::new(
            &ff,
            &ff,
            Morphism::identity(&ff),
            sigma.clone(),
            ExtensionMode::Positive,
        )
        .unwrap();
        match extend_state(&p) {
            Some(Extension::State(tau)) => assert_eq!(tau, sigma),
            other => panic!("expected a state, got {other:?}"),
        }
    }

    #[test]
    fn firefly_intersection_extends_for_all_p() {
        // the intersection of the firefly blocks is P(2) on {e, a+b}; a state
        // with σ(e) = p extends with τ(a) = τ(b) = (1−p)/2
        let ff = corpus::firefly();
        let blocks = ff.blocks().unwrap();
        let ma = ff.subset_mask(&blocks[0]);
        let mb = ff.subset_mask(&blocks[1]);
        let (int, incl) = ff.intersect_subalgebras(&ma, &mb).unwrap();
        for p in [rat(0, 1), rat(1, 3), rat(1, 2), rat(2, 3), rat(1, 1)] {
            let e = int.element_by_label("e").unwrap();
            let sigma = StateVector {
                values: complete_additively(&int, &[(e, p.clone())]).unwrap(),
            };
            let prob = ExtensionProblem::new(
                &int,
                &ff,
                incl.clone(),
                sigma,
                ExtensionMode::Positive,
            )
            .unwrap();
            assert!(extend_state(&prob).is_some(), "p = {p}");
        }
    }

    #[test]
    fn pentagon_half_state_signed_but_not_positive() {
        let pent = corpus::pentagon();
        let sigma = pentagon_half_state(&pent);
        let (target, incl) = separating_powerset_embedding(&pent).unwrap();
        assert_eq!(target.element_count(), 1 << 11);
        let positive = ExtensionProblem::new(
            &pent,
            &target,
            incl.clone(),
            sigma.clone(),
            ExtensionMode::Positive,
        )
        .unwrap();
        assert!(extend_state(&positive).is_none(), "positive extension must fail");
        let signed =
            ExtensionProblem::new(&pent, &target, incl, sigma, ExtensionMode::Signed).unwrap();
        assert!(extend_state(&signed).is_some(), "signed extension must exist");
    }

    #[test]
    fn obstruction_vanishes_for_extendable_states() {
        let ff = corpus::firefly();
        let blocks = ff.blocks().unwrap();
        let (block, incl) = ff.restrict_to(&blocks[0]);
        let sigma = random_classical_states(&block, 3, 11);
        let sigma0 = random_classical_states(&block, 1, 13)[0].clone();
        for s in sigma {
            let p = ExtensionProblem::new(&block, &ff, incl.clone(), s, ExtensionMode::Positive)
                .unwrap();
            if extend_state(&p).is_some() {
                assert!(cyclic_obstruction_vanishes(&p, &sigma0));
            }
        }
    }

    #[test]
    fn obstruction_vanishes_at_base_point() {
        let ff = corpus::firefly();
        let sigma0 = random_classical_states(&ff, 1, 5)[0].clone();
        let p = ExtensionProblem::new(
            &ff,
            &ff,
            Morphism::identity(&ff),
            sigma0.clone(),
            ExtensionMode::Positive,
        )
        .unwrap();
        assert!(cyclic_obstruction_vanishes(&p, &sigma0));
    }

    #[test]
    fn decompose_positive_map_is_trivial() {
        let ff = corpus::firefly();
        let sigma = random_classical_states(&ff, 1, 3)[0].clone();
        let alpha = AdditiveMap { values: sigma.values };
        let (a1, a2, _beta) = decompose_additive_constructive(&ff, &alpha).unwrap();
        assert_eq!(a1.values, alpha.values);
        assert!(a2.values.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn decompose_coordinate_split_on_p2() {
        let p2 = corpus::powerset(2);
        let e0 = p2.element_by_label("e0").unwrap();
        let e1 = p2.element_by_label("e1").unwrap();
        let mut values = vec![Rational::zero(); 4];
        values[e0.idx()] = int(1);
        values[e1.idx()] = int(-1);
        // 1 = e0 + e1 gets value 0
        let alpha = AdditiveMap { values };
        assert!(alpha.validate(&p2).is_ok());
        let (a1, a2) = decompose_additive_lp(&p2, &alpha).unwrap();
        for e in p2.elements() {
            assert_eq!(a1.get(e) - a2.get(e), *alpha.get(e));
        }
    }

    #[test]
    fn random_decompositions_agree_both_modes() {
        for alg in [corpus::firefly(), corpus::powerset(3)] {
            for alpha in random_additive_maps(&alg, 10, 42) {
                let lp_mode = decompose_additive_lp(&alg, &alpha);
                assert!(lp_mode.is_some(), "LP mode must succeed on {}", alg.name());
                let (a1, a2, beta) = decompose_additive_constructive(&alg, &alpha).unwrap();
                for e in alg.elements() {
                    assert_eq!(a1.get(e) - a2.get(e), *alpha.get(e));
                    if e != alg.zero() {
                        assert!(beta.get(e).is_positive());
                    }
                }
            }
        }
    }

    #[test]
    fn embedding_is_affine_and_antisymmetric() {
        let ff = corpus::firefly();
        let states = random_classical_states(&ff, 4, 99);
        let sigma0 = &states[0];
        for s in &states[1..] {
            let d = embed_state_space(&ff, sigma0, s).unwrap();
            assert!(d.is_complement_antisymmetric(&ff));
        }
        // affinity: i(½σ+½σ') = ½ i(σ) + ½ i(σ')
        let mix = StateVector {
            values: states[1]
                .values
                .iter()
                .zip(states[2].values.iter())
                .map(|(a, b)| (a + b) / int(2))
                .collect(),
        };
        let lhs = embed_state_space(&ff, sigma0, &mix).unwrap();
        let d1 = embed_state_space(&ff, sigma0, &states[1]).unwrap();
        let d2 = embed_state_space(&ff, sigma0, &states[2]).unwrap();
        for e in ff.elements() {
            assert_eq!(*lhs.get(e), (d1.get(e) + d2.get(e)) / int(2));
        }
    }

    #[test]
    fn classical_iff_extends_through_separating_embedding() {
        for alg in [corpus::firefly(), corpus::pentagon(), corpus::powerset(3)] {
            let (target, incl) = separating_powerset_embedding(&alg).unwrap();
            let mut test_states = random_classical_states(&alg, 3, 21);
            if alg.name() == "pentagon" {
                test_states.push(pentagon_half_state(&alg));
            }
            for sigma in test_states {
                let classical = is_classical(&alg, &sigma).is_some();
                let p = ExtensionProblem::new(
                    &alg,
                    &target,
                    incl.clone(),
                    sigma,
                    ExtensionMode::Positive,
                )
                .unwrap();
                let extends = extend_state(&p).is_some();
                assert_eq!(classical, extends, "{}", alg.name());
            }
        }
    }
}
