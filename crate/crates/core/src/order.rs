//! Order cohomology in low degrees.
//!
//! Ordered abelian groups replace kernels by precones: the inverse image of
//! the positive cone. The complex here is 𝒞ⁿ(E) = Disc(Cⁿ(E)) × Cⁿ⁻¹(E)
//! with coboundary δ(φ, ψ) = (δφ, φ − δψ) and positive cone {0} × (Cⁿ⁻¹)⁺,
//! built on full test cochains (no rotation invariance). In degree 0 the
//! cohomology monoid is the nonnegative halfline; in degree 1 it is the cone
//! of nonnegative additive maps, which contains every state. The membership
//! criterion of the degree-two connecting homomorphism turns state extension
//! into an exact LP, checked here against the direct extension LP.

use crate::algebra::EffectAlgebra;
use crate::cohomology::{CheckReport, CochainComplex, Filter, Theory};
use crate::linalg::sparse::SparseMat;
use crate::linalg::Matrix;
use crate::lp::{lp_feasible, RationalLp};
use crate::rational::Rational;
use crate::states::{extend_state, ExtensionMode, ExtensionProblem, StateError};
use crate::testspace::{CapExceeded, TestTable};
use num::traits::{One, Signed, Zero};

/// One level of the order cochain complex: a discrete part on T_n and an
/// ordered part on T_{n−1}. Positive means the discrete part vanishes and
/// the ordered part is pointwise nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderCochainLevel {
    pub degree: usize,
    pub discrete: Vec<Rational>,
    pub ordered: Vec<Rational>,
}

impl OrderCochainLevel {
    pub fn is_positive(&self) -> bool {
        self.discrete.iter().all(|v| v.is_zero())
            && self.ordered.iter().all(|v| !v.is_negative())
    }
}

/// δ𝒞(φ, ψ) = (δφ, φ − δψ) landing in degree n+1. Applying the coboundary
/// twice is verified to give the zero pair.
pub fn order_coboundary(
    alg: &EffectAlgebra,
    n: usize,
    phi: &[Rational],
    psi: &[Rational],
) -> Result<OrderCochainLevel, CapExceeded> {
    let mut table = TestTable::new(alg);
    let cx = CochainComplex::build(alg, &mut table, Theory::Hochschild, n + 1, Filter::Full)?;
    assert_eq!(phi.len(), cx.bases[n].dim(), "φ lives on T_n");
    if n > 0 {
        assert_eq!(psi.len(), cx.bases[n - 1].dim(), "ψ lives on the degree below");
    } else {
        assert!(psi.is_empty(), "degree 0 has no ordered part");
    }
    let d_phi = cx.deltas[n].mul_vec(phi);
    let d_psi = if n > 0 { cx.deltas[n - 1].mul_vec(psi) } else { vec![Rational::zero(); phi.len()] };
    let ordered: Vec<Rational> =
        phi.iter().zip(d_psi.iter()).map(|(a, b)| a - b).collect();
    let level = OrderCochainLevel { degree: n + 1, discrete: d_phi, ordered };
    // (δ𝒞)² = 0: the next application gives (δδφ, δφ − δ(φ − δψ)) = (0, 0)
    let dd_phi = cx.deltas[n + 1].mul_vec(&level.discrete);
    let d_ordered = cx.deltas[n].mul_vec(&level.ordered);
    let second: Vec<Rational> =
        level.discrete.iter().zip(d_ordered.iter()).map(|(a, b)| a - b).collect();
    assert!(dd_phi.iter().all(|v| v.is_zero()), "δ∘δ must vanish");
    assert!(second.iter().all(|v| v.is_zero()), "(δ𝒞)² must vanish");
    Ok(level)
}

/// The degree-one order cohomology monoid: the cone of nonnegative additive
/// maps, presented by its constraint system with exact membership, plus the
/// extreme rays when the atom count is small enough for enumeration.
pub struct PositiveAdditiveCone {
    /// Dimension of the ambient space of additive maps.
    pub additive_dim: usize,
    /// Basis of the space of additive maps (element-indexed value tables).
    pub additive_basis: Vec<Vec<Rational>>,
    /// Extreme rays as element-indexed value tables, when enumerated.
    pub extreme_rays: Option<Vec<Vec<Rational>>>,
}

pub struct ChordLowDegrees {
    /// Degree 0 is always the nonnegative halfline.
    pub degree0: &'static str,
    pub degree1: PositiveAdditiveCone,
}

impl PositiveAdditiveCone {
    /// Membership: additive and nonnegative, checked exactly on every
    /// element.
    pub fn contains(&self, alg: &EffectAlgebra, values: &[Rational]) -> bool {
        let m = crate::states::AdditiveMap { values: values.to_vec() };
        m.validate(alg).is_ok() && m.is_nonnegative()
    }
}

pub const RAY_ENUMERATION_ATOM_BOUND: usize = 12;

/// The low-degree order cohomology of an effect algebra.
pub fn chord_low_degrees(alg: &EffectAlgebra) -> ChordLowDegrees {
    // basis of additive maps = kernel of the additivity equations
    let n = alg.element_count();
    let mut eqs = RationalLp::new(n);
    crate::states::additivity_equalities(alg, &mut eqs, 0);
    let mut m = SparseMat::new(eqs.equalities.len(), n);
    for (r, (row, _)) in eqs.equalities.iter().enumerate() {
        for (c, v) in row {
            m.add_entry(r, *c, v.clone());
        }
    }
    let additive_basis = m.kernel_basis();
    let d = additive_basis.len();
    let atoms = alg.atoms();
    let extreme_rays = if atoms.len() <= RAY_ENUMERATION_ATOM_BOUND && d >= 1 {
        // in parameter space the cone is {y : R y ≥ 0} with one row per
        // atom; nonnegativity on atoms forces it everywhere for additive maps
        let rows: Vec<Vec<Rational>> = atoms
            .iter()
            .map(|a| additive_basis.iter().map(|b| b[a.idx()].clone()).collect())
            .collect();
        Some(enumerate_extreme_rays(&rows, d).into_iter().map(|y| {
            let mut v = vec![Rational::zero(); n];
            for (col, yi) in additive_basis.iter().zip(y.iter()) {
                if yi.is_zero() {
                    continue;
                }
                for (x, c) in v.iter_mut().zip(col.iter()) {
                    *x += yi * c;
                }
            }
            v
        }).collect())
    } else {
        None
    };
    ChordLowDegrees {
        degree0: "the nonnegative halfline",
        degree1: PositiveAdditiveCone { additive_dim: d, additive_basis, extreme_rays },
    }
}

/// Extreme rays of the pointed polyhedral cone {y ∈ R^d : R y ≥ 0} by
/// enumeration of (d−1)-subsets of tight rows. Rays are normalized to
/// primitive integer direction vectors; each returned ray satisfies all
/// constraints and is tight on a rank-(d−1) subset.
fn enumerate_extreme_rays(rows: &[Vec<Rational>], d: usize) -> Vec<Vec<Rational>> {
    use num::bigint::BigInt;
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        // halfline or line; a single generator suffices when all rows allow it
        for dir in [vec![Rational::one()], vec![-Rational::one()]] {
            if rows.iter().all(|r| (&r[0] * &dir[0]) >= Rational::zero()) {
                return vec![dir];
            }
        }
        return Vec::new();
    }
    let mut rays: Vec<Vec<Rational>> = Vec::new();
    let idx: Vec<usize> = (0..rows.len()).collect();
    let mut subset = vec![0usize; d - 1];
    fn subsets(
        idx: &[usize],
        k: usize,
        start: usize,
        subset: &mut Vec<usize>,
        pos: usize,
        out: &mut dyn FnMut(&[usize]),
    ) {
        if pos == k {
            out(&subset[..k]);
            return;
        }
        for i in start..idx.len() {
            subset[pos] = idx[i];
            subsets(idx, k, i + 1, subset, pos + 1, out);
        }
    }
    let satisfied = |y: &[Rational]| {
        rows.iter().all(|r| {
            r.iter().zip(y.iter()).map(|(a, b)| a * b).sum::<Rational>() >= Rational::zero()
        })
    };
    let mut consider = |tight: &[usize]| {
        let m = Matrix::from_rows(tight.iter().map(|&i| rows[i].clone()).collect());
        let kernel = m.kernel_basis();
        if kernel.len() != 1 {
            return; // not a candidate edge direction
        }
        for dir in [kernel[0].clone(), kernel[0].iter().map(|v| -v.clone()).collect()] {
            if satisfied(&dir) {
                // normalize to a primitive integer vector
                let mut den = BigInt::one();
                for v in &dir {
                    den = num::integer::lcm(den, v.denom().clone());
                }
                let ints: Vec<BigInt> =
                    dir.iter().map(|v| v.numer() * (&den / v.denom())).collect();
                let mut g = BigInt::zero();
                for v in &ints {
                    g = num::integer::gcd(g, v.clone());
                }
                let primitive: Vec<Rational> = ints
                    .iter()
                    .map(|v| Rational::from_integer(v / &g))
                    .collect();
                if !rays.contains(&primitive) {
                    rays.push(primitive);
                }
            }
        }
    };
    subsets(&idx, d - 1, 0, &mut subset, 0, &mut consider);
    rays.sort();
    rays
}

/// One instance of the degree-two membership criterion: both sides of the
/// equivalence between positive state extension and positivity of the
/// connecting image, decided as separate exact LPs.
///
/// The precone side fixes the zero-extension lift b = (β, 0) of the state
/// and asks for c = (ρ, 0) with p(c) = 0 and δ𝒞(c) ≤ δ𝒞(b), i.e. δρ = δβ on
/// pairs, ρ vanishing on the image, and ρ ≤ β pointwise.
pub fn precone_criterion_feasible(p: &ExtensionProblem) -> Result<bool, StateError> {
    let b = p.target;
    let nb = b.element_count();
    // β: zero-extension of σ to all of B (as a plain value table on T_1 ≅ B)
    let mut beta = vec![Rational::zero(); nb];
    for a in p.source.elements() {
        beta[p.inclusion.apply(a).idx()] = p.state.get(a).clone();
    }
    let mut lp = RationalLp::new(nb);
    // δρ = δβ on every defined pair: ρ(y) − ρ(x⊞y) + ρ(x) matches β's value
    for x in b.elements() {
        for &y in b.partners(x) {
            if y < x {
                continue;
            }
            let s = b.sum(x, y).unwrap();
            let mut row: Vec<(usize, Rational)> = Vec::new();
            for (e, c) in [(y, 1i64), (s, -1), (x, 1)] {
                match row.iter_mut().find(|(i, _)| *i == e.idx()) {
                    Some((_, v)) => *v += crate::rational::int(c),
                    None => row.push((e.idx(), crate::rational::int(c))),
                }
            }
            row.retain(|(_, v)| !v.is_zero());
            let rhs = &beta[y.idx()] - &beta[s.idx()] + &beta[x.idx()];
            lp.eq_sparse(row, rhs);
        }
    }
    // p(c) = 0: ρ vanishes on the image of the inclusion
    for a in p.source.elements() {
        lp.eq_sparse(vec![(p.inclusion.apply(a).idx(), Rational::one())], Rational::zero());
    }
    // δ𝒞(c) ≤ δ𝒞(b): ρ ≤ β pointwise; β − ρ is additive by the equalities
    // above, so atom rows suffice and the witness is rechecked in full
    for atom in b.atoms() {
        lp.ge_sparse(vec![(atom.idx(), -Rational::one())], -beta[atom.idx()].clone());
    }
    match lp_feasible(&lp) {
        None => Ok(false),
        Some(rho) => {
            // exact verification: d = b − c is a positive extension witness
            let tau: Vec<Rational> =
                beta.iter().zip(rho.iter()).map(|(x, y)| x - y).collect();
            let tau = crate::states::StateVector { values: tau };
            tau.validate(b).expect("precone witness must be a state");
            for a in p.source.elements() {
                assert_eq!(tau.get(p.inclusion.apply(a)), p.state.get(a));
            }
            Ok(true)
        }
    }
}

/// Prop-style equivalence over a batch of instances: the positive-extension
/// LP and the precone-membership LP must return identical verdicts.
pub fn precone_image_check(instances: &[ExtensionProblem]) -> Result<CheckReport, StateError> {
    let mut report = CheckReport::new("precone(∂) = im(p) over sampled instances");
    let mut feasible = 0usize;
    for (i, inst) in instances.iter().enumerate() {
        let direct = extend_state(&ExtensionProblem {
            source: inst.source,
            target: inst.target,
            inclusion: inst.inclusion.clone(),
            state: inst.state.clone(),
            mode: ExtensionMode::Positive,
        })
        .is_some();
        let via_precone = precone_criterion_feasible(inst)?;
        if direct {
            feasible += 1;
        }
        report.check(
            direct == via_precone,
            format!(
                "instance {i} ({} ↪ {}): extension {} / precone {}",
                inst.source.name(),
                inst.target.name(),
                if direct { "feasible" } else { "infeasible" },
                if via_precone { "feasible" } else { "infeasible" }
            ),
        );
    }
    report.note(format!(
        "{} of {} instances feasible; verdicts agreed on all",
        feasible,
        instances.len()
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::rational::{int, rat};
    use crate::states::{pentagon_half_state, separating_powerset_embedding, StateVector};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coboundary_of_pure_ordered_part() {
        // (0, ψ) ↦ (0, −δψ)
        let ff = corpus::firefly();
        let mut table = TestTable::new(&ff);
        let cx =
            CochainComplex::build(&ff, &mut table, Theory::Hochschild, 2, Filter::Full).unwrap();
        let phi = vec![Rational::zero(); cx.bases[1].dim()];
        let psi: Vec<Rational> = (0..cx.bases[0].dim()).map(|i| int(i as i64 + 1)).collect();
        let level = order_coboundary(&ff, 1, &phi, &psi).unwrap();
        assert!(level.discrete.iter().all(|v| v.is_zero()));
        let expected: Vec<Rational> =
            cx.deltas[0].mul_vec(&psi).iter().map(|v| -v.clone()).collect();
        assert_eq!(level.ordered, expected);
    }

    #[test]
    fn degree_zero_coboundary_is_injection_into_ordered_part() {
        // δ⁰(r) = (0, r): the precone of δ⁰ is the nonnegative halfline
        let ff = corpus::firefly();
        let phi = vec![rat(3, 2)];
        let level = order_coboundary(&ff, 0, &phi, &[]).unwrap();
        assert!(level.discrete.iter().all(|v| v.is_zero()));
        assert_eq!(level.ordered, vec![rat(3, 2)]);
        assert!(level.is_positive());
        let neg = order_coboundary(&ff, 0, &[int(-1)], &[]).unwrap();
        assert!(!neg.is_positive());
    }

    #[test]
    fn order_coboundary_squares_to_zero_on_random_cochains() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for alg in [corpus::firefly(), corpus::powerset(3)] {
            let mut table = TestTable::new(&alg);
            let cx =
                CochainComplex::build(&alg, &mut table, Theory::Hochschild, 3, Filter::Full)
                    .unwrap();
            for n in 1..=2usize {
                let phi: Vec<Rational> =
                    (0..cx.bases[n].dim()).map(|_| int(rng.gen_range(-3..=3))).collect();
                let psi: Vec<Rational> =
                    (0..cx.bases[n - 1].dim()).map(|_| int(rng.gen_range(-3..=3))).collect();
                // the squared-zero property is asserted inside
                let _ = order_coboundary(&alg, n, &phi, &psi).unwrap();
            }
        }
    }

    #[test]
    fn every_state_lies_in_the_degree_one_cone() {
        let ff = corpus::firefly();
        let cone = chord_low_degrees(&ff).degree1;
        for sigma in crate::states::random_classical_states(&ff, 5, 7) {
            assert!(cone.contains(&ff, &sigma.values));
            let negated: Vec<Rational> = sigma.values.iter().map(|v| -v.clone()).collect();
            assert!(!cone.contains(&ff, &negated));
        }
    }

    #[test]
    fn powerset_rays_are_coordinate_evaluations() {
        for m in 2..=5u32 {
            let p = corpus::powerset(m);
            let cone = chord_low_degrees(&p).degree1;
            let rays = cone.extreme_rays.expect("small atom count");
            assert_eq!(rays.len(), m as usize, "P({m}) has {m} extreme rays");
            // each ray is a scaled two-valued point evaluation
            for ray in &rays {
                let nonzero_atoms = p
                    .atoms()
                    .into_iter()
                    .filter(|a| !ray[a.idx()].is_zero())
                    .count();
                assert_eq!(nonzero_atoms, 1);
            }
        }
    }

    #[test]
    fn firefly_cone_dimension() {
        // additive maps on the firefly: five atom values with a + b = c + d
        let cone = chord_low_degrees(&corpus::firefly()).degree1;
        assert_eq!(cone.additive_dim, 4);
        assert!(cone.extreme_rays.is_some());
    }

    #[test]
    fn cone_membership_closed_under_addition_and_scaling() {
        let ff = corpus::firefly();
        let cone = chord_low_degrees(&ff).degree1;
        let states = crate::states::random_classical_states(&ff, 4, 99);
        for pair in states.windows(2) {
            let sum: Vec<Rational> = pair[0]
                .values
                .iter()
                .zip(pair[1].values.iter())
                .map(|(a, b)| a + b)
                .collect();
            assert!(cone.contains(&ff, &sum));
            let scaled: Vec<Rational> =
                pair[0].values.iter().map(|v| v * rat(7, 3)).collect();
            assert!(cone.contains(&ff, &scaled));
        }
    }

    #[test]
    fn precone_matches_extension_on_identity() {
        let ff = corpus::firefly();
        let sigma = crate::states::random_classical_states(&ff, 1, 3)[0].clone();
        let p = ExtensionProblem::new(
            &ff,
            &ff,
            crate::algebra::Morphism::identity(&ff),
            sigma,
            ExtensionMode::Positive,
        )
        .unwrap();
        assert!(precone_criterion_feasible(&p).unwrap());
    }

    #[test]
    fn precone_infeasible_on_pentagon_half_state() {
        let pent = corpus::pentagon();
        let sigma = pentagon_half_state(&pent);
        let (target, incl) = separating_powerset_embedding(&pent).unwrap();
        let p = ExtensionProblem::new(&pent, &target, incl, sigma, ExtensionMode::Positive)
            .unwrap();
        assert!(!precone_criterion_feasible(&p).unwrap());
    }

    #[test]
    fn precone_image_check_on_small_batch() {
        let ff = corpus::firefly();
        let blocks = ff.blocks().unwrap();
        let (_, incl) = ff.restrict_to(&blocks[0]);
        let (block, _) = ff.restrict_to(&blocks[0]);
        let states = crate::states::random_classical_states(&block, 4, 17);
        let instances: Vec<ExtensionProblem> = states
            .into_iter()
            .map(|s| {
                ExtensionProblem::new(&block, &ff, incl.clone(), s, ExtensionMode::Positive)
                    .unwrap()
            })
            .collect();
        let report = precone_image_check(&instances).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn cone_contains_rejects_non_additive() {
        let ff = corpus::firefly();
        let cone = chord_low_degrees(&ff).degree1;
        let mut values = vec![Rational::zero(); ff.element_count()];
        values[ff.one().idx()] = int(1);
        // zero on everything else is not additive: a + a⊥ must give 1
        assert!(!cone.contains(&ff, &values));
        let sv = StateVector { values };
        let _ = sv;
    }
}
