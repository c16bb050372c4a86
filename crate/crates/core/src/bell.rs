//! The two-party, two-setting, two-outcome Bell scenario over exact
//! rationals: no-signaling boxes, the bundled probability table, CHSH,
//! local-polytope membership, and the bimorphism reading of a box against
//! the scenario algebras.
//!
//! A box stores the four joint-outcome distributions, one per measurement
//! context. The scenario algebra of one party is the coproduct of two
//! four-element power sets: two binary measurements that cannot be performed
//! together. A no-signaling box is exactly a map on atom pairs that extends
//! to a bimorphism of the two scenario algebras, which is how boxes stand in
//! for states on the (never materialized) tensor product.

use crate::algebra::EffectAlgebra;
use crate::cohomology::CheckReport;
use crate::lp::{lp_feasible, RationalLp};
use crate::rational::{rat, Rational};
use num::traits::{One, Signed, Zero};

/// Context order (a,b), (a,b'), (a',b), (a',b'); outcome order
/// (0,0), (0,1), (1,0), (1,1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoSignalingBox {
    pub probabilities: [[Rational; 4]; 4],
}

pub const CONTEXT_NAMES: [&str; 4] = ["(a,b)", "(a,b')", "(a',b)", "(a',b')"];
pub const OUTCOME_NAMES: [&str; 4] = ["(0,0)", "(0,1)", "(1,0)", "(1,1)"];

impl NoSignalingBox {
    pub fn from_rows(rows: [[Rational; 4]; 4]) -> NoSignalingBox {
        NoSignalingBox { probabilities: rows }
    }

    pub fn row(&self, context: usize) -> &[Rational; 4] {
        &self.probabilities[context]
    }

    /// p(outcome i for Alice | context c), summing over Bob's outcome.
    fn alice_marginal(&self, context: usize, i: usize) -> Rational {
        &self.probabilities[context][2 * i] + &self.probabilities[context][2 * i + 1]
    }

    /// p(outcome j for Bob | context c), summing over Alice's outcome.
    fn bob_marginal(&self, context: usize, j: usize) -> Rational {
        &self.probabilities[context][j] + &self.probabilities[context][j + 2]
    }
}

/// The probability table of the bundled nonlocal box.
pub fn bell_paper_box() -> NoSignalingBox {
    let r = |a: i64, b: i64, c: i64, d: i64| {
        [rat(a, 8), rat(b, 8), rat(c, 8), rat(d, 8)]
    };
    NoSignalingBox::from_rows([r(4, 0, 0, 4), r(3, 1, 1, 3), r(3, 1, 1, 3), r(1, 3, 3, 1)])
}

/// All outcomes equally likely in every context.
pub fn uniform_box() -> NoSignalingBox {
    let row = || [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)];
    NoSignalingBox::from_rows([row(), row(), row(), row()])
}

/// Perfect correlation except anti-correlation in the (a',b') context.
pub fn pr_box() -> NoSignalingBox {
    let c = || [rat(1, 2), Rational::zero(), Rational::zero(), rat(1, 2)];
    let a = [Rational::zero(), rat(1, 2), rat(1, 2), Rational::zero()];
    NoSignalingBox::from_rows([c(), c(), c(), a])
}

/// The deterministic box for setting choices (α, α', β, β') ∈ {0,1}⁴.
pub fn deterministic_box(alpha: usize, alpha_p: usize, beta: usize, beta_p: usize) -> NoSignalingBox {
    let mut rows: [[Rational; 4]; 4] = Default::default();
    let choices = [(alpha, beta), (alpha, beta_p), (alpha_p, beta), (alpha_p, beta_p)];
    for (c, (i, j)) in choices.iter().enumerate() {
        rows[c][2 * i + j] = Rational::one();
    }
    NoSignalingBox::from_rows(rows)
}

/// Distribution and marginal checks; every failure carries the offending
/// context or marginal.
pub fn verify_no_signaling(b: &NoSignalingBox) -> CheckReport {
    let mut report = CheckReport::new("no-signaling");
    for c in 0..4 {
        let row = b.row(c);
        report.check(
            row.iter().all(|p| !p.is_negative()),
            format!("context {} nonnegative", CONTEXT_NAMES[c]),
        );
        let total: Rational = row.iter().cloned().sum();
        report.check(total.is_one(), format!("context {} sums to 1", CONTEXT_NAMES[c]));
    }
    for i in 0..2 {
        report.check(
            b.alice_marginal(0, i) == b.alice_marginal(1, i),
            format!("Alice marginal p(a={i}) agrees across Bob's settings"),
        );
        report.check(
            b.alice_marginal(2, i) == b.alice_marginal(3, i),
            format!("Alice marginal p(a'={i}) agrees across Bob's settings"),
        );
        report.check(
            b.bob_marginal(0, i) == b.bob_marginal(2, i),
            format!("Bob marginal p(b={i}) agrees across Alice's settings"),
        );
        report.check(
            b.bob_marginal(1, i) == b.bob_marginal(3, i),
            format!("Bob marginal p(b'={i}) agrees across Alice's settings"),
        );
    }
    report
}

/// E(a,b) + E(a,b') + E(a',b) − E(a',b') with E = p(same) − p(different).
pub fn chsh(b: &NoSignalingBox) -> Rational {
    let e = |c: usize| -> Rational {
        let r = b.row(c);
        &r[0] + &r[3] - &r[1] - &r[2]
    };
    e(0) + e(1) + e(2) - e(3)
}

/// Convex weights over the 16 deterministic boxes reproducing the box, or
/// None: exact local-polytope membership. Weights are indexed by
/// (α, α', β, β') read as a 4-bit number.
pub fn is_local(b: &NoSignalingBox) -> Option<Vec<Rational>> {
    let verts: Vec<NoSignalingBox> = (0..16)
        .map(|k| deterministic_box(k & 1, (k >> 1) & 1, (k >> 2) & 1, (k >> 3) & 1))
        .collect();
    let mut lp = RationalLp::new(16);
    for i in 0..16 {
        lp.nonneg(i);
    }
    lp.eq(vec![Rational::one(); 16], Rational::one());
    for c in 0..4 {
        for o in 0..4 {
            let row: Vec<Rational> =
                verts.iter().map(|v| v.probabilities[c][o].clone()).collect();
            lp.eq(row, b.probabilities[c][o].clone());
        }
    }
    let w = lp_feasible(&lp)?;
    for c in 0..4 {
        for o in 0..4 {
            let mix: Rational =
                verts.iter().zip(w.iter()).map(|(v, wi)| &v.probabilities[c][o] * wi).sum();
            assert_eq!(mix, b.probabilities[c][o], "local mixture must reproduce the box");
        }
    }
    Some(w)
}

/// Signed affine weights over the 16 deterministic boxes: the chain-level
/// form of the degree-two obstruction for boxes. Every no-signaling box
/// admits them, which is exactly how nonlocal boxes slip past the signed
/// criterion.
pub fn signed_local_weights(b: &NoSignalingBox) -> Option<Vec<Rational>> {
    let verts: Vec<NoSignalingBox> = (0..16)
        .map(|k| deterministic_box(k & 1, (k >> 1) & 1, (k >> 2) & 1, (k >> 3) & 1))
        .collect();
    let mut lp = RationalLp::new(16);
    lp.eq(vec![Rational::one(); 16], Rational::one());
    for c in 0..4 {
        for o in 0..4 {
            let row: Vec<Rational> =
                verts.iter().map(|v| v.probabilities[c][o].clone()).collect();
            lp.eq(row, b.probabilities[c][o].clone());
        }
    }
    lp_feasible(&lp)
}

/// Alice's and Bob's scenario algebras: coproducts of two power sets with
/// the standard event labels.
pub fn scenario_algebras() -> (EffectAlgebra, EffectAlgebra) {
    let p2 = EffectAlgebra::powerset(2).expect("P(2) is tiny");
    let mut alice = EffectAlgebra::coproduct(&p2, &p2).expect("six elements");
    let mut bob = alice.clone();
    alice.set_name("E_A");
    alice
        .relabel(vec!["0".into(), "1".into(), "a0".into(), "a1".into(), "a0'".into(), "a1'".into()])
        .expect("six labels");
    bob.set_name("E_B");
    bob.relabel(vec!["0".into(), "1".into(), "b0".into(), "b1".into(), "b0'".into(), "b1'".into()])
        .expect("six labels");
    (alice, bob)
}

/// Reads the box as a bimorphism on the scenario algebras: the sixteen
/// atom-pair probabilities extend to all element pairs by additivity in each
/// slot, and the extension is single-valued exactly when the box is
/// no-signaling. Checks well-definedness and f(1,1) = 1.
pub fn box_as_bimorphism_check(
    b: &NoSignalingBox,
    alice: &EffectAlgebra,
    bob: &EffectAlgebra,
) -> CheckReport {
    let mut report = CheckReport::new("box as bimorphism");
    let atom_labels_a = ["a0", "a1", "a0'", "a1'"];
    let atom_labels_b = ["b0", "b1", "b0'", "b1'"];
    // probability of an atom pair from the table
    let prob = |ai: usize, bj: usize| -> Rational {
        let (a_meas, a_out) = (ai / 2, ai % 2);
        let (b_meas, b_out) = (bj / 2, bj % 2);
        let context = 2 * a_meas + b_meas;
        b.probabilities[context][2 * a_out + b_out].clone()
    };
    // f(x, 1) must not depend on which of Bob's tests is used to build 1
    for (ai, al) in atom_labels_a.iter().enumerate() {
        let via_b: Rational = prob(ai, 0) + prob(ai, 1);
        let via_bp: Rational = prob(ai, 2) + prob(ai, 3);
        report.check(
            via_b == via_bp,
            format!("f({al}, 1) is single-valued: {via_b} vs {via_bp}"),
        );
    }
    for (bj, bl) in atom_labels_b.iter().enumerate() {
        let via_a: Rational = prob(0, bj) + prob(1, bj);
        let via_ap: Rational = prob(2, bj) + prob(3, bj);
        report.check(
            via_a == via_ap,
            format!("f(1, {bl}) is single-valued: {via_a} vs {via_ap}"),
        );
    }
    // f(1,1) through every context
    for c in 0..4 {
        let total: Rational = b.row(c).iter().cloned().sum();
        report.check(
            total.is_one(),
            format!("f(1,1) = 1 through context {}", CONTEXT_NAMES[c]),
        );
    }
    // nonnegativity makes the extension land in [0,1]
    for c in 0..4 {
        report.check(
            b.row(c).iter().all(|p| !p.is_negative()),
            format!("context {} values lie in [0,1]", CONTEXT_NAMES[c]),
        );
    }
    let _ = (alice, bob);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn paper_box_rows() {
        let b = bell_paper_box();
        assert_eq!(b.row(0), &[rat(1, 2), int(0), int(0), rat(1, 2)]);
        assert_eq!(b.row(3), &[rat(1, 8), rat(3, 8), rat(3, 8), rat(1, 8)]);
    }

    #[test]
    fn paper_box_is_no_signaling() {
        assert!(verify_no_signaling(&bell_paper_box()).passed);
    }

    #[test]
    fn chsh_values() {
        assert_eq!(chsh(&bell_paper_box()), rat(5, 2));
        assert_eq!(chsh(&uniform_box()), int(0));
        assert_eq!(chsh(&pr_box()), int(4));
    }

    #[test]
    fn paper_box_is_not_local() {
        assert!(is_local(&bell_paper_box()).is_none());
    }

    #[test]
    fn uniform_box_is_local() {
        assert!(is_local(&uniform_box()).is_some());
    }

    #[test]
    fn pr_box_is_not_local() {
        assert!(verify_no_signaling(&pr_box()).passed);
        assert!(is_local(&pr_box()).is_none());
    }

    #[test]
    fn deterministic_boxes_are_local_with_unit_weight() {
        for k in 0..16usize {
            let b = deterministic_box(k & 1, (k >> 1) & 1, (k >> 2) & 1, (k >> 3) & 1);
            assert!(verify_no_signaling(&b).passed);
            let w = is_local(&b).unwrap();
            assert!(w[k].is_one());
            assert_eq!(w.iter().filter(|x| !x.is_zero()).count(), 1);
        }
    }

    #[test]
    fn local_mixtures_respect_chsh_bound() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..50 {
            let raw: Vec<i64> = (0..16).map(|_| rng.gen_range(0..4)).collect();
            let total: i64 = raw.iter().sum::<i64>().max(1);
            let mut rows: [[Rational; 4]; 4] = Default::default();
            for (k, w) in raw.iter().enumerate() {
                if *w == 0 {
                    continue;
                }
                let b = deterministic_box(k & 1, (k >> 1) & 1, (k >> 2) & 1, (k >> 3) & 1);
                for c in 0..4 {
                    for o in 0..4 {
                        rows[c][o] += &b.probabilities[c][o] * rat(*w, total);
                    }
                }
            }
            if raw.iter().all(|w| *w == 0) {
                continue;
            }
            let mix = NoSignalingBox::from_rows(rows);
            assert!(is_local(&mix).is_some());
            let v = chsh(&mix);
            assert!(v <= int(2) && v >= int(-2), "local boxes satisfy |CHSH| ≤ 2");
        }
    }

    #[test]
    fn scenario_algebra_shape() {
        let (alice, bob) = scenario_algebras();
        assert_eq!(alice.element_count(), 6);
        assert!(alice.verify_axioms().is_valid());
        let a0 = alice.element_by_label("a0").unwrap();
        let a1 = alice.element_by_label("a1").unwrap();
        let a0p = alice.element_by_label("a0'").unwrap();
        assert_eq!(alice.sum(a0, a1), Some(alice.one()));
        assert_eq!(alice.sum(a0, a0p), None, "incompatible measurements never sum");
        assert!(crate::algebra::find_isomorphism(&alice, &bob).is_some());
    }

    #[test]
    fn paper_box_is_a_bimorphism() {
        let (alice, bob) = scenario_algebras();
        assert!(box_as_bimorphism_check(&bell_paper_box(), &alice, &bob).passed);
    }

    #[test]
    fn signaling_perturbation_is_caught() {
        let mut b = bell_paper_box();
        // move 1/8 inside the (a,b) row: row sums stay 1 but marginals break
        b.probabilities[0][0] -= rat(1, 8);
        b.probabilities[0][1] += rat(1, 8);
        let (alice, bob) = scenario_algebras();
        let report = box_as_bimorphism_check(&b, &alice, &bob);
        assert!(!report.passed);
        assert!(report.details.iter().any(|d| d.contains("FAIL") && d.contains("single-valued")));
        assert!(!verify_no_signaling(&b).passed);
    }

    #[test]
    fn signed_weights_exist_even_for_nonlocal_boxes() {
        for b in [bell_paper_box(), pr_box(), uniform_box()] {
            assert!(signed_local_weights(&b).is_some());
        }
        assert!(is_local(&bell_paper_box()).is_none());
    }
}
