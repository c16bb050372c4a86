//! Tests on an effect algebra and their cyclic-set structure.
//!
//! An (n+1)-test is a tuple (a₀, …, aₙ) whose left-associated sum is 1; the
//! set of these is T_n(A). Tests carry face maps (adding adjacent entries,
//! with a wrap-around face), degeneracies (inserting zeroes) and a rotation,
//! making T(A) a cyclic set. All cochain complexes downstream are built on
//! the canonically ordered test lists and their rotation orbits computed
//! here.

use crate::algebra::{EffectAlgebra, ElementId};
use std::collections::HashMap;
use std::fmt;

/// Default cap on the number of tests enumerated per degree.
pub const DEFAULT_TEST_CAP: usize = 2_000_000;

/// A tuple of elements summing to 1. A value of this type is only meaningful
/// together with the algebra it was enumerated from.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Test(pub Vec<ElementId>);

impl Test {
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn entries(&self) -> &[ElementId] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapExceeded {
    pub degree: usize,
    /// Number of tests seen when enumeration stopped.
    pub at_least: usize,
    pub cap: usize,
}

impl fmt::Display for CapExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "degree {} has at least {} tests, over the cap of {}",
            self.degree, self.at_least, self.cap
        )
    }
}

impl std::error::Error for CapExceeded {}

/// Face map dᵢ: merge entries i and i+1; for i = n, wrap to (aₙ ⊞ a₀, a₁, …).
/// Always defined on tests by associativity.
pub fn face(alg: &EffectAlgebra, t: &Test, i: usize) -> Test {
    let n = t.degree();
    assert!(i <= n, "face index out of range");
    let e = &t.0;
    if i < n {
        let merged = alg
            .sum(e[i], e[i + 1])
            .expect("adjacent entries of a test are summable");
        let mut out = Vec::with_capacity(n);
        out.extend_from_slice(&e[..i]);
        out.push(merged);
        out.extend_from_slice(&e[i + 2..]);
        Test(out)
    } else {
        let merged = alg.sum(e[n], e[0]).expect("wrap-around entries of a test are summable");
        let mut out = Vec::with_capacity(n);
        out.push(merged);
        out.extend_from_slice(&e[1..n]);
        Test(out)
    }
}

/// Degeneracy sᵢ: insert a zero at position i (appending when i = n+1 … the
/// length of the tuple).
pub fn degeneracy(alg: &EffectAlgebra, t: &Test, i: usize) -> Test {
    assert!(i <= t.0.len(), "degeneracy index out of range");
    let mut out = t.0.clone();
    out.insert(i, alg.zero());
    Test(out)
}

/// Cyclic rotation λ: (a₀, …, aₙ) ↦ (aₙ, a₀, …, aₙ₋₁).
pub fn rotate(t: &Test) -> Test {
    let mut out = Vec::with_capacity(t.0.len());
    out.push(*t.0.last().unwrap());
    out.extend_from_slice(&t.0[..t.0.len() - 1]);
    Test(out)
}

/// All (n+1)-tests in lexicographic order. The first n entries range over
/// summable prefixes; the last entry is forced as the complement of the
/// prefix sum.
pub fn enumerate_tests(
    alg: &EffectAlgebra,
    n: usize,
    cap: usize,
) -> Result<Vec<Test>, CapExceeded> {
    let mut out = Vec::new();
    let mut prefix: Vec<ElementId> = Vec::with_capacity(n + 1);
    fn rec(
        alg: &EffectAlgebra,
        n: usize,
        acc: ElementId,
        prefix: &mut Vec<ElementId>,
        out: &mut Vec<Test>,
        cap: usize,
    ) -> Result<(), ()> {
        if prefix.len() == n {
            let last = alg.complement(acc);
            debug_assert_eq!(alg.sum(acc, last), Some(alg.one()));
            if out.len() >= cap {
                return Err(());
            }
            let mut t = prefix.clone();
            t.push(last);
            out.push(Test(t));
            return Ok(());
        }
        for &next in alg.partners(acc) {
            let acc2 = alg.sum(acc, next).unwrap();
            prefix.push(next);
            let r = rec(alg, n, acc2, prefix, out, cap);
            prefix.pop();
            r?;
        }
        Ok(())
    }
    match rec(alg, n, alg.zero(), &mut prefix, &mut out, cap) {
        Ok(()) => Ok(out),
        Err(()) => Err(CapExceeded { degree: n, at_least: out.len() + 1, cap }),
    }
}

/// One rotation orbit in a degree table.
#[derive(Clone, Debug)]
pub struct Orbit {
    /// Index of the representative (the lexicographically least member).
    pub rep: usize,
    pub size: usize,
    /// Whether an invariant cochain can be nonzero on this orbit: in degree n
    /// the sign condition α(t) = (−1)ⁿ α(λt) forces zero exactly when n is
    /// odd and the orbit size is odd.
    pub consistent: bool,
}

/// Tests of one degree with index lookup and orbit decomposition.
#[derive(Clone, Debug)]
pub struct DegreeTable {
    pub degree: usize,
    pub tests: Vec<Test>,
    pub index: HashMap<Test, usize>,
    pub orbits: Vec<Orbit>,
    /// For each test: (orbit id, offset m) with test = λᵐ(representative).
    pub position: Vec<(u32, u32)>,
}

impl DegreeTable {
    fn build(alg: &EffectAlgebra, degree: usize, tests: Vec<Test>) -> DegreeTable {
        let index: HashMap<Test, usize> =
            tests.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let mut orbits = Vec::new();
        let mut position = vec![(u32::MAX, 0u32); tests.len()];
        for (i, t) in tests.iter().enumerate() {
            if position[i].0 != u32::MAX {
                continue;
            }
            let oid = orbits.len() as u32;
            let mut member = t.clone();
            let mut size = 0u32;
            loop {
                position[index[&member]] = (oid, size);
                member = rotate(&member);
                size += 1;
                if member == *t {
                    break;
                }
            }
            let consistent = degree % 2 == 0 || size % 2 == 0;
            orbits.push(Orbit { rep: i, size: size as usize, consistent });
        }
        let _ = alg;
        DegreeTable { degree, tests, index, orbits, position }
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }
}

/// Memoized per-degree test tables for one algebra.
pub struct TestTable<'a> {
    pub alg: &'a EffectAlgebra,
    pub cap: usize,
    degrees: Vec<DegreeTable>,
}

impl<'a> TestTable<'a> {
    pub fn new(alg: &'a EffectAlgebra) -> TestTable<'a> {
        TestTable { alg, cap: DEFAULT_TEST_CAP, degrees: Vec::new() }
    }

    pub fn with_cap(alg: &'a EffectAlgebra, cap: usize) -> TestTable<'a> {
        TestTable { alg, cap, degrees: Vec::new() }
    }

    /// Ensures degrees 0..=n are enumerated and returns the table for n.
    pub fn degree(&mut self, n: usize) -> Result<&DegreeTable, CapExceeded> {
        while self.degrees.len() <= n {
            let d = self.degrees.len();
            let tests = enumerate_tests(self.alg, d, self.cap)?;
            self.degrees.push(DegreeTable::build(self.alg, d, tests));
        }
        Ok(&self.degrees[n])
    }

    pub fn built(&self, n: usize) -> &DegreeTable {
        &self.degrees[n]
    }
}

/// Exhaustively checks the cyclic-set identities satisfied by the concrete
/// face/degeneracy/rotation maps, over all tests of degree ≤ nmax:
///
///   dᵢ dⱼ = dⱼ₋₁ dᵢ                 (i < j)
///   sᵢ sⱼ = sⱼ₊₁ sᵢ                 (i ≤ j)
///   dᵢ sⱼ = sⱼ₋₁ dᵢ                 (i < j−1)
///   dᵢ sⱼ = id                      (i = j−1 or i = j)
///   dᵢ sⱼ = sⱼ dᵢ₋₁                 (i > j, except the pair below)
///   dₙ s₀ = λ
///   λⁿ⁺¹ = id,   d₀ λ = dₙ,   dᵢ λ = λ dᵢ₋₁,   sᵢ λ = λ sᵢ₋₁ (i ≥ 1),
///   s₀ λ = λ sₙ λ
///
/// plus closure: every face of a test is again a test of the lower degree.
pub fn verify_cyclic_relations(alg: &EffectAlgebra, nmax: usize) -> Vec<String> {
    let mut violations = Vec::new();
    let mut table = TestTable::new(alg);
    for n in 0..=nmax {
        if table.degree(n).is_err() {
            violations.push(format!("degree {n}: enumeration cap exceeded"));
            return violations;
        }
    }
    for n in 1..=nmax {
        let tests: Vec<Test> = table.built(n).tests.clone();
        let lower = &table.built(n - 1).index;
        for t in &tests {
            // closure, and face/face composites (which land in degree n−2,
            // so they only exist from degree 2 up)
            for i in 0..=n {
                let f = face(alg, t, i);
                if !lower.contains_key(&f) {
                    violations.push(format!("face {i} of {t:?} leaves T_{}", n - 1));
                }
                for j in i + 1..=n {
                    if n < 2 {
                        continue;
                    }
                    if face(alg, &face(alg, t, j), i) != face(alg, &face(alg, t, i), j - 1) {
                        violations.push(format!("d{i} d{j} != d{} d{i} at {t:?}", j - 1));
                    }
                }
            }
            // rotation
            let mut r = t.clone();
            for _ in 0..=n {
                r = rotate(&r);
            }
            if r != *t {
                violations.push(format!("rotation order breaks at {t:?}"));
            }
            if face(alg, &rotate(t), 0) != face(alg, t, n) {
                violations.push(format!("d0 λ != dn at {t:?}"));
            }
            for i in 1..=n {
                if face(alg, &rotate(t), i) != rotate(&face(alg, t, i - 1)) {
                    violations.push(format!("d{i} λ != λ d{} at {t:?}", i - 1));
                }
            }
        }
        // degeneracy identities from degree n-1 upward
        let lower_tests: Vec<Test> = table.built(n - 1).tests.clone();
        for t in &lower_tests {
            let len = t.0.len();
            for j in 0..=len {
                let s = degeneracy(alg, t, j);
                for i in 0..=n {
                    let ds = face(alg, &s, i);
                    let expected = if i + 1 < j {
                        degeneracy(alg, &face(alg, t, i), j - 1)
                    } else if i == j || i + 1 == j {
                        t.clone()
                    } else if i == n && j == 0 {
                        rotate(t)
                    } else {
                        degeneracy(alg, &face(alg, t, i - 1), j)
                    };
                    if ds != expected {
                        violations.push(format!("d{i} s{j} identity fails at {t:?}"));
                    }
                }
                for i in 0..=j {
                    if degeneracy(alg, &degeneracy(alg, t, j), i)
                        != degeneracy(alg, &degeneracy(alg, t, i), j + 1)
                    {
                        violations.push(format!("s{i} s{j} identity fails at {t:?}"));
                    }
                }
            }
            for i in 1..=len {
                if degeneracy(alg, &rotate(t), i) != rotate(&degeneracy(alg, t, i - 1)) {
                    violations.push(format!("s{i} λ != λ s{} at {t:?}", i - 1));
                }
            }
            if degeneracy(alg, &rotate(t), 0) != rotate(&degeneracy(alg, &rotate(t), len)) {
                violations.push(format!("s0 λ != λ sn λ at {t:?}"));
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::EffectAlgebra;
    use crate::corpus;

    #[test]
    fn l1_test_counts() {
        let l1 = EffectAlgebra::l1();
        for n in 0..5 {
            let tests = enumerate_tests(&l1, n, DEFAULT_TEST_CAP).unwrap();
            assert_eq!(tests.len(), n + 1, "T_n(L1) has n+1 tests");
        }
    }

    #[test]
    fn degree_zero_is_the_unit_test() {
        for alg in [corpus::firefly(), corpus::powerset(3), EffectAlgebra::l1()] {
            let tests = enumerate_tests(&alg, 0, DEFAULT_TEST_CAP).unwrap();
            assert_eq!(tests.len(), 1);
            assert_eq!(tests[0].0, vec![alg.one()]);
        }
    }

    #[test]
    fn degree_one_matches_element_count() {
        for alg in [corpus::firefly(), corpus::powerset(3), corpus::bike()] {
            let tests = enumerate_tests(&alg, 1, DEFAULT_TEST_CAP).unwrap();
            assert_eq!(tests.len(), alg.element_count());
        }
    }

    #[test]
    fn powerset_test_counts() {
        for m in 1..=4u32 {
            let p = corpus::powerset(m);
            for n in 0..4usize {
                let tests = enumerate_tests(&p, n, DEFAULT_TEST_CAP).unwrap();
                assert_eq!(tests.len(), (n + 1).pow(m), "T_n(P(m)) = (n+1)^m");
            }
        }
    }

    #[test]
    fn product_test_counts_multiply() {
        let a = corpus::firefly();
        let b = corpus::powerset(2);
        let p = EffectAlgebra::product(&a, &b).unwrap();
        for n in 0..4usize {
            let ta = enumerate_tests(&a, n, DEFAULT_TEST_CAP).unwrap().len();
            let tb = enumerate_tests(&b, n, DEFAULT_TEST_CAP).unwrap().len();
            let tp = enumerate_tests(&p, n, DEFAULT_TEST_CAP).unwrap().len();
            assert_eq!(tp, ta * tb);
        }
    }

    #[test]
    fn coproduct_test_counts() {
        let a = corpus::firefly();
        let b = corpus::powerset(3);
        let c = EffectAlgebra::coproduct(&a, &b).unwrap();
        for n in 0..4usize {
            let ta = enumerate_tests(&a, n, DEFAULT_TEST_CAP).unwrap().len();
            let tb = enumerate_tests(&b, n, DEFAULT_TEST_CAP).unwrap().len();
            let tc = enumerate_tests(&c, n, DEFAULT_TEST_CAP).unwrap().len();
            assert_eq!(tc, ta + tb - n - 1, "trivial tests are shared");
        }
    }

    #[test]
    fn cap_is_reported() {
        let p = corpus::powerset(4);
        let err = enumerate_tests(&p, 3, 10).unwrap_err();
        assert_eq!(err.degree, 3);
        assert!(err.at_least > 10);
    }

    #[test]
    fn face_examples_on_firefly() {
        let ff = corpus::firefly();
        let f = |l: &str| ff.element_by_label(l).unwrap();
        let t = Test(vec![f("a"), f("b"), f("e")]);
        let ab = ff.sum(f("a"), f("b")).unwrap();
        assert_eq!(face(&ff, &t, 0), Test(vec![ab, f("e")]));
        // wrap-around face on a rotated test
        let t2 = Test(vec![f("b"), f("e"), f("a")]);
        assert_eq!(face(&ff, &t2, 2), Test(vec![ab, f("e")]));
        let mut table = TestTable::new(&ff);
        assert!(table.degree(1).unwrap().index.contains_key(&face(&ff, &t2, 2)));
    }

    #[test]
    fn face_of_trivial_test() {
        let l1 = EffectAlgebra::l1();
        let t = Test(vec![l1.one(), l1.zero()]);
        assert_eq!(face(&l1, &t, 1), Test(vec![l1.one()]));
    }

    #[test]
    fn degeneracy_examples() {
        let ff = corpus::firefly();
        let f = |l: &str| ff.element_by_label(l).unwrap();
        let one = Test(vec![ff.one()]);
        assert_eq!(degeneracy(&ff, &one, 0), Test(vec![ff.zero(), ff.one()]));
        let t = Test(vec![f("a"), f("b"), f("e")]);
        assert_eq!(
            degeneracy(&ff, &t, 1),
            Test(vec![f("a"), ff.zero(), f("b"), f("e")])
        );
        // face of a degeneracy is the identity
        for i in 0..=t.0.len() {
            if i < t.0.len() {
                assert_eq!(face(&ff, &degeneracy(&ff, &t, i), i), t);
            }
        }
    }

    #[test]
    fn rotation_examples() {
        let ff = corpus::firefly();
        let f = |l: &str| ff.element_by_label(l).unwrap();
        let t = Test(vec![f("a"), f("b"), f("e")]);
        assert_eq!(rotate(&t), Test(vec![f("e"), f("a"), f("b")]));
        let mut r = t.clone();
        for _ in 0..3 {
            r = rotate(&r);
        }
        assert_eq!(r, t);
    }

    #[test]
    fn orbit_of_trivial_pair_in_l1() {
        let l1 = EffectAlgebra::l1();
        let mut table = TestTable::new(&l1);
        let d1 = table.degree(1).unwrap();
        assert_eq!(d1.tests.len(), 2);
        assert_eq!(d1.orbits.len(), 1);
        assert_eq!(d1.orbits[0].size, 2);
    }

    #[test]
    fn rotation_preserves_subalgebra_tests() {
        let ff = corpus::firefly();
        let blocks = ff.blocks().unwrap();
        let mask = ff.subset_mask(&blocks[0]);
        let mut table = TestTable::new(&ff);
        for n in 0..3usize {
            for t in &table.degree(n).unwrap().tests {
                let in_a = t.0.iter().all(|e| mask[e.idx()]);
                let rot = rotate(t);
                let rot_in_a = rot.0.iter().all(|e| mask[e.idx()]);
                assert_eq!(in_a, rot_in_a);
            }
        }
    }

    #[test]
    fn cyclic_relations_hold_on_corpus() {
        for alg in [EffectAlgebra::l1(), corpus::powerset(3), corpus::firefly()] {
            let violations = verify_cyclic_relations(&alg, 3);
            assert!(violations.is_empty(), "{violations:?}");
        }
    }
}
