//! Relative cyclic cohomology of a subalgebra pair, the connecting
//! homomorphism, and the long exact sequence, plus the structural checks
//! that ride on them: trivial tests can be ignored, coproducts split, and
//! cohomology of a finite orthoalgebra vanishes from its height upward.

use super::spaces::{
    embed_coords, exact_at, induced_matrix, restrict_coords, restriction_matrix, CohomologySpace,
};
use super::{CheckReport, CochainComplex, CohomologyTable, Filter, Theory};
use crate::algebra::{AlgebraError, EffectAlgebra, ElementId, Morphism};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::testspace::{CapExceeded, TestTable};
use num::traits::{One, Zero};
use std::fmt;

#[derive(Debug)]
pub enum CheckError {
    Cap(CapExceeded),
    Algebra(AlgebraError),
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::Cap(e) => write!(f, "{e}"),
            CheckError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CheckError {}

impl From<CapExceeded> for CheckError {
    fn from(e: CapExceeded) -> Self {
        CheckError::Cap(e)
    }
}

impl From<AlgebraError> for CheckError {
    fn from(e: AlgebraError) -> Self {
        CheckError::Algebra(e)
    }
}

/// A verified subalgebra inclusion A into B. Tests of A are read off inside
/// B's test tables through the subset mask, so no index transport is needed.
pub struct RelativePair<'a> {
    pub ambient: &'a EffectAlgebra,
    pub mask: Vec<bool>,
    pub sub: EffectAlgebra,
    pub inclusion: Morphism,
}

impl<'a> RelativePair<'a> {
    pub fn new(ambient: &'a EffectAlgebra, mask: Vec<bool>) -> Result<Self, AlgebraError> {
        ambient.check_subalgebra(&mask)?;
        let subset: Vec<ElementId> = ambient.elements().filter(|e| mask[e.idx()]).collect();
        let (sub, inclusion) = ambient.restrict_to(&subset);
        debug_assert!(inclusion.is_injective());
        debug_assert!(inclusion.is_strong(&sub, ambient));
        Ok(RelativePair { ambient, mask, sub, inclusion })
    }

    /// Pair (A, L1) along the unique embedding of {0, 1}.
    pub fn with_l1(ambient: &'a EffectAlgebra) -> Result<Self, AlgebraError> {
        let mask = ambient.subset_mask(&[ambient.zero(), ambient.one()]);
        RelativePair::new(ambient, mask)
    }
}

/// Dimensions of the relative cyclic cohomology HC^n(B, A): the cohomology of
/// invariant cochains on B-tests vanishing on A-tests.
pub fn relative_dims(pair: &RelativePair, nmax: usize) -> Result<CohomologyTable, CapExceeded> {
    let mut table = TestTable::new(pair.ambient);
    let complex = CochainComplex::build(
        pair.ambient,
        &mut table,
        Theory::Cyclic,
        nmax,
        Filter::RelativeTo(&pair.mask),
    )?;
    Ok(CohomologyTable { theory: "relative-cyclic".into(), dims: complex.dims() })
}

pub(crate) struct PairComplexes {
    pub full: CochainComplex,
    pub sub: CochainComplex,
    pub rel: CochainComplex,
}

pub(crate) fn build_pair_complexes(
    pair: &RelativePair,
    nmax: usize,
) -> Result<PairComplexes, CapExceeded> {
    let mut table = TestTable::new(pair.ambient);
    let full =
        CochainComplex::build(pair.ambient, &mut table, Theory::Cyclic, nmax, Filter::Full)?;
    let sub = CochainComplex::build(
        pair.ambient,
        &mut table,
        Theory::Cyclic,
        nmax,
        Filter::Subalgebra(&pair.mask),
    )?;
    let rel = CochainComplex::build(
        pair.ambient,
        &mut table,
        Theory::Cyclic,
        nmax,
        Filter::RelativeTo(&pair.mask),
    )?;
    Ok(PairComplexes { full, sub, rel })
}

/// Zig-zag construction of the connecting map HC^n(A) -> HC^{n+1}(B, A) on
/// quotient bases: extend a representative by zero to B-tests (invariance is
/// preserved since rotation keeps A-tests in A), apply the coboundary, and
/// read the result in the relative basis.
fn connecting_columns(
    cx: &PairComplexes,
    n: usize,
    h_sub_n: &CohomologySpace,
    h_rel_next: &CohomologySpace,
) -> Matrix {
    let mut out = Matrix::zeros(h_rel_next.dim(), h_sub_n.dim());
    for (j, rep) in h_sub_n.reps.iter().enumerate() {
        let extended = embed_coords(&cx.sub.bases[n], &cx.full.bases[n], rep);
        let image = cx.full.deltas[n].mul_vec(&extended);
        // the image vanishes on A-tests because the representative is a
        // cocycle of A's complex
        for (i, &gen) in cx.full.bases[n + 1].gens.iter().enumerate() {
            if cx.rel.bases[n + 1].col_of[gen] == usize::MAX {
                assert!(image[i].is_zero(), "connecting image must vanish on subalgebra tests");
            }
        }
        let rel_coords = restrict_coords(&cx.full.bases[n + 1], &cx.rel.bases[n + 1], &image);
        let coords =
            h_rel_next.express(&rel_coords).expect("connecting image is a relative cocycle");
        for (i, v) in coords.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// The connecting homomorphism HC^n(A) -> HC^{n+1}(B, A). Independence of the
/// representative is verified by pushing every coboundary of A through the
/// same zig-zag and checking it lands on zero.
pub fn connecting_hom(pair: &RelativePair, n: usize) -> Result<Matrix, CapExceeded> {
    let cx = build_pair_complexes(pair, n + 1)?;
    let h_sub = CohomologySpace::from_complex(&cx.sub, n);
    let h_rel = CohomologySpace::from_complex(&cx.rel, n + 1);
    let m = connecting_columns(&cx, n, &h_sub, &h_rel);
    if n >= 1 {
        let dim_prev = cx.sub.bases[n - 1].dim();
        for g in 0..dim_prev {
            let mut unit = vec![Rational::zero(); dim_prev];
            unit[g] = Rational::one();
            let cob = cx.sub.deltas[n - 1].mul_vec(&unit);
            let extended = embed_coords(&cx.sub.bases[n], &cx.full.bases[n], &cob);
            let image = cx.full.deltas[n].mul_vec(&extended);
            let rel_coords =
                restrict_coords(&cx.full.bases[n + 1], &cx.rel.bases[n + 1], &image);
            let coords = h_rel.express(&rel_coords).expect("coboundary image expressible");
            assert!(coords.iter().all(|v| v.is_zero()), "connecting map must kill coboundaries");
        }
    }
    Ok(m)
}

/// Builds every map of the sequence
/// ... -> HC^n(B,A) -> HC^n(B) -> HC^n(A) -> HC^{n+1}(B,A) -> ... as a
/// matrix on cohomology bases and asserts im = ker at every node for degrees
/// 0 ..= nmax, reporting (dim, rank in, rank out) triples.
pub fn les_exactness_check(pair: &RelativePair, nmax: usize) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(format!(
        "long exact sequence of ({}, {})",
        pair.ambient.name(),
        pair.sub.name()
    ));
    let cx = build_pair_complexes(pair, nmax + 1)?;
    let h_full: Vec<CohomologySpace> =
        (0..=nmax + 1).map(|n| CohomologySpace::from_complex(&cx.full, n)).collect();
    let h_sub: Vec<CohomologySpace> =
        (0..=nmax + 1).map(|n| CohomologySpace::from_complex(&cx.sub, n)).collect();
    let h_rel: Vec<CohomologySpace> =
        (0..=nmax + 1).map(|n| CohomologySpace::from_complex(&cx.rel, n)).collect();

    let jmat: Vec<Matrix> = (0..=nmax + 1)
        .map(|n| {
            let j = restriction_matrix(&cx.rel.bases[n], &cx.full.bases[n]);
            induced_matrix(&h_rel[n], &h_full[n], &j)
        })
        .collect();
    let pmat: Vec<Matrix> = (0..=nmax + 1)
        .map(|n| {
            let p = restriction_matrix(&cx.full.bases[n], &cx.sub.bases[n]);
            induced_matrix(&h_full[n], &h_sub[n], &p)
        })
        .collect();
    let dmat: Vec<Matrix> =
        (0..=nmax).map(|n| connecting_columns(&cx, n, &h_sub[n], &h_rel[n + 1])).collect();

    for n in 0..=nmax {
        let incoming =
            if n == 0 { Matrix::zeros(h_rel[0].dim(), 0) } else { dmat[n - 1].clone() };
        let (ok, t) = exact_at(&incoming, &jmat[n], h_rel[n].dim());
        report.check(ok, format!("exact at HC^{n}(B,A): dim {} in {} out {}", t.0, t.1, t.2));
        let (ok, t) = exact_at(&jmat[n], &pmat[n], h_full[n].dim());
        report.check(ok, format!("exact at HC^{n}(B): dim {} in {} out {}", t.0, t.1, t.2));
        let (ok, t) = exact_at(&pmat[n], &dmat[n], h_sub[n].dim());
        report.check(ok, format!("exact at HC^{n}(A): dim {} in {} out {}", t.0, t.1, t.2));
    }
    Ok(report)
}

/// HC^n(A, L1) = HC^n(A) for n >= 1: relative cohomology along the trivial
/// tests agrees with absolute cohomology.
pub fn trivial_tests_check(alg: &EffectAlgebra, nmax: usize) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(format!("trivial tests of {}", alg.name()));
    let pair = RelativePair::with_l1(alg)?;
    let rel = relative_dims(&pair, nmax)?;
    let abs = super::hc_dims(alg, nmax)?;
    report.note(format!("relative dims {:?}", rel.dims));
    report.note(format!("absolute dims {:?}", abs.dims));
    for n in 1..=nmax {
        report.check(
            rel.dims[n] == abs.dims[n],
            format!("HC^{n}(A, L1) = {} vs HC^{n}(A) = {}", rel.dims[n], abs.dims[n]),
        );
    }
    Ok(report)
}

/// HC^n(A+B) = HC^n(A) + HC^n(B) dimensionwise for n >= 1.
pub fn coproduct_check(
    a: &EffectAlgebra,
    b: &EffectAlgebra,
    nmax: usize,
) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(format!("coproduct of {} and {}", a.name(), b.name()));
    let c = EffectAlgebra::coproduct(a, b)?;
    let dims_c = super::hc_dims(&c, nmax)?.dims;
    let dims_a = super::hc_dims(a, nmax)?.dims;
    let dims_b = super::hc_dims(b, nmax)?.dims;
    report.note(format!("HC(A+B) = {:?}", dims_c));
    for n in 1..=nmax {
        report.check(
            dims_c[n] == dims_a[n] + dims_b[n],
            format!("degree {n}: {} vs {} + {}", dims_c[n], dims_a[n], dims_b[n]),
        );
    }
    report.check(dims_c[0] == 1, "degree 0 stays one-dimensional".to_string());
    Ok(report)
}

/// HC^n(E) = 0 for h(E) <= n <= h(E)+2 on a finite orthoalgebra.
pub fn height_vanishing_check(alg: &EffectAlgebra) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(format!("height vanishing of {}", alg.name()));
    alg.is_orthoalgebra()?;
    let h = alg.height();
    let dims = super::hc_dims(alg, h + 2)?.dims;
    report.note(format!("height {h}, dims {:?}", dims));
    for n in h..=h + 2 {
        report.check(dims[n] == 0, format!("HC^{n} = {}", dims[n]));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn firefly_block_pair(ff: &EffectAlgebra) -> RelativePair<'_> {
        let blocks = ff.blocks().unwrap();
        RelativePair::new(ff, ff.subset_mask(&blocks[0])).unwrap()
    }

    #[test]
    fn relative_to_l1_matches_absolute() {
        for alg in [corpus::firefly(), corpus::powerset(3)] {
            let pair = RelativePair::with_l1(&alg).unwrap();
            let rel = relative_dims(&pair, 3).unwrap().dims;
            let abs = super::super::hc_dims(&alg, 3).unwrap().dims;
            assert_eq!(&rel[1..], &abs[1..], "{}", alg.name());
        }
    }

    #[test]
    fn relative_to_self_vanishes() {
        let ff = corpus::firefly();
        let mask = vec![true; ff.element_count()];
        let pair = RelativePair::new(&ff, mask).unwrap();
        let rel = relative_dims(&pair, 3).unwrap().dims;
        assert_eq!(rel, vec![0, 0, 0, 0]);
    }

    #[test]
    fn connecting_map_for_l1_pair_is_zero_in_degree_zero() {
        let ff = corpus::firefly();
        let pair = RelativePair::with_l1(&ff).unwrap();
        let d0 = connecting_hom(&pair, 0).unwrap();
        assert!(d0.is_zero());
    }

    #[test]
    fn connecting_composite_vanishes_on_firefly_pair() {
        // HC^n(B) -> HC^n(A) -> HC^{n+1}(B,A) composes to zero
        let ff = corpus::firefly();
        let pair = firefly_block_pair(&ff);
        let cx = build_pair_complexes(&pair, 3).unwrap();
        for n in 0..=2 {
            let hb = CohomologySpace::from_complex(&cx.full, n);
            let ha = CohomologySpace::from_complex(&cx.sub, n);
            let hr = CohomologySpace::from_complex(&cx.rel, n + 1);
            let p = restriction_matrix(&cx.full.bases[n], &cx.sub.bases[n]);
            let pm = induced_matrix(&hb, &ha, &p);
            let dm = connecting_columns(&cx, n, &ha, &hr);
            assert!(dm.mul(&pm).is_zero(), "degree {n}");
        }
    }

    #[test]
    fn les_exact_for_firefly_block() {
        let ff = corpus::firefly();
        let pair = firefly_block_pair(&ff);
        let report = les_exactness_check(&pair, 4).unwrap();
        assert!(report.passed, "{:?}", report.details);
    }

    #[test]
    fn les_exact_for_l1_pair() {
        let ff = corpus::firefly();
        let pair = RelativePair::with_l1(&ff).unwrap();
        let report = les_exactness_check(&pair, 3).unwrap();
        assert!(report.passed, "{:?}", report.details);
    }

    #[test]
    fn les_exact_for_p3_p2_pair() {
        let p3 = corpus::powerset(3);
        let e0 = p3.element_by_label("e0").unwrap();
        let (sub, incl) = p3.subalgebra_generated(&[e0]);
        assert_eq!(sub.element_count(), 4);
        let mask = p3.subset_mask(&incl.map);
        let pair = RelativePair::new(&p3, mask).unwrap();
        let report = les_exactness_check(&pair, 3).unwrap();
        assert!(report.passed, "{:?}", report.details);
    }

    #[test]
    fn trivial_tests_check_passes_on_firefly() {
        let report = trivial_tests_check(&corpus::firefly(), 3).unwrap();
        assert!(report.passed, "{:?}", report.details);
    }

    #[test]
    fn coproduct_check_p2_p2() {
        let p2 = corpus::powerset(2);
        let report = coproduct_check(&p2, &p2, 3).unwrap();
        assert!(report.passed, "{:?}", report.details);
        let c = EffectAlgebra::coproduct(&p2, &p2).unwrap();
        assert_eq!(super::super::hc_dims(&c, 2).unwrap().dims, vec![1, 2, 0]);
    }

    #[test]
    fn height_vanishing_on_firefly() {
        let report = height_vanishing_check(&corpus::firefly()).unwrap();
        assert!(report.passed, "{:?}", report.details);
    }
}
