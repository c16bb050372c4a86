//! Kuenneth-style checks for products: the Hochschild dimension convolution,
//! the explicit chain isomorphism between the Hochschild complex of A and the
//! cyclic complex of A x L1, and the bounded alternating-sum consistency of
//! the cyclic Kuenneth sequence.

use super::relative::CheckError;
use super::{Basis, CheckReport, CochainComplex, Filter, Theory};
use crate::algebra::{EffectAlgebra, ElementId};
use crate::linalg::sparse::SparseMat;
use crate::rational::int;
use crate::testspace::{Test, TestTable};

/// dim HH^n(A x B) = sum over p+q=n of dim HH^p(A) * dim HH^q(B).
pub fn kunneth_hochschild_check(
    a: &EffectAlgebra,
    b: &EffectAlgebra,
    nmax: usize,
) -> Result<CheckReport, CheckError> {
    let mut report =
        CheckReport::new(format!("Hochschild Kuenneth for {} x {}", a.name(), b.name()));
    let p = EffectAlgebra::product(a, b)?;
    let hp = super::hh_dims(&p, nmax)?.dims;
    let ha = super::hh_dims(a, nmax)?.dims;
    let hb = super::hh_dims(b, nmax)?.dims;
    report.note(format!("HH(A) = {:?}", ha));
    report.note(format!("HH(B) = {:?}", hb));
    report.note(format!("HH(AxB) = {:?}", hp));
    for n in 0..=nmax {
        let conv: usize = (0..=n).map(|i| ha[i] * hb[n - i]).sum();
        report.check(hp[n] == conv, format!("degree {n}: {} vs convolution {}", hp[n], conv));
    }
    Ok(report)
}

/// Product element ids of A x L1 as built by [`EffectAlgebra::product`]:
/// the L1 component is the low bit.
fn split_product_entry(e: ElementId) -> (usize, usize) {
    (e.idx() / 2, e.idx() % 2)
}

/// The explicit map from Hochschild cochains on A to invariant cochains on
/// A x L1: on a test whose L1 components carry their single 1 at position i,
/// read the A components rotated to start at i, with sign (-1)^(i*n).
///
/// Returns the matrix on the bases (rows: cyclic basis of A x L1, columns:
/// tests of A).
fn lemma_iso_matrix(
    _a: &EffectAlgebra,
    _prod: &EffectAlgebra,
    a_table: &TestTable,
    prod_table: &TestTable,
    n: usize,
    a_basis: &Basis,
    prod_basis: &Basis,
) -> SparseMat {
    let a_dt = a_table.built(n);
    let prod_dt = prod_table.built(n);
    let mut m = SparseMat::new(prod_basis.dim(), a_basis.dim());
    for (row, &oid) in prod_basis.gens.iter().enumerate() {
        let u = &prod_dt.tests[prod_dt.orbits[oid].rep];
        let parts: Vec<(usize, usize)> = u.0.iter().map(|e| split_product_entry(*e)).collect();
        let i = parts
            .iter()
            .position(|(_, k)| *k == 1)
            .expect("every test on A x L1 has exactly one 1 in the L1 slot");
        let rotated: Vec<ElementId> = (0..=n)
            .map(|j| ElementId(parts[(i + j) % (n + 1)].0 as u32))
            .collect();
        let col = a_basis.col_of[a_dt.index[&Test(rotated)]];
        assert!(col != usize::MAX);
        let sign = if (i * n) % 2 == 0 { 1i64 } else { -1 };
        m.add_entry(row, col, int(sign));
    }
    m
}

fn sparse_equal(x: &SparseMat, y: &SparseMat) -> bool {
    x.rows == y.rows && x.cols == y.cols && x.data == y.data
}

/// Checks dim HH^n(A) = dim HC^n(A x L1) and verifies that the explicit
/// signed map is a chain isomorphism: bijective in every degree and
/// commuting with the coboundaries.
pub fn hh_eq_hc_product_l1_check(
    a: &EffectAlgebra,
    nmax: usize,
) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(format!("HH({0}) vs HC({0} x L1)", a.name()));
    let l1 = EffectAlgebra::l1();
    let prod = EffectAlgebra::product(a, &l1)?;

    let hh = super::hh_dims(a, nmax)?.dims;
    let hc = super::hc_dims(&prod, nmax)?.dims;
    report.note(format!("HH(A) = {:?}", hh));
    report.note(format!("HC(AxL1) = {:?}", hc));
    report.check(hh == hc, "dimension tables agree".to_string());

    let mut a_table = TestTable::new(a);
    let mut prod_table = TestTable::new(&prod);
    let hh_complex =
        CochainComplex::build(a, &mut a_table, Theory::Hochschild, nmax, Filter::Full)?;
    let hc_complex =
        CochainComplex::build(&prod, &mut prod_table, Theory::Cyclic, nmax, Filter::Full)?;

    // all rotation orbits on A x L1 are free of order n+1: the L1 slot of a
    // test has exactly one 1 and it moves around the full cycle
    for n in 0..=nmax + 1 {
        let dt = prod_table.built(n);
        report.check(
            dt.orbits.iter().all(|o| o.size == n + 1 && o.consistent),
            format!("degree {n}: all orbits on A x L1 are free"),
        );
    }

    let f: Vec<SparseMat> = (0..=nmax + 1)
        .map(|n| {
            lemma_iso_matrix(
                a,
                &prod,
                &a_table,
                &prod_table,
                n,
                &hh_complex.bases[n],
                &hc_complex.bases[n],
            )
        })
        .collect();
    for n in 0..=nmax + 1 {
        let square = f[n].rows == f[n].cols;
        let bijective = square && f[n].rank() == f[n].rows;
        report.check(bijective, format!("degree {n}: map is bijective ({} x {})", f[n].rows, f[n].cols));
    }
    for n in 0..=nmax {
        let lhs = hc_complex.deltas[n].matmul(&f[n]);
        let rhs = f[n + 1].matmul(&hh_complex.deltas[n]);
        report.check(sparse_equal(&lhs, &rhs), format!("degree {n}: square commutes"));
    }
    Ok(report)
}

/// Bounded-exactness dimension accounting for the cyclic Kuenneth sequence:
/// the alternating sum of dimensions along
/// ... -> HC^{n-1}(AxB) -> (+)_{p+q=n-2} HC^p(A) (x) HC^q(B)
///     -> (+)_{p+q=n}   HC^p(A) (x) HC^q(B) -> HC^n(AxB) -> ...
/// vanishes when every term is eventually zero inside the window. The
/// connecting morphisms themselves are not constructed.
pub fn kunneth_cyclic_consistency(
    a: &EffectAlgebra,
    b: &EffectAlgebra,
    nmax: usize,
) -> Result<CheckReport, CheckError> {
    let mut report =
        CheckReport::new(format!("cyclic Kuenneth consistency for {} x {}", a.name(), b.name()));
    if a.is_orthoalgebra().is_err() || b.is_orthoalgebra().is_err() {
        report.note("skipped: factors are not orthoalgebras, boundedness not guaranteed");
        return Ok(report);
    }
    let (ha, hb) = (a.height(), b.height());
    if nmax < ha + hb {
        report.note(format!(
            "skipped: window {nmax} below combined height {} so the tail is not visibly zero",
            ha + hb
        ));
        return Ok(report);
    }
    let p = EffectAlgebra::product(a, b)?;
    let hca = super::hc_dims(a, nmax)?.dims;
    let hcb = super::hc_dims(b, nmax)?.dims;
    let hcp = super::hc_dims(&p, nmax)?.dims;
    report.note(format!("HC(A) = {:?}", hca));
    report.note(format!("HC(B) = {:?}", hcb));
    report.note(format!("HC(AxB) = {:?}", hcp));
    let y = |k: isize| -> i64 {
        if k < 0 {
            return 0;
        }
        let k = k as usize;
        (0..=k.min(nmax))
            .map(|i| if k - i <= nmax { (hca[i] * hcb[k - i]) as i64 } else { 0 })
            .sum()
    };
    let x = |k: isize| -> i64 {
        if k < 0 || k as usize > nmax {
            0
        } else {
            hcp[k as usize] as i64
        }
    };
    // terms in sequence order, three per segment
    let mut sum = 0i64;
    let mut sign = 1i64;
    for n in 0..=(nmax as isize) + 2 {
        for term in [y(n - 2), y(n), x(n)] {
            sum += sign * term;
            sign = -sign;
        }
    }
    report.check(sum == 0, format!("alternating dimension sum = {sum}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn hochschild_kunneth_l1_l1() {
        let l1 = EffectAlgebra::l1();
        let report = kunneth_hochschild_check(&l1, &l1, 3).unwrap();
        assert!(report.passed, "{:#?}", report.details);
        // HH(P2) = [1,2,1,0]
        let p2 = corpus::powerset(2);
        assert_eq!(super::super::hh_dims(&p2, 3).unwrap().dims, vec![1, 2, 1, 0]);
    }

    #[test]
    fn hochschild_kunneth_p2_p1() {
        let report =
            kunneth_hochschild_check(&corpus::powerset(2), &corpus::powerset(1), 4).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn hochschild_kunneth_firefly_l1() {
        let report =
            kunneth_hochschild_check(&corpus::firefly(), &EffectAlgebra::l1(), 4).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn lemma_iso_l1() {
        let report = hh_eq_hc_product_l1_check(&EffectAlgebra::l1(), 3).unwrap();
        assert!(report.passed, "{:#?}", report.details);
        // HH(L1) = HC(P2) = [1,1,0,...]
        assert_eq!(super::super::hh_dims(&EffectAlgebra::l1(), 2).unwrap().dims, vec![1, 1, 0]);
    }

    #[test]
    fn lemma_iso_p2() {
        let report = hh_eq_hc_product_l1_check(&corpus::powerset(2), 3).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn lemma_iso_firefly() {
        let report = hh_eq_hc_product_l1_check(&corpus::firefly(), 3).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn cyclic_kunneth_l1_l1() {
        let l1 = EffectAlgebra::l1();
        let report = kunneth_cyclic_consistency(&l1, &l1, 3).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn cyclic_kunneth_p2_p2() {
        let p2 = corpus::powerset(2);
        let report = kunneth_cyclic_consistency(&p2, &p2, 5).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn cyclic_kunneth_firefly_l1() {
        let report =
            kunneth_cyclic_consistency(&corpus::firefly(), &EffectAlgebra::l1(), 4).unwrap();
        assert!(report.passed, "{:#?}", report.details);
    }

    #[test]
    fn cyclic_kunneth_window_too_small_is_skipped() {
        let report =
            kunneth_cyclic_consistency(&corpus::firefly(), &corpus::firefly(), 3).unwrap();
        assert!(report.passed);
        assert!(report.details.iter().any(|d| d.contains("skipped")));
    }
}
