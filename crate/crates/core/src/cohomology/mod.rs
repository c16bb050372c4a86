//! Cyclic and Hochschild cochain complexes of an effect algebra, over exact
//! rationals.
//!
//! The Hochschild complex puts one coordinate on every test; the cyclic
//! complex puts one coordinate on every rotation orbit that admits a
//! consistent signed invariant value (an orbit of size d in degree n
//! contributes iff n is even or d is even). Coboundaries are alternating
//! sums over the face maps, with the wrap-around face carrying sign
//! (−1)^(n+1). Cohomology dimensions are exact rank computations.
//!
//! Subalgebras and relative pairs reuse the ambient algebra's test tables:
//! a subalgebra complex keeps the orbits lying inside a subset, a relative
//! complex keeps the orbits that leave it.

pub mod kunneth;
pub mod mv;
pub mod relative;
pub mod spaces;

use crate::algebra::EffectAlgebra;
use crate::linalg::sparse::SparseMat;
use crate::linalg::Matrix;
use crate::rational::{int, Rational};
use crate::testspace::{face, CapExceeded, DegreeTable, TestTable};
use num::traits::Zero;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Theory {
    Cyclic,
    Hochschild,
}

impl Theory {
    pub fn as_str(self) -> &'static str {
        match self {
            Theory::Cyclic => "cyclic",
            Theory::Hochschild => "hochschild",
        }
    }
}

/// Which tests of the ambient algebra a complex is built on.
#[derive(Clone, Copy)]
pub enum Filter<'a> {
    /// All tests of the ambient algebra.
    Full,
    /// Tests lying inside a subalgebra subset: the complex of the subalgebra.
    Subalgebra(&'a [bool]),
    /// Tests leaving the subset: cochains vanishing on subalgebra tests,
    /// i.e. the relative complex of the pair (ambient, subset).
    RelativeTo(&'a [bool]),
}

impl Filter<'_> {
    fn keeps(&self, alg: &EffectAlgebra, dt: &DegreeTable, test_idx: usize) -> bool {
        let _ = alg;
        match self {
            Filter::Full => true,
            Filter::Subalgebra(mask) => {
                dt.tests[test_idx].0.iter().all(|e| mask[e.idx()])
            }
            Filter::RelativeTo(mask) => {
                !dt.tests[test_idx].0.iter().all(|e| mask[e.idx()])
            }
        }
    }
}

/// Generators of one cochain degree: orbits (cyclic) or tests (hochschild).
#[derive(Clone, Debug)]
pub struct Basis {
    pub degree: usize,
    /// Orbit ids or test ids, ascending.
    pub gens: Vec<usize>,
    /// Reverse lookup; `usize::MAX` marks an excluded generator.
    pub col_of: Vec<usize>,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    fn cyclic(alg: &EffectAlgebra, dt: &DegreeTable, filter: &Filter) -> Basis {
        let mut gens = Vec::new();
        let mut col_of = vec![usize::MAX; dt.orbits.len()];
        for (oid, orbit) in dt.orbits.iter().enumerate() {
            if orbit.consistent && filter.keeps(alg, dt, orbit.rep) {
                col_of[oid] = gens.len();
                gens.push(oid);
            }
        }
        Basis { degree: dt.degree, gens, col_of }
    }

    fn hochschild(alg: &EffectAlgebra, dt: &DegreeTable, filter: &Filter) -> Basis {
        let mut gens = Vec::new();
        let mut col_of = vec![usize::MAX; dt.tests.len()];
        for t in 0..dt.tests.len() {
            if filter.keeps(alg, dt, t) {
                col_of[t] = gens.len();
                gens.push(t);
            }
        }
        Basis { degree: dt.degree, gens, col_of }
    }

    /// Basis of one degree under a filter; the degree table must already be
    /// built.
    pub fn at(
        alg: &EffectAlgebra,
        table: &TestTable,
        theory: Theory,
        n: usize,
        filter: &Filter,
    ) -> Basis {
        match theory {
            Theory::Cyclic => Basis::cyclic(alg, table.built(n), filter),
            Theory::Hochschild => Basis::hochschild(alg, table.built(n), filter),
        }
    }
}

/// The coboundary matrices δ⁰ … δ^nmax of one theory under one filter,
/// together with their bases. Rows of δⁿ live in degree n+1, columns in
/// degree n.
pub struct CochainComplex {
    pub theory: Theory,
    pub nmax: usize,
    /// Bases for degrees 0 ..= nmax+1.
    pub bases: Vec<Basis>,
    /// deltas[n]: bases[n] → bases[n+1], for n = 0 ..= nmax.
    pub deltas: Vec<SparseMat>,
}

impl CochainComplex {
    pub fn build(
        alg: &EffectAlgebra,
        table: &mut TestTable,
        theory: Theory,
        nmax: usize,
        filter: Filter,
    ) -> Result<CochainComplex, CapExceeded> {
        table.degree(nmax + 1)?;
        let bases: Vec<Basis> = (0..=nmax + 1)
            .map(|n| match theory {
                Theory::Cyclic => Basis::cyclic(alg, table.built(n), &filter),
                Theory::Hochschild => Basis::hochschild(alg, table.built(n), &filter),
            })
            .collect();
        let deltas = (0..=nmax)
            .map(|n| coboundary(alg, table, theory, &bases[n], &bases[n + 1]))
            .collect();
        Ok(CochainComplex { theory, nmax, bases, deltas })
    }

    /// Cohomology dimensions for degrees 0 ..= nmax.
    pub fn dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.deltas.iter().map(|d| d.rank()).collect();
        (0..=self.nmax)
            .map(|n| {
                let prev = if n == 0 { 0 } else { ranks[n - 1] };
                self.bases[n].dim() - ranks[n] - prev
            })
            .collect()
    }

    /// δ ∘ δ = 0, checked as exact matrices for every consecutive pair.
    pub fn verify_dd_zero(&self) -> bool {
        self.deltas.windows(2).all(|w| w[1].compose_is_zero(&w[0]))
    }
}

/// Assembles δ between two bases. For the cyclic theory a cochain is stored
/// by its values on orbit representatives; the value on λᵐ(rep) in degree n
/// is (−1)^(n·m) times the stored value, and each face contributes its
/// simplicial sign (−1)^k.
fn coboundary(
    alg: &EffectAlgebra,
    table: &TestTable,
    theory: Theory,
    domain: &Basis,
    codomain: &Basis,
) -> SparseMat {
    let n = domain.degree;
    let dom_dt = table.built(n);
    let cod_dt = table.built(n + 1);
    let mut m = SparseMat::new(codomain.dim(), domain.dim());
    for (row, &gen) in codomain.gens.iter().enumerate() {
        let u = match theory {
            Theory::Cyclic => &cod_dt.tests[cod_dt.orbits[gen].rep],
            Theory::Hochschild => &cod_dt.tests[gen],
        };
        for k in 0..=n + 1 {
            let f = face(alg, u, k);
            let fidx = dom_dt.index[&f];
            let face_sign = if k % 2 == 0 { 1i64 } else { -1 };
            match theory {
                Theory::Cyclic => {
                    let (oid, offset) = dom_dt.position[fidx];
                    let col = domain.col_of[oid as usize];
                    if col == usize::MAX {
                        continue;
                    }
                    let rot_sign = if n % 2 == 1 && offset % 2 == 1 { -1i64 } else { 1 };
                    m.add_entry(row, col, int(face_sign * rot_sign));
                }
                Theory::Hochschild => {
                    let col = domain.col_of[fidx];
                    if col == usize::MAX {
                        continue;
                    }
                    m.add_entry(row, col, int(face_sign));
                }
            }
        }
    }
    m
}

/// Cohomology dimensions per degree, with the theory that produced them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyTable {
    pub theory: String,
    pub dims: Vec<usize>,
}

/// Cyclic cohomology dimensions of `alg` for degrees 0 ..= nmax.
pub fn hc_dims(alg: &EffectAlgebra, nmax: usize) -> Result<CohomologyTable, CapExceeded> {
    let mut table = TestTable::new(alg);
    let complex = CochainComplex::build(alg, &mut table, Theory::Cyclic, nmax, Filter::Full)?;
    Ok(CohomologyTable { theory: "cyclic".into(), dims: complex.dims() })
}

/// Hochschild cohomology dimensions of `alg` for degrees 0 ..= nmax.
pub fn hh_dims(alg: &EffectAlgebra, nmax: usize) -> Result<CohomologyTable, CapExceeded> {
    let mut table = TestTable::new(alg);
    let complex = CochainComplex::build(alg, &mut table, Theory::Hochschild, nmax, Filter::Full)?;
    Ok(CohomologyTable { theory: "hochschild".into(), dims: complex.dims() })
}

/// The dense coboundary matrix δⁿ on the full complex of the given theory.
pub fn coboundary_matrix(
    alg: &EffectAlgebra,
    n: usize,
    theory: Theory,
) -> Result<Matrix, CapExceeded> {
    let mut table = TestTable::new(alg);
    table.degree(n + 1)?;
    let filter = Filter::Full;
    let (dom, cod) = match theory {
        Theory::Cyclic => (
            Basis::cyclic(alg, table.built(n), &filter),
            Basis::cyclic(alg, table.built(n + 1), &filter),
        ),
        Theory::Hochschild => (
            Basis::hochschild(alg, table.built(n), &filter),
            Basis::hochschild(alg, table.built(n + 1), &filter),
        ),
    };
    Ok(coboundary(alg, &table, theory, &dom, &cod).to_dense())
}

/// Sensible degree bound when the caller gives none: finite orthoalgebras
/// vanish from their height upward, so height + 2 shows the zero tail.
pub fn default_max_degree(alg: &EffectAlgebra) -> usize {
    if alg.is_orthoalgebra().is_ok() {
        alg.height() + 2
    } else {
        4
    }
}

/// Outcome of a structural check, with human-readable evidence lines
/// (dimension tables, rank triples) for diagnosis.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> CheckReport {
        CheckReport { name: name.into(), passed: true, details: Vec::new() }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }

    pub fn fail(&mut self, line: impl Into<String>) {
        self.passed = false;
        self.details.push(format!("FAIL: {}", line.into()));
    }

    pub fn check(&mut self, ok: bool, line: impl Into<String>) {
        if ok {
            self.note(line);
        } else {
            self.fail(line);
        }
    }
}

/// Evaluates a stored cyclic cochain (coordinates on orbit representatives)
/// on an arbitrary test of the same degree.
pub fn eval_cyclic_cochain(
    dt: &DegreeTable,
    basis: &Basis,
    coords: &[Rational],
    test_idx: usize,
) -> Rational {
    let (oid, offset) = dt.position[test_idx];
    let col = basis.col_of[oid as usize];
    if col == usize::MAX {
        return Rational::zero();
    }
    let v = coords[col].clone();
    if dt.degree % 2 == 1 && offset % 2 == 1 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::EffectAlgebra;
    use crate::corpus;

    fn binom(m: usize, n: usize) -> usize {
        if n > m {
            return 0;
        }
        let mut r = 1usize;
        for i in 0..n {
            r = r * (m - i) / (i + 1);
        }
        r
    }

    #[test]
    fn l1_cyclic_complex_is_one_dimensional_with_alternating_deltas() {
        let l1 = EffectAlgebra::l1();
        let mut table = TestTable::new(&l1);
        let c = CochainComplex::build(&l1, &mut table, Theory::Cyclic, 5, Filter::Full).unwrap();
        for n in 0..=6 {
            assert_eq!(c.bases[n].dim(), 1, "C_λ^{n}(L1) is one-dimensional");
        }
        for n in 0..=5 {
            let rank = c.deltas[n].rank();
            assert_eq!(rank, if n % 2 == 0 { 0 } else { 1 }, "δ^{n} on L1");
        }
        assert!(c.verify_dd_zero());
    }

    #[test]
    fn hc_of_l1_is_ground_field_then_zero() {
        let t = hc_dims(&EffectAlgebra::l1(), 4).unwrap();
        assert_eq!(t.dims, vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn delta0_is_zero_for_every_corpus_algebra() {
        for alg in [EffectAlgebra::l1(), corpus::powerset(3), corpus::firefly(), corpus::bike()] {
            let m = coboundary_matrix(&alg, 0, Theory::Cyclic).unwrap();
            assert!(m.is_zero(), "δ⁰ vanishes on {}", alg.name());
        }
    }

    #[test]
    fn powerset_dims_are_binomials() {
        for m in 1..=4usize {
            let p = corpus::powerset(m as u32);
            let hc = hc_dims(&p, m + 1).unwrap().dims;
            let hh = hh_dims(&p, m + 1).unwrap().dims;
            for n in 0..=m + 1 {
                assert_eq!(hc[n], binom(m - 1, n), "HC^{n}(P{m})");
                assert_eq!(hh[n], binom(m, n), "HH^{n}(P{m})");
            }
        }
    }

    #[test]
    fn firefly_dims() {
        let t = hc_dims(&corpus::firefly(), 4).unwrap();
        assert_eq!(t.dims, vec![1, 3, 2, 0, 0]);
    }

    #[test]
    fn bike_dims() {
        let t = hc_dims(&corpus::bike(), 4).unwrap();
        assert_eq!(t.dims, vec![1, 5, 8, 4, 0]);
        let half = hc_dims(&corpus::bike_half_a(), 4).unwrap();
        assert_eq!(half.dims, vec![1, 4, 5, 2, 0]);
    }

    #[test]
    fn hc0_is_always_one() {
        for alg in [corpus::pentagon(), corpus::bike_half_a(), corpus::powerset(4)] {
            assert_eq!(hc_dims(&alg, 1).unwrap().dims[0], 1);
        }
    }

    #[test]
    fn dd_zero_on_corpus() {
        for alg in [corpus::firefly(), corpus::pentagon(), corpus::powerset(3)] {
            let mut table = TestTable::new(&alg);
            for theory in [Theory::Cyclic, Theory::Hochschild] {
                let c = CochainComplex::build(&alg, &mut table, theory, 3, Filter::Full).unwrap();
                assert!(c.verify_dd_zero(), "{} {:?}", alg.name(), theory);
            }
        }
    }

    #[test]
    fn subalgebra_complex_matches_standalone() {
        // the block of the firefly is isomorphic to P(3); its filtered
        // complex must produce the standalone dimensions
        let ff = corpus::firefly();
        let blocks = ff.blocks().unwrap();
        let mask = ff.subset_mask(&blocks[0]);
        let mut table = TestTable::new(&ff);
        let c =
            CochainComplex::build(&ff, &mut table, Theory::Cyclic, 4, Filter::Subalgebra(&mask))
                .unwrap();
        assert_eq!(c.dims(), hc_dims(&corpus::powerset(3), 4).unwrap().dims);
    }
}
