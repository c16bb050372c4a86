//! Cohomology groups as explicit quotient spaces.
//!
//! A degree of a cochain complex gives the quotient ker δⁿ / im δⁿ⁻¹. This
//! module picks cocycle representatives for a quotient basis and can express
//! any cocycle in those coordinates, which is what turns chain maps and
//! zig-zag constructions into honest matrices on cohomology.

use super::{Basis, CochainComplex};
use crate::linalg::sparse::{Factor, SparseMat};
use crate::linalg::Matrix;
use crate::rational::Rational;
use num::traits::Zero;

pub struct CohomologySpace {
    pub chain_dim: usize,
    /// Quotient basis representatives, as cocycle coordinate vectors.
    pub reps: Vec<Vec<Rational>>,
    /// Ordered factorization of [im δ_in | kernel basis of δ_out].
    factor: Factor,
    /// Columns of the factored matrix holding the chosen representatives.
    rep_cols: Vec<usize>,
    total_cols: usize,
}

impl CohomologySpace {
    /// Builds H at the degree with outgoing differential `delta_out` and
    /// incoming differential `delta_in` (`None` in degree 0).
    pub fn new(delta_out: &SparseMat, delta_in: Option<&SparseMat>) -> CohomologySpace {
        let chain_dim = delta_out.cols;
        if let Some(din) = delta_in {
            assert_eq!(din.rows, chain_dim, "complex degrees must line up");
        }
        let kernel = delta_out.factor().kernel_basis();
        // image generators first, then kernel vectors: the ordered factor's
        // pivot columns among the kernel block are exactly a basis of the
        // quotient
        let im_cols: Vec<Vec<Rational>> = match delta_in {
            Some(din) => {
                let t = din.transpose();
                (0..t.rows)
                    .map(|r| {
                        let mut col = vec![Rational::zero(); chain_dim];
                        for (c, v) in &t.data[r] {
                            col[*c as usize] = v.clone();
                        }
                        col
                    })
                    .collect()
            }
            None => Vec::new(),
        };
        let n_im = im_cols.len();
        let mut all_cols = im_cols;
        all_cols.extend(kernel.iter().cloned());
        let stacked = SparseMat::from_columns(chain_dim, &all_cols);
        let factor = stacked.factor_ordered();
        let mut rep_cols = Vec::new();
        let mut reps = Vec::new();
        for c in factor.pivot_cols() {
            if c >= n_im {
                rep_cols.push(c);
                reps.push(all_cols[c].clone());
            }
        }
        CohomologySpace { chain_dim, reps, factor, rep_cols, total_cols: all_cols.len() }
    }

    pub fn from_complex(complex: &CochainComplex, n: usize) -> CohomologySpace {
        let din = if n == 0 { None } else { Some(&complex.deltas[n - 1]) };
        CohomologySpace::new(&complex.deltas[n], din)
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of a cocycle's class in the quotient basis. Returns None
    /// if the vector is not a cocycle-modulo-image of this degree.
    pub fn express(&self, cocycle: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(cocycle.len(), self.chain_dim);
        let sol = self.factor.solve(cocycle)?;
        let _ = self.total_cols;
        Some(self.rep_cols.iter().map(|&c| sol[c].clone()).collect())
    }
}

/// Coordinate transport between bases over the same degree table: embeds a
/// smaller basis into a bigger one generator-by-generator (zero elsewhere).
pub fn embed_coords(from: &Basis, to: &Basis, v: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); to.gens.len()];
    for (i, &gen) in from.gens.iter().enumerate() {
        let col = to.col_of[gen];
        assert!(col != usize::MAX, "generator not present in target basis");
        out[col] = v[i].clone();
    }
    out
}

/// Restriction along shared generators: generators of `from` missing in `to`
/// are dropped.
pub fn restrict_coords(from: &Basis, to: &Basis, v: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); to.gens.len()];
    for (i, &gen) in from.gens.iter().enumerate() {
        let col = to.col_of[gen];
        if col != usize::MAX {
            out[col] = v[i].clone();
        }
    }
    out
}

/// The matrix (rows = `to` basis, cols = `from` basis) of the coordinate
/// restriction map; also serves as the inclusion when `from` ⊆ `to`.
pub fn restriction_matrix(from: &Basis, to: &Basis) -> SparseMat {
    let mut m = SparseMat::new(to.gens.len(), from.gens.len());
    for (i, &gen) in from.gens.iter().enumerate() {
        let col = to.col_of[gen];
        if col != usize::MAX {
            m.add_entry(col, i, num::traits::One::one());
        }
    }
    m
}

/// Matrix of the map induced on cohomology by a chain map.
pub fn induced_matrix(
    src: &CohomologySpace,
    dst: &CohomologySpace,
    chain_map: &SparseMat,
) -> Matrix {
    let mut out = Matrix::zeros(dst.dim(), src.dim());
    for (j, rep) in src.reps.iter().enumerate() {
        let image = chain_map.mul_vec(rep);
        let coords = dst
            .express(&image)
            .expect("chain maps send cocycles to cocycles");
        for (i, v) in coords.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}

/// im(in) = ker(out) at a node of a sequence, checked by the exact rank
/// identity together with vanishing of the composite. Returns the triple
/// (dim, rank in, rank out) for the report.
pub fn exact_at(
    in_map: &Matrix,
    out_map: &Matrix,
    dim: usize,
) -> (bool, (usize, usize, usize)) {
    assert_eq!(in_map.rows(), dim);
    assert_eq!(out_map.cols(), dim);
    let rank_in = in_map.rank();
    let rank_out = out_map.rank();
    let composite_zero = out_map.mul(in_map).is_zero();
    (composite_zero && rank_in + rank_out == dim, (dim, rank_in, rank_out))
}

/// Block-diagonal direct sum of cohomology maps, for sequences with ⊕ terms.
pub fn direct_sum(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            out.set(r, c, a.get(r, c).clone());
        }
    }
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            out.set(a.rows() + r, a.cols() + c, b.get(r, c).clone());
        }
    }
    out
}

/// Vertical stack: [a; b].
pub fn vstack(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols(), b.cols());
    let mut out = Matrix::zeros(a.rows() + b.rows(), a.cols());
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            out.set(r, c, a.get(r, c).clone());
        }
    }
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            out.set(a.rows() + r, c, b.get(r, c).clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{CochainComplex, Filter, Theory};
    use crate::corpus;
    use crate::testspace::TestTable;

    #[test]
    fn space_dims_match_rank_computation() {
        let ff = corpus::firefly();
        let mut table = TestTable::new(&ff);
        let c = CochainComplex::build(&ff, &mut table, Theory::Cyclic, 3, Filter::Full).unwrap();
        let dims = c.dims();
        for n in 0..=3 {
            let h = CohomologySpace::from_complex(&c, n);
            assert_eq!(h.dim(), dims[n], "H^{n}(firefly)");
            // representatives really are cocycles and expressible as themselves
            for (i, rep) in h.reps.iter().enumerate() {
                assert!(c.deltas[n].mul_vec(rep).iter().all(|x| x.is_zero()));
                let coords = h.express(rep).unwrap();
                for (j, v) in coords.iter().enumerate() {
                    assert_eq!(*v == num::traits::One::one(), i == j);
                    assert!(*v == num::traits::One::one() || v.is_zero());
                }
            }
        }
    }

    #[test]
    fn express_kills_coboundaries() {
        let ff = corpus::firefly();
        let mut table = TestTable::new(&ff);
        let c = CochainComplex::build(&ff, &mut table, Theory::Cyclic, 2, Filter::Full).unwrap();
        let h1 = CohomologySpace::from_complex(&c, 1);
        // δ of anything in degree 0 must express to zero in H^1
        let dim0 = c.bases[0].dim();
        for j in 0..dim0 {
            let mut unit = vec![Rational::zero(); dim0];
            unit[j] = num::traits::One::one();
            let img = c.deltas[0].mul_vec(&unit);
            let coords = h1.express(&img).unwrap();
            assert!(coords.iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn identity_chain_map_induces_identity() {
        let ff = corpus::firefly();
        let mut table = TestTable::new(&ff);
        let c = CochainComplex::build(&ff, &mut table, Theory::Cyclic, 2, Filter::Full).unwrap();
        let h1 = CohomologySpace::from_complex(&c, 1);
        let id = restriction_matrix(&c.bases[1], &c.bases[1]);
        let m = induced_matrix(&h1, &h1, &id);
        assert_eq!(m, Matrix::identity(h1.dim()));
    }
}
