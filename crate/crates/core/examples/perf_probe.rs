// scratch: probe sparse rank performance on the largest acceptance-suite matrices
use effalg::algebra::EffectAlgebra;
use effalg::linalg::sparse::SparseMat;
use effalg::testspace::{face, TestTable};
use effalg::rational::int;
use std::time::Instant;

fn main() {
    let p5 = EffectAlgebra::powerset(5).unwrap();
    let mut table = TestTable::new(&p5);
    let t0 = Instant::now();
    for n in 0..=7 {
        table.degree(n).unwrap();
        println!("T_{}(P5): {} tests ({:?})", n, table.built(n).len(), t0.elapsed());
    }
    // Hochschild coboundary at degree n: rows = T_{n+1}, cols = T_n
    for n in [5usize, 6] {
        let t1 = Instant::now();
        let dom = table.built(n);
        let cod = table.built(n + 1);
        let mut m = SparseMat::new(cod.len(), dom.len());
        for (r, u) in cod.tests.iter().enumerate() {
            for k in 0..=(n + 1) {
                let f = face(&p5, u, k);
                let c = dom.index[&f];
                let sign = if k % 2 == 0 { 1 } else { -1 };
                m.add_entry(r, c, int(sign));
            }
        }
        println!("assembled {}x{} nnz={} in {:?}", m.rows, m.cols, m.nnz(), t1.elapsed());
        let t2 = Instant::now();
        let rank = m.rank();
        println!("rank delta^{} = {} in {:?}", n, rank, t2.elapsed());
    }
}
