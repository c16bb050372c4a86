//! Finite effect algebras and orthoalgebras.
//!
//! An effect algebra is a set with a partial commutative associative sum, a
//! zero and a one, unique orthocomplements, and the zero-one law. Everything
//! here is table-driven: elements are dense indices, the partial sum is an
//! N×N table of optional indices, and every axiom is checked by exhaustive
//! loops, so a constructed algebra is exactly what its tables say it is.
//!
//! Besides explicit tables, algebras arise from power sets, products,
//! coproducts, and from pasting the blocks described by a Greechie diagram
//! (a hypergraph of atoms and maximal tests).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub const DEFAULT_ELEMENT_CAP: usize = 4096;

/// Index of an element in the owning algebra's tables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct EffectAlgebra {
    name: String,
    labels: Vec<String>,
    zero: ElementId,
    one: ElementId,
    /// Row-major N×N partial sum table.
    sum: Vec<Option<ElementId>>,
    complement: Vec<ElementId>,
    /// `partners[a]` lists all `b` (ascending) with `a ⊞ b` defined.
    partners: Vec<Vec<ElementId>>,
    /// Row-major N×N order table: `leq[a*N+b]` iff ∃c. a ⊞ c = b.
    leq: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    TableShape { detail: String },
    Commutativity { a: ElementId, b: ElementId },
    Associativity { a: ElementId, b: ElementId, c: ElementId },
    ZeroLaw { a: ElementId },
    ComplementSum { a: ElementId },
    ComplementUnique { a: ElementId, first: ElementId, second: ElementId },
    ZeroOneLaw { a: ElementId },
    OrderAntisymmetry { a: ElementId, b: ElementId },
}

/// Outcome of an axiom check; violations are data, not errors.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, alg: &EffectAlgebra) -> Vec<String> {
        let l = |e: &ElementId| alg.label(*e).to_string();
        self.violations
            .iter()
            .map(|v| match v {
                AxiomViolation::TableShape { detail } => format!("table shape: {detail}"),
                AxiomViolation::Commutativity { a, b } => {
                    format!("commutativity fails at ({}, {})", l(a), l(b))
                }
                AxiomViolation::Associativity { a, b, c } => {
                    format!("associativity fails at ({}, {}, {})", l(a), l(b), l(c))
                }
                AxiomViolation::ZeroLaw { a } => format!("zero law fails at {}", l(a)),
                AxiomViolation::ComplementSum { a } => {
                    format!("a ⊞ a⊥ = 1 fails at {}", l(a))
                }
                AxiomViolation::ComplementUnique { a, first, second } => format!(
                    "complement of {} is not unique: {} and {}",
                    l(a),
                    l(first),
                    l(second)
                ),
                AxiomViolation::ZeroOneLaw { a } => {
                    format!("zero-one law fails: {} ⊞ 1 is defined", l(a))
                }
                AxiomViolation::OrderAntisymmetry { a, b } => {
                    format!("order not antisymmetric at ({}, {})", l(a), l(b))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    SizeCapExceeded { requested: usize, cap: usize },
    InvalidTable(String),
    /// Greechie pasting produced an axiom violation or an ambiguous sum.
    InadmissibleDiagram(String),
    NotAnOrthoalgebra { witness: String },
    NotASubalgebra { detail: String },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::SizeCapExceeded { requested, cap } => {
                write!(f, "element count {requested} exceeds the cap {cap}")
            }
            AlgebraError::InvalidTable(d) => write!(f, "invalid table: {d}"),
            AlgebraError::InadmissibleDiagram(d) => write!(f, "inadmissible diagram: {d}"),
            AlgebraError::NotAnOrthoalgebra { witness } => {
                write!(f, "not an orthoalgebra: {witness}")
            }
            AlgebraError::NotASubalgebra { detail } => write!(f, "not a subalgebra: {detail}"),
        }
    }
}

impl std::error::Error for AlgebraError {}

impl EffectAlgebra {
    /// Wraps raw tables. The tables are taken at face value; run
    /// [`EffectAlgebra::verify_axioms`] to check them.
    pub fn from_tables(
        name: impl Into<String>,
        labels: Vec<String>,
        zero: ElementId,
        one: ElementId,
        sums: &[(ElementId, ElementId, ElementId)],
        complement: Vec<ElementId>,
    ) -> Result<EffectAlgebra, AlgebraError> {
        let n = labels.len();
        if n == 0 {
            return Err(AlgebraError::InvalidTable("no elements".into()));
        }
        if n > DEFAULT_ELEMENT_CAP {
            return Err(AlgebraError::SizeCapExceeded { requested: n, cap: DEFAULT_ELEMENT_CAP });
        }
        if zero.idx() >= n || one.idx() >= n {
            return Err(AlgebraError::InvalidTable("zero/one out of range".into()));
        }
        if complement.len() != n {
            return Err(AlgebraError::InvalidTable("complement table has wrong length".into()));
        }
        if complement.iter().any(|c| c.idx() >= n) {
            return Err(AlgebraError::InvalidTable("complement entry out of range".into()));
        }
        let mut sum = vec![None; n * n];
        for &(a, b, c) in sums {
            if a.idx() >= n || b.idx() >= n || c.idx() >= n {
                return Err(AlgebraError::InvalidTable("sum entry out of range".into()));
            }
            let cell = &mut sum[a.idx() * n + b.idx()];
            if cell.is_some() && *cell != Some(c) {
                return Err(AlgebraError::InvalidTable(format!(
                    "conflicting sum entries for ({}, {})",
                    a.0, b.0
                )));
            }
            *cell = Some(c);
        }
        Ok(Self::assemble(name.into(), labels, zero, one, sum, complement))
    }

    fn assemble(
        name: String,
        labels: Vec<String>,
        zero: ElementId,
        one: ElementId,
        sum: Vec<Option<ElementId>>,
        complement: Vec<ElementId>,
    ) -> EffectAlgebra {
        let n = labels.len();
        let mut partners = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if sum[a * n + b].is_some() {
                    partners[a].push(ElementId(b as u32));
                }
            }
        }
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for c in 0..n {
                if let Some(b) = sum[a * n + c] {
                    leq[a * n + b.idx()] = true;
                }
            }
        }
        EffectAlgebra { name, labels, zero, one, sum, complement, partners, leq }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Replaces the display labels; the table structure is untouched.
    pub fn relabel(&mut self, labels: Vec<String>) -> Result<(), AlgebraError> {
        if labels.len() != self.labels.len() {
            return Err(AlgebraError::InvalidTable("label count mismatch".into()));
        }
        self.labels = labels;
        Ok(())
    }

    pub fn element_count(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        (0..self.labels.len() as u32).map(ElementId)
    }

    pub fn zero(&self) -> ElementId {
        self.zero
    }

    pub fn one(&self) -> ElementId {
        self.one
    }

    pub fn label(&self, e: ElementId) -> &str {
        &self.labels[e.idx()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element_by_label(&self, label: &str) -> Option<ElementId> {
        self.labels.iter().position(|l| l == label).map(|i| ElementId(i as u32))
    }

    pub fn sum(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        self.sum[a.idx() * self.element_count() + b.idx()]
    }

    pub fn complement(&self, a: ElementId) -> ElementId {
        self.complement[a.idx()]
    }

    /// All `b` with `a ⊞ b` defined, ascending.
    pub fn partners(&self, a: ElementId) -> &[ElementId] {
        &self.partners[a.idx()]
    }

    /// The derived order: `a ≤ b` iff some `c` has `a ⊞ c = b`.
    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        self.leq[a.idx() * self.element_count() + b.idx()]
    }

    /// Left-associated sum of a sequence of elements.
    pub fn sum_all(&self, elems: &[ElementId]) -> Option<ElementId> {
        let mut acc = self.zero;
        for &e in elems {
            acc = self.sum(acc, e)?;
        }
        Some(acc)
    }

    /// Exhaustive check of every effect-algebra axiom, reporting all
    /// violations with witnesses. The associativity loop only walks defined
    /// partial sums, so it is cheap for sparse sum tables.
    pub fn verify_axioms(&self) -> ValidationReport {
        let n = self.element_count();
        let mut report = ValidationReport::default();
        // commutativity
        for a in self.elements() {
            for b in self.elements() {
                if self.sum(a, b) != self.sum(b, a) {
                    report.violations.push(AxiomViolation::Commutativity { a, b });
                }
            }
        }
        // associativity, walking only defined sums
        for a in self.elements() {
            for &b in self.partners(a) {
                let ab = self.sum(a, b).unwrap();
                for &c in self.partners(ab) {
                    let lhs = self.sum(ab, c);
                    let bc = self.sum(b, c);
                    let rhs = bc.and_then(|bc| self.sum(a, bc));
                    if bc.is_none() || lhs != rhs {
                        report.violations.push(AxiomViolation::Associativity { a, b, c });
                    }
                }
            }
        }
        // zero law
        for a in self.elements() {
            if self.sum(self.zero, a) != Some(a) {
                report.violations.push(AxiomViolation::ZeroLaw { a });
            }
        }
        // complements: existence along the table, then uniqueness
        for a in self.elements() {
            if self.sum(a, self.complement(a)) != Some(self.one) {
                report.violations.push(AxiomViolation::ComplementSum { a });
            }
            let mut found: Option<ElementId> = None;
            for b in self.elements() {
                if self.sum(a, b) == Some(self.one) {
                    if let Some(first) = found {
                        if first != b {
                            report.violations.push(AxiomViolation::ComplementUnique {
                                a,
                                first,
                                second: b,
                            });
                        }
                    } else {
                        found = Some(b);
                    }
                }
            }
        }
        // zero-one law
        for a in self.elements() {
            if self.sum(a, self.one).is_some() && a != self.zero {
                report.violations.push(AxiomViolation::ZeroOneLaw { a });
            }
        }
        // derived order must be antisymmetric
        for a in 0..n {
            for b in 0..a {
                if self.leq[a * n + b] && self.leq[b * n + a] {
                    report.violations.push(AxiomViolation::OrderAntisymmetry {
                        a: ElementId(a as u32),
                        b: ElementId(b as u32),
                    });
                }
            }
        }
        report
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<ElementId> {
        self.elements()
            .filter(|&a| {
                a != self.zero
                    && self.elements().all(|b| b == self.zero || b == a || !self.leq(b, a))
            })
            .collect()
    }

    /// Height: the longest chain 0 = a₀ < a₁ < ⋯ < aₙ = 1. For a finite
    /// orthoalgebra this equals the length of the longest maximal test.
    pub fn height(&self) -> usize {
        let n = self.element_count();
        // longest path in the strict order DAG; sorting by the number of
        // elements strictly below gives a topological order
        let mut longest = vec![0usize; n];
        let mut order: Vec<usize> = (0..n).collect();
        let below =
            |x: usize| (0..n).filter(|&y| y != x && self.leq[y * n + x]).count();
        order.sort_by_key(|&x| below(x));
        for &x in &order {
            for y in 0..n {
                if y != x && self.leq[y * n + x] {
                    longest[x] = longest[x].max(longest[y] + 1);
                }
            }
        }
        longest[self.one.idx()]
    }

    pub fn is_orthoalgebra(&self) -> Result<(), AlgebraError> {
        for a in self.elements() {
            if a != self.zero && self.sum(a, a).is_some() {
                return Err(AlgebraError::NotAnOrthoalgebra {
                    witness: format!("{} ⊞ {} is defined", self.label(a), self.label(a)),
                });
            }
        }
        Ok(())
    }

    /// Blocks (maximal Boolean subalgebras) of an orthoalgebra, each given as
    /// its full element subset. Blocks correspond to the maximal tests, i.e.
    /// to the sets of atoms that sum to 1.
    pub fn blocks(&self) -> Result<Vec<Vec<ElementId>>, AlgebraError> {
        self.is_orthoalgebra()?;
        let atoms = self.atoms();
        let mut atom_tests: Vec<Vec<ElementId>> = Vec::new();
        let mut stack: Vec<(usize, Vec<ElementId>, ElementId)> = vec![(0, Vec::new(), self.zero)];
        while let Some((next, chosen, acc)) = stack.pop() {
            if acc == self.one {
                atom_tests.push(chosen);
                continue;
            }
            for i in next..atoms.len() {
                if let Some(acc2) = self.sum(acc, atoms[i]) {
                    let mut c2 = chosen.clone();
                    c2.push(atoms[i]);
                    stack.push((i + 1, c2, acc2));
                }
            }
        }
        let mut blocks: Vec<Vec<ElementId>> = atom_tests
            .iter()
            .map(|t| {
                // all sums of subsets of the block atoms
                let mut elems: BTreeSet<ElementId> = BTreeSet::new();
                let mut sub = vec![(0usize, self.zero)];
                while let Some((i, acc)) = sub.pop() {
                    elems.insert(acc);
                    for j in i..t.len() {
                        if let Some(acc2) = self.sum(acc, t[j]) {
                            sub.push((j + 1, acc2));
                        }
                    }
                }
                elems.into_iter().collect::<Vec<_>>()
            })
            .collect();
        blocks.sort();
        blocks.dedup();
        Ok(blocks)
    }

    /// The smallest subset containing `seed` together with 0 and 1, closed
    /// under complement and under defined sums, and its inclusion morphism.
    pub fn subalgebra_generated(&self, seed: &[ElementId]) -> (EffectAlgebra, Morphism) {
        let mut members: BTreeSet<ElementId> = seed.iter().copied().collect();
        members.insert(self.zero);
        members.insert(self.one);
        loop {
            let mut added = Vec::new();
            for &a in &members {
                let c = self.complement(a);
                if !members.contains(&c) {
                    added.push(c);
                }
                for &b in &members {
                    if let Some(s) = self.sum(a, b) {
                        if !members.contains(&s) {
                            added.push(s);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            members.extend(added);
        }
        let subset: Vec<ElementId> = members.into_iter().collect();
        self.restrict_to(&subset)
    }

    /// Packs a (verified or trusted) subset into a standalone algebra with
    /// the inherited operations and the inclusion morphism.
    pub fn restrict_to(&self, subset: &[ElementId]) -> (EffectAlgebra, Morphism) {
        let index: HashMap<ElementId, u32> =
            subset.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        let labels = subset.iter().map(|&e| self.label(e).to_string()).collect::<Vec<_>>();
        let n = subset.len();
        let mut sum = vec![None; n * n];
        for (i, &a) in subset.iter().enumerate() {
            for (j, &b) in subset.iter().enumerate() {
                if let Some(s) = self.sum(a, b) {
                    if let Some(&k) = index.get(&s) {
                        sum[i * n + j] = Some(ElementId(k));
                    }
                }
            }
        }
        let complement = subset.iter().map(|&a| ElementId(index[&self.complement(a)])).collect();
        let alg = EffectAlgebra::assemble(
            format!("{}-sub", self.name),
            labels,
            ElementId(index[&self.zero]),
            ElementId(index[&self.one]),
            sum,
            complement,
        );
        let map = Morphism { map: subset.to_vec() };
        (alg, map)
    }

    /// Checks that `subset` is a subalgebra: contains 0 and 1, closed under
    /// complement and under sums defined in the ambient algebra.
    pub fn check_subalgebra(&self, subset: &[bool]) -> Result<(), AlgebraError> {
        let n = self.element_count();
        if subset.len() != n {
            return Err(AlgebraError::NotASubalgebra { detail: "subset mask length".into() });
        }
        if !subset[self.zero.idx()] || !subset[self.one.idx()] {
            return Err(AlgebraError::NotASubalgebra { detail: "missing 0 or 1".into() });
        }
        for a in self.elements().filter(|a| subset[a.idx()]) {
            if !subset[self.complement(a).idx()] {
                return Err(AlgebraError::NotASubalgebra {
                    detail: format!("not closed under complement at {}", self.label(a)),
                });
            }
            for &b in self.partners(a) {
                if subset[b.idx()] {
                    let s = self.sum(a, b).unwrap();
                    if !subset[s.idx()] {
                        return Err(AlgebraError::NotASubalgebra {
                            detail: format!(
                                "{} ⊞ {} = {} escapes the subset",
                                self.label(a),
                                self.label(b),
                                self.label(s)
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Set intersection of two verified subalgebras, with inclusion into the
    /// ambient algebra.
    pub fn intersect_subalgebras(
        &self,
        a: &[bool],
        b: &[bool],
    ) -> Result<(EffectAlgebra, Morphism), AlgebraError> {
        self.check_subalgebra(a)?;
        self.check_subalgebra(b)?;
        let subset: Vec<ElementId> = self.elements().filter(|e| a[e.idx()] && b[e.idx()]).collect();
        Ok(self.restrict_to(&subset))
    }

    /// True iff every element lies in `a` or `b` (both verified subalgebras).
    pub fn is_union(&self, a: &[bool], b: &[bool]) -> Result<bool, AlgebraError> {
        self.check_subalgebra(a)?;
        self.check_subalgebra(b)?;
        Ok(self.elements().all(|e| a[e.idx()] || b[e.idx()]))
    }

    pub fn subset_mask(&self, subset: &[ElementId]) -> Vec<bool> {
        let mut mask = vec![false; self.element_count()];
        for e in subset {
            mask[e.idx()] = true;
        }
        mask
    }

    /// The two-element algebra {0, 1}.
    pub fn l1() -> EffectAlgebra {
        let zero = ElementId(0);
        let one = ElementId(1);
        EffectAlgebra::from_tables(
            "L1",
            vec!["0".into(), "1".into()],
            zero,
            one,
            &[(zero, zero, zero), (zero, one, one), (one, zero, one)],
            vec![one, zero],
        )
        .expect("L1 tables are well-formed")
    }

    /// The power set of an `m`-element set: the m-fold product of L1, with
    /// sums given by disjoint union.
    pub fn powerset(m: u32) -> Result<EffectAlgebra, AlgebraError> {
        assert!(m >= 1, "powerset needs m >= 1");
        if m >= 31 || (1usize << m) > DEFAULT_ELEMENT_CAP {
            return Err(AlgebraError::SizeCapExceeded {
                requested: 1usize << m.min(40),
                cap: DEFAULT_ELEMENT_CAP,
            });
        }
        let n = 1usize << m;
        let label = |s: usize| {
            if s == 0 {
                "0".to_string()
            } else if s == n - 1 {
                "1".to_string()
            } else {
                let names: Vec<String> =
                    (0..m).filter(|i| s >> i & 1 == 1).map(|i| format!("e{i}")).collect();
                names.join("+")
            }
        };
        let labels = (0..n).map(label).collect();
        let mut sum = vec![None; n * n];
        for s in 0..n {
            for t in 0..n {
                if s & t == 0 {
                    sum[s * n + t] = Some(ElementId((s | t) as u32));
                }
            }
        }
        let complement = (0..n).map(|s| ElementId((!s & (n - 1)) as u32)).collect();
        Ok(EffectAlgebra::assemble(
            format!("P{m}"),
            labels,
            ElementId(0),
            ElementId((n - 1) as u32),
            sum,
            complement,
        ))
    }

    /// Cartesian product with pointwise operations.
    pub fn product(a: &EffectAlgebra, b: &EffectAlgebra) -> Result<EffectAlgebra, AlgebraError> {
        let (na, nb) = (a.element_count(), b.element_count());
        let n = na * nb;
        if n > DEFAULT_ELEMENT_CAP {
            return Err(AlgebraError::SizeCapExceeded { requested: n, cap: DEFAULT_ELEMENT_CAP });
        }
        let id = |x: usize, y: usize| ElementId((x * nb + y) as u32);
        let labels =
            (0..n).map(|i| format!("({},{})", a.labels[i / nb], b.labels[i % nb])).collect();
        let mut sum = vec![None; n * n];
        for x1 in 0..na {
            for y1 in 0..nb {
                for x2 in 0..na {
                    for y2 in 0..nb {
                        if let (Some(sx), Some(sy)) = (
                            a.sum(ElementId(x1 as u32), ElementId(x2 as u32)),
                            b.sum(ElementId(y1 as u32), ElementId(y2 as u32)),
                        ) {
                            sum[(x1 * nb + y1) * n + (x2 * nb + y2)] =
                                Some(id(sx.idx(), sy.idx()));
                        }
                    }
                }
            }
        }
        let complement = (0..n)
            .map(|i| {
                let (x, y) = (i / nb, i % nb);
                id(
                    a.complement(ElementId(x as u32)).idx(),
                    b.complement(ElementId(y as u32)).idx(),
                )
            })
            .collect();
        Ok(EffectAlgebra::assemble(
            format!("({}x{})", a.name, b.name),
            labels,
            id(a.zero.idx(), b.zero.idx()),
            id(a.one.idx(), b.one.idx()),
            sum,
            complement,
        ))
    }

    /// Coproduct: disjoint union with the zeros and the ones identified.
    /// Cross sums of non-extremal elements are never defined.
    pub fn coproduct(a: &EffectAlgebra, b: &EffectAlgebra) -> Result<EffectAlgebra, AlgebraError> {
        let n = a.element_count() + b.element_count() - 2;
        if n > DEFAULT_ELEMENT_CAP {
            return Err(AlgebraError::SizeCapExceeded { requested: n, cap: DEFAULT_ELEMENT_CAP });
        }
        // layout: 0, 1, then inner elements of a, then inner elements of b
        let mut labels = vec!["0".to_string(), "1".to_string()];
        let mut amap: Vec<ElementId> = vec![ElementId(0); a.element_count()];
        let mut bmap: Vec<ElementId> = vec![ElementId(0); b.element_count()];
        amap[a.zero.idx()] = ElementId(0);
        amap[a.one.idx()] = ElementId(1);
        bmap[b.zero.idx()] = ElementId(0);
        bmap[b.one.idx()] = ElementId(1);
        for e in a.elements() {
            if e != a.zero && e != a.one {
                amap[e.idx()] = ElementId(labels.len() as u32);
                labels.push(a.label(e).to_string());
            }
        }
        for e in b.elements() {
            if e != b.zero && e != b.one {
                bmap[e.idx()] = ElementId(labels.len() as u32);
                labels.push(format!("{}'", b.label(e)));
            }
        }
        let mut sums: Vec<(ElementId, ElementId, ElementId)> = Vec::new();
        for x in a.elements() {
            for y in a.elements() {
                if let Some(s) = a.sum(x, y) {
                    sums.push((amap[x.idx()], amap[y.idx()], amap[s.idx()]));
                }
            }
        }
        for x in b.elements() {
            for y in b.elements() {
                if let Some(s) = b.sum(x, y) {
                    sums.push((bmap[x.idx()], bmap[y.idx()], bmap[s.idx()]));
                }
            }
        }
        let mut complement = vec![ElementId(0); labels.len()];
        complement[0] = ElementId(1);
        complement[1] = ElementId(0);
        for e in a.elements() {
            complement[amap[e.idx()].idx()] = amap[a.complement(e).idx()];
        }
        for e in b.elements() {
            complement[bmap[e.idx()].idx()] = bmap[b.complement(e).idx()];
        }
        EffectAlgebra::from_tables(
            format!("({}+{})", a.name, b.name),
            labels,
            ElementId(0),
            ElementId(1),
            &sums,
            complement,
        )
    }
}

/// A total map between effect algebras, stored as a table indexed by source
/// elements. Structure preservation is checked, never assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub map: Vec<ElementId>,
}

impl Morphism {
    pub fn apply(&self, e: ElementId) -> ElementId {
        self.map[e.idx()]
    }

    pub fn identity(alg: &EffectAlgebra) -> Morphism {
        Morphism { map: alg.elements().collect() }
    }

    /// Checks preservation of 0, 1, complements, and defined sums.
    pub fn verify(&self, src: &EffectAlgebra, dst: &EffectAlgebra) -> Result<(), AlgebraError> {
        if self.map.len() != src.element_count() {
            return Err(AlgebraError::InvalidTable("morphism table length".into()));
        }
        if self.apply(src.zero()) != dst.zero() {
            return Err(AlgebraError::InvalidTable("morphism does not preserve 0".into()));
        }
        if self.apply(src.one()) != dst.one() {
            return Err(AlgebraError::InvalidTable("morphism does not preserve 1".into()));
        }
        for a in src.elements() {
            if self.apply(src.complement(a)) != dst.complement(self.apply(a)) {
                return Err(AlgebraError::InvalidTable(format!(
                    "morphism does not preserve the complement of {}",
                    src.label(a)
                )));
            }
            for &b in src.partners(a) {
                let s = src.sum(a, b).unwrap();
                match dst.sum(self.apply(a), self.apply(b)) {
                    Some(t) if t == self.apply(s) => {}
                    _ => {
                        return Err(AlgebraError::InvalidTable(format!(
                            "morphism does not preserve {} ⊞ {}",
                            src.label(a),
                            src.label(b)
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.map.iter().all(|e| seen.insert(*e))
    }

    /// Strong: definedness of `f(a) ⊞ f(b)` forces definedness of `a ⊞ b`.
    pub fn is_strong(&self, src: &EffectAlgebra, dst: &EffectAlgebra) -> bool {
        for a in src.elements() {
            for b in src.elements() {
                if dst.sum(self.apply(a), self.apply(b)).is_some() && src.sum(a, b).is_none() {
                    return false;
                }
            }
        }
        true
    }
}

/// Hypergraph presentation of a finite orthoalgebra: a point per atom, a
/// line per maximal test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreechieDiagram {
    pub name: String,
    pub atoms: Vec<String>,
    pub lines: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreechieError {
    EmptyLine(usize),
    DuplicateAtomInLine { line: usize, atom: String },
    AtomNotOnAnyLine(String),
    LineContained { inner: usize, outer: usize },
    TooManyAtoms(usize),
}

impl fmt::Display for GreechieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreechieError::EmptyLine(i) => write!(f, "line {i} is empty"),
            GreechieError::DuplicateAtomInLine { line, atom } => {
                write!(f, "line {line} repeats atom {atom}")
            }
            GreechieError::AtomNotOnAnyLine(a) => write!(f, "atom {a} lies on no line"),
            GreechieError::LineContained { inner, outer } => {
                write!(f, "line {inner} is contained in line {outer}")
            }
            GreechieError::TooManyAtoms(n) => write!(f, "{n} atoms exceed the supported 128"),
        }
    }
}

impl std::error::Error for GreechieError {}

impl GreechieDiagram {
    pub fn validate(&self) -> Result<(), GreechieError> {
        if self.atoms.len() > 128 {
            return Err(GreechieError::TooManyAtoms(self.atoms.len()));
        }
        let mut covered = vec![false; self.atoms.len()];
        for (i, line) in self.lines.iter().enumerate() {
            if line.is_empty() {
                return Err(GreechieError::EmptyLine(i));
            }
            let mut seen = BTreeSet::new();
            for &a in line {
                if !seen.insert(a) {
                    return Err(GreechieError::DuplicateAtomInLine {
                        line: i,
                        atom: self.atoms[a].clone(),
                    });
                }
                covered[a] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(GreechieError::AtomNotOnAnyLine(self.atoms[i].clone()));
        }
        for (i, li) in self.lines.iter().enumerate() {
            for (j, lj) in self.lines.iter().enumerate() {
                if i != j && li.iter().all(|a| lj.contains(a)) {
                    return Err(GreechieError::LineContained { inner: i, outer: j });
                }
            }
        }
        Ok(())
    }

    fn line_mask(&self, i: usize) -> u128 {
        self.lines[i].iter().fold(0u128, |m, &a| m | (1u128 << a))
    }
}

/// Pastes the Boolean blocks of a Greechie diagram into an orthoalgebra.
///
/// Elements are equivalence classes of (line, atom-subset) pairs under the
/// closure of two rules: equal atom-sets are identified, and identified
/// classes have their in-line complements identified. Sums are defined
/// exactly via disjoint representatives within a single line. The result is
/// rejected (never repaired) if the sum is ambiguous or any axiom fails.
pub fn from_greechie(d: &GreechieDiagram) -> Result<EffectAlgebra, AlgebraError> {
    d.validate().map_err(|e| AlgebraError::InadmissibleDiagram(e.to_string()))?;

    // enumerate nodes (line, subset)
    let mut nodes: Vec<(usize, u128)> = Vec::new();
    let mut node_index: HashMap<(usize, u128), usize> = HashMap::new();
    for li in 0..d.lines.len() {
        let lm = d.line_mask(li);
        // iterate submasks of lm
        let mut s = lm;
        loop {
            nodes.push((li, s));
            node_index.insert((li, s), nodes.len() - 1);
            if s == 0 {
                break;
            }
            s = (s - 1) & lm;
        }
    }
    if nodes.len() > 4 * DEFAULT_ELEMENT_CAP {
        return Err(AlgebraError::SizeCapExceeded {
            requested: nodes.len(),
            cap: 4 * DEFAULT_ELEMENT_CAP,
        });
    }

    let mut uf = UnionFind::new(nodes.len());
    // rule (i): equal atom-sets
    let mut by_mask: BTreeMap<u128, Vec<usize>> = BTreeMap::new();
    for (i, &(_, s)) in nodes.iter().enumerate() {
        by_mask.entry(s).or_default().push(i);
    }
    for group in by_mask.values() {
        for w in group.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    // rule (ii): closure under in-line complements
    let comp_node: Vec<usize> =
        nodes.iter().map(|&(li, s)| node_index[&(li, d.line_mask(li) & !s)]).collect();
    loop {
        let mut changed = false;
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if uf.find(i) == uf.find(j) && uf.find(comp_node[i]) != uf.find(comp_node[j]) {
                    uf.union(comp_node[i], comp_node[j]);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // classes -> elements, with deterministic ordering by smallest node
    let mut class_of_root: HashMap<usize, usize> = HashMap::new();
    let mut class_reps: Vec<usize> = Vec::new();
    let mut class_of_node = vec![usize::MAX; nodes.len()];
    for i in 0..nodes.len() {
        let r = uf.find(i);
        let c = *class_of_root.entry(r).or_insert_with(|| {
            class_reps.push(i);
            class_reps.len() - 1
        });
        class_of_node[i] = c;
    }
    let nclasses = class_reps.len();
    if nclasses > DEFAULT_ELEMENT_CAP {
        return Err(AlgebraError::SizeCapExceeded {
            requested: nclasses,
            cap: DEFAULT_ELEMENT_CAP,
        });
    }

    // display label: lexicographically smallest atom-set in the class
    let label_of_class = |c: usize| -> String {
        let mut best: Option<Vec<&str>> = None;
        for (i, &(_, s)) in nodes.iter().enumerate() {
            if class_of_node[i] != c {
                continue;
            }
            let names: Vec<&str> = (0..d.atoms.len())
                .filter(|&a| s >> a & 1 == 1)
                .map(|a| d.atoms[a].as_str())
                .collect();
            if best
                .as_ref()
                .map_or(true, |b| names.len() < b.len() || (names.len() == b.len() && names < *b))
            {
                best = Some(names);
            }
        }
        let names = best.unwrap();
        if names.is_empty() {
            "0".into()
        } else {
            names.join("+")
        }
    };
    let mut labels: Vec<String> = (0..nclasses).map(label_of_class).collect();

    let zero = ElementId(class_of_node[node_index[&(0, 0)]] as u32);
    let one = ElementId(class_of_node[node_index[&(0, d.line_mask(0))]] as u32);
    labels[one.idx()] = "1".into();

    // sums via disjoint representatives in a common line; ambiguity rejected
    let mut sum_entries: BTreeMap<(u32, u32), ElementId> = BTreeMap::new();
    for (i, &(li, s)) in nodes.iter().enumerate() {
        for (j, &(lj, t)) in nodes.iter().enumerate() {
            if li != lj || s & t != 0 {
                continue;
            }
            let result = ElementId(class_of_node[node_index[&(li, s | t)]] as u32);
            let key = (class_of_node[i] as u32, class_of_node[j] as u32);
            if let Some(prev) = sum_entries.get(&key) {
                if *prev != result {
                    return Err(AlgebraError::InadmissibleDiagram(format!(
                        "ambiguous sum {} ⊞ {}: {} vs {}",
                        labels[key.0 as usize],
                        labels[key.1 as usize],
                        labels[prev.idx()],
                        labels[result.idx()]
                    )));
                }
            } else {
                sum_entries.insert(key, result);
            }
        }
    }
    let sums: Vec<(ElementId, ElementId, ElementId)> =
        sum_entries.into_iter().map(|((a, b), c)| (ElementId(a), ElementId(b), c)).collect();
    let complement: Vec<ElementId> = (0..nclasses)
        .map(|c| {
            let rep = class_reps[c];
            ElementId(class_of_node[comp_node[rep]] as u32)
        })
        .collect();

    let alg = EffectAlgebra::from_tables(d.name.clone(), labels, zero, one, &sums, complement)?;
    let report = alg.verify_axioms();
    if !report.is_valid() {
        return Err(AlgebraError::InadmissibleDiagram(format!(
            "pasting violates axioms: {}",
            report.describe(&alg).join("; ")
        )));
    }
    Ok(alg)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Searches for an isomorphism by extending atom bijections; used by tests
/// and small structural checks, not on large algebras.
pub fn find_isomorphism(a: &EffectAlgebra, b: &EffectAlgebra) -> Option<Morphism> {
    if a.element_count() != b.element_count() {
        return None;
    }
    let aat = a.atoms();
    let bat = b.atoms();
    if aat.len() != bat.len() {
        return None;
    }
    fn close_map(
        a: &EffectAlgebra,
        b: &EffectAlgebra,
        aat: &[ElementId],
        chosen: &[ElementId],
    ) -> Option<Morphism> {
        // every element of the finite algebras we compare is reachable from
        // the atoms by complements and sums, so propagate to a total map
        let mut map: Vec<Option<ElementId>> = vec![None; a.element_count()];
        map[a.zero().idx()] = Some(b.zero());
        for (i, &at) in aat.iter().enumerate() {
            map[at.idx()] = Some(chosen[i]);
        }
        loop {
            let mut progressed = false;
            for x in a.elements() {
                let Some(mx) = map[x.idx()] else { continue };
                let cx = a.complement(x);
                let target = b.complement(mx);
                match map[cx.idx()] {
                    None => {
                        map[cx.idx()] = Some(target);
                        progressed = true;
                    }
                    Some(t) if t != target => return None,
                    _ => {}
                }
                for &y in a.partners(x) {
                    let Some(my) = map[y.idx()] else { continue };
                    let s = a.sum(x, y).unwrap();
                    let Some(ms) = b.sum(mx, my) else { return None };
                    match map[s.idx()] {
                        None => {
                            map[s.idx()] = Some(ms);
                            progressed = true;
                        }
                        Some(t) if t != ms => return None,
                        _ => {}
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        let map: Option<Vec<ElementId>> = map.into_iter().collect();
        let m = Morphism { map: map? };
        if m.is_injective() && m.verify(a, b).is_ok() && m.is_strong(a, b) {
            Some(m)
        } else {
            None
        }
    }
    fn backtrack(
        a: &EffectAlgebra,
        b: &EffectAlgebra,
        aat: &[ElementId],
        bat: &[ElementId],
        chosen: &mut Vec<ElementId>,
        used: &mut Vec<bool>,
    ) -> Option<Morphism> {
        if chosen.len() == aat.len() {
            return close_map(a, b, aat, chosen);
        }
        for (j, &cand) in bat.iter().enumerate() {
            if used[j] {
                continue;
            }
            chosen.push(cand);
            used[j] = true;
            if let Some(m) = backtrack(a, b, aat, bat, chosen, used) {
                return Some(m);
            }
            chosen.pop();
            used[j] = false;
        }
        None
    }
    let mut chosen = Vec::new();
    let mut used = vec![false; bat.len()];
    backtrack(a, b, &aat, &bat, &mut chosen, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn l1_is_a_valid_effect_algebra() {
        let l1 = EffectAlgebra::l1();
        assert_eq!(l1.element_count(), 2);
        assert!(l1.verify_axioms().is_valid());
        assert_eq!(l1.complement(l1.zero()), l1.one());
        assert_eq!(l1.sum(l1.one(), l1.one()), None, "zero-one law");
    }

    #[test]
    fn complement_uniqueness_violation_is_reported() {
        // x and y both act as complements of x
        let ids: Vec<ElementId> = (0..4).map(ElementId).collect();
        let (z, x, y, o) = (ids[0], ids[1], ids[2], ids[3]);
        let alg = EffectAlgebra::from_tables(
            "bad",
            vec!["0".into(), "x".into(), "y".into(), "1".into()],
            z,
            o,
            &[
                (z, z, z),
                (z, x, x),
                (x, z, x),
                (z, y, y),
                (y, z, y),
                (z, o, o),
                (o, z, o),
                (x, x, o),
                (x, y, o),
                (y, x, o),
                (y, y, o),
            ],
            vec![o, x, y, z],
        )
        .unwrap();
        let report = alg.verify_axioms();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::ComplementUnique { .. })));
    }

    #[test]
    fn powerset_basics() {
        let p2 = EffectAlgebra::powerset(2).unwrap();
        assert_eq!(p2.element_count(), 4);
        assert!(p2.verify_axioms().is_valid());
        let p3 = EffectAlgebra::powerset(3).unwrap();
        assert_eq!(p3.atoms().len(), 3);
        assert_eq!(p3.height(), 3);
        assert_eq!(p3.blocks().unwrap().len(), 1);
        let p1 = EffectAlgebra::powerset(1).unwrap();
        assert!(find_isomorphism(&p1, &EffectAlgebra::l1()).is_some());
    }

    #[test]
    fn product_of_l1s_is_p2() {
        let l1 = EffectAlgebra::l1();
        let p = EffectAlgebra::product(&l1, &l1).unwrap();
        assert!(p.verify_axioms().is_valid());
        assert!(find_isomorphism(&p, &EffectAlgebra::powerset(2).unwrap()).is_some());
    }

    #[test]
    fn product_with_l1_doubles_size() {
        let firefly = corpus::firefly();
        let p = EffectAlgebra::product(&firefly, &EffectAlgebra::l1()).unwrap();
        assert_eq!(p.element_count(), 2 * firefly.element_count());
        assert!(p.verify_axioms().is_valid());
    }

    #[test]
    fn product_p2_p3_is_p5() {
        let p = EffectAlgebra::product(
            &EffectAlgebra::powerset(2).unwrap(),
            &EffectAlgebra::powerset(3).unwrap(),
        )
        .unwrap();
        assert_eq!(p.element_count(), 32);
        assert!(find_isomorphism(&p, &EffectAlgebra::powerset(5).unwrap()).is_some());
    }

    #[test]
    fn coproduct_counts_and_axioms() {
        let p2 = EffectAlgebra::powerset(2).unwrap();
        let c = EffectAlgebra::coproduct(&p2, &p2).unwrap();
        assert_eq!(c.element_count(), 6);
        assert!(c.verify_axioms().is_valid());
        let p3 = EffectAlgebra::powerset(3).unwrap();
        let c33 = EffectAlgebra::coproduct(&p3, &p3).unwrap();
        assert_eq!(c33.element_count(), 14);
        assert!(c33.verify_axioms().is_valid());
    }

    #[test]
    fn coproduct_with_l1_is_identity() {
        let firefly = corpus::firefly();
        let c = EffectAlgebra::coproduct(&EffectAlgebra::l1(), &firefly).unwrap();
        assert!(find_isomorphism(&c, &firefly).is_some());
    }

    #[test]
    fn firefly_pasting() {
        let firefly = corpus::firefly();
        assert_eq!(firefly.element_count(), 12);
        assert!(firefly.verify_axioms().is_valid());
        assert_eq!(firefly.atoms().len(), 5);
        assert_eq!(firefly.blocks().unwrap().len(), 2);
        assert_eq!(firefly.height(), 3);
        let f = |l: &str| firefly.element_by_label(l).unwrap();
        let ab = firefly.sum(f("a"), f("b")).unwrap();
        let cd = firefly.sum(f("c"), f("d")).unwrap();
        assert_eq!(ab, cd);
    }

    #[test]
    fn bike_pasting() {
        let bike = corpus::bike();
        assert!(bike.verify_axioms().is_valid());
        assert_eq!(bike.element_count(), 36);
        assert_eq!(bike.atoms().len(), 8);
        assert_eq!(bike.blocks().unwrap().len(), 4);
        assert_eq!(bike.height(), 4);
        let f = |l: &str| bike.element_by_label(l).unwrap();
        // (a ⊞ b)⊥ = c ⊞ d = (g ⊞ h)⊥; classes {c,d} and {e,f} merge
        let ab = bike.sum(f("a"), f("b")).unwrap();
        let cd = bike.sum(f("c"), f("d")).unwrap();
        let ef = bike.sum(f("e"), f("f")).unwrap();
        let gh = bike.sum(f("g"), f("h")).unwrap();
        assert_eq!(bike.complement(ab), cd);
        assert_eq!(cd, ef);
        assert_eq!(ab, gh);
    }

    #[test]
    fn single_line_is_powerset() {
        let d = GreechieDiagram {
            name: "line4".into(),
            atoms: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            lines: vec![vec![0, 1, 2, 3]],
        };
        let alg = from_greechie(&d).unwrap();
        assert!(find_isomorphism(&alg, &EffectAlgebra::powerset(4).unwrap()).is_some());
    }

    #[test]
    fn firefly_block_is_p3() {
        let firefly = corpus::firefly();
        let f = |l: &str| firefly.element_by_label(l).unwrap();
        let (block, incl) = firefly.subalgebra_generated(&[f("a"), f("b"), f("e")]);
        assert!(find_isomorphism(&block, &EffectAlgebra::powerset(3).unwrap()).is_some());
        incl.verify(&block, &firefly).unwrap();
        assert!(incl.is_injective());
        assert!(incl.is_strong(&block, &firefly));
    }

    #[test]
    fn subalgebra_of_zero_is_l1() {
        let firefly = corpus::firefly();
        let (sub, _) = firefly.subalgebra_generated(&[firefly.zero()]);
        assert_eq!(sub.element_count(), 2);
    }

    #[test]
    fn firefly_blocks_intersect_in_p2() {
        let firefly = corpus::firefly();
        let blocks = firefly.blocks().unwrap();
        let a = firefly.subset_mask(&blocks[0]);
        let b = firefly.subset_mask(&blocks[1]);
        let (int, incl) = firefly.intersect_subalgebras(&a, &b).unwrap();
        assert_eq!(int.element_count(), 4);
        assert!(find_isomorphism(&int, &EffectAlgebra::powerset(2).unwrap()).is_some());
        incl.verify(&int, &firefly).unwrap();
        assert!(firefly.is_union(&a, &b).unwrap());
    }

    #[test]
    fn bike_halves_intersect_in_firefly_shape() {
        let bike = corpus::bike();
        let (a, b) = corpus::bike_half_masks(&bike);
        assert!(bike.is_union(&a, &b).unwrap());
        let (int, _) = bike.intersect_subalgebras(&a, &b).unwrap();
        assert_eq!(int.atoms().len(), 5);
        assert!(find_isomorphism(&int, &corpus::firefly()).is_some());
    }

    #[test]
    fn naive_bike_union_is_not_a_subalgebra() {
        let bike = corpus::bike();
        let blocks = bike.blocks().unwrap();
        // a union of three blocks misses sums like c ⊞ g
        let mut mask = vec![false; bike.element_count()];
        for bl in blocks.iter().take(3) {
            for e in bl {
                mask[e.idx()] = true;
            }
        }
        assert!(bike.check_subalgebra(&mask).is_err());
    }

    #[test]
    fn union_check_rejects_partial_cover() {
        let bike = corpus::bike();
        let blocks = bike.blocks().unwrap();
        let a = bike.subset_mask(&blocks[0]);
        let b = bike.subset_mask(&blocks[1]);
        // two blocks of the bike either fail the subalgebra check or miss E
        match bike.is_union(&a, &b) {
            Ok(covers) => assert!(!covers),
            Err(_) => {}
        }
    }

    #[test]
    fn height_is_additive_for_products_and_max_for_coproducts() {
        let cases = [EffectAlgebra::l1(), EffectAlgebra::powerset(2).unwrap(), corpus::firefly()];
        for a in &cases {
            for b in &cases {
                let p = EffectAlgebra::product(a, b).unwrap();
                assert_eq!(p.height(), a.height() + b.height());
                let c = EffectAlgebra::coproduct(a, b).unwrap();
                assert_eq!(c.height(), a.height().max(b.height()));
            }
        }
    }

    #[test]
    fn pentagon_sanity() {
        let p = corpus::pentagon();
        assert!(p.verify_axioms().is_valid());
        assert_eq!(p.atoms().len(), 10);
        assert_eq!(p.blocks().unwrap().len(), 5);
        assert_eq!(p.height(), 3);
    }

    #[test]
    fn greechie_invariants_rejected() {
        let d = GreechieDiagram {
            name: "bad".into(),
            atoms: vec!["a".into(), "b".into(), "c".into()],
            lines: vec![vec![0, 1, 2], vec![0, 1]],
        };
        assert!(matches!(d.validate(), Err(GreechieError::LineContained { .. })));
    }
}
