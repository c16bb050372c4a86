//! Bundled example algebras used across tests, the CLI corpus files, and the
//! verification suites: the firefly and bike orthoalgebras, the pentagon
//! (a 5-cycle of 3-atom lines), power sets, and the Bell scenario algebras.

use crate::algebra::{from_greechie, EffectAlgebra, ElementId, GreechieDiagram};

pub fn l1() -> EffectAlgebra {
    EffectAlgebra::l1()
}

pub fn powerset(m: u32) -> EffectAlgebra {
    EffectAlgebra::powerset(m).expect("small power set")
}

pub fn firefly_diagram() -> GreechieDiagram {
    GreechieDiagram {
        name: "firefly".into(),
        atoms: vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
        lines: vec![vec![0, 1, 4], vec![2, 3, 4]],
    }
}

/// Two 3-atom lines sharing one atom; 12 elements.
pub fn firefly() -> EffectAlgebra {
    from_greechie(&firefly_diagram()).expect("firefly diagram is admissible")
}

pub fn bike_diagram() -> GreechieDiagram {
    GreechieDiagram {
        name: "bike".into(),
        atoms: (0..8)
            .map(|i| ["a", "b", "c", "d", "e", "f", "g", "h"][i].to_string())
            .collect(),
        // top row, bottom row, left circle, right circle
        lines: vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![0, 1, 4, 5], vec![2, 3, 6, 7]],
    }
}

/// Four 4-atom lines in a cycle; 36 elements, 4 blocks.
pub fn bike() -> EffectAlgebra {
    from_greechie(&bike_diagram()).expect("bike diagram is admissible")
}

pub fn bike_half_a_diagram() -> GreechieDiagram {
    GreechieDiagram {
        name: "bike-half-a".into(),
        atoms: vec!["a".into(), "b".into(), "e".into(), "f".into(), "g".into(), "h".into()],
        lines: vec![vec![2, 3, 4, 5], vec![0, 1, 2, 3]],
    }
}

/// The bottom-line + left-circle half of the bike, as a standalone algebra.
pub fn bike_half_a() -> EffectAlgebra {
    from_greechie(&bike_half_a_diagram()).expect("bike half is admissible")
}

/// Subset masks of the two halves of the bike (bottom+left and top+right
/// blocks), each the union of two blocks and a genuine subalgebra.
pub fn bike_half_masks(bike: &EffectAlgebra) -> (Vec<bool>, Vec<bool>) {
    let blocks = bike.blocks().expect("bike is an orthoalgebra");
    assert_eq!(blocks.len(), 4);
    let atoms = bike.atoms();
    let block_atoms = |block: &[ElementId]| -> Vec<String> {
        block
            .iter()
            .filter(|e| atoms.contains(e))
            .map(|e| bike.label(*e).to_string())
            .collect()
    };
    let on_line = |block: &[ElementId], line: &[&str]| {
        block_atoms(block).iter().all(|x| line.contains(&x.as_str()))
    };
    let half_a_lines: [&[&str]; 2] = [&["e", "f", "g", "h"], &["a", "b", "e", "f"]];
    let half_b_lines: [&[&str]; 2] = [&["a", "b", "c", "d"], &["c", "d", "g", "h"]];
    let mut a = vec![false; bike.element_count()];
    let mut b = vec![false; bike.element_count()];
    for block in &blocks {
        if half_a_lines.iter().any(|l| on_line(block, l)) {
            for e in block {
                a[e.idx()] = true;
            }
        }
        if half_b_lines.iter().any(|l| on_line(block, l)) {
            for e in block {
                b[e.idx()] = true;
            }
        }
    }
    (a, b)
}

pub fn pentagon_diagram() -> GreechieDiagram {
    let mut atoms = Vec::new();
    for i in 1..=5 {
        atoms.push(format!("x{i}"));
        atoms.push(format!("y{i}"));
    }
    // atoms: x1 y1 x2 y2 x3 y3 x4 y4 x5 y5; line i = {x_i, y_i, x_{i+1}}
    let lines = (0..5).map(|i| vec![2 * i, 2 * i + 1, (2 * i + 2) % 10]).collect();
    GreechieDiagram { name: "pentagon".into(), atoms, lines }
}

/// Five 3-atom lines pasted in a cycle; the classic example carrying a state
/// that is not a mixture of its two-valued states.
pub fn pentagon() -> EffectAlgebra {
    from_greechie(&pentagon_diagram()).expect("pentagon diagram is admissible")
}

/// Names of the bundled corpus algebras, as accepted by [`by_name`].
pub const CORPUS_NAMES: &[&str] =
    &["L1", "P2", "P3", "P4", "P5", "firefly", "bike", "bike-half-a", "pentagon", "bell-side"];

pub fn by_name(name: &str) -> Option<EffectAlgebra> {
    match name {
        "L1" => Some(l1()),
        "P2" => Some(powerset(2)),
        "P3" => Some(powerset(3)),
        "P4" => Some(powerset(4)),
        "P5" => Some(powerset(5)),
        "firefly" => Some(firefly()),
        "bike" => Some(bike()),
        "bike-half-a" => Some(bike_half_a()),
        "pentagon" => Some(pentagon()),
        "bell-side" => Some(crate::bell::scenario_algebras().0),
        _ => None,
    }
}
