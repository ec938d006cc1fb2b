//! Built-in algebras used by the CLI and the test suites.

use crate::algebra::{FiniteAlgebra, Signature, Symbol};

fn labelled(alg: FiniteAlgebra, labels: &[&str]) -> FiniteAlgebra {
    alg.with_labels(labels.iter().map(|s| s.to_string()).collect())
        .expect("fixture labels")
}

/// The group Z2 with `+` and the constant `0`.
pub fn z2() -> FiniteAlgebra {
    let alg = FiniteAlgebra::new(
        "Z2",
        2,
        vec![
            (Symbol::new("0", 0), vec![0]),
            (Symbol::new("+", 2), vec![0, 1, 1, 0]),
        ],
    )
    .expect("Z2 fixture");
    labelled(alg, &["0", "1"])
}

/// The two-element lattice, with the constant `0` when `pointed`.
pub fn lattice2(pointed: bool) -> FiniteAlgebra {
    let mut ops = vec![
        (Symbol::new("meet", 2), vec![0, 0, 0, 1]),
        (Symbol::new("join", 2), vec![0, 1, 1, 1]),
    ];
    let name = if pointed {
        ops.push((Symbol::new("0", 0), vec![0]));
        "L2_0"
    } else {
        "L2"
    };
    labelled(
        FiniteAlgebra::new(name, 2, ops).expect("lattice fixture"),
        &["0", "1"],
    )
}

/// The two-element pointed set: one constant, no operations.
pub fn pointed_set2() -> FiniteAlgebra {
    let alg = FiniteAlgebra::new("P2", 2, vec![(Symbol::new("0", 0), vec![0])])
        .expect("pointed set fixture");
    labelled(alg, &["0", "1"])
}

/// The two-element set with empty signature.
pub fn set2() -> FiniteAlgebra {
    FiniteAlgebra::new("S2", 2, vec![]).expect("set fixture")
}

/// Subtraction on `labels` with `0` at index 0: `x - y = x` if `y = 0`,
/// and `0` otherwise.
fn subtraction_algebra(name: &str, labels: &[&str]) -> FiniteAlgebra {
    let n = labels.len();
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            table.push(if y == 0 { x } else { 0 });
        }
    }
    let alg = FiniteAlgebra::new(
        name,
        n,
        vec![(Symbol::new("0", 0), vec![0]), (Symbol::new("-", 2), table)],
    )
    .expect("subtraction fixture");
    labelled(alg, labels)
}

/// The three-element subtraction algebra `X = {0, a, b}`.
pub fn subtraction_x() -> FiniteAlgebra {
    subtraction_algebra("X", &["0", "a", "b"])
}

/// The two-element subtraction algebra `Y = {0, c}`.
pub fn subtraction_y() -> FiniteAlgebra {
    subtraction_algebra("Y", &["0", "c"])
}

/// The map `X -> Y` with `0, a -> 0` and `b -> c`. Whether this is a
/// homomorphism is for the caller to find out.
pub fn subtraction_f_map() -> Vec<usize> {
    vec![0, 0, 1]
}

/// The one-element algebra of a signature.
pub fn trivial(signature: &Signature) -> FiniteAlgebra {
    FiniteAlgebra::from_fn("1", 1, signature, |_, _| 0).expect("trivial algebra")
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "z2",
    "lattice2",
    "lattice2-pointed",
    "pointed-set2",
    "set2",
    "subtraction-x",
    "subtraction-y",
];

pub fn builtin(name: &str) -> Option<FiniteAlgebra> {
    Some(match name {
        "z2" => z2(),
        "lattice2" => lattice2(false),
        "lattice2-pointed" => lattice2(true),
        "pointed-set2" => pointed_set2(),
        "set2" => set2(),
        "subtraction-x" => subtraction_x(),
        "subtraction-y" => subtraction_y(),
        _ => return None,
    })
}
