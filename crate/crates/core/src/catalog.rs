//! Small named shifts used throughout the test suites and the CLI docs.

use crate::matrix::TransitionMatrix;

fn named(names: &[&str], rows: [&[u8]; 3]) -> TransitionMatrix {
    TransitionMatrix::new(
        names.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| r.to_vec()).collect(),
    )
    .expect("catalog matrix is valid")
}

/// Rows a:111, b:101, c:010. Spectral radius 2.
pub fn t1() -> TransitionMatrix {
    named(&["a", "b", "c"], [&[1, 1, 1], &[1, 0, 1], &[0, 1, 0]])
}

/// Rows x:111, y:110, z:010. Spectral radius is the real root of λ³ − 2λ² − 1.
pub fn t2() -> TransitionMatrix {
    named(&["x", "y", "z"], [&[1, 1, 1], &[1, 1, 0], &[0, 1, 0]])
}

/// Rows a:110, b:001, c:111; conjugate to the full 2-shift.
pub fn conjugate_left() -> TransitionMatrix {
    named(&["a", "b", "c"], [&[1, 1, 0], &[0, 0, 1], &[1, 1, 1]])
}

/// The full shift on `{x, y}`.
pub fn full_two_shift() -> TransitionMatrix {
    TransitionMatrix::new(vec!["x".into(), "y".into()], vec![vec![1, 1], vec![1, 1]])
        .expect("catalog matrix is valid")
}

/// One letter with a self-loop.
pub fn single_loop() -> TransitionMatrix {
    TransitionMatrix::new(vec!["a".into()], vec![vec![1]]).expect("catalog matrix is valid")
}
