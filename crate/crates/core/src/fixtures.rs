//! Small hand-built rating systems.

use crate::rating_graph::{RatingMatrix, RatingScale};

/// Eight users, six objects, ratings on the 1–5 scale (`0` = not rated).
const WORKED_EXAMPLE: [[i32; 6]; 8] = [
    [5, 0, 3, 0, 1, 3],
    [4, 4, 0, 0, 0, 0],
    [4, 0, 5, 5, 1, 3],
    [5, 4, 0, 0, 1, 3],
    [5, 2, 0, 0, 4, 5],
    [5, 2, 0, 5, 0, 3],
    [5, 0, 0, 0, 0, 3],
    [4, 5, 0, 3, 0, 0],
];

/// Worked example for the group-based method.
///
/// Users `U1..U8`, objects `O1..O6`. Object `O2` has five raters whose groups
/// have sizes 1, 2 and 2, with `U2` and `U4` both giving it a 4, so that group
/// earns a reward of 2/5. `U3` collects the rewards 3/8, 1/2, 2/3, 3/4 and 5/6,
/// a reputation of exactly 3.75, and the two most suspicious users are `U5`
/// then `U3`.
pub fn worked_example() -> RatingMatrix {
    let user_ids = (1..=WORKED_EXAMPLE.len()).map(|i| format!("U{i}")).collect();
    let object_ids = (1..=WORKED_EXAMPLE[0].len()).map(|i| format!("O{i}")).collect();
    let scale = RatingScale::default();
    let rows = WORKED_EXAMPLE
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &r)| r != 0)
                .map(|(obj, &r)| (obj as u32, scale.level_of(r).unwrap()))
                .collect()
        })
        .collect();
    RatingMatrix::from_rows(user_ids, object_ids, scale, rows).expect("valid fixture")
}
