//! First-order logic over frames: evaluation, Ehrenfeucht–Fraïssé games,
//! bounded sentence search and ultraproducts.

mod ef;
mod eval;
mod search;
mod syntax;
mod ultraproduct;

pub use ef::{ef_equivalent, ef_game, minimal_distinguishing_rounds, EfMove, EfOutcome};
pub use eval::{eval_fo, los_like_check, satisfies, satisfying_set, Assignment};
pub use search::distinguishing_sentence;
pub use syntax::{parse_fo, FOFormula};
pub use ultraproduct::{ultraproduct, Ultraproduct};
