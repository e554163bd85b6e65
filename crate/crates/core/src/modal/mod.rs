//! The basic modal language: syntax, Kripke semantics, frame validity,
//! bounded bisimulation, and the truth lemma on ultrafilter extensions.

mod bisim;
mod semantics;
mod syntax;

pub use bisim::{modally_equivalent_upto, n_bisimilar, ModalEquivalence};
pub use semantics::{eval_modal, frame_valid, truth_membership_check, truth_set, Model, UEModel, Validity, Valuation};
pub use syntax::{modal_depth, parse_modal, ModalFormula};
