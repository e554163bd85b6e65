//! Infinite frames given by finite presentations: hull-type census,
//! skeletons of the ultrafilter extension, and verdicts about it.

mod census;
mod detect;
mod family;

pub use census::{
    default_skeleton_budget, hull_census, hull_census_with_budget, modal_logic_coincides, ue_skeleton, CensusEntry,
    HullCensus, HullMatch, LambdaReport, Multiplicity, Provenance, UESkeleton,
};
pub use detect::{
    generated_substructure_verdict, greedy_coloring, reflexive_point_in_ue, Coloring, ColoringWitness, GeneratedVerdict,
    PartColoring, ReflexiveEvidence, ReflexiveVerdict,
};
pub use family::{expand, expansion, Builtin, DegreeBound, Expansion, FamilyPresentation, Part, RayKind, RayPresentation};
