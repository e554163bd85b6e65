//! Finite Kripke frames, their ultrafilter extensions, and the modal and
//! first-order tools used to compare them.

pub mod census;
pub mod error;
pub mod fo;
pub mod frame;
pub mod gen;
pub mod hulls;
pub mod limits;
pub mod modal;
pub mod ultrafilter;

pub use error::{Error, Result};
pub use frame::{Boundedness, DegreeReport, Frame, FrameDoc, ImageMode, Vertex, VertexSet};
pub use limits::Limits;
pub use ultrafilter::{
    build_ue, build_ue_auto, canonical_embedding, cross_check, distinguishing_elements, enumerate_ultrafilters,
    eta_is_isomorphism, roads_between, ue_related, ultrafilter_road_delta, Carrier, CrossCheckReport, Direction, Road,
    UEFrame, UeMode, Ultrafilter,
};
pub use hulls::{canonical_form, endpoints, hull, hull_formula, rooted_iso, HullType, RootedGraph};
