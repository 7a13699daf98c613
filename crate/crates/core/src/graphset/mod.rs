//! Simple graphs: canonical forms, enumeration of isomorphism classes and the
//! graph6 text format.

mod canon;
mod enumerate;
mod graph;
mod graph6;

pub use canon::{canonical_form, canonical_form_coloured, canonical_key, canonical_key_coloured, Canonical, CanonicalKey};
pub use enumerate::{enumerate_graphs, enumerate_levels, ClassRep};
pub use graph::{Graph, GraphError, MAX_VERTICES};
pub use graph6::{parse_graph6, read_graph6, write_graph6, Graph6Error};
