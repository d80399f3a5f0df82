//! Polygonal-curve similarity: classic and shortcut Fréchet distances,
//! segment-to-subcurve Fréchet queries, and universal vertex permutations.

pub mod error;
pub mod freespace;
pub mod gateset;
pub mod geom;
pub mod oracle;
pub mod permute;
pub mod segquery;
pub mod shortcut;
pub mod simplify;
pub mod spatial;

pub use error::GeomError;
pub use freespace::{frechet_decide, frechet_value, ParamPoint};
pub use geom::{CurvePos, Point, Polyline, Segment};
pub use permute::{build_permutation, VertexPermutation};
pub use segquery::SegQueryIndex;
pub use shortcut::{decider, shortcut_frechet, Answer, DeciderVerdict, ShortcutResult, Witness};
pub use simplify::simplify_mu;
