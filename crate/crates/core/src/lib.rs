pub mod braid;
pub mod castle;
pub mod certify;
pub mod corpus;
pub mod error;
pub mod induce;
pub mod jones;
pub mod map;
pub mod planar;
pub mod poly;
pub mod seifert;
pub mod skein;
pub mod template;

pub use braid::{BraidWord, Letter, Permutation, Sign, SignPattern, TwistMode};
pub use error::{Error, Result};
pub use poly::{Laurent1, Laurent2};
pub use template::{alexander_closure, Placement, Template};
pub use planar::{Diagram, State};
