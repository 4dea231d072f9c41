//! Qualitative constraint networks over relation algebras such as Allen's
//! interval algebra, RCC8 and the point algebra, together with path
//! consistency and query-based acquisition of networks from a yes/no oracle.

pub mod algebra;
pub mod baselines;
pub mod generation;
pub mod harness;
pub mod learner;
pub mod network;
pub mod oracle;
pub mod propagation;
pub mod teaching;
