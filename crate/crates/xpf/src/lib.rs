//! The XP stabiliser formalism.

pub mod codespace;
pub mod error;
pub mod logical;
pub mod measure;
pub mod oracle;
pub mod ringlinalg;
pub mod states;
pub mod xpgroup;
pub mod xpop;

pub use error::{Result, XpError};
pub use xpop::XpOperator;
