pub mod coefficients;
mod error;

pub use error::{Error, Span};
pub mod ore;
pub mod involution;
pub mod syzygy;
pub mod duality;
pub mod spencer;
pub mod dsl;

/// The user guide in `book/`, compiled here so its examples run as doctests.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/language.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/completion.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    pub mod chapter5 {}
    #[doc = include_str!("../../../book/src/duality.md")]
    pub mod chapter6 {}
    #[doc = include_str!("../../../book/src/spencer.md")]
    pub mod chapter7 {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod chapter8 {}
}
