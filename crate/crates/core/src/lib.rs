pub mod bits;
pub mod bounds;
pub mod codes;
pub mod dqi;
mod error;
pub mod kravchuk;
pub mod oscillator;
pub mod samplers;

pub use error::{Error, Result, ENUMERATION_BUDGET_LOG2};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/kravchuk.md")]
    mod kravchuk {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/oscillator.md")]
    mod oscillator {}
    #[doc = include_str!("../../../book/src/dqi.md")]
    mod dqi {}
    #[doc = include_str!("../../../book/src/samplers.md")]
    mod samplers {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
