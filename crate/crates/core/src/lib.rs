pub mod chainring;
pub mod error;
pub mod polyring;
pub mod quantization;
pub mod ring;
pub mod witt;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/chain-rings.md")]
    mod chain_rings {}
    #[doc = include_str!("../../../book/src/witt-vectors.md")]
    mod witt_vectors {}
    #[doc = include_str!("../../../book/src/weyl-algebra.md")]
    mod weyl_algebra {}
    #[doc = include_str!("../../../book/src/centers.md")]
    mod centers {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/ideals.md")]
    mod ideals {}
}
