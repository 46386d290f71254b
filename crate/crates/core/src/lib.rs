pub mod bilipschitz;
pub mod cohomology;
pub mod cocycle;
pub mod error;
pub mod full_group;
pub mod gromov;
pub mod group;
pub mod matrix;
pub mod odometer;
pub mod report;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/odometer.md")]
    mod odometer {}
    #[doc = include_str!("../../../book/src/full-group.md")]
    mod full_group {}
    #[doc = include_str!("../../../book/src/cocycles.md")]
    mod cocycles {}
    #[doc = include_str!("../../../book/src/bilipschitz.md")]
    mod bilipschitz {}
    #[doc = include_str!("../../../book/src/gromov.md")]
    mod gromov {}
    #[doc = include_str!("../../../book/src/cohomology.md")]
    mod cohomology {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
