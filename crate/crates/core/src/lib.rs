//! Exact quantum query algorithms for Boolean function families, with a
//! state-vector simulator, classical parity decision tree baselines and an
//! exhaustive verifier.

pub mod algos;
pub mod boolfn;
pub mod classes;
pub mod classical;
pub mod qsim;
pub mod verify;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/functions.md")]
    pub mod functions {}
    #[doc = include_str!("../../../book/src/families.md")]
    pub mod families {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    pub mod simulator {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    pub mod algorithms {}
    #[doc = include_str!("../../../book/src/classical.md")]
    pub mod classical {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
}
