//! Closed-form solutions of the two reduced problems and the special
//! functions they need.

pub mod case1;
pub mod case2;
pub mod special;

pub use case1::{
    calibrate_case1_reading, case1_energy, case1_transform_chain, case1_wavefunction, Case1Solution, MorseChain,
    WaveReading,
};
pub use case2::{case2_hyp_params, case2_quantize, case2_wavefunction, Case2Solution, HypParams};
pub use special::{gauss_2f1, laguerre_gen};
