//! Rate-compatible punctured polar codes: construction, spectrum analysis,
//! and link-level simulation.

pub mod codec;
mod error;
pub mod polar;
pub mod puncture;
pub mod reliability;
pub mod sim;
pub mod spectra;
mod trellis;

pub use codec::{
    ca_scl_decode, crc_attach, crc_check, sc_decode, scl_decode, CheckRule, Crc, DecodeResult,
    FrozenSpec, SATURATION_LLR,
};
pub use error::{Error, Result};
pub use polar::{binary_expansion, bit_reverse_permute, polar_encode, PathLabel};
pub use puncture::{
    count_equivalent_tables, derive_source_puncture_set, enumerate_equivalent_tables,
    realizable_source_sets, EquivalentClassCount, Mode, PuncturingTable, SourcePunctureSet,
};
pub use reliability::{
    a0_from_ebn0, bec_exact, construct_ga, path_bounds, path_recursion, propagate_bounds,
    select_info_set, InfoSet, ReliabilityVector,
};
pub use sim::{
    depuncture_llr, run_bler, transmit, BlerRecord, ChannelParams, CodeConfig, DecoderChoice,
};
pub use spectra::{
    closed_form_sd, digit_form_jsd, joint_spectrum_distance, pwef_coefficients,
    spectrum_distance, subtree_decomposition, PolarSpectrum, SpectrumDistances, SpectrumKind,
    SubtreeDecomposition,
};
