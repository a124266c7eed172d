//! Types, random codebooks and expected trace distances.

pub mod expectation;
pub mod sample;
pub mod types;

pub use expectation::{
    cc_reference_state, exact_expected_td, expected_td, iid_reference_state, induced_state, mc_expected_td,
    reference_state, ExpectationEstimate,
};
pub use sample::{
    sample_cc_codebook, sample_cc_codebook_indexed, sample_iid_codebook, sample_iid_codebook_indexed, Codebook,
    CodebookKind,
};
pub use types::{
    composition_counts, empirical_distribution, k_p, rational_prior, rationalize, rationalize_distribution,
    type_class_members, type_class_probability, type_class_size, TypeClassProbability,
};
