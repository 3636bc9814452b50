pub mod cli;
pub mod descent;
pub mod devissage;
pub mod harness;
pub mod error;
pub mod homtensor;
pub mod json;
pub mod limits;
pub mod matrix;
pub mod module;
pub mod normal_form;
pub mod purity;
pub mod pushout;
pub mod ring;
