//! Interactive steps-to-reproduce engine: GUI models, usage-trace language
//! models, S2R parsing and resolution, and the reporting session service.

pub mod app_sim;
pub mod bundle;
pub mod gui_model;
pub mod ngram;
pub mod nlp;
pub mod predictor;
pub mod resolver;
pub mod session;
pub mod service;
pub mod similarity;
pub mod spec;
pub mod traces;
