pub mod bands;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod field;
pub mod fourier;
pub mod params;
pub mod wavelet;
pub mod io;
pub mod seqnorm;
pub mod synth;
