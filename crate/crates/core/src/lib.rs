//! PCM/FM waveform synthesis and single-filter linear approximations.
//!
//! The crate generates binary CPM signals (PCM/FM telemetry: `h = 0.7`,
//! `L = 2`, raised-cosine frequency pulse), decomposes them exactly into the
//! Laurent PAM filter bank, designs an MMSE transmit filter `c_w` driven by
//! the first component's pseudo-symbols, and scores every variant against the
//! nonlinear reference in floating point and in a bit-true fixed-point
//! datapath.
//!
//! ```
//! use pcmfm::{bits::generate_bits, cpm::cpm_modulate, params::ModulationParams};
//!
//! let params = ModulationParams::default();
//! let bits = generate_bits(100, 42).unwrap();
//! let s = cpm_modulate(&bits, &params).unwrap();
//! assert_eq!(s.len(), 800);
//! assert!(s.max_envelope_deviation() < 1e-12);
//! ```
//!
//! See the crate's `examples/` directory for one runnable program per stage.

pub mod bits;
pub mod cpm;
pub mod error;
pub mod experiment;
pub mod fir;
pub mod laurent;
pub mod metrics;
pub mod params;
pub mod pulse;
pub mod quantize;
pub mod signal;
pub mod wiener;

pub use error::{Error, Result};
pub use num_complex::Complex64;
