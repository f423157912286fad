//! Forward Monte Carlo simulator for a pulsed quantum-dot single-photon
//! source in a photonic-crystal waveguide.
//!
//! A seeded continuous-time Markov chain evolves the five-level exciton
//! system pulse by pulse, with telegraph blinking, a saturating excitation
//! probability, and routing of radiative decays between the waveguide and
//! radiation channels. Builders turn the photon stream into TCSPC decay
//! histograms and HBT coincidence histograms; a separate synthesizer
//! generates Fabry-Perot spectra from section dispersions.
//!
//! Pulse blocks are simulated on independent, deterministically derived RNG
//! substreams, so results are bit-identical for any worker count.

pub mod coincidence;
pub mod config;
pub mod error;
pub mod fabry_perot;
pub mod histogram;
pub mod pulse;
pub mod rng;

pub use coincidence::build_coincidence_histogram;
pub use config::{
    BlinkConfig, DetectionConfig, ExperimentConfig, Preparation, SplitPair,
};
pub use error::SimError;
pub use fabry_perot::{synthesize_fp_spectrum, DispersionPoint, FabryPerotSceneConfig, WaveguideSection};
pub use histogram::build_decay_histogram;
pub use pulse::{simulate_pulse_train, EmissionChannel, PhotonRecord};
