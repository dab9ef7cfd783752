//! Qubit-mediated cooling, gratings and the interferometer built from them.

pub mod cooling;
pub mod grating;
pub mod integrate;
pub mod interferometer;
pub mod pulse;

pub use cooling::{
    burst_amplitudes, cool, cooling_filter, cooling_kraus, flip_amplitude, frozen_filter_curve,
    frozen_kraus_pair, CoolingKraus,
    CoolingPulse, CoolingRecord, FilterCurve, FilterMode, FilterOutcome,
};
pub use grating::{
    free_evolution, kick_operator, grating, grating_branches, grating_operator, grating_unitary, BlockOperator,
    GratingSpec, Outcome,
};
pub use integrate::{integrate_joint, propagate_interaction, Schedule};
pub use interferometer::{
    interferometer, pplus, pplus_from_marginal, pplus_map, run_protocol, sample_readout,
    InterferometerSpec, ProtocolRecord, ReadoutSample, Step, StepRecord,
};
pub use pulse::{
    alpha_constant, alpha_rotating_wave, fwhm_for_alpha, pulse_alpha, Carrier, DrivePulse,
    Envelope, PulseEnvelope,
};
