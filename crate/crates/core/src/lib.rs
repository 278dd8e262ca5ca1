//! Quantum noise of an ideal operational amplifier used as a measuring device.
//!
//! The amplifier, its feedback loop and the signal/readout lines are modelled
//! as a five-port quantum network. The crate builds the input-output relations
//! at a single frequency, checks that they preserve the free-field commutators,
//! and evaluates the noise the amplifier adds to the measured signal.
//!
//! ```
//! use opamp_qnoise::{added_noise, AngularFrequency, DeviceParams, PhysicalConstants};
//!
//! let params = DeviceParams::resistive(50.0, 50.0, 1e9, 50.0, PhysicalConstants::si()).unwrap();
//! let report = added_noise(&params, AngularFrequency::new(1e6).unwrap());
//! assert!((report.noise_figure_db - 3.0103).abs() < 1e-3);
//! ```

pub mod checks;
pub mod config;
pub mod device;
pub mod error;
pub mod field;
pub mod golden;
pub mod noise;

pub use config::{parse_config, render_config, write_csv, ConfigError, RunConfig};
pub use device::{
    commutator_defects, feedback_impedance, noise_generators, relation_deviation,
    scattering_solved, scattering_transcribed, verify_bogoliubov, CommutatorDefects, DeviceParams,
    ReactanceSpec, Resistances, ScatteringRelation,
};
pub use error::{Error, Result};
pub use field::{
    adjoint, commutator, cross_spectrum, sym_spectrum, thermal_sigma, AngularFrequency, FieldExpr,
    PhysicalConstants, PortId, ThermalEnvironment, Units, PORT_COUNT,
};
pub use noise::{
    added_noise, added_noise_oracle, back_action, estimator, estimator_noise, noise_figure_db,
    optimize_matching, optimize_spectra, sigma_asymptotic, sweep, xi_parameter, MatchingOptimum,
    NoiseReport, Spacing, SweepSpec,
};
