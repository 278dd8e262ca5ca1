//! Single-frequency mode algebra for the five dissipation lines.
//!
//! A field at angular frequency `omega > 0` is written as
//!
//! ```text
//! x = sum_p ( u_p * a_p + v_p * a_p^dagger )
//! ```
//!
//! where `a_p` annihilates a quantum of line `p` at `omega`. Components at
//! `-omega` are carried by the creation coefficients, so a conjugated input
//! such as `c_in[omega] = b_in[-omega]` is simply `v_b = 1`.
//!
//! Modes are normalized so that `[a_p, a_q^dagger] = delta_pq`. Every spectrum
//! returned here is a per-mode density in that normalization: a vacuum line
//! contributes `1/2`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of dissipation lines in the network.
pub const PORT_COUNT: usize = 5;

/// One of the five lines coupled to the amplifier network.
///
/// The declaration order (l, r, f, a, b) is the row/column order used by every
/// coefficient vector in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortId {
    /// Signal line, carrying the measured input `l_in` and back-action `l_out`.
    SignalL,
    /// Readout line going to the meter.
    ReadoutR,
    /// Line modelling the dissipative part of the feedback loop.
    FeedbackF,
    /// First amplifier-noise line.
    NoiseA,
    /// Second amplifier-noise line, entering through its creation operator.
    NoiseB,
}

impl PortId {
    pub const ALL: [PortId; PORT_COUNT] = [
        PortId::SignalL,
        PortId::ReadoutR,
        PortId::FeedbackF,
        PortId::NoiseA,
        PortId::NoiseB,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// Short line label as used in config keys (`l`, `r`, `f`, `a`, `b`).
    pub fn label(self) -> &'static str {
        match self {
            PortId::SignalL => "l",
            PortId::ReadoutR => "r",
            PortId::FeedbackF => "f",
            PortId::NoiseA => "a",
            PortId::NoiseB => "b",
        }
    }
}

impl fmt::Display for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A validated angular frequency in rad/s (finite, strictly positive).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    pub fn new(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 {
            Ok(Self(omega))
        } else {
            Err(Error::InvalidFrequency(omega))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AngularFrequency {
    type Error = Error;

    fn try_from(omega: f64) -> Result<Self> {
        Self::new(omega)
    }
}

/// Unit system for `hbar` and `k_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Si,
    /// `hbar = k_B = 1`.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub units: Units,
}

impl PhysicalConstants {
    pub const SI_HBAR: f64 = 1.054_571_817e-34;
    pub const SI_K_B: f64 = 1.380_649e-23;

    pub fn si() -> Self {
        Self {
            hbar: Self::SI_HBAR,
            k_b: Self::SI_K_B,
            units: Units::Si,
        }
    }

    pub fn normalized() -> Self {
        Self {
            hbar: 1.0,
            k_b: 1.0,
            units: Units::Normalized,
        }
    }

    pub fn for_units(units: Units) -> Self {
        match units {
            Units::Si => Self::si(),
            Units::Normalized => Self::normalized(),
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si()
    }
}

/// Port temperatures in kelvin. Ports never set stay at 0 K.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThermalEnvironment {
    temperatures: [f64; PORT_COUNT],
}

impl ThermalEnvironment {
    /// All lines at zero temperature.
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn uniform(temperature: f64) -> Result<Self> {
        PortId::ALL
            .iter()
            .try_fold(Self::vacuum(), |env, &p| env.with(p, temperature))
    }

    pub fn with(mut self, port: PortId, temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidPortTemperature {
                port,
                value: temperature,
            });
        }
        self.temperatures[port.index()] = temperature;
        Ok(self)
    }

    #[inline]
    pub fn temperature(&self, port: PortId) -> f64 {
        self.temperatures[port.index()]
    }

    /// Thermal spectrum of `port` at `omega`.
    pub fn sigma(&self, port: PortId, omega: AngularFrequency, constants: &PhysicalConstants) -> f64 {
        thermal_sigma(self.temperature(port), omega, constants)
            .expect("temperatures are validated on insertion")
    }
}

/// Symmetrized spectrum of a thermal line, `1/2 coth(hbar omega / 2 k_B T)`.
///
/// The zero-temperature case is the analytic limit `1/2` and never evaluates
/// `coth` at infinity.
pub fn thermal_sigma(
    temperature: f64,
    omega: AngularFrequency,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::InvalidTemperature(temperature));
    }
    if temperature == 0.0 {
        return Ok(0.5);
    }
    let x = constants.hbar * omega.get() / (2.0 * constants.k_b * temperature);
    // tanh saturates to exactly 1 for large x, so the result stays >= 1/2.
    Ok((0.5 / x.tanh()).max(0.5))
}

/// A field at one analysis frequency, as coefficients on the annihilation
/// (`u`) and creation (`v`) operators of each port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldExpr {
    omega: AngularFrequency,
    u: [Complex64; PORT_COUNT],
    v: [Complex64; PORT_COUNT],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl FieldExpr {
    pub fn zero(omega: AngularFrequency) -> Self {
        Self {
            omega,
            u: [ZERO; PORT_COUNT],
            v: [ZERO; PORT_COUNT],
        }
    }

    /// The annihilation operator of `port`, i.e. the input field `p_in[omega]`.
    pub fn annihilation(port: PortId, omega: AngularFrequency) -> Self {
        let mut x = Self::zero(omega);
        x.u[port.index()] = ONE;
        x
    }

    /// The creation operator of `port`, i.e. `p_in[-omega]`.
    pub fn creation(port: PortId, omega: AngularFrequency) -> Self {
        let mut x = Self::zero(omega);
        x.v[port.index()] = ONE;
        x
    }

    /// Builds a field from explicit coefficient vectors. Fails on any
    /// non-finite coefficient.
    pub fn from_coefficients(
        omega: AngularFrequency,
        u: [Complex64; PORT_COUNT],
        v: [Complex64; PORT_COUNT],
    ) -> Result<Self> {
        for c in u.iter().chain(v.iter()) {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite {
                    name: "field coefficient",
                    value: if c.re.is_finite() { c.im } else { c.re },
                });
            }
        }
        Ok(Self { omega, u, v })
    }

    #[inline]
    pub fn omega(&self) -> AngularFrequency {
        self.omega
    }

    #[inline]
    pub fn u(&self, port: PortId) -> Complex64 {
        self.u[port.index()]
    }

    #[inline]
    pub fn v(&self, port: PortId) -> Complex64 {
        self.v[port.index()]
    }

    pub fn annihilation_coefficients(&self) -> &[Complex64; PORT_COUNT] {
        &self.u
    }

    pub fn creation_coefficients(&self) -> &[Complex64; PORT_COUNT] {
        &self.v
    }

    pub fn set_u(&mut self, port: PortId, value: Complex64) {
        self.u[port.index()] = value;
    }

    pub fn set_v(&mut self, port: PortId, value: Complex64) {
        self.v[port.index()] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|c| *c == ZERO)
    }

    /// Hermitian conjugate: the paired field at `-omega`, re-expressed at
    /// `+omega` by swapping and conjugating the coefficient vectors.
    pub fn adjoint(&self) -> Self {
        Self {
            omega: self.omega,
            u: self.v.map(|c| c.conj()),
            v: self.u.map(|c| c.conj()),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            omega: self.omega,
            u: self.u.map(|c| c * factor),
            v: self.v.map(|c| c * factor),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    fn check_same_frequency(&self, other: &Self) -> Result<()> {
        if self.omega == other.omega {
            Ok(())
        } else {
            Err(Error::FrequencyMismatch {
                left: self.omega.get(),
                right: other.omega.get(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_frequency(other)?;
        let mut out = *self;
        for k in 0..PORT_COUNT {
            out.u[k] += other.u[k];
            out.v[k] += other.v[k];
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale_real(-1.0))
    }

    /// Euclidean norm over all ten coefficients.
    pub fn coefficient_norm(&self) -> f64 {
        self.u
            .iter()
            .chain(self.v.iter())
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.u
            .iter()
            .chain(self.v.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// `[x, y]` in the discrete normalization `[a_p, a_q^dagger] = delta_pq`.
pub fn commutator(x: &FieldExpr, y: &FieldExpr) -> Result<Complex64> {
    x.check_same_frequency(y)?;
    Ok((0..PORT_COUNT)
        .map(|k| x.u[k] * y.v[k] - x.v[k] * y.u[k])
        .sum())
}

/// Hermitian conjugate of `x`; see [`FieldExpr::adjoint`].
pub fn adjoint(x: &FieldExpr) -> FieldExpr {
    x.adjoint()
}

/// Symmetrized autospectrum `<x . x^dagger>` with every port in independent
/// thermal equilibrium.
pub fn sym_spectrum(
    x: &FieldExpr,
    env: &ThermalEnvironment,
    constants: &PhysicalConstants,
) -> f64 {
    PortId::ALL
        .iter()
        .map(|&port| {
            let weight = x.u(port).norm_sqr() + x.v(port).norm_sqr();
            if weight == 0.0 {
                0.0
            } else {
                weight * env.sigma(port, x.omega, constants)
            }
        })
        .sum()
}

/// Symmetrized cross-spectrum `<x . y^dagger>`, using the same port-sum rule
/// as [`sym_spectrum`]. `cross_spectrum(x, x)` equals the autospectrum.
pub fn cross_spectrum(
    x: &FieldExpr,
    y: &FieldExpr,
    env: &ThermalEnvironment,
    constants: &PhysicalConstants,
) -> Result<Complex64> {
    x.check_same_frequency(y)?;
    let mut total = ZERO;
    for port in PortId::ALL {
        let k = port.index();
        let weight = x.u[k] * y.u[k].conj() + x.v[k] * y.v[k].conj();
        if weight == ZERO {
            continue;
        }
        total += weight * env.sigma(port, x.omega, constants);
    }
    Ok(total)
}
