//! The operational-amplifier measurement device.
//!
//! The amplifier runs at infinite gain, infinite input impedance and zero
//! output impedance, with a feedback impedance `Z_f = R_f + iX`. Its voltage
//! and current noise generators are rewritten as two extra lines `a` and `b`
//! (line `b` entering through its creation operator), so the device becomes a
//! purely reactive five-port network.
//!
//! Two independent constructions of the output fields are provided:
//! [`scattering_transcribed`] writes down the closed-form input-output
//! relations, while [`scattering_solved`] solves the circuit equations for the
//! outward waves. [`verify_bogoliubov`] checks that the outputs are free
//! fields again.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{
    commutator, AngularFrequency, FieldExpr, PhysicalConstants, PortId, ThermalEnvironment,
};

/// Reactive part `X(omega)` of the feedback impedance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ReactanceSpec {
    #[default]
    None,
    /// Frequency-independent reactance in ohms (any sign).
    Constant(f64),
    /// Inductance in henries.
    Inductive(f64),
    /// Capacitance in farads.
    Capacitive(f64),
}

impl ReactanceSpec {
    fn validate(self) -> Result<Self> {
        match self {
            ReactanceSpec::None => {}
            ReactanceSpec::Constant(x) => {
                if !x.is_finite() {
                    return Err(Error::NonFinite {
                        name: "reactance",
                        value: x,
                    });
                }
            }
            ReactanceSpec::Inductive(l) => positive("inductance", l)?,
            ReactanceSpec::Capacitive(c) => positive("capacitance", c)?,
        }
        Ok(self)
    }

    /// `X(omega)` in ohms.
    pub fn reactance(&self, omega: AngularFrequency) -> f64 {
        let w = omega.get();
        match *self {
            ReactanceSpec::None => 0.0,
            ReactanceSpec::Constant(x) => x,
            ReactanceSpec::Inductive(l) => w * l,
            ReactanceSpec::Capacitive(c) => -1.0 / (w * c),
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Line impedances and the amplifier noise impedance, all in ohms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resistances {
    /// Characteristic impedance of the signal line.
    pub r_l: f64,
    /// Characteristic impedance of the readout line.
    pub r_r: f64,
    /// Characteristic impedance of the feedback line, equal to `Re Z_f`.
    pub r_f: f64,
    /// Noise impedance `sqrt(sigma_UU / sigma_II)` of the amplifier.
    pub r_0: f64,
}

impl Resistances {
    fn validate(self) -> Result<Self> {
        positive("R_l", self.r_l)?;
        positive("R_r", self.r_r)?;
        positive("R_f", self.r_f)?;
        positive("R_0", self.r_0)?;
        Ok(self)
    }
}

/// Everything needed to evaluate the device at any frequency.
///
/// Fields are private so that `Re Z_f == R_f` and positivity hold for every
/// value of this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    resistances: Resistances,
    reactance: ReactanceSpec,
    env: ThermalEnvironment,
    constants: PhysicalConstants,
}

impl DeviceParams {
    pub fn new(
        resistances: Resistances,
        reactance: ReactanceSpec,
        env: ThermalEnvironment,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        Ok(Self {
            resistances: resistances.validate()?,
            reactance: reactance.validate()?,
            env,
            constants,
        })
    }

    /// Purely resistive feedback, all lines at 0 K.
    pub fn resistive(
        r_l: f64,
        r_r: f64,
        r_f: f64,
        r_0: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        Self::new(
            Resistances { r_l, r_r, r_f, r_0 },
            ReactanceSpec::None,
            ThermalEnvironment::vacuum(),
            constants,
        )
    }

    pub fn with_resistances(self, resistances: Resistances) -> Result<Self> {
        Self::new(resistances, self.reactance, self.env, self.constants)
    }

    pub fn with_reactance(self, reactance: ReactanceSpec) -> Result<Self> {
        Self::new(self.resistances, reactance, self.env, self.constants)
    }

    pub fn with_env(self, env: ThermalEnvironment) -> Self {
        Self { env, ..self }
    }

    pub fn with_constants(self, constants: PhysicalConstants) -> Self {
        Self { constants, ..self }
    }

    pub fn resistances(&self) -> &Resistances {
        &self.resistances
    }

    pub fn r_l(&self) -> f64 {
        self.resistances.r_l
    }

    pub fn r_r(&self) -> f64 {
        self.resistances.r_r
    }

    pub fn r_f(&self) -> f64 {
        self.resistances.r_f
    }

    pub fn r_0(&self) -> f64 {
        self.resistances.r_0
    }

    pub fn reactance(&self) -> &ReactanceSpec {
        &self.reactance
    }

    pub fn env(&self) -> &ThermalEnvironment {
        &self.env
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
}

/// The three physical output fields at one frequency, each expressed over the
/// five input ports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringRelation {
    pub omega: AngularFrequency,
    pub out_l: FieldExpr,
    pub out_r: FieldExpr,
    pub out_f: FieldExpr,
}

impl ScatteringRelation {
    /// Output rows in (l, r, f) order.
    pub fn rows(&self) -> [&FieldExpr; 3] {
        [&self.out_l, &self.out_r, &self.out_f]
    }
}

/// `Z_f(omega) = R_f + i X(omega)`.
pub fn feedback_impedance(params: &DeviceParams, omega: AngularFrequency) -> Complex64 {
    Complex64::new(params.r_f(), params.reactance.reactance(omega))
}

/// Voltage and current noise generators `(U, I)` of the amplifier.
///
/// `U = sqrt(hbar w R_0 / 2) (a - b^dagger)` and
/// `I = sqrt(hbar w / 2 R_0) (a + b^dagger)`, so that `[U, I^dagger] = hbar w`
/// while `U` and `I` each commute with their own adjoint.
pub fn noise_generators(params: &DeviceParams, omega: AngularFrequency) -> (FieldExpr, FieldExpr) {
    let hw = params.constants.hbar * omega.get();
    let su = (hw * params.r_0() / 2.0).sqrt();
    let si = (hw / (2.0 * params.r_0())).sqrt();

    let mut u = FieldExpr::zero(omega);
    u.set_u(PortId::NoiseA, Complex64::new(su, 0.0));
    u.set_v(PortId::NoiseB, Complex64::new(-su, 0.0));

    let mut i = FieldExpr::zero(omega);
    i.set_u(PortId::NoiseA, Complex64::new(si, 0.0));
    i.set_v(PortId::NoiseB, Complex64::new(si, 0.0));
    (u, i)
}

/// Closed-form input-output relations for the three physical outputs.
pub fn scattering_transcribed(params: &DeviceParams, omega: AngularFrequency) -> ScatteringRelation {
    transcribe(params, omega, feedback_impedance(params, omega))
}

// Takes Z_f explicitly so tests can break Re Z_f == R_f.
fn transcribe(params: &DeviceParams, omega: AngularFrequency, z_f: Complex64) -> ScatteringRelation {
    let Resistances { r_l, r_r, r_f, r_0 } = params.resistances;
    let re = |x: f64| Complex64::new(x, 0.0);
    let one = re(1.0);

    let mut out_l = FieldExpr::zero(omega);
    let g = (r_0 / r_l).sqrt();
    out_l.set_u(PortId::SignalL, -one);
    out_l.set_u(PortId::NoiseA, re(g));
    out_l.set_v(PortId::NoiseB, re(-g));

    let mut out_r = FieldExpr::zero(omega);
    let h = (r_0 / r_r).sqrt();
    out_r.set_u(PortId::ReadoutR, -one);
    out_r.set_u(PortId::SignalL, -2.0 * z_f / (r_r * r_l).sqrt());
    out_r.set_u(PortId::FeedbackF, re(-2.0 * (r_f / r_r).sqrt()));
    out_r.set_u(PortId::NoiseA, (one + z_f / r_l - z_f / r_0) * h);
    out_r.set_v(PortId::NoiseB, -(one + z_f / r_l + z_f / r_0) * h);

    let mut out_f = FieldExpr::zero(omega);
    let sq0 = r_0.sqrt();
    out_f.set_u(PortId::FeedbackF, one);
    out_f.set_u(PortId::SignalL, re(2.0 * (r_f / r_l).sqrt()));
    out_f.set_u(PortId::NoiseA, re(r_f.sqrt() * (1.0 / sq0 - sq0 / r_l)));
    out_f.set_v(PortId::NoiseB, re(r_f.sqrt() * (1.0 / sq0 + sq0 / r_l)));

    ScatteringRelation {
        omega,
        out_l,
        out_r,
        out_f,
    }
}

/// Outward fields obtained by solving the circuit equations
///
/// ```text
/// U = U_l = U_r + U_f + (Z_f - R_f) I_f
/// I = I_l + I_f
/// ```
///
/// with `U_p = k sqrt(R_p) (p_out + p_in)`, `I_p = k / sqrt(R_p) (p_out - p_in)`
/// and `k = sqrt(hbar w / 2)`. The signal-port equation fixes `l_out`
/// directly; the remaining 2x2 system in `(f_out, r_out)` is eliminated
/// exactly with Cramer's rule.
pub fn scattering_solved(
    params: &DeviceParams,
    omega: AngularFrequency,
) -> Result<ScatteringRelation> {
    let Resistances { r_l, r_r, r_f, .. } = params.resistances;
    let (u_gen, i_gen) = noise_generators(params, omega);
    let z_f = feedback_impedance(params, omega);
    let k = (params.constants.hbar * omega.get() / 2.0).sqrt();

    let l_in = FieldExpr::annihilation(PortId::SignalL, omega);
    let r_in = FieldExpr::annihilation(PortId::ReadoutR, omega);
    let f_in = FieldExpr::annihilation(PortId::FeedbackF, omega);

    // U_l = U
    let out_l = u_gen.scale_real(1.0 / (k * r_l.sqrt())).try_sub(&l_in)?;
    let i_l = out_l.try_sub(&l_in)?.scale_real(k / r_l.sqrt());

    // Row 1: (k/sqrt R_f) f_out                = I - I_l + (k/sqrt R_f) f_in
    // Row 2: m21 f_out + (k sqrt R_r) r_out    = U - k sqrt R_r r_in
    //                                            - k sqrt R_f f_in + (Z_f - R_f)(k/sqrt R_f) f_in
    let reactive = z_f - r_f;
    let m11 = Complex64::new(k / r_f.sqrt(), 0.0);
    let m12 = Complex64::new(0.0, 0.0);
    let m21 = Complex64::new(k * r_f.sqrt(), 0.0) + reactive * (k / r_f.sqrt());
    let m22 = Complex64::new(k * r_r.sqrt(), 0.0);

    let b1 = i_gen.try_sub(&i_l)?.try_add(&f_in.scale(m11))?;
    let b2 = u_gen
        .try_sub(&r_in.scale_real(k * r_r.sqrt()))?
        .try_sub(&f_in.scale_real(k * r_f.sqrt()))?
        .try_add(&f_in.scale(reactive * (k / r_f.sqrt())))?;

    let det = m11 * m22 - m12 * m21;
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::SingularCircuit(omega.get()));
    }
    let out_f = b1.scale(m22).try_sub(&b2.scale(m12))?.scale(det.inv());
    let out_r = b2.scale(m11).try_sub(&b1.scale(m21))?.scale(det.inv());

    Ok(ScatteringRelation {
        omega,
        out_l,
        out_r,
        out_f,
    })
}

/// Commutator defects of the physical output rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorDefects {
    /// `max |[o_i, o_j^dagger] - delta_ij|` and `max |[o_i, o_j]|`.
    pub absolute: f64,
    /// The same defects, each divided by `max(1, |o_i| |o_j|)` where `|o|` is
    /// the Euclidean norm of the coefficient vector.
    pub relative: f64,
}

pub fn commutator_defects(rel: &ScatteringRelation) -> CommutatorDefects {
    let rows = rel.rows();
    let mut absolute = 0.0f64;
    let mut relative = 0.0f64;
    for (i, x) in rows.iter().enumerate() {
        for (j, y) in rows.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            // Rows always share the relation's frequency.
            let c_adj = commutator(x, &y.adjoint()).expect("rows share omega");
            let c_plain = commutator(x, y).expect("rows share omega");
            let defect = (c_adj - delta).norm().max(c_plain.norm());
            let scale = (x.coefficient_norm() * y.coefficient_norm()).max(1.0);
            absolute = absolute.max(defect);
            relative = relative.max(defect / scale);
        }
    }
    CommutatorDefects { absolute, relative }
}

/// Largest violation of the free-field commutation relations among the
/// outputs `l_out`, `r_out`, `f_out`.
///
/// Each defect is measured relative to the size of the rows involved (see
/// [`CommutatorDefects::relative`]); for rows of order one this is the plain
/// absolute defect. Rows with large gain carry cancellations of order
/// `|Z_f|^2 / (R_r R_l)`, so only the scaled defect is meaningful at
/// double precision.
pub fn verify_bogoliubov(rel: &ScatteringRelation) -> f64 {
    commutator_defects(rel).relative
}

/// Largest coefficient difference between two relations, each row scaled by
/// its largest coefficient.
pub fn relation_deviation(a: &ScatteringRelation, b: &ScatteringRelation) -> f64 {
    a.rows()
        .iter()
        .zip(b.rows())
        .map(|(x, y)| {
            let scale = x.max_abs_coefficient().max(y.max_abs_coefficient()).max(1.0);
            let diff = x.try_sub(y).expect("same omega").max_abs_coefficient();
            diff / scale
        })
        .fold(0.0, f64::max)
}
