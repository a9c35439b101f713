//! Physical parameters, validation and unit normalization.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Vacuum permittivity in F/m.
pub const EPSILON0_SI: f64 = 8.854_187_812_8e-12;

/// Tolerance for the redundant `delta == omega_l - omega_a` check, relative to
/// the largest of the three magnitudes.
const DETUNING_RTOL: f64 = 4.0 * f64::EPSILON;

/// Photon reservoir seen by the atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Reservoir {
    /// Flat Markovian continuum with decay rate `gamma`.
    FreeSpace { gamma: f64 },
    /// Anisotropic band edge at `omega_c` with coupling scale `beta`.
    BandEdge { beta: f64, omega_c: f64 },
}

impl Reservoir {
    pub fn free_space(gamma: f64) -> Result<Self> {
        let r = Reservoir::FreeSpace { gamma };
        r.validate()?;
        Ok(r)
    }

    pub fn band_edge(beta: f64, omega_c: f64) -> Result<Self> {
        let r = Reservoir::BandEdge { beta, omega_c };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Reservoir::FreeSpace { gamma } => positive("gamma", gamma),
            Reservoir::BandEdge { beta, omega_c } => {
                positive("beta", beta)?;
                positive("omega_c", omega_c)
            }
        }
    }

    /// The natural frequency unit: `beta` or `gamma`.
    pub fn scale(&self) -> f64 {
        match *self {
            Reservoir::FreeSpace { gamma } => gamma,
            Reservoir::BandEdge { beta, .. } => beta,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Reservoir::FreeSpace { .. } => "free-space",
            Reservoir::BandEdge { .. } => "band-edge",
        }
    }

    pub fn is_band_edge(&self) -> bool {
        matches!(self, Reservoir::BandEdge { .. })
    }

    fn rescaled(&self, s: f64) -> Self {
        match *self {
            Reservoir::FreeSpace { gamma } => Reservoir::FreeSpace { gamma: gamma / s },
            Reservoir::BandEdge { beta, omega_c } => Reservoir::BandEdge {
                beta: beta / s,
                omega_c: omega_c / s,
            },
        }
    }
}

/// Atom, drive and reservoir frequencies.
///
/// Immutable once built; every constructor validates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRecord", into = "ParamsRecord")]
pub struct PhysicalParams {
    omega_a: f64,
    omega_l: f64,
    delta: f64,
    rabi: f64,
    reservoir: Reservoir,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsRecord {
    omega_a: f64,
    omega_l: f64,
    delta: f64,
    rabi: f64,
    reservoir: Reservoir,
}

impl TryFrom<ParamsRecord> for PhysicalParams {
    type Error = Error;
    fn try_from(r: ParamsRecord) -> Result<Self> {
        PhysicalParams::new(r.omega_a, r.omega_l, r.delta, r.rabi, r.reservoir)
    }
}

impl From<PhysicalParams> for ParamsRecord {
    fn from(p: PhysicalParams) -> Self {
        ParamsRecord {
            omega_a: p.omega_a,
            omega_l: p.omega_l,
            delta: p.delta,
            rabi: p.rabi,
            reservoir: p.reservoir,
        }
    }
}

impl PhysicalParams {
    /// Full constructor; `delta` must equal `omega_l - omega_a`.
    pub fn new(
        omega_a: f64,
        omega_l: f64,
        delta: f64,
        rabi: f64,
        reservoir: Reservoir,
    ) -> Result<Self> {
        finite("omega_a", omega_a)?;
        finite("omega_l", omega_l)?;
        finite("delta", delta)?;
        finite("rabi", rabi)?;
        if rabi < 0.0 {
            return Err(Error::param("rabi", format!("must be >= 0, got {rabi}")));
        }
        let expected = omega_l - omega_a;
        let tol = DETUNING_RTOL * omega_a.abs().max(omega_l.abs()).max(delta.abs());
        if (delta - expected).abs() > tol {
            return Err(Error::param(
                "delta",
                format!("{delta} disagrees with omega_l - omega_a = {expected}"),
            ));
        }
        reservoir.validate()?;
        Ok(PhysicalParams {
            omega_a,
            omega_l,
            delta,
            rabi,
            reservoir,
        })
    }

    /// Drive at `omega_a + delta`.
    pub fn detuned(omega_a: f64, delta: f64, rabi: f64, reservoir: Reservoir) -> Result<Self> {
        finite("omega_a", omega_a)?;
        finite("delta", delta)?;
        PhysicalParams::new(omega_a, omega_a + delta, delta, rabi, reservoir)
    }

    pub fn resonant(omega_a: f64, rabi: f64, reservoir: Reservoir) -> Result<Self> {
        PhysicalParams::detuned(omega_a, 0.0, rabi, reservoir)
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }
    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn rabi(&self) -> f64 {
        self.rabi
    }
    pub fn reservoir(&self) -> Reservoir {
        self.reservoir
    }

    pub fn with_rabi(&self, rabi: f64) -> Result<Self> {
        PhysicalParams::detuned(self.omega_a, self.delta, rabi, self.reservoir)
    }

    /// Moves the transition frequency, keeping the detuning fixed.
    pub fn with_omega_a(&self, omega_a: f64) -> Result<Self> {
        PhysicalParams::detuned(omega_a, self.delta, self.rabi, self.reservoir)
    }

    pub fn with_reservoir(&self, reservoir: Reservoir) -> Result<Self> {
        PhysicalParams::detuned(self.omega_a, self.delta, self.rabi, reservoir)
    }

    /// Divides every frequency by `s`.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        positive("scale", s)?;
        PhysicalParams::new(
            self.omega_a / s,
            self.omega_l / s,
            self.delta / s,
            self.rabi / s,
            self.reservoir.rescaled(s),
        )
    }

    pub fn unit(&self) -> FrequencyUnit {
        FrequencyUnit::of(&self.reservoir)
    }
}

/// Which reservoir constant sets the frequency unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitReference {
    Beta,
    Gamma,
}

/// Frequency unit of a result: one unit equals `1 / scale` times the reference
/// constant. After [`normalize`] the scale is 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyUnit {
    pub reference: UnitReference,
    pub scale: f64,
}

impl FrequencyUnit {
    pub fn of(reservoir: &Reservoir) -> Self {
        let reference = match reservoir {
            Reservoir::FreeSpace { .. } => UnitReference::Gamma,
            Reservoir::BandEdge { .. } => UnitReference::Beta,
        };
        FrequencyUnit {
            reference,
            scale: reservoir.scale(),
        }
    }
}

impl fmt::Display for FrequencyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.reference {
            UnitReference::Beta => "beta",
            UnitReference::Gamma => "gamma",
        };
        if self.scale == 1.0 {
            write!(f, "{name}")
        } else {
            write!(f, "{} {name}", 1.0 / self.scale)
        }
    }
}

/// Output of [`normalize`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    pub params: PhysicalParams,
    /// Factor every frequency was divided by.
    pub scale: f64,
    pub unit: FrequencyUnit,
}

/// Rescales so that `beta = 1` (band edge) or `gamma = 1` (free space).
pub fn normalize(params: &PhysicalParams) -> Normalized {
    let scale = params.reservoir.scale();
    let params = if scale == 1.0 {
        *params
    } else {
        params
            .rescaled(scale)
            .expect("rescaling valid parameters by their positive scale")
    };
    Normalized {
        params,
        scale,
        unit: params.unit(),
    }
}

/// Microscopic constants that fix the coupling scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawCouplingConstants {
    pub dipole_moment: f64,
    /// Curvature constant of the anisotropic dispersion.
    pub model_constant: f64,
    pub eta: f64,
    pub omega_a: f64,
    pub hbar: f64,
    pub epsilon0: f64,
}

impl RawCouplingConstants {
    /// SI values of the fundamental constants.
    pub fn si(dipole_moment: f64, model_constant: f64, eta: f64, omega_a: f64) -> Self {
        RawCouplingConstants {
            dipole_moment,
            model_constant,
            eta,
            omega_a,
            hbar: HBAR_SI,
            epsilon0: EPSILON0_SI,
        }
    }
}

/// beta = (omega_a^2 d^2 eta / (6 hbar eps0 pi A^{3/2}))^{2/3}
pub fn compute_beta(raw: &RawCouplingConstants) -> Result<f64> {
    positive("dipole_moment", raw.dipole_moment)?;
    positive("model_constant", raw.model_constant)?;
    positive("eta", raw.eta)?;
    positive("omega_a", raw.omega_a)?;
    positive("hbar", raw.hbar)?;
    positive("epsilon0", raw.epsilon0)?;
    let beta32 = raw.omega_a.powi(2) * raw.dipole_moment.powi(2) * raw.eta
        / (6.0 * raw.hbar * raw.epsilon0 * std::f64::consts::PI * raw.model_constant.powf(1.5));
    let beta = beta32.powf(2.0 / 3.0);
    positive("beta", beta)?;
    Ok(beta)
}

fn finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {x}")))
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    finite(name, x)?;
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be > 0, got {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_from_unit_constants() {
        let raw = RawCouplingConstants {
            dipole_moment: 1.0,
            model_constant: 1.0,
            eta: 1.0,
            omega_a: 1.0,
            hbar: 1.0,
            epsilon0: 1.0,
        };
        let beta = compute_beta(&raw).unwrap();
        let expected = (1.0 / (6.0 * std::f64::consts::PI)).powf(2.0 / 3.0);
        assert!((beta - expected).abs() < 1e-15);
        assert!((beta - 0.141_188_476_272_903).abs() < 1e-14);
    }

    #[test]
    fn beta_rejects_zero_coupling() {
        let raw = RawCouplingConstants::si(1e-29, 1.0, 0.0, 1e15);
        assert!(matches!(
            compute_beta(&raw),
            Err(Error::InvalidParameter { name: "eta", .. })
        ));
    }

    #[test]
    fn beta_dipole_homogeneity() {
        let a = RawCouplingConstants::si(1e-29, 2e-3, 0.3, 2e15);
        let b = RawCouplingConstants {
            dipole_moment: 2e-29,
            ..a
        };
        let ratio = compute_beta(&b).unwrap() / compute_beta(&a).unwrap();
        assert!((ratio - 4f64.powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn normalize_band_edge() {
        let p = PhysicalParams::resonant(220.0, 0.5, Reservoir::band_edge(2.0, 200.0).unwrap())
            .unwrap();
        let n = normalize(&p);
        assert_eq!(n.scale, 2.0);
        assert_eq!(
            n.params.reservoir(),
            Reservoir::BandEdge {
                beta: 1.0,
                omega_c: 100.0
            }
        );
        assert_eq!(n.params.omega_a(), 110.0);
        assert_eq!(n.params.rabi(), 0.25);
        assert_eq!(n.unit.to_string(), "beta");
    }

    #[test]
    fn normalize_free_space() {
        let p = PhysicalParams::resonant(0.0, 50.0, Reservoir::free_space(5.0).unwrap()).unwrap();
        let n = normalize(&p);
        assert_eq!(n.scale, 5.0);
        assert_eq!(n.params.rabi(), 10.0);
        assert_eq!(n.params.reservoir(), Reservoir::FreeSpace { gamma: 1.0 });
    }

    #[test]
    fn normalize_identity_when_normalized() {
        let p = PhysicalParams::resonant(110.0, 0.3, Reservoir::band_edge(1.0, 100.0).unwrap())
            .unwrap();
        let n = normalize(&p);
        assert_eq!(n.params, p);
        assert_eq!(n.scale, 1.0);
    }

    #[test]
    fn inconsistent_detuning_fails() {
        let r = Reservoir::free_space(1.0).unwrap();
        assert!(PhysicalParams::new(10.0, 11.0, 1.0, 1.0, r).is_ok());
        let err = PhysicalParams::new(10.0, 11.0, 0.5, 1.0, r).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "delta", .. }));
    }

    #[test]
    fn rejects_bad_values() {
        let r = Reservoir::free_space(1.0).unwrap();
        assert!(PhysicalParams::resonant(0.0, -1.0, r).is_err());
        assert!(PhysicalParams::resonant(f64::NAN, 1.0, r).is_err());
        assert!(Reservoir::band_edge(0.0, 100.0).is_err());
        assert!(Reservoir::band_edge(1.0, -1.0).is_err());
        assert!(Reservoir::free_space(f64::INFINITY).is_err());
    }

    #[test]
    fn record_round_trip_validates() {
        let p = PhysicalParams::detuned(3.0, 0.5, 2.0, Reservoir::free_space(1.0).unwrap()).unwrap();
        let rec: ParamsRecord = p.into();
        assert_eq!(PhysicalParams::try_from(rec).unwrap(), p);
        let bad = ParamsRecord { delta: 0.4, ..rec };
        assert!(PhysicalParams::try_from(bad).is_err());
    }
}
