//! The three-species regulatory network: A inhibited by B and produced in
//! one subdomain, B activated by A and inhibited by C everywhere, C
//! activated by A in another subdomain. All species degrade linearly.

use thiserror::Error;

use crate::geometry::SubdomainId;

#[derive(Debug, Error, PartialEq)]
pub enum KineticsError {
    #[error("unknown subdomain label `{0}`")]
    UnknownLabel(SubdomainId),
    #[error("production region `{0}` is not a subdomain of the geometry")]
    UnknownRegion(SubdomainId),
    #[error("parameter {0} must be {1}")]
    InvalidParameter(&'static str, &'static str),
}

/// Characteristic time in seconds.
pub const CHARACTERISTIC_TIME: f64 = 3600.0;
/// Characteristic length in micrometres.
pub const CHARACTERISTIC_LENGTH: f64 = 150.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillParams {
    pub k_ba: f64,
    pub k_ab: f64,
    pub k_cb: f64,
    pub k_ac: f64,
}

impl Default for HillParams {
    fn default() -> Self {
        Self {
            k_ba: 0.2,
            k_ab: 0.125,
            k_cb: 0.5,
            k_ac: 0.025,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    pub rho_a: f64,
    pub rho_b: f64,
    pub rho_c: f64,
    pub d_a: f64,
    pub d_b: f64,
    pub d_c: f64,
    /// Shared diffusion constant.
    pub diffusion: f64,
    /// Optional per-species overrides of `diffusion`, in A, B, C order.
    pub diffusion_override: [Option<f64>; 3],
}

impl Default for RateParams {
    fn default() -> Self {
        let t = CHARACTERISTIC_TIME;
        let rho_a = 1e-4 * t;
        Self {
            rho_a,
            rho_b: 50.0 * rho_a,
            rho_c: 200.0 * rho_a,
            d_a: 1e-6 * t,
            d_b: 1e-6 * t,
            d_c: 1e-6 * t,
            diffusion: t,
            diffusion_override: [None; 3],
        }
    }
}

impl RateParams {
    pub fn diffusion_of(&self, species: usize) -> f64 {
        self.diffusion_override[species].unwrap_or(self.diffusion)
    }

    pub fn degradation(&self) -> [f64; 3] {
        [self.d_a, self.d_b, self.d_c]
    }

    /// No production and no degradation.
    pub fn inert(diffusion: f64) -> Self {
        Self {
            rho_a: 0.0,
            rho_b: 0.0,
            rho_c: 0.0,
            d_a: 0.0,
            d_b: 0.0,
            d_c: 0.0,
            diffusion,
            diffusion_override: [None; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticParams {
    pub rates: RateParams,
    pub hill: HillParams,
    /// Characteristic scales, carried for reporting.
    pub time_scale: f64,
    pub length_scale: f64,
}

impl Default for KineticParams {
    fn default() -> Self {
        Self {
            rates: RateParams::default(),
            hill: HillParams::default(),
            time_scale: CHARACTERISTIC_TIME,
            length_scale: CHARACTERISTIC_LENGTH,
        }
    }
}

impl KineticParams {
    pub fn validate(&self) -> Result<(), KineticsError> {
        let h = &self.hill;
        for (name, v) in [
            ("K_BA", h.k_ba),
            ("K_AB", h.k_ab),
            ("K_CB", h.k_cb),
            ("K_AC", h.k_ac),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KineticsError::InvalidParameter(name, "positive"));
            }
        }
        let r = &self.rates;
        for (name, v) in [
            ("rho_A", r.rho_a),
            ("rho_B", r.rho_b),
            ("rho_C", r.rho_c),
            ("d_A", r.d_a),
            ("d_B", r.d_b),
            ("d_C", r.d_c),
            ("D", r.diffusion),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(KineticsError::InvalidParameter(name, "nonnegative"));
            }
        }
        for v in r.diffusion_override.iter().flatten() {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(KineticsError::InvalidParameter("D_i", "nonnegative"));
            }
        }
        Ok(())
    }
}

/// `x² / (K² + x²)`; negative `x` is treated as 0.
pub fn hill_act(x: f64, k: f64) -> f64 {
    let x = x.max(0.0);
    let x2 = x * x;
    x2 / (k * k + x2)
}

/// `K² / (K² + x²)`; negative `x` is treated as 0.
pub fn hill_inh(x: f64, k: f64) -> f64 {
    let x = x.max(0.0);
    let k2 = k * k;
    k2 / (k2 + x * x)
}

/// Which production indicators are on for one subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Indicators {
    pub produces_a: bool,
    pub produces_c: bool,
}

/// Production terms only (no degradation).
pub fn production(a: f64, b: f64, c: f64, ind: Indicators, p: &KineticParams) -> [f64; 3] {
    let r = &p.rates;
    let h = &p.hill;
    let pa = if ind.produces_a {
        r.rho_a * hill_inh(b, h.k_ba)
    } else {
        0.0
    };
    let pb = r.rho_b * hill_act(a, h.k_ab) * hill_inh(c, h.k_cb);
    let pc = if ind.produces_c {
        r.rho_c * hill_act(a, h.k_ac)
    } else {
        0.0
    };
    [pa, pb, pc]
}

/// The network bound to a set of subdomain labels.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub params: KineticParams,
    /// A is produced here.
    pub a_region: SubdomainId,
    /// C is produced here.
    pub c_region: SubdomainId,
    /// A starts at 1 here, 0 elsewhere; B and C start at 0.
    pub initial_a_region: SubdomainId,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            params: KineticParams::default(),
            a_region: SubdomainId::from("domain1"),
            c_region: SubdomainId::from("domain3"),
            initial_a_region: SubdomainId::from("domain3"),
        }
    }
}

impl NetworkSpec {
    pub fn with_params(params: KineticParams) -> Self {
        Self {
            params,
            ..Self::default()
        }
    }

    pub fn resolve(&self, labels: &[SubdomainId]) -> Result<ResolvedNetwork, KineticsError> {
        self.params.validate()?;
        for region in [&self.a_region, &self.c_region, &self.initial_a_region] {
            if !labels.contains(region) {
                return Err(KineticsError::UnknownRegion(region.clone()));
            }
        }
        Ok(ResolvedNetwork {
            params: self.params.clone(),
            labels: labels.to_vec(),
            indicators: labels
                .iter()
                .map(|l| Indicators {
                    produces_a: l == &self.a_region,
                    produces_c: l == &self.c_region,
                })
                .collect(),
            initial_a: labels.iter().map(|l| l == &self.initial_a_region).collect(),
        })
    }
}

/// A network whose production regions are mapped to label indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedNetwork {
    pub params: KineticParams,
    pub labels: Vec<SubdomainId>,
    pub indicators: Vec<Indicators>,
    pub initial_a: Vec<bool>,
}

impl ResolvedNetwork {
    fn indicators_of(&self, label: &SubdomainId) -> Result<Indicators, KineticsError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.indicators[i])
            .ok_or_else(|| KineticsError::UnknownLabel(label.clone()))
    }

    /// Full reaction terms `R_A, R_B, R_C`.
    pub fn reaction_rates(
        &self,
        a: f64,
        b: f64,
        c: f64,
        label: &SubdomainId,
    ) -> Result<[f64; 3], KineticsError> {
        let p = self.effective_production(a, b, c, label)?;
        let d = self.params.rates.degradation();
        Ok([p[0] - d[0] * a, p[1] - d[1] * b, p[2] - d[2] * c])
    }

    pub fn effective_production(
        &self,
        a: f64,
        b: f64,
        c: f64,
        label: &SubdomainId,
    ) -> Result<[f64; 3], KineticsError> {
        Ok(production(
            a,
            b,
            c,
            self.indicators_of(label)?,
            &self.params,
        ))
    }

    pub fn production_at(&self, label_index: usize, a: f64, b: f64, c: f64) -> [f64; 3] {
        production(a, b, c, self.indicators[label_index], &self.params)
    }

    pub fn has_production(&self) -> bool {
        let r = &self.params.rates;
        r.rho_a != 0.0 || r.rho_b != 0.0 || r.rho_c != 0.0
    }
}
