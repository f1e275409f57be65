use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for comparing alpha against the critical powers.
pub const ALPHA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }

    pub fn from_value(x: f64) -> Result<Self> {
        if x == 1.0 {
            Ok(Sign::Focusing)
        } else if x == -1.0 {
            Ok(Sign::Defocusing)
        } else {
            Err(Error::InvalidParameter(format!(
                "lambda must be +1 or -1, got {x}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub dim: u32,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub lambda: Sign,
}

impl ModelParams {
    pub fn new(dim: u32, a: f64, b: f64, alpha: f64, lambda: Sign) -> Result<Self> {
        let p = ModelParams {
            dim,
            a,
            b,
            alpha,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn focusing(dim: u32, a: f64, b: f64, alpha: f64) -> Result<Self> {
        Self::new(dim, a, b, alpha, Sign::Focusing)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be >= 3, got {}",
                self.dim
            )));
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "b must be >= 0, got {}",
                self.b
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        let floor = hardy_floor(self.dim);
        if self.a <= floor {
            return Err(Error::HardyViolation { a: self.a, floor });
        }
        Ok(())
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn lambda_value(&self) -> f64 {
        self.lambda.value()
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn mass_critical_alpha(&self) -> f64 {
        (4.0 - 2.0 * self.b) / self.n()
    }

    pub fn energy_critical_alpha(&self) -> f64 {
        (4.0 - 2.0 * self.b) / (self.n() - 2.0)
    }

    /// 4 - 2b - alpha (N - 2); positive exactly in the energy-subcritical range.
    pub fn pohozaev_a(&self) -> f64 {
        4.0 - 2.0 * self.b - self.alpha * (self.n() - 2.0)
    }

    /// N alpha + 2b.
    pub fn pohozaev_b(&self) -> f64 {
        self.n() * self.alpha + 2.0 * self.b
    }
}

pub fn hardy_floor(dim: u32) -> f64 {
    let m = dim as f64 - 2.0;
    -m * m / 4.0
}

/// Indicial exponent: regular solutions of `L_a u = 0` behave like `r^{-rho}` at the origin.
pub fn rho(dim: u32, a: f64) -> f64 {
    let m = dim as f64 - 2.0;
    (m - (m * m + 4.0 * a).sqrt()) / 2.0
}

pub fn nu(dim: u32, a: f64) -> f64 {
    let m = dim as f64 - 2.0;
    (m * m / 4.0 + a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    MassSubcritical,
    MassCritical,
    Intercritical,
    EnergyCritical,
    EnergySupercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedIndices {
    pub s_c: f64,
    pub rho: f64,
    pub nu: f64,
    pub regime: Regime,
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= ALPHA_TOL * x.abs().max(y.abs()).max(1.0)
}

fn lt(x: f64, y: f64) -> bool {
    x < y && !close(x, y)
}

fn le(x: f64, y: f64) -> bool {
    x < y || close(x, y)
}

pub fn classify_regime(p: &ModelParams) -> Regime {
    let mc = p.mass_critical_alpha();
    let ec = p.energy_critical_alpha();
    if close(p.alpha, mc) {
        Regime::MassCritical
    } else if close(p.alpha, ec) {
        Regime::EnergyCritical
    } else if p.alpha < mc {
        Regime::MassSubcritical
    } else if p.alpha < ec {
        Regime::Intercritical
    } else {
        Regime::EnergySupercritical
    }
}

pub fn derive_indices(p: &ModelParams) -> Result<DerivedIndices> {
    p.validate()?;
    Ok(DerivedIndices {
        s_c: p.n() / 2.0 - (2.0 - p.b) / p.alpha,
        rho: rho(p.dim, p.a),
        nu: nu(p.dim, p.a),
        regime: classify_regime(p),
    })
}

/// One named inequality inside a hypothesis set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisSet {
    pub name: &'static str,
    pub conditions: Vec<Condition>,
}

impl HypothesisSet {
    fn new(name: &'static str) -> Self {
        HypothesisSet {
            name,
            conditions: Vec::new(),
        }
    }

    fn req(mut self, name: impl Into<String>, holds: bool) -> Self {
        self.conditions.push(Condition {
            name: name.into(),
            holds,
        });
        self
    }

    pub fn holds(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.name.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub suzuki_lwp: bool,
    pub kato_lwp_case1: bool,
    pub kato_lwp_case2: bool,
    pub corollary_i: bool,
    pub corollary_ii: bool,
    pub gwp_radial: bool,
    pub gwp_n3_i: bool,
    pub gwp_n3_ii: bool,
    pub gwp_n3_iii: bool,
    pub gwp_nonradial_case1: bool,
    pub gwp_nonradial_case2: bool,
    /// Lower bound on `a` shared by the kato_lwp_case2, corollary_i and gwp_nonradial_case2 sets.
    pub kato_a_threshold: f64,
    pub sets: Vec<HypothesisSet>,
}

impl HypothesisReport {
    pub fn set(&self, name: &str) -> Option<&HypothesisSet> {
        self.sets.iter().find(|s| s.name == name)
    }
}

/// `-(N-2)^2/4 + ((alpha(N-2) - (2-2b)) / (2(alpha+1)))^2`.
pub fn kato_a_threshold(p: &ModelParams) -> f64 {
    let n = p.n();
    let t = (p.alpha * (n - 2.0) - (2.0 - 2.0 * p.b)) / (2.0 * (p.alpha + 1.0));
    hardy_floor(p.dim) + t * t
}

pub fn check_hypotheses(p: &ModelParams) -> HypothesisReport {
    let n = p.n();
    let (a, b, al) = (p.a, p.b, p.alpha);
    let hardy = hardy_floor(p.dim);
    let ec = p.energy_critical_alpha();
    let mc = p.mass_critical_alpha();
    let kt = kato_a_threshold(p);
    let n3 = p.dim == 3;

    let suzuki = HypothesisSet::new("suzuki_lwp")
        .req("N >= 3", p.dim >= 3)
        .req("0 < alpha < (4-2b)/(N-2)", al > 0.0 && lt(al, ec))
        .req("a > -(N-2)^2/4", a > hardy)
        .req("0 < b < 2", b > 0.0 && b < 2.0);

    let kato1 = HypothesisSet::new("kato_lwp_case1")
        .req("0 <= b < min{N/2, 2}", b >= 0.0 && b < (n / 2.0).min(2.0))
        .req("0 <= b < 1", b < 1.0)
        .req(
            "(2-2b)/N < alpha <= (2-2b)/(N-2)",
            lt((2.0 - 2.0 * b) / n, al) && le(al, (2.0 - 2.0 * b) / (n - 2.0)),
        )
        .req("a > -(N-2)^2/4", a > hardy);

    let kato2 = HypothesisSet::new("kato_lwp_case2")
        .req("0 <= b < min{N/2, 2}", b >= 0.0 && b < (n / 2.0).min(2.0))
        .req(
            "max{0, (2-2b)/(N-2)} < alpha < (4-2b)/(N-2)",
            lt(((2.0 - 2.0 * b) / (n - 2.0)).max(0.0), al) && lt(al, ec),
        )
        .req(
            "a > -(N-2)^2/4 + ((alpha(N-2)-(2-2b))/(2(alpha+1)))^2",
            a > kt,
        );

    let cor1 = HypothesisSet::new("corollary_i")
        .req("1 <= b < min{N/2, 4}", b >= 1.0 && b < (n / 2.0).min(4.0))
        .req("0 < alpha < (4-2b)/(N-2)", lt(al, ec))
        .req(
            "a > -(N-2)^2/4 + ((alpha(N-2)-(2-2b))/(2(alpha+1)))^2",
            a > kt,
        );

    let cor2 = HypothesisSet::new("corollary_ii")
        .req("N = 3", n3)
        .req("alpha = 2", close(al, 2.0))
        .req("0 < b < 1", b > 0.0 && b < 1.0)
        .req("a > -1/4 + b^2/9", a > -0.25 + b * b / 9.0);

    // The printed b-range min{0, N/2} is empty; min{2, N/2} is used instead.
    let radial = HypothesisSet::new("gwp_radial")
        .req("a > 0", a > 0.0)
        .req("0 < b < min{2, N/2}", b > 0.0 && b < (n / 2.0).min(2.0))
        .req("(4-2b)/N < alpha < (4-2b)/(N-2)", lt(mc, al) && lt(al, ec))
        .req("alpha < 3-2b if N = 3", !n3 || lt(al, 3.0 - 2.0 * b));

    let n3_base = |name: &'static str| {
        HypothesisSet::new(name)
            .req("N = 3", n3)
            .req("a > 0", a > 0.0)
            .req("0 < b < 3/2", b > 0.0 && b < 1.5)
    };
    let n3i = n3_base("gwp_n3_i").req(
        "max{1, (4-2b)/3} < alpha < 4-2b",
        lt(mc.max(1.0), al) && lt(al, 4.0 - 2.0 * b),
    );
    let n3ii = n3_base("gwp_n3_ii")
        .req(
            "(4-2b)/3 < alpha < 4-2b",
            lt(mc, al) && lt(al, 4.0 - 2.0 * b),
        )
        .req("0 < b < 1/2", b < 0.5);
    let n3iii = n3_base("gwp_n3_iii")
        .req(
            "3-2b <= alpha < 4-2b",
            le(3.0 - 2.0 * b, al) && lt(al, 4.0 - 2.0 * b),
        )
        .req("0 < b < 1", b < 1.0);

    let nr1 = HypothesisSet::new("gwp_nonradial_case1")
        .req("0 < b < (6-N)/2", b > 0.0 && b < (6.0 - n) / 2.0)
        .req("N = 3", n3)
        .req(
            "(4-2b)/3 < alpha <= 2-2b",
            lt((4.0 - 2.0 * b) / 3.0, al) && le(al, 2.0 - 2.0 * b),
        )
        .req("0 <= b < 1/2", b < 0.5)
        .req("a > -1/4", a > -0.25);
    let nr2 = HypothesisSet::new("gwp_nonradial_case2")
        .req("0 < b < (6-N)/2", b > 0.0 && b < (6.0 - n) / 2.0)
        .req("3 <= N <= 5", (3..=5).contains(&p.dim))
        .req(
            "max{(4-2b)/N, (2-2b)/(N-2), 1} < alpha < (4-2b)/(N-2)",
            lt(mc.max((2.0 - 2.0 * b) / (n - 2.0)).max(1.0), al) && lt(al, ec),
        )
        .req(
            "a > -(N-2)^2/4 + ((alpha(N-2)-(2-2b))/(2(alpha+1)))^2",
            a > kt,
        );

    let sets = vec![
        suzuki, kato1, kato2, cor1, cor2, radial, n3i, n3ii, n3iii, nr1, nr2,
    ];
    let h = |i: usize| sets[i].holds();
    HypothesisReport {
        suzuki_lwp: h(0),
        kato_lwp_case1: h(1),
        kato_lwp_case2: h(2),
        corollary_i: h(3),
        corollary_ii: h(4),
        gwp_radial: h(5),
        gwp_n3_i: h(6),
        gwp_n3_ii: h(7),
        gwp_n3_iii: h(8),
        gwp_nonradial_case1: h(9),
        gwp_nonradial_case2: h(10),
        kato_a_threshold: kt,
        sets,
    }
}

/// Hypotheses of the ground-state existence result: Hardy, `0 < alpha < (4-2b)/(N-2)`, `0 <= b < 2`.
pub fn ground_state_hypotheses(p: &ModelParams) -> Result<()> {
    p.validate()?;
    let mut bad = Vec::new();
    if !lt(p.alpha, p.energy_critical_alpha()) {
        bad.push(format!(
            "alpha = {} must be < (4-2b)/(N-2) = {}",
            p.alpha,
            p.energy_critical_alpha()
        ));
    }
    if p.b >= 2.0 {
        bad.push(format!("b = {} must be < 2", p.b));
    }
    if p.lambda != Sign::Focusing {
        bad.push("ground states exist for the focusing sign only".into());
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::HypothesisViolation(bad.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, a: f64, b: f64, al: f64) -> ModelParams {
        ModelParams::focusing(n, a, b, al).unwrap()
    }

    #[test]
    fn indices_examples() {
        let d = derive_indices(&p(3, 0.0, 0.0, 2.0)).unwrap();
        assert_eq!(d.s_c, 0.5);
        assert_eq!(d.rho, 0.0);
        assert_eq!(d.regime, Regime::Intercritical);

        let d = derive_indices(&p(3, 0.7, 1.0, 2.0 / 3.0)).unwrap();
        assert!(d.s_c.abs() < 1e-15);
        assert_eq!(d.regime, Regime::MassCritical);

        let d = derive_indices(&p(3, 2.0, 0.0, 1.0)).unwrap();
        assert!((d.rho + 1.0).abs() < 1e-15);
        assert!((d.nu - 1.5).abs() < 1e-15);
    }

    #[test]
    fn hardy_violation() {
        let e = ModelParams::focusing(3, -0.25, 0.0, 1.0).unwrap_err();
        assert!(matches!(e, Error::HardyViolation { .. }));
        assert!(ModelParams::focusing(5, -2.25, 0.0, 1.0).is_err());
        assert!(ModelParams::focusing(5, -2.2499, 0.0, 1.0).is_ok());
    }

    #[test]
    fn regime_boundaries() {
        assert_eq!(
            classify_regime(&p(4, 0.0, 1.0, 1.0)),
            Regime::EnergyCritical
        );
        assert_eq!(
            classify_regime(&p(4, 0.0, 1.0, 1.2)),
            Regime::EnergySupercritical
        );
        assert_eq!(
            classify_regime(&p(3, 0.0, 0.0, 1.0)),
            Regime::MassSubcritical
        );
        assert_eq!(
            classify_regime(&p(3, 0.0, 0.0, 4.0 / 3.0 + 1e-14)),
            Regime::MassCritical
        );
    }

    #[test]
    fn gwp_n3_i_example() {
        let r = check_hypotheses(&p(3, 0.0, 0.25, 2.0));
        // a = 0 fails a > 0, but the alpha window itself holds
        let set = r.set("gwp_n3_i").unwrap();
        assert_eq!(set.failing(), vec!["a > 0"]);
        let r = check_hypotheses(&p(3, 0.1, 0.25, 2.0));
        assert!(r.gwp_n3_i);
    }

    #[test]
    fn corollary_ii_boundary_is_strict() {
        let b = 0.25;
        let r = check_hypotheses(&p(3, -0.25 + b * b / 9.0, b, 2.0));
        assert!(!r.corollary_ii);
        let r = check_hypotheses(&p(3, -0.25 + b * b / 9.0 + 1e-9, b, 2.0));
        assert!(r.corollary_ii);
    }

    #[test]
    fn kato_case2_threshold_example() {
        let r = check_hypotheses(&p(4, 0.0, 1.0, 1.0));
        assert!((r.kato_a_threshold + 0.75).abs() < 1e-15);
        let set = r.set("kato_lwp_case2").unwrap();
        assert!(set.conditions[2].holds);
        // alpha = 1 sits at the energy-critical endpoint, which the alpha window excludes
        assert!(!set.conditions[1].holds);
        assert!(!r.kato_lwp_case2);
    }

    #[test]
    fn suzuki_alpha_window() {
        assert!(check_hypotheses(&p(3, 0.0, 0.5, 2.0)).suzuki_lwp);
        assert!(!check_hypotheses(&p(3, 0.0, 0.5, 3.0)).suzuki_lwp);
    }
}
