//! The named exponent constructions behind the local and small-data global theory,
//! each instantiated as explicit pairs plus the Hölder splits on the unit ball `B`
//! and its complement.

use serde::{Deserialize, Serialize};

use super::pairs::{
    is_dual_hs_admissible, is_hs_admissible, is_s_admissible, sobolev_equivalence_window,
    PairClass, PairQR,
};
use super::value::{is_positive, Value};
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Local theory, `max{0, (2-2b)/(N-2)} < alpha < (4-2b)/(N-2)`: pairs `(q+-, r+-)`.
    LocalAboveThreshold,
    /// Local theory, `(2-2b)/N < alpha <= (2-2b)/(N-2)`, `0 < b < 1`.
    LocalBelowThreshold,
    /// Radial small data, `a > 0`: `(q^, r^)`, `(a^, r^)`, `(a~, r^)` and the `N = 3` pairs.
    GlobalRadial,
    /// `N = 3`, `a > 0`, full intercritical range with `alpha > 1`: `(a-, r-)` and `p-`.
    GlobalThreeD,
    /// `N = 3`, `a > -1/4`, `(4-2b)/3 < alpha <= 2-2b`, `b < 1/2`.
    NegativeCouplingLowPower,
    /// `3 <= N <= 5`, `alpha > max{(4-2b)/N, (2-2b)/(N-2), 1}`.
    NegativeCouplingHighPower,
}

impl Construction {
    pub const ALL: [Construction; 6] = [
        Construction::LocalAboveThreshold,
        Construction::LocalBelowThreshold,
        Construction::GlobalRadial,
        Construction::GlobalThreeD,
        Construction::NegativeCouplingLowPower,
        Construction::NegativeCouplingHighPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::LocalAboveThreshold => "local_above_threshold",
            Construction::LocalBelowThreshold => "local_below_threshold",
            Construction::GlobalRadial => "global_radial",
            Construction::GlobalThreeD => "global_three_d",
            Construction::NegativeCouplingLowPower => "negative_coupling_low_power",
            Construction::NegativeCouplingHighPower => "negative_coupling_high_power",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: Value,
    pub rel: Relation,
    pub rhs: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: Value, rel: Relation, rhs: Value) -> Self {
        Check {
            name: name.into(),
            lhs,
            rel,
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        use std::cmp::Ordering::*;
        match (self.lhs.compare(&self.rhs), self.rel) {
            (None, _) => false,
            (Some(o), Relation::Eq) => o == Equal,
            (Some(o), Relation::Lt) => o == Less,
            (Some(o), Relation::Le) => o != Greater,
            (Some(o), Relation::Gt) => o == Greater,
            (Some(o), Relation::Ge) => o != Less,
        }
    }
}

fn eq(name: &str, lhs: Value, rhs: Value) -> Check {
    Check::new(name, lhs, Relation::Eq, rhs)
}
fn lt(name: &str, lhs: Value, rhs: Value) -> Check {
    Check::new(name, lhs, Relation::Lt, rhs)
}
fn le(name: &str, lhs: Value, rhs: Value) -> Check {
    Check::new(name, lhs, Relation::Le, rhs)
}
fn gt(name: &str, lhs: Value, rhs: Value) -> Check {
    Check::new(name, lhs, Relation::Gt, rhs)
}
fn ge(name: &str, lhs: Value, rhs: Value) -> Check {
    Check::new(name, lhs, Relation::Ge, rhs)
}

/// What a named pair is claimed to be.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Requirement {
    SAdmissible,
    HsAdmissible(Value),
    DualHsAdmissible(Value),
    /// Only the `H^s` scaling relation and `r >= 2`; the upper range is not required.
    HsRelation(Value),
}

impl Requirement {
    pub fn satisfied_by(&self, pair: &PairQR, n: u32) -> bool {
        match self {
            Requirement::SAdmissible => is_s_admissible(pair, n),
            Requirement::HsAdmissible(s) => is_hs_admissible(pair, s, n),
            Requirement::DualHsAdmissible(s) => is_dual_hs_admissible(pair, s, n),
            Requirement::HsRelation(s) => {
                pair.scaling_level(n) == *s
                    && is_positive(&pair.inv_q)
                    && pair.inv_r.compare(&Value::ratio(1, 2)) != Some(std::cmp::Ordering::Greater)
            }
        }
    }

    fn level(&self) -> Value {
        match self {
            Requirement::SAdmissible => Value::int(0),
            Requirement::HsAdmissible(s) | Requirement::HsRelation(s) => s.clone(),
            Requirement::DualHsAdmissible(s) => -s,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedPair {
    pub name: String,
    pub pair: PairQR,
    pub requirement: Requirement,
    pub class: PairClass,
    /// Smoothness `s` of the Sobolev equivalence the pair's `r` must support.
    pub window: Option<f64>,
    pub conditions: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Ball,
    Exterior,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderSplit {
    pub name: String,
    pub region: Region,
    pub exponents: Vec<(String, Value)>,
    pub equations: Vec<Check>,
    pub conditions: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub subject: String,
    pub name: String,
    pub passed: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl CheckOutcome {
    fn from_check(subject: &str, c: &Check) -> Self {
        CheckOutcome {
            subject: subject.into(),
            name: c.name.clone(),
            passed: c.holds(),
            lhs: c.lhs.to_f64(),
            rhs: c.rhs.to_f64(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub name: String,
    pub region: Region,
    pub outcomes: Vec<CheckOutcome>,
    pub passed: bool,
}

impl SplitReport {
    pub fn failures(&self) -> Vec<&CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub construction: Construction,
    pub epsilon: Value,
    pub theta: Value,
    pub pairs: Vec<NamedPair>,
    pub splits: Vec<HolderSplit>,
    pub outcomes: Vec<CheckOutcome>,
    pub passed: bool,
}

impl ConstructionReport {
    pub fn failures(&self) -> Vec<&CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed).collect()
    }
}

struct Ctx {
    n: u32,
    nn: Value,
    a: Value,
    b: Value,
    al: Value,
    sc: Value,
    th: Value,
    eps: Value,
}

impl Ctx {
    fn new(params: &ModelParams, theta: &Value, eps: &Value) -> Self {
        let nn = Value::int(params.dim as i64);
        let b = Value::from_decimal(params.b);
        let al = Value::from_decimal(params.alpha);
        let sc = &nn / 2 - (2 - &b) / &al;
        Ctx {
            n: params.dim,
            nn,
            a: Value::from_decimal(params.a),
            b,
            al,
            sc,
            th: theta.clone(),
            eps: eps.clone(),
        }
    }

    /// `-(N-2)^2/4 + ((alpha(N-2) - (2-2b)) / (2(alpha+1)))^2`
    fn kato_floor(&self) -> Value {
        let hardy = -(&self.nn - 2).pow(2) / 4;
        hardy + ((&self.al * (&self.nn - 2) - (2 - 2 * &self.b)) / (2 * (&self.al + 1))).pow(2)
    }

    fn energy_critical(&self) -> Value {
        (4 - 2 * &self.b) / (&self.nn - 2)
    }

    fn mass_critical(&self) -> Value {
        (4 - 2 * &self.b) / &self.nn
    }

    fn pair(
        &self,
        name: &str,
        q: Value,
        r: Value,
        req: Requirement,
        window: Option<f64>,
        conditions: Vec<Check>,
    ) -> NamedPair {
        let pair = PairQR::new(q, r);
        let class = pair.classify(self.n, &self.sc);
        NamedPair {
            name: name.into(),
            pair,
            requirement: req,
            class,
            window,
            conditions,
        }
    }
}

fn hypotheses(c: Construction, x: &Ctx) -> Vec<Check> {
    let n = x.n;
    let (b, al, a, nn) = (&x.b, &x.al, &x.a, &x.nn);
    let hardy = -(nn - 2).pow(2) / 4;
    let mut h = vec![gt("a > -(N-2)^2/4", a.clone(), hardy)];
    match c {
        Construction::LocalAboveThreshold => {
            h.push(gt("b > 0", b.clone(), Value::int(0)));
            h.push(lt("b < N/2", b.clone(), nn / 2));
            h.push(lt("b < 2", b.clone(), Value::int(2)));
            h.push(gt("a > Kato floor", a.clone(), x.kato_floor()));
            h.push(gt("alpha > 0", al.clone(), Value::int(0)));
            h.push(gt(
                "alpha > (2-2b)/(N-2)",
                al.clone(),
                (2 - 2 * b) / (nn - 2),
            ));
            h.push(lt("alpha < (4-2b)/(N-2)", al.clone(), x.energy_critical()));
        }
        Construction::LocalBelowThreshold => {
            h.push(gt("b > 0", b.clone(), Value::int(0)));
            h.push(lt("b < 1", b.clone(), Value::int(1)));
            h.push(gt("alpha > (2-2b)/N", al.clone(), (2 - 2 * b) / nn));
            h.push(le(
                "alpha <= (2-2b)/(N-2)",
                al.clone(),
                (2 - 2 * b) / (nn - 2),
            ));
        }
        Construction::GlobalRadial => {
            h.push(gt("a > 0", a.clone(), Value::int(0)));
            h.push(gt("b > 0", b.clone(), Value::int(0)));
            h.push(lt("b < N/2", b.clone(), nn / 2));
            h.push(lt("b < 2", b.clone(), Value::int(2)));
            h.push(gt("alpha > (4-2b)/N", al.clone(), x.mass_critical()));
            h.push(lt("alpha < (4-2b)/(N-2)", al.clone(), x.energy_critical()));
        }
        Construction::GlobalThreeD => {
            h.push(eq("N = 3", Value::int(n as i64), Value::int(3)));
            h.push(gt("a > 0", a.clone(), Value::int(0)));
            h.push(gt("b > 0", b.clone(), Value::int(0)));
            h.push(lt("b < 3/2", b.clone(), Value::ratio(3, 2)));
            h.push(gt("alpha > (4-2b)/3", al.clone(), (4 - 2 * b) / 3));
            h.push(gt("alpha > 1", al.clone(), Value::int(1)));
            h.push(lt("alpha < 4-2b", al.clone(), 4 - 2 * b));
        }
        Construction::NegativeCouplingLowPower => {
            h.push(eq("N = 3", Value::int(n as i64), Value::int(3)));
            h.push(gt("b > 0", b.clone(), Value::int(0)));
            h.push(lt("b < 1/2", b.clone(), Value::ratio(1, 2)));
            h.push(gt("alpha > (4-2b)/3", al.clone(), (4 - 2 * b) / 3));
            h.push(le("alpha <= 2-2b", al.clone(), 2 - 2 * b));
        }
        Construction::NegativeCouplingHighPower => {
            h.push(le("N <= 5", Value::int(n as i64), Value::int(5)));
            h.push(gt("b > 0", b.clone(), Value::int(0)));
            h.push(lt("b < (6-N)/2", b.clone(), (6 - nn) / 2));
            h.push(gt("a > Kato floor", a.clone(), x.kato_floor()));
            h.push(gt("alpha > (4-2b)/N", al.clone(), x.mass_critical()));
            h.push(gt(
                "alpha > (2-2b)/(N-2)",
                al.clone(),
                (2 - 2 * b) / (nn - 2),
            ));
            h.push(gt("alpha > 1", al.clone(), Value::int(1)));
            h.push(lt("alpha < (4-2b)/(N-2)", al.clone(), x.energy_critical()));
        }
    }
    h
}

/// Parameter conditions of a construction, each evaluated as printed.
pub fn construction_hypotheses(c: Construction, params: &ModelParams) -> Vec<Check> {
    hypotheses(c, &Ctx::new(params, &Value::int(0), &Value::int(0)))
}

pub fn applicable_constructions(params: &ModelParams) -> Vec<Construction> {
    Construction::ALL
        .into_iter()
        .filter(|&c| construction_hypotheses(c, params).iter().all(Check::holds))
        .collect()
}

fn require(c: Construction, x: &Ctx) -> Result<()> {
    let failing: Vec<String> = hypotheses(c, x)
        .into_iter()
        .filter(|h| !h.holds())
        .map(|h| h.name)
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Error::HypothesisViolation(format!(
            "{}: {}",
            c.name(),
            failing.join(", ")
        )))
    }
}

fn precondition(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(what.into()))
    }
}

/// Emits each pair of a construction with its claimed class and window requirement.
pub fn build_named_pairs(
    c: Construction,
    params: &ModelParams,
    theta: &Value,
    eps: &Value,
) -> Result<Vec<NamedPair>> {
    Ok(build(c, params, theta, eps)?.0)
}

/// The Hölder splits (ball and exterior) of a construction.
pub fn build_holder_splits(
    c: Construction,
    params: &ModelParams,
    theta: &Value,
    eps: &Value,
) -> Result<Vec<HolderSplit>> {
    Ok(build(c, params, theta, eps)?.1)
}

fn build(
    c: Construction,
    params: &ModelParams,
    theta: &Value,
    eps: &Value,
) -> Result<(Vec<NamedPair>, Vec<HolderSplit>)> {
    let x = Ctx::new(params, theta, eps);
    require(c, &x)?;
    match c {
        Construction::LocalAboveThreshold => local_above(&x),
        Construction::LocalBelowThreshold => local_below(&x),
        Construction::GlobalRadial => global_radial(&x),
        Construction::GlobalThreeD => global_three_d(&x),
        Construction::NegativeCouplingLowPower => negative_low(&x),
        Construction::NegativeCouplingHighPower => negative_high(&x),
    }
}

fn local_above(x: &Ctx) -> Result<(Vec<NamedPair>, Vec<HolderSplit>)> {
    let (nn, b, al, eps) = (&x.nn, &x.b, &x.al, &x.eps);
    let base = al * (nn - 2) - (2 - 2 * b);
    precondition(is_positive(eps), "epsilon > 0")?;
    precondition(
        is_positive(&(&base - eps)),
        "denominator of q_plus positive",
    )?;
    let mut pairs = Vec::new();
    let mut splits = Vec::new();
    for (sign, tag, region) in [
        (1i64, "plus", Region::Exterior),
        (-1, "minus", Region::Ball),
    ] {
        let se = sign * eps;
        let r = 2 * nn * (al + 1) / (nn + 2 + 2 * al - 2 * b + &se);
        let q = 4 * (al + 1) / (&base - &se);
        pairs.push(x.pair(
            &format!("(q_{tag}, r_{tag})"),
            q.clone(),
            r.clone(),
            Requirement::SAdmissible,
            Some(1.0),
            vec![
                lt("r < N", r.clone(), nn.clone()),
                ge("q >= 2", q.clone(), Value::int(2)),
            ],
        ));

        let ir = r.recip();
        let iq = q.recip();
        let h = (nn + 2) / (2 * nn);
        let ir1 = al * (&ir - nn.recip());
        let ie = (al + 1) * (&ir - nn.recip());
        let ibeta = &ir1 + &ir;
        let igamma = &h - &ibeta;
        let id = &h - &ie;
        let iqs = Value::ratio(1, 2) - (al + 1) * &iq;
        let ng = nn * &igamma;
        let nd = nn * &id;
        let mut conditions = vec![
            lt("r < N", r.clone(), nn.clone()),
            gt("1/q* > 0", iqs.clone(), Value::int(0)),
        ];
        match region {
            Region::Ball => {
                conditions.push(gt("N/gamma - b > 0", &ng - b, Value::int(0)));
                conditions.push(gt("N/d - b - 1 > 0", &nd - b - 1, Value::int(0)));
            }
            Region::Exterior => {
                conditions.push(lt("N/gamma - b < 0", &ng - b, Value::int(0)));
                conditions.push(lt("N/d - b - 1 < 0", &nd - b - 1, Value::int(0)));
            }
        }
        splits.push(HolderSplit {
            name: format!("(q_{tag}, r_{tag}) on {region:?}"),
            region,
            exponents: named(&[
                ("gamma", &igamma),
                ("beta", &ibeta),
                ("d", &id),
                ("e", &ie),
                ("r1", &ir1),
                ("q*", &iqs),
            ]),
            equations: vec![
                eq("(N+2)/(2N) = 1/gamma + 1/beta", h.clone(), &igamma + &ibeta),
                eq("(N+2)/(2N) = 1/d + 1/e", h.clone(), &id + &ie),
                eq("1/beta = 1/r1 + 1/r", ibeta.clone(), &ir1 + &ir),
                eq(
                    "1 = N/r - N/(alpha r1)",
                    Value::int(1),
                    nn * &ir - nn * &ir1 / al,
                ),
                eq(
                    "1 = N/r - N/((alpha+1) e)",
                    Value::int(1),
                    nn * &ir - nn * &ie / (al + 1),
                ),
                eq(
                    "1/2 = 1/q* + (alpha+1)/q",
                    Value::ratio(1, 2),
                    &iqs + (al + 1) * &iq,
                ),
                eq(
                    "N/gamma = (N+2)/2 - N(alpha+1)/r + alpha",
                    ng.clone(),
                    (nn + 2) / 2 - nn * (al + 1) * &ir + al,
                ),
                eq(
                    "N/d = (N+2)/2 - N(alpha+1)/r + alpha + 1",
                    nd.clone(),
                    (nn + 2) / 2 - nn * (al + 1) * &ir + al + 1,
                ),
                eq(
                    "1/q* = (4 - 2b - alpha(N-2) +- eps)/4",
                    iqs.clone(),
                    (4 - 2 * b - al * (nn - 2) + &se) / 4,
                ),
            ],
            conditions,
        });
    }
    Ok((pairs, splits))
}

fn local_below(x: &Ctx) -> Result<(Vec<NamedPair>, Vec<HolderSplit>)> {
    let (nn, b, al, eps) = (&x.nn, &x.b, &x.al, &x.eps);
    precondition(is_positive(eps), "epsilon > 0")?;
    let q = 4 * (2 - 2 * b + eps) / (eps * (nn - 2));
    let r = nn * (2 - 2 * b + eps) / ((1 - b) * nn + eps);
    let pairs = vec![x.pair(
        "(q, r)",
        q.clone(),
        r.clone(),
        Requirement::SAdmissible,
        Some(1.0),
        vec![lt("r < N", r.clone(), nn.clone())],
    )];

    let h = (nn + 2) / (2 * nn);
    let half = Value::ratio(1, 2);
    let crit = (nn - 2) / (2 * nn);
    let ir = r.recip();
    let iq = q.recip();

    let ir1 = al * (&ir - nn.recip());
    let igamma = &h - &ir1 - &half;
    let id = &h - &ir1 - &crit;
    let iqs = &half - al * &iq;
    let ng = nn * &igamma;
    let nd = nn * &id;
    let ball = HolderSplit {
        name: "(q, r) on Ball".into(),
        region: Region::Ball,
        exponents: named(&[("gamma", &igamma), ("d", &id), ("r1", &ir1), ("q*", &iqs)]),
        equations: vec![
            eq(
                "(N+2)/(2N) = 1/gamma + 1/r1 + 1/2",
                h.clone(),
                &igamma + &ir1 + &half,
            ),
            eq(
                "(N+2)/(2N) = 1/d + 1/r1 + (N-2)/(2N)",
                h.clone(),
                &id + &ir1 + &crit,
            ),
            eq(
                "1 = N/r - N/(alpha r1)",
                Value::int(1),
                nn * &ir - nn * &ir1 / al,
            ),
            eq("1/2 = 1/q* + alpha/q", half.clone(), &iqs + al * &iq),
            eq(
                "N/gamma = 1 - N alpha/r + alpha",
                ng.clone(),
                1 - nn * al * &ir + al,
            ),
            eq("N/d - 1 = N/gamma", &nd - 1, ng.clone()),
        ],
        conditions: vec![
            gt("N/gamma - b > 0", &ng - b, Value::int(0)),
            gt("N/d - b - 1 > 0", &nd - b - 1, Value::int(0)),
            gt("1/q* > 0", iqs.clone(), Value::int(0)),
        ],
    };

    let ir1 = (1 - b + eps) / nn;
    let igamma = &h - &ir1 - &half;
    let id = &h - &ir1 - &crit;
    let ng = nn * &igamma;
    let nd = nn * &id;
    let ar1 = al / &ir1;
    let exterior = HolderSplit {
        name: "embedding on Exterior".into(),
        region: Region::Exterior,
        exponents: named(&[("gamma", &igamma), ("d", &id), ("r1", &ir1)]),
        equations: vec![
            eq("N/gamma = 1 - N/r1", ng.clone(), 1 - nn * &ir1),
            eq("N/d - 1 = N/gamma", &nd - 1, ng.clone()),
        ],
        conditions: vec![
            lt("N/gamma - b < 0", &ng - b, Value::int(0)),
            lt("N/d - b - 1 < 0", &nd - b - 1, Value::int(0)),
            gt("alpha r1 > 2", ar1.clone(), Value::int(2)),
            lt("alpha r1 < 2N/(N-2)", ar1, 2 * nn / (nn - 2)),
        ],
    };
    Ok((pairs, vec![ball, exterior]))
}

fn global_radial(x: &Ctx) -> Result<(Vec<NamedPair>, Vec<HolderSplit>)> {
    let (nn, b, al, th, sc) = (&x.nn, &x.b, &x.al, &x.th, &x.sc);
    precondition(
        is_positive(th) && is_positive(&(al - th)),
        "0 < theta < alpha",
    )?;
    let num = al * (al + 2 - th);
    let q_hat = 4 * &num / (al * (nn * al + 2 * b) - th * (nn * al - 4 + 2 * b));
    let r_hat = nn * &num / (al * (nn - b) - th * (2 - b));
    let a_hat = 2 * &num / (4 - 2 * b - (nn - 2) * al);
    let a_tilde = 2 * &num / (al * (nn * (al + 1 - th) - 2 + 2 * b) - (4 - 2 * b) * (1 - th));

    let mut cond = Vec::new();
    let mut window = None;
    if x.n >= 4 {
        let r_dual = &r_hat / (&r_hat - 1);
        cond.push(lt("r_hat < N", r_hat.clone(), nn.clone()));
        cond.push(lt("r_hat' < N", r_dual.clone(), nn.clone()));
        // a > 0 here, so the s = 1 window is (1, N)
        cond.push(gt("r_hat' > 1", r_dual, Value::int(1)));
        window = Some(1.0);
    }
    let mut pairs = vec![
        x.pair(
            "(q_hat, r_hat)",
            q_hat,
            r_hat.clone(),
            Requirement::SAdmissible,
            window,
            cond,
        ),
        x.pair(
            "(a_hat, r_hat)",
            a_hat,
            r_hat.clone(),
            Requirement::HsAdmissible(sc.clone()),
            None,
            vec![],
        ),
        x.pair(
            "(a_tilde, r_hat)",
            a_tilde,
            r_hat,
            Requirement::DualHsAdmissible(sc.clone()),
            None,
            vec![],
        ),
    ];
    let mut splits = Vec::new();

    if x.n == 3 && al.compare(&(3 - 2 * b)) == Some(std::cmp::Ordering::Less) {
        let eps = &x.eps;
        precondition(
            is_positive(eps) && is_positive(&(1 - 2 * eps)),
            "0 < epsilon < 1/2",
        )?;
        let q_eps = 4 / (1 - 2 * eps);
        let r_eps = 3 / (1 + eps);
        let a_eps = 4 * (al - th) / (1 + 2 * eps);
        let r = 6 * al * (al - th) / (al * (3 - 2 * b - 2 * eps) - 2 * th * (2 - b));
        pairs.push(x.pair(
            "(q_eps, r_eps)",
            q_eps.clone(),
            r_eps.clone(),
            Requirement::SAdmissible,
            Some(1.0),
            vec![lt("r_eps < 3", r_eps.clone(), Value::int(3))],
        ));
        pairs.push(x.pair(
            "(a_eps, r)",
            a_eps.clone(),
            r.clone(),
            Requirement::HsAdmissible(sc.clone()),
            None,
            vec![eq(
                "1/2 = (alpha-theta)/a_eps + 1/q_eps",
                Value::ratio(1, 2),
                (al - th) / &a_eps + q_eps.recip(),
            )],
        ));
        splits.extend(theta_splits(
            x,
            &r_eps,
            &r,
            "(a_eps, r) with (q_eps, r_eps)",
        ));
    }
    Ok((pairs, splits))
}

/// Ball/exterior splits with `theta r1 = 2N/(N-2)` on `B` and `theta r1 = 2` on `B^C`,
/// for the estimate `|x|^{-b} |u|^theta |u|^{alpha-theta} v` with `v` in `L^{r_v}`.
fn theta_splits(x: &Ctx, r_v: &Value, r_bar: &Value, label: &str) -> Vec<HolderSplit> {
    let (nn, b, al, th, sc) = (&x.nn, &x.b, &x.al, &x.th, &x.sc);
    let top = (nn + 2) / 2;
    let irv = r_v.recip();
    let ir3 = &irv - nn.recip();
    let mut out = Vec::new();
    for region in [Region::Ball, Region::Exterior] {
        let ir1 = match region {
            Region::Ball => th * (nn - 2) / (2 * nn),
            Region::Exterior => th / 2,
        };
        let common = &top - nn * &ir1 - nn * (al - th) / r_bar;
        let ng = &common - nn * &irv;
        let nd = &common - nn * &ir3;
        let rhs = th * (2 - b) / al - nn * &ir1;
        let th_r1 = th / &ir1;
        let (target, sign) = match region {
            Region::Ball => (th * (1 - sc), Relation::Gt),
            Region::Exterior => (-(th * sc), Relation::Lt),
        };
        out.push(HolderSplit {
            name: format!("{label} on {region:?}"),
            region,
            exponents: named(&[
                ("gamma", &(&ng / nn)),
                ("d", &(&nd / nn)),
                ("r1", &ir1),
                ("r3", &ir3),
            ]),
            equations: vec![
                eq("1 = N/r_v - N/r3", Value::int(1), nn * &irv - nn * &ir3),
                eq(
                    "N/gamma - b = theta(2-b)/alpha - N/r1",
                    &ng - b,
                    rhs.clone(),
                ),
                eq("N/d - b - 1 = theta(2-b)/alpha - N/r1", &nd - b - 1, rhs),
                eq(
                    match region {
                        Region::Ball => "N/gamma - b = theta(1 - s_c)",
                        Region::Exterior => "N/gamma - b = -theta s_c",
                    },
                    &ng - b,
                    target,
                ),
            ],
            conditions: vec![
                Check::new("N/gamma - b sign", &ng - b, sign, Value::int(0)),
                Check::new("N/d - b - 1 sign", &nd - b - 1, sign, Value::int(0)),
                ge("theta r1 >= 2", th_r1.clone(), Value::int(2)),
                le("theta r1 <= 2N/(N-2)", th_r1, 2 * nn / (nn - 2)),
            ],
        });
    }
    out
}

fn p_bar_pair(x: &Ctx, a_bar: &Value, r_bar: &Value, p_bar: Value) -> NamedPair {
    let (nn, sc) = (&x.nn, &x.sc);
    x.pair(
        "(a_bar, p_bar)",
        a_bar.clone(),
        p_bar.clone(),
        Requirement::SAdmissible,
        None,
        vec![
            gt("p_bar > 2", p_bar.clone(), Value::int(2)),
            lt("p_bar < 2N/(N-2)", p_bar.clone(), 2 * nn / (nn - 2)),
            lt("p_bar < N/s_c", p_bar.clone(), nn / sc),
            eq(
                "s_c = N/p_bar - N/r_bar",
                sc.clone(),
                nn / &p_bar - nn / r_bar,
            ),
        ],
    )
}

fn a_bar_pair(x: &Ctx, a_bar: &Value, r_bar: &Value, q: &Value) -> NamedPair {
    let (al, th) = (&x.al, &x.th);
    x.pair(
        "(a_bar, r_bar)",
        a_bar.clone(),
        r_bar.clone(),
        Requirement::HsRelation(x.sc.clone()),
        None,
        vec![
            ge("a_bar >= 2", a_bar.clone(), Value::int(2)),
            ge("r_bar >= 2", r_bar.clone(), Value::int(2)),
            eq(
                "1/2 = (alpha-theta)/a_bar + 1/q",
                Value::ratio(1, 2),
                (al - th) / a_bar + q.recip(),
            ),
        ],
    )
}

fn global_three_d(x: &Ctx) -> Result<(Vec<NamedPair>, Vec<HolderSplit>)> {
    let (b, al, th, eps, sc) = (&x.b, &x.al, &x.th, &x.eps, &x.sc);
    precondition(
        is_positive(th) && is_positive(&(al - th)),
        "0 < theta < alpha",
    )?;
    precondition(
        is_positive(eps) && is_positive(&(1 - 2 * eps)),
        "0 < epsilon < 1/2",
    )?;
    let q = 4 / (1 - 2 * eps);
    let r = 3 / (1 + eps);
    let a_bar = 4 * (al - th) / (1 + 2 * eps);
    let r_bar = 6 * al * (al - th) / (al * (3 - 2 * b - 2 * eps) - th * (4 - 2 * b));
    let p_bar = 6 * al * (al - th)
        / (al * (3 - 2 * b - 2 * eps) + 2 * al * sc * (al - th) - th * (4 - 2 * b));
    let pairs = vec![
        x.pair(
            "(q, r)",
            q.clone(),
            r.clone(),
            Requirement::SAdmissible,
            Some(1.0),
            vec![lt("r < N", r.clone(), Value::int(3))],
        ),
        a_bar_pair(x, &a_bar, &r_bar, &q),
        p_bar_pair(x, &a_bar, &r_bar, p_bar),
    ];
    Ok((
        pairs,
        theta_splits(x, &r, &r_bar, "(a_bar, r_bar) with (q, r)"),
    ))
}

fn negative_low(x: &Ctx) -> Result<(Vec<NamedPair>, Vec<HolderSplit>)> {
    let (nn, b, al, th, sc) = (&x.nn, &x.b, &x.al, &x.th, &x.sc);
    precondition(
        is_positive(th) && is_positive(&(al - th)) && is_positive(&(1 - th)),
        "0 < theta < min{1, alpha}",
    )?;
    let a_bar = 2 * (al - th) / (1 - th);
    let r_bar = 3 * al * (al - th) / (al * (1 - b) - th * (2 - b - al));
    let q = 2 / th.clone();
    let r = 6 / (3 - 2 * th);
    let p_bar = nn * al * (al - th) / (al * sc * (al - th) + al * (1 - b) - th * (2 - b - al));
    let pairs = vec![
        x.pair(
            "(q, r)",
            q.clone(),
            r.clone(),
            Requirement::SAdmissible,
            Some(1.0),
            vec![
                gt("r > 2", r.clone(), Value::int(2)),
                lt("r < N", r.clone(), nn.clone()),
            ],
        ),
        a_bar_pair(x, &a_bar, &r_bar, &q),
        p_bar_pair(x, &a_bar, &r_bar, p_bar),
    ];
    Ok((
        pairs,
        theta_splits(x, &r, &r_bar, "(a_bar, r_bar) with (q, r)"),
    ))
}

fn negative_high(x: &Ctx) -> Result<(Vec<NamedPair>, Vec<HolderSplit>)> {
    let (nn, b, al, th, sc) = (&x.nn, &x.b, &x.al, &x.th, &x.sc);
    precondition(
        is_positive(th) && is_positive(&(al - th)),
        "0 < theta < alpha",
    )?;
    let a_bar = 4 * (al + 1) * (al - th) / (4 - 2 * b - al * (nn - 4));
    let r_bar = 2 * nn * al * (al + 1) * (al - th)
        / (al.pow(2) * (nn - 2 * b) - th * (4 - 2 * b) * (al + 1));
    let q = 4 * (al + 1) / (al * (nn - 2) - 2 + 2 * b);
    let r = 2 * nn * (al + 1) / (2 * (al + 1) + nn - 2 * b);
    let p_bar = 2 * nn * al * (al + 1) * (al - th)
        / (2 * al * sc * (al + 1) * (al - th) + al.pow(2) * (nn - 2 * b)
            - th * (4 - 2 * b) * (al + 1));
    let pairs = vec![
        x.pair(
            "(q, r)",
            q.clone(),
            r.clone(),
            Requirement::SAdmissible,
            Some(1.0),
            vec![
                gt("r > 2", r.clone(), Value::int(2)),
                lt("r < N", r.clone(), nn.clone()),
            ],
        ),
        a_bar_pair(x, &a_bar, &r_bar, &q),
        p_bar_pair(x, &a_bar, &r_bar, p_bar),
    ];
    Ok((
        pairs,
        theta_splits(x, &r, &r_bar, "(a_bar, r_bar) with (q, r)"),
    ))
}

fn named(items: &[(&str, &Value)]) -> Vec<(String, Value)> {
    // items carry reciprocals; report the exponents themselves
    items
        .iter()
        .map(|(n, v)| (n.to_string(), v.recip()))
        .collect()
}

/// Class, side conditions and Sobolev window of one named pair.
pub fn verify_named_pair(p: &NamedPair, params: &ModelParams) -> Vec<CheckOutcome> {
    let n = params.dim;
    let mut out = vec![CheckOutcome {
        subject: p.name.clone(),
        name: format!("{:?}", p.requirement),
        passed: p.requirement.satisfied_by(&p.pair, n),
        lhs: p.pair.scaling_level(n).to_f64(),
        rhs: p.requirement.level().to_f64(),
    }];
    out.extend(
        p.conditions
            .iter()
            .map(|c| CheckOutcome::from_check(&p.name, c)),
    );
    if let Some(s) = p.window {
        let r = p.pair.r().unwrap_or(Value::approx(f64::INFINITY));
        match sobolev_equivalence_window(s, params) {
            Ok((lo, hi)) => {
                out.push(CheckOutcome::from_check(
                    &p.name,
                    &gt("r above Sobolev window floor", r.clone(), Value::approx(lo)),
                ));
                out.push(CheckOutcome::from_check(
                    &p.name,
                    &lt("r below Sobolev window ceiling", r, Value::approx(hi)),
                ));
            }
            Err(_) => out.push(CheckOutcome {
                subject: p.name.clone(),
                name: "Sobolev window nonempty".into(),
                passed: false,
                lhs: f64::NAN,
                rhs: f64::NAN,
            }),
        }
    }
    out
}

/// Scaling equations to tolerance, then finiteness and positivity conditions.
pub fn verify_holder_split(split: &HolderSplit, _params: &ModelParams) -> SplitReport {
    let outcomes: Vec<CheckOutcome> = split
        .equations
        .iter()
        .chain(&split.conditions)
        .map(|c| CheckOutcome::from_check(&split.name, c))
        .collect();
    let passed = outcomes.iter().all(|o| o.passed);
    SplitReport {
        name: split.name.clone(),
        region: split.region,
        outcomes,
        passed,
    }
}

pub fn verify_construction(
    c: Construction,
    params: &ModelParams,
    theta: &Value,
    eps: &Value,
) -> Result<ConstructionReport> {
    let (pairs, splits) = build(c, params, theta, eps)?;
    let mut outcomes: Vec<CheckOutcome> = pairs
        .iter()
        .flat_map(|p| verify_named_pair(p, params))
        .collect();
    for s in &splits {
        outcomes.extend(verify_holder_split(s, params).outcomes);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    Ok(ConstructionReport {
        construction: c,
        epsilon: eps.clone(),
        theta: theta.clone(),
        pairs,
        splits,
        outcomes,
        passed,
    })
}

/// The proofs only ask for `theta`, `epsilon` "sufficiently small": start from the given
/// values and halve both until every check passes (at most `max_halvings` times).
/// Returns the last report, passing or not.
pub fn verify_with_small_parameters(
    c: Construction,
    params: &ModelParams,
    theta: &Value,
    eps: &Value,
    max_halvings: u32,
) -> Result<ConstructionReport> {
    let (mut th, mut ep) = (theta.clone(), eps.clone());
    let mut last = None;
    for _ in 0..=max_halvings {
        match verify_construction(c, params, &th, &ep) {
            Ok(rep) if rep.passed => return Ok(rep),
            Ok(rep) => last = Some(Ok(rep)),
            Err(e @ Error::HypothesisViolation(_)) => return Err(e),
            Err(e) => last = Some(Err(e)),
        }
        th = th / 2;
        ep = ep / 2;
    }
    last.expect("at least one attempt")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, a: f64, b: f64, alpha: f64) -> ModelParams {
        ModelParams::focusing(n, a, b, alpha).unwrap()
    }

    #[test]
    fn cubic_three_d_hat_pair() {
        // N=3, b=0, alpha=2, theta=0: q^ = 8/3, r^ = 4
        let x = Ctx::new(&p(3, 1.0, 0.0, 2.0), &Value::int(0), &Value::ratio(1, 1000));
        let num = &x.al * (&x.al + 2 - &x.th);
        let q_hat = 4 * &num
            / (&x.al * (&x.nn * &x.al + 2 * &x.b) - &x.th * (&x.nn * &x.al - 4 + 2 * &x.b));
        let r_hat = &x.nn * &num / (&x.al * (&x.nn - &x.b) - &x.th * (2 - &x.b));
        assert_eq!(q_hat.to_string(), "8/3");
        assert_eq!(r_hat.to_string(), "4");
        assert!(is_s_admissible(&PairQR::new(q_hat, r_hat), 3));
    }

    #[test]
    fn local_above_q_star_limit() {
        let params = p(4, 0.5, 0.5, 0.8);
        let splits = build_holder_splits(
            Construction::LocalAboveThreshold,
            &params,
            &Value::int(0),
            &Value::ratio(1, 10_000),
        )
        .unwrap();
        for s in &splits {
            assert!(
                verify_holder_split(s, &params).passed,
                "{:?}",
                verify_holder_split(s, &params).failures()
            );
        }
    }

    #[test]
    fn every_construction_passes_at_a_sample_point() {
        let cases = [
            (Construction::LocalAboveThreshold, p(3, 0.5, 0.5, 1.5)),
            (Construction::LocalBelowThreshold, p(3, -0.1, 0.5, 0.7)),
            (Construction::GlobalRadial, p(3, 1.0, 0.5, 1.5)),
            (Construction::GlobalRadial, p(5, 1.0, 1.0, 0.5)),
            (Construction::GlobalThreeD, p(3, 1.0, 0.5, 2.5)),
            (
                Construction::NegativeCouplingLowPower,
                p(3, -0.2, 0.25, 1.3),
            ),
            (Construction::NegativeCouplingHighPower, p(3, 0.5, 0.5, 2.0)),
        ];
        for (c, params) in cases {
            let rep = verify_with_small_parameters(
                c,
                &params,
                &Value::ratio(1, 1000),
                &Value::ratio(1, 1000),
                30,
            )
            .unwrap();
            assert!(rep.passed, "{c:?}: {:?}", rep.failures());
        }
    }

    #[test]
    fn printed_a_eps_numerator_breaks_the_scaling_relation() {
        let params = p(3, 1.0, 0.5, 1.5);
        let x = Ctx::new(&params, &Value::ratio(1, 1000), &Value::ratio(1, 1000));
        let (b, al, th, eps) = (&x.b, &x.al, &x.th, &x.eps);
        let r = 6 * al * (al - th) / (al * (3 - 2 * b - 2 * eps) - 2 * th * (2 - b));
        let printed = PairQR::new(8 * (al - th) / (1 + 2 * eps), r.clone());
        let fixed = PairQR::new(4 * (al - th) / (1 + 2 * eps), r);
        assert!(!is_hs_admissible(&printed, &x.sc, 3));
        assert!(is_hs_admissible(&fixed, &x.sc, 3));
    }

    #[test]
    fn exterior_finiteness_sign() {
        // with (q+, r+), N/gamma - b = -eps/2 < 0, the exterior-integrability sign
        let params = p(3, 0.5, 0.5, 1.5);
        let eps = Value::ratio(1, 100);
        let splits = build_holder_splits(
            Construction::LocalAboveThreshold,
            &params,
            &Value::int(0),
            &eps,
        )
        .unwrap();
        let ext = splits
            .iter()
            .find(|s| s.region == Region::Exterior)
            .unwrap();
        let c = ext
            .conditions
            .iter()
            .find(|c| c.name == "N/gamma - b < 0")
            .unwrap();
        assert_eq!(c.lhs, -(eps / 2));
    }

    #[test]
    fn degenerate_theta_is_rejected() {
        let params = p(3, 1.0, 0.5, 1.5);
        let x = Ctx::new(&params, &Value::int(0), &Value::ratio(1, 1000));
        let r_eps = Value::ratio(3000, 1001);
        let r = 6 * &x.al / (3 - 2 * &x.b - 2 * &x.eps);
        let splits = theta_splits(&x, &r_eps, &r, "degenerate");
        for s in splits {
            let sign = s
                .conditions
                .iter()
                .find(|c| c.name == "N/gamma - b sign")
                .unwrap();
            assert!(sign.lhs.is_zero() && !sign.holds());
        }
        assert!(matches!(
            build_named_pairs(
                Construction::GlobalRadial,
                &params,
                &Value::int(0),
                &Value::ratio(1, 1000)
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let params = p(3, -0.1, 0.5, 1.5);
        assert!(matches!(
            build_named_pairs(
                Construction::GlobalRadial,
                &params,
                &Value::ratio(1, 1000),
                &Value::ratio(1, 1000)
            ),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(
            applicable_constructions(&p(3, 1.0, 0.5, 1.5)).contains(&Construction::GlobalRadial)
        );
    }
}
