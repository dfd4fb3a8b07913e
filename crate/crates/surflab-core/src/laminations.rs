//! Train tracks with switch-respecting weight systems, the ℓ² membership
//! test for integrable laminations, and the two-sided equivalence between
//! branch-weight and intersection-number square sums.

use std::collections::BTreeMap;

use num::BigRational;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type BranchId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switch {
    pub id: u32,
    pub side_a: Vec<BranchId>,
    pub side_b: Vec<BranchId>,
}

/// Branched 1-complex: branches plus switches whose two sides partition the
/// branch ends meeting the switch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainTrack {
    pub branches: Vec<BranchId>,
    pub switches: Vec<Switch>,
    pub valence_bound: usize,
}

impl TrainTrack {
    /// Structural checks: nonempty sides, per-switch size within the valence
    /// bound, and every branch end in exactly one side entry (each branch id
    /// appears exactly twice across all sides).
    pub fn validate(&self) -> Result<()> {
        let mut ends: BTreeMap<BranchId, usize> =
            self.branches.iter().map(|&b| (b, 0)).collect();
        for s in &self.switches {
            if s.side_a.is_empty() || s.side_b.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "switch {} has an empty side",
                    s.id
                )));
            }
            if s.side_a.len() + s.side_b.len() > self.valence_bound {
                return Err(Error::InvalidInput(format!(
                    "switch {} exceeds valence bound {}",
                    s.id, self.valence_bound
                )));
            }
            for &b in s.side_a.iter().chain(&s.side_b) {
                match ends.get_mut(&b) {
                    Some(c) => *c += 1,
                    None => return Err(Error::UnknownBranch(b)),
                }
            }
        }
        for (&b, &c) in &ends {
            if c != 2 {
                return Err(Error::InvalidInput(format!(
                    "branch {b} has {c} switch-side entries (want 2)"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("track serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: TrainTrack = serde_json::from_str(s)?;
        t.validate()?;
        Ok(t)
    }
}

/// Nonnegative branch weights, float or exact rational. Switch checks are
/// exact in rational mode and use a 1e-12 tolerance for floats.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSystem {
    Real(BTreeMap<BranchId, f64>),
    Rational(BTreeMap<BranchId, BigRational>),
}

impl WeightSystem {
    pub fn real(pairs: impl IntoIterator<Item = (BranchId, f64)>) -> Self {
        WeightSystem::Real(pairs.into_iter().collect())
    }

    pub fn rational(pairs: impl IntoIterator<Item = (BranchId, BigRational)>) -> Self {
        WeightSystem::Rational(pairs.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        match self {
            WeightSystem::Real(m) => m.len(),
            WeightSystem::Rational(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_f64(&self, b: BranchId) -> Option<f64> {
        match self {
            WeightSystem::Real(m) => m.get(&b).copied(),
            WeightSystem::Rational(m) => m.get(&b).map(rational_to_f64),
        }
    }

    /// w ↦ c·w; switch validity is preserved for c > 0.
    pub fn scale_f64(&self, c: f64) -> WeightSystem {
        match self {
            WeightSystem::Real(m) => {
                WeightSystem::Real(m.iter().map(|(&b, &v)| (b, c * v)).collect())
            }
            WeightSystem::Rational(_) => panic!("use scale_rational for rational systems"),
        }
    }

    pub fn scale_rational(&self, c: &BigRational) -> WeightSystem {
        match self {
            WeightSystem::Rational(m) => {
                WeightSystem::Rational(m.iter().map(|(&b, v)| (b, v * c)).collect())
            }
            WeightSystem::Real(_) => panic!("use scale_f64 for float systems"),
        }
    }

    /// Branchwise sum; switch conditions are linear so validity is preserved.
    pub fn superpose(&self, other: &WeightSystem) -> Result<WeightSystem> {
        match (self, other) {
            (WeightSystem::Real(a), WeightSystem::Real(b)) => {
                let mut out = a.clone();
                for (&k, &v) in b {
                    *out.entry(k).or_insert(0.0) += v;
                }
                Ok(WeightSystem::Real(out))
            }
            (WeightSystem::Rational(a), WeightSystem::Rational(b)) => {
                let mut out = a.clone();
                for (k, v) in b {
                    let entry = out.entry(*k).or_insert_with(BigRational::zero);
                    *entry += v;
                }
                Ok(WeightSystem::Rational(out))
            }
            _ => Err(Error::InvalidInput(
                "cannot superpose float and rational weight systems".into(),
            )),
        }
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // adequate for test-sized rationals
    let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    nf / df
}

#[derive(Debug, Clone, Serialize)]
pub struct SwitchCheck {
    pub valid: bool,
    pub violations: Vec<u32>,
}

/// Checks every switch balance Σ side_a = Σ side_b: exact for rational
/// weights, tolerance 1e-12 for floats. Errors on missing or negative
/// weights.
pub fn validate_switch_conditions(track: &TrainTrack, w: &WeightSystem) -> Result<SwitchCheck> {
    track.validate()?;
    match w {
        WeightSystem::Real(m) => {
            for &b in &track.branches {
                match m.get(&b) {
                    None => return Err(Error::MissingWeight(b)),
                    Some(&v) if v < 0.0 => return Err(Error::NegativeWeight(b)),
                    _ => {}
                }
            }
            let mut violations = Vec::new();
            for s in &track.switches {
                let sa: f64 = s.side_a.iter().map(|b| m[b]).sum();
                let sb: f64 = s.side_b.iter().map(|b| m[b]).sum();
                let scale = 1.0f64.max(sa.abs()).max(sb.abs());
                if (sa - sb).abs() > 1e-12 * scale {
                    violations.push(s.id);
                }
            }
            Ok(SwitchCheck {
                valid: violations.is_empty(),
                violations,
            })
        }
        WeightSystem::Rational(m) => {
            for &b in &track.branches {
                match m.get(&b) {
                    None => return Err(Error::MissingWeight(b)),
                    Some(v) if v.is_negative() => return Err(Error::NegativeWeight(b)),
                    _ => {}
                }
            }
            let mut violations = Vec::new();
            for s in &track.switches {
                let sa: BigRational = s.side_a.iter().map(|b| m[b].clone()).sum();
                let sb: BigRational = s.side_b.iter().map(|b| m[b].clone()).sum();
                if sa != sb {
                    violations.push(s.id);
                }
            }
            Ok(SwitchCheck {
                valid: violations.is_empty(),
                violations,
            })
        }
    }
}

/// Monotone partial sums Σ_{k≤n} w(e_k)² along the given branch enumeration.
pub fn l2_partial_sums(w: &WeightSystem, ordering: &[BranchId]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ordering.len());
    let mut acc = 0.0;
    for &b in ordering {
        let v = w.get_f64(b).ok_or(Error::MissingWeight(b))?;
        acc += v * v;
        out.push(acc);
    }
    Ok(out)
}

/// Analytic description of the infinite continuation of a weight system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailBound {
    /// The listed support is the whole system; the ℓ² sum is a finite sum.
    CompleteSupport,
    /// Σ over the unlisted branches of w² is at most `bound`.
    SquareSummable { bound: f64 },
    /// Beyond the support, w(e_k) ≥ coefficient · k^(−exponent): the square
    /// sum diverges whenever exponent ≤ 1/2 and the coefficient is positive.
    DivergentMinorant { coefficient: f64, exponent: f64 },
    /// Finitely many samples of an infinite system, no tail information.
    Sampled,
}

/// Weight system plus tail information, as stored in weights files.
#[derive(Debug, Clone)]
pub struct TailedWeights {
    pub weights: WeightSystem,
    pub tail: TailBound,
}

impl TailedWeights {
    pub fn finite(weights: WeightSystem) -> Self {
        TailedWeights {
            weights,
            tail: TailBound::CompleteSupport,
        }
    }

    /// Weights files are either a bare {branch: number} map (complete
    /// support) or {"weights": {...}, "tail": {"kind": ...}}.
    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Full {
            weights: BTreeMap<String, f64>,
            tail: TailBound,
        }
        if let Ok(full) = serde_json::from_str::<Full>(s) {
            return Ok(TailedWeights {
                weights: WeightSystem::Real(parse_branch_map(full.weights)?),
                tail: full.tail,
            });
        }
        let bare: BTreeMap<String, f64> = serde_json::from_str(s)?;
        Ok(TailedWeights {
            weights: WeightSystem::Real(parse_branch_map(bare)?),
            tail: TailBound::CompleteSupport,
        })
    }
}

fn parse_branch_map(m: BTreeMap<String, f64>) -> Result<BTreeMap<BranchId, f64>> {
    m.into_iter()
        .map(|(k, v)| {
            k.parse::<BranchId>()
                .map(|b| (b, v))
                .map_err(|_| Error::InvalidInput(format!("bad branch id {k:?}")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Member,
    NonMember,
    Unknown,
}

/// Decides Σ w² < ∞: exactly for finite support or tail-bounded closed
/// forms, Unknown for bare samples. Errors when the supported part violates
/// the switch conditions.
pub fn ml_int_membership(
    track: &TrainTrack,
    w: &TailedWeights,
    _tol: f64,
) -> Result<Membership> {
    let check = validate_switch_conditions(track, &w.weights)?;
    if !check.valid {
        return Err(Error::SwitchViolation(check.violations));
    }
    Ok(match &w.tail {
        TailBound::CompleteSupport => Membership::Member,
        TailBound::SquareSummable { bound } if bound.is_finite() && *bound >= 0.0 => {
            Membership::Member
        }
        TailBound::SquareSummable { .. } => Membership::Unknown,
        TailBound::DivergentMinorant {
            coefficient,
            exponent,
        } => {
            if *coefficient > 0.0 && *exponent <= 0.5 {
                Membership::NonMember
            } else {
                Membership::Unknown
            }
        }
        TailBound::Sampled => Membership::Unknown,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Alpha,
    BetaPants,
    BetaHexagon,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    pub id: u32,
    pub kind: CurveKind,
    /// Multiset of crossed branches (repeats = multiple crossings).
    pub crossed_branches: Vec<BranchId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFamily {
    pub curves: Vec<Curve>,
}

/// Combinatorial intersection proxy: Σ of weights over the crossed-branch
/// multiset. Exact when the curve is efficient against the track, an upper
/// comparison otherwise.
pub fn intersection_estimate(
    track: &TrainTrack,
    w: &WeightSystem,
    curve: &Curve,
) -> Result<f64> {
    let mut total = 0.0;
    for &b in &curve.crossed_branches {
        if !track.branches.contains(&b) {
            return Err(Error::UnknownBranch(b));
        }
        total += w.get_f64(b).ok_or(Error::MissingWeight(b))?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub sum_weights_sq: f64,
    pub sum_intersections_sq: f64,
    pub bound_constant: f64,
    /// Σ i(γ,μ)² ≤ B² Σ w² (Cauchy–Schwarz over ≤ B crossings per curve).
    pub intersections_bounded: bool,
    /// Σ w² ≤ B² Σ i(γ,μ)² (every branch crossed by some curve).
    pub weights_bounded: bool,
}

/// Two-sided ℓ² comparison over a finite window: requires every branch
/// crossed at least once, every curve crossing at most B branches and every
/// branch crossed by at most B curves, where B is the track valence bound.
pub fn l2_equivalence_check(
    track: &TrainTrack,
    w: &WeightSystem,
    curves: &CurveFamily,
) -> Result<EquivalenceReport> {
    let b_const = track.valence_bound;
    let mut crossings_per_branch: BTreeMap<BranchId, usize> =
        track.branches.iter().map(|&b| (b, 0)).collect();
    for c in &curves.curves {
        if c.crossed_branches.is_empty() {
            continue;
        }
        if c.crossed_branches.len() > b_const {
            return Err(Error::CoverageViolation(format!(
                "curve {} crosses {} branches (bound {})",
                c.id,
                c.crossed_branches.len(),
                b_const
            )));
        }
        for &br in &c.crossed_branches {
            match crossings_per_branch.get_mut(&br) {
                Some(n) => *n += 1,
                None => return Err(Error::UnknownBranch(br)),
            }
        }
    }
    for (&br, &n) in &crossings_per_branch {
        if n == 0 {
            return Err(Error::CoverageViolation(format!(
                "branch {br} is crossed by no curve"
            )));
        }
        if n > b_const {
            return Err(Error::CoverageViolation(format!(
                "branch {br} is crossed by {n} curves (bound {b_const})"
            )));
        }
    }

    let sum_weights_sq: f64 = track
        .branches
        .iter()
        .map(|&b| {
            let v = w.get_f64(b).unwrap_or(0.0);
            v * v
        })
        .sum();
    let mut sum_intersections_sq = 0.0;
    for c in &curves.curves {
        let i = intersection_estimate(track, w, c)?;
        sum_intersections_sq += i * i;
    }
    let b2 = (b_const * b_const) as f64;
    let slack = 1e-9 * (1.0 + sum_weights_sq.max(sum_intersections_sq));
    Ok(EquivalenceReport {
        sum_weights_sq,
        sum_intersections_sq,
        bound_constant: b2,
        intersections_bounded: sum_intersections_sq <= b2 * sum_weights_sq + slack,
        weights_bounded: sum_weights_sq <= b2 * sum_intersections_sq + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Two pants glued along three cuffs: arcs a_ij in one pants, b_ij in the
    /// other, one switch per cuff balancing the two sides.
    fn pants_pair_track() -> TrainTrack {
        TrainTrack {
            branches: vec![1, 2, 3, 4, 5, 6],
            switches: vec![
                Switch {
                    id: 1,
                    side_a: vec![1, 2],
                    side_b: vec![4, 5],
                },
                Switch {
                    id: 2,
                    side_a: vec![1, 3],
                    side_b: vec![4, 6],
                },
                Switch {
                    id: 3,
                    side_a: vec![2, 3],
                    side_b: vec![5, 6],
                },
            ],
            valence_bound: 4,
        }
    }

    fn simple_track() -> TrainTrack {
        // side_a = {5}, side_b = {2,3} at one switch; a second switch closes
        // the other ends
        TrainTrack {
            branches: vec![2, 3, 5],
            switches: vec![
                Switch {
                    id: 0,
                    side_a: vec![5],
                    side_b: vec![2, 3],
                },
                Switch {
                    id: 1,
                    side_a: vec![5],
                    side_b: vec![2, 3],
                },
            ],
            valence_bound: 4,
        }
    }

    #[test]
    fn switch_balance_examples() {
        let track = simple_track();
        let good = WeightSystem::real([(5, 5.0), (2, 2.0), (3, 3.0)]);
        assert!(validate_switch_conditions(&track, &good).unwrap().valid);

        let bad = WeightSystem::real([(5, 5.0), (2, 2.0), (3, 2.0)]);
        let check = validate_switch_conditions(&track, &bad).unwrap();
        assert!(!check.valid);
        assert_eq!(check.violations, vec![0, 1]);

        let zero = WeightSystem::real([(5, 0.0), (2, 0.0), (3, 0.0)]);
        assert!(validate_switch_conditions(&track, &zero).unwrap().valid);
    }

    #[test]
    fn rational_mode_is_exact() {
        let track = simple_track();
        let w = WeightSystem::rational([
            (5, rat(1, 3)),
            (2, rat(1, 6)),
            (3, rat(1, 6)),
        ]);
        assert!(validate_switch_conditions(&track, &w).unwrap().valid);
        // 1/3 = 1/6 + 1/6 holds exactly where floats would be near-misses
        let w2 = w.superpose(&w).unwrap();
        assert!(validate_switch_conditions(&track, &w2).unwrap().valid);
        let w3 = w.scale_rational(&rat(7, 5));
        assert!(validate_switch_conditions(&track, &w3).unwrap().valid);
    }

    #[test]
    fn missing_and_negative_weights_error() {
        let track = simple_track();
        let missing = WeightSystem::real([(5, 1.0), (2, 1.0)]);
        assert!(matches!(
            validate_switch_conditions(&track, &missing),
            Err(Error::MissingWeight(3))
        ));
        let negative = WeightSystem::real([(5, 1.0), (2, 1.0), (3, -1.0)]);
        assert!(matches!(
            validate_switch_conditions(&track, &negative),
            Err(Error::NegativeWeight(3))
        ));
    }

    #[test]
    fn partial_sums_basel() {
        let n = 1_000_000u32;
        let w = WeightSystem::Real((1..=n).map(|k| (k, 1.0 / k as f64)).collect());
        let ordering: Vec<BranchId> = (1..=n).collect();
        let sums = l2_partial_sums(&w, &ordering).unwrap();
        let last = *sums.last().unwrap();
        assert!((last - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);
        assert!(sums.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn partial_sums_harmonic_divergence() {
        let n = 10_000u32;
        let w = WeightSystem::Real((1..=n).map(|k| (k, 1.0 / (k as f64).sqrt())).collect());
        let ordering: Vec<BranchId> = (1..=n).collect();
        let sums = l2_partial_sums(&w, &ordering).unwrap();
        assert!(*sums.last().unwrap() > 9.0);
    }

    #[test]
    fn membership_three_ways() {
        let track = pants_pair_track();
        let w = WeightSystem::real((1..=6).map(|b| (b, 1.0)));
        let finite = TailedWeights::finite(w.clone());
        assert_eq!(
            ml_int_membership(&track, &finite, 1e-12).unwrap(),
            Membership::Member
        );
        let bounded = TailedWeights {
            weights: w.clone(),
            tail: TailBound::SquareSummable { bound: 1.0 / 6.0 },
        };
        assert_eq!(
            ml_int_membership(&track, &bounded, 1e-12).unwrap(),
            Membership::Member
        );
        let divergent = TailedWeights {
            weights: w.clone(),
            tail: TailBound::DivergentMinorant {
                coefficient: 1.0,
                exponent: 0.5,
            },
        };
        assert_eq!(
            ml_int_membership(&track, &divergent, 1e-12).unwrap(),
            Membership::NonMember
        );
        let sampled = TailedWeights {
            weights: w,
            tail: TailBound::Sampled,
        };
        assert_eq!(
            ml_int_membership(&track, &sampled, 1e-12).unwrap(),
            Membership::Unknown
        );
    }

    #[test]
    fn membership_requires_valid_switches() {
        let track = simple_track();
        let bad = TailedWeights::finite(WeightSystem::real([(5, 5.0), (2, 2.0), (3, 2.0)]));
        assert!(matches!(
            ml_int_membership(&track, &bad, 1e-12),
            Err(Error::SwitchViolation(_))
        ));
    }

    #[test]
    fn intersection_estimates() {
        let track = pants_pair_track();
        let w = WeightSystem::real([(1, 0.5), (2, 0.25), (3, 0.0), (4, 0.25), (5, 0.5), (6, 0.3)]);
        let curve = Curve {
            id: 0,
            kind: CurveKind::Alpha,
            crossed_branches: vec![1, 2],
        };
        assert_eq!(intersection_estimate(&track, &w, &curve).unwrap(), 0.75);
        let none = Curve {
            id: 1,
            kind: CurveKind::BetaPants,
            crossed_branches: vec![],
        };
        assert_eq!(intersection_estimate(&track, &w, &none).unwrap(), 0.0);
        let twice = Curve {
            id: 2,
            kind: CurveKind::BetaHexagon,
            crossed_branches: vec![6, 6],
        };
        assert!((intersection_estimate(&track, &w, &twice).unwrap() - 0.6).abs() < 1e-15);
        let unknown = Curve {
            id: 3,
            kind: CurveKind::Alpha,
            crossed_branches: vec![7],
        };
        assert!(intersection_estimate(&track, &w, &unknown).is_err());
    }

    #[test]
    fn one_curve_per_branch_makes_sums_equal() {
        let mut track = pants_pair_track();
        track.valence_bound = 4;
        let w = WeightSystem::real((1..=6).map(|b| (b, b as f64 / 10.0)));
        let curves = CurveFamily {
            curves: (1..=6)
                .map(|b| Curve {
                    id: b,
                    kind: CurveKind::Alpha,
                    crossed_branches: vec![b],
                })
                .collect(),
        };
        let rep = l2_equivalence_check(&track, &w, &curves).unwrap();
        assert!((rep.sum_weights_sq - rep.sum_intersections_sq).abs() < 1e-12);
        assert!(rep.intersections_bounded && rep.weights_bounded);
    }

    #[test]
    fn coverage_violations_error() {
        let track = pants_pair_track();
        let w = WeightSystem::real((1..=6).map(|b| (b, 1.0)));
        let none = CurveFamily { curves: vec![] };
        assert!(l2_equivalence_check(&track, &w, &none).is_err());
        let too_many = CurveFamily {
            curves: vec![Curve {
                id: 0,
                kind: CurveKind::Alpha,
                crossed_branches: vec![1, 2, 3, 4, 5],
            }],
        };
        assert!(l2_equivalence_check(&track, &w, &too_many).is_err());
    }
}
