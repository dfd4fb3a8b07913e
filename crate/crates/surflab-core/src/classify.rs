//! Recurrent / Transient / Inconclusive verdicts for a generator, by
//! resistance exhaustion, by explicit flow certificate, or by the
//! zero-propagation argument on tree ends.
//!
//! Numerical verdicts are labeled as such in the evidence: transience fires
//! when the per-doubling resistance increment stalls, recurrence when the
//! profile fits logarithmic growth with R² ≥ 0.99 over at least three
//! doublings. Tree-end verdicts are exact: the trace mechanizes the
//! leaf-peeling and ray-constancy forcing and can be replayed on any
//! truncation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{Attachment, Family, FluteKey, GraphGenerator, VertexKey};
use crate::graph::{build_truncation, GraphView, VertexId};
use crate::potential::{divergence, net_flux, solve_dirichlet, EdgeFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Recurrent,
    Transient,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ResistanceProfile,
    FlowCertificate,
    TreeEnds,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeVerdict {
    pub verdict: Verdict,
    pub method: Method,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Profile(ProfileEvidence),
    Flow(FlowEvidence),
    TreeEnds(TreeEndsEvidence),
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileEvidence {
    pub profile: Vec<(u32, f64)>,
    pub increments: Vec<f64>,
    pub last_relative_increment: f64,
    pub tolerance: f64,
    pub log_fit: LogFit,
}

/// Least-squares fit of r_eff against ln(radius).
#[derive(Debug, Clone, Serialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowEvidence {
    pub source_flux: f64,
    pub max_interior_divergence: f64,
    pub energy_total: f64,
    pub energy_partials: Vec<f64>,
    pub increments_geometric: bool,
    pub analytic_bound: Option<f64>,
    pub accepted_by: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeEndsEvidence {
    pub trace: Vec<TraceStep>,
    pub replay: Option<ReplayReport>,
}

/// One forcing step of the zero-propagation argument. Replay executes the
/// steps in order and verifies each local justification on a truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    /// Peel the finite attachments hanging off a ray (or the root): every
    /// edge with a degree-one endpoint carries 0, and the balance at each
    /// vertex off the source forces zeros inward until the attachment dies.
    ZeroFiniteAttachments { ray: Option<u16>, level: u32 },
    /// An infinite bare sub-ray attached at every vertex of a ray: balance
    /// makes |u| constant along it, and square-summability forces 0.
    ZeroSubRays { ray: u16, level: u32 },
    /// The main ray itself, after everything hanging off it is zero.
    ZeroRay { ray: u16, level: u32 },
    /// All root edges are zero, so the source flux of any admissible u is 0
    /// and no transience certificate exists.
    RootBalance,
}

/// Result of replaying a trace on a truncation: which edges were forced to
/// zero with complete local justification.
#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub radius: u32,
    pub edges_total: usize,
    pub edges_forced: usize,
    /// Every edge whose endpoints are further than the deepest finite
    /// attachment from the shell was forced (the shell can cut attachments,
    /// whose stumps legitimately stay unresolved).
    pub interior_complete: bool,
    pub steps_verified: usize,
}

/// Effective resistance of the root against the boundary shell at each
/// radius. Nondecreasing in the radius by Rayleigh monotonicity.
pub fn resistance_profile(gen: &GraphGenerator, radii: &[u32]) -> Result<Vec<(u32, f64)>> {
    resistance_profile_with(gen, radii, &crate::graph::TruncationConfig::default())
}

pub fn resistance_profile_with(
    gen: &GraphGenerator,
    radii: &[u32],
    cfg: &crate::graph::TruncationConfig,
) -> Result<Vec<(u32, f64)>> {
    if radii.is_empty() || radii[0] < 1 {
        return Err(Error::InvalidInput("radii must be >= 1".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("radii must be strictly increasing".into()));
    }
    let mut profile = Vec::with_capacity(radii.len());
    for &r in radii {
        let view = crate::graph::build_truncation_with(gen, r, cfg)?;
        let shell = view.boundary_shell();
        if shell.is_empty() {
            return Err(Error::InvalidInput(format!(
                "radius {r} swallows the whole component; no shell to ground"
            )));
        }
        let sol = solve_dirichlet(&view, VertexId(0), &shell)?;
        profile.push((r, sol.r_eff));
    }
    Ok(profile)
}

fn log_fit(profile: &[(u32, f64)]) -> LogFit {
    let n = profile.len() as f64;
    let xs: Vec<f64> = profile.iter().map(|&(r, _)| (r as f64).ln()).collect();
    let ys: Vec<f64> = profile.iter().map(|&(_, v)| v).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    LogFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Decides the walk type from a resistance profile over (roughly) doubling
/// radii. Transient when the last per-doubling increment is below
/// tol·r_eff; Recurrent when the profile fits logarithmic growth (slope > 0,
/// R² ≥ 0.99) over at least three doublings; Inconclusive otherwise.
pub fn classify(profile: &[(u32, f64)], tol: f64) -> Result<TypeVerdict> {
    if profile.len() < 3 {
        return Err(Error::ProfileTooShort(profile.len()));
    }
    for w in profile.windows(2) {
        let ratio = w[1].0 as f64 / w[0].0 as f64;
        if !(1.5..=2.5).contains(&ratio) {
            return Err(Error::InvalidInput(format!(
                "radii must roughly double, got {} -> {}",
                w[0].0, w[1].0
            )));
        }
    }
    let increments: Vec<f64> = profile.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let last = *increments.last().unwrap();
    let current = profile.last().unwrap().1;
    let last_rel = if current > 0.0 { last / current } else { 0.0 };
    let fit = log_fit(profile);
    let evidence = Evidence::Profile(ProfileEvidence {
        profile: profile.to_vec(),
        increments: increments.clone(),
        last_relative_increment: last_rel,
        tolerance: tol,
        log_fit: fit.clone(),
    });
    let verdict = if last_rel < tol {
        Verdict::Transient
    } else if profile.len() >= 4 && fit.slope > 0.0 && fit.r_squared >= 0.99 {
        Verdict::Recurrent
    } else {
        Verdict::Inconclusive
    };
    Ok(TypeVerdict {
        verdict,
        method: Method::ResistanceProfile,
        evidence,
    })
}

/// Checks a transience certificate: an edge function with zero divergence
/// off the source, nonzero source flux, and controlled energy growth
/// (geometric increments, or a supplied analytic bound). Never returns
/// Recurrent — absence of one certificate proves nothing.
pub fn verify_flow_certificate(
    view: &GraphView,
    flow: &EdgeFunction,
    source: VertexId,
    tol: f64,
    analytic_bound: Option<f64>,
) -> Result<TypeVerdict> {
    if flow.len() != view.edge_count() {
        return Err(Error::DomainMismatch {
            what: "edge function",
            expected: view.edge_count(),
            got: flow.len(),
        });
    }
    if !view.contains(source) {
        return Err(Error::UnknownVertex(source.0));
    }
    let div = divergence(view, flow)?;
    let mut max_div = 0.0f64;
    for v in view.vertices() {
        if v != source && view.is_interior(v) {
            max_div = max_div.max(div.get(v).abs());
        }
    }
    let source_flux = net_flux(view, flow, source);

    // energy partial sums over balls around the source
    let dist = view.distances_from(source);
    let max_d = view
        .edges()
        .iter()
        .map(|e| dist[e.tail.index()].max(dist[e.head.index()]))
        .max()
        .unwrap_or(0);
    let mut partials = vec![0.0; max_d as usize + 1];
    for e in view.edges() {
        let d = dist[e.tail.index()].max(dist[e.head.index()]) as usize;
        partials[d] += flow.0[e.id.index()] * flow.0[e.id.index()];
    }
    for k in 1..partials.len() {
        partials[k] += partials[k - 1];
    }
    let energy_total = *partials.last().unwrap_or(&0.0);

    // geometric-decay test on the tail increments
    let increments: Vec<f64> = partials
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let tail_start = increments.len() / 2;
    let tail = &increments[tail_start..];
    let increments_geometric = if tail.iter().all(|&d| d <= tol) {
        true // finite support
    } else {
        tail.windows(2)
            .all(|w| w[1] <= 0.98 * w[0] + tol)
    };

    let divergence_ok = max_div <= tol;
    let flux_ok = source_flux.abs() > 10.0 * tol;
    let bound_ok = analytic_bound.map(|b| energy_total <= b);
    let (verdict, accepted_by) = if divergence_ok && flux_ok && increments_geometric {
        (Verdict::Transient, Some("geometric-decay"))
    } else if divergence_ok && flux_ok && bound_ok == Some(true) {
        (Verdict::Transient, Some("analytic-bound"))
    } else {
        (Verdict::Inconclusive, None)
    };
    Ok(TypeVerdict {
        verdict,
        method: Method::FlowCertificate,
        evidence: Evidence::Flow(FlowEvidence {
            source_flux,
            max_interior_divergence: max_div,
            energy_total,
            energy_partials: partials,
            increments_geometric,
            analytic_bound,
            accepted_by,
        }),
    })
}

/// Recurrence certificate for flute trees: mechanizes the zero-propagation
/// proofs level by level over the (finite-rank) end hierarchy and replays
/// the trace on a truncation of the given radius.
pub fn tree_end_certificate(gen: &GraphGenerator, replay_radius: u32) -> Result<TypeVerdict> {
    let spec = match gen.family() {
        Family::FluteTree(spec) => spec.clone(),
        Family::TrivalentTree => {
            return Err(Error::EndSpec(
                "trivalent tree has uncountably many ends; no countable hierarchy".into(),
            ))
        }
        _ if !gen.is_tree() => return Err(Error::NotATree("family contains cycles")),
        _ => return Err(Error::EndSpec("no end specification for this family".into())),
    };

    let mut trace = Vec::new();
    let two_level = !spec.has_finitely_many_ends();
    let top_level = if two_level { 2 } else { 1 };
    for (r, a) in spec.rays.iter().enumerate() {
        match a {
            Attachment::None => {}
            Attachment::Ray => trace.push(TraceStep::ZeroSubRays {
                ray: r as u16,
                level: 1,
            }),
            _ => trace.push(TraceStep::ZeroFiniteAttachments {
                ray: Some(r as u16),
                level: 1,
            }),
        }
    }
    if !spec.root_attachment.is_none() {
        trace.push(TraceStep::ZeroFiniteAttachments {
            ray: None,
            level: 1,
        });
    }
    for r in 0..spec.rays.len() {
        trace.push(TraceStep::ZeroRay {
            ray: r as u16,
            level: top_level,
        });
    }
    trace.push(TraceStep::RootBalance);

    let replay = replay_trace(gen, &trace, replay_radius)?;
    Ok(TypeVerdict {
        verdict: Verdict::Recurrent,
        method: Method::TreeEnds,
        evidence: Evidence::TreeEnds(TreeEndsEvidence {
            trace,
            replay: Some(replay),
        }),
    })
}

/// Replays a zero-propagation trace on the radius-ball: seeds zeros at true
/// leaves (generator degree one), cascades the balance rule at vertices with
/// one unresolved edge, and applies the constancy-plus-ℓ² rule along rays
/// whose other incident edges are already forced.
pub fn replay_trace(
    gen: &GraphGenerator,
    trace: &[TraceStep],
    radius: u32,
) -> Result<ReplayReport> {
    let spec = match gen.family() {
        Family::FluteTree(spec) => spec.clone(),
        _ => return Err(Error::NotATree("replay only supports flute trees")),
    };
    let view = build_truncation(gen, radius)?;
    let keys = view.keys().expect("generator view has keys");
    let mut forced = vec![false; view.edge_count()];
    let mut steps_verified = 0usize;

    let gen_degree = |v: VertexId| gen.neighbors(&keys[v.index()]).len();
    let all_neighbors_present = |v: VertexId| {
        view.degree(v).unwrap_or(0) == gen_degree(v)
    };

    let in_attachment_class = |v: VertexId, ray: Option<u16>| match (&keys[v.index()], ray) {
        (VertexKey::Flute(FluteKey::Attach { ray: r, .. }), Some(want)) => *r == want,
        (VertexKey::Flute(FluteKey::RootAttach { .. }), None) => true,
        _ => false,
    };

    for step in trace {
        match step {
            TraceStep::ZeroFiniteAttachments { ray, level: _ } => {
                // leaf peeling: cascade the balance rule inside this
                // attachment class until nothing changes
                loop {
                    let mut changed = false;
                    for v in view.vertices() {
                        let key = match view.key(v) {
                            Some(VertexKey::Flute(k)) => k,
                            _ => unreachable!(),
                        };
                        if !in_attachment_class(v, *ray) {
                            continue;
                        }
                        let _ = key;
                        if !all_neighbors_present(v) {
                            continue; // cut by the shell: balance unknowable
                        }
                        let unresolved: Vec<_> = view
                            .incident(v)
                            .iter()
                            .filter(|&&(e, _)| !forced[e.index()])
                            .collect();
                        if unresolved.len() == 1 {
                            forced[unresolved[0].0.index()] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                steps_verified += 1;
            }
            TraceStep::ZeroSubRays { ray, level: _ } => {
                // sub-ray vertices are bare degree-2 paths: constancy along
                // the infinite tail plus square-summability gives zero; mark
                // every sub-ray edge (host link included) in the view
                let mut premise_ok = true;
                for v in view.vertices() {
                    if let Some(VertexKey::Flute(FluteKey::Attach { ray: r, .. })) = view.key(v) {
                        if r == ray && gen_degree(v) != 2 {
                            premise_ok = false;
                        }
                    }
                }
                if !premise_ok {
                    return Err(Error::EndSpec(format!(
                        "sub-ray premise fails on ray {ray}: attachment vertices not degree two"
                    )));
                }
                for e in view.edges() {
                    let k_t = view.key(e.tail);
                    let k_h = view.key(e.head);
                    let on_subray = |k: Option<&VertexKey>| {
                        matches!(
                            k,
                            Some(VertexKey::Flute(FluteKey::Attach { ray: r, .. })) if r == ray
                        )
                    };
                    if on_subray(k_t) || on_subray(k_h) {
                        forced[e.id.index()] = true;
                    }
                }
                steps_verified += 1;
            }
            TraceStep::ZeroRay { ray, level: _ } => {
                // check that every ray vertex in the view has exactly its two
                // ray edges unresolved (attachments peeled), then force them
                for v in view.vertices() {
                    if let Some(VertexKey::Flute(FluteKey::Ray { ray: r, .. })) = view.key(v) {
                        if r != ray || !all_neighbors_present(v) {
                            continue;
                        }
                        let unresolved = view
                            .incident(v)
                            .iter()
                            .filter(|&&(e, _)| !forced[e.index()])
                            .count();
                        if unresolved > 2 {
                            return Err(Error::EndSpec(format!(
                                "ray {ray} vertex still has {unresolved} unresolved edges"
                            )));
                        }
                    }
                }
                for e in view.edges() {
                    let on_ray = |v: VertexId| {
                        matches!(
                            view.key(v),
                            Some(VertexKey::Flute(FluteKey::Ray { ray: r, .. })) if *r == *ray
                        )
                    };
                    if on_ray(e.tail) || on_ray(e.head) {
                        forced[e.id.index()] = true;
                    }
                }
                steps_verified += 1;
            }
            TraceStep::RootBalance => {
                // with every root edge forced to zero, the source flux of any
                // admissible u vanishes, contradicting a certificate
                let root_ok = view
                    .incident(VertexId(0))
                    .iter()
                    .all(|&(e, _)| forced[e.index()]);
                if !root_ok && view.degree(VertexId(0))? > 0 {
                    // legitimate only if the root has unresolved cut stumps
                    let complete = all_neighbors_present(VertexId(0));
                    if complete {
                        return Err(Error::EndSpec(
                            "root balance reached with unresolved root edges".into(),
                        ));
                    }
                }
                steps_verified += 1;
            }
        }
    }

    let edges_forced = forced.iter().filter(|&&f| f).count();
    let depth_cut = radius.saturating_sub(spec.max_finite_attachment_depth() + 1);
    let dist = view.distances_from(VertexId(0));
    let interior_complete = view.edges().iter().all(|e| {
        let d = dist[e.tail.index()].max(dist[e.head.index()]);
        d > depth_cut || forced[e.id.index()]
    });

    Ok(ReplayReport {
        radius,
        edges_total: view.edge_count(),
        edges_forced,
        interior_complete,
        steps_verified,
    })
}
