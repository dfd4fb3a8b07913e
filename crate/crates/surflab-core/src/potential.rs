//! Discrete potential theory on truncations: gradient/divergence calculus,
//! Dirichlet energy, harmonic solves with unit current, and Green's-function
//! partial sums for the simple random walk.
//!
//! Conventions (reversible-chain, unit conductances): m(x) = deg(x) with
//! loops counting twice, (∇f)(e) = f(e⁺) − f(e⁻), and
//! ∇*(g)(x) = (1/m(x)) [Σ_{e:e⁺=x} g(e) − Σ_{e:e⁻=x} g(e)],
//! so ⟨∇f, g⟩_E = ⟨f, ∇*g⟩_{V,m} exactly.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{GraphView, VertexId};

/// Real-valued function on the vertices of a view.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction(pub Vec<f64>);

/// Real-valued function on the oriented edges of a view; the sign of each
/// value is relative to the edge's stored orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFunction(pub Vec<f64>);

impl VertexFunction {
    pub fn zeros(view: &GraphView) -> Self {
        VertexFunction(vec![0.0; view.vertex_count()])
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.0[v.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_json(&self) -> String {
        to_indexed_json(&self.0)
    }

    pub fn from_json(s: &str, view: &GraphView) -> Result<Self> {
        Ok(VertexFunction(from_indexed_json(
            s,
            view.vertex_count(),
            "vertex function",
        )?))
    }
}

impl EdgeFunction {
    pub fn zeros(view: &GraphView) -> Self {
        EdgeFunction(vec![0.0; view.edge_count()])
    }

    pub fn get(&self, e: crate::graph::EdgeId) -> f64 {
        self.0[e.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_json(&self) -> String {
        to_indexed_json(&self.0)
    }

    pub fn from_json(s: &str, view: &GraphView) -> Result<Self> {
        Ok(EdgeFunction(from_indexed_json(
            s,
            view.edge_count(),
            "edge function",
        )?))
    }
}

/// Flow/potential file format: JSON map from id (string) to double, emitted
/// in numeric id order so serialization is deterministic.
fn to_indexed_json(values: &[f64]) -> String {
    let mut out = String::from("{");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('"');
        out.push_str(&i.to_string());
        out.push_str("\":");
        out.push_str(&serde_json::to_string(v).expect("f64 serializes"));
    }
    out.push('}');
    out
}

fn from_indexed_json(s: &str, expected: usize, what: &'static str) -> Result<Vec<f64>> {
    let map: BTreeMap<String, f64> = serde_json::from_str(s)?;
    if map.len() != expected {
        return Err(Error::DomainMismatch {
            what: match what {
                "vertex function" => "vertex function",
                _ => "edge function",
            },
            expected,
            got: map.len(),
        });
    }
    let mut values = vec![0.0; expected];
    for (k, v) in map {
        let idx: usize = k
            .parse()
            .map_err(|_| Error::InvalidInput(format!("non-numeric id {k:?} in {what}")))?;
        if idx >= expected {
            return Err(Error::InvalidInput(format!("id {idx} out of range in {what}")));
        }
        values[idx] = v;
    }
    Ok(values)
}

/// (∇f)(e) = f(e⁺) − f(e⁻); loops map to 0.
pub fn gradient(view: &GraphView, f: &VertexFunction) -> Result<EdgeFunction> {
    if f.len() != view.vertex_count() {
        return Err(Error::DomainMismatch {
            what: "vertex function",
            expected: view.vertex_count(),
            got: f.len(),
        });
    }
    let values = view
        .edges()
        .iter()
        .map(|e| f.0[e.head.index()] - f.0[e.tail.index()])
        .collect();
    Ok(EdgeFunction(values))
}

/// ∇*(g)(x) = (1/m(x)) [Σ incoming − Σ outgoing]; a loop contributes once
/// with each sign, net 0. Errors on isolated vertices (m = 0).
pub fn divergence(view: &GraphView, g: &EdgeFunction) -> Result<VertexFunction> {
    if g.len() != view.edge_count() {
        return Err(Error::DomainMismatch {
            what: "edge function",
            expected: view.edge_count(),
            got: g.len(),
        });
    }
    let mut net = vec![0.0; view.vertex_count()];
    for e in view.edges() {
        net[e.head.index()] += g.0[e.id.index()];
        net[e.tail.index()] -= g.0[e.id.index()];
    }
    let mut values = Vec::with_capacity(view.vertex_count());
    for v in view.vertices() {
        let m = view.degree(v)?;
        if m == 0 {
            return Err(Error::IsolatedVertex(v.0));
        }
        values.push(net[v.index()] / m as f64);
    }
    Ok(VertexFunction(values))
}

/// Net flux into `v` (the divergence without the 1/m normalization).
pub fn net_flux(view: &GraphView, g: &EdgeFunction, v: VertexId) -> f64 {
    let mut net = 0.0;
    for &(e, is_head) in view.incident(v) {
        let val = g.0[e.index()];
        if view.edge(e).is_loop() {
            continue; // both ends cancel
        }
        net += if is_head { val } else { -val };
    }
    net
}

/// Σ_e g(e)² (unit resistances).
pub fn dirichlet_energy(g: &EdgeFunction) -> f64 {
    g.0.iter().map(|v| v * v).sum()
}

pub fn edge_inner_product(a: &EdgeFunction, b: &EdgeFunction) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum()
}

/// ⟨f, h⟩_{V,m} = Σ_x m(x) f(x) h(x).
pub fn vertex_inner_product(view: &GraphView, f: &VertexFunction, h: &VertexFunction) -> f64 {
    view.vertices()
        .map(|v| view.degree(v).unwrap_or(0) as f64 * f.get(v) * h.get(v))
        .sum()
}

/// Options for the conjugate-gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Absolute residual target relative to the unit source norm.
    pub tolerance: f64,
    /// Iteration cap; None means 4n + 100.
    pub max_iterations: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-12,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub potentials: VertexFunction,
    /// current = ∇(potentials): divergence is +1/m at the source, 0 at other
    /// interior vertices (unit net flux converging on the source along the
    /// stored orientations; the physical outgoing current is its negative).
    pub current: EdgeFunction,
    pub r_eff: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves the unit-current discrete Dirichlet problem on the view: potentials
/// are 0 on `grounded`, harmonic elsewhere except for the unit source.
pub fn solve_dirichlet(
    view: &GraphView,
    source: VertexId,
    grounded: &BTreeSet<VertexId>,
) -> Result<DirichletSolution> {
    solve_dirichlet_with(view, source, grounded, &SolveOptions::default())
}

pub fn solve_dirichlet_with(
    view: &GraphView,
    source: VertexId,
    grounded: &BTreeSet<VertexId>,
    opts: &SolveOptions,
) -> Result<DirichletSolution> {
    if !view.contains(source) {
        return Err(Error::UnknownVertex(source.0));
    }
    for &g in grounded {
        if !view.contains(g) {
            return Err(Error::UnknownVertex(g.0));
        }
    }
    if grounded.is_empty() {
        return Err(Error::InvalidInput("grounded set must be nonempty".into()));
    }
    if grounded.contains(&source) {
        return Err(Error::InvalidInput("source must not be grounded".into()));
    }
    if !view.is_connected() {
        return Err(Error::Disconnected);
    }

    let n = view.vertex_count();
    let is_grounded: Vec<bool> = {
        let mut g = vec![false; n];
        for &v in grounded {
            g[v.index()] = true;
        }
        g
    };

    // Graph Laplacian restricted to free vertices, matrix-free over edges.
    // Loops drop out of L entirely (zero potential difference).
    let apply = |phi: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|x| *x = 0.0);
        for e in view.edges() {
            if e.is_loop() {
                continue;
            }
            let t = e.tail.index();
            let h = e.head.index();
            let d = phi[t] - phi[h];
            if !is_grounded[t] {
                out[t] += d;
            }
            if !is_grounded[h] {
                out[h] -= d;
            }
        }
    };

    let mut b = vec![0.0; n];
    b[source.index()] = 1.0;

    // Jacobi-preconditioned CG; deterministic (fixed iteration order).
    let diag: Vec<f64> = view
        .vertices()
        .map(|v| {
            let nonloop = view
                .incident(v)
                .iter()
                .filter(|&&(e, _)| !view.edge(e).is_loop())
                .count();
            if is_grounded[v.index()] || nonloop == 0 {
                1.0
            } else {
                nonloop as f64
            }
        })
        .collect();

    let mut phi = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    for v in 0..n {
        if is_grounded[v] {
            r[v] = 0.0;
            z[v] = 0.0;
        }
    }
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let max_iter = opts.max_iterations.unwrap_or(4 * n + 100);
    let mut iterations = 0;
    let mut res_norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();

    while res_norm > opts.tolerance && iterations < max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break; // numerically singular direction
        }
        let alpha = rz / pap;
        for v in 0..n {
            if !is_grounded[v] {
                phi[v] += alpha * p[v];
                r[v] -= alpha * ap[v];
            }
        }
        let mut rz_next = 0.0;
        for v in 0..n {
            if !is_grounded[v] {
                z[v] = r[v] / diag[v];
                rz_next += r[v] * z[v];
            }
        }
        let beta = rz_next / rz;
        rz = rz_next;
        for v in 0..n {
            if !is_grounded[v] {
                p[v] = z[v] + beta * p[v];
            }
        }
        iterations += 1;
        res_norm = r
            .iter()
            .enumerate()
            .filter(|(v, _)| !is_grounded[*v])
            .map(|(_, x)| x * x)
            .sum::<f64>()
            .sqrt();
    }

    if res_norm > opts.tolerance {
        return Err(Error::SolverDidNotConverge {
            iterations,
            residual: res_norm,
        });
    }

    let potentials = VertexFunction(phi);
    let current = gradient(view, &potentials)?;
    let r_eff = potentials.get(source);
    Ok(DirichletSolution {
        potentials,
        current,
        r_eff,
        iterations,
        residual: res_norm,
    })
}

/// Σ_{n=1..n_steps} p⁽ⁿ⁾(x,y) for the simple random walk, killed at the
/// boundary shell (a lower bound for the infinite-graph partial sums).
pub fn green_partial(
    view: &GraphView,
    x: VertexId,
    y: VertexId,
    n_steps: usize,
) -> Result<f64> {
    if !view.contains(x) {
        return Err(Error::UnknownVertex(x.0));
    }
    if !view.contains(y) {
        return Err(Error::UnknownVertex(y.0));
    }
    let n = view.vertex_count();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    p[x.index()] = 1.0;
    let mut total = 0.0;
    for _ in 0..n_steps {
        q.iter_mut().for_each(|v| *v = 0.0);
        for v in view.vertices() {
            let mass = p[v.index()];
            if mass == 0.0 || view.is_boundary(v) {
                continue; // killed at the shell
            }
            let deg = view.degree(v)? as f64;
            if deg == 0.0 {
                return Err(Error::IsolatedVertex(v.0));
            }
            let step = mass / deg;
            for &(e, _) in view.incident(v) {
                q[view.opposite(v, e).index()] += step;
            }
        }
        std::mem::swap(&mut p, &mut q);
        total += p[y.index()];
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::{build_truncation, EdgeId, OrientedEdge};

    fn path_view(edges_count: usize) -> GraphView {
        let n = edges_count + 1;
        let mut boundary = vec![false; n];
        boundary[n - 1] = true;
        let edges = (0..edges_count)
            .map(|k| OrientedEdge {
                id: EdgeId(k as u32),
                tail: VertexId(k as u32),
                head: VertexId(k as u32 + 1),
            })
            .collect();
        GraphView::from_parts("custom", serde_json::json!({}), 1, boundary, edges).unwrap()
    }

    #[test]
    fn gradient_basics() {
        let view = path_view(1);
        let f = VertexFunction(vec![0.5, 2.0]);
        let g = gradient(&view, &f).unwrap();
        assert_eq!(g.0, vec![1.5]);

        let constant = VertexFunction(vec![3.0, 3.0]);
        assert_eq!(gradient(&view, &constant).unwrap().0, vec![0.0]);
    }

    #[test]
    fn gradient_of_bfs_distance_on_path() {
        let view = path_view(6);
        let f = VertexFunction((0..7).map(|k| k as f64).collect());
        let g = gradient(&view, &f).unwrap();
        assert!(g.0.iter().all(|&v| (v.abs() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn divergence_on_star() {
        // K_{1,3}, all edges oriented outward from the center 0
        let edges = (1..=3)
            .map(|k| OrientedEdge {
                id: EdgeId(k - 1),
                tail: VertexId(0),
                head: VertexId(k),
            })
            .collect();
        let view = GraphView::from_parts(
            "custom",
            serde_json::json!({}),
            1,
            vec![false, true, true, true],
            edges,
        )
        .unwrap();
        let g = EdgeFunction(vec![1.0; 3]);
        let div = divergence(&view, &g).unwrap();
        assert_eq!(div.get(VertexId(0)), -1.0); // -3/3
        for k in 1..=3 {
            assert_eq!(div.get(VertexId(k)), 1.0);
        }
        let zero = EdgeFunction(vec![0.0; 3]);
        assert!(divergence(&view, &zero).unwrap().0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn adjointness_on_grid_view() {
        let gen = generators::grid(2).unwrap();
        let view = build_truncation(&gen, 4).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let f = VertexFunction((0..view.vertex_count()).map(|_| next()).collect());
        let g = EdgeFunction((0..view.edge_count()).map(|_| next()).collect());
        let lhs = edge_inner_product(&gradient(&view, &f).unwrap(), &g);
        let rhs = vertex_inner_product(&view, &f, &divergence(&view, &g).unwrap());
        assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn dirichlet_energy_sums_squares() {
        assert_eq!(dirichlet_energy(&EdgeFunction(vec![1.0; 12])), 12.0);
        assert_eq!(dirichlet_energy(&EdgeFunction(vec![0.0; 5])), 0.0);
    }

    #[test]
    fn unit_resistors_in_parallel() {
        let gen = generators::grid(2).unwrap();
        let view = build_truncation(&gen, 1).unwrap();
        let sol = solve_dirichlet(&view, VertexId(0), &view.boundary_shell()).unwrap();
        assert!((sol.r_eff - 0.25).abs() < 1e-10);
        assert!((dirichlet_energy(&sol.current) - sol.r_eff).abs() < 1e-10);

        let gen3 = generators::grid(3).unwrap();
        let view3 = build_truncation(&gen3, 1).unwrap();
        let sol3 = solve_dirichlet(&view3, VertexId(0), &view3.boundary_shell()).unwrap();
        assert!((sol3.r_eff - 1.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn series_resistors_on_a_path() {
        let view = path_view(3);
        let grounded: BTreeSet<_> = [VertexId(3)].into_iter().collect();
        let sol = solve_dirichlet(&view, VertexId(0), &grounded).unwrap();
        assert!((sol.r_eff - 3.0).abs() < 1e-10);
    }

    #[test]
    fn current_is_harmonic_off_source_and_ground() {
        let gen = generators::grid(2).unwrap();
        let view = build_truncation(&gen, 5).unwrap();
        let sol = solve_dirichlet(&view, VertexId(0), &view.boundary_shell()).unwrap();
        let div = divergence(&view, &sol.current).unwrap();
        for v in view.vertices() {
            if v == VertexId(0) {
                let m = view.degree(v).unwrap() as f64;
                assert!((div.get(v) - 1.0 / m).abs() < 1e-10);
            } else if view.is_interior(v) {
                assert!(div.get(v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        let view = path_view(2);
        let grounded: BTreeSet<_> = [VertexId(2)].into_iter().collect();
        assert!(solve_dirichlet(&view, VertexId(2), &grounded).is_err());
        assert!(solve_dirichlet(&view, VertexId(0), &BTreeSet::new()).is_err());
    }

    #[test]
    fn green_partial_basics() {
        // two vertices, one edge: p1(x,y) = 1
        let view = GraphView::from_parts(
            "custom",
            serde_json::json!({}),
            2,
            vec![false, false],
            vec![OrientedEdge {
                id: EdgeId(0),
                tail: VertexId(0),
                head: VertexId(1),
            }],
        )
        .unwrap();
        assert_eq!(green_partial(&view, VertexId(0), VertexId(1), 1).unwrap(), 1.0);
        // simple graph: p1(x,x) = 0
        assert_eq!(green_partial(&view, VertexId(0), VertexId(0), 1).unwrap(), 0.0);
    }

    #[test]
    fn green_partial_monotone_in_steps() {
        let gen = generators::grid(1).unwrap();
        let view = build_truncation(&gen, 20).unwrap();
        let o = VertexId(0);
        let mut prev = 0.0;
        for steps in [2, 10, 50, 100, 400] {
            let g = green_partial(&view, o, o, steps).unwrap();
            assert!(g > prev, "partial sums must strictly increase");
            prev = g;
        }
    }

    #[test]
    fn flow_json_round_trip() {
        let view = path_view(3);
        let f = EdgeFunction(vec![0.125, -1.5, 3.0]);
        let s = f.to_json();
        let back = EdgeFunction::from_json(&s, &view).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_json(), s);
    }
}
