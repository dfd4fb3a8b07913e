use std::time::Instant;
use surflab_core::classify::{classify, resistance_profile};
use surflab_core::generators;
use surflab_core::graph::build_truncation;

fn probe(name: &str, gen: &surflab_core::GraphGenerator, radii: &[u32], tol: f64) {
    let t0 = Instant::now();
    let profile = resistance_profile(gen, radii).unwrap();
    let verdict = classify(&profile, tol).unwrap();
    let sizes: Vec<usize> = radii
        .iter()
        .map(|&r| build_truncation(gen, r).unwrap().vertex_count())
        .collect();
    println!(
        "{name}: {:?} sizes={:?} verdict={:?} ({:?})",
        profile,
        sizes,
        verdict.verdict,
        t0.elapsed()
    );
    if let surflab_core::Evidence::Profile(p) = &verdict.evidence {
        println!(
            "   last_rel={:.5} fit slope={:.4} R2={:.5}",
            p.last_relative_increment, p.log_fit.slope, p.log_fit.r_squared
        );
    }
}

fn main() {
    let z2 = generators::grid(2).unwrap();
    let z3 = generators::grid(3).unwrap();
    let t2 = generators::transform_t2(&z2).unwrap();
    let t3 = generators::transform_t3(&z3).unwrap();
    let gm = generators::gm_flute_graph();

    probe("z2 ", &z2, &[8, 16, 32, 64, 128], 0.02);
    probe("t2 ", &t2, &[8, 16, 32, 64, 128], 0.02);
    probe("z3 ", &z3, &[5, 10, 20, 40], 0.02);
    probe("t3 ", &t3, &[5, 10, 20, 40], 0.02);
    for radii in [[4u32, 8, 16].as_slice(), [5, 10, 20].as_slice(), [6, 12, 24].as_slice()] {
        probe("gm ", &gm, radii, 0.02);
    }
}
