use hrhg::inner::{decode_inner, weight, InnerVariant};
use hrhg::lattice::{build_lattice, BoundaryConvention, SignConvention};
use hrhg::noise::{assign_states, sample_homodyne, StateKind};
use hrhg::outer::*;

#[derive(Clone, Copy, PartialEq)]
enum V {
    HybridUniform, // weight 1 for m<=1 arcs, constants for m>=2
    M1Const,       // analog, but m=1 uses the z-averaged error constant
}

fn avg_error(delta_tilde: f64) -> f64 {
    // Mean probability of a binning error over a uniformly placed outcome.
    if delta_tilde <= 0.0 {
        return 0.0;
    }
    let n = 400;
    let mut acc = 0.0;
    for i in 0..n {
        let z = (i as f64 + 0.5) / n as f64 * hrhg::ROOT_PI;
        acc += weight(z, 0, delta_tilde);
    }
    acc / n as f64
}

fn weights_for(
    l: &hrhg::lattice::Lattice,
    a: &hrhg::noise::StateAssignment,
    s: &hrhg::noise::HomodyneSample,
    delta: f64,
    v: V,
) -> Vec<u64> {
    l.primal_qubits()
        .iter()
        .map(|&q| {
            let g = l
                .neighbors(q)
                .unwrap()
                .iter()
                .filter(|&&(j, _)| a.kind(j) == StateKind::Gkp)
                .count();
            let m = l.neighbors(q).unwrap().len() - g;
            let dt = delta * (1.0 + g as f64);
            let w = match (v, m) {
                (V::HybridUniform, 0 | 1) => return 1_000_000,
                (V::M1Const, 1) => avg_error(dt),
                _ => weight(s.p[q], m, dt),
            }
            .clamp(1e-15, 0.5);
            (-w.ln() * 1e6).round() as u64
        })
        .collect()
}

fn run(tag: &str, v: V, pts: &[(f64, f64)], trials: u64) {
    println!("== {tag} ==");
    for &(db, p0) in pts {
        let delta = hrhg::delta_from_db(db);
        let mut row = format!("{db:>6.2}");
        for d in [3usize, 5, 7] {
            let l = build_lattice(d, BoundaryConvention::PeriodicTransverse, SignConvention::AllPlus).unwrap();
            let mut fails = 0u64;
            for t in 0..trials {
                let a = assign_states(&l, p0, 2222, t).unwrap();
                let s = sample_homodyne(&l, &a, delta, 2222, t).unwrap();
                let bits = decode_inner(&l, &a, &s, InnerVariant::StandardOnly).unwrap();
                let dg = decoding_graph_from_weights(&l, &weights_for(&l, &a, &s, delta, v)).unwrap();
                let syn = syndrome(&l, &bits).unwrap();
                let mg = matching_graph(&dg, &syn).unwrap();
                let m = mwpm(&mg).unwrap();
                let rec = recovery(&dg, &mg, &m);
                let fixed = apply_recovery(&l, &bits, &rec);
                let parity = l.correlation_surface().iter().fold(0u8, |acc, &q| acc ^ fixed.bits[q]);
                fails += parity as u64;
            }
            row += &format!(" {:>8.4}", fails as f64 / trials as f64);
        }
        println!("{row}");
    }
}

fn main() {
    run(
        "hybrid uniform (constants for m>=2), p0 = 0.06",
        V::HybridUniform,
        &[(15.0, 0.06), (15.5, 0.06), (16.0, 0.06), (16.5, 0.06)],
        3000,
    );
    run(
        "analog with z-independent m=1 weight, p0 = 0.1",
        V::M1Const,
        &[(13.3, 0.1), (13.5, 0.1), (13.7, 0.1), (13.9, 0.1)],
        3000,
    );
}
