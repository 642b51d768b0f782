//! Time-averaged Weyl-sum statistics: the measure of simultaneous major
//! arcs against its product scale, and the growth of the averaged
//! sup-norm proxy against the square-root cancellation scale N^{d/2}.
//!
//! Run with: `cargo run --release --example time_averages`

use torus_spectral::quadform::{GenericSampler, SamplerFamily};
use torus_spectral::util::ls_slope;
use torus_spectral::weyl::{arc_measure_product, time_average_sup, SupProxyMode, WeylParams};
use torus_spectral::CutoffSpec;

fn main() {
    // measure of {t : β_i t in the Λ_{Q_i} layer for every i}
    let n = 64u64;
    println!("simultaneous major-arc measure on [0,1], N = {n}:");
    println!("{:>12} {:>14} {:>14} {:>8}", "(Q1,Q2)", "measured", "Q1Q2/N²", "ratio");
    let betas = [1.0, 1.37];
    for (q1, q2) in [(8u64, 8u64), (16, 8), (16, 16), (32, 16)] {
        let measured = arc_measure_product(&betas, &[q1, q2], n, 1.0, 32_768).unwrap();
        let scale = (q1 * q2) as f64 / (n as f64).powi(2);
        println!(
            "{:>12} {measured:>14.6} {scale:>14.6} {:>8.2}",
            format!("({q1},{q2})"),
            measured / scale
        );
    }

    // averaged sup-norm proxy across dyadic N for sampled diagonal forms
    let n_forms = 10u64;
    let ns = [16u64, 32, 64, 128];
    let phi = CutoffSpec::smooth();
    println!("\naveraged upper proxy (1/T)∫ √S(t) dt, d = 2, {n_forms} forms:");
    println!("{:>6} {:>14} {:>10}", "N", "mean proxy", "/N^{d/2}");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &nn in &ns {
        let mut acc = 0.0;
        for i in 0..n_forms {
            let form = GenericSampler::new(5150, SamplerFamily::Rectangular, 2).form_at(i);
            let p = WeylParams::new(nn, phi, &form).unwrap();
            acc += time_average_sup(&p, 1.0, 384, SupProxyMode::Upper).unwrap();
        }
        let mean = acc / n_forms as f64;
        println!("{nn:>6} {mean:>14.1} {:>10.3}", mean / nn as f64);
        xs.push((nn as f64).ln());
        ys.push(mean.ln());
    }
    println!(
        "fitted exponent {:.3} (square-root cancellation scale: d/2 = 1)",
        ls_slope(&xs, &ys)
    );
}
