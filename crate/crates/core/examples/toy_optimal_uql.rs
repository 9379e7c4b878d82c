//! Coupling through q = x + eta p lowers the quantum limit below the UQL.
//! Scans eta for the toy detector and compares with the optimum over all
//! linear couplings.

use forcenoise::bounds::{generalized_uql, optimal_uql, q_susceptibilities, uql};
use forcenoise::noise::sensitivity_spectrum;
use forcenoise::presets::{fig2b_config, fig2b_grid, fig2b_params};

fn main() -> forcenoise::Result<()> {
    let p = fig2b_params();
    let w = 1.0;
    println!(
        "omega = {w}: UQL = {:.6}, optimal UQL = {:.6}",
        uql(&p, w),
        optimal_uql(&p, w)
    );
    for eta in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        let q = q_susceptibilities(&p, eta, w)?;
        println!(
            "  eta = {eta:>4}: generalized UQL = {:.6}",
            generalized_uql(&q)?
        );
    }

    let grid = fig2b_grid().omegas()?;
    let s = sensitivity_spectrum(&fig2b_config(), &grid)?;
    let (i, r) = (0..s.len())
        .map(|i| (i, s.s_f[i] / s.guql[i]))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    println!(
        "toy detector (eta = 1, g = {}): min S_f / gUQL = {r:.5} at omega = {:.4}, where gUQL/UQL = {:.4}",
        p.coupling,
        s.omegas[i],
        s.guql[i] / s.uql[i]
    );
    Ok(())
}
