//! Rotating the detected quadrature (xi = tan phi) cancels backaction near
//! one frequency and dips below the SQL there.

use forcenoise::noise::sensitivity_spectrum;
use forcenoise::presets::{fig2a_grid, fig2a_params};
use forcenoise::schemes::SchemeConfig;

fn main() -> forcenoise::Result<()> {
    let grid = fig2a_grid().omegas()?;
    for xi in [0.0, 5.0, 20.0, 80.0] {
        let cfg = SchemeConfig::standard(fig2a_params()).with_xi(xi);
        let s = sensitivity_spectrum(&cfg, &grid)?;
        let (i, r) = (0..s.len())
            .map(|i| (i, s.s_f[i] / s.sql[i]))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let floor = (0..s.len())
            .map(|i| s.s_f[i] / s.uql[i])
            .fold(f64::INFINITY, f64::min);
        println!(
            "xi = {xi:>5}: min S_f/SQL = {r:.4} at omega = {:.4}, min S_f/UQL = {floor:.4}",
            s.omegas[i]
        );
    }
    Ok(())
}
