//! A detuned cavity mixes quadratures inside the cavity. Compares the numeric
//! transfer with the closed form and tracks S_f against the SQL.

use forcenoise::linsys::transfer;
use forcenoise::noise::sensitivity_spectrum;
use forcenoise::presets::{fig2a_grid, fig2a_params};
use forcenoise::schemes::{build, closed_form_transfer, SchemeConfig};

fn main() -> forcenoise::Result<()> {
    let grid = fig2a_grid().omegas()?;
    for delta in [0.0, -1.0, -7.0, 0.5] {
        let params = fig2a_params().with_detuning(delta);
        let cfg = SchemeConfig::standard(params);
        let model = match build(&cfg) {
            Ok(m) => m,
            Err(e) => {
                println!("Delta = {delta:>5}: {e}");
                continue;
            }
        };
        let num = transfer(&model, 0.3)?;
        let cf = closed_form_transfer(&params, 0.3)?;
        let err = (num.v[1] - cf.v[1]).norm() / cf.v[1].norm();
        let s = sensitivity_spectrum(&cfg, &grid)?;
        let min = (0..s.len())
            .map(|i| s.s_f[i] / s.sql[i])
            .fold(f64::INFINITY, f64::min);
        println!("Delta = {delta:>5}: min S_f/SQL = {min:.4}, force response vs closed form at omega = 0.3: {err:.1e}");
    }
    Ok(())
}
