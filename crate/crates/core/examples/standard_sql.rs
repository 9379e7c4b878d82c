//! Resonant position readout: S_f touches the SQL where shot noise and
//! backaction balance, and never goes below it.

use forcenoise::bounds::{sql, uql};
use forcenoise::noise::sensitivity_spectrum;
use forcenoise::presets::{fig2a_grid, fig2a_params};
use forcenoise::schemes::SchemeConfig;

fn main() -> forcenoise::Result<()> {
    let params = fig2a_params();
    let grid = fig2a_grid().omegas()?;
    let s = sensitivity_spectrum(&SchemeConfig::standard(params), &grid)?;

    let (i, ratio) = (0..s.len())
        .map(|i| (i, s.s_f[i] / s.sql[i]))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    println!(
        "closest approach to the SQL: S_f/SQL = {ratio:.9} at omega = {:.4}",
        s.omegas[i]
    );

    for w in [1e-3, 1e-2, 0.1, 1.0, 10.0] {
        let k = grid.iter().position(|&g| g >= w).unwrap_or(grid.len() - 1);
        println!(
            "omega = {:>9.3e}  S_f = {:>11.4e}  SQL = {:>11.4e}  UQL = {:>11.4e}",
            s.omegas[k],
            s.s_f[k],
            sql(&params, s.omegas[k])?,
            uql(&params, s.omegas[k])
        );
    }
    Ok(())
}
