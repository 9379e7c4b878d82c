//! Coherent quantum-noise cancellation: an ancilla with negative effective
//! mass removes backaction, leaving shot noise plus the ancilla's own noise.

use forcenoise::linsys::transfer;
use forcenoise::noise::force_noise;
use forcenoise::presets::fig2a_params;
use forcenoise::schemes::{build, cqnc_closed_form, SchemeConfig};
use forcenoise::verify::cqnc_limit;

fn main() -> forcenoise::Result<()> {
    for g in [-10.0, 1e3, 1e4] {
        let params = fig2a_params().with_coupling(g);
        let model = build(&SchemeConfig::cqnc(params))?;
        println!("g = {g}");
        for w in [0.003, 0.03, 0.3, 3.0] {
            let m = transfer(&model, w)?.m;
            let phase = cqnc_closed_form(&params, w)?.m;
            let residual = (m[0][1] - phase[0][1])
                .norm()
                .max((m[1][0] - phase[1][0]).norm());
            let sf = force_noise(&model, w)?;
            println!(
                "  omega = {w:<6} backaction residual = {residual:.1e}  S_f / ancilla limit = {:.4}",
                sf / cqnc_limit(&params, w)
            );
        }
    }
    Ok(())
}
