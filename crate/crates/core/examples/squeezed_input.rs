//! Squeezed light at the readout port. The squeezing angle selects whether
//! shot noise or backaction is suppressed.

use forcenoise::noise::{force_noise, squeeze_spectrum};
use forcenoise::presets::fig2a_params;
use forcenoise::schemes::{build, SchemeConfig};

fn main() -> forcenoise::Result<()> {
    let omega = 2.0;
    let base = SchemeConfig::standard(fig2a_params());
    let vacuum = force_noise(&build(&base)?, omega)?;
    println!("omega = {omega}: vacuum S_f = {vacuum:.5e}");
    for s in [0.5, 1.0] {
        for theta in [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let input = squeeze_spectrum(s, theta);
            let sf = force_noise(&build(&base.with_input(input))?, omega)?;
            println!(
                "s = {s}, theta = {theta:.4}: (u, v, w) = ({:.4}, {:.4}, {:.4})  S_f / vacuum = {:.4}",
                input.u,
                input.v,
                input.w,
                sf / vacuum
            );
        }
    }
    Ok(())
}
