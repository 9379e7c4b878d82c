//! Feeding the measured output straight back onto the oscillator changes the
//! dynamics but not the force-referred noise.

use forcenoise::linresp::{feedback_added_noise, force_noise, GenericDetector};
use forcenoise::presets::fig2a_params;
use forcenoise::schemes::SchemeConfig;

fn main() -> forcenoise::Result<()> {
    let cfg = SchemeConfig::standard(fig2a_params()).with_xi(20.0);
    for w in [0.005, 0.25, 2.0] {
        let det = GenericDetector::from_scheme(&cfg, w)?;
        let open = force_noise(&det)?;
        print!("omega = {w:<6} open loop S_f = {open:.6e}; with feedback:");
        for lp in [-5.0, -0.5, 0.5, 5.0] {
            let closed = feedback_added_noise(&det, lp, w)?;
            print!(" {:+.1e}", closed / open - 1.0);
        }
        println!();
    }
    Ok(())
}
