//! Detector-agnostic view: extract chi_FF and the noise spectra of a concrete
//! detector, check the spectral uncertainty relation, and compare S_f with
//! its coupling-optimized bound.

use forcenoise::linresp::{
    force_noise, g_optimized_bound, optimal_coupling, sprime_f, uncertainty_check, GenericDetector,
};
use forcenoise::noise::squeeze_spectrum;
use forcenoise::presets::fig2a_params;
use forcenoise::schemes::SchemeConfig;

fn main() -> forcenoise::Result<()> {
    let cfg = SchemeConfig::standard(fig2a_params())
        .with_xi(3.0)
        .with_input(squeeze_spectrum(0.5, 0.4));
    for w in [0.01, 0.3, 3.0] {
        let det = GenericDetector::from_scheme(&cfg, w)?;
        let report = uncertainty_check(&det);
        let bound = g_optimized_bound(&det);
        println!(
            "omega = {w}: S_FF = {:.4} S_ZZ = {:.4} S_ZF = {:.4}  slack = {:.2e}",
            det.s_ff, det.s_zz, det.s_zf, report.slack
        );
        println!(
            "  S'_f(g = {}) = {:.5e}, min over g = {bound:.5e}, |chi_qq^I| = {:.5e}, S_f = {:.5e}",
            det.g,
            sprime_f(&det)?,
            det.q.chi_qq.im.abs(),
            force_noise(&det)?
        );
        if let Some(g) = optimal_coupling(&det) {
            println!(
                "  optimal |g| = {g:.4}: S'_f = {:.5e}",
                sprime_f(&det.with_coupling(g))?
            );
        }
    }
    Ok(())
}
