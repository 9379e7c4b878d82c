//! Building a model by hand: drift matrix, noise wiring, stability check and
//! frequency-domain transfer of a bare damped oscillator read by a cavity.

use forcenoise::linsys::{
    stability_check, transfer, ChannelKind, DriftMatrix, LinearModel, NoiseChannel,
};
use forcenoise::noise::{force_noise, QuadratureSpectrum};

fn model(g: f64, delta: f64) -> forcenoise::Result<LinearModel> {
    let (om, gm, kappa) = (1.0, 0.1, 2.0);
    let drift = DriftMatrix::from_rows(
        ["x", "p", "b1", "b2"],
        [
            [-gm / 2.0, om, 0.0, 0.0],
            [-om, -gm / 2.0, g, 0.0],
            [0.0, 0.0, -kappa / 2.0, delta],
            [g, 0.0, -delta, -kappa / 2.0],
        ],
    )?;
    let report = stability_check(&drift);
    println!(
        "g = {g}, Delta = {delta}: max Re(eigenvalue) = {:+.4}, stable = {}",
        report.max_real, report.stable
    );
    let channels = vec![NoiseChannel {
        id: "cavity".into(),
        kind: ChannelKind::Readout,
        rate: kappa,
        rows: (2, 3),
        spectrum: QuadratureSpectrum::vacuum(),
    }];
    LinearModel::new(drift, channels, 1, 0.0)
}

fn main() -> forcenoise::Result<()> {
    let m = model(0.5, 0.0)?;
    let r = transfer(&m, 1.0)?;
    println!(
        "  |force response| at omega = 1: ({:.4}, {:.4})",
        r.v[0].norm(),
        r.v[1].norm()
    );
    println!("  S_f at omega = 1: {:.6}", force_noise(&m, 1.0)?);
    for (g, delta) in [(0.5, -0.5), (1.5, -1.0)] {
        match model(g, delta) {
            Ok(_) => println!("  accepted"),
            Err(e) => println!("  rejected: {e}"),
        }
    }
    Ok(())
}
