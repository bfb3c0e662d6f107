//! Worst-case Doppler on an overhead pass, and how a frequency offset between
//! two cooperating beams erodes the coherent gain over a 12000-cycle window.

use leobeam::impairments::{
    doppler_enhancement_sweep, first_crossing_below, max_doppler_hz, normalized_doppler, DopplerPassConfig, DopplerSweepConfig,
};
use leobeam::io::run::{default_sweep, INCOHERENT_PAIR_DB};

fn main() {
    for f in [2e9, 3.5e9] {
        let pass = DopplerPassConfig::worst_case(f, 600.0);
        println!(
            "{:.1} GHz, 600 km: max |df| {:.1} kHz, at closest approach {:.1} Hz",
            f / 1e9,
            max_doppler_hz(&pass).unwrap() / 1e3,
            (normalized_doppler(&pass, 0.0).unwrap() * f).abs()
        );
    }

    let sweep = default_sweep();
    let points = doppler_enhancement_sweep(&sweep).unwrap();
    for p in points.iter().step_by(25) {
        println!("  df {:7.1} kHz  {:.3} dB", p.df_hz / 1e3, p.enhancement_db);
    }
    match first_crossing_below(&points, INCOHERENT_PAIR_DB) {
        Some(df) => println!("coherent gain gone at {:.1} kHz", df / 1e3),
        None => println!("gain never drops to the incoherent level"),
    }

    let tail = DopplerSweepConfig::new(3.5e9, 3e6, 3.2e6, 50e3);
    for p in doppler_enhancement_sweep(&tail).unwrap() {
        println!("  df {:7.1} kHz  {:.3} dB", p.df_hz / 1e3, p.enhancement_db);
    }
}
