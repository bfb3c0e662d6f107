//! Peak enhancement of each polarization layout, checked against direct
//! numerical integration of the Poynting vector at the receiver.

use std::f64::consts::TAU;

use leobeam::fields::{self, PlaneWave, PlaneWaveSet, SPEED_OF_LIGHT};
use leobeam::geometry::{horizontal_heading, BeamAtPoint};

fn zenith_group(headings: &[f64]) -> PlaneWaveSet {
    let amplitude = 2f64.sqrt();
    let omega = TAU * 3.5e9;
    let beams = headings
        .iter()
        .map(|&a| PlaneWave::new(BeamAtPoint::zenith(horizontal_heading(a), 0.0).unwrap(), amplitude, omega))
        .collect();
    PlaneWaveSet::new(beams, amplitude).unwrap()
}

fn numeric_db(headings: &[f64]) -> f64 {
    let set = zenith_group(headings);
    let period = 1.0 / 3.5e9;
    let combined = fields::time_avg_poynting(&set, period, 256).unwrap();
    let reference = fields::single_beam_reference(2f64.sqrt(), TAU * 3.5e9, period, 256).unwrap();
    fields::enhancement_db(&combined, &reference).unwrap()
}

fn main() {
    let xi = 60f64.to_radians();
    let rows = leobeam::io::run::closed_form_table(&[2, 4, 8], xi).unwrap();
    print!("{}", leobeam::io::run::render_closed_form(&rows, xi));

    println!("\nnumerical check at zenith, wavelength {:.4} m", SPEED_OF_LIGHT / 3.5e9);
    let q = std::f64::consts::FRAC_PI_2;
    for (label, headings, bound) in [
        ("2 parallel", vec![0.0, 0.0], fields::closed_form_parallel_max(2).unwrap()),
        ("4 parallel", vec![0.0; 4], fields::closed_form_parallel_max(4).unwrap()),
        ("2 perpendicular", vec![0.0, q], fields::closed_form_perpendicular_max(2).unwrap()),
        ("4 perpendicular", vec![0.0, 0.0, q, q], fields::closed_form_perpendicular_max(4).unwrap()),
        ("4 intersecting 60", vec![0.0, 0.0, xi, xi], fields::closed_form_intersecting_max(4, 2, xi).unwrap()),
    ] {
        println!("{label:>18}: integrated {:6.3} dB, closed form {:6.3} dB", numeric_db(&headings), fields::ratio_to_db(bound));
    }

    println!("\nunequal split, 4 satellites, 1 crossing at 60 deg:");
    println!("  closed-form bound  {:.3}", fields::closed_form_intersecting_max(4, 1, xi).unwrap());
    println!("  coherent sum       {:.3}", fields::coherent_split_max(4, 1, xi));
}
