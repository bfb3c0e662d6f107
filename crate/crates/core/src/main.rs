use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use leobeam::io::config::{self, ConfigDocument, ScenarioSection};
use leobeam::io::run::{self, RunError};
use leobeam::link_budget::{LinkBudget, SensitivityRef};

#[derive(Parser)]
#[command(name = "leobeam", version, about = "Distributed LEO beamforming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress the human-readable report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config and the environment.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enhancement map over the ground patch.
    Map {
        #[command(flatten)]
        common: Common,
        /// Scenario preset, replacing the one in the config.
        #[arg(long)]
        preset: Option<String>,
        /// Grid points per side, replacing the one in the config.
        #[arg(long)]
        grid_res: Option<usize>,
    },
    /// Enhancement versus frequency offset between two beams.
    Doppler {
        #[command(flatten)]
        common: Common,
    },
    /// Downlink budget and margins.
    Budget {
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form peak enhancement table.
    Closedform {
        /// Crossing angle of the intersecting layout, degrees.
        #[arg(long, default_value_t = 60.0)]
        xi_deg: f64,
    },
}

fn load(path: Option<&PathBuf>) -> Result<ConfigDocument, RunError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| RunError::Validation(format!("cannot read {}: {e}", p.display())))?;
            Ok(config::parse_document(&text)?)
        }
        None => Ok(ConfigDocument::default()),
    }
}

fn execute(cli: &Cli) -> Result<(), RunError> {
    let say = |s: String| {
        if !cli.quiet {
            print!("{s}");
        }
    };
    match &cli.command {
        Command::Map { common, preset, grid_res } => {
            let mut doc = load(common.config.as_ref())?;
            let sc = doc.scenario.get_or_insert_with(ScenarioSection::default);
            if preset.is_some() {
                sc.preset = preset.clone();
            }
            if grid_res.is_some() {
                sc.grid_resolution = *grid_res;
            }
            let req = config::from_document(doc)?;
            let out = run::resolve_out_dir(common.out.as_deref(), &req.out_dir);
            let report = run::run_map(&req, &out)?;
            let s = &report.summary;
            let mut text = format!(
                "case {}: max {:.3} dB, min {:.3} dB, center {:.3} dB, closed-form max {:.3} dB\n",
                s.scenario.case_id, s.max_db, s.min_db, s.center_db, s.closed_form_max_db
            );
            if let Some(f) = &s.fringe {
                text += &format!("fringes: period {:.3} m, bright width {:.3} m, orientation {:.2} deg\n", f.period_m, f.bright_width_m, f.orientation_rad.to_degrees());
            }
            if let Some(sp) = &s.spot {
                text += &format!("spot: area {:.1} m2, radius {:.2} m, diagonal {:.2} m\n", sp.area_m2, sp.equivalent_radius_m, sp.diagonal_m);
            }
            if let Some(l) = &s.link {
                text += &format!("link margin {:.2} dB\n", l.margin_db);
            }
            for p in &report.written {
                text += &format!("wrote {}\n", p.display());
            }
            say(text);
        }
        Command::Doppler { common } => {
            let doc = load(common.config.as_ref())?;
            let out_cfg = doc.out_dir.clone().unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT_DIR));
            let sweep = doc.doppler_sweep.clone().unwrap_or_else(run::default_sweep);
            let out = run::resolve_out_dir(common.out.as_deref(), &out_cfg);
            let report = run::run_doppler(&sweep, &out)?;
            let mut text = format!("{} points over {} carrier cycles\n", report.summary.points, report.summary.window_cycles);
            match report.summary.half_power_crossing_hz {
                Some(f) => text += &format!("enhancement reaches 3.01 dB at {:.1} kHz\n", f / 1e3),
                None => text += "enhancement stays above 3.01 dB over the sweep\n",
            }
            for p in &report.written {
                text += &format!("wrote {}\n", p.display());
            }
            say(text);
        }
        Command::Budget { common } => {
            let doc = load(common.config.as_ref())?;
            let budget = doc.link_budget.clone().unwrap_or_else(LinkBudget::handset_600km_3g5);
            let sens = doc.sensitivity_dbm.map(|threshold_dbm| SensitivityRef { threshold_dbm }).unwrap_or_default();
            let report = run::run_budget(&budget, &sens)?;
            let mut text = report.render();
            if let Some(out) = common.out.as_deref().map(PathBuf::from).or_else(|| std::env::var_os(run::OUT_DIR_ENV).map(PathBuf::from)) {
                let path = out.join("budget.json");
                leobeam::io::output::write_atomic(&path, leobeam::io::output::to_json("budget", &report)?.as_bytes())?;
                text += &format!("wrote {}\n", path.display());
            }
            say(text);
        }
        Command::Closedform { xi_deg } => {
            let rows = run::closed_form_table(&[2, 4, 8, 16], xi_deg.to_radians())?;
            say(run::render_closed_form(&rows, xi_deg.to_radians()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
