//! Runs the graded-mesh convergence study on the corner benchmark and
//! prints the CSV table of errors and experimental orders of convergence.
//!
//! Usage: cargo run --release --example convergence_study [levels] [mu]

use neumann_control::bench::{run_convergence_study, StudyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let levels: usize = args.next().map_or(Ok(5), |s| s.parse())?;
    let mu: f64 = args.next().map_or(Ok(0.5), |s| s.parse())?;
    let config = StudyConfig { levels, mu, ..StudyConfig::default() };
    eprintln!(
        "convergence study: omega = 3*pi/2, mu = {mu}, {levels} levels from h0 = {}",
        config.h0
    );
    let start = std::time::Instant::now();
    let report = run_convergence_study(&config)?;
    eprintln!("finished in {:.1} s", start.elapsed().as_secs_f64());
    print!("{}", report.to_csv());
    Ok(())
}
