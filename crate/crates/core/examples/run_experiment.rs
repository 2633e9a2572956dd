//! Running a named experiment from an inline config and printing its CSV rows.

use multiplier_lab::experiments::{emit_report, parse_config_str, run, Format, EXPERIMENTS};

fn main() -> multiplier_lab::Result<()> {
    for e in EXPERIMENTS {
        println!("{:>2} {}", e.criterion, e.name);
    }
    let cfg = parse_config_str(r#"{"experiment": "ap-duality", "seed": 1, "params": {"p": [2.0, 4.0]}}"#)?;
    let report = run(&cfg)?;
    emit_report(&[report], Format::Csv, None)
}
