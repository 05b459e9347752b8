//! Drives the experiment runner from an in-memory manifest, the same way
//! the `geogate` binary does from a file.

use geogate::runner::{run, validate, Settings};

fn main() -> geogate::Result<()> {
    let out = std::env::temp_dir().join("geogate-manifest-example");
    let manifest = format!(
        r#"
experiment = "synth"
out = "{}"
gate = "T"
synth.tau = 0.5
"#,
        out.display()
    );
    let s = Settings::from_toml(&manifest)?;
    for (k, v) in validate(&s)? {
        println!("{k} = {v}");
    }
    let summary = run(&s)?;
    for f in &summary.files {
        println!("wrote {}", f.display());
    }

    // diagnostics name the offending key
    if let Err(e) = Settings::from_toml("two_qubit.betta = 1.0") {
        println!("rejected: {e}");
    }
    Ok(())
}
