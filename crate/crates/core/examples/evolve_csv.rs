//! Load a flow document and write `M[s,t]` over a time grid as CSV, the same
//! output as `cubicflow flow evolve`.

use std::path::Path;

use cubicflow::cli::evolve_csv;
use cubicflow::config::FlowDoc;
use cubicflow::{Result, TimeGrid};

pub fn run_example() -> Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let doc = FlowDoc::load(&dir.join("a5_sine.toml"))?;
    let flow = doc.build(&dir)?;
    let grid = TimeGrid::new(0.0, 1.0, 0.5)?;
    let csv = evolve_csv(&flow, 0.0, &grid)?;
    for line in csv.lines().take(6) {
        println!("{line}");
    }
    println!("... {} rows", csv.lines().count() - 1);

    // documents round-trip through TOML
    let text = FlowDoc::from_flow(&flow)?.to_toml()?;
    let again = FlowDoc::from_toml(&text)?.build(&dir)?;
    println!("round trip equal at (0.3, 1.2): {}", again.eval(0.3, 1.2)? == flow.eval(0.3, 1.2)?);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
