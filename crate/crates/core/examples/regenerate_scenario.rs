//! Regenerate the bundled `mini-helleheide` scenario files.
//!
//! ```text
//! cargo run --example regenerate_scenario -- crates/core/scenarios/mini-helleheide
//! ```

use std::path::PathBuf;

use heatlevels::scenario::write_mini_helleheide;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/mini-helleheide"));
    let path = write_mini_helleheide(&dir)?;
    println!("wrote {}", path.display());
    Ok(())
}
