//! Writes the reference systems and maps as JSON files into a directory.

use std::fs;
use std::path::PathBuf;

use expobs_core::circle::{m0, m0_interval, PLCircleMap, PLIntervalMap};
use expobs_core::examples::{cat5, l4, r8};
use expobs_core::scalar::ratio;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    fs::create_dir_all(&dir)?;
    let pretty = |v: serde_json::Value| serde_json::to_string_pretty(&v).expect("json") + "\n";
    for (name, system) in [("L4", l4()), ("R8", r8()), ("CAT5", cat5())] {
        fs::write(dir.join(format!("{name}.json")), pretty(system.to_value()))?;
    }
    let maps = [("M0", m0()), ("rot3_8", PLCircleMap::rigid(ratio(3, 8)))];
    for (name, map) in maps {
        fs::write(
            dir.join(format!("{name}.json")),
            pretty(serde_json::to_value(map.to_doc())?),
        )?;
    }
    let intervals = [
        ("I_M0", m0_interval()),
        ("I_identity", PLIntervalMap::identity()),
        ("I_reflection", PLIntervalMap::reflection()),
    ];
    for (name, map) in intervals {
        fs::write(
            dir.join(format!("{name}.json")),
            pretty(serde_json::to_value(map.to_doc())?),
        )?;
    }
    Ok(())
}
