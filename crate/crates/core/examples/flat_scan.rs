//! Coarse grid scan of M_2 printed as CSV; pass the resolution as the first
//! argument (default 12).

use biquotient_flats::scan::{grid_scan, write_csv, ScanConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let resolution = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(12);
    let cfg = ScanConfig { resolution, restarts: 4, ..ScanConfig::default() };
    let rows = grid_scan(&cfg)?;
    let found = rows.iter().filter(|r| r.flat_found).count();
    let predicted = rows.iter().filter(|r| r.flat_predicted).count();
    eprintln!("{} points, {found} flat, {predicted} predicted", rows.len());
    write_csv(&rows, &mut std::io::stdout().lock())?;
    Ok(())
}
