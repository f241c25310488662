//! Sample the per-WAT link profile along the AGV path of the default
//! factory layout and write it as plot-ready CSV.
//!
//! ```bash
//! cargo run --release --example radio_coverage -- [coverage.csv]
//! ```

use std::io::Write;
use steersim::radio::{agv_position, associate, default_factory_layout, default_noise, PathEnd};
use steersim::wat::Wat;

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "coverage.csv".to_string());
    let layout = default_factory_layout();
    let noise = default_noise();
    let total = layout.agv_path_length_m();
    println!(
        "path length {total:.1} m, {} nodes ({} gNB, {} Wi-Fi, {} LiFi), traversal at {} m/s takes {:.0} s",
        layout.nodes.len(),
        layout.nodes_of(Wat::FiveG).count(),
        layout.nodes_of(Wat::WiFi).count(),
        layout.nodes_of(Wat::LiFi).count(),
        layout.agv_speed_mps,
        total / layout.agv_speed_mps,
    );

    let file = std::fs::File::create(&out).expect("writable output");
    let mut w = std::io::BufWriter::new(file);
    writeln!(
        w,
        "distance_m,cell_5g,rsrp_5g,sinr_5g,cell_wifi,rsrp_wifi,sinr_wifi,cell_lifi,rsrp_lifi,sinr_lifi"
    )
    .unwrap();

    let mut d = 0.0;
    let mut lifi_covered = 0usize;
    let mut samples = 0usize;
    while d <= total {
        let pos = agv_position(d, &layout.agv_path, 1.0, PathEnd::Stop).expect("valid path");
        write!(w, "{d:.2}").unwrap();
        for wat in Wat::ALL {
            match associate(&pos, wat, &layout, &noise).expect("positions differ from nodes") {
                Some(m) => {
                    write!(w, ",{},{:.2},{:.2}", m.node_id, m.rsrp_dbm, m.sinr_db).unwrap();
                    if wat == Wat::LiFi {
                        lifi_covered += 1;
                    }
                }
                None => write!(w, ",,,").unwrap(),
            }
        }
        writeln!(w).unwrap();
        samples += 1;
        d += 0.25;
    }
    w.flush().unwrap();

    println!(
        "LiFi coverage along the path: {:.1} % (small gaps between 3 m cells are expected)",
        100.0 * lifi_covered as f64 / samples as f64
    );
    println!("profile written to {out}");
}
