//! CSV and whitespace `.dat` result files.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::Result;

use super::stats::PointStats;

const COLUMNS: [&str; 17] = [
    "decoder", "N", "K", "crc_len", "ebno_db", "trials", "frame_errors", "bit_errors", "fer", "ber", "fer_lo",
    "fer_hi", "avg_iters", "n_false_conv", "n_osc", "n_unconv", "seed",
];

fn fields(s: &PointStats) -> [String; 17] {
    let (lo, hi) = s.fer_interval();
    [
        s.decoder.to_string(),
        s.block_len.to_string(),
        s.k.to_string(),
        s.crc_len.to_string(),
        format!("{:.2}", s.ebn0_db()),
        s.trials.to_string(),
        s.frame_errors.to_string(),
        s.bit_errors.to_string(),
        format!("{:.6e}", s.fer()),
        format!("{:.6e}", s.ber()),
        format!("{:.6e}", lo),
        format!("{:.6e}", hi),
        format!("{:.4}", s.avg_iterations()),
        s.n_false_conv.to_string(),
        s.n_osc.to_string(),
        s.n_unconv.to_string(),
        s.seed.to_string(),
    ]
}

pub fn csv_header() -> String {
    COLUMNS.join(",")
}

pub fn csv_row(s: &PointStats) -> String {
    fields(s).join(",")
}

pub fn dat_header() -> String {
    format!("# {}", COLUMNS.join(" "))
}

pub fn dat_row(s: &PointStats) -> String {
    fields(s).join(" ")
}

/// Writes the CSV and its `.dat` mirror, one flushed row per finished point.
pub struct ResultWriter {
    csv: File,
    dat: File,
    dat_path: PathBuf,
}

impl ResultWriter {
    /// Truncates both files and writes the headers. The `.dat` file sits
    /// next to the CSV with its extension replaced.
    pub fn create(csv_path: &Path) -> Result<Self> {
        let dat_path = csv_path.with_extension("dat");
        let mut csv = File::create(csv_path)?;
        let mut dat = File::create(&dat_path)?;
        writeln!(csv, "{}", csv_header())?;
        writeln!(dat, "{}", dat_header())?;
        csv.sync_data()?;
        dat.sync_data()?;
        let csv = OpenOptions::new().append(true).open(csv_path)?;
        let dat = OpenOptions::new().append(true).open(&dat_path)?;
        Ok(ResultWriter { csv, dat, dat_path })
    }

    pub fn dat_path(&self) -> &Path {
        &self.dat_path
    }

    pub fn append(&mut self, s: &PointStats) -> Result<()> {
        // a single write per line keeps rows whole if the run is killed
        self.csv.write_all(format!("{}\n", csv_row(s)).as_bytes())?;
        self.dat.write_all(format!("{}\n", dat_row(s)).as_bytes())?;
        self.csv.flush()?;
        self.dat.flush()?;
        Ok(())
    }
}
