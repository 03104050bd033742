//! Deterministic file emission: CSV with embedded configuration, a JSON run
//! manifest, and an optional gnuplot script. No timestamps anywhere, so a
//! rerun with the same configuration is byte-identical.

use crate::config::RunConfig;
use crate::CliError;
use std::io::Write;
use std::path::{Path, PathBuf};

/// 17 significant digits, enough to round-trip an f64 exactly.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Emitter {
    dir: PathBuf,
    prefix: String,
    header: Vec<String>,
    written: Vec<PathBuf>,
}

impl Emitter {
    pub fn new(config: &RunConfig, command: &str) -> Result<Self, CliError> {
        let config_line = serde_json::to_string(config)
            .map_err(|e| CliError::config(format!("config not serializable: {e}")))?;
        let header = vec![
            format!("# pulsechi {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {command}"),
            format!("# config: {config_line}"),
        ];
        std::fs::create_dir_all(&config.output.dir).map_err(|e| {
            CliError::config(format!(
                "cannot create output dir {}: {e}",
                config.output.dir.display()
            ))
        })?;
        Ok(Self {
            dir: config.output.dir.clone(),
            prefix: config.output.prefix.clone(),
            header,
            written: Vec::new(),
        })
    }

    pub fn path(&self, stem: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}_{stem}.{ext}", self.prefix))
    }

    pub fn write_csv(
        &mut self,
        stem: &str,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, CliError> {
        let path = self.path(stem, "csv");
        let mut buf = String::new();
        for line in &self.header {
            buf.push_str(line);
            buf.push('\n');
        }
        buf.push_str(&columns.join(","));
        buf.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            buf.push_str(&row.join(","));
            buf.push('\n');
        }
        write_file(&path, buf.as_bytes())?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn note_written(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    /// JSON manifest carrying the full configuration and every file written.
    pub fn write_manifest(&mut self, config: &RunConfig, command: &str) -> Result<PathBuf, CliError> {
        let path = self.path("manifest", "json");
        let outputs: Vec<String> =
            self.written.iter().map(|p| p.display().to_string()).collect();
        let doc = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "outputs": outputs,
        });
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::config(format!("manifest not serializable: {e}")))?;
        write_file(&path, text.as_bytes())?;
        Ok(path)
    }

    /// A generic gnuplot script plotting the files this run produced.
    pub fn write_plotscript(&mut self, command: &str) -> Result<PathBuf, CliError> {
        let path = self.path("plot", "gp");
        let mut s = String::from("# gnuplot script; run from this directory\nset datafile separator ','\n");
        match command {
            "points" => {
                let data = self.path("points", "csv");
                s.push_str(&format!(
                    "set size ratio -1\nset xlabel 'Re zeta'\nset ylabel 'Im zeta'\nplot '{}' using 4:5 with dots notitle\n",
                    data.display()
                ));
            }
            "measure" => {
                let data = self.path("samples", "csv");
                s.push_str(&format!(
                    "set xlabel 'Re beta'\nset ylabel 'Im beta'\nset zlabel 'Re chi'\nsplot '{}' using 1:2:3 with points pointtype 7 pointsize 0.3 notitle\n",
                    data.display()
                ));
            }
            "reconstruct" => {
                let data = self.path("fidelity", "csv");
                s.push_str(&format!(
                    "set logscale x\nset xlabel 'gamma / nu'\nset ylabel 'fidelity'\nset key left bottom\nplot for [fam in 'equidistant random linear'] '{}' using 1:(strcol(2) eq fam ? $4 : 1/0) with linespoints title fam\n",
                    data.display()
                ));
            }
            _ => {}
        }
        write_file(&path, s.as_bytes())?;
        self.written.push(path.clone());
        Ok(path)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}
