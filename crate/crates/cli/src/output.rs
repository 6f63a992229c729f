use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::plot::{render_plots, Series};
use crate::{CliError, Format};

/// Output directory layout: `report.json`, `traces/*.csv`, `plots/*.svg`.
pub struct OutDir {
    root: PathBuf,
    formats: Vec<Format>,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path, formats: &[Format]) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            formats: formats.to_vec(),
            written: Vec::new(),
        })
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Paths written so far, relative to the root.
    pub fn artifacts(&self) -> &[String] {
        &self.written
    }

    fn target(&mut self, sub: &str, name: &str) -> Result<(PathBuf, String), CliError> {
        let dir = self.root.join(sub);
        fs::create_dir_all(&dir)?;
        let rel = format!("{sub}/{name}");
        self.written.push(rel.clone());
        Ok((dir.join(name), rel))
    }

    pub fn csv(
        &mut self,
        stem: &str,
        write: impl FnOnce(BufWriter<fs::File>) -> floquet_core::Result<()>,
    ) -> Result<Option<String>, CliError> {
        if !self.wants(Format::Csv) {
            return Ok(None);
        }
        let (path, rel) = self.target("traces", &format!("{stem}.csv"))?;
        write(BufWriter::new(fs::File::create(path)?))?;
        Ok(Some(rel))
    }

    pub fn svg(&mut self, stem: &str, text: &str) -> Result<Option<String>, CliError> {
        if !self.wants(Format::Svg) {
            return Ok(None);
        }
        let (path, rel) = self.target("plots", &format!("{stem}.svg"))?;
        fs::write(path, text)?;
        Ok(Some(rel))
    }

    pub fn plots(&mut self, series: &[Series]) -> Result<Vec<String>, CliError> {
        if !self.wants(Format::Svg) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for (stem, text) in render_plots(series)? {
            out.extend(self.svg(&stem, &text)?);
        }
        Ok(out)
    }

    /// Writes `report.json`; always last, so it can list every other artifact.
    pub fn report<R: Serialize>(&mut self, report: &R) -> Result<Option<PathBuf>, CliError> {
        if !self.wants(Format::Json) {
            return Ok(None);
        }
        let path = self.root.join("report.json");
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(Some(path))
    }
}
