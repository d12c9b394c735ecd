//! Artifact emission: CSV with fixed 17-significant-digit formatting, plain
//! SVG overlays on a fixed viewBox, and the run manifest.

use brown_core::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// 17 significant digits, period decimal separator, locale-independent.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(content.as_bytes())
}

/// Manifest written next to every command's artifacts; replaying it
/// reproduces the outputs byte-identically except for `wall_time_ms`.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub artifacts: Vec<String>,
    pub versions: serde_json::Map<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub wall_time_ms: u128,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut versions = serde_json::Map::new();
        versions.insert(
            "brown-cli".into(),
            serde_json::Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        RunManifest {
            command: command.into(),
            parameters: serde_json::Map::new(),
            artifacts: Vec::new(),
            versions,
            seed: None,
            wall_time_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) -> &mut Self {
        self.parameters.insert(key.into(), value.into());
        self
    }

    pub fn artifact(&mut self, path: &Path) -> &mut Self {
        self.artifacts.push(path.display().to_string());
        self
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        write_text(path, &format!("{}\n", serde_json::to_string_pretty(self).unwrap()))
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| std::io::Error::other(format!("bad manifest: {e}")))
    }
}

/// Artifact path layout for one output stem.
pub struct OutPaths {
    pub stem: PathBuf,
}

impl OutPaths {
    pub fn new(stem: &str) -> Self {
        OutPaths {
            stem: PathBuf::from(stem),
        }
    }

    pub fn with_ext(&self, ext: &str) -> PathBuf {
        let mut p = self.stem.clone().into_os_string();
        p.push(ext);
        PathBuf::from(p)
    }

    pub fn csv(&self) -> PathBuf {
        self.with_ext(".csv")
    }

    pub fn svg(&self) -> PathBuf {
        self.with_ext(".svg")
    }

    pub fn stats(&self) -> PathBuf {
        self.with_ext(".stats.json")
    }

    pub fn manifest(&self) -> PathBuf {
        self.with_ext(".manifest.json")
    }
}

/// Plain polyline/circle SVG document on the fixed viewBox `[−3,3]²`
/// (y axis flipped to keep the mathematical orientation).
pub struct Svg {
    body: String,
}

impl Svg {
    pub fn new() -> Self {
        Svg {
            body: String::from(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-3 -3 6 6\" width=\"640\" height=\"640\">\n\
                 <rect x=\"-3\" y=\"-3\" width=\"6\" height=\"6\" fill=\"white\"/>\n",
            ),
        }
    }

    pub fn polyline(&mut self, points: &[Complex64], color: &str, closed: bool) {
        if points.is_empty() {
            return;
        }
        let tag = if closed { "polygon" } else { "polyline" };
        let mut attr = String::new();
        for p in points {
            attr.push_str(&format!("{:.5},{:.5} ", p.re, -p.im));
        }
        self.body.push_str(&format!(
            "<{tag} points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"0.012\"/>\n",
            attr.trim_end()
        ));
    }

    pub fn circle_outline(&mut self, center: Complex64, r: f64, color: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{:.5}\" cy=\"{:.5}\" r=\"{:.5}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"0.008\" stroke-dasharray=\"0.05,0.03\"/>\n",
            center.re, -center.im, r
        ));
    }

    pub fn dots(&mut self, points: &[Complex64], color: &str, r: f64) {
        for p in points {
            self.body.push_str(&format!(
                "<circle cx=\"{:.5}\" cy=\"{:.5}\" r=\"{r:.4}\" fill=\"{color}\"/>\n",
                p.re, -p.im
            ));
        }
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

impl Default for Svg {
    fn default() -> Self {
        Self::new()
    }
}
