//! End-to-end reconstruction: obtain near-field data, sweep a grid of test
//! squares over the sampling region and record the negative-eigenvalue count
//! of each.

use std::collections::VecDeque;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::forward::{
    assemble_near_field_with, load_near_field, rasterize, ContrastSpec, ForwardError, IncidentField,
    MeasurementLine, NearFieldMatrix,
};
use crate::greens::{GreensError, Point2, WaveConfig};
use crate::mono::{
    assemble_probe, ContrastSign, Direction, MonoError, MonotonicityTest, SpectralTolerance, TestSquare,
    DEFAULT_QUAD_POINTS,
};

/// Forward resolution for synthesized data, finer than anything the
/// inversion side uses.
pub const SYNTHESIS_CELLS_PER_SIDE: usize = 48;

#[derive(Debug, Error)]
pub enum ReconError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("near-field metadata does not match the configuration: {0}")]
    MetadataMismatch(String),
    #[error("indicator map: {0}")]
    Format(String),
    #[error(transparent)]
    Forward(#[from] ForwardError),
    #[error(transparent)]
    Mono(#[from] MonoError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<GreensError> for ReconError {
    fn from(e: GreensError) -> Self {
        ReconError::Config(e.to_string())
    }
}

/// Sampling region [0, R]² split into M×M squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub region_size: f64,
    pub grid: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            region_size: 1.0,
            grid: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconConfig {
    pub k: f64,
    /// Defect used to synthesize data; exclusive with `near_field_in`.
    #[serde(default)]
    pub contrast: Option<ContrastSpec>,
    #[serde(default)]
    pub near_field_in: Option<PathBuf>,
    #[serde(default)]
    pub near_field_out: Option<PathBuf>,
    #[serde(default = "MeasurementLine::benchmark")]
    pub line: MeasurementLine,
    #[serde(default)]
    pub sampling: Sampling,
    pub alpha: f64,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default)]
    pub sign: ContrastSign,
    #[serde(default)]
    pub tolerance: SpectralTolerance,
    #[serde(default = "default_quad_points")]
    pub quad_points: usize,
    #[serde(default = "default_forward_cells")]
    pub forward_cells: usize,
    #[serde(default)]
    pub incident: IncidentField,
    /// Worker threads for the sweep; `None` uses the rayon default.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Output prefix; `<out>.csv`, `<out>.pgm` and `<out>.json` are written.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_quad_points() -> usize {
    DEFAULT_QUAD_POINTS
}

fn default_forward_cells() -> usize {
    SYNTHESIS_CELLS_PER_SIDE
}

impl ReconConfig {
    /// Benchmark setting (k = 5, d = 30, line from −25 to 25 at height 20,
    /// unit sampling region) for the given defect and α.
    pub fn benchmark(contrast: ContrastSpec, alpha: f64) -> Self {
        Self {
            k: 5.0,
            contrast: Some(contrast),
            near_field_in: None,
            near_field_out: None,
            line: MeasurementLine::benchmark(),
            sampling: Sampling::default(),
            alpha,
            direction: Direction::Inside,
            sign: ContrastSign::Positive,
            tolerance: SpectralTolerance::default(),
            quad_points: DEFAULT_QUAD_POINTS,
            forward_cells: SYNTHESIS_CELLS_PER_SIDE,
            incident: IncidentField::Conjugate,
            threads: None,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ReconError> {
        serde_json::from_str(text).map_err(|e| ReconError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ReconError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| ReconError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn wave(&self) -> Result<WaveConfig, ReconError> {
        Ok(WaveConfig::new(self.k)?)
    }

    pub fn validate(&self) -> Result<(), ReconError> {
        self.wave()?;
        let bad = |msg: String| Err(ReconError::Config(msg));
        if !(self.sampling.region_size > 0.0 && self.sampling.region_size.is_finite()) {
            return bad(format!("region size must be positive, got {}", self.sampling.region_size));
        }
        if self.sampling.grid < 2 {
            return bad(format!("sampling grid must be at least 2, got {}", self.sampling.grid));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.quad_points == 0 {
            return bad("quad_points must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        match (&self.contrast, &self.near_field_in) {
            (Some(_), Some(_)) => return bad("give either a contrast or near_field_in, not both".into()),
            (None, None) => return bad("need a contrast to synthesize or near_field_in to load".into()),
            (Some(c), None) => c.validate().map_err(|e| ReconError::Config(e.to_string()))?,
            (None, Some(_)) => {}
        }
        self.line.validate().map_err(|e| ReconError::Config(e.to_string()))?;
        if self.sampling.region_size >= self.line.height {
            return bad(format!(
                "sampling region reaches the measurement line at height {}",
                self.line.height
            ));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, ignoring thread count and output
    /// locations (they do not affect results).
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.threads = None;
        canonical.out = None;
        canonical.near_field_out = None;
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Synthesizes the near field from `config.contrast` or loads it from
/// `config.near_field_in`, checking that the metadata agrees with the config.
pub fn synthesize_or_load(config: &ReconConfig) -> Result<NearFieldMatrix, ReconError> {
    config.validate()?;
    let wave = config.wave()?;
    if let Some(contrast) = &config.contrast {
        let grid = rasterize(contrast, config.forward_cells)?;
        return Ok(assemble_near_field_with(&wave, &grid, &config.line, config.incident)?);
    }
    let path = config.near_field_in.as_ref().expect("validated");
    let n = load_near_field(path)?;
    check_metadata(&n, config)?;
    Ok(n)
}

fn check_metadata(n: &NearFieldMatrix, config: &ReconConfig) -> Result<(), ReconError> {
    let (got, want) = (n.line(), &config.line);
    let mut diffs = Vec::new();
    if got.d != want.d {
        diffs.push(format!("d: file {} vs config {}", got.d, want.d));
    }
    for (name, a, b) in [
        ("k", n.wave().k(), config.k),
        ("a", got.a, want.a),
        ("b", got.b, want.b),
        ("m", got.height, want.height),
    ] {
        if a != b {
            diffs.push(format!("{name}: file {a} vs config {b}"));
        }
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(ReconError::MetadataMismatch(diffs.join("; ")))
    }
}

/// Negative-eigenvalue counts on the M×M sampling grid. Row `r` holds the
/// squares centred at x₂ = R(r+1)/M, column `c` those at x₁ = R(c+1)/M.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorMap {
    m: usize,
    d: usize,
    values: Vec<u32>,
}

impl IndicatorMap {
    pub fn new(m: usize, d: usize, values: Vec<u32>) -> Result<Self, ReconError> {
        if m == 0 || values.len() != m * m {
            return Err(ReconError::Format(format!(
                "expected {m}x{m} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v as usize > d) {
            return Err(ReconError::Format(format!("value {v} exceeds d = {d}")));
        }
        Ok(Self { m, d, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.values[row * self.m + col]
    }

    /// Centre z of the square at (`row`, `col`) for region size `r`.
    pub fn center(&self, row: usize, col: usize, r: f64) -> Point2 {
        let m = self.m as f64;
        Point2::new(r * (col + 1) as f64 / m, r * (row + 1) as f64 / m)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.values.len() * 3);
        for row in self.values.chunks(self.m) {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Plain PGM with the largest x₂ in the top row.
    pub fn to_pgm(&self) -> String {
        let mut s = format!("P2\n{} {}\n{}\n", self.m, self.m, self.d);
        for row in self.values.chunks(self.m).rev() {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<(), ReconError> {
        write_file(path.as_ref(), self.to_csv().as_bytes())
    }

    pub fn export_pgm(&self, path: impl AsRef<Path>) -> Result<(), ReconError> {
        write_file(path.as_ref(), self.to_pgm().as_bytes())
    }

    pub fn load_csv(path: impl AsRef<Path>, d: usize) -> Result<Self, ReconError> {
        Self::read_csv(BufReader::new(fs::File::open(path)?), d)
    }

    pub fn read_csv<R: BufRead>(input: R, d: usize) -> Result<Self, ReconError> {
        let mut values = Vec::new();
        let mut rows = 0;
        let mut width = None;
        for line in input.lines() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            rows += 1;
            let before = values.len();
            for cell in line.split(',') {
                values.push(
                    cell.parse::<u32>()
                        .map_err(|_| ReconError::Format(format!("bad value {cell:?} in row {rows}")))?,
                );
            }
            let w = values.len() - before;
            if *width.get_or_insert(w) != w {
                return Err(ReconError::Format(format!("row {rows} has {w} values")));
            }
        }
        if width != Some(rows) {
            return Err(ReconError::Format(format!(
                "map is not square: {rows} rows of {:?} values",
                width
            )));
        }
        Self::new(rows, d, values)
    }

    /// Mean value over squares whose centre satisfies `pred`, or `None` if
    /// there are none.
    pub fn mean_where(&self, r: f64, pred: impl Fn(Point2) -> bool) -> Option<f64> {
        let (mut sum, mut count) = (0.0, 0usize);
        for row in 0..self.m {
            for col in 0..self.m {
                if pred(self.center(row, col, r)) {
                    sum += self.get(row, col) as f64;
                    count += 1;
                }
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    pub fn median(&self) -> f64 {
        let mut v = self.values.clone();
        v.sort_unstable();
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2] as f64
        } else {
            0.5 * (v[n / 2 - 1] as f64 + v[n / 2] as f64)
        }
    }

    /// Largest 4-connected component of the squares strictly below the
    /// median (at or below it when no value is strictly below).
    pub fn low_component(&self, r: f64) -> LowComponent {
        let median = self.median();
        let strict: Vec<bool> = self.values.iter().map(|&v| (v as f64) < median).collect();
        let mask = if strict.iter().any(|&b| b) {
            strict
        } else {
            self.values.iter().map(|&v| v as f64 <= median).collect()
        };
        let m = self.m;
        let mut seen = vec![false; m * m];
        let mut best: Vec<usize> = Vec::new();
        for start in 0..m * m {
            if !mask[start] || seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(idx) = queue.pop_front() {
                comp.push(idx);
                let (row, col) = (idx / m, idx % m);
                let mut visit = |nr: usize, nc: usize| {
                    let j = nr * m + nc;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                };
                if row > 0 {
                    visit(row - 1, col);
                }
                if row + 1 < m {
                    visit(row + 1, col);
                }
                if col > 0 {
                    visit(row, col - 1);
                }
                if col + 1 < m {
                    visit(row, col + 1);
                }
            }
            if comp.len() > best.len() {
                best = comp;
            }
        }
        let (sx, sy) = best.iter().fold((0.0, 0.0), |(sx, sy), &idx| {
            let c = self.center(idx / m, idx % m, r);
            (sx + c.x1, sy + c.x2)
        });
        let n = best.len().max(1) as f64;
        LowComponent {
            median,
            size: best.len(),
            centroid: Point2::new(sx / n, sy / n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowComponent {
    pub median: f64,
    pub size: usize,
    pub centroid: Point2,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ReconError> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Sweeps all test squares against a given near field.
pub fn sweep(n: &NearFieldMatrix, config: &ReconConfig) -> Result<IndicatorMap, ReconError> {
    config.validate_sweep(n)?;
    let test = MonotonicityTest::new(n.entries(), config.alpha, config.direction, config.sign, config.tolerance)?;
    let wave = *n.wave();
    let line = *n.line();
    let m = config.sampling.grid;
    let r = config.sampling.region_size;
    let half = r / (2.0 * m as f64);
    let run = || -> Result<Vec<u32>, ReconError> {
        (0..m * m)
            .into_par_iter()
            .map(|idx| {
                let (row, col) = (idx / m, idx % m);
                let center = Point2::new(r * (col + 1) as f64 / m as f64, r * (row + 1) as f64 / m as f64);
                let square = TestSquare::new(center, half, config.quad_points)?;
                let probe = assemble_probe(&wave, &square, &line)?;
                Ok(test.evaluate(&probe)?.negative_count as u32)
            })
            .collect()
    };
    let values = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| ReconError::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    IndicatorMap::new(m, n.d(), values)
}

impl ReconConfig {
    fn validate_sweep(&self, n: &NearFieldMatrix) -> Result<(), ReconError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(ReconError::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.sampling.grid < 2 || !(self.sampling.region_size > 0.0) {
            return Err(ReconError::Config("sampling needs R > 0 and M ≥ 2".into()));
        }
        if self.quad_points == 0 {
            return Err(ReconError::Config("quad_points must be positive".into()));
        }
        if self.sampling.region_size >= n.line().height {
            return Err(ReconError::Config("sampling region reaches the measurement line".into()));
        }
        Ok(())
    }
}

/// Full pipeline: data, sweep and (if `out` is set) output files.
pub fn run_reconstruction(config: &ReconConfig) -> Result<IndicatorMap, ReconError> {
    let n = synthesize_or_load(config)?;
    if let Some(path) = &config.near_field_out {
        crate::forward::save_near_field(&n, path)?;
    }
    let map = sweep(&n, config)?;
    if let Some(prefix) = &config.out {
        write_outputs(&map, config, prefix)?;
    }
    Ok(map)
}

/// Writes `<prefix>.csv`, `<prefix>.pgm` and the `<prefix>.json` sidecar
/// holding the config hash.
pub fn write_outputs(map: &IndicatorMap, config: &ReconConfig, prefix: &Path) -> Result<(), ReconError> {
    if let Some(dir) = prefix.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let with_ext = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    map.export_csv(with_ext(".csv"))?;
    map.export_pgm(with_ext(".pgm"))?;
    let meta = serde_json::json!({
        "config_hash": config.hash(),
        "config": config,
        "grid": map.m(),
        "d": map.d(),
    });
    write_file(&with_ext(".json"), serde_json::to_string_pretty(&meta)?.as_bytes())
}
