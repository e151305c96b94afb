//! Scenario schema: a JSON file describes one run of one subcommand.
//!
//! Every scenario carries a `kind` tag that must match the subcommand it is
//! fed to; the mismatch is reported as invalid input, not as a failed run.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use hig_core::{
    BernsteinOptions, BoxDomain, CalibrationThresholds, GraphFunction, GridField,
    HorizontalSection, InitialData, LipschitzProfile, QuadratureSpec, ScalarField,
};

/// Top-level scenario, dispatched on the `kind` tag.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Area(AreaScenario),
    Characteristics(CharsScenario),
    Variation(VariationScenario),
    Calibration(CalibrationScenario),
    Bernstein(BernsteinScenario),
    Reproduce(ReproduceScenario),
}

impl Scenario {
    /// Tag string, used to cross-check against the invoked subcommand.
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Area(_) => "area",
            Scenario::Characteristics(_) => "characteristics",
            Scenario::Variation(_) => "variation",
            Scenario::Calibration(_) => "calibration",
            Scenario::Bernstein(_) => "bernstein",
            Scenario::Reproduce(_) => "reproduce",
        }
    }
}

/// Axis-aligned box given by corner vectors.
#[derive(Debug, Clone, Deserialize)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxSpec {
    pub fn build(&self) -> Result<BoxDomain> {
        BoxDomain::new(self.lo.clone(), self.hi.clone()).context("invalid box in scenario")
    }
}

/// Gauss-Legendre panel layout; omitted fields fall back to the default rule.
#[derive(Debug, Clone, Deserialize)]
pub struct QuadSpec {
    pub order: usize,
    pub cells: usize,
}

impl QuadSpec {
    pub fn build(&self) -> Result<QuadratureSpec> {
        if self.order == 0 || self.order > 32 || self.cells == 0 {
            bail!(
                "quadrature order must be 1..=32 and cells nonzero, got order {} cells {}",
                self.order,
                self.cells
            );
        }
        Ok(QuadratureSpec::fixed(self.order, self.cells))
    }
}

pub fn quad_or_default(spec: &Option<QuadSpec>) -> Result<QuadratureSpec> {
    match spec {
        Some(q) => q.build(),
        None => Ok(QuadratureSpec::default()),
    }
}

/// Read a CSV payload as a flat list of numbers, record order preserved.
/// A leading non-numeric record is treated as a header and skipped.
fn read_csv_samples(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening samples file {}", path.display()))?;
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("reading {}", path.display()))?;
        for field in record.iter() {
            if field.is_empty() {
                continue;
            }
            match field.parse::<f64>() {
                Ok(v) => out.push(v),
                Err(_) if row == 0 => {
                    out.clear();
                    break;
                }
                Err(_) => bail!("non-numeric field {field:?} in {}", path.display()),
            }
        }
    }
    if out.is_empty() {
        bail!("no numeric samples in {}", path.display());
    }
    Ok(out)
}

/// Read a two-column CSV payload (header row optional) into parallel vectors.
fn read_csv_pairs(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening samples file {}", path.display()))?;
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("reading {}", path.display()))?;
        if record.len() != 2 {
            bail!("{} must hold two fields per record", path.display());
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                first.push(a);
                second.push(b);
            }
            _ if row == 0 => continue,
            _ => bail!("non-numeric record {:?} in {}", &record, path.display()),
        }
    }
    if first.is_empty() {
        bail!("no numeric samples in {}", path.display());
    }
    Ok((first, second))
}

/// Built-in initial-data families for the characteristic flow.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "id")]
pub enum DataSpec {
    #[serde(rename = "linear")]
    Linear { alpha: f64 },
    #[serde(rename = "ex4.7")]
    DegenerateFan,
    #[serde(rename = "ex4.8")]
    ShiftedParabola,
    #[serde(rename = "tanh")]
    Tanh,
    #[serde(rename = "constants")]
    Constants { a0: f64, b0: f64 },
    /// Sampled coefficients on a uniform lattice over `[c_lo, c_hi]`; the
    /// CSV payload holds one `a,b` record per node.
    #[serde(rename = "grid")]
    Grid { c_lo: f64, c_hi: f64, samples: PathBuf },
}

impl DataSpec {
    /// Relative CSV paths are resolved against `base`, the scenario's directory.
    pub fn build(&self, base: &Path) -> Result<InitialData> {
        Ok(match self {
            DataSpec::Linear { alpha } => InitialData::linear(*alpha),
            DataSpec::DegenerateFan => InitialData::degenerate_fan(),
            DataSpec::ShiftedParabola => InitialData::shifted_parabola(),
            DataSpec::Tanh => InitialData::tanh_data(),
            DataSpec::Constants { a0, b0 } => InitialData::constants(*a0, *b0),
            DataSpec::Grid { c_lo, c_hi, samples } => {
                let (a, b) = read_csv_pairs(&base.join(samples))?;
                InitialData::from_samples(*c_lo, *c_hi, a, b).context("sampled initial data")?
            }
        })
    }
}

fn default_synth_step() -> f64 {
    1e-3
}

fn default_lift_step() -> f64 {
    5e-5
}

/// Graph construction recipes shared by the area/variation/calibration runners.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphSpec {
    /// One-parameter non-minimizing family, closed form.
    Dgn { alpha: f64 },
    /// Vertical plane with intrinsic slope `w` and offset `c`.
    Affine { w: f64, c: f64 },
    /// Entire graph synthesized from initial data by the characteristic flow.
    Synthesized {
        data: DataSpec,
        domain: BoxSpec,
        #[serde(default = "default_synth_step")]
        step: f64,
    },
    /// Minimal five-dimensional graph lifted from a classical minimal surface.
    LiftedScherk {
        domain: Option<BoxSpec>,
        #[serde(default = "default_lift_step")]
        step: f64,
    },
    /// Graph of a glued Lipschitz profile, exact a.e. calculus.
    LipschitzAbs { bound: f64 },
    /// Sampled graph values on a lattice over `bbox`; the CSV payload lists
    /// nodes in lexicographic order, last axis fastest.
    Grid {
        n: usize,
        bbox: BoxSpec,
        counts: Vec<usize>,
        values: PathBuf,
    },
}

impl GraphSpec {
    /// Relative CSV paths are resolved against `base`, the scenario's directory.
    pub fn build(&self, base: &Path) -> Result<GraphFunction> {
        match self {
            GraphSpec::Dgn { alpha } => {
                GraphFunction::dgn(*alpha).context("dgn graph construction")
            }
            GraphSpec::Affine { w, c } => {
                GraphFunction::affine(*w, *c).context("plane construction")
            }
            GraphSpec::Synthesized { data, domain, step } => {
                let chart = hig_core::CharacteristicChart::new(data.build(base)?);
                chart
                    .synthesize_phi(domain.build()?, *step)
                    .context("graph synthesis from initial data")
            }
            GraphSpec::LiftedScherk { domain, step } => {
                let domain = match domain {
                    Some(b) => b.build()?,
                    None => BoxDomain::new(
                        vec![-0.25, -0.25, -0.5, -0.5],
                        vec![0.25, 0.25, 0.5, 0.5],
                    )?,
                };
                let psi: Arc<dyn ScalarField> = Arc::new(hig_core::scherk_psi());
                GraphFunction::lift_classical(psi, domain, *step).context("classical lift")
            }
            GraphSpec::LipschitzAbs { bound } => {
                let graph = hig_core::lipschitz_phi_from_beta(LipschitzProfile::abs());
                let b = *bound;
                if !(b > 0.0) || b >= graph.slope_bound() {
                    bail!(
                        "lipschitz_abs bound must lie in (0, {}), got {b}",
                        graph.slope_bound()
                    );
                }
                let field = hig_core::ClosedField::new(2, move |p: &[f64]| {
                    graph.value(p[0], p[1]).unwrap_or(f64::NAN)
                });
                let domain = BoxDomain::new(vec![-b, -1e3], vec![b, 1e3])?;
                GraphFunction::from_field(1, domain, Arc::new(field))
                    .context("lipschitz graph construction")
            }
            GraphSpec::Grid { n, bbox, counts, values } => {
                let samples = read_csv_samples(&base.join(values))?;
                let grid = GridField::new(bbox.build()?, counts.clone(), samples)
                    .context("graph sample grid")?;
                GraphFunction::from_grid(*n, grid).context("sampled graph construction")
            }
        }
    }
}

/// Area of a graph over a window, optionally re-measured under dilations.
#[derive(Debug, Deserialize)]
pub struct AreaScenario {
    pub graph: GraphSpec,
    pub window: BoxSpec,
    #[serde(default)]
    pub dilations: Vec<f64>,
    pub quadrature: Option<QuadSpec>,
}

/// Expected outcome of domain classification for a characteristic chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainExpectation {
    AllOfPlane,
    ProperSubset,
    Inadmissible,
    Undetermined,
}

impl DomainExpectation {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainExpectation::AllOfPlane => "all_of_plane",
            DomainExpectation::ProperSubset => "proper_subset",
            DomainExpectation::Inadmissible => "inadmissible",
            DomainExpectation::Undetermined => "undetermined",
        }
    }
}

fn default_counts2() -> Vec<usize> {
    vec![15, 15]
}

fn default_fd_step() -> f64 {
    1e-4
}

/// Chart diagnostics: admissibility, domain verdict, inversion round trip,
/// and the transport equation satisfied by the synthesized slope field.
#[derive(Debug, Deserialize)]
pub struct CharsScenario {
    pub data: DataSpec,
    pub window: BoxSpec,
    #[serde(default = "default_counts2")]
    pub counts: Vec<usize>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    pub expect_domain: Option<DomainExpectation>,
    /// Optional single inversion probe `[x, t]`; its outcome is reported but
    /// never gates the run, so degeneracies can be exhibited without failing.
    pub probe: Option<[f64; 2]>,
}

/// First and second variation over a battery of compactly supported bumps.
#[derive(Debug, Deserialize)]
pub struct VariationScenario {
    pub graph: GraphSpec,
    pub window: BoxSpec,
    pub quadrature: Option<QuadSpec>,
    /// Extra planes drawn from the seed; planes must be critical and stable.
    #[serde(default)]
    pub random_planes: usize,
    /// Gate the battery's second variation at `-tol` from below.
    #[serde(default)]
    pub require_stability: bool,
}

/// Horizontal unit sections available to the calibration checker.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SectionSpec {
    Constant { n: usize, coeffs: Vec<f64> },
    DgnXyt { alpha: f64 },
    TgraphPoly { a: f64, b: f64 },
    /// Normal field of a lifted classical graph, named by its height function.
    Lift { psi: String },
    /// Coefficient fields sampled on a lattice over `region`; the CSV payload
    /// holds one `x,y` record per node, last axis fastest.
    Grid {
        region: BoxSpec,
        counts: Vec<usize>,
        coeffs: PathBuf,
    },
}

impl SectionSpec {
    /// Relative CSV paths are resolved against `base`, the scenario's directory.
    pub fn build(&self, base: &Path) -> Result<HorizontalSection> {
        match self {
            SectionSpec::Constant { n, coeffs } => {
                HorizontalSection::constant(*n, coeffs.clone()).context("constant section")
            }
            SectionSpec::DgnXyt { alpha } => {
                HorizontalSection::dgn_xyt(*alpha).context("angular section")
            }
            SectionSpec::TgraphPoly { a, b } => {
                HorizontalSection::tgraph_poly(*a, *b).context("t-graph section")
            }
            SectionSpec::Lift { psi } => match psi.as_str() {
                "scherk" => HorizontalSection::scherk_lift().context("lifted section"),
                other => bail!("unknown lift height function {other:?} (try \"scherk\")"),
            },
            SectionSpec::Grid { region, counts, coeffs } => {
                let (x, y) = read_csv_pairs(&base.join(coeffs))?;
                HorizontalSection::from_grids(region.build()?, counts.clone(), x, y)
                    .context("sampled section construction")
            }
        }
    }
}

/// Overrides for the calibration tolerances; omitted fields keep defaults.
#[derive(Debug, Clone, Deserialize)]
pub struct ThresholdSpec {
    pub norm: Option<f64>,
    pub divergence: Option<f64>,
    pub normal_match: Option<f64>,
}

impl ThresholdSpec {
    pub fn build(&self) -> CalibrationThresholds {
        let mut t = CalibrationThresholds::default();
        if let Some(v) = self.norm {
            t.norm = v;
        }
        if let Some(v) = self.divergence {
            t.divergence = v;
        }
        if let Some(v) = self.normal_match {
            t.normal_match = v;
        }
        t
    }
}

fn default_div_step() -> f64 {
    1e-6
}

/// Certify a graph as area-minimizing against a candidate section.
#[derive(Debug, Deserialize)]
pub struct CalibrationScenario {
    pub section: SectionSpec,
    pub graph: GraphSpec,
    pub base_window: BoxSpec,
    pub counts: Vec<usize>,
    #[serde(default = "default_div_step")]
    pub fd_step: f64,
    pub thresholds: Option<ThresholdSpec>,
}

/// Expected verdict of the rigidity pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BernsteinExpectation {
    VerticalPlane,
    NonMinimizing,
    /// The data fails the entrance conditions (inadmissible or not entire).
    Rejected,
}

impl BernsteinExpectation {
    pub fn as_str(self) -> &'static str {
        match self {
            BernsteinExpectation::VerticalPlane => "vertical_plane",
            BernsteinExpectation::NonMinimizing => "non_minimizing",
            BernsteinExpectation::Rejected => "rejected",
        }
    }
}

/// Pipeline option overrides; omitted fields keep library defaults.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct BernsteinOptsSpec {
    pub epsilon: Option<f64>,
    pub c_halfwidth: Option<f64>,
    pub phi_step: Option<f64>,
    pub quad_cells: Option<usize>,
}

impl BernsteinOptsSpec {
    pub fn build(&self) -> Result<BernsteinOptions> {
        let mut opts = BernsteinOptions::default();
        if let Some(v) = self.epsilon {
            opts.epsilon = v;
        }
        if let Some(v) = self.c_halfwidth {
            opts.c_halfwidth = v;
        }
        if let Some(v) = self.phi_step {
            opts.phi_step = v;
        }
        if let Some(cells) = self.quad_cells {
            if cells == 0 {
                bail!("quad_cells must be nonzero");
            }
            opts.quadrature = QuadratureSpec::fixed(8, cells);
        }
        Ok(opts)
    }
}

/// Run the rigidity pipeline on one data set and check the verdict.
#[derive(Debug, Deserialize)]
pub struct BernsteinScenario {
    pub data: DataSpec,
    /// Without an expectation any cleanly produced verdict passes.
    pub expect: Option<BernsteinExpectation>,
    #[serde(default)]
    pub options: BernsteinOptsSpec,
    /// Concentration parameters for the witness sweep (non-minimizing only).
    #[serde(default)]
    pub sweep: Vec<f64>,
}

/// Run the example battery; empty `rows` means every row.
#[derive(Debug, Deserialize)]
pub struct ReproduceScenario {
    #[serde(default)]
    pub rows: Vec<String>,
}
