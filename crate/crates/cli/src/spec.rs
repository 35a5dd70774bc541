//! Problem-spec documents: a JSON object describing one instance.
//!
//! ```json
//! {
//!   "kind": "dopt",
//!   "H": {"gaussian": [3, 10]},
//!   "reference": {"type": "log-barrier"},
//!   "L": "auto",
//!   "seed": 7
//! }
//! ```
//!
//! Matrices are nested arrays, a path to a whitespace-separated text file
//! whose first line is `rows cols`, or `{"gaussian": [rows, cols]}` drawn from
//! the problem seed in field order.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use relsmooth::certify::Sampler;
use relsmooth::linalg::Matrix;
use relsmooth::objectives::{DOptimalDesign, PolyQuartic, UnivariatePolynomial, VolumetricObjective};
use relsmooth::oracle::{Objective, Reference, RelSmoothPair};
use relsmooth::refs::{BoxPowerRef, LogBarrierSimplexRef, PowerNormRef, SquaredEuclideanRef};
use relsmooth::rng::Prng;
use relsmooth::solvers::{CompositePiece, L1Piece, LinearPiece, ZeroPiece};
use serde::Deserialize;

/// A spec that failed to parse, with the position of the offending token.
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Dopt,
    Volumetric,
    Quartic,
    CustomPoly,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Dopt => "dopt",
            Kind::Volumetric => "volumetric",
            Kind::Quartic => "quartic",
            Kind::CustomPoly => "custom-poly",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Inline(Vec<Vec<f64>>),
    Gaussian { gaussian: [usize; 2] },
    File(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Constant {
    Value(f64),
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReferenceSpec {
    LogBarrier,
    PowerNorm {
        r: u32,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    BoxPower {
        s: u32,
        u: f64,
    },
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CompositeSpec {
    Zero,
    L1 { lambda: f64 },
    Linear { q: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SamplerSpec {
    Simplex {
        #[serde(default)]
        floor: Option<f64>,
    },
    Gaussian {
        #[serde(default)]
        center: Option<Vec<f64>>,
        scale: f64,
    },
    Box {
        #[serde(default)]
        floor: Option<f64>,
    },
    Grid {
        lo: f64,
        hi: f64,
        points: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dimensions {
    pub m: Option<usize>,
    pub n: Option<usize>,
}

/// The document as written.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: Kind,
    #[serde(default)]
    pub dimensions: Dimensions,
    #[serde(rename = "H", default)]
    pub h: Option<MatrixSource>,
    #[serde(default)]
    pub p: Option<i64>,
    #[serde(rename = "A", default)]
    pub a: Option<MatrixSource>,
    #[serde(default)]
    pub b: Option<Vec<f64>>,
    #[serde(rename = "C", default)]
    pub c: Option<MatrixSource>,
    #[serde(default)]
    pub d: Option<Vec<f64>>,
    #[serde(rename = "E", default)]
    pub e: Option<MatrixSource>,
    /// Ascending coefficients of a univariate polynomial.
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    #[serde(rename = "L", default)]
    pub l: Option<Constant>,
    #[serde(default)]
    pub mu: Option<Constant>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub composite: Option<CompositeSpec>,
    #[serde(default)]
    pub sampler: Option<SamplerSpec>,
    #[serde(default)]
    pub seed: u64,
}

impl ProblemSpec {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        serde_json::from_str(text)
            .map_err(|e| ParseError { line: e.line(), column: e.column(), message: strip_position(&e.to_string()) })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading spec {}", path.display()))?;
        Self::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }

    /// Builds every oracle. Relative matrix paths resolve against the working directory.
    pub fn resolve(&self) -> Result<Problem> {
        let mut rng = Prng::new(self.seed);
        match self.kind {
            Kind::Dopt | Kind::Volumetric => self.resolve_design(&mut rng),
            Kind::Quartic => self.resolve_quartic(&mut rng),
            Kind::CustomPoly => self.resolve_poly(),
        }
    }

    fn resolve_design(&self, rng: &mut Prng) -> Result<Problem> {
        let h = load_matrix(self.h.as_ref().context("field \"H\" is required")?, rng).context("field \"H\"")?;
        if let Some(m) = self.dimensions.m {
            if m != h.rows() {
                bail!("dimensions.m = {m} but H has {} rows", h.rows());
            }
        }
        if let Some(n) = self.dimensions.n {
            if n != h.cols() {
                bail!("dimensions.n = {n} but H has {} columns", h.cols());
            }
        }
        let n = h.cols();
        let reference = self.build_reference(n, Some(ReferenceSpec::LogBarrier))?;
        let (objective, design, auto_l): (Arc<dyn Objective<f64>>, _, f64) = if self.kind == Kind::Dopt {
            if self.p.is_some() {
                bail!("field \"p\" applies to volumetric specs only");
            }
            let d = Arc::new(DOptimalDesign::new(h).context("field \"H\"")?);
            (d.clone(), Some(d), 1.0)
        } else {
            let p = self.p.context("field \"p\" is required for volumetric specs")?;
            let v = VolumetricObjective::new(h, p).context("field \"p\"")?;
            let l = v.relative_l();
            (Arc::new(v), None, l)
        };
        self.finish(objective, reference, design, auto_l, 0.0)
    }

    fn resolve_quartic(&self, rng: &mut Prng) -> Result<Problem> {
        let a = load_matrix(self.a.as_ref().context("field \"A\" is required")?, rng).context("field \"A\"")?;
        let n = a.cols();
        let b = self.b.clone().unwrap_or_else(|| vec![0.0; a.rows()]);
        let c = match &self.c {
            Some(src) => load_matrix(src, rng).context("field \"C\"")?,
            None => Matrix::zeros(0, n),
        };
        let d = self.d.clone().unwrap_or_else(|| vec![0.0; c.rows()]);
        let e = match &self.e {
            Some(src) => Some(load_matrix(src, rng).context("field \"E\"")?),
            None => None,
        };
        let q = PolyQuartic::new(a, b, c, d, e).context("quartic data")?;
        let reference = self.build_reference(n, Some(ReferenceSpec::PowerNorm { r: 2, center: None }))?;
        if !matches!(self.reference, None | Some(ReferenceSpec::PowerNorm { r: 2, center: None })) {
            // The automatic constants hold for the power-norm reference with r = 2 about the origin.
            if self.l.as_ref().is_some_and(is_auto) || self.mu.as_ref().is_some_and(is_auto) {
                bail!("\"auto\" constants for quartic specs need reference power-norm with r = 2 and no center");
            }
        }
        let (l, mu) = (q.relative_l(), q.relative_mu());
        self.finish(Arc::new(q), reference, None, l, mu)
    }

    fn resolve_poly(&self) -> Result<Problem> {
        let coeffs = self.coeffs.clone().context("field \"coeffs\" is required for custom-poly specs")?;
        let f = UnivariatePolynomial::new(coeffs).context("field \"coeffs\"")?;
        let reference = self.build_reference(1, Some(ReferenceSpec::PowerNorm { r: 2, center: None }))?;
        if self.l.as_ref().is_none_or(is_auto) {
            bail!("custom-poly specs need a numeric \"L\"");
        }
        if self.mu.as_ref().is_some_and(is_auto) {
            bail!("custom-poly specs need a numeric \"mu\"");
        }
        self.finish(Arc::new(f), reference, None, f64::NAN, 0.0)
    }

    fn build_reference(&self, n: usize, default: Option<ReferenceSpec>) -> Result<Arc<dyn Reference<f64>>> {
        let spec = self.reference.clone().or(default).context("field \"reference\" is required")?;
        let r: Arc<dyn Reference<f64>> = match spec {
            ReferenceSpec::LogBarrier => Arc::new(LogBarrierSimplexRef::new(n)?),
            ReferenceSpec::PowerNorm { r, center: None } => Arc::new(PowerNormRef::new(r, n)?),
            ReferenceSpec::PowerNorm { r, center: Some(c) } => {
                if c.len() != n {
                    bail!("reference center has length {}, expected {n}", c.len());
                }
                Arc::new(PowerNormRef::with_center(r, c)?)
            }
            ReferenceSpec::BoxPower { s, u } => Arc::new(BoxPowerRef::new(s, u, n)?),
            ReferenceSpec::Euclidean => Arc::new(SquaredEuclideanRef::new(n)?),
        };
        Ok(r)
    }

    fn finish(
        &self,
        objective: Arc<dyn Objective<f64>>,
        reference: Arc<dyn Reference<f64>>,
        design: Option<Arc<DOptimalDesign<f64>>>,
        auto_l: f64,
        auto_mu: f64,
    ) -> Result<Problem> {
        let l = resolve_constant(self.l.as_ref(), auto_l, "L")?;
        let mu = resolve_constant(self.mu.as_ref(), auto_mu, "mu")?;
        let pair = RelSmoothPair::new(objective, reference, l, mu).context("objective/reference pair")?;
        let n = pair.dim();
        let x0 = match &self.x0 {
            Some(x) => {
                if x.len() != n {
                    bail!("field \"x0\" has length {}, expected {n}", x.len());
                }
                pair.domain().require_interior(x).context("field \"x0\"")?;
                x.clone()
            }
            None => pair.reference.center().context("default x0")?,
        };
        let composite = self.composite.clone().unwrap_or(CompositeSpec::Zero);
        if let CompositeSpec::Linear { q } = &composite {
            if q.len() != n {
                bail!("composite q has length {}, expected {n}", q.len());
            }
        }
        if let CompositeSpec::L1 { lambda } = composite {
            L1Piece::new(lambda).context("composite lambda")?;
        }
        let sampler = match &self.sampler {
            Some(s) => build_sampler(s, pair.domain(), n)?,
            None => Sampler::for_domain(pair.domain())?,
        };
        sampler.validate().context("field \"sampler\"")?;
        Ok(Problem { kind: self.kind, pair, design, x0, composite, sampler, seed: self.seed })
    }
}

fn is_auto(c: &Constant) -> bool {
    matches!(c, Constant::Word(w) if w == "auto")
}

fn resolve_constant(c: Option<&Constant>, auto: f64, name: &str) -> Result<f64> {
    match c {
        None => {
            if auto.is_nan() {
                bail!("field \"{name}\" is required");
            }
            Ok(auto)
        }
        Some(Constant::Value(v)) => Ok(*v),
        Some(Constant::Word(w)) if w == "auto" => {
            if auto.is_nan() {
                bail!("\"{name}\": \"auto\" is not available for this kind");
            }
            Ok(auto)
        }
        Some(Constant::Word(w)) => bail!("field \"{name}\" must be a number or \"auto\", got {w:?}"),
    }
}

fn build_sampler(s: &SamplerSpec, domain: &relsmooth::domain::Domain<f64>, n: usize) -> Result<Sampler> {
    use relsmooth::domain::Domain;
    Ok(match s {
        SamplerSpec::Simplex { floor } => {
            Sampler::Simplex { dim: n, floor: floor.unwrap_or(relsmooth::certify::DEFAULT_FLOOR) }
        }
        SamplerSpec::Gaussian { center, scale } => {
            Sampler::Gaussian { center: center.clone().unwrap_or_else(|| vec![0.0; n]), scale: *scale }
        }
        SamplerSpec::Box { floor } => match domain {
            Domain::OpenBox { upper, .. } => Sampler::Box {
                dim: n,
                upper: *upper,
                floor: floor.unwrap_or(relsmooth::certify::DEFAULT_FLOOR),
            },
            _ => bail!("box sampler needs a box-power reference"),
        },
        SamplerSpec::Grid { lo, hi, points } => {
            if n != 1 {
                bail!("grid sampler needs a one-dimensional problem, got n = {n}");
            }
            Sampler::Grid { lo: *lo, hi: *hi, points: *points }
        }
    })
}

/// Reads `rows cols` followed by `rows·cols` whitespace-separated numbers.
pub fn read_matrix_file(path: &Path) -> Result<Matrix<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading matrix file {}", path.display()))?;
    parse_matrix_text(&text).with_context(|| format!("matrix file {}", path.display()))
}

pub fn parse_matrix_text(text: &str) -> Result<Matrix<f64>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty matrix file")?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>().with_context(|| format!("header token {t:?} is not a count")))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        bail!("header must be \"rows cols\", got {header:?}");
    };
    let mut data = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().with_context(|| format!("line {}: {tok:?} is not a number", i + 2))?;
            data.push(v);
        }
    }
    if data.len() != rows * cols {
        bail!("expected {} entries for a {rows}x{cols} matrix, found {}", rows * cols, data.len());
    }
    Ok(Matrix::from_row_major(rows, cols, data)?)
}

fn load_matrix(src: &MatrixSource, rng: &mut Prng) -> Result<Matrix<f64>> {
    match src {
        MatrixSource::Inline(rows) => Ok(Matrix::from_rows(rows)?),
        MatrixSource::File(p) => read_matrix_file(Path::new(p)),
        MatrixSource::Gaussian { gaussian: [r, c] } => {
            if *r == 0 || *c == 0 {
                bail!("gaussian matrix needs positive dimensions, got {r}x{c}");
            }
            Ok(rng.gaussian_matrix(*r, *c))
        }
    }
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// A resolved instance.
pub struct Problem {
    pub kind: Kind,
    pub pair: RelSmoothPair<f64>,
    /// The design when the kind is `dopt`, for Frank–Wolfe.
    pub design: Option<Arc<DOptimalDesign<f64>>>,
    pub x0: Vec<f64>,
    pub composite: CompositeSpec,
    pub sampler: Sampler,
    pub seed: u64,
}

impl Problem {
    pub fn composite_piece(&self) -> Box<dyn CompositePiece<f64>> {
        match &self.composite {
            CompositeSpec::Zero => Box::new(ZeroPiece),
            CompositeSpec::L1 { lambda } => Box::new(L1Piece { lambda: *lambda }),
            CompositeSpec::Linear { q } => Box::new(LinearPiece { q: q.clone() }),
        }
    }
}
