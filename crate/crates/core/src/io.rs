//! The `.fc` interchange format: a TOML document holding a fusion ring, its
//! nontrivial associator blocks and optional rigidity and pivotal scalars.
//!
//! ```toml
//! format_version = 1
//! cyclotomic_order = 12
//!
//! [ring]
//! labels = ["1", "y", "x"]
//! unit = 0
//! dual = [0, 1, 2]
//! N = [...]
//!
//! [associators]
//! "x,y,x->x" = [[["1", "0", "0", "0"], ...], ...]
//! ```
//!
//! A block key "x,y,z->u" names a^u_{x,y,z}. Every field element is an array of four
//! rationals in lowest terms, the coefficients of 1, ζ, ζ², ζ³ with ζ = e^{πi/6}.
//! Unit-involving blocks are implicit identities and must be omitted. Parsing checks
//! structure only; the fusion-ring axioms are left to `FusionRing::validate`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::associator::{block_dim, key_name, AssociatorSet, BlockKey};
use crate::cyclotomic::{parse_rational, rational_to_string, Cyclotomic};
use crate::fusion_ring::FusionRing;
use crate::matrix::FieldMatrix;
use crate::pivotal::PivotalStructure;
use crate::rigidity_dual::RigidityStructure;

pub const FORMAT_VERSION: i64 = 1;
pub const CYCLOTOMIC_ORDER: i64 = 12;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{line}:{column}: {reason}")]
    Parse { line: usize, column: usize, reason: String },
    #[error("unsupported format_version {found}; this build reads version {FORMAT_VERSION}")]
    UnsupportedVersion { found: i64 },
    #[error("{line}:{column}: {block} must be {expected}x{expected}, found {rows}x{cols}")]
    ShapeMismatch { line: usize, column: usize, block: String, expected: usize, rows: usize, cols: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CategoryFile {
    /// Carries the ring. Blocks may be missing; see [`CategoryFile::missing_blocks`].
    pub associators: AssociatorSet,
    pub rigidity: Option<RigidityStructure>,
    pub pivotal: Option<PivotalStructure>,
}

impl CategoryFile {
    pub fn new(associators: AssociatorSet) -> Self {
        CategoryFile { associators, rigidity: None, pivotal: None }
    }

    pub fn ring(&self) -> &FusionRing {
        self.associators.ring()
    }

    pub fn missing_blocks(&self) -> Vec<String> {
        self.associators.missing_blocks().into_iter().map(|k| key_name(self.ring(), k)).collect()
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
        parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        std::fs::write(path, serialize(self)).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
    }
}

type RawCoeffs = Spanned<Vec<Spanned<String>>>;
type RawMatrix = Spanned<Vec<Vec<RawCoeffs>>>;
type RawScalars = BTreeMap<Spanned<String>, RawCoeffs>;

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[allow(dead_code)]
    format_version: i64,
    cyclotomic_order: Spanned<i64>,
    ring: Spanned<RawRing>,
    #[serde(default)]
    associators: BTreeMap<Spanned<String>, RawMatrix>,
    rigidity: Option<RawRigidity>,
    pivotal: Option<RawPivotal>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<u32>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRigidity {
    death: Spanned<RawScalars>,
    birth: Spanned<RawScalars>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPivotal {
    t: Spanned<RawScalars>,
}

/// Maps byte offsets to 1-based line and column (in characters).
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn position(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        (line, column)
    }

    fn error(&self, span: Range<usize>, reason: impl Into<String>) -> FormatError {
        let (line, column) = self.position(span.start);
        FormatError::Parse { line, column, reason: reason.into() }
    }
}

fn field_element(loc: &Locator, raw: &RawCoeffs) -> Result<Cyclotomic, FormatError> {
    let parts = raw.get_ref();
    if parts.len() != 4 {
        return Err(loc.error(raw.span(), format!("expected 4 coefficients, found {}", parts.len())));
    }
    let mut coeffs = Vec::with_capacity(4);
    for p in parts {
        coeffs.push(parse_rational(p.get_ref()).map_err(|e| loc.error(p.span(), e.to_string()))?);
    }
    Ok(Cyclotomic::new(coeffs.try_into().expect("four coefficients")))
}

fn block_key(loc: &Locator, ring: &FusionRing, raw: &Spanned<String>) -> Result<BlockKey, FormatError> {
    let bad = |reason: String| loc.error(raw.span(), reason);
    let text = raw.get_ref();
    let (lhs, target) = text.split_once("->").ok_or_else(|| bad(format!("block key {text:?} is not of the form \"x,y,z->u\"")))?;
    let strands: Vec<&str> = lhs.split(',').map(str::trim).collect();
    if strands.len() != 3 {
        return Err(bad(format!("block key {text:?} needs three strands before \"->\"")));
    }
    let mut idx = Vec::with_capacity(4);
    for name in strands.into_iter().chain(std::iter::once(target.trim())) {
        idx.push(ring.index(name).map_err(|_| bad(format!("unknown strand {name:?} in block key {text:?}")))?);
    }
    Ok((idx[0], idx[1], idx[2], idx[3]))
}

fn scalars(loc: &Locator, ring: &FusionRing, raw: &Spanned<RawScalars>, what: &str) -> Result<Vec<Cyclotomic>, FormatError> {
    let mut out = vec![None; ring.rank()];
    for (label, value) in raw.get_ref() {
        let i = ring.index(label.get_ref()).map_err(|_| loc.error(label.span(), format!("unknown strand {:?} in {what}", label.get_ref())))?;
        out[i] = Some(field_element(loc, value)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| loc.error(raw.span(), format!("{what} has no entry for strand {:?}", ring.label(i)))))
        .collect()
}

pub fn parse(text: &str) -> Result<CategoryFile, FormatError> {
    let loc = Locator { text };
    let toml_error = |e: toml::de::Error| loc.error(e.span().unwrap_or(0..0), e.message().trim().to_string());
    let probe: VersionProbe = toml::from_str(text).map_err(toml_error)?;
    match probe.format_version {
        None => return Err(loc.error(0..0, "missing format_version")),
        Some(v) if *v.get_ref() != FORMAT_VERSION => return Err(FormatError::UnsupportedVersion { found: *v.get_ref() }),
        Some(_) => {}
    }
    let raw: RawFile = toml::from_str(text).map_err(toml_error)?;
    if *raw.cyclotomic_order.get_ref() != CYCLOTOMIC_ORDER {
        return Err(loc.error(raw.cyclotomic_order.span(), format!("cyclotomic_order must be {CYCLOTOMIC_ORDER}")));
    }
    let ring_span = raw.ring.span();
    let r = raw.ring.into_inner();
    let ring = FusionRing::new(r.labels, r.unit, r.dual, r.n).map_err(|e| loc.error(ring_span, format!("invalid ring: {e}")))?;

    let mut f = AssociatorSet::new(ring.clone());
    for (key, matrix) in &raw.associators {
        let k = block_key(&loc, &ring, key)?;
        let (x, y, z, _) = k;
        if [x, y, z].contains(&ring.unit()) {
            return Err(loc.error(key.span(), format!("{} involves the unit and must be omitted", key_name(&ring, k))));
        }
        let rows = matrix.get_ref();
        let expected = block_dim(&ring, k);
        let cols = rows.first().map_or(0, Vec::len);
        if rows.len() != expected || rows.iter().any(|r| r.len() != expected) || expected == 0 {
            let (line, column) = loc.position(matrix.span().start);
            let cols = if rows.iter().all(|r| r.len() == cols) { cols } else { rows.iter().map(Vec::len).max().unwrap_or(0) };
            return Err(FormatError::ShapeMismatch { line, column, block: key_name(&ring, k), expected, rows: rows.len(), cols });
        }
        let entries: Vec<Vec<Cyclotomic>> = rows.iter().map(|r| r.iter().map(|c| field_element(&loc, c)).collect()).collect::<Result<_, _>>()?;
        f.set(k, FieldMatrix::from_rows(entries)).map_err(|e| loc.error(matrix.span(), e.to_string()))?;
    }

    let rigidity = match &raw.rigidity {
        None => None,
        Some(rr) => {
            let death = scalars(&loc, &ring, &rr.death, "rigidity.death")?;
            let birth = scalars(&loc, &ring, &rr.birth, "rigidity.birth")?;
            Some(RigidityStructure::new(&ring, death, birth).map_err(|e| loc.error(rr.death.span(), e.to_string()))?)
        }
    };
    let pivotal = match &raw.pivotal {
        None => None,
        Some(p) => Some(PivotalStructure { t: scalars(&loc, &ring, &p.t, "pivotal.t")? }),
    };
    Ok(CategoryFile { associators: f, rigidity, pivotal })
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn coeffs(c: &Cyclotomic) -> String {
    let parts: Vec<String> = c.coeffs().iter().map(|q| quoted(&rational_to_string(q))).collect();
    format!("[{}]", parts.join(", "))
}

fn int_list<T: ToString>(v: &[T]) -> String {
    format!("[{}]", v.iter().map(T::to_string).collect::<Vec<_>>().join(", "))
}

fn scalar_table(out: &mut String, ring: &FusionRing, header: &str, values: &[Cyclotomic]) {
    let sorted: BTreeMap<&str, &Cyclotomic> = values.iter().enumerate().map(|(i, v)| (ring.label(i), v)).collect();
    let _ = writeln!(out, "\n[{header}]");
    for (label, v) in sorted {
        let _ = writeln!(out, "{} = {}", quoted(label), coeffs(v));
    }
}

/// Deterministic text: keys sorted, rationals in lowest terms.
pub fn serialize(file: &CategoryFile) -> String {
    let ring = file.ring();
    let mut out = String::new();
    let _ = writeln!(out, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(out, "cyclotomic_order = {CYCLOTOMIC_ORDER}");
    let _ = writeln!(out, "\n[ring]");
    let labels: Vec<String> = ring.labels().iter().map(|l| quoted(l)).collect();
    let _ = writeln!(out, "labels = [{}]", labels.join(", "));
    let _ = writeln!(out, "unit = {}", ring.unit());
    let _ = writeln!(out, "dual = {}", int_list(ring.duals()));
    let _ = writeln!(out, "N = [");
    for plane in ring.tensor() {
        let rows: Vec<String> = plane.iter().map(|r| int_list(r)).collect();
        let _ = writeln!(out, "  [{}],", rows.join(", "));
    }
    let _ = writeln!(out, "]");
    let _ = writeln!(out, "\n[associators]");
    let blocks: BTreeMap<String, &FieldMatrix> = file
        .associators
        .stored()
        .iter()
        .map(|(&(x, y, z, u), m)| (format!("{},{},{}->{}", ring.label(x), ring.label(y), ring.label(z), ring.label(u)), m))
        .collect();
    for (key, m) in blocks {
        let rows: Vec<String> = m.to_rows().iter().map(|r| format!("[{}]", r.iter().map(coeffs).collect::<Vec<_>>().join(", "))).collect();
        let _ = writeln!(out, "{} = [{}]", quoted(&key), rows.join(", "));
    }
    if let Some(r) = &file.rigidity {
        scalar_table(&mut out, ring, "rigidity.death", &r.death);
        scalar_table(&mut out, ring, "rigidity.birth", &r.birth);
    }
    if let Some(p) = &file.pivotal {
        scalar_table(&mut out, ring, "pivotal.t", &p.t);
    }
    out
}

/// Directory holding the checked-in `.fc` fixtures.
pub fn fixtures_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// The appendix fixture (k = 1) or its conjugate under ζ ↦ ζ^k.
pub fn fixture_name(k: i64) -> String {
    match k {
        1 => "appendix.fc".to_string(),
        _ => format!("appendix_sigma{k}.fc"),
    }
}
