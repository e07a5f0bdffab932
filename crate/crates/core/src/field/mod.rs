//! Sampled fields on rectangular grids and the discrete checks run on them.

pub mod manufactured;
pub mod verify;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, enumerate_subsets, PFormValue};

/// Sample counts, spacing and origin of a rectangular grid in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    dims: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    strides: Vec<usize>,
}

impl GridSpec {
    pub fn new(dims: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let d = dims.len();
        if d == 0 {
            return Err(Error::Input("grid needs at least one axis".into()));
        }
        if spacing.len() != d || origin.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: spacing.len().min(origin.len()),
            });
        }
        if let Some(h) = spacing.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
            return Err(Error::Input(format!("grid spacing {h} must be positive")));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::GridTooSmall(dims));
        }
        let mut strides = vec![1; d];
        for k in (0..d - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(GridSpec {
            dims,
            spacing,
            origin,
            strides,
        })
    }

    /// `n` cells per axis on `[lo, hi]^d`, i.e. `n + 1` samples per axis.
    pub fn cube(d: usize, n: usize, lo: f64, hi: f64) -> Result<Self> {
        let h = (hi - lo) / n as f64;
        GridSpec::new(vec![n + 1; d], vec![h; d], vec![lo; d])
    }

    /// `n` cells per axis with per-axis extents `[lo_k, hi_k]`.
    pub fn boxed(n: usize, lo: &[f64], hi: &[f64]) -> Result<Self> {
        let spacing = lo.iter().zip(hi).map(|(a, b)| (b - a) / n as f64).collect();
        GridSpec::new(vec![n + 1; lo.len()], spacing, lo.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn n_points(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn flat(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn unflat(&self, mut flat: usize, out: &mut [usize]) {
        for k in 0..self.dim() {
            out[k] = flat / self.strides[k];
            flat %= self.strides[k];
        }
    }

    pub fn point(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(k, &i)| self.origin[k] + i as f64 * self.spacing[k])
            .collect()
    }

    /// Each axis needs three samples for a central difference.
    pub fn require_stencil(&self) -> Result<()> {
        if self.dims.iter().any(|&n| n < 3) {
            return Err(Error::GridTooSmall(self.dims.clone()));
        }
        Ok(())
    }

    /// Distance (in samples) from `index` to the nearest boundary.
    pub fn depth(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.dims)
            .map(|(&i, &n)| i.min(n - 1 - i))
            .min()
            .unwrap_or(0)
    }

    /// The same extent sampled with half the spacing.
    pub fn refined(&self) -> GridSpec {
        let dims = self.dims.iter().map(|n| 2 * (n - 1) + 1).collect();
        let spacing = self.spacing.iter().map(|h| h / 2.0).collect();
        GridSpec::new(dims, spacing, self.origin.clone()).expect("refinement of a valid grid")
    }
}

/// Anything that yields a form value at each grid sample.
pub trait FieldSource {
    fn spec(&self) -> &GridSpec;
    fn degree(&self) -> usize;
    fn value_at(&self, index: &[usize]) -> PFormValue;

    fn dim(&self) -> usize {
        self.spec().dim()
    }
}

/// Dense stored field, components in storage order per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    degree: usize,
    coeffs: Vec<f64>,
    entropy: Option<Vec<f64>>,
}

impl GridField {
    pub fn new(spec: GridSpec, degree: usize, coeffs: Vec<f64>, entropy: Option<Vec<f64>>) -> Result<Self> {
        let d = spec.dim();
        if degree > d {
            return Err(Error::InvalidLayout { d, p: degree });
        }
        let n = spec.n_points();
        let expected = n * binomial(d, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        if let Some(s) = &entropy {
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: s.len(),
                });
            }
        }
        Ok(GridField {
            spec,
            degree,
            coeffs,
            entropy,
        })
    }

    /// Samples `f` at every grid point.
    pub fn sample(spec: GridSpec, degree: usize, f: impl Fn(&[f64]) -> PFormValue) -> Result<Self> {
        let src = AnalyticField::new(spec, degree, f);
        GridField::from_source(&src)
    }

    pub fn from_source<S: FieldSource + ?Sized>(src: &S) -> Result<Self> {
        let spec = src.spec().clone();
        let d = spec.dim();
        let ncomp = binomial(d, src.degree());
        let n = spec.n_points();
        let mut coeffs = Vec::with_capacity(n * ncomp);
        let mut entropy: Option<Vec<f64>> = None;
        let mut idx = vec![0; d];
        for flat in 0..n {
            spec.unflat(flat, &mut idx);
            let v = src.value_at(&idx);
            if v.dim() != d || v.degree() != src.degree() {
                return Err(Error::DegreeMismatch {
                    expected: src.degree(),
                    got: v.degree(),
                });
            }
            coeffs.extend_from_slice(v.coeffs());
            match (v.entropy(), &mut entropy) {
                (Some(s), Some(e)) => e.push(s),
                (Some(s), None) if flat == 0 => entropy = Some(vec![s]),
                (None, None) => {}
                _ => return Err(Error::Input("entropy must be present at all samples or none".into())),
            }
        }
        GridField::new(spec, src.degree(), coeffs, entropy)
    }

    pub fn n_components(&self) -> usize {
        binomial(self.spec.dim(), self.degree)
    }

    pub fn has_entropy(&self) -> bool {
        self.entropy.is_some()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn entropy(&self) -> Option<&[f64]> {
        self.entropy.as_deref()
    }

    pub fn component_order(&self) -> Vec<String> {
        let mut labels: Vec<String> = enumerate_subsets(self.spec.dim(), self.degree)
            .iter()
            .map(|j| j.label())
            .collect();
        if self.has_entropy() {
            labels.push("s".into());
        }
        labels
    }

    pub fn manifest(&self, data_file: Option<String>) -> Manifest {
        Manifest {
            d: self.spec.dim(),
            p: self.degree,
            dims: self.spec.dims.clone(),
            spacing: self.spec.spacing.clone(),
            origin: self.spec.origin.clone(),
            component_order: self.component_order(),
            has_entropy: self.has_entropy(),
            data_file,
        }
    }

    /// Writes `path` (JSON manifest) and the companion little-endian `f64` file.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let data_path = path.with_extension("bin");
        let data_name = data_path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned());
        let manifest = self.manifest(data_name);
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        w.write_all(b"\n")?;
        w.flush()?;
        let mut w = BufWriter::new(File::create(&data_path)?);
        let ncomp = self.n_components();
        for flat in 0..self.spec.n_points() {
            for c in 0..ncomp {
                w.write_all(&self.coeffs[flat * ncomp + c].to_le_bytes())?;
            }
            if let Some(s) = &self.entropy {
                w.write_all(&s[flat].to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(data_path)
    }

    /// Reads a manifest and its data file.
    pub fn read(path: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        let data_path = match &manifest.data_file {
            Some(name) => path.parent().unwrap_or(Path::new(".")).join(name),
            None => path.with_extension("bin"),
        };
        let mut bytes = Vec::new();
        BufReader::new(File::open(&data_path)?).read_to_end(&mut bytes)?;
        GridField::from_manifest(&manifest, &bytes)
    }

    pub fn from_manifest(manifest: &Manifest, bytes: &[u8]) -> Result<Self> {
        if manifest.dims.len() != manifest.d {
            return Err(Error::Input(format!(
                "manifest lists {} axes for d = {}",
                manifest.dims.len(),
                manifest.d
            )));
        }
        let spec = GridSpec::new(manifest.dims.clone(), manifest.spacing.clone(), manifest.origin.clone())?;
        let template = GridField::new(
            spec.clone(),
            manifest.p,
            vec![0.0; spec.n_points() * binomial(manifest.d, manifest.p)],
            manifest.has_entropy.then(|| vec![0.0; spec.n_points()]),
        )?;
        let expected_order = template.component_order();
        if manifest.component_order != expected_order {
            return Err(Error::Input(format!(
                "component_order {:?} does not match the storage order {:?}",
                manifest.component_order, expected_order
            )));
        }
        let width = expected_order.len();
        let n = spec.n_points();
        if bytes.len() != n * width * 8 {
            return Err(Error::Input(format!(
                "data file holds {} bytes, expected {} samples x {} components x 8",
                bytes.len(),
                n,
                width
            )));
        }
        let values: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
            .collect();
        split_components(spec, manifest.p, manifest.has_entropy, &values)
    }

    /// CSV with integer columns `i0 .. i{d-1}` and one column per component label
    /// (plus `s`); every sample appears exactly once.
    pub fn from_csv<R: Read>(reader: R, degree: usize, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let d = spacing.len();
        if degree > d {
            return Err(Error::InvalidLayout { d, p: degree });
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h.trim() == name);
        let index_cols: Vec<usize> = (0..d)
            .map(|k| col(&format!("i{k}")).ok_or_else(|| Error::Input(format!("missing column i{k}"))))
            .collect::<Result<_>>()?;
        let labels: Vec<String> = enumerate_subsets(d, degree).iter().map(|j| j.label()).collect();
        let comp_cols: Vec<usize> = labels
            .iter()
            .map(|l| col(l).ok_or_else(|| Error::Input(format!("missing column {l}"))))
            .collect::<Result<_>>()?;
        let s_col = col("s");
        let mut rows: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse_f = |c: usize| -> Result<f64> {
                rec[c]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("bad number `{}`", &rec[c])))
            };
            let idx = index_cols
                .iter()
                .map(|&c| {
                    rec[c]
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Input(format!("bad index `{}`", &rec[c])))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut vals = comp_cols.iter().map(|&c| parse_f(c)).collect::<Result<Vec<_>>>()?;
            if let Some(c) = s_col {
                vals.push(parse_f(c)?);
            }
            rows.push((idx, vals));
        }
        let dims: Vec<usize> = (0..d)
            .map(|k| rows.iter().map(|(i, _)| i[k] + 1).max().unwrap_or(0))
            .collect();
        let spec = GridSpec::new(dims, spacing, origin)?;
        let width = labels.len() + usize::from(s_col.is_some());
        let n = spec.n_points();
        if rows.len() != n {
            return Err(Error::Input(format!("CSV has {} rows for {} grid samples", rows.len(), n)));
        }
        let mut values = vec![f64::NAN; n * width];
        let mut seen = vec![false; n];
        for (idx, vals) in rows {
            let flat = spec.flat(&idx);
            if std::mem::replace(&mut seen[flat], true) {
                return Err(Error::Input(format!("sample {idx:?} appears twice")));
            }
            values[flat * width..(flat + 1) * width].copy_from_slice(&vals);
        }
        split_components(spec, degree, s_col.is_some(), &values)
    }
}

fn split_components(spec: GridSpec, degree: usize, has_entropy: bool, values: &[f64]) -> Result<GridField> {
    let ncomp = binomial(spec.dim(), degree);
    let width = ncomp + usize::from(has_entropy);
    let n = spec.n_points();
    let mut coeffs = Vec::with_capacity(n * ncomp);
    let mut entropy = has_entropy.then(|| Vec::with_capacity(n));
    for row in values.chunks_exact(width) {
        coeffs.extend_from_slice(&row[..ncomp]);
        if let Some(e) = &mut entropy {
            e.push(row[ncomp]);
        }
    }
    GridField::new(spec, degree, coeffs, entropy)
}

impl FieldSource for GridField {
    fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn value_at(&self, index: &[usize]) -> PFormValue {
        let ncomp = self.n_components();
        let flat = self.spec.flat(index);
        let v = PFormValue::from_coeffs(
            self.spec.dim(),
            self.degree,
            self.coeffs[flat * ncomp..(flat + 1) * ncomp].to_vec(),
        )
        .expect("stored layout");
        match &self.entropy {
            Some(s) => v.with_entropy(s[flat]),
            None => v,
        }
    }
}

/// A field given by a closed-form expression of the space-time point.
pub struct AnalyticField<F: Fn(&[f64]) -> PFormValue> {
    spec: GridSpec,
    degree: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> PFormValue> AnalyticField<F> {
    pub fn new(spec: GridSpec, degree: usize, f: F) -> Self {
        AnalyticField { spec, degree, f }
    }

    pub fn eval(&self, point: &[f64]) -> PFormValue {
        (self.f)(point)
    }
}

impl<F: Fn(&[f64]) -> PFormValue> FieldSource for AnalyticField<F> {
    fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn value_at(&self, index: &[usize]) -> PFormValue {
        (self.f)(&self.spec.point(index))
    }
}

/// The on-disk description of a stored field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub d: usize,
    pub p: usize,
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub component_order: Vec<String>,
    pub has_entropy: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_file: Option<String>,
}

/// A real-valued grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.n_points() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_points(),
                got: values.len(),
            });
        }
        Ok(ScalarGrid { spec, values })
    }

    pub fn sample(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut idx = vec![0; spec.dim()];
        let values = (0..spec.n_points())
            .map(|flat| {
                spec.unflat(flat, &mut idx);
                f(&spec.point(&idx))
            })
            .collect();
        ScalarGrid { spec, values }
    }

    pub fn constant(spec: GridSpec, v: f64) -> Self {
        let n = spec.n_points();
        ScalarGrid {
            spec,
            values: vec![v; n],
        }
    }

    pub fn at(&self, index: &[usize]) -> f64 {
        self.values[self.spec.flat(index)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_field(entropy: bool) -> GridField {
        let spec = GridSpec::new(vec![3, 4], vec![0.5, 0.25], vec![0.0, -1.0]).unwrap();
        GridField::sample(spec, 1, |x| {
            let v = PFormValue::from_coeffs(2, 1, vec![x[0] + 2.0 * x[1], x[0] * x[1]]).unwrap();
            if entropy {
                v.with_entropy(x[1] - x[0])
            } else {
                v
            }
        })
        .unwrap()
    }

    #[test]
    fn flat_index_round_trip() {
        let spec = GridSpec::new(vec![3, 4, 5], vec![1.0; 3], vec![0.0; 3]).unwrap();
        let mut idx = vec![0; 3];
        for flat in 0..spec.n_points() {
            spec.unflat(flat, &mut idx);
            assert_eq!(spec.flat(&idx), flat);
        }
        assert_eq!(spec.depth(&[1, 3, 2]), 0);
        assert_eq!(spec.refined().dims(), &[5, 7, 9]);
    }

    #[test]
    fn manifest_and_binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for entropy in [false, true] {
            let f = small_field(entropy);
            let path = dir.path().join(format!("field{entropy}.json"));
            f.write(&path).unwrap();
            let g = GridField::read(&path).unwrap();
            assert_eq!(f, g);
        }
        let m = small_field(true).manifest(None);
        assert_eq!(m.component_order, vec!["A0", "A1", "s"]);
    }

    #[test]
    fn truncated_data_is_rejected() {
        let f = small_field(false);
        let m = f.manifest(None);
        assert!(GridField::from_manifest(&m, &[0u8; 16]).is_err());
        let mut bad = m.clone();
        bad.component_order.reverse();
        let bytes = vec![0u8; 12 * 2 * 8];
        assert!(GridField::from_manifest(&bad, &bytes).is_err());
    }

    #[test]
    fn csv_import() {
        let text = "i0,i1,A0,A1,s\n0,0,1,2,0.5\n1,0,3,4,0.5\n0,1,5,6,0.5\n1,1,7,8,0.5\n";
        let f = GridField::from_csv(text.as_bytes(), 1, vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(f.spec().dims(), &[2, 2]);
        assert_eq!(f.value_at(&[0, 1]).coeffs(), &[5.0, 6.0]);
        assert_eq!(f.value_at(&[1, 1]).entropy(), Some(0.5));
        let dup = "i0,i1,A0,A1\n0,0,1,2\n0,0,3,4\n";
        assert!(GridField::from_csv(dup.as_bytes(), 1, vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }
}
