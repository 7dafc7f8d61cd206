//! Summary-level genetic association data.
//!
//! A dataset is a list of instruments (SNPs), each with `d` exposure
//! associations and one outcome association plus their standard errors.
//!
//! The on-disk format is a tab-separated file with the header
//!
//! ```text
//! snp  beta_x_1 .. beta_x_d  se_x_1 .. se_x_d  beta_y  se_y
//! ```
//!
//! Optional exposure covariances come from a companion file with header
//! `snp  cov_1_1  cov_1_2 .. cov_d_d`, one row-major `d × d` matrix per SNP.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{MrError, Result};
use crate::stats::Matrix;

/// Relative tolerance when checking a covariance diagonal against `se²`.
const COV_DIAG_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SnpRecord {
    pub snp_id: String,
    pub beta_exposure: Vec<f64>,
    pub se_exposure: Vec<f64>,
    pub beta_outcome: f64,
    pub se_outcome: f64,
}

impl SnpRecord {
    pub fn new(
        snp_id: impl Into<String>,
        beta_exposure: Vec<f64>,
        se_exposure: Vec<f64>,
        beta_outcome: f64,
        se_outcome: f64,
    ) -> Self {
        Self {
            snp_id: snp_id.into(),
            beta_exposure,
            se_exposure,
            beta_outcome,
            se_outcome,
        }
    }

    /// Univariable convenience constructor.
    pub fn single(snp_id: impl Into<String>, bx: f64, sx: f64, by: f64, sy: f64) -> Self {
        Self::new(snp_id, vec![bx], vec![sx], by, sy)
    }

    fn validate(&self, row: usize, d: usize) -> Result<()> {
        if self.snp_id.is_empty() {
            return Err(invalid(row, "snp", "empty SNP identifier"));
        }
        if self.beta_exposure.len() != d || self.se_exposure.len() != d {
            return Err(MrError::DimensionMismatch(format!(
                "SNP `{}` has {} exposure betas and {} SEs, expected {d}",
                self.snp_id,
                self.beta_exposure.len(),
                self.se_exposure.len()
            )));
        }
        for (j, b) in self.beta_exposure.iter().enumerate() {
            if !b.is_finite() {
                return Err(invalid(row, &format!("beta_x_{}", j + 1), "not finite"));
            }
        }
        if !self.beta_outcome.is_finite() {
            return Err(invalid(row, "beta_y", "not finite"));
        }
        for (j, s) in self.se_exposure.iter().enumerate() {
            check_se(*s, row, &format!("se_x_{}", j + 1))?;
        }
        check_se(self.se_outcome, row, "se_y")
    }
}

fn check_se(value: f64, row: usize, column: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(MrError::NonPositiveSe {
            row,
            column: column.to_string(),
            value,
        });
    }
    Ok(())
}

fn invalid(row: usize, column: &str, reason: &str) -> MrError {
    MrError::InvalidValue {
        row,
        column: column.to_string(),
        reason: reason.to_string(),
    }
}

/// Validated summary statistics for `n` instruments and `d` exposures.
///
/// Immutable once built; all constructors enforce `n > d`, unique
/// non-empty SNP ids, finite betas and strictly positive finite SEs.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryDataset {
    records: Vec<SnpRecord>,
    n_exposures: usize,
    exposure_cov: Option<Vec<Matrix>>,
}

impl SummaryDataset {
    pub fn new(records: Vec<SnpRecord>, n_exposures: usize) -> Result<Self> {
        if n_exposures == 0 {
            return Err(MrError::InvalidConfig("need at least one exposure".into()));
        }
        let mut seen = HashSet::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            r.validate(i + 1, n_exposures)?;
            if !seen.insert(r.snp_id.as_str()) {
                return Err(MrError::DuplicateSnp(r.snp_id.clone()));
            }
        }
        if records.len() <= n_exposures {
            return Err(MrError::TooFewSnps {
                n: records.len(),
                d: n_exposures,
                required: n_exposures,
            });
        }
        Ok(Self {
            records,
            n_exposures,
            exposure_cov: None,
        })
    }

    /// Attach per-SNP exposure covariance matrices, in record order.
    pub fn with_exposure_cov(mut self, cov: Vec<Matrix>) -> Result<Self> {
        let d = self.n_exposures;
        if cov.len() != self.records.len() {
            return Err(MrError::DimensionMismatch(format!(
                "{} covariance matrices for {} SNPs",
                cov.len(),
                self.records.len()
            )));
        }
        for (r, m) in self.records.iter().zip(&cov) {
            if m.nrows() != d || m.ncols() != d {
                return Err(MrError::DimensionMismatch(format!(
                    "covariance for `{}` is {}x{}, expected {d}x{d}",
                    r.snp_id,
                    m.nrows(),
                    m.ncols()
                )));
            }
            if !m.is_symmetric(COV_DIAG_RTOL) {
                return Err(MrError::InvalidValue {
                    row: 0,
                    column: r.snp_id.clone(),
                    reason: "exposure covariance is not symmetric".into(),
                });
            }
            for (j, se) in r.se_exposure.iter().enumerate() {
                let var = se * se;
                if (m[(j, j)] - var).abs() > COV_DIAG_RTOL * var {
                    return Err(MrError::InvalidValue {
                        row: 0,
                        column: r.snp_id.clone(),
                        reason: format!(
                            "covariance diagonal {} does not match se_x_{}² = {var}",
                            m[(j, j)],
                            j + 1
                        ),
                    });
                }
            }
        }
        self.exposure_cov = Some(cov);
        Ok(self)
    }

    pub fn records(&self) -> &[SnpRecord] {
        &self.records
    }

    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn d(&self) -> usize {
        self.n_exposures
    }

    pub fn exposure_cov(&self) -> Option<&[Matrix]> {
        self.exposure_cov.as_deref()
    }

    /// Covariance between the `j` and `k` exposure betas of SNP `i`;
    /// zero off the diagonal when no covariance file was supplied.
    pub fn exposure_covariance(&self, i: usize, j: usize, k: usize) -> f64 {
        match &self.exposure_cov {
            Some(c) => c[i][(j, k)],
            None if j == k => self.records[i].se_exposure[j].powi(2),
            None => 0.0,
        }
    }

    pub fn snp_ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.snp_id.as_str())
    }

    /// The `n × d` matrix of exposure associations.
    pub fn exposure_matrix(&self) -> Matrix {
        let data = self
            .records
            .iter()
            .flat_map(|r| r.beta_exposure.iter().copied())
            .collect();
        Matrix::from_row_major(self.n(), self.d(), data).expect("validated dimensions")
    }

    pub fn beta_outcome(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.beta_outcome).collect()
    }

    pub fn se_outcome(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.se_outcome).collect()
    }

    /// First-order IVW weights `σ_Y^{-2}`.
    pub fn outcome_precision(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.se_outcome.powi(-2)).collect()
    }

    /// Dataset without the given SNPs, original order preserved.
    pub fn drop_snps<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let index: HashMap<&str, usize> = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.snp_id.as_str(), i))
            .collect();
        let mut drop = BTreeSet::new();
        for id in ids {
            let id = id.as_ref();
            match index.get(id) {
                Some(&i) => {
                    drop.insert(i);
                }
                None => return Err(MrError::UnknownSnp(id.to_string())),
            }
        }
        if drop.is_empty() {
            return Ok(self.clone());
        }
        let keep: Vec<usize> = (0..self.n()).filter(|i| !drop.contains(i)).collect();
        if keep.len() <= self.n_exposures {
            return Err(MrError::TooFewSnps {
                n: keep.len(),
                d: self.n_exposures,
                required: self.n_exposures,
            });
        }
        Ok(self.subset(&keep))
    }

    /// Records at the given indices, in that order. Indices are not checked
    /// for the `n > d` invariant; callers guarantee it.
    pub(crate) fn subset(&self, keep: &[usize]) -> Self {
        Self {
            records: keep.iter().map(|&i| self.records[i].clone()).collect(),
            n_exposures: self.n_exposures,
            exposure_cov: self
                .exposure_cov
                .as_ref()
                .map(|c| keep.iter().map(|&i| c[i].clone()).collect()),
        }
    }

    /// Serialise in the loader's TSV format. Numbers use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_tsv(&self) -> String {
        let d = self.d();
        let mut out = header(d).join("\t");
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.snp_id);
            for v in r.beta_exposure.iter().chain(&r.se_exposure) {
                let _ = write!(out, "\t{v}");
            }
            let _ = writeln!(out, "\t{}\t{}", r.beta_outcome, r.se_outcome);
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_tsv())?;
        Ok(())
    }
}

/// Expected header columns for `d` exposures.
pub fn header(d: usize) -> Vec<String> {
    let mut cols = vec!["snp".to_string()];
    cols.extend((1..=d).map(|j| format!("beta_x_{j}")));
    cols.extend((1..=d).map(|j| format!("se_x_{j}")));
    cols.push("beta_y".into());
    cols.push("se_y".into());
    cols
}

fn parse_number(field: &str, row: usize, column: &str) -> Result<f64> {
    let field = field.trim();
    if field.is_empty() {
        return Err(invalid(row, column, "missing value"));
    }
    field
        .parse::<f64>()
        .map_err(|_| invalid(row, column, &format!("cannot parse `{field}` as a number")))
}

fn data_lines<R: Read>(reader: R) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let mut line = line?;
        if line.ends_with('\r') {
            line.pop();
        }
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn check_header(line: &str, expected: &[String]) -> Result<()> {
    let found: Vec<&str> = line.split('\t').map(str::trim).collect();
    for (pos, exp) in expected.iter().enumerate() {
        let got = found.get(pos).copied().unwrap_or("");
        if got != exp {
            return Err(MrError::MissingColumn {
                expected: exp.clone(),
                position: pos + 1,
                found: got.to_string(),
            });
        }
    }
    if found.len() > expected.len() {
        return Err(MrError::MissingColumn {
            expected: "<end of header>".into(),
            position: expected.len() + 1,
            found: found[expected.len()].to_string(),
        });
    }
    Ok(())
}

/// Parse summary statistics from any reader. Row numbers in errors are
/// 1-based file line numbers.
pub fn read_dataset<R: Read>(reader: R, n_exposures: usize) -> Result<SummaryDataset> {
    if n_exposures == 0 {
        return Err(MrError::InvalidConfig("need at least one exposure".into()));
    }
    let lines = data_lines(reader)?;
    let Some(((_, head), rows)) = lines.split_first() else {
        return Err(MrError::MissingColumn {
            expected: "snp".into(),
            position: 1,
            found: String::new(),
        });
    };
    let cols = header(n_exposures);
    check_header(head, &cols)?;

    let d = n_exposures;
    let mut records = Vec::with_capacity(rows.len());
    let mut seen = HashSet::new();
    for (line_no, line) in rows {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != cols.len() {
            return Err(invalid(
                *line_no,
                "*",
                &format!("expected {} fields, found {}", cols.len(), fields.len()),
            ));
        }
        let mut nums = Vec::with_capacity(cols.len() - 1);
        for (field, col) in fields[1..].iter().zip(&cols[1..]) {
            nums.push(parse_number(field, *line_no, col)?);
        }
        let rec = SnpRecord {
            snp_id: fields[0].trim().to_string(),
            beta_exposure: nums[..d].to_vec(),
            se_exposure: nums[d..2 * d].to_vec(),
            beta_outcome: nums[2 * d],
            se_outcome: nums[2 * d + 1],
        };
        rec.validate(*line_no, d)?;
        if !seen.insert(rec.snp_id.clone()) {
            return Err(MrError::DuplicateSnp(rec.snp_id));
        }
        records.push(rec);
    }
    SummaryDataset::new(records, d)
}

pub fn load_dataset(path: impl AsRef<Path>, n_exposures: usize) -> Result<SummaryDataset> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| MrError::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_dataset(file, n_exposures)
}

/// Read per-SNP covariance matrices and attach them to `data`.
pub fn read_exposure_cov<R: Read>(reader: R, data: SummaryDataset) -> Result<SummaryDataset> {
    let d = data.d();
    let lines = data_lines(reader)?;
    let Some(((_, head), rows)) = lines.split_first() else {
        return Err(MrError::MissingColumn {
            expected: "snp".into(),
            position: 1,
            found: String::new(),
        });
    };
    let mut cols = vec!["snp".to_string()];
    for j in 1..=d {
        for k in 1..=d {
            cols.push(format!("cov_{j}_{k}"));
        }
    }
    check_header(head, &cols)?;

    let mut by_snp: HashMap<String, Matrix> = HashMap::new();
    for (line_no, line) in rows {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != cols.len() {
            return Err(invalid(
                *line_no,
                "*",
                &format!("expected {} fields, found {}", cols.len(), fields.len()),
            ));
        }
        let values = fields[1..]
            .iter()
            .zip(&cols[1..])
            .map(|(f, c)| parse_number(f, *line_no, c))
            .collect::<Result<Vec<_>>>()?;
        let id = fields[0].trim().to_string();
        if by_snp.contains_key(&id) {
            return Err(MrError::DuplicateSnp(id));
        }
        by_snp.insert(id, Matrix::from_row_major(d, d, values)?);
    }
    let mut cov = Vec::with_capacity(data.n());
    for id in data.snp_ids() {
        match by_snp.remove(id) {
            Some(m) => cov.push(m),
            None => {
                return Err(MrError::InvalidValue {
                    row: 0,
                    column: id.to_string(),
                    reason: "no covariance row for this SNP".into(),
                })
            }
        }
    }
    if let Some(extra) = by_snp.keys().next() {
        return Err(MrError::UnknownSnp(extra.clone()));
    }
    data.with_exposure_cov(cov)
}

pub fn load_exposure_cov(path: impl AsRef<Path>, data: SummaryDataset) -> Result<SummaryDataset> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| MrError::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_exposure_cov(file, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tsv(rows: &[&str]) -> String {
        let mut s = "snp\tbeta_x_1\tse_x_1\tbeta_y\tse_y\n".to_string();
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn reads_rows_in_order() {
        let text = tsv(&["rs1\t0.1\t0.01\t0.05\t0.02", "rs2\t-0.2\t0.01\t0.1\t0.02"]);
        let data = read_dataset(text.as_bytes(), 1).unwrap();
        assert_eq!(data.n(), 2);
        assert_eq!(data.snp_ids().collect::<Vec<_>>(), ["rs1", "rs2"]);
        assert_eq!(data.records()[1].beta_exposure, vec![-0.2]);
    }

    #[test]
    fn crlf_and_trailing_blank_lines() {
        let text = "snp\tbeta_x_1\tse_x_1\tbeta_y\tse_y\r\nrs1\t1\t0.1\t1\t0.1\r\nrs2\t2\t0.1\t1\t0.1\r\n\r\n";
        assert_eq!(read_dataset(text.as_bytes(), 1).unwrap().n(), 2);
    }

    #[test]
    fn single_row_is_too_few() {
        let text = tsv(&["rs1\t0.1\t0.01\t0.05\t0.02"]);
        assert!(matches!(
            read_dataset(text.as_bytes(), 1),
            Err(MrError::TooFewSnps { n: 1, d: 1, .. })
        ));
    }

    #[test]
    fn zero_outcome_se_reports_row_and_column() {
        let text = tsv(&["rs1\t0.1\t0.01\t0.05\t0.02", "rs2\t0.1\t0.01\t0.05\t0"]);
        match read_dataset(text.as_bytes(), 1) {
            Err(MrError::NonPositiveSe { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "se_y");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn header_mismatch() {
        let text = "snp\tbeta_x\tse_x_1\tbeta_y\tse_y\nrs1\t1\t1\t1\t1\n";
        assert!(matches!(
            read_dataset(text.as_bytes(), 1),
            Err(MrError::MissingColumn { position: 2, .. })
        ));
        let text = "snp\tbeta_x_1\tse_x_1\tbeta_y\tse_y\n";
        assert!(read_dataset(text.as_bytes(), 2).is_err());
    }

    #[test]
    fn duplicate_snp() {
        let text = tsv(&["rs1\t1\t1\t1\t1", "rs1\t1\t1\t1\t1", "rs2\t1\t1\t1\t1"]);
        assert_eq!(
            read_dataset(text.as_bytes(), 1).unwrap_err(),
            MrError::DuplicateSnp("rs1".into())
        );
    }

    #[test]
    fn missing_values_are_errors() {
        let text = tsv(&["rs1\t1\t1\t\t1", "rs2\t1\t1\t1\t1"]);
        assert!(matches!(
            read_dataset(text.as_bytes(), 1),
            Err(MrError::InvalidValue { .. })
        ));
        let text = tsv(&["rs1\t1\t1\tNA\t1", "rs2\t1\t1\t1\t1"]);
        assert!(read_dataset(text.as_bytes(), 1).is_err());
    }

    #[test]
    fn drop_rules() {
        let recs = (0..4)
            .map(|i| SnpRecord::single(format!("rs{i}"), 1.0, 0.1, 1.0, 0.1))
            .collect();
        let data = SummaryDataset::new(recs, 1).unwrap();
        let none: [&str; 0] = [];
        assert_eq!(data.drop_snps(&none).unwrap(), data);
        let less = data.drop_snps(&["rs1"]).unwrap();
        assert_eq!(less.snp_ids().collect::<Vec<_>>(), ["rs0", "rs2", "rs3"]);
        assert_eq!(
            data.drop_snps(&["rs9"]).unwrap_err(),
            MrError::UnknownSnp("rs9".into())
        );
        assert!(matches!(
            data.drop_snps(&["rs0", "rs1", "rs2"]),
            Err(MrError::TooFewSnps { n: 1, .. })
        ));
    }

    #[test]
    fn covariance_file() {
        let recs = vec![
            SnpRecord::new("a", vec![1.0, 2.0], vec![0.1, 0.2], 1.0, 0.1),
            SnpRecord::new("b", vec![2.0, 1.0], vec![0.1, 0.2], 1.0, 0.1),
            SnpRecord::new("c", vec![1.0, 1.0], vec![0.1, 0.3], 1.0, 0.1),
        ];
        let data = SummaryDataset::new(recs, 2).unwrap();
        let cov = "snp\tcov_1_1\tcov_1_2\tcov_2_1\tcov_2_2\n\
                   c\t0.01\t0.001\t0.001\t0.09\n\
                   a\t0.01\t0.002\t0.002\t0.04\n\
                   b\t0.01\t0\t0\t0.04\n";
        let with = read_exposure_cov(cov.as_bytes(), data.clone()).unwrap();
        assert_eq!(with.exposure_covariance(0, 0, 1), 0.002);
        assert_eq!(with.exposure_covariance(2, 1, 1), 0.09);
        assert_eq!(data.exposure_covariance(0, 0, 1), 0.0);

        let bad_diag = "snp\tcov_1_1\tcov_1_2\tcov_2_1\tcov_2_2\n\
                        a\t0.02\t0\t0\t0.04\nb\t0.01\t0\t0\t0.04\nc\t0.01\t0\t0\t0.09\n";
        assert!(read_exposure_cov(bad_diag.as_bytes(), data.clone()).is_err());
        let asym = "snp\tcov_1_1\tcov_1_2\tcov_2_1\tcov_2_2\n\
                    a\t0.01\t0.001\t0\t0.04\nb\t0.01\t0\t0\t0.04\nc\t0.01\t0\t0\t0.09\n";
        assert!(read_exposure_cov(asym.as_bytes(), data).is_err());
    }
}
