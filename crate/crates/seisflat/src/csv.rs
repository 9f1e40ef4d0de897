//! Plain-text tables. Floating point values carry 9 significant digits.

use std::fmt::Write;

use seisflat_core::filter::FilteredVolume;
use seisflat_core::flatten::{DepthMap, FlattenedCloud};
use seisflat_core::linalg::CsrMatrix;
use seisflat_core::stability::ProjectionReport;
use seisflat_core::volume::{Dims, SliceRef};

/// `x` with 9 significant digits, trailing zeros dropped; exponent form
/// outside `[1e-5, 1e9)`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `row,col,value` for the filtered volume over one slice.
pub fn filtered_slice_table(filtered: &FilteredVolume, slice: SliceRef) -> String {
    let Dims { m, .. } = filtered.dims;
    let width = slice.width(filtered.dims);
    let mut out = String::from("row,col,value\n");
    for row in 0..m {
        for col in 0..width {
            let (i1, i2, i3) = slice.volume_coords(row, col);
            let v = filtered.values[filtered.dims.index(i1, i2, i3)];
            writeln!(out, "{row},{col},{}", sig9(v)).unwrap();
        }
    }
    out
}

/// Nonzero entries as `i,j,value` triplets, row-major.
pub fn triplet_table(matrix: &CsrMatrix) -> String {
    let mut out = String::from("i,j,value\n");
    for i in 0..matrix.nrows() {
        let (cols, vals) = matrix.row(i);
        for (j, v) in cols.iter().zip(vals) {
            writeln!(out, "{i},{j},{}", sig9(*v)).unwrap();
        }
    }
    out
}

/// `row,col,psi1,…` with one column per vector.
pub fn eigenvector_table(rows: usize, cols: usize, vectors: &[&[f64]]) -> String {
    let mut out = String::from("row,col");
    for k in 1..=vectors.len() {
        write!(out, ",psi{k}").unwrap();
    }
    out.push('\n');
    for p in 0..rows * cols {
        write!(out, "{},{}", p / cols, p % cols).unwrap();
        for v in vectors {
            write!(out, ",{}", sig9(v[p])).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn depth_table(depth: &DepthMap) -> String {
    let mut out = String::from("row,col,h\n");
    for (p, h) in depth.depth.iter().enumerate() {
        writeln!(out, "{},{},{}", p / depth.cols, p % depth.cols, sig9(*h)).unwrap();
    }
    out
}

pub fn cloud_table(cloud: &FlattenedCloud) -> String {
    let mut out = String::from("x,h,value\n");
    for r in &cloud.records {
        writeln!(out, "{},{},{}", r.x, sig9(r.h), sig9(r.value)).unwrap();
    }
    out
}

pub const REPORT_HEADER: &str =
    "family,amplitude,eps_meas,delta_meas,d,k,eta1,eta_k1,mu1,residual,bound,pass,lemma1_pass,lemma2_pass,lemma3_pass";

/// Skipped rows leave the measured columns empty and read `skipped` in the
/// pass columns.
pub fn report_table(reports: &[ProjectionReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        write!(
            out,
            "{},{},{},{},{},{},{},{},",
            r.family,
            sig9(r.amplitude),
            sig9(r.eps_meas),
            sig9(r.delta_meas),
            r.d,
            r.k,
            sig9(r.eta1),
            sig9(r.eta_k1)
        )
        .unwrap();
        match &r.evaluation {
            Some(e) => writeln!(
                out,
                "{},{},{},{},{},{},{}",
                sig9(e.mu1),
                sig9(e.residual),
                sig9(e.bound),
                e.pass,
                e.lemmas.lemma1.pass,
                e.lemmas.lemma2.pass,
                e.lemmas.lemma3.pass
            )
            .unwrap(),
            None => out.push_str(",,,skipped,skipped,skipped,skipped\n"),
        }
    }
    out
}
