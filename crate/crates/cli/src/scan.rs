use std::io::Write;

use hyperlab::hyperbolicity::classify_with_hint;
use hyperlab::verify::vanishing_scale;
use hyperlab::{
    check_dec, strain_invariants, stress_energy, Error, FieldJet, LagrangianModel, ModelSpec,
    SearchConfig,
};
use rayon::prelude::*;

use crate::analyze::{observer_hint, symbol_for};
use crate::error::{CliError, CliResult};

pub struct ScanOptions {
    pub spec: ModelSpec,
    pub target_dim: usize,
    pub s: f64,
    pub search: SearchConfig,
    pub dec_samples: usize,
    pub seed: u64,
}

fn malformed(message: impl Into<String>) -> CliError {
    CliError::new("malformed-grid", message)
}

fn parse_number(s: &str, item: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| malformed(format!("bad number '{s}' in '{item}'")))?;
    if !v.is_finite() {
        return Err(malformed(format!("non-finite value in '{item}'")));
    }
    Ok(v)
}

/// Inclusive `a:b:step` or a single value. Grid values are rounded to 12
/// decimals so that `0.1`-steps print as written.
fn parse_axis(spec: &str, item: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![parse_number(v, item)?]),
        [a, b, step] => {
            let (a, b, step) = (
                parse_number(a, item)?,
                parse_number(b, item)?,
                parse_number(step, item)?,
            );
            if !(step > 0.0) {
                return Err(malformed(format!("step must be positive in '{item}'")));
            }
            if b < a {
                return Ok(Vec::new());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count)
                .map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        _ => Err(malformed(format!("expected value or a:b:step in '{item}'"))),
    }
}

/// Parses `lambda0=a:b:step,lambda1=…` into points in lexicographic order
/// with `lambda0` outermost.
pub fn parse_grid(spec: &str) -> CliResult<Vec<Vec<f64>>> {
    let mut axes: Vec<Option<Vec<f64>>> = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, range) = item
            .split_once('=')
            .ok_or_else(|| malformed(format!("expected lambdaK=range, got '{item}'")))?;
        let idx: usize = key
            .trim()
            .strip_prefix("lambda")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| malformed(format!("unknown grid key '{key}'")))?;
        if idx >= axes.len() {
            axes.resize(idx + 1, None);
        }
        if axes[idx].is_some() {
            return Err(malformed(format!("lambda{idx} given twice")));
        }
        axes[idx] = Some(parse_axis(range, item)?);
    }
    if axes.is_empty() {
        return Err(malformed("empty grid"));
    }
    let axes: Vec<Vec<f64>> = axes
        .into_iter()
        .enumerate()
        .map(|(k, a)| a.ok_or_else(|| malformed(format!("lambda{k} missing"))))
        .collect::<CliResult<_>>()?;
    if axes.len() < 2 {
        return Err(malformed("need at least lambda0 and lambda1"));
    }
    let mut points = vec![Vec::new()];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    if points.is_empty() {
        return Err(malformed("empty grid"));
    }
    Ok(points)
}

struct Row {
    lambdas: Vec<f64>,
    sigmas: Option<Vec<f64>>,
    dec_holds: Option<bool>,
    verdict: String,
    time_margin: Option<f64>,
    observer_margin: Option<f64>,
}

fn empty_row(lambdas: &[f64], verdict: &str) -> Row {
    Row {
        lambdas: lambdas.to_vec(),
        sigmas: None,
        dec_holds: None,
        verdict: verdict.into(),
        time_margin: None,
        observer_margin: None,
    }
}

fn scan_point(lambdas: &[f64], model: &LagrangianModel, opts: &ScanOptions) -> CliResult<Row> {
    let adapted = match FieldJet::adapted(lambdas, opts.target_dim) {
        Ok(a) => a,
        Err(Error::RankConstraintViolation { .. }) => {
            return Ok(empty_row(lambdas, "rank-violation"))
        }
        Err(e) => return Err(e.into()),
    };
    let jet = FieldJet::new(adapted.jet.g, adapted.jet.h, adapted.jet.dphi, opts.s)?;
    let sigmas = strain_invariants(&jet).sigmas[1..].to_vec();
    let t = match stress_energy(model, &jet) {
        Ok(t) => t,
        Err(Error::Domain(_)) => return Ok(empty_row(lambdas, "out-of-domain")),
        Err(e) => return Err(e.into()),
    };
    let dec = check_dec(&t, &jet.g, opts.dec_samples, opts.seed)?.holds
        || t.norm() <= vanishing_scale(&jet);
    let sym = match symbol_for(&opts.spec, model, &jet) {
        Ok((s, _)) => s,
        Err(e) if e.kind == "domain" => return Ok(empty_row(lambdas, "out-of-domain")),
        Err(e) => return Err(e),
    };
    let report = classify_with_hint(&sym, &jet.g, observer_hint(&jet).as_ref(), &opts.search);
    Ok(Row {
        lambdas: lambdas.to_vec(),
        sigmas: Some(sigmas),
        dec_holds: Some(dec),
        verdict: report.verdict.label().into(),
        time_margin: Some(report.time_margin),
        observer_margin: report.observer_margin,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Computes every row in parallel and writes them in grid order.
pub fn scan<W: Write>(grid: &[Vec<f64>], opts: &ScanOptions, out: W) -> CliResult<usize> {
    let model = LagrangianModel::from_spec(&opts.spec)?;
    let dim = grid[0].len();
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|p| scan_point(p, &model, opts))
        .collect::<CliResult<_>>()?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..dim).map(|k| format!("lambda{k}")).collect();
    header.extend((1..=dim).map(|j| format!("sigma{j}")));
    header.extend(["dec_holds", "verdict", "time_margin", "observer_margin"].map(String::from));
    w.write_record(&header)?;
    for r in &rows {
        let mut rec: Vec<String> = r.lambdas.iter().map(f64::to_string).collect();
        match &r.sigmas {
            Some(s) => rec.extend(s.iter().map(f64::to_string)),
            None => rec.extend(std::iter::repeat_n(String::new(), dim)),
        }
        rec.push(opt(r.dec_holds));
        rec.push(r.verdict.clone());
        rec.push(opt(r.time_margin));
        rec.push(opt(r.observer_margin));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_lexicographic_and_inclusive() {
        let g = parse_grid("lambda0=0:1:0.5,lambda1=1,lambda2=0:1:1").unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(g[1], vec![0.0, 1.0, 1.0]);
        assert_eq!(g[5], vec![1.0, 1.0, 1.0]);
        let fine = parse_grid("lambda0=0:2:0.1,lambda1=0").unwrap();
        assert_eq!(fine.len(), 21);
        assert_eq!(fine[3][0], 0.3);
    }

    #[test]
    fn malformed_grids_are_rejected() {
        for bad in [
            "",
            "lambda0=2:0:0.1,lambda1=0",
            "lambda0=1",
            "lambda1=0,lambda2=0",
            "mu=1,lambda1=0",
            "lambda0=0:1,lambda1=0",
            "lambda0=0:1:0,lambda1=0",
            "lambda0=x,lambda1=0",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
