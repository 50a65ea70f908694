// SPDX-License-Identifier: Apache-2.0

// Size ladder for the SP engine: top-level candidate counts are checked against
// the bichromatic-subset closed form, and wall times are reported alongside.

use std::time::Instant;

use serde_json::json;

use stochsep::dataset::generate::{gen_random_at, ProbLaw};
use stochsep::geom::position::Level;
use stochsep::sp::{bichromatic_subsets, separable_probability, Strategy};

use crate::commands::{Failure, Output};
use crate::report::{float, Report};

struct Row {
    blues: usize,
    candidates: u64,
    expected: u64,
    seconds: f64,
    /// Whether scan and radial agree exactly, when compared.
    strategies_agree: Option<bool>,
}

/// Least-squares slope of `log y` against `log x`.
fn growth_exponent(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn ladder(text: &str) -> Result<Vec<usize>, Failure> {
    let sizes: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("--blues: expected comma-separated counts, got {text:?}")))?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Failure::Usage("--blues: counts must be positive".into()));
    }
    Ok(sizes)
}

pub fn run(dim: usize, reds: usize, blues: &str, seed: u64, strategy: Strategy, compare: bool, csv: bool) -> Result<Output, Failure> {
    if dim < 2 {
        return Err(Failure::Usage("--dim must be at least 2 for candidate counting".into()));
    }
    let mut rows = Vec::new();
    for big_n in ladder(blues)? {
        let ds = gen_random_at(reds, big_n, dim, &ProbLaw::Uniform, seed.wrapping_add(big_n as u64), Level::Sgpp);
        let locs = ds.locations()?;
        let start = Instant::now();
        let res = separable_probability(&locs.to_scalar::<f64>(), strategy)?;
        let seconds = start.elapsed().as_secs_f64();
        let strategies_agree = if compare {
            let a = separable_probability(&locs, Strategy::Scan)?.sp;
            let b = separable_probability(&locs, Strategy::Radial)?.sp;
            Some(a == b)
        } else {
            None
        };
        rows.push(Row {
            blues: big_n,
            candidates: res.per_level[0].candidates,
            expected: bichromatic_subsets(reds as u64, big_n as u64, dim as u64),
            seconds,
            strategies_agree,
        });
    }
    let counts_match = rows.iter().all(|r| r.candidates == r.expected);
    let agree = rows.iter().all(|r| r.strategies_agree != Some(false));
    let code = if counts_match && agree { 0 } else { 1 };

    if csv {
        let mut out = String::from("d,n,N,candidates,closed_form,seconds,strategies_agree\n");
        for r in &rows {
            let agree = r.strategies_agree.map(|a| a.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{dim},{reds},{},{},{},{:.6},{agree}\n",
                r.blues, r.candidates, r.expected, r.seconds
            ));
        }
        if code != 0 {
            return Err(Failure::Usage(format!("candidate counts or strategies disagree\n{out}")));
        }
        return Ok(Output::Raw(out));
    }

    let measured: Vec<(f64, f64)> = rows.iter().map(|r| (r.blues as f64, r.candidates as f64)).collect();
    let closed: Vec<(f64, f64)> = rows.iter().map(|r| (r.blues as f64, r.expected as f64)).collect();
    let mut rep = Report::new("bench");
    rep.result("counts_match", counts_match);
    if compare {
        rep.result("strategies_agree", agree);
    }
    rep.result("growth_exponent", growth_exponent(&measured).map(float));
    rep.result("closed_form_exponent", growth_exponent(&closed).map(float));
    rep.result(
        "rows",
        rows.iter()
            .map(|r| {
                json!({"N": r.blues, "candidates": r.candidates, "closed_form": r.expected,
                       "seconds": r.seconds, "strategies_agree": r.strategies_agree})
            })
            .collect::<Vec<_>>(),
    );
    rep.diag("dimension", dim);
    rep.diag("reds", reds);
    rep.diag("strategy", json!(strategy));
    rep.diag("seed", seed);
    rep.diag("probabilities", "uniform j/20");
    if !counts_match {
        rep.warnings.push("candidate counts differ from the closed form".into());
    }
    if !agree {
        rep.warnings.push("scan and radial strategies disagree".into());
    }
    Ok(Output::Report(rep, code))
}
