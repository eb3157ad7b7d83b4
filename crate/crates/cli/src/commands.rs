use std::path::Path;

use fock_toeplitz::criterion::{functional_equation_residuals, periodicity_probe, CriterionOptions, PeriodicityProbe, Verdict};
use fock_toeplitz::fock::SobolevOrder;
use fock_toeplitz::operators::{commutator, fmt_f64, toeplitz_matrix, window_max_abs, Commutator, MatrixEnvelope};
use fock_toeplitz::selftest::{format_line, run_all, Outcome};
use fock_toeplitz::special::QuadratureSpec;
use fock_toeplitz::symbols::{chebyshev_radii, decompose, l2_distance, DecomposeOptions, PolarSamples, SymbolSpec};
use fock_toeplitz::{Complex64, Error};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::Output;
use crate::CliError;

fn tag(s: SobolevOrder) -> String {
    format!("s{}", s.value())
}

pub fn matrix(cfg: &ExperimentConfig, out: &Output) -> Result<(), CliError> {
    let quad = cfg.quadrature();
    let mut symbols = vec![("u", cfg.symbol_u()?)];
    if cfg.v.is_some() {
        symbols.push(("v", cfg.symbol_v()?));
    }
    for (role, spec) in &symbols {
        for s in cfg.orders() {
            let t = toeplitz_matrix(spec, s, cfg.n, &quad)?;
            let window = (cfg.n - 1).saturating_sub(t.exact_band());
            out.say(format!(
                "{role} = {}  s = {s}  N = {}  exact_band = {}  window = {window}",
                spec.name(),
                cfg.n,
                t.exact_band()
            ));
            let stem = format!("matrix_{role}_{}", tag(s));
            out.csv(&format!("{stem}.csv"), &t.to_csv())?;
            out.json(&format!("{stem}.json"), &t.envelope())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CommutatorRow {
    s: f64,
    #[serde(rename = "N")]
    n: usize,
    window: usize,
    residual: f64,
    /// (row, col) of the largest window entry.
    at: [usize; 2],
    tolerance: f64,
    commutes: bool,
}

fn window_argmax(c: &Commutator, window: usize) -> [usize; 2] {
    let mut best = ([0, 0], -1.0);
    for n in 0..=window {
        for m in 0..=window {
            let v = c.op.entry(n, m).norm();
            if v > best.1 {
                best = ([n, m], v);
            }
        }
    }
    best.0
}

#[derive(Serialize)]
struct CommutatorEnvelope {
    #[serde(flatten)]
    matrix: MatrixEnvelope,
    window: usize,
}

fn build_commutator(u: &SymbolSpec, v: &SymbolSpec, s: SobolevOrder, n: usize, quad: &QuadratureSpec) -> Result<(Commutator, usize), CliError> {
    let c = commutator(&toeplitz_matrix(u, s, n, quad)?, &toeplitz_matrix(v, s, n, quad)?)?;
    let window = c.window.ok_or_else(|| {
        CliError::Config(format!(
            "field `N`: N = {n} leaves no exactness window for bands {} + {}",
            u.band(),
            v.band()
        ))
    })?;
    Ok((c, window))
}

pub fn commutator_cmd(cfg: &ExperimentConfig, out: &Output) -> Result<(), CliError> {
    let quad = cfg.quadrature();
    let (u, v) = (cfg.symbol_u()?, cfg.symbol_v()?);
    let mut rows = Vec::new();
    for s in cfg.orders() {
        let (c, window) = build_commutator(&u, &v, s, cfg.n, &quad)?;
        let residual = window_max_abs(&c.op, window);
        let tolerance = (cfg.tolerances.verdict_multiplier * c.op.entry_error()).max(cfg.tolerances.commutation);
        rows.push(CommutatorRow {
            s: s.value(),
            n: cfg.n,
            window,
            residual,
            at: window_argmax(&c, window),
            tolerance,
            commutes: residual <= tolerance,
        });
        let stem = format!("commutator_{}", tag(s));
        out.csv(&format!("{stem}.csv"), &c.op.to_csv())?;
        out.json(
            &format!("{stem}.json"),
            &CommutatorEnvelope {
                matrix: c.op.envelope(),
                window,
            },
        )?;
    }

    out.say(format!("[T_{}, T_{}]", u.name(), v.name()));
    out.say(format!(
        "{:>8} {:>6} {:>24} {:>9} {:>10} {:>9}",
        "s", "window", "residual", "at", "tolerance", "commutes"
    ));
    let mut csv = String::from("s,N,window,residual,row,col,tolerance,commutes\n");
    for r in &rows {
        out.say(format!(
            "{:>8} {:>6} {:>24} {:>9} {:>10.1e} {:>9}",
            r.s,
            r.window,
            fmt_f64(r.residual),
            format!("({},{})", r.at[0], r.at[1]),
            r.tolerance,
            r.commutes
        ));
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.s),
            r.n,
            r.window,
            fmt_f64(r.residual),
            r.at[0],
            r.at[1],
            fmt_f64(r.tolerance),
            r.commutes
        ));
    }
    out.csv("commutator_summary.csv", &csv)?;
    out.json("commutator_summary.json", &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct ProbeRow {
    s: f64,
    j: usize,
    grid: Vec<f64>,
    #[serde(flatten)]
    result: PeriodicityProbe,
    periodic_within_error: bool,
}

#[derive(Serialize)]
struct ProbeFile {
    kind: &'static str,
    note: &'static str,
    rows: Vec<ProbeRow>,
}

pub fn criterion(cfg: &ExperimentConfig, out: &Output) -> Result<(), CliError> {
    let quad = cfg.quadrature();
    let (u, v) = (cfg.symbol_u()?, cfg.symbol_v()?);
    if !u.is_radial() {
        return Err(CliError::Config(format!(
            "field `u`: the criterion needs a radial u (only mode j = 0), but {} has modes {:?}",
            u.name(),
            u.mode_indices()
        )));
    }
    if v.band() > cfg.j_max {
        return Err(CliError::Config(format!(
            "field `j_max`: v has mode |j| = {} beyond j_max = {}",
            v.band(),
            cfg.j_max
        )));
    }
    let opts = CriterionOptions {
        k_max: cfg.k_max,
        size: cfg.n,
        multiplier: cfg.tolerances.verdict_multiplier,
        commutation_tol: cfg.tolerances.commutation,
    };
    let u0 = u.mode(0).cloned().unwrap_or_else(fock_toeplitz::symbols::RadialProfile::zero);
    let grid: Vec<f64> = (0..=2 * cfg.k_max).map(|i| i as f64 * 0.5).collect();

    let mut csv = String::from("s,j,k,abs_phi,abs_psi,abs_product,matrix_discrepancy\n");
    let mut probes = Vec::new();
    for s in cfg.orders() {
        let report = functional_equation_residuals(&u, &v, s, &opts, &quad)?;
        for c in &report.cells {
            let abs = |x: Option<fock_toeplitz::criterion::Cell>| x.map_or(String::new(), |c| fmt_f64(c.value.norm()));
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_f64(s.value()),
                c.j,
                c.k,
                abs(c.phi),
                abs(c.psi),
                abs(c.product),
                c.matrix_residual.map_or(String::new(), fmt_f64)
            ));
        }
        let verdict = match &report.verdict {
            Verdict::ConsistentRadial => "consistent_radial".to_string(),
            Verdict::NonradialModeDetected { modes } => format!("nonradial_mode_detected({modes:?})"),
            Verdict::Inconclusive { reason } => format!("inconclusive({reason})"),
        };
        out.say(format!(
            "s = {s}: verdict {verdict}; commutator residual {} on window {} (commutes: {})",
            fmt_f64(report.commutation.residual),
            report.commutation.window,
            report.commutation.commutes
        ));
        out.json(&format!("criterion_{}.json", tag(s)), &report)?;

        for j in 1..=cfg.j_max {
            let result = periodicity_probe(&u0, s, j, &grid, &quad)?;
            probes.push(ProbeRow {
                s: s.value(),
                j,
                grid: grid.clone(),
                periodic_within_error: result.max_abs_difference <= opts.multiplier * result.error_bound,
                result,
            });
        }
    }
    out.csv("criterion_cells.csv", &csv)?;
    out.json(
        "probes.json",
        &ProbeFile {
            kind: "probe",
            note: "max |H(z+s) - H(z+s+j)| on a real grid; finitely many points do not prove periodicity",
            rows: probes,
        },
    )?;
    Ok(())
}

fn read_samples(path: &Path) -> Result<PolarSamples, CliError> {
    let bad = |msg: String| CliError::Config(format!("field `decompose.samples`: {}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["r", "theta", "re", "im"] {
        return Err(bad(format!("expected header r,theta,re,im, found {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|x| x.trim().parse::<f64>().ok())
                .ok_or_else(|| bad(format!("row {}: column {} is not a number", line + 2, i + 1)))
        };
        rows.push((num(0)?, num(1)?, Complex64::new(num(2)?, num(3)?)));
    }
    PolarSamples::from_rows(&rows).map_err(|e| bad(e.to_string()))
}

fn samples_csv(samples: &PolarSamples) -> String {
    let mut out = String::from("r,theta,re,im\n");
    for (r, t, v) in samples.rows() {
        out.push_str(&format!("{},{},{},{}\n", fmt_f64(r), fmt_f64(t), fmt_f64(v.re), fmt_f64(v.im)));
    }
    out
}

#[derive(Serialize)]
struct L2Row {
    s: f64,
    value: f64,
    error: f64,
}

#[derive(Serialize)]
struct DecomposeReport {
    source: String,
    j_max: usize,
    angle_count: usize,
    radius_count: usize,
    modes: Vec<i32>,
    sample_max_error: f64,
    /// Only when the sampled symbol is known analytically.
    l2_residual: Vec<L2Row>,
}

pub fn decompose_cmd(cfg: &ExperimentConfig, out: &Output) -> Result<(), CliError> {
    let quad = cfg.quadrature();
    let dc = cfg
        .decompose
        .as_ref()
        .ok_or_else(|| CliError::Config("field `decompose`: section missing".into()))?;
    let (samples, source, original) = match (&dc.samples, &dc.symbol) {
        (Some(path), _) => (read_samples(path)?, path.display().to_string(), None),
        (None, Some(def)) => {
            let spec = def.build().map_err(|e| CliError::Config(format!("field `decompose.symbol`: {e}")))?;
            let samples = PolarSamples::from_fn(chebyshev_radii(dc.radii, dc.r_max), dc.angles, |z| {
                let (r, t) = z.to_polar();
                spec.evaluate_polar(r, t)
            })?;
            out.csv("samples.csv", &samples_csv(&samples))?;
            (samples, format!("symbol {}", spec.name()), Some(spec))
        }
        (None, None) => unreachable!("validated"),
    };

    let rec = decompose(&samples, cfg.j_max, DecomposeOptions::default()).map_err(|e| match e {
        Error::Precondition(m) => CliError::Config(format!("field `decompose`: {m}")),
        other => other.into(),
    })?;

    let sample_max_error = samples
        .rows()
        .map(|(r, t, v)| (rec.evaluate_polar(r, t) - v).norm())
        .fold(0.0, f64::max);
    let mut l2 = Vec::new();
    if let Some(orig) = &original {
        for s in cfg.orders() {
            let d = l2_distance(
                |r, t| orig.evaluate_polar(r, t),
                |r, t| rec.evaluate_polar(r, t),
                orig.growth(),
                s,
                &quad,
            )?;
            l2.push(L2Row {
                s: s.value(),
                value: d.value.re,
                error: d.abs_error,
            });
        }
    }

    let mut csv = String::from("j,r,re,im\n");
    for (&j, p) in rec.modes() {
        for &r in samples.radii() {
            let v = p.eval(r);
            csv.push_str(&format!("{j},{},{},{}\n", fmt_f64(r), fmt_f64(v.re), fmt_f64(v.im)));
        }
    }
    out.say(format!(
        "recovered modes {:?} from {} rings x {} angles; max sample error {}",
        rec.mode_indices(),
        samples.radii().len(),
        samples.angle_count(),
        fmt_f64(sample_max_error)
    ));
    for row in &l2 {
        out.say(format!("  L²(G_s) residual at s = {}: {}", row.s, fmt_f64(row.value)));
    }
    out.csv("decompose_modes.csv", &csv)?;
    out.json(
        "decompose.json",
        &DecomposeReport {
            source,
            j_max: cfg.j_max,
            angle_count: samples.angle_count(),
            radius_count: samples.radii().len(),
            modes: rec.mode_indices(),
            sample_max_error,
            l2_residual: l2,
        },
    )?;
    Ok(())
}

pub fn selftest(out: Option<&Output>, quad: &QuadratureSpec, quiet: bool) -> Result<(), CliError> {
    let outcomes: Vec<Outcome> = run_all(quad);
    for o in &outcomes {
        if !quiet || !o.passed {
            println!("{}", format_line(o));
        }
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if !quiet {
        println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    }
    if let Some(out) = out {
        out.json("selftest.json", &outcomes)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("acceptance criteria failed: {failed:?}")))
    }
}
