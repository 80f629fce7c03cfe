//! Subcommand implementations.
//!
//! Exit-code contract: 0 = requested checks passed (or were skipped with a
//! warning), 1 = input or validation failure, 2 = budget exceeded,
//! 3 = a computed check failed.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::Zero;

use relgrowth_core::components::{build_all_masked, ComponentAnalysis, MaskedMatrix};
use relgrowth_core::counting::{
    count_by_weight, fourier_count, relative_growth, CountBudget, CountError, CountTable,
    FourierError,
};
use relgrowth_core::lattice::{
    analyze_lattices, dual_points, LatticeBudget, LatticeError, LatticeReport, TorusPoint,
};
use relgrowth_core::oracle::{
    compare_with_table, oracle_counts, verify_strong_markov, OracleError,
};
use relgrowth_core::series::{
    asymptotic_fit, big_ratio, decay_check, growth_bracket, min_recurrence, SeriesError,
};
use relgrowth_core::spectral::{character_sum_matrices, torus_scan, weighted_matrix, SpectralScan};

use crate::config::RunConfig;
use crate::output::{sig12, write_atomic};
use crate::source::{resolve, resolve_group, ResolvedInput};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn budget(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

pub type CmdResult = Result<u8, Failure>;

fn map_count_error(e: CountError) -> Failure {
    match e {
        CountError::BudgetExceeded { .. } => Failure::budget(e.to_string()),
        other => Failure::invalid(other.to_string()),
    }
}

fn map_lattice_error(e: LatticeError) -> Failure {
    match e {
        LatticeError::WeightSetBudgetExceeded { .. } => Failure::budget(e.to_string()),
        other => Failure::invalid(other.to_string()),
    }
}

fn map_oracle_error(e: OracleError) -> Failure {
    match e {
        OracleError::WordBudgetExceeded { .. } => Failure::budget(e.to_string()),
        other => Failure::invalid(other.to_string()),
    }
}

/// Resolve the input and require a structurally valid automaton.
fn resolve_valid(config: &RunConfig) -> Result<(ResolvedInput, ComponentAnalysis), Failure> {
    let input = resolve(config).map_err(|e| Failure::invalid(e.to_string()))?;
    let report = input
        .automaton
        .validate()
        .map_err(|e| Failure::invalid(e.to_string()))?;
    if !report.is_valid() {
        let mut message = format!("input '{}' is not a valid automaton:\n", input.label);
        for line in report.describe(&input.automaton) {
            let _ = writeln!(message, "  - {line}");
        }
        return Err(Failure::invalid(message));
    }
    Ok((input, report.analysis))
}

fn count_budget(config: &RunConfig) -> CountBudget {
    CountBudget {
        max_entries: config.table_budget,
    }
}

fn lattice_budget(config: &RunConfig) -> LatticeBudget {
    LatticeBudget {
        max_weights: config.table_budget,
        ..LatticeBudget::default()
    }
}

// ---------------------------------------------------------------- validate

pub fn cmd_validate(config: &RunConfig) -> CmdResult {
    let input = resolve(config).map_err(|e| Failure::invalid(e.to_string()))?;
    let report = input
        .automaton
        .validate()
        .map_err(|e| Failure::invalid(e.to_string()))?;
    let a = &input.automaton;
    let mut text = String::new();
    let _ = writeln!(text, "input: {}", input.label);
    let _ = writeln!(
        text,
        "vertices: {}  edges: {}  generators: {}",
        a.vertex_count(),
        a.edge_count(),
        a.generators().len()
    );
    let _ = writeln!(text, "growth rate: {}", sig12(report.analysis.lambda));
    let _ = writeln!(
        text,
        "components: {} ({} maximal)",
        report.analysis.components.len(),
        report.analysis.maximal_indices.len()
    );
    if report.is_valid() {
        let _ = writeln!(text, "verdict: VALID");
    } else {
        let _ = writeln!(text, "verdict: INVALID");
        for line in report.describe(a) {
            let _ = writeln!(text, "  - {line}");
        }
    }
    print!("{text}");
    write_atomic(&config.out_dir.join("validate.txt"), &text)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    Ok(if report.is_valid() { 0 } else { 1 })
}

// ----------------------------------------------------------------- analyze

fn render_basis(basis: &[Vec<i128>]) -> String {
    let rows: Vec<String> = basis
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn render_rational(r: &Ratio<i128>) -> String {
    if r.is_integer() {
        format!("{}", r.to_integer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_point(p: &TorusPoint) -> String {
    let cells: Vec<String> = p.iter().map(render_rational).collect();
    format!("({})", cells.join(", "))
}

/// Map exact dual points onto grid indices when they all lie on the grid.
fn duals_on_grid(duals: &[TorusPoint], grid: usize) -> Option<Vec<Vec<usize>>> {
    let mut out = Vec::with_capacity(duals.len());
    for point in duals {
        let mut index = Vec::with_capacity(point.len());
        for r in point {
            let scaled = r * Ratio::from_integer(grid as i128);
            if !scaled.is_integer() {
                return None;
            }
            index.push(scaled.to_integer() as usize % grid);
        }
        out.push(index);
    }
    out.sort();
    out.dedup();
    Some(out)
}

struct StructureData {
    lattices: LatticeReport,
    duals: Vec<TorusPoint>,
    scan: SpectralScan,
    cross_check: Option<bool>,
    masked: Vec<MaskedMatrix>,
}

fn structure_pipeline(
    config: &RunConfig,
    input: &ResolvedInput,
    analysis: &ComponentAnalysis,
) -> Result<StructureData, Failure> {
    let a = &input.automaton;
    let w = &input.weighting;
    let lattices =
        analyze_lattices(a, w, analysis, &lattice_budget(config)).map_err(map_lattice_error)?;
    let mut duals: Vec<TorusPoint> = Vec::new();
    for comp in &lattices.per_component {
        let pts = dual_points(&comp.delta).map_err(map_lattice_error)?;
        duals.extend(pts);
    }
    duals.sort();
    duals.dedup();
    let masked = build_all_masked(a, analysis).map_err(|e| Failure::invalid(e.to_string()))?;
    let scan = torus_scan(&masked, w, config.grid, analysis.lambda, 1e-6)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    let cross_check = duals_on_grid(&duals, config.grid).map(|dual_idx| {
        let mut scan_idx = scan.near_maximal.clone();
        scan_idx.sort();
        scan_idx == dual_idx
    });
    Ok(StructureData {
        lattices,
        duals,
        scan,
        cross_check,
        masked,
    })
}

pub fn cmd_analyze(config: &RunConfig) -> CmdResult {
    let (input, analysis) = resolve_valid(config)?;
    let data = structure_pipeline(config, &input, &analysis)?;
    let a = &input.automaton;
    let mut text = String::new();
    let _ = writeln!(text, "input: {}", input.label);
    let _ = writeln!(text, "growth rate: {}", sig12(analysis.lambda));
    let _ = writeln!(
        text,
        "components: {} ({} maximal)",
        analysis.components.len(),
        analysis.maximal_indices.len()
    );
    for (i, c) in analysis.components.iter().enumerate() {
        let names: Vec<&str> = c.vertices.iter().map(|&v| a.vertex_name(v)).collect();
        let _ = writeln!(
            text,
            "  component {i}: size {} radius {} maximal {} period {} vertices {{{}}}",
            c.vertices.len(),
            sig12(c.spectral_radius),
            c.maximal,
            c.period
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".into()),
            names.join(", ")
        );
    }
    for (slot, comp) in data.lattices.per_component.iter().enumerate() {
        let _ = writeln!(text, "maximal {slot} (component {}):", comp.component);
        let _ = writeln!(text, "  period p: {}", comp.period);
        let _ = writeln!(
            text,
            "  cycle lattice basis: {}",
            render_basis(comp.gamma.basis())
        );
        let _ = writeln!(
            text,
            "  difference lattice basis: {}",
            render_basis(comp.delta.basis())
        );
        let step: Vec<String> = comp.step_class.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(text, "  step class c: [{}]", step.join(", "));
        let _ = writeln!(text, "  quotient order D_j: {}", comp.index);
        let _ = writeln!(text, "  stabilized at cycle length: {}", comp.cutoff);
    }
    let _ = writeln!(
        text,
        "global period D: {} (product form: {})",
        data.lattices.global.lcm, data.lattices.global.product
    );
    let dual_names: Vec<String> = data.duals.iter().map(render_point).collect();
    let _ = writeln!(text, "dual points: {}", dual_names.join(" "));
    let near: Vec<String> = data
        .scan
        .near_maximal
        .iter()
        .map(|idx| {
            let cells: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    let _ = writeln!(
        text,
        "scan grid {}: near-maximal points [{}]",
        data.scan.grid,
        near.join(", ")
    );
    match data.cross_check {
        Some(true) => {
            let _ = writeln!(text, "dual points vs torus scan: PASS");
        }
        Some(false) => {
            let _ = writeln!(text, "dual points vs torus scan: FAIL");
        }
        None => {
            let _ = writeln!(
                text,
                "dual points vs torus scan: SKIPPED (dual points not on the grid; pick a grid their denominators divide)"
            );
        }
    }
    print!("{text}");
    write_atomic(&config.out_dir.join("analyze.txt"), &text)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    Ok(if data.cross_check == Some(false) {
        3
    } else {
        0
    })
}

// ------------------------------------------------------------------- count

fn build_table(
    config: &RunConfig,
    input: &ResolvedInput,
) -> Result<(CountTable, Option<String>), Failure> {
    // On budget exhaustion, back off to the longest prefix that fits and
    // report truncated output (still exit code 2).
    let mut n_max = config.n_max;
    let mut warning = None;
    for _ in 0..16 {
        match count_by_weight(
            &input.automaton,
            &input.weighting,
            n_max,
            &count_budget(config),
        ) {
            Ok(t) => return Ok((t, warning)),
            Err(CountError::BudgetExceeded {
                reached_length,
                estimated_entries,
                max_entries,
            }) => {
                let next = match reached_length {
                    Some(n) if n > 1 => n - 1,
                    // Up-front estimate rejected: solve the box bound
                    // (2 F n + 1)^dim * |V| <= 8 cap for n.
                    None => {
                        let f = input.weighting.max_abs().max(1) as f64;
                        let dim = input.weighting.dim() as f64;
                        let cap = (8.0 * max_entries as f64
                            / input.automaton.vertex_count().max(1) as f64)
                            .max(1.0);
                        let side = cap.powf(1.0 / dim);
                        let n = ((side - 1.0) / (2.0 * f)).floor();
                        if n < 1.0 || n as usize >= n_max {
                            return Err(Failure::budget(format!(
                                "estimated weight table size {estimated_entries} exceeds cap {max_entries}"
                            )));
                        }
                        n as usize
                    }
                    _ => {
                        return Err(Failure::budget(format!(
                            "weight table budget {max_entries} exhausted before any length completed"
                        )));
                    }
                };
                warning = Some(format!(
                    "weight-table budget ({max_entries} entries) reached; output truncated to length {next}"
                ));
                n_max = next;
            }
            Err(e) => return Err(map_count_error(e)),
        }
    }
    Err(Failure::budget(
        "weight-table budget back-off did not converge",
    ))
}

fn counts_csv(table: &CountTable, target: Option<&[i64]>) -> Result<String, Failure> {
    let mut csv = String::new();
    let target_vec = match target {
        Some(coords) => Some(
            relgrowth_core::weights::WeightVec::from_slice(coords)
                .map_err(|e| Failure::invalid(e.to_string()))?,
        ),
        None => None,
    };
    let label = if target.is_some() {
        "target_count"
    } else {
        "zero_weight_count"
    };
    let _ = writeln!(csv, "n,total,{label},ratio");
    for n in 0..=table.n_max() {
        let total = table.total(n).clone();
        let count = match &target_vec {
            Some(w) => table.count(n, w),
            None => table.zero_count(n),
        };
        let ratio = if total.is_zero() {
            0.0
        } else {
            big_ratio(&count, &total)
        };
        let _ = writeln!(csv, "{n},{total},{count},{}", sig12(ratio));
    }
    Ok(csv)
}

fn weights_csv(table: &CountTable) -> String {
    let mut csv = String::new();
    let header: Vec<String> = (1..=table.dim()).map(|i| format!("w{i}")).collect();
    let _ = writeln!(csv, "n,{},count", header.join(","));
    for n in 0..=table.n_max() {
        for (w, c) in table.sorted_row(n) {
            let coords: Vec<String> = w.coords().iter().map(|x| x.to_string()).collect();
            let _ = writeln!(csv, "{n},{},{c}", coords.join(","));
        }
    }
    csv
}

pub fn cmd_count(config: &RunConfig, by_weight: bool) -> CmdResult {
    let (input, _) = resolve_valid(config)?;
    let (table, truncated) = build_table(config, &input)?;
    let csv = counts_csv(&table, config.target.as_deref())?;
    write_atomic(&config.out_dir.join("counts.csv"), &csv)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    if by_weight {
        write_atomic(&config.out_dir.join("weights.csv"), &weights_csv(&table))
            .map_err(|e| Failure::invalid(e.to_string()))?;
    }
    println!(
        "counted paths to length {} (dim {}), wrote {}",
        table.n_max(),
        table.dim(),
        config.out_dir.join("counts.csv").display()
    );
    if let Some(warning) = truncated {
        eprintln!("warning: {warning}");
        return Ok(2);
    }
    Ok(0)
}

// -------------------------------------------------------------------- scan

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 53) as f64
}

pub fn cmd_scan(config: &RunConfig) -> CmdResult {
    let (input, analysis) = resolve_valid(config)?;
    let masked = build_all_masked(&input.automaton, &analysis)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    let scan = torus_scan(
        &masked,
        &input.weighting,
        config.grid,
        analysis.lambda,
        1e-6,
    )
    .map_err(|e| Failure::invalid(e.to_string()))?;
    let dim = input.weighting.dim();
    let mut csv = String::new();
    let mut header: Vec<String> = (1..=dim).map(|i| format!("t{i}")).collect();
    for j in 0..masked.len() {
        header.push(format!("radius_{j}"));
    }
    let _ = writeln!(csv, "{}", header.join(","));
    for (index, radii) in &scan.radii {
        let mut cells: Vec<String> = index
            .iter()
            .map(|&k| sig12(k as f64 / scan.grid as f64))
            .collect();
        cells.extend(radii.iter().map(|&r| sig12(r)));
        let _ = writeln!(csv, "{}", cells.join(","));
    }
    write_atomic(&config.out_dir.join("scan.csv"), &csv)
        .map_err(|e| Failure::invalid(e.to_string()))?;

    let near: Vec<String> = scan
        .near_maximal
        .iter()
        .map(|idx| {
            let cells: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    let mut near_text = format!(
        "{{\"grid\": {}, \"tolerance\": {}, \"near_maximal\": [{}]}}\n",
        scan.grid,
        sig12(scan.near_tol),
        near.join(", ")
    );
    let mut sampled_note = String::new();
    if config.samples > 0 {
        let mut state = config.seed;
        let mut max_radius: f64 = 0.0;
        for _ in 0..config.samples {
            let t: Vec<f64> = (0..dim).map(|_| splitmix(&mut state)).collect();
            for mask in &masked {
                let wm = weighted_matrix(mask, &input.weighting, &t);
                let r = relgrowth_core::eig::spectral_radius(&wm.matrix)
                    .map_err(|e| Failure::invalid(e.to_string()))?;
                max_radius = max_radius.max(r);
            }
        }
        sampled_note = format!(
            "sampled {} random points (seed {}): max radius {} (growth rate {})",
            config.samples,
            config.seed,
            sig12(max_radius),
            sig12(analysis.lambda)
        );
        let _ = writeln!(
            near_text,
            "{{\"sampled_max_radius\": {}}}",
            sig12(max_radius)
        );
    }
    write_atomic(&config.out_dir.join("near_max.txt"), &near_text)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    println!(
        "scanned {}^{} grid: max radius {}, {} near-maximal point(s)",
        scan.grid,
        dim,
        sig12(scan.max_radius),
        scan.near_maximal.len()
    );
    if !sampled_note.is_empty() {
        println!("{sampled_note}");
    }
    Ok(0)
}

// ----------------------------------------------------------------- fourier

pub fn cmd_fourier(config: &RunConfig, upto: Option<usize>) -> CmdResult {
    let (input, _) = resolve_valid(config)?;
    let (table, _) = build_table(config, &input)?;
    let n_max = upto.unwrap_or(16).min(table.n_max());
    let f = table.max_edge_weight().max(0) as usize;
    let mut csv = String::new();
    let _ = writeln!(csv, "n,grid,fourier,residual,table,match");
    let mut all_match = true;
    for n in 0..=n_max {
        let minimal = 2 * f * n + 1;
        let grid = config.grid.max(minimal);
        match fourier_count(&table, n, grid) {
            Ok((count, residual)) => {
                let expected = table.zero_count(n);
                let matched = count == expected && residual < 0.5;
                all_match &= matched;
                let _ = writeln!(
                    csv,
                    "{n},{grid},{count},{},{expected},{}",
                    sig12(residual),
                    if matched { "true" } else { "false" }
                );
            }
            Err(FourierError::PrecisionExceeded { .. }) => {
                let _ = writeln!(csv, "# stopped at n = {n}: counts beyond exact f64 range");
                break;
            }
            Err(e) => return Err(Failure::invalid(e.to_string())),
        }
    }
    write_atomic(&config.out_dir.join("fourier.csv"), &csv)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    println!(
        "quadrature inversion to n = {n_max}: {}",
        if all_match { "all exact" } else { "MISMATCH" }
    );
    Ok(if all_match { 0 } else { 3 })
}

// --------------------------------------------------------------------- fit

/// Default fit window: the asymptotic regime starts around length 40;
/// shorter runs make the fit report SKIPPED rather than fitting
/// preasymptotic noise.
fn fit_window(config: &RunConfig) -> (usize, usize) {
    config
        .window
        .unwrap_or(((config.n_max / 4).max(40), config.n_max))
}

pub fn cmd_fit(config: &RunConfig) -> CmdResult {
    let (input, analysis) = resolve_valid(config)?;
    let lattices = analyze_lattices(
        &input.automaton,
        &input.weighting,
        &analysis,
        &lattice_budget(config),
    )
    .map_err(map_lattice_error)?;
    let step = lattices.global.lcm as usize;
    let (table, _) = build_table(config, &input)?;
    let (rel, _) = relative_growth(&table);
    let window = fit_window(config);
    let nu = input.weighting.dim();
    match asymptotic_fit(&rel, analysis.lambda, step, window) {
        Ok(fit) => {
            let mut text = String::new();
            let _ = writeln!(text, "input: {}", input.label);
            let _ = writeln!(
                text,
                "window: [{}, {}] step {} ({} points)",
                fit.window.0, fit.window.1, fit.step, fit.points
            );
            let _ = writeln!(
                text,
                "slope: {} (target {} for dim {nu})",
                sig12(fit.slope),
                sig12(-(nu as f64) / 2.0)
            );
            let _ = writeln!(text, "constant: {}", sig12(fit.constant));
            let _ = writeln!(text, "max residual: {}", sig12(fit.residual));
            print!("{text}");
            write_atomic(&config.out_dir.join("fit.txt"), &text)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            // Gnuplot-ready data: log n vs log(count / lambda^n).
            let mut data = String::new();
            let _ = writeln!(
                data,
                "# log(n)  log(count*lambda^-n); fitted slope {} intercept {}",
                sig12(fit.slope),
                sig12(fit.constant.ln())
            );
            let mut n = fit.window.0.div_ceil(step.max(1)) * step.max(1);
            while n <= fit.window.1 && n < rel.len() {
                if !rel[n].is_zero() {
                    let y =
                        relgrowth_core::series::big_ln(&rel[n]) - n as f64 * analysis.lambda.ln();
                    let _ = writeln!(data, "{} {}", sig12((n as f64).ln()), sig12(y));
                }
                n += step.max(1);
            }
            write_atomic(&config.out_dir.join("fit.csv"), &data)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            Ok(0)
        }
        Err(SeriesError::WindowTooShort { points, needed }) => {
            println!(
                "fit SKIPPED: window [{}, {}] yields {points} points, need {needed}",
                window.0, window.1
            );
            Ok(0)
        }
        Err(e) => Err(Failure::invalid(e.to_string())),
    }
}

// ------------------------------------------------------------- rationality

pub fn cmd_rationality(config: &RunConfig) -> CmdResult {
    let (input, _) = resolve_valid(config)?;
    let (table, _) = build_table(config, &input)?;
    let (rel, tot) = relative_growth(&table);
    let to_bigint =
        |v: &[BigUint]| -> Vec<BigInt> { v.iter().map(|x| BigInt::from(x.clone())).collect() };
    let mut text = String::new();
    let mut csv = String::from("sequence,order,index,coefficient\n");
    let mut failed = false;
    let control_order = input.automaton.vertex_count() + 1;
    match min_recurrence(&to_bigint(&tot), control_order) {
        Ok(rec) if rec.found => {
            let coeffs: Vec<String> = rec.coefficients.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                text,
                "totals control: recurrence found, order {} <= {control_order} (coefficients [{}]) over {} terms",
                rec.order,
                coeffs.join(", "),
                rec.verified_horizon
            );
            for (i, c) in rec.coefficients.iter().enumerate() {
                let _ = writeln!(csv, "totals,{},{},{c}", rec.order, i + 1);
            }
        }
        Ok(_) => {
            let _ = writeln!(
                text,
                "totals control: NO recurrence of order <= {control_order}: totals of a finite graph must be rational"
            );
            failed = true;
        }
        Err(SeriesError::SequenceTooShort { needed, got }) => {
            let _ = writeln!(
                text,
                "totals control: SKIPPED (needs {needed} terms, have {got}; raise n_max)"
            );
        }
        Err(e) => return Err(Failure::invalid(e.to_string())),
    }
    match min_recurrence(&to_bigint(&rel), config.max_order) {
        Ok(rec) if rec.found => {
            let coeffs: Vec<String> = rec.coefficients.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                text,
                "relative growth: recurrence of order {} found (coefficients [{}]); series is rational on the computed range",
                rec.order,
                coeffs.join(", ")
            );
            for (i, c) in rec.coefficients.iter().enumerate() {
                let _ = writeln!(csv, "relative,{},{},{c}", rec.order, i + 1);
            }
        }
        Ok(_) => {
            let _ = writeln!(
                text,
                "relative growth: no recurrence of order <= {} over {} exact terms (evidence of non-rationality)",
                config.max_order,
                rel.len()
            );
        }
        Err(SeriesError::SequenceTooShort { needed, got }) => {
            let _ = writeln!(
                text,
                "relative growth: SKIPPED (needs {needed} terms, have {got}; raise n_max)"
            );
        }
        Err(e) => return Err(Failure::invalid(e.to_string())),
    }
    print!("{text}");
    write_atomic(&config.out_dir.join("rationality.txt"), &text)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    write_atomic(&config.out_dir.join("rationality.csv"), &csv)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    Ok(if failed { 3 } else { 0 })
}

// ------------------------------------------------------------------ oracle

pub fn cmd_oracle(config: &RunConfig) -> CmdResult {
    let spec = resolve_group(config).map_err(|e| Failure::invalid(e.to_string()))?;
    let ball = oracle_counts(&spec, config.n_max, config.word_budget).map_err(map_oracle_error)?;
    let mut csv = String::new();
    let dim = ball.dim();
    let header: Vec<String> = (1..=dim).map(|i| format!("w{i}")).collect();
    let _ = writeln!(csv, "n,{},count", header.join(","));
    for n in 0..=ball.n_max() {
        for (w, c) in ball.sorted_row(n) {
            let coords: Vec<String> = w.coords().iter().map(|x| x.to_string()).collect();
            let _ = writeln!(csv, "{n},{},{c}", coords.join(","));
        }
    }
    write_atomic(&config.out_dir.join("oracle.csv"), &csv)
        .map_err(|e| Failure::invalid(e.to_string()))?;

    // Verify the resolved automaton (file or built-in) against the oracle,
    // then cross-check the dynamic-programming counts.
    let (input, _) = resolve_valid(config)?;
    let verify_depth = config.n_max.min(8);
    let report = verify_strong_markov(&input.automaton, &spec, verify_depth, config.word_budget)
        .map_err(map_oracle_error)?;
    if let Some(issue) = &report.issue {
        return Err(Failure::invalid(format!(
            "path/word bijection fails: {issue:?}"
        )));
    }
    let (table, _) = build_table(config, &input)?;
    let compare_to = config.n_max.min(10);
    if let Some((n, w)) = compare_with_table(&ball, &table, compare_to) {
        println!("oracle vs table: MISMATCH at n = {n}, weight {w}");
        return Ok(3);
    }
    println!(
        "oracle to n = {}: bijection verified to n = {verify_depth}, counts match table to n = {compare_to}",
        ball.n_max()
    );
    Ok(0)
}

// ------------------------------------------------------------------ report

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

impl Verdict {
    fn line(&self, name: &str) -> String {
        match self {
            Verdict::Pass(detail) => format!("PASS  {name}: {detail}"),
            Verdict::Fail(detail) => format!("FAIL  {name}: {detail}"),
            Verdict::Skip(detail) => format!("SKIP  {name}: {detail}"),
        }
    }

    fn failed(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }
}

pub fn cmd_report(config: &RunConfig) -> CmdResult {
    let (input, analysis) = resolve_valid(config)?;
    let a = &input.automaton;
    let w = &input.weighting;
    let nu = w.dim();
    let mut verdicts: Vec<(String, Verdict)> = Vec::new();

    // Structure and spectral cross-check.
    let structure = structure_pipeline(config, &input, &analysis)?;
    let pairs: Vec<String> = structure
        .lattices
        .per_component
        .iter()
        .map(|c| format!("(p={}, D_j={})", c.period, c.index))
        .collect();
    let structure_detail = format!(
        "lambda {} {} D = {} (product {})",
        sig12(analysis.lambda),
        pairs.join(" "),
        structure.lattices.global.lcm,
        structure.lattices.global.product
    );
    verdicts.push((
        "structure cross-check".into(),
        match structure.cross_check {
            Some(true) => Verdict::Pass(format!(
                "{structure_detail}; near-maximal scan set equals the dual points"
            )),
            Some(false) => Verdict::Fail(format!(
                "{structure_detail}; near-maximal scan set differs from the dual points"
            )),
            None => Verdict::Skip(format!(
                "{structure_detail}; dual points not on the scan grid"
            )),
        },
    ));

    // Counting artifacts.
    let (table, truncated) = build_table(config, &input)?;
    let (rel, tot) = relative_growth(&table);
    write_atomic(
        &config.out_dir.join("counts.csv"),
        &counts_csv(&table, None)?,
    )
    .map_err(|e| Failure::invalid(e.to_string()))?;
    if let Some(warning) = &truncated {
        eprintln!("warning: {warning}");
    }

    // Quadrature inversion.
    let f = table.max_edge_weight().max(0) as usize;
    let fourier_to = 16.min(table.n_max());
    let mut fourier_bad = None;
    for n in 0..=fourier_to {
        let grid = config.grid.max(2 * f * n + 1);
        match fourier_count(&table, n, grid) {
            Ok((count, residual)) => {
                if count != table.zero_count(n) || residual >= 0.5 {
                    fourier_bad = Some(format!(
                        "n = {n}: quadrature {count} (residual {}) vs exact {}",
                        sig12(residual),
                        table.zero_count(n)
                    ));
                    break;
                }
            }
            Err(e) => {
                fourier_bad = Some(e.to_string());
                break;
            }
        }
    }
    verdicts.push((
        "quadrature inversion".into(),
        match fourier_bad {
            None => Verdict::Pass(format!(
                "exact integer recovery of zero-weight counts for n <= {fourier_to}"
            )),
            Some(detail) => Verdict::Fail(detail),
        },
    ));

    // Dual-route character sums.
    let char_to = 12.min(table.n_max());
    let mut char_bad = None;
    let probes: Vec<Vec<f64>> = match nu {
        1 => vec![vec![0.0], vec![0.5], vec![1.0 / 3.0]],
        _ => {
            let mut base = vec![vec![0.0; nu]];
            let mut half = vec![0.0; nu];
            half[0] = 0.5;
            half[nu - 1] = 0.5;
            base.push(half);
            let mut third = vec![0.0; nu];
            third[0] = 1.0 / 3.0;
            base.push(third);
            base
        }
    };
    'outer: for t in &probes {
        for n in 0..=char_to {
            let via_table = table.character_sum(n, t);
            let via_matrices = character_sum_matrices(a, &analysis, &structure.masked, w, t, n);
            let tol = 1e-9 * analysis.lambda.max(1.0).powi(n as i32);
            if (via_table - via_matrices).norm() > tol {
                char_bad = Some(format!(
                    "t = {t:?}, n = {n}: table route {via_table} vs matrix route {via_matrices}"
                ));
                break 'outer;
            }
        }
    }
    verdicts.push((
        "character-sum routes".into(),
        match char_bad {
            None => Verdict::Pass(format!(
                "table and matrix-power routes agree to 1e-9*lambda^n for n <= {char_to}"
            )),
            Some(detail) => Verdict::Fail(detail),
        },
    ));

    // Rationality control and evidence.
    let to_bigint =
        |v: &[BigUint]| -> Vec<BigInt> { v.iter().map(|x| BigInt::from(x.clone())).collect() };
    let control_order = a.vertex_count() + 1;
    verdicts.push((
        "rationality control (totals)".into(),
        match min_recurrence(&to_bigint(&tot), control_order) {
            Ok(rec) if rec.found => Verdict::Pass(format!(
                "recurrence of order {} <= {control_order} reproduces all {} totals",
                rec.order, rec.verified_horizon
            )),
            Ok(_) => Verdict::Fail("totals admit no short recurrence".into()),
            Err(SeriesError::SequenceTooShort { needed, got }) => {
                Verdict::Skip(format!("needs {needed} terms, have {got}"))
            }
            Err(e) => Verdict::Fail(e.to_string()),
        },
    ));
    verdicts.push((
        "rationality evidence (relative)".into(),
        match min_recurrence(&to_bigint(&rel), config.max_order) {
            Ok(rec) if !rec.found => Verdict::Pass(format!(
                "no recurrence of order <= {} over {} exact terms",
                config.max_order,
                rel.len()
            )),
            Ok(rec) => Verdict::Fail(format!(
                "relative growth satisfies an order-{} recurrence",
                rec.order
            )),
            Err(SeriesError::SequenceTooShort { needed, got }) => {
                Verdict::Skip(format!("needs {needed} terms, have {got}"))
            }
            Err(e) => Verdict::Fail(e.to_string()),
        },
    ));

    // Asymptotic fit.
    let step = structure.lattices.global.lcm as usize;
    let window = fit_window(config);
    let target_slope = -(nu as f64) / 2.0;
    verdicts.push((
        "asymptotic exponent".into(),
        match asymptotic_fit(&rel, analysis.lambda, step, window) {
            Ok(fit) => {
                let mut data = String::new();
                let _ = writeln!(
                    data,
                    "# log(n)  log(count*lambda^-n); fitted slope {} intercept {}",
                    sig12(fit.slope),
                    sig12(fit.constant.ln())
                );
                let mut n = window.0.div_ceil(step.max(1)) * step.max(1);
                while n <= window.1 && n < rel.len() {
                    if !rel[n].is_zero() {
                        let y = relgrowth_core::series::big_ln(&rel[n])
                            - n as f64 * analysis.lambda.ln();
                        let _ = writeln!(data, "{} {}", sig12((n as f64).ln()), sig12(y));
                    }
                    n += step.max(1);
                }
                write_atomic(&config.out_dir.join("fit.csv"), &data)
                    .map_err(|e| Failure::invalid(e.to_string()))?;
                if (fit.slope - target_slope).abs() <= 0.1 && fit.constant > 0.0 {
                    Verdict::Pass(format!(
                        "slope {} within 0.1 of {}, constant {} > 0 ({} points)",
                        sig12(fit.slope),
                        sig12(target_slope),
                        sig12(fit.constant),
                        fit.points
                    ))
                } else {
                    Verdict::Fail(format!(
                        "slope {} (target {}), constant {}",
                        sig12(fit.slope),
                        sig12(target_slope),
                        sig12(fit.constant)
                    ))
                }
            }
            Err(SeriesError::WindowTooShort { points, needed }) => {
                Verdict::Skip(format!("window unmet ({points} points, need {needed})"))
            }
            Err(e) => Verdict::Fail(e.to_string()),
        },
    ));

    // Density decay at the exponent-matched checkpoint.
    let ratios: Vec<f64> = rel
        .iter()
        .zip(tot.iter())
        .map(|(r, t)| if t.is_zero() { 0.0 } else { big_ratio(r, t) })
        .collect();
    let density_verdict = (|| {
        let step = step.max(1);
        let mut checkpoint = (table.n_max() / step) * step;
        while checkpoint > 0 && ratios[checkpoint] <= 0.0 {
            checkpoint -= step;
        }
        if checkpoint == 0 {
            return Verdict::Skip("no positive ratios".into());
        }
        // Anchor so that checkpoint ~= anchor * 2^(2/nu).
        let factor = (2.0f64).powf(2.0 / nu as f64);
        let mut anchor = ((checkpoint as f64 / factor / step as f64).round() as usize) * step;
        while anchor > 0 && ratios[anchor] <= 0.0 {
            anchor -= step;
        }
        if anchor < 5 || anchor >= checkpoint {
            return Verdict::Skip(format!(
                "not enough range (anchor {anchor}, checkpoint {checkpoint}); raise n_max"
            ));
        }
        match decay_check(&ratios, anchor, checkpoint, 0.1) {
            Ok(verdict) => {
                let detail = format!(
                    "r({}) = {} vs r({}) = {} (expected halving at factor {})",
                    verdict.anchor,
                    sig12(verdict.anchor_ratio),
                    verdict.checkpoint,
                    sig12(verdict.checkpoint_ratio),
                    sig12(factor)
                );
                if verdict.halved_within {
                    Verdict::Pass(detail)
                } else {
                    Verdict::Fail(detail)
                }
            }
            Err(e) => Verdict::Fail(e.to_string()),
        }
    })();
    verdicts.push(("density decay".into(), density_verdict));

    // Pure-exponential bracket.
    verdicts.push((
        "growth bracket".into(),
        match growth_bracket(&tot, analysis.lambda, 5, step.max(1)) {
            Ok(bracket) => {
                if bracket.lower > 0.0 && bracket.stable {
                    Verdict::Pass(format!(
                        "totals/lambda^n within [{}, {}], tail drift {}",
                        sig12(bracket.lower),
                        sig12(bracket.upper),
                        sig12(bracket.tail_drift)
                    ))
                } else {
                    Verdict::Fail(format!(
                        "bracket [{}, {}] tail drift {}",
                        sig12(bracket.lower),
                        sig12(bracket.upper),
                        sig12(bracket.tail_drift)
                    ))
                }
            }
            Err(SeriesError::SequenceTooShort { needed, got }) => {
                Verdict::Skip(format!("needs {needed} terms, have {got}"))
            }
            Err(e) => Verdict::Fail(e.to_string()),
        },
    ));

    let mut text = String::new();
    let _ = writeln!(text, "input: {}", input.label);
    let _ = writeln!(
        text,
        "data files: counts.csv, fit.csv under {}",
        config.out_dir.display()
    );
    let mut any_fail = false;
    for (name, verdict) in &verdicts {
        any_fail |= verdict.failed();
        let _ = writeln!(text, "{}", verdict.line(name));
    }
    let _ = writeln!(text, "overall: {}", if any_fail { "FAIL" } else { "PASS" });
    print!("{text}");
    write_atomic(&config.out_dir.join("report.txt"), &text)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    Ok(if any_fail { 3 } else { 0 })
}
