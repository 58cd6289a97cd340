use hoaa::apps::{
    case_report, evaluate_grid, round_ties_even_reference, round_to_even, subtract, uniform_grid, AfSelect,
    CaseParams, CaseStudy, CordicConfig, FixedPointFormat, GridPoint,
};
use hoaa::cells::{cell_cost, critical_path, eval_cell, netlist, unpack_row, worst_path, CellKind, CostModel, OutputPort};
use hoaa::chains::{BitWord, ChainConfig, Mode, P1aVariant, MAX_WIDTH};
use hoaa::metrics::{ErrorReport, ErrorSample, Method, TrialPlan};
use hoaa::reference::reference;
use hoaa::Error;
use serde_json::{json, Map, Value};

use crate::args::{Command, Common, MetricsArgs};
use crate::error::CliError;
use crate::report::Report;

fn bit(b: bool) -> String {
    (b as u8).to_string()
}

fn cordic_config(c: &Common) -> Result<CordicConfig, CliError> {
    let format = FixedPointFormat::new(c.total_bits, c.frac_bits)?;
    Ok(CordicConfig::new(format, c.iterations)?.with_mode(c.mode).with_variant(c.variant))
}

fn case_params(c: &Common, args: &MetricsArgs) -> Result<CaseParams, CliError> {
    if args.include_cin && args.case != CaseStudy::Hoaa {
        return Err(CliError::Config("--include-cin only applies to --case hoaa".into()));
    }
    Ok(CaseParams {
        width: c.width,
        m: c.m,
        variant: c.variant,
        mode: c.mode,
        include_cin: args.include_cin,
        cordic: cordic_config(c)?,
    })
}

fn trial_plan(c: &Common, method: Method) -> Result<TrialPlan, CliError> {
    match method {
        Method::Exhaustive if c.trials.is_some() => {
            Err(CliError::Config("--trials only applies to --method monte-carlo".into()))
        }
        Method::Exhaustive => Ok(TrialPlan::exhaustive(c.width)),
        Method::MonteCarlo => {
            let trials = c.trials.unwrap_or_else(|| TrialPlan::default_trials(c.width));
            if trials == 0 {
                return Err(CliError::Config("--trials must be positive".into()));
            }
            Ok(TrialPlan::monte_carlo(c.width, c.seed).with_trials(trials))
        }
    }
}

const RUN_COLUMNS: [&str; 4] = ["case", "m", "variant", "mode"];

fn run_fields(case: CaseStudy, p: &CaseParams) -> Vec<String> {
    vec![case.to_string(), p.m.to_string(), p.variant.to_string(), p.mode.to_string()]
}

fn published(case: CaseStudy, r: &ErrorReport) -> Value {
    let data = reference();
    match data.error_metrics_percent.get(case.as_str()) {
        Some(p) => json!({
            "label": data.label,
            "note": data.note,
            "percent": p,
            "computed_percent": { "nmed": r.nmed * 100.0, "mred": r.mred * 100.0 },
        }),
        None => Value::Null,
    }
}

pub fn run(command: &Command, c: &Common) -> Result<Report, CliError> {
    if c.width == 0 || c.width > MAX_WIDTH {
        return Err(Error::InvalidWidth(c.width).into());
    }
    match command {
        Command::DumpCell { cell } => dump_cell(*cell),
        Command::TruthTable { cell } => Ok(truth_table(*cell)),
        Command::Metrics(args) => metrics(c, args),
        Command::Sweep { run, m_values } => sweep(c, run, m_values.as_deref()),
        Command::Subtract { a, b } => subtract_one(c, *a, *b),
        Command::Round { x, k } => round_one(c, *x, *k),
        Command::Af { z, sel, points } => af(c, *z, *sel, *points),
    }
}

fn dump_cell(kind: CellKind) -> Result<Report, CliError> {
    let n = netlist(kind);
    let mut report = Report::new(format!("dump-cell-{kind}"), "dump-cell", &["index", "kind", "inputs", "output"]);
    for (i, g) in n.gates().iter().enumerate() {
        report.rows.push(vec![i.to_string(), g.kind.to_string(), g.inputs.join(" "), g.output.clone()]);
    }
    let cost = cell_cost(kind, &CostModel::default());
    let mut paths = Map::new();
    for port in [OutputPort::Sum, OutputPort::Cout, OutputPort::Cout2] {
        if let Ok(d) = critical_path(kind, port) {
            paths.insert(port.to_string(), d.into());
        }
    }
    let data = reference();
    report.extra = json!({
        "cell": kind,
        "netlist": n,
        "gate_count": cost.gate_count,
        "transistor_count": cost.transistor_count,
        "cost_model": CostModel::default(),
        "critical_path": paths,
        "worst_path": worst_path(kind),
        "reference": {
            "label": data.label,
            "logic_gates": data.logic_gates.get(kind.as_str()),
            "transistors": data.transistors.get(kind.as_str()),
        },
    });
    Ok(report)
}

fn truth_table(kind: CellKind) -> Report {
    let mut columns = vec!["A", "B"];
    if kind.has_carry_in() {
        columns.push("Cin");
    }
    columns.extend(["Sum", "Cout"]);
    if kind.has_cout2() {
        columns.push("Cout2");
    }
    let mut report = Report::new(format!("truth-table-{kind}"), "truth-table", &columns);
    for row in 0..8 {
        let (a, b, cin) = unpack_row(row);
        if !kind.has_carry_in() && cin {
            continue;
        }
        let o = eval_cell(kind, a, b, cin).expect("every listed row is a valid input");
        let mut fields = vec![bit(a), bit(b)];
        if kind.has_carry_in() {
            fields.push(bit(cin));
        }
        fields.extend([bit(o.sum), bit(o.cout)]);
        if let Some(c2) = o.cout2 {
            fields.push(bit(c2));
        }
        report.rows.push(fields);
    }
    report.extra = json!({ "cell": kind });
    report
}

fn metrics(c: &Common, args: &MetricsArgs) -> Result<Report, CliError> {
    let params = case_params(c, args)?;
    let plan = trial_plan(c, args.method)?;
    let r = case_report(args.case, &params, &plan)?;
    let columns: Vec<&str> = RUN_COLUMNS.iter().chain(ErrorReport::CSV_COLUMNS.iter()).copied().collect();
    let mut report = Report::new(format!("metrics-{}", args.case), "metrics", &columns);
    let mut row = run_fields(args.case, &params);
    row.extend(r.csv_fields());
    report.rows.push(row);
    report.extra = json!({
        "case": args.case,
        "params": {
            "width": params.width,
            "m": params.m,
            "variant": params.variant,
            "mode": params.mode,
            "include_cin": params.include_cin,
        },
        "report": r,
        "published_reference": published(args.case, &r),
    });
    Ok(report)
}

fn sweep(c: &Common, args: &MetricsArgs, m_values: Option<&[u32]>) -> Result<Report, CliError> {
    let base = case_params(c, args)?;
    let plan = trial_plan(c, args.method)?;
    let ms: Vec<u32> = match (m_values, args.case) {
        (Some(ms), _) => ms.to_vec(),
        // m is fixed at one plus-one cell, or unused
        (None, CaseStudy::Subtract | CaseStudy::Round | CaseStudy::Activation) => vec![c.m],
        (None, _) => (0..=c.width.min(3)).collect(),
    };
    let columns: Vec<&str> = RUN_COLUMNS
        .iter()
        .chain(&["status"])
        .chain(ErrorReport::CSV_COLUMNS.iter())
        .copied()
        .collect();
    let mut report = Report::new(format!("sweep-{}", args.case), "sweep", &columns);
    for &m in &ms {
        for variant in P1aVariant::ALL {
            for mode in [Mode::Accurate, Mode::Overestimate] {
                let params = CaseParams { m, variant, mode, ..base.clone() };
                let mut row = run_fields(args.case, &params);
                match case_report(args.case, &params, &plan) {
                    Ok(r) => {
                        row.push("ok".into());
                        row.extend(r.csv_fields());
                    }
                    // an accurate plus-one cell fed a carry it cannot absorb
                    Err(Error::UnsupportedConfiguration { .. }) => {
                        row.push("unsupported".into());
                        row.extend(std::iter::repeat_n(String::new(), ErrorReport::CSV_COLUMNS.len()));
                    }
                    Err(e) => return Err(e.into()),
                }
                report.rows.push(row);
            }
        }
    }
    report.extra = json!({ "case": args.case, "method": args.method });
    Ok(report)
}

fn subtract_one(c: &Common, a: u64, b: u64) -> Result<Report, CliError> {
    let cfg = ChainConfig::new(c.width, c.m, c.variant)?;
    let s = subtract(&cfg, c.mode, &BitWord::new(c.width, a)?, &BitWord::new(c.width, b)?)?;
    let exact = a.wrapping_sub(b) & hoaa::chains::mask(c.width);
    let ed = ErrorSample::modular(exact as i128, s.result.bits() as i128, c.width).ed;
    let mut report = Report::new(
        "subtract",
        "subtract",
        &["a", "b", "width", "variant", "mode", "result", "borrow", "exact", "ed"],
    );
    report.rows.push(vec![
        a.to_string(),
        b.to_string(),
        c.width.to_string(),
        c.variant.to_string(),
        c.mode.to_string(),
        s.result.bits().to_string(),
        s.borrow.to_string(),
        exact.to_string(),
        ed.to_string(),
    ]);
    Ok(report)
}

fn round_one(c: &Common, x: u64, k: u32) -> Result<Report, CliError> {
    let cfg = ChainConfig::new(c.width, c.m, c.variant)?;
    let r = round_to_even(&BitWord::new(c.width, x)?, k, &cfg, c.mode)?;
    let exact = round_ties_even_reference(x, k);
    let mut report = Report::new(
        "round",
        "round",
        &["x", "k", "width", "variant", "mode", "result", "reference", "ed"],
    );
    report.rows.push(vec![
        x.to_string(),
        k.to_string(),
        c.width.to_string(),
        c.variant.to_string(),
        c.mode.to_string(),
        r.bits().to_string(),
        exact.to_string(),
        (r.bits() as i128 - exact as i128).to_string(),
    ]);
    Ok(report)
}

fn af(c: &Common, z: Option<f64>, sel: AfSelect, points: usize) -> Result<Report, CliError> {
    let cfg = cordic_config(c)?;
    let grid = match z {
        Some(z) if z.is_finite() => vec![z],
        Some(z) => return Err(CliError::Config(format!("--z must be finite, got {z}"))),
        None if points == 0 => return Err(CliError::Config("--points must be positive".into())),
        None => uniform_grid(-1.0, 1.0, points),
    };
    let rows = evaluate_grid(&cfg, sel, &grid)?;
    let mut report = Report::new(format!("af-{sel}"), "af", &GridPoint::CSV_COLUMNS);
    report.rows = rows.iter().map(GridPoint::csv_fields).collect();
    let max_abs_err = rows.iter().map(|p| p.abs_err).fold(0.0, f64::max);
    report.extra = json!({
        "sel": sel,
        "format": cfg.format,
        "shift_sequence": cfg.shift_sequence().collect::<Vec<_>>(),
        "variant": cfg.p1a_variant,
        "max_abs_err": max_abs_err,
    });
    Ok(report)
}
