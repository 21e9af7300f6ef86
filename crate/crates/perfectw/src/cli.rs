//! Command execution behind the `perfectw` binary: parameter validation,
//! deterministic CSV/JSON serialization, and the state/config file
//! formats.
//!
//! Every command produces a [`Document`]: named parameters plus a table.
//! CSV output carries the header row and 12-significant-digit values with
//! line-feed newlines, so identical invocations are byte-identical. JSON
//! output is one top-level object with `"params"` and `"rows"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;

use crate::design;
use crate::error::{Error, Result};
use crate::lattice::{build_coupling_matrix, evolve, CouplingSpec, ModeState};
use crate::loss;
use crate::nonlocality::{self, QubitEmbedding, RungStatus};

/// Output format of the machine-readable table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(
                "format",
                format!("expected csv or json, got {other}"),
            )),
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    /// Rendered as an empty CSV field / JSON null.
    Null,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x, 12),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Value::from(*x),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Text(t) => serde_json::Value::from(t.as_str()),
            Cell::Bool(b) => serde_json::Value::from(*b),
            Cell::Null => serde_json::Value::Null,
        }
    }
}

/// Formats `x` with `sig` significant digits, fixed-point where the
/// exponent allows and scientific otherwise.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp10 = x.abs().log10().floor() as i32;
    if exp10 < -4 || exp10 >= sig as i32 {
        format!("{:.*e}", sig - 1, x)
    } else {
        let decimals = (sig as i32 - 1 - exp10).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Parameters and a result table, ready to serialize.
#[derive(Debug, Clone)]
pub struct Document {
    pub params: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut params = serde_json::Map::new();
        for (name, cell) in &self.params {
            params.insert(name.clone(), cell.json());
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, cell) in self.columns.iter().zip(row.iter()) {
                    obj.insert(col.clone(), cell.json());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut top = serde_json::Map::new();
        top.insert("params".to_string(), serde_json::Value::Object(params));
        top.insert("rows".to_string(), serde_json::Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(top))
            .expect("document serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

// ---------------------------------------------------------------------------
// design

#[derive(Debug, Clone)]
pub struct DesignArgs {
    pub s: f64,
    pub k: f64,
    pub d0: Option<f64>,
    pub d1: Option<f64>,
    /// How many recurrence positions to report.
    pub recurrences: usize,
}

/// Solves the inverse design and lays the solution out as
/// `(quantity, value)` rows.
pub fn run_design(args: &DesignArgs) -> Result<Document> {
    let geometry = match (args.d0, args.d1) {
        (Some(d0), Some(d1)) => Some((d0, d1)),
        (None, None) => None,
        _ => {
            return Err(Error::invalid(
                "d0/d1",
                "the separation fit parameters must be given together",
            ))
        }
    };
    if args.recurrences == 0 {
        return Err(Error::invalid("recurrences", "need at least one recurrence"));
    }
    let sol = design::solve(args.s, args.k, geometry, args.recurrences)?;

    let mut params = vec![
        ("s".to_string(), Cell::Num(args.s)),
        ("k".to_string(), Cell::Num(args.k)),
        ("recurrences".to_string(), Cell::Int(args.recurrences as i64)),
    ];
    if let Some((d0, d1)) = geometry {
        params.push(("d0".to_string(), Cell::Num(d0)));
        params.push(("d1".to_string(), Cell::Num(d1)));
    }

    let mut rows = vec![
        vec![Cell::Text("gamma".into()), Cell::Num(sol.gamma)],
        vec![Cell::Text("kz_star".into()), Cell::Num(sol.kz_star)],
        vec![Cell::Text("z_star_cm".into()), Cell::Num(sol.z_star_cm)],
    ];
    for (i, r) in sol.recurrence.iter().enumerate() {
        let n = i + 1;
        rows.push(vec![
            Cell::Text(format!("recurrence_kz_{n}")),
            Cell::Num(r.kz),
        ]);
        rows.push(vec![
            Cell::Text(format!("recurrence_z_cm_{n}")),
            Cell::Num(r.z_cm),
        ]);
        rows.push(vec![
            Cell::Text(format!("recurrence_phase_{n}")),
            Cell::Num(r.phase_shift),
        ]);
    }
    if let Some(seps) = &sol.separations {
        for (i, d) in seps.iter().enumerate() {
            rows.push(vec![
                Cell::Text(format!("separation_{}", i + 1)),
                Cell::Num(*d),
            ]);
        }
    }
    for j in 0..3 {
        let amp = sol.target.amplitude(j);
        rows.push(vec![
            Cell::Text(format!("target_re_{}", j + 1)),
            Cell::Num(amp.re),
        ]);
        rows.push(vec![
            Cell::Text(format!("target_im_{}", j + 1)),
            Cell::Num(amp.im),
        ]);
    }

    Ok(Document {
        params,
        columns: vec!["quantity".to_string(), "value".to_string()],
        rows,
    })
}

// ---------------------------------------------------------------------------
// evolve

#[derive(Debug, Clone)]
pub struct EvolveArgs {
    pub s: f64,
    pub k: f64,
    pub z_max: f64,
    pub points: usize,
    /// Apply the compensating middle-guide phase to the exported state.
    pub compensate: bool,
}

#[derive(Debug, Clone)]
pub struct EvolveOutput {
    pub document: Document,
    /// State at `z_max` (phase-compensated when requested), for
    /// `--state-out`.
    pub final_state: ModeState,
}

/// Center-injection probability table over a uniform grid `[0, z_max]` —
/// the data behind the propagation plots.
pub fn run_evolve(args: &EvolveArgs) -> Result<EvolveOutput> {
    if args.z_max <= 0.0 || !args.z_max.is_finite() {
        return Err(Error::invalid(
            "z-max",
            format!("propagation range must be positive, got {}", args.z_max),
        ));
    }
    if args.points < 2 {
        return Err(Error::invalid(
            "points",
            format!("need at least 2 grid points, got {}", args.points),
        ));
    }
    let gamma = design::gamma_for(args.s)?;
    let spec = CouplingSpec::new(3, vec![1.0, gamma], args.k)?;
    let m = build_coupling_matrix(&spec);
    let psi0 = ModeState::injection(3, 1)?;

    let mut rows = Vec::with_capacity(args.points);
    let mut last = psi0.clone();
    for i in 0..args.points {
        let z = args.z_max * i as f64 / (args.points - 1) as f64;
        let psi = evolve(&psi0, &m, z)?;
        let p = psi.probabilities();
        rows.push(vec![
            Cell::Num(z),
            Cell::Num(args.k * z),
            Cell::Num(p[0]),
            Cell::Num(p[1]),
            Cell::Num(p[2]),
        ]);
        if i == args.points - 1 {
            last = psi;
        }
    }
    let final_state = if args.compensate {
        let phi = design::compensating_phase(&last)?;
        crate::lattice::apply_phase_shift(&last, 1, phi)?
    } else {
        last
    };

    Ok(EvolveOutput {
        document: Document {
            params: vec![
                ("s".to_string(), Cell::Num(args.s)),
                ("k".to_string(), Cell::Num(args.k)),
                ("z_max".to_string(), Cell::Num(args.z_max)),
                ("points".to_string(), Cell::Int(args.points as i64)),
            ],
            columns: ["z_cm", "kz", "p1", "p2", "p3"]
                .iter()
                .map(|c| c.to_string())
                .collect(),
            rows,
        },
        final_state,
    })
}

// ---------------------------------------------------------------------------
// loss-sweep

#[derive(Debug, Clone)]
pub struct LossSweepArgs {
    pub s: f64,
    pub k: f64,
    pub beta_over_k: Vec<f64>,
}

/// Fidelity against the lossless target at `z*(s)` for each loss ratio.
pub fn run_loss_sweep(args: &LossSweepArgs) -> Result<Document> {
    if args.beta_over_k.len() < 2 {
        return Err(Error::invalid(
            "beta-over-k",
            format!("need at least 2 grid points, got {}", args.beta_over_k.len()),
        ));
    }
    let points = loss::sweep_fidelity_vs_loss(args.s, &args.beta_over_k, args.k)?;
    let rows = points
        .iter()
        .map(|&(ratio, f)| vec![Cell::Num(ratio), Cell::Num(f)])
        .collect();
    Ok(Document {
        params: vec![
            ("s".to_string(), Cell::Num(args.s)),
            ("k".to_string(), Cell::Num(args.k)),
        ],
        columns: vec!["beta_over_k".to_string(), "fidelity".to_string()],
        rows,
    })
}

/// The default sweep grid: `β/k ∈ {0.00, 0.01, …, 0.10}`.
pub fn default_loss_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 100.0).collect()
}

// ---------------------------------------------------------------------------
// nonlocality

#[derive(Debug, Clone)]
pub struct NonlocalityArgs {
    /// Evaluate the built-in perfect W-state for this asymmetry.
    pub s: Option<f64>,
    /// …or load amplitudes from a state file.
    pub state_file: Option<String>,
    /// Mixing angle; defaults to the Hardy angle.
    pub alpha: Option<f64>,
}

fn rung_rows(name: &str, rung: nonlocality::Rung, rows: &mut Vec<Vec<Cell>>) {
    rows.push(vec![
        Cell::Text(name.to_string()),
        match rung.value {
            Some(v) => Cell::Num(v),
            None => Cell::Null,
        },
    ]);
    let status = match rung.status {
        RungStatus::Pass => "pass",
        RungStatus::Fail => "fail",
        RungStatus::Undefined => "undefined",
    };
    rows.push(vec![
        Cell::Text(format!("{name}_status")),
        Cell::Text(status.to_string()),
    ]);
}

/// Hardy ladder plus Bell-CH certificate for the chosen state.
pub fn run_nonlocality(args: &NonlocalityArgs) -> Result<Document> {
    let alpha = args.alpha.unwrap_or_else(nonlocality::alpha_star);
    let (state, mut params) = match (&args.s, &args.state_file) {
        (Some(s), None) => {
            let target = design::target_state(&design::WTarget::new(*s, 0.0, 0.0)?);
            (
                QubitEmbedding::from_mode_state(&target)?,
                vec![("s".to_string(), Cell::Num(*s))],
            )
        }
        (None, Some(path)) => {
            let state = read_state_file(Path::new(path))?;
            if state.len() != 3 {
                return Err(Error::invalid(
                    "state-file",
                    format!("nonlocality certification needs 3 modes, got {}", state.len()),
                ));
            }
            (
                QubitEmbedding::from_mode_state(&state)?,
                vec![("state_file".to_string(), Cell::Text(path.clone()))],
            )
        }
        _ => {
            return Err(Error::invalid(
                "s/state-file",
                "give exactly one state source: --s or --state-file",
            ))
        }
    };
    params.push(("alpha".to_string(), Cell::Num(alpha)));

    let cert = nonlocality::hardy_certificate(&state, alpha)?;
    let ladder = nonlocality::hardy_ladder_report(&state, alpha)?;

    let mut rows = vec![
        vec![Cell::Text("p_hardy".into()), Cell::Num(cert.p_hardy)],
        vec![Cell::Text("p_veto1".into()), Cell::Num(cert.p_veto1)],
        vec![Cell::Text("p_veto2".into()), Cell::Num(cert.p_veto2)],
        vec![Cell::Text("p_veto3".into()), Cell::Num(cert.p_veto3)],
        vec![Cell::Text("ch_lhs".into()), Cell::Num(cert.ch_lhs)],
        vec![Cell::Text("violated".into()), Cell::Bool(cert.violated)],
    ];
    rung_rows("sometimes", ladder.sometimes, &mut rows);
    rung_rows("always_site1", ladder.always_site1, &mut rows);
    rung_rows("always_site2", ladder.always_site2, &mut rows);
    rung_rows("never", ladder.never, &mut rows);

    Ok(Document {
        params,
        columns: vec!["quantity".to_string(), "value".to_string()],
        rows,
    })
}

// ---------------------------------------------------------------------------
// state files

/// Writes the plain-text state format: a mode-count header line, then one
/// `re im` pair per mode at full precision.
pub fn write_state_file(path: &Path, state: &ModeState) -> Result<()> {
    let mut text = format!("{}\n", state.len());
    for j in 0..state.len() {
        let c = state.amplitude(j);
        let _ = writeln!(text, "{:.16e} {:.16e}", c.re, c.im);
    }
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Reads the state format written by [`write_state_file`]. Amplitudes
/// must be normalized within 1e-6; they are renormalized exactly on load.
pub fn read_state_file(path: &Path) -> Result<ModeState> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let parse_err = |message: String| Error::Parse {
        path: path.display().to_string(),
        message,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| parse_err("empty state file".to_string()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| parse_err(format!("bad mode count {header:?}")))?;
    if n == 0 {
        return Err(parse_err("mode count must be positive".to_string()));
    }
    let mut amps = Vec::with_capacity(n);
    for (i, line) in lines.by_ref().take(n).enumerate() {
        let mut parts = line.split_whitespace();
        let re: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(format!("mode {}: expected `re im`, got {line:?}", i + 1)))?;
        let im: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(format!("mode {}: expected `re im`, got {line:?}", i + 1)))?;
        if parts.next().is_some() {
            return Err(parse_err(format!("mode {}: trailing fields in {line:?}", i + 1)));
        }
        amps.push(C64::new(re, im));
    }
    if amps.len() < n {
        return Err(parse_err(format!("expected {n} modes, found {}", amps.len())));
    }
    if lines.next().is_some() {
        return Err(parse_err(format!("more than {n} amplitude lines")));
    }
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(
            "state-file",
            format!("amplitudes not normalized: ‖ψ‖ = {norm}"),
        ));
    }
    ModeState::new(amps.into_iter().map(|c| c / norm).collect())
}

// ---------------------------------------------------------------------------
// config files

/// Parses the optional flat `key = value` configuration document. Keys
/// mirror flag names; `#` starts a comment; later keys win.
pub fn parse_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            message: format!("line {}: expected `key = value`, got {raw:?}", lineno + 1),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Parses a comma-separated list of loss ratios.
pub fn parse_ratio_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| {
                Error::invalid("beta-over-k", format!("bad ratio {t:?} in list"))
            })
        })
        .collect()
}
