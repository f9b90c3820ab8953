//! `hetcdc` command-line interface.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::coding_k3::{achievable_load, plan_shuffle};
use crate::converse_bounds::{bound_report_at_placement, BoundReport};
use crate::error::{Error, Result};
use crate::lp_general::{build_model_with, extract_allocation, solve, LpOptions, LpStatus};
use crate::model::{validate_config, Load, SystemConfig};
use crate::oracle::{min_load_bruteforce, DEFAULT_BUDGET};
use crate::placement_k3::{build_placement, classify_regime, optimal_load};
use crate::shuffle_sim::{run_round, SimConfig};

#[derive(Parser, Debug)]
#[command(name = "hetcdc", version, about = "Heterogeneous coded distributed computing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Instance {
    /// Storage sizes, comma separated, in node order.
    #[arg(long = "M", value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub m: Vec<i64>,
    /// Number of files.
    #[arg(long = "N", allow_hyphen_values = true)]
    pub n: i64,
}

impl Instance {
    fn config(&self, k: Option<i64>) -> Result<SystemConfig> {
        let k = k.unwrap_or(self.m.len() as i64);
        if k != self.m.len() as i64 {
            return Err(Error::BadDimension(format!("K={k} but {} storage sizes", self.m.len())));
        }
        validate_config(k, &self.m, self.n)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regime, optimal load, uncoded load and lower bounds.
    Load(Instance),
    /// Optimal placement as JSON.
    Place(Instance),
    /// Run a byte-level Map/Shuffle/Reduce round on the optimal placement.
    Simulate {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bytes per intermediate value (even).
        #[arg(long = "T", default_value_t = 64)]
        t: usize,
    },
    /// Lower bounds with the active one flagged.
    Bounds(Instance),
    /// Brute-force minimum load and agreement with the closed form.
    Oracle {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Achievable load for any K from the exact linear program.
    Lp {
        #[arg(long = "K")]
        k: Option<i64>,
        #[command(flatten)]
        inst: Instance,
        /// Write the model as a plain-text listing.
        #[arg(long)]
        dump_model: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
    /// Closed form against the oracle on every sorted instance up to Nmax.
    Sweep {
        #[arg(long = "Nmax")]
        n_max: u64,
        #[arg(long)]
        out: PathBuf,
        /// Per-instance oracle budget; larger instances get empty oracle cells.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 success, 1 domain error, 2 usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = write!(out, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            1
        }
    }
}

fn order_note(cfg: &SystemConfig) -> Option<String> {
    if cfg.is_sorted() {
        return None;
    }
    let p: Vec<String> = cfg.sort_permutation().iter().map(|i| (i + 1).to_string()).collect();
    Some(format!("ascending storage order: nodes ({})", p.join(",")))
}

fn uncoded_load(cfg: &SystemConfig) -> Load {
    let n = cfg.n();
    Load::from(cfg.effective_storage().iter().map(|&m| n - m).sum::<u64>())
}

fn bounds_table(r: &BoundReport, out: &mut String) {
    let active = |k| if r.active.contains(&k) { "  (active)" } else { "" };
    use crate::converse_bounds::BoundKind::*;
    if let Some(c) = r.corollary1 {
        let _ = writeln!(out, "  pairing (at placement)  {}", c.describe());
    }
    let _ = writeln!(out, "  pooled                  {}{}", r.pooled.describe(), active(Pooled));
    let _ = writeln!(out, "  cutset                  {}{}", r.cutset.describe(), active(Cutset));
    let _ = writeln!(out, "  genie                   {}{}", r.genie.describe(), active(Genie));
    let _ = writeln!(out, "  max                     {}", r.max_bound.describe());
}

fn header(cfg: &SystemConfig, out: &mut String) {
    let m: Vec<String> = cfg.storage().iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "K={} M=({}) N={}", cfg.k(), m.join(","), cfg.n());
    if let Some(note) = order_note(cfg) {
        let _ = writeln!(out, "{note}");
    }
}

pub fn execute(cmd: &Command) -> Result<String> {
    let mut out = String::new();
    match cmd {
        Command::Load(inst) => {
            let cfg = inst.config(None)?;
            header(&cfg, &mut out);
            let _ = writeln!(out, "regime {}", classify_regime(&cfg)?);
            let _ = writeln!(out, "L* = {}", optimal_load(&cfg)?.describe());
            let _ = writeln!(out, "uncoded = {}", uncoded_load(&cfg).describe());
            let _ = writeln!(out, "bounds:");
            bounds_table(&bound_report_at_placement(&cfg)?, &mut out);
        }
        Command::Bounds(inst) => {
            let cfg = inst.config(None)?;
            header(&cfg, &mut out);
            bounds_table(&bound_report_at_placement(&cfg)?, &mut out);
        }
        Command::Place(inst) => {
            let cfg = inst.config(None)?;
            let p = build_placement(&cfg)?;
            let load = achievable_load(&p.allocation)?;
            out.push_str(&p.allocation.to_doc(Some(p.regime.to_string()), load, p.scale).to_json());
            out.push('\n');
        }
        Command::Simulate { inst, seed, t } => {
            let cfg = inst.config(None)?;
            let p = build_placement(&cfg)?;
            let plan = plan_shuffle(&p.allocation)?;
            let sim = SimConfig::new(p.allocation.config().clone(), *t, *seed)?;
            let report = run_round(&sim, &p.allocation, &plan)?;
            let doc = json!({
                "regime": p.regime.to_string(),
                "scale": p.scale,
                "load_star": optimal_load(&cfg)?,
                "measured_load_original_units": report.measured_load.unscale(p.scale),
                "report": report,
            });
            out.push_str(&serde_json::to_string_pretty(&doc).expect("serializable"));
            out.push('\n');
        }
        Command::Oracle { inst, budget } => {
            let cfg = inst.config(None)?;
            header(&cfg, &mut out);
            let r = min_load_bruteforce(&cfg, *budget)?;
            let star = optimal_load(&cfg)?;
            let _ = writeln!(out, "min = {}", r.min.describe());
            let _ = writeln!(out, "witness profile (doubled instance): {}", r.profile);
            let _ = writeln!(out, "profiles searched = {}", r.feasible_profiles);
            let _ = writeln!(out, "L* = {}", star.describe());
            let _ = writeln!(out, "agree = {}", r.min == star);
        }
        Command::Lp {
            k,
            inst,
            dump_model,
            k_max,
        } => {
            let cfg = inst.config(*k)?;
            let opts = LpOptions {
                k_max: *k_max,
                ..LpOptions::default()
            };
            let model = build_model_with(&cfg, &opts)?;
            if let Some(path) = dump_model {
                std::fs::write(path, model.dump())
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            }
            let sol = solve(&model)?;
            let mut doc = json!({
                "K": cfg.k(),
                "N": cfg.n(),
                "M": cfg.storage(),
                "status": sol.status,
            });
            if sol.status == LpStatus::Optimal {
                let values: BTreeMap<String, String> = BTreeMap::new();
                let values = model.vars.iter().zip(&sol.values).fold(values, |mut acc, (v, x)| {
                    if !num_traits::Zero::is_zero(x) {
                        acc.insert(v.name.clone(), x.to_string());
                    }
                    acc
                });
                let ex = extract_allocation(&cfg, &model, &sol)?;
                let optimum = sol.optimum.expect("optimal");
                doc["optimum"] = json!(optimum.to_string());
                doc["optimum_decimal"] = json!(optimum.to_f64());
                doc["claim"] = json!(if cfg.k() == 3 { "optimal" } else { "achievable" });
                doc["values"] = json!(values);
                doc["scale"] = json!(ex.scale);
                doc["allocation"] = serde_json::to_value(ex.allocation.to_doc(None, optimum * ex.scale, ex.scale))
                    .expect("serializable");
                doc["coded_units"] = json!(ex.units);
            }
            out.push_str(&serde_json::to_string_pretty(&doc).expect("serializable"));
            out.push('\n');
        }
        Command::Sweep { n_max, out: path, budget } => {
            let rows = sweep_rows(*n_max, *budget)?;
            let mut w = csv::Writer::from_path(path)
                .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            let csv_err = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(SWEEP_HEADER).map_err(csv_err)?;
            let mut disagreements = 0;
            for r in &rows {
                if r.agree == Some(false) {
                    disagreements += 1;
                }
                w.write_record(r.record()).map_err(csv_err)?;
            }
            w.flush().map_err(|e| Error::Parse(e.to_string()))?;
            let _ = writeln!(
                out,
                "{} instances written to {}, {} checked by oracle, {} disagreements",
                rows.len(),
                path.display(),
                rows.iter().filter(|r| r.oracle_min.is_some()).count(),
                disagreements
            );
        }
    }
    Ok(out)
}

pub const SWEEP_HEADER: [&str; 9] = ["M1", "M2", "M3", "N", "regime", "L_star", "L_uncoded", "oracle_min", "agree"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub m: [u64; 3],
    pub n: u64,
    pub regime: String,
    pub l_star: Load,
    pub l_uncoded: Load,
    pub oracle_min: Option<Load>,
    pub agree: Option<bool>,
}

fn ratio_cell(l: Load) -> String {
    format!("{}/{}", l.numer(), l.denom())
}

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.m[0].to_string(),
            self.m[1].to_string(),
            self.m[2].to_string(),
            self.n.to_string(),
            self.regime.clone(),
            ratio_cell(self.l_star),
            ratio_cell(self.l_uncoded),
            self.oracle_min.map(ratio_cell).unwrap_or_default(),
            self.agree.map(|a| a.to_string()).unwrap_or_default(),
        ]
    }
}

/// Sorted instances `1 <= M1 <= M2 <= M3 <= N <= n_max` with `M >= N`, in
/// lexicographic `(N, M1, M2, M3)` order.
pub fn sweep_grid(n_max: u64) -> Vec<([u64; 3], u64)> {
    let mut v = Vec::new();
    for n in 1..=n_max {
        for m1 in 1..=n {
            for m2 in m1..=n {
                for m3 in m2..=n {
                    if m1 + m2 + m3 >= n {
                        v.push(([m1, m2, m3], n));
                    }
                }
            }
        }
    }
    v
}

pub fn sweep_rows(n_max: u64, budget: u128) -> Result<Vec<SweepRow>> {
    sweep_grid(n_max)
        .into_par_iter()
        .map(|(m, n)| {
            let cfg = SystemConfig::new(m.to_vec(), n)?;
            let l_star = optimal_load(&cfg)?;
            let oracle_min = match min_load_bruteforce(&cfg, budget) {
                Ok(r) => Some(r.min),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                m,
                n,
                regime: classify_regime(&cfg)?.to_string(),
                l_star,
                l_uncoded: uncoded_load(&cfg),
                oracle_min,
                agree: oracle_min.map(|o| o == l_star),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hetcdc").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn load_worked_example() {
        let (code, out, _) = call(&["load", "--M", "6,7,7", "--N", "12"]);
        assert_eq!(code, 0);
        assert!(out.contains("regime R2"));
        assert!(out.contains("L* = 12"));
        assert!(out.contains("uncoded = 16"));
        assert!(out.contains("pooled                  12  (active)"));
    }

    #[test]
    fn unsorted_storage_notes_order() {
        let (code, out, _) = call(&["load", "--M", "7,6,7", "--N", "12"]);
        assert_eq!(code, 0);
        assert!(out.contains("nodes (2,1,3)"), "{out}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["load", "--M", "1,1,1", "--N", "12"]).0, 1);
        let (code, _, err) = call(&["load", "--M", "1,1,1", "--N", "12"]);
        assert_eq!(code, 1);
        assert!(err.contains("FeasibilityViolation"));
        assert_eq!(call(&["load", "--M", "x", "--N", "12"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn oracle_half_integer() {
        let (code, out, _) = call(&["oracle", "--M", "2,2,2", "--N", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("min = 3/2"));
        assert!(out.contains("agree = true"));
    }

    #[test]
    fn lp_k3() {
        let (code, out, _) = call(&["lp", "--K", "3", "--M", "6,7,7", "--N", "12"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["optimum"], "12");
    }

    #[test]
    fn lp_k_mismatch() {
        let (code, _, err) = call(&["lp", "--K", "4", "--M", "6,7,7", "--N", "12"]);
        assert_eq!(code, 1);
        assert!(err.contains("BadDimension"));
    }

    #[test]
    fn grid_size() {
        assert_eq!(sweep_grid(1), vec![([1, 1, 1], 1)]);
        assert!(sweep_grid(8).iter().all(|(m, n)| m[0] <= m[1] && m[1] <= m[2] && m[2] <= *n));
    }
}
