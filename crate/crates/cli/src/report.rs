//! Dispatch and report assembly.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use qpd_core::classify::classify;
use qpd_core::complex::PresentedComplex;
use qpd_core::io::{self, Document, Loaded, Overrides};
use qpd_core::qpd::{qpd_eval, QpdOptions, QpdVerdict, SearchBudget};
use qpd_core::resolution::{depth_presented, ext, resolve, ring_depth};
use qpd_core::suite::{run_suite, SuiteConfig};
use qpd_core::QpdError;

use crate::{Cli, Command, GlobalOpts, RingCommand};

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;

enum Failure {
    Input(String),
    Budget(String),
}

impl From<QpdError> for Failure {
    fn from(e: QpdError) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

struct Job<'a> {
    opts: &'a GlobalOpts,
    inputs: Vec<Value>,
}

impl Job<'_> {
    fn overrides(&self) -> Overrides {
        Overrides {
            p: self.opts.p,
            truncation: self.opts.truncation,
        }
    }

    fn load(&mut self, path: &Path) -> Result<Loaded, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        let doc: Document = io::parse_document(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.inputs.push(json!({"path": path.display().to_string(), "document": doc}));
        io::build(&doc, self.overrides()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    fn object(&mut self, path: &Path) -> Result<PresentedComplex, Failure> {
        let l = self.load(path)?;
        l.object().cloned().map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn search_budget(o: &GlobalOpts) -> Option<SearchBudget> {
    if o.no_search {
        return None;
    }
    let d = SearchBudget::default();
    Some(SearchBudget {
        max_rank: o.search_rank.map_or(d.max_rank, |v| v as usize),
        window: o.search_window.map_or(d.window, |v| v as usize),
        max_candidates: o.search_candidates.map_or(d.max_candidates, |v| v as usize),
    })
}

fn qpd_options(o: &GlobalOpts) -> QpdOptions {
    let d = QpdOptions::default();
    QpdOptions {
        hmax: o.hmax,
        trials: o.trials.map_or(d.trials, |v| v as usize),
        seed: o.seed,
        builders: true,
        search: search_budget(o),
    }
}

fn budgets(o: &GlobalOpts) -> Value {
    json!({
        "truncation": o.truncation,
        "hmax": o.hmax,
        "trials": o.trials.map_or(QpdOptions::default().trials as u64, |v| v),
        "search": search_budget(o),
        "p": o.p,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ring {
            command: RingCommand::Classify { .. },
        } => "ring classify",
        Command::Homology { .. } => "homology",
        Command::Invariants { .. } => "invariants",
        Command::Minimize { .. } => "minimize",
        Command::Resolve { .. } => "resolve",
        Command::Depth { .. } => "depth",
        Command::Ext { .. } => "ext",
        Command::Qpd { .. } => "qpd",
        Command::VerifySuite => "verify-paper-suite",
    }
}

/// Runs the job and returns the serialized report with the exit code.
pub fn run(cli: &Cli, argv: Vec<String>) -> (String, u8) {
    let start = Instant::now();
    let mut job = Job {
        opts: &cli.opts,
        inputs: Vec::new(),
    };
    let outcome = dispatch(&cli.command, &mut job);
    let mut report = Map::new();
    report.insert(
        "command".into(),
        json!({
            "name": command_name(&cli.command),
            "argv": argv,
            "inputs": job.inputs,
            "budgets": budgets(&cli.opts),
            "seed": cli.opts.seed,
        }),
    );
    report.insert(
        "engine".into(),
        json!({"name": "qpd-lab", "version": env!("CARGO_PKG_VERSION")}),
    );
    let code = match outcome {
        Ok((result, code)) => {
            let mut warnings = Vec::new();
            collect_warnings(&result, "result", &mut warnings);
            report.insert("result".into(), result);
            report.insert("warnings".into(), json!(warnings));
            code
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            report.insert("error".into(), json!({"kind": "input", "message": msg}));
            report.insert("warnings".into(), json!([]));
            EXIT_INPUT
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exhausted: {msg}");
            report.insert("error".into(), json!({"kind": "budget", "message": msg}));
            report.insert("warnings".into(), json!([format!("budget exhausted: {msg}")]));
            EXIT_BUDGET
        }
    };
    report.insert("timing".into(), json!({"elapsed_ms": start.elapsed().as_millis() as u64}));
    let v = Value::Object(report);
    let text = if cli.opts.pretty {
        serde_json::to_string_pretty(&v)
    } else {
        serde_json::to_string(&v)
    }
    .expect("reports serialize");
    (text, code)
}

fn dispatch(cmd: &Command, job: &mut Job) -> Result<(Value, u8), Failure> {
    match cmd {
        Command::Ring {
            command: RingCommand::Classify { input },
        } => {
            let l = job.load(input)?;
            let c = classify(&l.ring)?;
            Ok((
                json!({
                    "ring": io::ring_document(&l.ring),
                    "classification": {
                        "ci": c.is_complete_intersection,
                        "hypersurface": c.is_hypersurface,
                        "burch": c.is_burch,
                        "edim": c.edim,
                        "mu": c.mu,
                        "krull_dim": c.krull_dim,
                        "artinian": c.is_artinian,
                        "conormal_free": c.conormal_free,
                    }
                }),
                EXIT_OK,
            ))
        }
        Command::Homology { input } => {
            let m = job.object(input)?;
            let c = m.expand_natural()?;
            let h = c.homology();
            let modules: Vec<Value> = h
                .indices()
                .map(|n| {
                    let g = h.get(n).unwrap();
                    json!({
                        "index": n,
                        "lo": g.lo(),
                        "hi": g.hi(),
                        "complete": g.is_complete(),
                        "dims": g.dims(),
                        "total": g.total_dim(),
                    })
                })
                .collect();
            Ok((json!({"homology": modules, "invariants": c.invariants()}), EXIT_OK))
        }
        Command::Invariants { input } => {
            let m = job.object(input)?;
            let c = m.expand_natural()?;
            Ok((json!({"invariants": c.invariants()}), EXIT_OK))
        }
        Command::Minimize { input } => {
            let m = job.object(input)?;
            let f = m
                .to_free()
                .ok_or_else(|| Failure::Input("minimize needs a complex of free modules".into()))?;
            let min = f.minimalize();
            Ok((
                json!({
                    "minimal": min.is_minimal(),
                    "ranks_before": f.ranks(),
                    "ranks_after": min.ranks(),
                    "document": io::complex_document(&PresentedComplex::from_free(&min)),
                }),
                EXIT_OK,
            ))
        }
        Command::Resolve { input } => {
            let m = job.object(input)?;
            let r = resolve(&m, job.opts.hmax, true)?;
            Ok((io::resolution_json(&r), EXIT_OK))
        }
        Command::Depth { input } => {
            let l = job.load(input)?;
            let d = match &l.object {
                Some(m) => depth_presented(m)?,
                None => ring_depth(&l.ring)?,
            };
            Ok((json!({"depth": d}), EXIT_OK))
        }
        Command::Ext { a, b } => {
            let ma = job.object(a)?;
            let mb = job.object(b)?;
            if ma.ring() != mb.ring() {
                return Err(Failure::Input("the two documents are over different rings".into()));
            }
            let groups = ext(&ma, &mb.expand_natural()?, job.opts.hmax.unwrap_or(3))?;
            Ok((json!({"ext": groups}), EXIT_OK))
        }
        Command::Qpd { input } => {
            let m = job.object(input)?;
            let v = qpd_eval(&m, &qpd_options(job.opts))?;
            let code = match v {
                QpdVerdict::NotFoundWithinBounds { .. } => EXIT_BUDGET,
                _ => EXIT_OK,
            };
            Ok((json!({"qpd": io::verdict_json(&v)}), code))
        }
        Command::VerifySuite => {
            let d = SuiteConfig::default();
            let cfg = SuiteConfig {
                p: job.opts.p.unwrap_or(d.p),
                seed: job.opts.seed,
                trials: job.opts.trials.map_or(d.trials, |v| v as usize),
                search: search_budget(job.opts),
            };
            let rep = run_suite(&cfg);
            for i in &rep.items {
                eprintln!("{:<21} {:<20} {}", i.status.label(), i.id, i.title);
            }
            let code = if rep.all_ok() { EXIT_OK } else { EXIT_BUDGET };
            Ok((serde_json::to_value(&rep).expect("suite reports serialize"), code))
        }
    }
}

/// Every undecided, bounded-below or not-found value in the result.
fn collect_warnings(v: &Value, path: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(o) => {
            match o.get("verdict").and_then(Value::as_str) {
                Some("at_least") => out.push(format!("{path}: only a lower bound ({})", o["value"])),
                Some("not_found_within_bounds") => out.push(format!("{path}: not found within bounds")),
                Some("upper_bound") => out.push(format!("{path}: only an upper bound ({})", o["value"])),
                _ => {}
            }
            for (k, flag) in [("complete", false), ("all_strands_known", false), ("truncated", true)] {
                if o.get(k).and_then(Value::as_bool) == Some(flag) {
                    out.push(format!("{path}.{k} = {flag}"));
                }
            }
            for (k, x) in o {
                if k == "document" || k == "ring" {
                    continue;
                }
                if x.as_str() == Some("unknown") {
                    out.push(format!("{path}.{k}: unknown"));
                }
                collect_warnings(x, &format!("{path}.{k}"), out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                collect_warnings(x, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}
