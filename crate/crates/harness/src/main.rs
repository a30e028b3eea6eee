use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use biasrank::charsum::{bias, Domain};
use biasrank::sumset::{bogolyubov_search, rep_counts};
use biasrank::{Budget, Error, Polynomial, PrimeModulus, QuadFamily, QuadraticPoly, Result, Scalar, Subspace};
use biasrank_harness::checks::Mutation;
use biasrank_harness::extract::{derivative_extract, DEFAULT_CAP};
use biasrank_harness::generate::{random_subset, random_subspace, structured_quartic, HARNESS_BUDGET};
use biasrank_harness::oracle::bounded_schmidt_rank;
use biasrank_harness::pipeline::{implication_check, pipeline, PipelineConfig, PipelineStatus};
use biasrank_harness::report::{CheckReport, Report};
use biasrank_harness::suite::{check_names, exit_code, run_suite, SuiteConfig};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde_json::json;

/// Exact bias, rank and quadratic-family computations over small prime
/// fields, and the verification suite.
#[derive(Parser, Debug)]
#[command(name = "biasrank", version)]
struct Cli {
    /// Field size.
    #[arg(long, global = true, default_value_t = 5)]
    p: u32,
    /// Number of variables.
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration budget.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact bias of a polynomial, with an optional test of bias^2 = p^-m.
    Bias {
        poly: String,
        #[arg(long)]
        m: Option<u32>,
        /// Basis rows of a subspace to sum over, e.g. "1,0,0;0,1,1".
        #[arg(long)]
        subspace: Option<String>,
    },
    /// Schmidt rank: exact certificate for quadratics, bounded search otherwise.
    Rank {
        poly: String,
        #[arg(long, default_value_t = 2)]
        cap: usize,
    },
    /// Iterated discrete derivative along the given directions.
    Derive {
        poly: String,
        /// Direction such as "1,0,2"; repeat for more.
        #[arg(long = "h", required = true)]
        h: Vec<String>,
    },
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Common zeros of a quadratic family.
    Zeroset {
        #[arg(long = "quad", required = true)]
        quads: Vec<String>,
        #[arg(long)]
        subspace: Option<String>,
        /// Print the points.
        #[arg(long)]
        show: bool,
    },
    /// Admissible-tuple density for a seeded set and subspace.
    Admissible {
        #[arg(long = "quad")]
        quads: Vec<String>,
        /// Density of the seeded set of shifts.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Codimension of the seeded direction subspace.
        #[arg(long, default_value_t = 0)]
        codim: usize,
    },
    #[command(subcommand)]
    Sumset(SumsetCmd),
    /// Quadratic pool read off the cubic parts of first derivatives.
    Extract {
        poly: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        subspace: Option<String>,
    },
    /// Test that the family's common zeros kill the fourth derivative.
    CheckImplication {
        poly: String,
        #[arg(long = "quad")]
        quads: Vec<String>,
        #[arg(long)]
        subspace: Option<String>,
    },
    /// Quartic to regular quadratic family, verified exhaustively.
    Pipeline {
        /// Quartic to process; omit with --structured.
        poly: Option<String>,
        /// Use a seeded sum of k products of quadratics instead.
        #[arg(long)]
        structured: Option<usize>,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        subspace: Option<String>,
    },
    /// Run the verification suite.
    Verify {
        /// Comma-separated check names; default all.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Inject a broken formula to test the suite itself.
        #[arg(long)]
        mutation: Option<String>,
        /// JSON suite configuration; overrides the other flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the check names and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand, Debug)]
enum FamilyCmd {
    /// Regularity of a family, failing if below --r.
    Check {
        #[arg(long = "quad", required = true)]
        quads: Vec<String>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        subspace: Option<String>,
    },
    /// Eliminate low-rank combinations until the family is r-regular.
    Regularize {
        #[arg(long = "quad", required = true)]
        quads: Vec<String>,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        subspace: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum SumsetCmd {
    /// Representation counts in bE - bE for a seeded set.
    Reps {
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        b: usize,
    },
    /// Search for a subspace inside bE - bE for a seeded set.
    Bogolyubov {
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 3)]
        max_b: usize,
        #[arg(long, default_value_t = 3)]
        max_codim: usize,
    },
}

struct Env {
    p: PrimeModulus,
    n: usize,
    seed: u64,
    budget: Budget,
}

impl Env {
    fn poly(&self, text: &str) -> Result<Polynomial> {
        Polynomial::parse(self.p, self.n, text)
    }

    fn quads(&self, texts: &[String]) -> Result<Vec<QuadraticPoly>> {
        texts.iter().map(|t| QuadraticPoly::from_polynomial(&self.poly(t)?)).collect()
    }

    fn subspace(&self, text: Option<&str>) -> Result<Subspace> {
        match text {
            None => Ok(Subspace::full(self.p, self.n)),
            Some("") => Ok(Subspace::zero(self.p, self.n)),
            Some(t) => {
                let rows = t.split(';').map(|r| self.point(r)).collect::<Result<Vec<_>>>()?;
                Subspace::span(self.p, self.n, rows)
            }
        }
    }

    fn point(&self, text: &str) -> Result<Vec<Scalar>> {
        let coords = text
            .split(',')
            .map(|c| c.trim().parse::<i64>().map(|v| v.rem_euclid(self.p.get() as i64) as Scalar))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Usage(format!("bad vector {text:?}: {e}")))?;
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: coords.len() });
        }
        Ok(coords)
    }

    fn family(&self, quads: &[String], subspace: Option<&str>) -> Result<QuadFamily> {
        QuadFamily::new(self.quads(quads)?, self.subspace(subspace)?)
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let env = Env {
        p: PrimeModulus::new(cli.p)?,
        n: cli.n,
        seed: cli.seed,
        budget: cli.budget.map(Budget).unwrap_or(HARNESS_BUDGET),
    };
    let config = json!({ "p": cli.p, "n": cli.n, "seed": cli.seed, "budget": env.budget.0, "command": format!("{:?}", cli.cmd) });
    let single = |r: CheckReport| Ok(Report::new(&config, vec![r]));
    match &cli.cmd {
        Cmd::Bias { poly, m, subspace } => {
            let f = env.poly(poly)?;
            let v = env.subspace(subspace.as_deref())?;
            let b = bias(&f, Domain::Subspace(&v), env.budget)?;
            let mut r = CheckReport::new("bias").param("poly", f.to_string());
            r.metric("bias", b.value);
            r.metric("counts", &b.counts.counts);
            r.metric("power_class", b.counts.power_class());
            r.summary = format!("bias {:.6} ({:?})", b.value, b.counts.power_class());
            if let Some(m) = m {
                let holds = b.counts.bias_is_power(*m);
                r.metric("exact_power_check", json!({ "m": m, "holds": holds }));
                if !holds {
                    r.fail(json!({ "m": m, "counts": b.counts.counts }));
                }
            }
            single(r)
        }
        Cmd::Rank { poly, cap } => {
            let f = env.poly(poly)?;
            let mut r = CheckReport::new("rank").param("poly", f.to_string()).param("cap", cap);
            if f.degree() <= 2 {
                let q = QuadraticPoly::from_polynomial(&f)?;
                let cert = q.schmidt_rank();
                r.summary = format!("rank {} (gram rank {}, {:?})", cert.schmidt_rank, cert.gram_rank, cert.witt);
                r.metric("certificate", &cert);
            } else {
                let probe = bounded_schmidt_rank(&f, *cap, env.budget)?;
                r.summary = format!("{:?}", probe.result);
                r.metric("result", probe.result);
                r.metric("searched", probe.searched);
                let parts: Vec<_> = probe.decomposition.iter().map(|(g, h)| [g.to_string(), h.to_string()]).collect();
                r.metric("decomposition", parts);
            }
            single(r)
        }
        Cmd::Derive { poly, h } => {
            let f = env.poly(poly)?;
            let hs = h.iter().map(|t| env.point(t)).collect::<Result<Vec<_>>>()?;
            let d = f.iterated_derivative(&hs)?;
            let mut r = CheckReport::new("derive").param("poly", f.to_string()).param("directions", &hs);
            r.metric("derivative", d.to_string());
            r.metric("degree", d.degree());
            r.summary = d.to_string();
            single(r)
        }
        Cmd::Family(FamilyCmd::Check { quads, r: target, subspace }) => {
            let fam = env.family(quads, subspace.as_deref())?;
            let reg = fam.regularity(env.budget)?;
            let mut r = CheckReport::new("family-check").param("quads", quads);
            r.metric("regularity", reg.rank);
            r.metric("witness", &reg.witness);
            r.summary = format!("regularity {}", reg.rank);
            if let Some(t) = target {
                if reg.rank < *t {
                    r.fail(json!({ "combination": reg.witness, "rank": reg.rank }));
                }
            }
            single(r)
        }
        Cmd::Family(FamilyCmd::Regularize { quads, r: target, subspace }) => {
            let fam = env.family(quads, subspace.as_deref())?;
            let out = fam.regularize(*target, env.budget)?;
            let mut r = CheckReport::new("family-regularize").param("quads", quads).param("r", target);
            let kept: Vec<String> = out.family.quads().iter().map(|q| q.to_polynomial().to_string()).collect();
            r.metric("kept", &out.kept);
            r.metric("family", &kept);
            r.metric("steps", &out.steps);
            r.metric("subspace", out.family.ambient().to_json());
            r.metric("regularity", out.regularity.rank);
            r.summary = format!(
                "{} kept, codim {}, regularity {}",
                kept.len(),
                out.family.ambient().codim(),
                out.regularity.rank
            );
            single(r)
        }
        Cmd::Zeroset { quads, subspace, show } => {
            let fam = env.family(quads, subspace.as_deref())?;
            let zs = fam.zero_set(env.budget)?;
            let mut r = CheckReport::new("zeroset").param("quads", quads);
            r.metric("size", zs.len());
            if *show {
                r.metric("points", zs.points());
            }
            r.summary = format!("{} common zeros", zs.len());
            single(r)
        }
        Cmd::Admissible { quads, density, codim } => {
            let fam = env.family(quads, None)?;
            let mut rng = SplitMix64::seed_from_u64(env.seed);
            let fset = random_subset(&mut rng, env.p, env.n, *density)?;
            let w = random_subspace(&mut rng, env.p, env.n, *codim)?;
            let d = fam.admissible_density(&fset, &w, env.budget)?;
            let mut r =
                CheckReport::new("admissible").param("quads", quads).param("density", density).param("codim", codim);
            r.metric("result", &d);
            r.summary = format!("density {} against bound {}", d.density, d.bound);
            if !d.holds {
                r.fail(json!({ "density": d.density.to_string(), "bound": d.bound.to_string() }));
            }
            single(r)
        }
        Cmd::Sumset(SumsetCmd::Reps { density, b }) => {
            let mut rng = SplitMix64::seed_from_u64(env.seed);
            let e = random_subset(&mut rng, env.p, env.n, *density)?;
            let reps = rep_counts(&e, *b, env.budget)?;
            let mut r = CheckReport::new("sumset-reps").param("density", density).param("b", b);
            let covered = reps.counts.iter().filter(|&&c| c > 0).count();
            r.metric("set", e.to_hex());
            r.metric("counts", &reps.counts);
            r.summary = format!("{covered} of {} elements represented, total {}", reps.counts.len(), reps.total());
            single(r)
        }
        Cmd::Sumset(SumsetCmd::Bogolyubov { density, max_b, max_codim }) => {
            let mut rng = SplitMix64::seed_from_u64(env.seed);
            let e = random_subset(&mut rng, env.p, env.n, *density)?;
            let mut r = CheckReport::new("sumset-bogolyubov").param("density", density).param("max_b", max_b);
            r.metric("set", e.to_hex());
            match bogolyubov_search(&e, *max_b, *max_codim, env.budget)? {
                Some(found) => {
                    r.summary = format!("b = {}, codim {}, min reps {}", found.b, found.codim, found.min_reps);
                    r.metric("result", &found);
                }
                None => r.fail(json!({ "found": null })),
            }
            if r.summary.is_empty() {
                r.summary = "no subspace found".into();
            }
            single(r)
        }
        Cmd::Extract { poly, cap, subspace } => {
            let f = env.poly(poly)?;
            let v = env.subspace(subspace.as_deref())?;
            let out = derivative_extract(&f, &v, *cap, env.seed, env.budget)?;
            let mut r = CheckReport::new("extract").param("poly", f.to_string()).param("cap", cap);
            let pool: Vec<String> = out.pool.iter().map(|q| q.to_polynomial().to_string()).collect();
            r.summary = if out.no_presentation {
                "no presentation found under cap".into()
            } else {
                format!("pool of {} from {} directions", pool.len(), out.directions)
            };
            r.metric("pool", pool);
            r.metric("trivial", out.trivial);
            r.metric("no_presentation", out.no_presentation);
            single(r)
        }
        Cmd::CheckImplication { poly, quads, subspace } => {
            let f = env.poly(poly)?;
            let fam = env.family(quads, subspace.as_deref())?;
            let out = implication_check(&f, &fam, env.budget)?;
            let mut r = CheckReport::new("check-implication").param("poly", f.to_string()).param("quads", quads);
            r.metric("checked", out.checked);
            r.metric("zeros", out.zeros);
            r.summary = format!("{} common zeros among {} points", out.zeros, out.checked);
            if let Some(x) = out.witness {
                r.fail(json!({ "x": x }));
            }
            single(r)
        }
        Cmd::Pipeline { poly, structured, r: target, cap, subspace } => {
            let f = match (poly, structured) {
                (Some(t), None) => env.poly(t)?,
                (None, Some(k)) => structured_quartic(&mut SplitMix64::seed_from_u64(env.seed), env.p, env.n, *k)?.f,
                _ => return Err(Error::Usage("give either a polynomial or --structured k".into())),
            };
            let v = env.subspace(subspace.as_deref())?;
            let cfg = PipelineConfig { r: *target, cap: *cap, seed: env.seed, ..PipelineConfig::default() };
            let out = pipeline(&f, &v, cfg, env.budget)?;
            let mut r = CheckReport::new("pipeline").param("poly", f.to_string()).param("r", target).param("cap", cap);
            let family: Vec<String> = out.family.quads().iter().map(|q| q.to_polynomial().to_string()).collect();
            r.metric("family", &family);
            r.metric("subspace", out.family.ambient().to_json());
            r.metric("N", out.family_size);
            r.metric("codim", out.codim);
            r.metric("zero_set_size", out.zero_set_size);
            r.metric("pool_size", out.pool_size);
            r.metric("regularity", out.regularity);
            r.summary =
                format!("{:?}: N = {}, codim {}, |X| = {}", out.status, out.family_size, out.codim, out.zero_set_size);
            if out.status != PipelineStatus::Pass {
                r.fail(json!({ "status": out.status, "witness": out.implication.witness }));
            }
            single(r)
        }
        Cmd::Verify { checks, mutation, config: path, list } => {
            if *list {
                let mut r = CheckReport::new("list");
                r.summary = check_names().join(", ");
                return single(r);
            }
            let cfg = match path {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?
                }
                None => {
                    let mutation = mutation
                        .as_deref()
                        .map(|m| {
                            serde_json::from_value::<Mutation>(json!(m))
                                .map_err(|e| Error::Usage(format!("mutation {m:?}: {e}")))
                        })
                        .transpose()?;
                    SuiteConfig { checks: checks.clone(), seed: env.seed, mutation, budget: env.budget.0 }
                }
            };
            run_suite(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Some(path) = &cli.report {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            let mut out = String::new();
            match cli.format {
                Format::Json => out.push_str(&format!("{json}\n")),
                Format::Text => {
                    out.push_str(&report.to_text());
                    if !matches!(cli.cmd, Cmd::Verify { .. }) {
                        for c in &report.checks {
                            for (k, v) in &c.metrics {
                                out.push_str(&format!("    {k} = {v}\n"));
                            }
                        }
                    }
                }
            }
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::from(exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
