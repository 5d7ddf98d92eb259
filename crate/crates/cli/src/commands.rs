use std::path::Path;

use mnbound_core::analysis::{
    compare, parse_bound_function, simulate_coverage, verify_validity, BoundFunction, ComparisonResult,
    DirichletPrior, Metric, Relation, ValidityMethod, ValidityReport, ValidityVerdict,
};
use mnbound_core::bounds::{
    admissible_cap_required, classify_table, enumerate_admissible_cached, parse_ordering, solve_members,
    solve_position, standard_ordering, AdmissibilityReport, BoundEntry, BoundTable, Ordering, OrderingKind,
    SolveCache,
};
use mnbound_core::lattice::{enumerate_sample_space, normalize_support, sample_to_counts, SampleSpace};
use mnbound_core::likelihood::{build_subset_likelihood, contour_grid, grid_size, Distribution};
use mnbound_core::solver::{grid_oracle, CentralProblem, SolverConfig};
use mnbound_core::Error as CoreError;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{parse_indices, parse_reals, OutputFormat, RunConfig};
use crate::error::{CliError, CliResult};
use crate::format::{join_nums, num, nums, text, Tabular};
use crate::{Command, MetricArg, Source};

/// A command's result in every rendering.
struct Output {
    json: Value,
    tabular: Tabular,
    /// Extra lines shown after the table rendering.
    footer: Vec<String>,
}

impl Output {
    fn render(self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).unwrap_or_default();
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.tabular.to_csv(),
            OutputFormat::Table => {
                let mut s = self.tabular.to_table();
                for line in self.footer {
                    s.push_str(&line);
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub fn dispatch(cmd: Command) -> CliResult<String> {
    let (common, order) = match &cmd {
        Command::Lattice { common } | Command::Enumerate { common, .. } | Command::Contour { common, .. } => {
            (common, None)
        }
        Command::Bound { common, order, .. } => (common, order.as_deref()),
        Command::Verify { common, source, .. } | Command::Coverage { common, source, .. } => {
            (common, source.order.as_deref())
        }
        Command::Compare { common, .. } => (common, None),
    };
    let run = RunConfig::resolve(common, order)?;
    let default_format = match cmd {
        Command::Contour { .. } => OutputFormat::Csv,
        _ => OutputFormat::Json,
    };
    let format = run.output.unwrap_or(default_format);
    let out = with_threads(run.threads, || {
        let space = build_space(&run)?;
        let ctx = Ctx { run: &run, space };
        match cmd {
            Command::Lattice { .. } => Ok(ctx.lattice()),
            Command::Bound {
                check_oracle,
                oracle_tol,
                ..
            } => ctx.bound(check_oracle, oracle_tol),
            Command::Verify {
                source,
                resolution,
                grid_only,
                ..
            } => ctx.verify(&source, resolution, !grid_only),
            Command::Coverage {
                source, dist, trials, ..
            } => ctx.coverage(&source, &dist, trials),
            Command::Compare {
                a,
                b,
                metric,
                concentration,
                draws,
                ..
            } => ctx.compare(&a, &b, metric, &concentration, draws),
            Command::Enumerate { cap, .. } => ctx.enumerate(cap),
            Command::Contour {
                members,
                samples,
                resolution,
                ..
            } => ctx.contour(members.as_deref(), samples.as_deref(), resolution),
        }
    })?;
    Ok(out.render(format))
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::invalid(format!("cannot start {t} threads: {e}")))?
            .install(f),
        None => f(),
    }
}

fn build_space(run: &RunConfig) -> CliResult<SampleSpace> {
    let support = normalize_support(&run.support)?;
    Ok(enumerate_sample_space(&support, run.n)?)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

fn check_grid(space: &SampleSpace, d: u32, config: &SolverConfig) -> CliResult<()> {
    if d == 0 {
        return Err(CliError::invalid("grid resolution must be at least 1"));
    }
    let cells = grid_size(space.support().len(), d);
    if cells > u128::from(config.grid_cap) {
        return Err(CoreError::CapExceeded {
            required: cells,
            cap: u128::from(config.grid_cap),
        }
        .into());
    }
    Ok(())
}

/// A bound function to be computed or read, checked before any solving.
enum BoundSpec {
    Order(Ordering),
    File(BoundFunction),
}

struct Ctx<'a> {
    run: &'a RunConfig,
    space: SampleSpace,
}

impl Ctx<'_> {
    /// Offset added to every reported mean or bound.
    fn shift(&self) -> f64 {
        if self.run.raw {
            0.0
        } else {
            self.space.support().shift()
        }
    }

    fn out(&self, v: f64) -> f64 {
        v + self.shift()
    }

    fn outs(&self, vs: &[f64]) -> Vec<f64> {
        vs.iter().map(|&v| self.out(v)).collect()
    }

    fn support_out(&self) -> Vec<f64> {
        if self.run.raw {
            self.space.support().values().to_vec()
        } else {
            self.space.support().raw().to_vec()
        }
    }

    fn sample_text(&self, i: usize) -> String {
        let s = self.space.sample(i).sorted_values(self.space.support());
        let s: Vec<f64> = s.iter().map(|v| v - self.space.support().shift() + self.shift()).collect();
        join_nums(&s, " ")
    }

    fn counts_json(&self, i: usize) -> Value {
        json!(self.space.sample(i).counts())
    }

    fn ordering(&self, spec: &str) -> CliResult<Ordering> {
        let sp = &self.space;
        let o = match spec {
            "lex" => standard_ordering(sp, &OrderingKind::Lexicographic)?,
            "mean" => standard_ordering(sp, &OrderingKind::SampleMean)?,
            _ => {
                if let Some(path) = spec.strip_prefix("file:") {
                    parse_ordering(&read(Path::new(path))?, sp, path)?
                } else if let Some(list) = spec.strip_prefix("perm:") {
                    parse_ordering(list, sp, "perm")?
                } else {
                    return Err(CliError::invalid(format!(
                        "unknown order {spec:?}; expected lex, mean, file:PATH or perm:LIST"
                    )));
                }
            }
        };
        Ok(o)
    }

    fn bound_file(&self, path: &Path) -> CliResult<BoundFunction> {
        let f = parse_bound_function(&read(path)?, self.space.len(), &path.display().to_string())?;
        let shift = self.shift();
        let values: Vec<f64> = f.values().iter().map(|&v| v - shift).collect();
        Ok(BoundFunction::new(values, f.provenance())?)
    }

    fn bound_spec(&self, spec: &str) -> CliResult<BoundSpec> {
        match spec.strip_prefix("bounds:") {
            Some(path) => Ok(BoundSpec::File(self.bound_file(Path::new(path))?)),
            None => Ok(BoundSpec::Order(self.ordering(spec)?)),
        }
    }

    fn source_spec(&self, source: &Source) -> CliResult<BoundSpec> {
        match &source.bounds {
            Some(path) => Ok(BoundSpec::File(self.bound_file(path)?)),
            None => Ok(BoundSpec::Order(self.ordering(&self.run.order)?)),
        }
    }

    fn needs_alpha(&self, specs: &[&BoundSpec]) -> CliResult<()> {
        if specs.iter().any(|s| matches!(s, BoundSpec::Order(_))) {
            self.run.alpha()?;
        }
        Ok(())
    }

    fn realize(&self, spec: BoundSpec) -> CliResult<BoundFunction> {
        match spec {
            BoundSpec::File(f) => Ok(f),
            BoundSpec::Order(o) => {
                let t = self.table(&o, self.run.alpha()?)?;
                let mut f = BoundFunction::from_table(&t);
                if f.provenance().is_empty() {
                    f = BoundFunction::new(f.values().to_vec(), o.label())?;
                }
                Ok(f)
            }
        }
    }

    /// All positions solved concurrently, assembled in position order.
    fn table(&self, ordering: &Ordering, alpha: f64) -> CliResult<BoundTable> {
        let solver = &self.run.solver;
        let results: Vec<_> = (0..ordering.len())
            .into_par_iter()
            .map(|k| solve_position(&self.space, ordering, k, alpha, solver))
            .collect();
        let entries = results.into_iter().collect::<Result<Vec<BoundEntry>, _>>()?;
        Ok(BoundTable::from_entries(ordering.clone(), alpha, entries)?)
    }

    fn table_json(&self, table: &BoundTable, report: &AdmissibilityReport) -> Value {
        let entries: Vec<Value> = table
            .entries
            .iter()
            .map(|e| {
                json!({
                    "sample": self.counts_json(e.sample),
                    "bound": num(self.out(e.bound)),
                    "argmin": e.argmin.as_ref().map(|a| nums(a.probs())),
                    "on_boundary": e.on_boundary,
                })
            })
            .collect();
        json!({
            "alpha": num(table.alpha),
            "ordering": table.ordering.perm(),
            "entries": entries,
            "report": self.report_json(report),
        })
    }

    fn report_json(&self, r: &AdmissibilityReport) -> Value {
        json!({
            "injective": r.injective,
            "degenerate": r.degenerate,
            "tie_clusters": r.tie_clusters.iter().map(|c| json!({"start": c.start, "end": c.end})).collect::<Vec<_>>(),
            "breakability": r.breakability.iter().map(|p| json!({
                "position": p.position,
                "verdict": p.verdict.to_string(),
                "swapped_bound": p.swapped_bound.map(|b| num(self.out(b))),
            })).collect::<Vec<_>>(),
            "verdict": r.verdict.to_string(),
        })
    }

    fn table_rows(&self, table: &BoundTable) -> Tabular {
        let mut t = Tabular::new(&["position", "index", "sample", "bound", "on_boundary", "argmin"]);
        for (k, e) in table.entries.iter().enumerate() {
            t.push(vec![
                k.to_string(),
                e.sample.to_string(),
                self.sample_text(e.sample),
                text(self.out(e.bound)),
                e.on_boundary.to_string(),
                e.argmin.as_ref().map_or_else(|| "-".into(), |a| join_nums(a.probs(), " ")),
            ]);
        }
        t
    }

    fn lattice(&self) -> Output {
        let sp = &self.space;
        let samples: Vec<Value> = (0..sp.len()).map(|i| self.counts_json(i)).collect();
        let json = json!({
            "support": nums(&self.support_out()),
            "shift": num(sp.support().shift()),
            "n": sp.n(),
            "samples": samples,
        });
        let mut t = Tabular::new(&["index", "counts", "sample", "mean"]);
        for i in 0..sp.len() {
            let counts: Vec<String> = sp.sample(i).counts().iter().map(u32::to_string).collect();
            t.push(vec![
                i.to_string(),
                counts.join(" "),
                self.sample_text(i),
                text(self.out(sp.sample_mean(i))),
            ]);
        }
        Output {
            json,
            tabular: t,
            footer: Vec::new(),
        }
    }

    fn bound(&self, check_oracle: Option<u32>, oracle_tol: Option<f64>) -> CliResult<Output> {
        let alpha = self.run.alpha()?;
        let ordering = self.ordering(&self.run.order)?;
        let solver = &self.run.solver;
        let m = self.space.support().len();
        if let Some(d) = check_oracle {
            if m > 5 {
                return Err(CliError::invalid(format!(
                    "the grid oracle supports at most 5 support values, got {m}"
                )));
            }
            check_grid(&self.space, d, solver)?;
        }
        if let Some(tol) = oracle_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::invalid("oracle tolerance must be positive and finite"));
            }
        }

        let table = self.table(&ordering, alpha)?;
        let report = classify_table(&self.space, &table, solver);
        let mut json = self.table_json(&table, &report);
        json["shift"] = num(self.shift());

        if let Some(d) = check_oracle {
            let tol = oracle_tol.unwrap_or(m as f64 * self.space.support().max() / f64::from(d));
            let grids: Vec<_> = (0..ordering.len())
                .into_par_iter()
                .map(|k| {
                    let problem = CentralProblem::new(&self.space, &ordering.upper_set(k), alpha)?;
                    grid_oracle(&problem, d, solver).map(|r| r.bound)
                })
                .collect();
            let grids = grids.into_iter().collect::<Result<Vec<f64>, _>>()?;
            let mut bad = Vec::new();
            for (k, (&g, e)) in grids.iter().zip(&table.entries).enumerate() {
                let s = e.bound;
                let ok = if g.is_infinite() || s.is_infinite() {
                    g == s
                } else {
                    (g - s).abs() <= tol
                };
                if !ok {
                    bad.push(format!("position {k}: solver {} vs grid {}", text(self.out(s)), text(self.out(g))));
                }
            }
            if !bad.is_empty() {
                return Err(CliError::OracleMismatch(format!(
                    "{} (tolerance {}, d={d})",
                    bad.join("; "),
                    text(tol)
                )));
            }
            json["oracle"] = json!({
                "resolution": d,
                "tolerance": num(tol),
                "bounds": nums(&self.outs(&grids)),
            });
        }

        Ok(Output {
            json,
            tabular: self.table_rows(&table),
            footer: vec![
                String::new(),
                format!("ordering: {}", ordering.describe()),
                format!("degenerate: {}", report.degenerate),
                format!("verdict: {}", report.verdict),
            ],
        })
    }

    fn verify(&self, source: &Source, resolution: u32, refine: bool) -> CliResult<Output> {
        let alpha = self.run.alpha()?;
        let spec = self.source_spec(source)?;
        check_grid(&self.space, resolution, &self.run.solver)?;
        let bound = self.realize(spec)?;
        let rep = verify_validity(&self.space, &bound, alpha, resolution, refine, &self.run.solver)?;
        let json = self.validity_json(&bound, &rep);
        let mut t = Tabular::new(&["threshold", "mean_cap", "max_error_prob", "witness"]);
        for c in &rep.checks {
            t.push(vec![
                text(self.out(c.value)),
                text(self.out(c.mean_cap)),
                text(c.max_error_prob),
                join_nums(c.witness.probs(), " "),
            ]);
        }
        Ok(Output {
            json,
            tabular: t,
            footer: vec![
                String::new(),
                format!("max error probability: {}", text(rep.max_error_prob)),
                format!("verdict: {}", validity_verdict(rep.verdict)),
            ],
        })
    }

    fn validity_json(&self, bound: &BoundFunction, rep: &ValidityReport) -> Value {
        let checks: Vec<Value> = rep
            .checks
            .iter()
            .map(|c| {
                json!({
                    "value": num(self.out(c.value)),
                    "mean_cap": num(self.out(c.mean_cap)),
                    "max_error_prob": num(c.max_error_prob),
                    "witness": nums(c.witness.probs()),
                })
            })
            .collect();
        json!({
            "bound": bound.provenance(),
            "bounds": nums(&self.outs(bound.values())),
            "alpha": num(rep.alpha),
            "max_error_prob": num(rep.max_error_prob),
            "witness": nums(rep.witness.probs()),
            "method": match rep.method {
                ValidityMethod::Grid => "grid",
                ValidityMethod::Refined => "refined",
            },
            "resolution": rep.resolution,
            "grid_slack": num(rep.grid_slack),
            "verdict": validity_verdict(rep.verdict),
            "checks": checks,
        })
    }

    fn coverage(&self, source: &Source, dist: &str, trials: u64) -> CliResult<Output> {
        let spec = self.source_spec(source)?;
        self.needs_alpha(&[&spec])?;
        let dist = Distribution::new(parse_reals(dist, "dist")?)?;
        if dist.len() != self.space.support().len() {
            return Err(CliError::invalid(format!(
                "dist has {} entries but the support has {}",
                dist.len(),
                self.space.support().len()
            )));
        }
        if trials == 0 {
            return Err(CliError::invalid("at least one trial is required"));
        }
        let bound = self.realize(spec)?;
        let r = simulate_coverage(&self.space, &bound, &dist, trials, self.run.seed)?;
        let json = json!({
            "bound": bound.provenance(),
            "dist": nums(dist.probs()),
            "seed": self.run.seed,
            "trials": r.trials,
            "errors": r.errors,
            "rate": num(r.rate),
            "standard_error": num(r.standard_error),
            "mean": num(self.out(r.mean)),
        });
        let tabular = Tabular::fields(vec![
            ("trials", r.trials.to_string()),
            ("errors", r.errors.to_string()),
            ("rate", text(r.rate)),
            ("standard_error", text(r.standard_error)),
            ("mean", text(self.out(r.mean))),
        ]);
        Ok(Output {
            json,
            tabular,
            footer: Vec::new(),
        })
    }

    fn compare(&self, a: &str, b: &str, metric: MetricArg, concentration: &str, draws: u64) -> CliResult<Output> {
        let (sa, sb) = (self.bound_spec(a)?, self.bound_spec(b)?);
        self.needs_alpha(&[&sa, &sb])?;
        let m = self.space.support().len();
        let metric = match metric {
            MetricArg::SampleAligned => Metric::SampleAligned,
            MetricArg::RankOrdered => Metric::RankOrdered,
            MetricArg::ExpectedValue => Metric::ExpectedValue,
        };
        let prior = if metric == Metric::ExpectedValue {
            let c = parse_reals(concentration, "concentration")?;
            let c = match c.len() {
                1 => vec![c[0]; m],
                k if k == m => c,
                k => {
                    return Err(CliError::invalid(format!(
                        "concentration needs 1 or {m} values, got {k}"
                    )))
                }
            };
            if c.iter().any(|&x| !(x.is_finite() && x >= 0.0)) || c.iter().all(|&x| x == 0.0) {
                return Err(CliError::invalid("concentrations must be non-negative and not all zero"));
            }
            if draws == 0 {
                return Err(CliError::invalid("at least one prior draw is required"));
            }
            Some(DirichletPrior {
                concentration: c,
                draws,
                seed: self.run.seed,
            })
        } else {
            None
        };
        let fa = self.realize(sa)?;
        let fb = self.realize(sb)?;
        let r = compare(&self.space, &fa, &fb, metric, prior.as_ref())?;
        Ok(self.comparison_output(&fa, &fb, &r))
    }

    fn comparison_output(&self, a: &BoundFunction, b: &BoundFunction, r: &ComparisonResult) -> Output {
        let expected = r.expected.as_ref().map(|e| {
            json!({
                "a": num(self.out(e.a)),
                "a_se": num(e.a_se),
                "b": num(self.out(e.b)),
                "b_se": num(e.b_se),
                "difference": num(e.difference),
                "difference_se": num(e.difference_se),
                "draws": e.draws,
                "a_infinite": e.a_infinite,
                "b_infinite": e.b_infinite,
                "infinite_ignored": e.infinite_ignored,
            })
        });
        let metric = match r.metric {
            Metric::SampleAligned => "sample_aligned",
            Metric::RankOrdered => "rank_ordered",
            Metric::ExpectedValue => "expected_value",
        };
        let relation = relation_name(r.relation);
        let json = json!({
            "a": a.provenance(),
            "b": b.provenance(),
            "a_bounds": nums(&self.outs(a.values())),
            "b_bounds": nums(&self.outs(b.values())),
            "metric": metric,
            "relation": relation,
            "a_witnesses": r.a_witnesses,
            "b_witnesses": r.b_witnesses,
            "expected": expected,
        });
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let mut pairs = vec![
            ("metric", metric.to_string()),
            ("relation", relation.to_string()),
            ("a_witnesses", list(&r.a_witnesses)),
            ("b_witnesses", list(&r.b_witnesses)),
        ];
        if let Some(e) = &r.expected {
            pairs.push(("expected_a", text(self.out(e.a))));
            pairs.push(("expected_b", text(self.out(e.b))));
            pairs.push(("difference", text(e.difference)));
            pairs.push(("difference_se", text(e.difference_se)));
        }
        Output {
            json,
            tabular: Tabular::fields(pairs),
            footer: Vec::new(),
        }
    }

    fn enumerate(&self, cap: u128) -> CliResult<Output> {
        let alpha = self.run.alpha()?;
        let n = self.space.len();
        let required = admissible_cap_required(n).unwrap_or(u128::MAX);
        if required > cap {
            return Err(CoreError::CapExceeded { required, cap }.into());
        }
        let solver = &self.run.solver;
        let mut cache = SolveCache::new(alpha);
        // Every upper set met during enumeration avoids the all-minimum
        // sample or contains it trivially; solve the former up front.
        if n > 1 && n - 1 <= 24 {
            let solved: Vec<_> = (1u64..(1u64 << (n - 1)))
                .into_par_iter()
                .map(|mask| {
                    let members: Vec<usize> = (1..n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                    let r = solve_members(&self.space, &members, alpha, solver);
                    (members, r)
                })
                .collect();
            for (members, r) in solved {
                if let Ok(r) = r {
                    cache.insert(members, r);
                }
            }
        }
        let e = enumerate_admissible_cached(&self.space, solver, cap, &mut cache)?;
        let admissible: Vec<Value> = e
            .admissible
            .iter()
            .map(|a| self.table_json(&a.table, &a.report))
            .collect();
        let json = json!({
            "alpha": num(alpha),
            "shift": num(self.shift()),
            "orderings": u64::try_from(e.orderings).map_or_else(|_| json!(e.orderings.to_string()), Value::from),
            "undetermined": e.undetermined,
            "admissible": admissible,
        });
        let mut t = Tabular::new(&["bound", "ordering", "by_sample"]);
        for (i, a) in e.admissible.iter().enumerate() {
            let perm: Vec<String> = a.ordering.perm().iter().map(usize::to_string).collect();
            t.push(vec![i.to_string(), perm.join(" "), join_nums(&self.outs(&a.table.by_sample()), " ")]);
        }
        Ok(Output {
            json,
            tabular: t,
            footer: vec![
                String::new(),
                format!("orderings examined: {}", e.orderings),
                format!("distinct admissible bounds: {}", e.admissible.len()),
                format!("undetermined orderings: {}", e.undetermined),
            ],
        })
    }

    fn contour(&self, members: Option<&str>, samples: Option<&str>, d: u32) -> CliResult<Output> {
        let sp = &self.space;
        let mut idx = match (members, samples) {
            (Some(list), _) => parse_indices(list, "members")?,
            (None, Some(list)) => self.parse_samples(list)?,
            (None, None) => return Err(CliError::invalid("--members or --samples is required")),
        };
        if let Some(&bad) = idx.iter().find(|&&i| i >= sp.len()) {
            return Err(CliError::invalid(format!(
                "sample index {bad} is out of range for {} samples",
                sp.len()
            )));
        }
        idx.sort_unstable();
        idx.dedup();
        check_grid(sp, d, &self.run.solver)?;
        let poly = build_subset_likelihood(sp, &idx)?;
        let rows = contour_grid(sp, &poly, d, u128::from(self.run.solver.grid_cap))?;
        let m = sp.support().len();
        let mut headers: Vec<String> = (1..=m).map(|i| format!("p_{i}")).collect();
        headers.push("likelihood".into());
        headers.push("mean".into());
        let mut t = Tabular {
            headers,
            rows: Vec::with_capacity(rows.len()),
        };
        let mut json_rows = Vec::with_capacity(rows.len());
        for r in &rows {
            let mut cells: Vec<String> = r.probs.iter().map(|&p| text(p)).collect();
            cells.push(text(r.likelihood));
            cells.push(text(self.out(r.mean)));
            t.push(cells);
            json_rows.push(json!({
                "p": nums(&r.probs),
                "likelihood": num(r.likelihood),
                "mean": num(self.out(r.mean)),
            }));
        }
        let json = json!({
            "support": nums(&self.support_out()),
            "n": sp.n(),
            "members": idx.iter().map(|&i| self.counts_json(i)).collect::<Vec<_>>(),
            "resolution": d,
            "rows": json_rows,
        });
        Ok(Output {
            json,
            tabular: t,
            footer: Vec::new(),
        })
    }

    /// Samples as value lists separated by `;`, in reported coordinates.
    fn parse_samples(&self, list: &str) -> CliResult<Vec<usize>> {
        let sp = &self.space;
        let back = sp.support().shift() - self.shift();
        list.split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                let values: Vec<f64> = parse_reals(s, "samples")?.iter().map(|v| v + back).collect();
                if values.len() != sp.n() as usize {
                    return Err(CliError::invalid(format!(
                        "sample {s:?} has {} values, expected {}",
                        values.len(),
                        sp.n()
                    )));
                }
                let counts = sample_to_counts(&values, sp.support())?;
                sp.index_of(&counts)
                    .ok_or_else(|| CliError::invalid(format!("sample {s:?} is not in the sample space")))
            })
            .collect()
    }
}

fn validity_verdict(v: ValidityVerdict) -> &'static str {
    match v {
        ValidityVerdict::Valid => "valid",
        ValidityVerdict::Invalid => "invalid",
        ValidityVerdict::Undetermined => "undetermined",
    }
}

fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::Dominates => "dominates",
        Relation::Dominated => "dominated",
        Relation::Equal => "equal",
        Relation::Incomparable => "incomparable",
    }
}
