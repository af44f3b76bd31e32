use kneadlab_core::complex::{self, Complex, Pruning};
use kneadlab_core::diagnostics::{self, DiagnosticsReport, ReportOptions};
use kneadlab_core::kneading::{self, kneading_map_from_sequence, Admissibility, KneadingSequence};
use kneadlab_core::orbit::{closest_precritical, critical_orbit, LadderOptions, PrecriticalLadder};
use kneadlab_core::precision::{self, MAX_BITS, MIN_BITS};
use kneadlab_core::solver::sign_itinerary;
use kneadlab_core::table::{num, Table, Verdict};
use kneadlab_core::{
    cutting_times, solve_parameter, CuttingTimes, KneadError, KneadingMap, PrecisionPolicy, Result,
    SolveResult, UnicriticalMap,
};
use serde_json::{json, Value};

use crate::args::{
    BandArgs, CascadeArgs, CheckArgs, Command, Common, GreenArgs, PoincareArgs, SumsArgs,
    VerifyArgs,
};
use crate::output::{verdict_table, Outcome};

/// Extra levels solved beyond the deepest one read: the last few matched
/// levels are not yet resolved by the bracket.
const SOLVE_MARGIN: usize = 6;

/// Itinerary length read off when `--c` is given without a kneading map.
const DERIVED_LEN: usize = 1 << 16;

pub struct Context {
    pub common: Common,
    pub depth: usize,
}

fn invalid(msg: impl Into<String>) -> KneadError {
    KneadError::InvalidInput(msg.into())
}

pub fn parse_rule(s: &str) -> Result<KneadingMap> {
    let s = s.trim().to_ascii_lowercase();
    let number = |rest: &str| -> Result<usize> {
        rest.trim_start_matches([':', '(', '='])
            .trim_end_matches(')')
            .parse()
            .map_err(|_| invalid(format!("cannot read the parameter of rule {s:?}")))
    };
    if s == "fibonacci" {
        Ok(KneadingMap::fibonacci())
    } else if s == "feigenbaum" {
        Ok(KneadingMap::feigenbaum())
    } else if let Some(rest) = s.strip_prefix("fibonacci-like") {
        let n = number(rest)?;
        if n == 0 {
            return Err(invalid("fibonacci-like needs n >= 1"));
        }
        Ok(KneadingMap::fibonacci_like(n))
    } else if let Some(rest) = s.strip_prefix("constant") {
        Ok(KneadingMap::constant(number(rest)?))
    } else {
        Err(invalid(format!(
            "unknown rule {s:?}; expected fibonacci, feigenbaum, constant<q> or fibonacci-like<n>"
        )))
    }
}

impl Context {
    pub fn new(common: Common, command: &Command) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&common.bits) {
            return Err(invalid(format!(
                "--bits must lie in [{MIN_BITS}, {MAX_BITS}], got {}",
                common.bits
            )));
        }
        if common.ell < 2 || !common.ell.is_multiple_of(2) {
            return Err(invalid(format!(
                "--ell must be even and >= 2, got {}",
                common.ell
            )));
        }
        if common.max_bits < common.bits || common.max_bits > MAX_BITS {
            return Err(invalid(format!(
                "--max-bits must lie in [--bits, {MAX_BITS}], got {}",
                common.max_bits
            )));
        }
        if common.max_orbit_len == 0 {
            return Err(invalid("--max-orbit-len must be positive"));
        }
        if common.depth == Some(0) {
            return Err(invalid("-K must be at least 1"));
        }
        if common.target == 0 {
            return Err(invalid("--target must be positive"));
        }
        let depth = common.depth.unwrap_or_else(|| command.default_depth());
        Ok(Context { common, depth })
    }

    /// The kneading map from `--rule` or `--map`, if either was given.
    fn given_map(&self) -> Result<Option<KneadingMap>> {
        if let Some(rule) = &self.common.rule {
            return parse_rule(rule).map(Some);
        }
        let Some(spec) = &self.common.map else {
            return Ok(None);
        };
        let text = if spec.trim_start().starts_with('{') {
            spec.clone()
        } else {
            std::fs::read_to_string(spec).map_err(|e| invalid(format!("reading {spec}: {e}")))?
        };
        KneadingMap::from_json(&text).map(Some)
    }

    fn kneading_map(&self) -> Result<KneadingMap> {
        self.given_map()?
            .ok_or_else(|| invalid("a kneading map is required: pass --rule or --map"))
    }

    fn explicit_c(&self) -> Result<Option<UnicriticalMap>> {
        self.common
            .c
            .as_deref()
            .map(|c| UnicriticalMap::from_decimal(self.common.ell, c, self.common.bits))
            .transpose()
    }

    fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy {
            start_bits: self.common.bits,
            max_bits: self.common.max_bits,
            target_bits: self.common.target,
            max_orbit_len: self.common.max_orbit_len,
        }
    }

    fn solve(&self, q: &KneadingMap, depth: usize) -> Result<SolveResult> {
        solve_parameter(self.common.ell, q, depth, &self.policy())
    }

    /// A concrete map plus its kneading map: `--c` wins (reading `Q` off the
    /// itinerary when no map was given), otherwise the parameter is solved for
    /// `depth + SOLVE_MARGIN` levels.
    fn realize(&self, depth: usize) -> Result<Realized> {
        if let Some(map) = self.explicit_c()? {
            let q = match self.given_map()? {
                Some(q) => q,
                None => derive_map(&map)?,
            };
            return Ok(Realized {
                map,
                q,
                solve: None,
            });
        }
        let q = self.kneading_map()?;
        let solved = self.solve(&q, depth + SOLVE_MARGIN)?;
        let map = solved.map(self.common.bits.max(solved.precision_used))?;
        Ok(Realized {
            map,
            q,
            solve: Some(solved),
        })
    }

    fn complex_map(&self) -> Result<UnicriticalMap> {
        match self.explicit_c()? {
            Some(m) => Ok(m),
            None => self.realize(self.depth).map(|r| r.map),
        }
    }
}

struct Realized {
    map: UnicriticalMap,
    q: KneadingMap,
    solve: Option<SolveResult>,
}

impl Realized {
    fn json(&self) -> Value {
        json!({
            "c": precision::to_decimal_digits(self.map.c(), precision::decimal_digits(self.map.bits())),
            "ell": self.map.ell(),
            "bits": self.map.bits(),
            "solve": self.solve,
        })
    }

    fn times(&self, depth: usize) -> Result<CuttingTimes> {
        cutting_times(&self.q, depth)
    }

    fn ladder(&self, times: &CuttingTimes, depth: usize) -> Result<PrecriticalLadder> {
        closest_precritical(&self.map, times, depth, LadderOptions::default())
    }
}

fn derive_map(map: &UnicriticalMap) -> Result<KneadingMap> {
    let it = sign_itinerary(map, DERIVED_LEN);
    let len = it.first_undecided().map_or(it.symbols.len(), |n| n - 1);
    let symbols = it.symbols[..len].iter().map(|s| s.unwrap_or(0)).collect();
    kneading_map_from_sequence(&KneadingSequence { symbols })
}

fn digits(bits: u32) -> usize {
    precision::decimal_digits(bits)
}

pub fn run(ctx: &Context, command: &Command) -> Result<Outcome> {
    let k = ctx.depth;
    match command {
        Command::CuttingTimes => cutting_times_cmd(ctx, k),
        Command::Check(a) => check_cmd(ctx, k, a),
        Command::Solve => solve_cmd(ctx, k),
        Command::Precrit => precrit_cmd(ctx, k),
        Command::Scaling => scaling_cmd(ctx, k),
        Command::Band(a) => band_cmd(ctx, k, a),
        Command::Sums(a) => sums_cmd(ctx, k, a),
        Command::Cascade(a) => cascade_cmd(ctx, k, a),
        Command::Poincare(a) => poincare_cmd(ctx, k, a),
        Command::Green(a) => green_cmd(ctx, a),
        Command::VerifyLemmas(a) => verify_cmd(ctx, k, a),
        Command::Report(a) => report_cmd(ctx, k, a.delta, a.sign, a.band_bound),
    }
}

fn cutting_times_cmd(ctx: &Context, k: usize) -> Result<Outcome> {
    let q = ctx.kneading_map()?;
    let times = cutting_times(&q, k)?;
    let mut t = Table::new("cutting-times", &["k", "S_k", "Q_k"]);
    let mut rows = Vec::new();
    for (k, s, qk) in times.rows() {
        t.push(vec![
            k.to_string(),
            s.to_string(),
            qk.map(|q| q.to_string()).unwrap_or_default(),
        ]);
        rows.push(json!({ "k": k, "S_k": s.to_string(), "Q_k": qk }));
    }
    Ok(Outcome::new(
        vec![t],
        json!({ "kneading_map": q.to_json(), "cutting_times": rows }),
    ))
}

fn check_cmd(ctx: &Context, k: usize, a: &CheckArgs) -> Result<Outcome> {
    let q = ctx.kneading_map()?;
    let none = !(a.admissible
        || a.strict_hofbauer
        || a.fibonacci_like
        || a.feigenbaum
        || a.renormalizable);
    let mut verdicts = Vec::new();
    let mut results = serde_json::Map::new();
    if a.admissible || none {
        let adm = kneading::check_admissible(&q, k, a.window)?;
        let (pass, witness) = match &adm {
            Admissibility::Pass => (
                true,
                format!("Q(k+j) >= Q(Q²(k)+j) lexicographically for k <= {k}"),
            ),
            Admissibility::Violation { k, j } => {
                (false, format!("first violation at k = {k}, j = {j}"))
            }
            Admissibility::Undecided { k, window } => (
                true,
                format!("tails agree through the {window}-term window at k = {k}; undecided"),
            ),
        };
        verdicts.push(Verdict::new("admissible", pass, witness));
        results.insert("admissible".into(), json!(adm));
    }
    if a.strict_hofbauer || none {
        let h = kneading::check_strict_hofbauer(&q, k)?;
        verdicts.push(Verdict::new(
            "strict-hofbauer",
            h.pass,
            format!("Q(k+1) > Q(Q²(k)+1) for all k0 < k <= {k}, k0 = {}", h.k0),
        ));
        results.insert("strict_hofbauer".into(), json!(h));
    }
    if a.fibonacci_like {
        let f = kneading::check_fibonacci_like(&q, k)?;
        verdicts.push(Verdict::new(
            "fibonacci-like",
            !f.growing,
            format!(
                "max k - Q(k) = {} (growing over the range: {})",
                f.n, f.growing
            ),
        ));
        results.insert("fibonacci_like".into(), json!(f));
    }
    if a.feigenbaum {
        let p = kneading::check_feigenbaum_periodic(&q, k)?;
        let witness = match p {
            Some((k0, p)) => format!("k0 = {k0}, period {p}"),
            None => "no eventually periodic Feigenbaum pattern in range".into(),
        };
        verdicts.push(Verdict::new("feigenbaum", p.is_some(), witness));
        results.insert(
            "feigenbaum".into(),
            json!(p.map(|(k0, p)| json!({ "k0": k0, "period": p }))),
        );
    }
    if a.renormalizable {
        let r = kneading::check_renormalizable(&q, k)?;
        verdicts.push(Verdict::new(
            "renormalizable",
            !r.is_empty(),
            format!("levels {r:?}"),
        ));
        results.insert("renormalizable".into(), json!(r));
    }
    results.insert("verdicts".into(), json!(verdicts));
    Ok(
        Outcome::new(vec![verdict_table(&verdicts)], Value::Object(results))
            .with_verdicts(verdicts),
    )
}

fn solve_cmd(ctx: &Context, k: usize) -> Result<Outcome> {
    let q = ctx.kneading_map()?;
    let r = ctx.solve(&q, k)?;
    let mut t = Table::new(
        "solve",
        &[
            "ell",
            "c_lo",
            "c_hi",
            "matched_depth",
            "precision_bits",
            "iterations",
            "width",
        ],
    );
    let d = digits(r.precision_used);
    t.push(vec![
        r.ell.to_string(),
        precision::to_decimal_digits(&r.c_lo, d),
        precision::to_decimal_digits(&r.c_hi, d),
        r.matched_depth.to_string(),
        r.precision_used.to_string(),
        r.iterations.to_string(),
        precision::to_decimal_digits(&r.width(), 6),
    ]);
    Ok(Outcome::new(vec![t], json!(r)))
}

fn ladder_table(ladder: &PrecriticalLadder) -> Table {
    let d = digits(ladder.map().bits());
    let mut t = Table::new(
        "closest-precritical",
        &["k", "S_k", "zeta", "residual", "witness_samples"],
    );
    for e in ladder.entries() {
        t.push(vec![
            e.k.to_string(),
            e.s_k.to_string(),
            precision::to_decimal_digits(&e.zeta, d),
            num(e.residual.to_f64()),
            e.witness_samples.to_string(),
        ]);
    }
    t
}

fn table_json(t: &Table) -> Value {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            Value::Object(
                t.header
                    .iter()
                    .cloned()
                    .zip(r.iter().map(|v| json!(v)))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn precrit_cmd(ctx: &Context, k: usize) -> Result<Outcome> {
    let r = ctx.realize(k)?;
    let times = r.times(k)?;
    let ladder = r.ladder(&times, k)?;
    let t = ladder_table(&ladder);
    let results = json!({ "map": r.json(), "ladder": table_json(&t) });
    Ok(Outcome::new(vec![t], results))
}

fn scaling_cmd(ctx: &Context, k: usize) -> Result<Outcome> {
    let r = ctx.realize(k)?;
    let times = r.times(k + 2)?;
    let s = diagnostics::scaling_ratios(&r.map, &times, k)?;
    let v = s.verdict();
    let results = json!({ "map": r.json(), "scaling": s, "verdicts": [v] });
    Ok(Outcome::new(vec![s.table()], results).with_verdicts(vec![v]))
}

fn deepest_q(times: &CuttingTimes, k: usize) -> usize {
    (1..=k + 1)
        .filter_map(|j| times.q(j))
        .max()
        .unwrap_or(0)
        .max(k)
}

fn band_cmd(ctx: &Context, k: usize, a: &BandArgs) -> Result<Outcome> {
    let r = ctx.realize(k)?;
    let times = r.times(k + 2)?;
    let ladder = r.ladder(&times, k)?;
    let window = a
        .window
        .map(|(lo, hi)| (lo as usize, hi as usize))
        .unwrap_or((k / 2, k));
    let band = diagnostics::derivative_band_window(&ladder, &times, k, window)?;
    let v = band.verdict(a.bound);
    let results = json!({ "map": r.json(), "band": band, "verdicts": [v] });
    Ok(Outcome::new(vec![band.table()], results).with_verdicts(vec![v]))
}

fn sums_cmd(ctx: &Context, k: usize, a: &SumsArgs) -> Result<Outcome> {
    if let Some(lambda) = a.lambda {
        let q = ctx.kneading_map()?;
        let times = cutting_times(&q, k + 2)?;
        let sigma = match a.sigma {
            Some(s) => s,
            None => diagnostics::sigma_hat(&times, k)?,
        };
        let d = diagnostics::fib_divergence_report(sigma, lambda, &times, k)?;
        let v = d.verdict();
        let results = json!({ "divergence": d, "verdicts": [v] });
        return Ok(Outcome::new(vec![d.table()], results).with_verdicts(vec![v]));
    }
    if a.sigma.is_some() {
        return Err(invalid("--sigma needs --lambda"));
    }
    let r = ctx.realize(k)?;
    let times = r.times(k + 2)?;
    let ladder = r.ladder(&times, k)?;
    let s = diagnostics::longbranched_sum(&ladder, &times, a.delta, k, a.sign)?;
    let v = s.verdict();
    let results = json!({ "map": r.json(), "sums": s, "verdicts": [v] });
    Ok(Outcome::new(vec![s.table()], results).with_verdicts(vec![v]))
}

fn cascade_cmd(ctx: &Context, k: usize, a: &CascadeArgs) -> Result<Outcome> {
    let r = ctx.realize(k)?;
    let times = r.times(k + 6)?;
    let ladder = r.ladder(&times, k)?;
    let window = match a.window {
        Some(w) => w,
        None => (2, times.s_checked(k)?),
    };
    let len = match a.orbit_len {
        Some(n) => n,
        None => times.s_checked(k + 4)?,
    };
    let orbit = critical_orbit(&r.map, len)?;
    let c = diagnostics::saddle_node_cascade(&orbit, &ladder, &times, window)?;
    let v = c.verdict(r.map.ell());
    let results = json!({ "map": r.json(), "cascade": c, "verdicts": [v] });
    Ok(Outcome::new(vec![c.table()], results).with_verdicts(vec![v]))
}

fn poincare_cmd(ctx: &Context, k: usize, a: &PoincareArgs) -> Result<Outcome> {
    let map = ctx.complex_map()?;
    let z = Complex::parse(map.bits(), &a.z)?;
    let pruning = match (a.prune_eps, a.min_deriv) {
        (Some(eps), Some(min_deriv)) => Some(Pruning {
            eps,
            delta: a.delta,
            min_deriv,
        }),
        (None, Some(_)) => return Err(invalid("--min-deriv only matters with --prune-eps")),
        _ => None,
    };
    let summary = complex::poincare_partial(&map, &z, a.delta, k as u32, pruning)?;
    let c = precision::to_decimal_digits(map.c(), digits(map.bits()));
    if a.leaves {
        let tree = complex::preimages(&map, &z, k as u32, pruning)?;
        let d = digits(map.bits()).min(40);
        let mut t = Table::new("leaves", &["path", "re", "im", "log_deriv"]);
        for l in tree.leaves() {
            t.push(vec![
                l.path_string(),
                precision::to_decimal_digits(&l.value.re, d),
                precision::to_decimal_digits(&l.value.im, d),
                num(l.log_deriv),
            ]);
        }
        let results = json!({ "c": c, "summary": summary, "leaves": table_json(&t) });
        return Ok(Outcome::new(vec![t], results));
    }
    let results = json!({ "c": c, "summary": summary });
    Ok(Outcome::new(vec![summary.table()], results))
}

fn green_cmd(ctx: &Context, a: &GreenArgs) -> Result<Outcome> {
    let map = ctx.complex_map()?;
    let z = Complex::parse(map.bits(), &a.z)?;
    let g = complex::green(&map, &z, a.tol)?;
    let mut t = Table::new("green", &["value", "bounded", "iterations", "error_bound"]);
    t.push(vec![
        num(g.value),
        g.bounded.to_string(),
        g.iterations.to_string(),
        num(g.error_bound),
    ]);
    let c = precision::to_decimal_digits(map.c(), digits(map.bits()));
    Ok(Outcome::new(vec![t], json!({ "c": c, "green": g })))
}

fn verify_cmd(ctx: &Context, k: usize, a: &VerifyArgs) -> Result<Outcome> {
    let r = ctx.realize(k)?;
    let times = r.times(k + 4)?;
    let ladder = r.ladder(&times, deepest_q(&times, k) + 2)?;
    let mut verdicts = Vec::new();
    let mut tables = Vec::new();
    let mut results = serde_json::Map::new();
    results.insert("map".into(), r.json());

    let law = diagnostics::closest_return_law(&ladder, &times, k)?;
    verdicts.push(law.verdict());
    tables.push(law.table());
    results.insert("closest_return".into(), json!(law));

    let n_max = times.s_checked(k.saturating_sub(2).max(1))?;
    let orbit = critical_orbit(&r.map, times.s_checked(k)?)?;
    let no2 = diagnostics::verify_no2cpp(&ladder, &orbit, &times, n_max)?;
    verdicts.push(no2.verdict());
    results.insert(
        "no_two_closest_precritical".into(),
        json!({ "n_max": no2.n_max, "m0": no2.m0 }),
    );

    let hofbauer = kneading::check_strict_hofbauer(&r.q, k.max(2))?;
    let mut neighbourhoods = Vec::new();
    for &level in &a.neighbourhood {
        if level > k {
            return Err(invalid(format!(
                "--neighbourhood level {level} exceeds -K {k}"
            )));
        }
        let n = diagnostics::verify_monotone_neighborhood(&r.map, &times, level, hofbauer.k0)?;
        verdicts.push(n.verdict());
        tables.push(n.table());
        neighbourhoods.push(n);
    }
    results.insert("monotone_neighbourhoods".into(), json!(neighbourhoods));

    let ell = r.map.ell();
    let mut sectors = Vec::new();
    for j in 2..=(ell - 1) / 2 {
        let s = complex::sector_check(ell, j)?;
        verdicts.push(Verdict::new(
            format!("sector-k{j}"),
            s.holds,
            format!("α_k, α̃_k inside (2π/ℓ, (ℓ-1)π/ℓ) for ℓ = {ell}"),
        ));
        sectors.push(s);
    }
    results.insert("sectors".into(), json!(sectors));

    let l = diagnostics::l_bound(&r.map).to_f64();
    verdicts.push(Verdict::new(
        "l-bound",
        l <= 2.0 * ell as f64,
        format!("L = {l:.12} vs 2ℓ = {}", 2 * ell),
    ));
    results.insert("l_bound".into(), json!(l));

    results.insert("verdicts".into(), json!(verdicts));
    let mut all = vec![verdict_table(&verdicts)];
    all.extend(tables);
    Ok(Outcome::new(all, Value::Object(results)).with_verdicts(verdicts))
}

fn report_cmd(
    ctx: &Context,
    k: usize,
    delta: f64,
    sign: diagnostics::ExponentSign,
    band_bound: f64,
) -> Result<Outcome> {
    let r = ctx.realize(k)?;
    let options = ReportOptions {
        delta,
        exponent_sign: sign,
        band_bound,
    };
    let report = DiagnosticsReport::build(&r.map, &r.q, k, options)?;
    let verdicts = report.verdicts.clone();
    let mut tables = vec![verdict_table(&verdicts)];
    tables.extend(report.tables());
    let results = json!({ "map": r.json(), "kneading_map": r.q.to_json(), "report": report });
    Ok(Outcome::new(tables, results).with_verdicts(verdicts))
}
