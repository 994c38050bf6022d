//! `biquant`: enumerate graphs, compile operators, integrate weights and
//! check the quantized bialgebra axioms.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 axiom
//! violation beyond tolerance.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biquant_core::cochain::SymbolicOp;
use biquant_core::geometry::certificate::certify;
use biquant_core::geometry::{McParams, PropagatorParams, WeightCache, WeightConvention, EPS_SCHEDULE, PROFILE_ID};
use biquant_core::graph::{enumerate, parse_graphs};
use biquant_core::graph_ops::{alternated_compile, compile};
use biquant_core::gs::{d_gs, d_squared, is_zero_element, GsSigns};
use biquant_core::poly::parse_expr;
use biquant_core::quantize::{
    build_costar, build_star, check_axioms, convention_name, fit_rescaling, parse_convention, required_graphs, Rescaling, WeightTable,
};
use biquant_core::tensor::parse_tensors;
use biquant_core::{AdmissibleGraph, Cochain, Rational, StructTensor, VERSION};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "biquant", version, about = "Graph-based quantization of Lie bialgebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Admissible graphs.
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Graph operators.
    #[command(subcommand)]
    Op(OpCmd),
    /// Gerstenhaber–Schack differential.
    #[command(subcommand)]
    Gs(GsCmd),
    /// Lie bialgebra structure tensors.
    #[command(subcommand)]
    Bialg(BialgCmd),
    /// Monte-Carlo weights of graphs.
    Weight(WeightArgs),
    /// Product and coproduct series with axiom checks.
    Quantize(QuantizeArgs),
    /// Certificate of the frozen propagator representative.
    VerifyPropagator(VerifyArgs),
}

#[derive(Subcommand)]
enum GraphsCmd {
    /// All labeled graphs of type `(m,n;s)` with the given edge budget.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        /// `2·#inner edges + #external edges`.
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks every graph of a file against the admissibility rules.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Compiles a graph with structure tensors into a polydifferential operator.
    Compile {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tensors: PathBuf,
        #[arg(long)]
        dim: usize,
        /// Antisymmetrize over the inner vertices.
        #[arg(long)]
        alternate: bool,
        /// Inputs `f1;f2;…` in the variables `x1..xd`; prints the value.
        #[arg(long)]
        eval: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GsCmd {
    /// Both components of the differential of a symbolic cochain.
    D {
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `D² = 0` on random graph-compiled cochains with at most one inner vertex.
    D2check {
        #[arg(long, num_args = 2, value_names = ["M", "N"])]
        arity: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BialgCmd {
    /// Jacobi, co-Jacobi and cocycle conditions; the `(2,1)` block is the
    /// bracket and the `(1,2)` block the cobracket.
    Check {
        #[arg(long)]
        tensors: PathBuf,
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Args, Clone)]
struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated `ε` values, coarse to fine.
    #[arg(long, value_delimiter = ',', default_values_t = EPS_SCHEDULE.to_vec())]
    eps_schedule: Vec<f64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// `label-sign` or `literal`.
    #[arg(long, default_value = "label-sign")]
    convention: String,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    mc: McArgs,
    /// Writes the weight table to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(long)]
    tensors: PathBuf,
    #[arg(long)]
    dim: usize,
    #[arg(long, num_args = 2, value_names = ["L1", "L2"])]
    caps: Vec<usize>,
    /// Weight tables; weights are computed when none is given.
    #[arg(long)]
    weights: Vec<PathBuf>,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    report: PathBuf,
    /// Per-slot degree of the monomial test basis.
    #[arg(long, default_value_t = 2)]
    test_degree: u32,
    /// Rescales the `1/ℓ₁!ℓ₂!` prefactor of one order, as `l1,l2=num/den`.
    #[arg(long)]
    rescale: Vec<String>,
    /// Appends the least-squares order-(1,1) rescaling to the report.
    #[arg(long)]
    fit_rescaling: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = EPS_SCHEDULE.to_vec())]
    eps_schedule: Vec<f64>,
}

enum Failure {
    Validation(String),
    Io(String),
    Axiom(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io(_) => 2,
            Failure::Axiom(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) | Failure::Axiom(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes to `out` when given, else to stdout.
fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn header(command: &str, seed: Option<u64>) -> String {
    let mut s = format!("# biquant {VERSION} {command}\n# profile {PROFILE_ID}\n");
    if let Some(seed) = seed {
        writeln!(s, "# seed {seed}").unwrap();
    }
    s
}

fn load_graphs(path: &Path) -> Result<Vec<AdmissibleGraph>, Failure> {
    let graphs = parse_graphs(&read(path)?).map_err(invalid)?;
    if graphs.is_empty() {
        return Err(invalid(format!("{}: no graphs", path.display())));
    }
    for (i, g) in graphs.iter().enumerate() {
        g.validate().map_err(|v| invalid(format!("graph {}: {v}", i + 1)))?;
    }
    Ok(graphs)
}

fn load_tensors(path: &Path, dim: usize) -> Result<BTreeMap<usize, StructTensor>, Failure> {
    parse_tensors(&read(path)?, dim).map_err(invalid)
}

fn find_block(tensors: &BTreeMap<usize, StructTensor>, dim: usize, a: usize, b: usize) -> Result<StructTensor, Failure> {
    let mut found = tensors.values().filter(|t| t.a == a && t.b == b);
    match (found.next(), found.next()) {
        (Some(t), None) => Ok(t.clone()),
        (None, _) => Ok(StructTensor::zero(dim, a, b)),
        _ => Err(invalid(format!("more than one ({a},{b}) block"))),
    }
}

fn graphs_enumerate(m: usize, n: usize, s: usize, budget: usize, out: Option<&Path>) -> Outcome {
    let graphs = enumerate(m, n, s, budget);
    let mut text = header("graphs enumerate", None);
    writeln!(text, "# m {m} n {n} s {s} budget {budget} count {}", graphs.len()).unwrap();
    for g in &graphs {
        writeln!(text, "\n# key {}", g.canonical_key()).unwrap();
        text.push_str(&g.to_text());
    }
    emit(out, &text)
}

fn graphs_validate(file: &Path) -> Outcome {
    let graphs = parse_graphs(&read(file)?).map_err(invalid)?;
    let mut bad = 0;
    for (i, g) in graphs.iter().enumerate() {
        match g.validate() {
            Ok(()) => println!("graph {} ok {}", i + 1, g.canonical_key()),
            Err(v) => {
                bad += 1;
                println!("graph {} invalid {v}", i + 1);
            }
        }
    }
    if bad > 0 {
        return Err(invalid(format!("{bad} of {} graphs invalid", graphs.len())));
    }
    Ok(())
}

fn op_text(c: &Cochain) -> Result<String, Failure> {
    c.as_symbolic().map(SymbolicOp::to_text).ok_or_else(|| invalid("operator has no symbolic form"))
}

fn op_compile(graph: &Path, tensors: &Path, dim: usize, alternate: bool, eval: Option<&str>, out: Option<&Path>) -> Outcome {
    let graphs = load_graphs(graph)?;
    if graphs.len() != 1 {
        return Err(invalid("op compile takes a file with one graph"));
    }
    let g = &graphs[0];
    let gammas: Vec<StructTensor> = load_tensors(tensors, dim)?.into_values().collect();
    let op = if alternate { alternated_compile(g, &gammas, dim) } else { compile(g, &gammas, dim) }.map_err(invalid)?;
    let mut text = header("op compile", None);
    writeln!(text, "# graph {}", g.canonical_key()).unwrap();
    match eval {
        Some(inputs) => {
            let polys = inputs.split(';').map(|f| parse_expr(f, dim)).collect::<Result<Vec<_>, _>>().map_err(invalid)?;
            let value = op.eval(&polys).map_err(invalid)?;
            text.push_str(&value.to_text());
        }
        None => text.push_str(&op_text(&op)?),
    }
    emit(out, &text)
}

fn gs_d(cochain: &Path, out: Option<&Path>) -> Outcome {
    let op = SymbolicOp::from_text(&read(cochain)?).map_err(invalid)?;
    let (d1, d2) = d_gs(&Cochain::symbolic(op), GsSigns::default());
    let mut text = header("gs d", None);
    text.push_str("# d1\n");
    text.push_str(&op_text(&d1)?);
    text.push_str("# d2\n");
    text.push_str(&op_text(&d2)?);
    emit(out, &text)
}

/// Graph-compiled cochains of arity `(m,n)` with at most one inner vertex.
fn d2_pool(m: usize, n: usize) -> Vec<AdmissibleGraph> {
    let mut pool = Vec::new();
    for s in 0..=1 {
        for budget in 0..=m + n + 2 {
            pool.extend(enumerate(m, n, s, budget));
        }
    }
    pool
}

fn gs_d2check(arity: &[usize], samples: usize, seed: u64, dim: usize, out: Option<&Path>) -> Outcome {
    let (m, n) = (arity[0], arity[1]);
    let pool = d2_pool(m, n);
    if pool.is_empty() {
        return Err(invalid(format!("no admissible graphs of arity ({m},{n})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = header("gs d2check", Some(seed));
    writeln!(text, "# arity {m} {n} dim {dim} samples {samples} pool {}", pool.len()).unwrap();
    let mut failures = 0;
    for i in 0..samples {
        let g = &pool[rng.random_range(0..pool.len())];
        let gammas: Vec<StructTensor> = (0..g.s).map(|k| StructTensor::random(dim, g.star[k].len(), g.end[k].len(), 3, &mut rng)).collect();
        let c = compile(g, &gammas, dim).map_err(invalid)?;
        let dd = d_squared(&c, GsSigns::default()).map_err(invalid)?;
        let ok = is_zero_element(&dd);
        failures += usize::from(!ok);
        writeln!(text, "sample {} {} {}", i + 1, g.canonical_key(), if ok { "zero" } else { "nonzero" }).unwrap();
    }
    emit(out, &text)?;
    if failures > 0 {
        return Err(invalid(format!("D² ≠ 0 on {failures} samples")));
    }
    Ok(())
}

fn bialg_check(tensors: &Path, dim: usize) -> Outcome {
    let ts = load_tensors(tensors, dim)?;
    let alpha = find_block(&ts, dim, 2, 1)?;
    let beta = find_block(&ts, dim, 1, 2)?;
    if !alpha.is_antisymmetric() || !beta.is_antisymmetric() {
        return Err(invalid("bracket and cobracket must be antisymmetric"));
    }
    let report = biquant_core::bracket::is_lie_bialgebra(&alpha, &beta);
    print!("{}", header("bialg check", None));
    for c in &report.checks {
        let entries = |t: &StructTensor| t.independent_entries().len();
        println!(
            "{} {} bracket_nonzero_entries {} classical_nonzero_entries {}",
            c.name,
            if c.passed() { "pass" } else { "fail" },
            entries(&c.bracket_residual),
            entries(&c.classical_residual)
        );
        for (ins, outs, v) in c.bracket_residual.independent_entries() {
            let idx = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
            println!("#   {} {} ; {} = {}", c.name, idx(&ins), idx(&outs), v);
        }
    }
    if !report.passed() {
        return Err(invalid("not a Lie bialgebra"));
    }
    Ok(())
}

fn convention(s: &str) -> Result<WeightConvention, Failure> {
    parse_convention(s).ok_or_else(|| invalid(format!("unknown convention '{s}'")))
}

fn mc_params(a: &McArgs) -> Result<McParams, Failure> {
    if a.samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    if a.eps_schedule.len() < 2 {
        return Err(invalid("the ε schedule needs at least two entries"));
    }
    let mut mc = McParams::new(a.samples, a.seed);
    mc.workers = a.workers;
    Ok(mc)
}

/// FNV-1a of the cache key fields.
fn cache_hash(fields: &[String]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for f in fields {
        for &b in f.as_bytes().iter().chain(b"\x1f") {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Weight estimates of labeled graphs, read from and written to
/// `BIQUANT_CACHE_DIR` when it is set.
struct Weigher {
    conv: WeightConvention,
    base: PropagatorParams,
    schedule: Vec<f64>,
    mc: McParams,
    memory: WeightCache,
    dir: Option<PathBuf>,
}

impl Weigher {
    fn new(a: &McArgs) -> Result<Weigher, Failure> {
        let dir = std::env::var_os("BIQUANT_CACHE_DIR").map(PathBuf::from);
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| Failure::Io(format!("{}: {e}", d.display())))?;
        }
        Ok(Weigher {
            conv: convention(&a.convention)?,
            base: PropagatorParams::default(),
            schedule: a.eps_schedule.clone(),
            mc: mc_params(a)?,
            memory: WeightCache::new(),
            dir,
        })
    }

    fn table(&self) -> WeightTable {
        WeightTable::new(&self.base.profile, self.conv, self.mc.seed, self.mc.samples)
    }

    fn cache_file(&self, key: &str) -> Option<PathBuf> {
        let schedule: Vec<String> = self.schedule.iter().map(f64::to_string).collect();
        let fields = [
            key.to_string(),
            self.base.profile.clone(),
            schedule.join(","),
            self.mc.samples.to_string(),
            self.mc.seed.to_string(),
            convention_name(self.conv).to_string(),
        ];
        self.dir.as_ref().map(|d| d.join(format!("{:016x}.txt", cache_hash(&fields))))
    }

    /// Adds the estimates of `g` to `table`.
    fn add(&mut self, g: &AdmissibleGraph, table: &mut WeightTable) -> Outcome {
        let key = g.canonical_key();
        let file = self.cache_file(&key);
        if let Some(f) = file.as_ref().filter(|f| f.exists()) {
            let cached = WeightTable::from_text(&read(f)?).map_err(invalid)?;
            if let Some(ests) = cached.entries.get(&key) {
                if cached.profile == self.base.profile && ests.len() == self.schedule.len() + 1 {
                    table.entries.insert(key, ests.clone());
                    return Ok(());
                }
            }
        }
        let s = self.memory.series(g, self.conv, &self.base, &self.schedule, &self.mc).map_err(invalid)?;
        let mut ests = s.per_eps;
        ests.push(s.extrapolated);
        if let Some(f) = file {
            let mut one = self.table();
            one.entries.insert(key.clone(), ests.clone());
            write(&f, &one.to_text())?;
        }
        table.entries.insert(key, ests);
        Ok(())
    }
}

fn weight_cmd(a: &WeightArgs) -> Outcome {
    let graphs = load_graphs(&a.graph)?;
    let mut w = Weigher::new(&a.mc)?;
    let mut table = w.table();
    for g in &graphs {
        w.add(g, &mut table)?;
    }
    let mut text = header("weight", Some(a.mc.seed));
    writeln!(text, "# samples {} convention {}", a.mc.samples, a.mc.convention).unwrap();
    for g in &graphs {
        let key = g.canonical_key();
        writeln!(text, "graph {key}").unwrap();
        for e in &table.entries[&key] {
            let label = if e.eps == 0.0 { "extrapolated".to_string() } else { format!("eps {}", e.eps) };
            writeln!(text, "  {label} value {} stderr {}", e.value, e.stderr).unwrap();
        }
    }
    print!("{text}");
    match &a.out {
        Some(p) => write(p, &table.to_text()),
        None => Ok(()),
    }
}

fn parse_rescale(items: &[String]) -> Result<Rescaling, Failure> {
    let mut r = Rescaling::new();
    for it in items {
        let bad = || invalid(format!("bad rescaling '{it}', expected l1,l2=num/den"));
        let (order, value) = it.split_once('=').ok_or_else(bad)?;
        let (l1, l2) = order.split_once(',').ok_or_else(bad)?;
        let l = (l1.trim().parse().map_err(|_| bad())?, l2.trim().parse().map_err(|_| bad())?);
        let c: Rational = biquant_core::poly::parse_rational(value).ok_or_else(bad)?;
        r.insert(l, c);
    }
    Ok(r)
}

fn quantize_cmd(a: &QuantizeArgs) -> Outcome {
    let caps = (a.caps[0], a.caps[1]);
    let ts = load_tensors(&a.tensors, a.dim)?;
    let alpha = find_block(&ts, a.dim, 2, 1)?;
    let beta = find_block(&ts, a.dim, 1, 2)?;
    let rescale = parse_rescale(&a.rescale)?;
    let table = if a.weights.is_empty() {
        let mut w = Weigher::new(&a.mc)?;
        let mut t = w.table();
        for g in required_graphs(caps) {
            w.add(&g, &mut t)?;
        }
        t
    } else {
        let mut t: Option<WeightTable> = None;
        for p in &a.weights {
            let next = WeightTable::from_text(&read(p)?).map_err(invalid)?;
            match t.as_mut() {
                None => t = Some(next),
                Some(t) => t.merge(&next).map_err(invalid)?,
            }
        }
        t.unwrap()
    };
    if table.profile != PROFILE_ID {
        return Err(invalid(format!("weight table profile {} differs from {PROFILE_ID}", table.profile)));
    }
    let star = build_star(&alpha, &beta, caps, &table, &rescale).map_err(invalid)?;
    let costar = build_costar(&alpha, &beta, caps, &table, &rescale).map_err(invalid)?;
    let mut report = check_axioms(&star, &costar, caps, &table, a.test_degree).map_err(invalid)?;
    if a.fit_rescaling && caps.0 >= 1 && caps.1 >= 1 {
        report.rescaling = Some(fit_rescaling(&alpha, &beta, &table, a.test_degree).map_err(invalid)?);
    }
    let mut text = header("quantize", Some(table.seed));
    writeln!(text, "# samples {} convention {}", table.samples, convention_name(table.convention)).unwrap();
    writeln!(text, "# caps {} {} test-degree {}", caps.0, caps.1, a.test_degree).unwrap();
    for (l, c) in &rescale {
        writeln!(text, "# rescale {},{} {}", l.0, l.1, c).unwrap();
    }
    text.push_str(&report.to_text());
    write(&a.report, &text)?;
    let v = report.violations();
    if v > 0 {
        return Err(Failure::Axiom(format!("{v} axiom violations, see {}", a.report.display())));
    }
    Ok(())
}

fn verify_propagator(a: &VerifyArgs) -> Outcome {
    let certs = certify(&PropagatorParams::default(), &a.eps_schedule, a.seed).map_err(invalid)?;
    print!("{}", header("verify-propagator", Some(a.seed)));
    println!("# eps sphere_mass face_max closedness channel_error verdict");
    for c in &certs {
        println!(
            "{} {:.9} {:e} {:e} {:e} {}",
            c.eps,
            c.sphere_mass,
            c.face_max,
            c.closedness,
            c.channel_error,
            if c.passed() { "pass" } else { "fail" }
        );
    }
    if certs.iter().any(|c| !c.passed()) {
        return Err(invalid("propagator certificate failed"));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Graphs(GraphsCmd::Enumerate { m, n, s, budget, out }) => graphs_enumerate(m, n, s, budget, out.as_deref()),
        Cmd::Graphs(GraphsCmd::Validate { file }) => graphs_validate(&file),
        Cmd::Op(OpCmd::Compile { graph, tensors, dim, alternate, eval, out }) => {
            op_compile(&graph, &tensors, dim, alternate, eval.as_deref(), out.as_deref())
        }
        Cmd::Gs(GsCmd::D { cochain, out }) => gs_d(&cochain, out.as_deref()),
        Cmd::Gs(GsCmd::D2check { arity, samples, seed, dim, out }) => gs_d2check(&arity, samples, seed, dim, out.as_deref()),
        Cmd::Bialg(BialgCmd::Check { tensors, dim }) => bialg_check(&tensors, dim),
        Cmd::Weight(a) => weight_cmd(&a),
        Cmd::Quantize(a) => quantize_cmd(&a),
        Cmd::VerifyPropagator(a) => verify_propagator(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("biquant: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
