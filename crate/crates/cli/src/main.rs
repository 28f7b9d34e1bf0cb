use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dualcat::complexes::Validation;
use dualcat::decomp::{barcode, cohomology, Size};
use dualcat::endofunctors::{check_functorial, check_relations, normalize, LambdaFunctor};
use dualcat::homspace::{
    compose_sym, cone_symbolic, hom_bruteforce, hom_infty, hom_table, truncation_bound, GeneratorRef, Kind,
};
use dualcat::io;
use dualcat::linalg::Field;
use dualcat::selftest::{run_suite, SuiteReport, SUITES};
use dualcat::stability::{
    act, central_charge, chart, chart_inv, hn_filtration, silting_search, transitivity_witness, ClosureBounds,
    ConeCatalog,
};
use dualcat::{Error, FormatError};

#[derive(Parser)]
#[command(name = "dualcat", version, about = "Computations in the derived category of k[e]/(e^2)")]
struct Cli {
    /// Ground field: `q` or `gf:<p>`.
    #[arg(long, global = true, default_value = "gf:7", value_parser = parse_field)]
    field: Field,
    /// Seed for randomized self-test suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    output: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Hom(X_i, X_j[alpha]) from the closed-form table.
    Hom {
        #[arg(value_parser = parse_size)]
        i: Size,
        #[arg(value_parser = parse_size)]
        j: Size,
        #[arg(allow_hyphen_values = true)]
        alpha: i32,
        /// Also compute the dimension on concrete complexes.
        #[arg(long)]
        brute: bool,
    },
    /// Decompose a complex file into indecomposables.
    Decompose { file: PathBuf },
    /// Compose two symbolic morphisms: `second ∘ first`.
    Compose { first: PathBuf, second: PathBuf },
    /// The cone of `coeff` times a generator.
    Cone(ConeArgs),
    /// Harder–Narasimhan filtration of a formal object.
    Hn {
        /// Stability condition as `h,mass,phi`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sigma)]
        sigma: dualcat::stability::StabilityCondition,
        file: PathBuf,
    },
    /// Stability conditions: chart, group action and witness.
    #[command(subcommand)]
    Stab(StabCommand),
    /// Endofunctors given by generator coefficients.
    #[command(subcommand)]
    Functor(FunctorCommand),
    /// Bounded silting search.
    Silting {
        #[arg(long, default_value_t = 5)]
        imax: usize,
        #[arg(long, default_value_t = 4)]
        hmax: i32,
    },
    /// Run oracle suites (all when none named).
    Selftest { suites: Vec<String> },
}

#[derive(Args)]
struct ConeArgs {
    /// Source `i,h`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_indec)]
    source: (Size, i32),
    /// Target `j,h`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_indec)]
    target: (Size, i32),
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    coeff: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    One,
    Eps,
}

#[derive(Subcommand)]
enum StabCommand {
    /// `z = ln(mass) + iπψ`, or the inverse with `--z re,im`.
    Chart {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sigma, conflicts_with = "z")]
        sigma: Option<dualcat::stability::StabilityCondition>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Act by `(kappa, theta)`.
    Act {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_group)]
        g: dualcat::stability::GroupElem,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sigma)]
        sigma: dualcat::stability::StabilityCondition,
    },
    /// The group element carrying one condition to another.
    Witness {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sigma)]
        from: dualcat::stability::StabilityCondition,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sigma)]
        to: dualcat::stability::StabilityCondition,
    },
}

#[derive(Subcommand)]
enum FunctorCommand {
    /// Functoriality and the generator relations.
    Check { file: PathBuf },
    /// Reduce to canonical form `(shift, μ, φ, λ)`.
    Normalize { file: PathBuf },
    /// Whether the canonical functor with the given λ is exact.
    Exact {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
}

fn parse_field(s: &str) -> Result<Field, String> {
    s.parse().map_err(|e: FormatError| e.to_string())
}

fn parse_size(s: &str) -> Result<Size, String> {
    io::parse_size(s).map_err(|e| e.to_string())
}

fn parse_indec(s: &str) -> Result<(Size, i32), String> {
    let (i, h) = s.split_once(',').ok_or_else(|| format!("expected i,h, got `{s}`"))?;
    let h: i32 = h.trim().parse().map_err(|_| format!("bad shift `{h}`"))?;
    if h.abs() > io::MAX_ABS_DEGREE {
        return Err(format!("shift {h} out of range"));
    }
    Ok((parse_size(i)?, h))
}

fn parse_sigma(s: &str) -> Result<dualcat::stability::StabilityCondition, String> {
    io::parse_sigma(s).map_err(|e| e.to_string())
}

fn parse_group(s: &str) -> Result<dualcat::stability::GroupElem, String> {
    io::parse_group_elem(s).map_err(|e| e.to_string())
}

enum Failure {
    Parse(String),
    NotAComplex(i32),
    Other(String),
    /// Already reported on stdout.
    Silent,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(f) => Failure::Parse(f.to_string()),
            Error::NotAComplex { degree } => Failure::NotAComplex(degree),
            other => Failure::Other(other.to_string()),
        }
    }
}

struct Output {
    json: Value,
    table: String,
}

fn read(path: &Path) -> Result<String, Failure> {
    let meta = std::fs::metadata(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    if meta.len() > io::MAX_INPUT_BYTES as u64 {
        return Err(Failure::Parse(format!("{}: file too large", path.display())));
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    match result {
        Ok(out) => {
            match cli.output {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).unwrap()),
                Format::Table => print!("{}", out.table),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Silent) => ExitCode::from(1),
        Err(f) => {
            let (code, msg) = match f {
                Failure::Parse(m) => (2, m),
                Failure::NotAComplex(d) => (3, format!("not a complex: d∘d ≠ 0 at degree {d}")),
                Failure::Other(m) => (1, m),
                Failure::Silent => unreachable!(),
            };
            match cli.output {
                Format::Json => println!("{}", serde_json::to_string_pretty(&json!({ "error": msg, "exit": code })).unwrap()),
                Format::Table => eprintln!("error: {msg}"),
            }
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let k = cli.field;
    match &cli.command {
        Command::Hom { i, j, alpha, brute } => cmd_hom(k, *i, *j, *alpha, *brute),
        Command::Decompose { file } => cmd_decompose(k, file),
        Command::Compose { first, second } => {
            let f = io::sym_from_json(k, &read(first)?)?;
            let g = io::sym_from_json(k, &read(second)?)?;
            let c = compose_sym(&g, &f)?;
            Ok(Output {
                json: io::sym_to_json(&c),
                table: format!("{c}\n"),
            })
        }
        Command::Cone(a) => {
            let kind = match a.kind {
                KindArg::One => Kind::One,
                KindArg::Eps => Kind::Eps,
            };
            let g = GeneratorRef::new(a.source, a.target, kind);
            let c = k.parse(&a.coeff)?;
            if c.is_zero() {
                return Err(Failure::Parse("coefficient must be nonzero".into()));
            }
            let obj = cone_symbolic(k, &g, &c)?;
            Ok(Output {
                json: json!({ "generator": g.to_string(), "cone": io::formal_to_json(&obj) }),
                table: format!("cone({c}·{g}) = {}\n", show(&obj)),
            })
        }
        Command::Hn { sigma, file } => {
            let f = io::formal_from_json(&read(file)?)?;
            let factors = hn_filtration(sigma, &f);
            let z = central_charge(sigma, &f);
            let mut table = format!("HN filtration of {} under {sigma}\n", show(&f));
            for x in &factors {
                writeln!(table, "  phase {:>10.6}  {}", x.phase, x.object).unwrap();
            }
            writeln!(table, "Z = {:.6} + {:.6}i", z.re, z.im).unwrap();
            let fj: Vec<Value> = factors
                .iter()
                .map(|x| json!({ "phase": x.phase, "object": io::formal_to_json(&x.object) }))
                .collect();
            Ok(Output {
                json: json!({ "factors": fj, "central_charge": io::complex_number_to_json(z) }),
                table,
            })
        }
        Command::Stab(s) => cmd_stab(s),
        Command::Functor(f) => cmd_functor(k, f),
        Command::Silting { imax, hmax } => cmd_silting(k, *imax, *hmax),
        Command::Selftest { suites } => cmd_selftest(suites, cli.seed, cli.output),
    }
}

fn show(f: &dualcat::decomp::FormalObject) -> String {
    if f.is_zero() {
        "0".into()
    } else {
        f.to_string()
    }
}

fn cmd_hom(k: Field, i: Size, j: Size, alpha: i32, brute: bool) -> Result<Output, Failure> {
    let d = hom_table(i, j, alpha);
    let mut json = json!({
        "i": io::size_to_json(i),
        "j": io::size_to_json(j),
        "alpha": alpha,
        "dim": d.dim,
        "one_type": d.has_one_type,
        "eps_type": d.has_eps_type,
    });
    let kinds: Vec<&str> = [(d.has_one_type, "1"), (d.has_eps_type, "eps")]
        .into_iter()
        .filter_map(|(b, s)| b.then_some(s))
        .collect();
    let mut table = format!("hom(X_{i}, X_{j}[{alpha}]) = {}  generators: [{}]\n", d.dim, kinds.join(", "));
    if brute {
        if alpha.unsigned_abs() > 64 || [i, j].iter().any(|s| s.finite().is_some_and(|n| n > 64)) {
            return Err(Failure::Parse("--brute is limited to lengths and |alpha| up to 64".into()));
        }
        let concrete = match (i, j) {
            (Size::Finite(a), Size::Finite(b)) => {
                let x = dualcat::complexes::Complex::indecomposable(k, a, 0);
                let y = dualcat::complexes::Complex::indecomposable(k, b, alpha);
                hom_bruteforce(&x, &y)?.0
            }
            _ => hom_infty(k, i, j, alpha, truncation_bound(j, alpha))?,
        };
        json["brute_dim"] = json!(concrete);
        json["match"] = json!(concrete == d.dim);
        writeln!(table, "brute force: {concrete}  match={}", concrete == d.dim).unwrap();
    }
    Ok(Output { json, table })
}

fn cmd_decompose(k: Field, file: &Path) -> Result<Output, Failure> {
    let c = io::complex_from_json(k, &read(file)?)?;
    if let Validation::SquareNonzero { degree } = c.validate() {
        return Err(Failure::NotAComplex(degree));
    }
    if !c.is_free() {
        return Err(Failure::Parse("decompose expects a complex of free modules".into()));
    }
    let f = barcode(&c)?;
    let h = cohomology(&c)?;
    let mut table = format!("{}\n", show(&f));
    for (n, (a, b)) in &h.degrees {
        writeln!(table, "  H^{n} = A^{a} + k^{b}").unwrap();
    }
    let coh: serde_json::Map<String, Value> = h
        .degrees
        .iter()
        .map(|(n, (a, b))| (n.to_string(), json!({ "free": a, "k": b })))
        .collect();
    let mut json = io::formal_to_json(&f);
    json["cohomology"] = Value::Object(coh);
    Ok(Output { json, table })
}

fn cmd_stab(s: &StabCommand) -> Result<Output, Failure> {
    match s {
        StabCommand::Chart { sigma, z } => match (sigma, z) {
            (Some(sigma), None) => {
                let z = chart(sigma);
                Ok(Output {
                    json: io::complex_number_to_json(z),
                    table: format!("z = {} + {}i\n", z.re, z.im),
                })
            }
            (None, Some(z)) => {
                let (re, im) = z
                    .split_once(',')
                    .and_then(|(a, b)| Some((io::parse_real(a)?, io::parse_real(b)?)))
                    .ok_or_else(|| Failure::Parse(format!("expected re,im, got `{z}`")))?;
                let s = chart_inv(num_complex::Complex64::new(re, im))?;
                Ok(Output {
                    json: io::sigma_to_json(&s),
                    table: format!("{s}\n"),
                })
            }
            _ => Err(Failure::Parse("give exactly one of --sigma and --z".into())),
        },
        StabCommand::Act { g, sigma } => {
            let s = act(g, sigma)?;
            Ok(Output {
                json: io::sigma_to_json(&s),
                table: format!("{s}\n"),
            })
        }
        StabCommand::Witness { from, to } => {
            let g = transitivity_witness(from, to);
            Ok(Output {
                json: io::group_elem_to_json(&g),
                table: format!("theta={} kappa={}\n", g.theta, g.kappa),
            })
        }
    }
}

fn cmd_functor(k: Field, f: &FunctorCommand) -> Result<Output, Failure> {
    match f {
        FunctorCommand::Check { file } => {
            let c = io::assignment_from_json(k, &read(file)?)?;
            let violations = check_functorial(&c);
            let relations = check_relations(&c);
            let failed: Vec<_> = relations.iter().filter(|r| !r.holds()).collect();
            // The relations are stated for assignments with k(i, i, 0) = 1.
            let unit_diagonal = (1..=c.window.imax).all(|i| c.get(i, i, 0).is_none_or(|v| v.is_one()));
            let mut table = format!(
                "functorial: {}  ({} violations)\nunit diagonal: {unit_diagonal}\nrelations: {}/{} hold\n",
                violations.is_empty(),
                violations.len(),
                relations.len() - failed.len(),
                relations.len()
            );
            for v in violations.iter().take(10) {
                writeln!(table, "  {v}").unwrap();
            }
            for r in failed.iter().take(10) {
                writeln!(table, "  {} at {:?}: {} != {}", r.relation, r.params, r.lhs, r.rhs).unwrap();
            }
            let json = json!({
                "functorial": violations.is_empty(),
                "unit_diagonal": unit_diagonal,
                "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "relations_checked": relations.len(),
                "relations_failed": failed
                    .iter()
                    .map(|r| json!({ "relation": r.relation.to_string(), "params": [r.params.0, r.params.1, r.params.2],
                                     "lhs": r.lhs.to_string(), "rhs": r.rhs.to_string() }))
                    .collect::<Vec<_>>(),
            });
            Ok(Output { json, table })
        }
        FunctorCommand::Normalize { file } => {
            let c = io::assignment_from_json(k, &read(file)?)?;
            let n = normalize(&c)?;
            let phi: Vec<String> = n.phi.iter().map(|x| x.to_string()).collect();
            Ok(Output {
                json: json!({ "shift": n.shift, "mu": n.mu.to_string(), "phi": phi, "lambda": n.lambda.to_string() }),
                table: format!("shift={} mu={} lambda={} phi=[{}]\n", n.shift, n.mu, n.lambda, phi.join(", ")),
            })
        }
        FunctorCommand::Exact { lambda } => {
            let l = k.parse(lambda)?;
            let f = LambdaFunctor::new(l.clone()).map_err(|e| Failure::Parse(e.to_string()))?;
            let exact = f.is_exact()?;
            Ok(Output {
                json: json!({ "lambda": l.to_string(), "exact": exact }),
                table: format!("lambda={l} exact={exact}\n"),
            })
        }
    }
}

fn cmd_silting(k: Field, imax: usize, hmax: i32) -> Result<Output, Failure> {
    if imax == 0 || imax > 12 || !(1..=12).contains(&hmax) {
        return Err(Failure::Parse("silting window must satisfy 1 ≤ imax, hmax ≤ 12".into()));
    }
    let rep = silting_search(&mut ConeCatalog::new(k), imax, hmax, &ClosureBounds::default())?;
    let obj = |(i, h): (Size, i32)| json!({ "i": io::size_to_json(i), "h": h });
    let certificate = if rep.certifies_empty() { "empty" } else { "nonempty" };
    let mut table = format!(
        "window imax={imax} hmax={hmax}\nnot silting: {} objects\nincompatible pairs: {}\n",
        rep.non_silting.len(),
        rep.incompatible.len()
    );
    writeln!(table, "maximal silting subsets:").unwrap();
    for s in &rep.maximal {
        let m: Vec<String> = s.members.iter().map(|(i, h)| format!("X_{i}[{h}]")).collect();
        writeln!(table, "  {{{}}} generates={}", m.join(", "), s.generates).unwrap();
    }
    writeln!(table, "D^b certificate: {certificate}").unwrap();
    let json = json!({
        "window": { "imax": imax, "hmax": hmax },
        "not_silting": rep.non_silting.iter().map(|&(o, w)| json!({
            "object": obj(o), "silting": false, "generates": false, "witness": w.to_string()
        })).collect::<Vec<_>>(),
        "incompatible": rep.incompatible.iter().map(|&(a, b, w)| json!({
            "pair": [obj(a), obj(b)], "silting": false, "generates": false, "witness": w.to_string()
        })).collect::<Vec<_>>(),
        "maximal": rep.maximal.iter().map(|s| json!({
            "members": s.members.iter().map(|&m| obj(m)).collect::<Vec<_>>(),
            "silting": true,
            "generates": s.generates,
            "witness": format!("cone-closure reaches {}", s.reached.iter().map(|x| format!("X_{x}")).collect::<Vec<_>>().join(", ")),
        })).collect::<Vec<_>>(),
        "generating": rep.generating.len(),
        "certificate": certificate,
    });
    Ok(Output { json, table })
}

fn cmd_selftest(names: &[String], seed: u64, format: Format) -> Result<Output, Failure> {
    let selected: Vec<&str> = if names.is_empty() {
        SUITES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for name in &selected {
        let r = run_suite(name, seed).ok_or_else(|| {
            Failure::Parse(format!("unknown suite `{name}` (known: {})", SUITES.join(", ")))
        })??;
        reports.push(r);
    }
    let mut table = String::new();
    for r in &reports {
        writeln!(table, "{} {r}", if r.passed() { "PASS" } else { "FAIL" }).unwrap();
        for f in r.failures.iter().take(5) {
            writeln!(table, "    {f}").unwrap();
        }
    }
    let json = json!({
        "seed": seed,
        "suites": reports.iter().map(|r| json!({
            "name": r.name, "passed": r.passed(), "checks": r.checks, "failures": r.failures,
        })).collect::<Vec<_>>(),
    });
    if reports.iter().all(SuiteReport::passed) {
        Ok(Output { json, table })
    } else {
        match format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&json).unwrap()),
            Format::Table => print!("{table}"),
        }
        Err(Failure::Silent)
    }
}
