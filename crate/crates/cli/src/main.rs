use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use genus_forge::cohomology::{integrate, BundleContext};
use genus_forge::elliptic::{
    certify_coefficients, ell_bundle, ell_theta, modular_coefficients, route_agreement, BundleSpec, EllSeries,
};
use genus_forge::genus::{
    chern_number_index_formula, chern_number_of, chi_y, chi_y_taylor_minus1, closed_form_a, format_index_formula,
    format_y_poly, pluri_chi, pluri_contract, pluri_shifted, pontryagin_number_index_formula, pontryagin_number_of,
    reconstruct, signature_contract, signature_pluri, signature_pluri_shifted, y_mono, IndexVector,
};
use genus_forge::manifolds::{load, ManifoldData};
use genus_forge::poly::{Form, Module, Poly, Var};
use genus_forge::series::{QYSeries, Q_DEN};
use genus_forge::suite::{run_suite, suite_passed, SuiteOptions, CRITERIA};
use genus_forge::{Error, Rat};

const QORDER_ENV: &str = "GENUS_FORGE_QORDER";
const VERIFY_QORDER: i64 = 4;
const COMPUTE_QORDER: i64 = 6;

#[derive(Parser)]
#[command(name = "genus-forge", version, about = "Exact χ_y, pluri and elliptic genera from Chern numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Human,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct Common {
    /// Catalog name (cp1, cp2, cp3, k3, quintic, cp1xcp1), `symbolic:<d>`, or a spec file.
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long, value_enum, default_value = "human")]
    output: Output,
}

#[derive(Args)]
struct Twist {
    /// Rank of a generic twisting bundle; the tangent bundle when omitted.
    #[arg(long)]
    bundle_rank: Option<u32>,
    #[arg(long, value_enum, default_value = "on")]
    relations: Switch,
    /// Truncation: terms below q^N are computed.
    #[arg(long)]
    qorder: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// χ_y genus and its expansion around y = -1.
    ChiY {
        #[command(flatten)]
        common: Common,
    },
    /// Pluri χ_y genus, optionally one coefficient of Π(1+y_i)^{n-q_i}.
    Pluri {
        #[command(flatten)]
        common: Common,
        /// Number of exterior-power variables; defaults to the length of --q, else 1.
        #[arg(long)]
        g: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<u32>>,
    },
    /// Pluri-genus of the signature operator, optionally one coefficient of Π(1+y_i)^{2(n-q_i)}.
    SignaturePluri {
        #[command(flatten)]
        common: Common,
        /// Number of exterior-power variables; defaults to the length of --q, else 1.
        #[arg(long)]
        g: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<u32>>,
    },
    /// Index-weight formula for a Chern (or Pontrjagin) number.
    IndexFormula {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u32>,
        /// Pontrjagin numbers through signature-operator indices.
        #[arg(long)]
        pontryagin: bool,
    },
    /// Twisted elliptic genus by both routes.
    Elliptic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        twist: Twist,
    },
    /// Modular coefficients a_n with membership certificates.
    ModularCoeffs {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        twist: Twist,
        #[arg(long, default_value_t = 7)]
        u_cap: u32,
    },
    /// Runs the identity suite.
    Verify {
        /// `all` or a comma-separated list of criterion numbers.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        qorder: Option<i64>,
        #[arg(long, value_enum, default_value = "human")]
        output: Output,
    },
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = std::result::Result<(String, bool), Failure>;

fn qorder(flag: Option<i64>, default: i64) -> std::result::Result<i64, Failure> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(QORDER_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{QORDER_ENV} must be an integer, got '{v}'")))?,
            Err(_) => default,
        },
    };
    if n < 1 {
        return Err(Failure::Usage(format!("q-order must be at least 1, got {n}")));
    }
    Ok(n)
}

fn manifold(common: &Common) -> std::result::Result<ManifoldData, Failure> {
    let name = common
        .manifold
        .as_deref()
        .ok_or_else(|| Failure::Usage("--manifold is required".into()))?;
    Ok(load(name)?)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn tuple(p: &[u32]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn y_exponents(p: &Poly<Form>, g: u32) -> Vec<(Vec<u32>, Form)> {
    let mut v: Vec<(Vec<u32>, Form)> = p
        .terms()
        .map(|(m, c)| ((1..=g).map(|j| m.exponent(Var::Y(j as u8))).collect(), c.clone()))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

fn chi_y_cmd(common: &Common) -> Run {
    let m = manifold(common)?;
    let d = m.dim();
    let p = chi_y(&m)?;
    let a = chi_y_taylor_minus1(&m)?;
    let count = (d as usize + 1).max(4);
    let a_at = |i: usize| a.get(i).cloned().unwrap_or_else(Form::zero);
    let mut ok = true;
    for i in 0..4 {
        ok &= a_at(i) == integrate(&closed_form_a(i as u32, d)?, &m)?;
    }
    let mut out = String::new();
    match common.output {
        Output::Human => {
            writeln!(out, "manifold: {} (dimension {d})", m.name()).unwrap();
            writeln!(out, "chi_y = {}", format_y_poly(&p, Var::Y(1), "y")).unwrap();
            let list: Vec<String> = (0..count).map(|i| format!("a{i}={}", a_at(i))).collect();
            writeln!(out, "{}", list.join(" ")).unwrap();
            writeln!(out, "closed forms for a0..a3: {}", verdict(ok)).unwrap();
        }
        Output::Machine => {
            writeln!(out, "chi-y manifold={} dimension={d}", m.name()).unwrap();
            for k in 0..=d {
                writeln!(out, "chi {k} {}", p.coeff(&y_mono(&[k]))).unwrap();
            }
            for i in 0..count {
                writeln!(out, "a {i} {}", a_at(i)).unwrap();
            }
            writeln!(out, "closed-form {}", verdict(ok)).unwrap();
        }
    }
    Ok((out, ok))
}

fn pluri_cmd(common: &Common, g: Option<u32>, q: Option<&[u32]>, signature: bool) -> Run {
    let m = manifold(common)?;
    let n = m.dim();
    let g = match (g, q) {
        (Some(g), Some(q)) if q.len() as u32 != g => {
            return Err(Failure::Usage(format!("--q has {} entries but --g is {g}", q.len())))
        }
        (_, Some(q)) => q.len() as u32,
        (g, None) => g.unwrap_or(1),
    };
    if let Some(q) = q {
        if q.iter().any(|&qi| qi > n) {
            return Err(Failure::Usage(format!("entries of --q must be at most {n}")));
        }
    }
    if g == 0 {
        return Err(Failure::Usage("--g must be at least 1".into()));
    }
    let (label, p) = if signature {
        ("signature-pluri", signature_pluri(&m, g)?)
    } else {
        ("pluri", pluri_chi(&m, g)?)
    };
    let mut out = String::new();
    let machine = common.output == Output::Machine;
    if machine {
        writeln!(out, "{label} manifold={} dimension={n} g={g}", m.name()).unwrap();
    } else {
        writeln!(out, "manifold: {} (dimension {n}), g = {g}", m.name()).unwrap();
        writeln!(out, "indices by exterior powers p:").unwrap();
    }
    for (e, c) in y_exponents(&p, g) {
        if machine {
            writeln!(out, "index {} {c}", tuple(&e)).unwrap();
        } else {
            writeln!(out, "  p=({}) {c}", tuple(&e)).unwrap();
        }
    }
    let mut ok = true;
    if let Some(q) = q {
        let (coeff, prediction, exps) = if signature {
            let shifted = signature_pluri_shifted(&m, g)?;
            let exps: Vec<u32> = q.iter().map(|&qi| 2 * (n - qi)).collect();
            let pred = match signature_contract(&m, q) {
                Ok(p) => p,
                Err(Error::ContractNotApplicable(msg)) => {
                    writeln!(out, "{}", if machine { "prediction not-applicable".into() } else { format!("prediction: not applicable ({msg})") }).unwrap();
                    None
                }
                Err(e) => return Err(e.into()),
            };
            (shifted.coeff(&y_mono(&exps)), pred, exps)
        } else {
            let shifted = pluri_shifted(&m, g)?;
            let exps: Vec<u32> = q.iter().map(|&qi| n - qi).collect();
            (shifted.coeff(&y_mono(&exps)), pluri_contract(&m, q)?, exps)
        };
        if machine {
            writeln!(out, "coefficient {} {coeff}", tuple(&exps)).unwrap();
        } else {
            writeln!(out, "coefficient of (1+y)^({}) = {coeff}", tuple(&exps)).unwrap();
        }
        if let Some(pred) = prediction {
            ok = pred == coeff;
            if machine {
                writeln!(out, "prediction {pred} {}", verdict(ok)).unwrap();
            } else {
                writeln!(out, "predicted {pred}: {}", verdict(ok)).unwrap();
            }
        }
    }
    Ok((out, ok))
}

fn monomial_name(q: &[u32], pontryagin: bool) -> String {
    let mut parts: Vec<u32> = q.iter().copied().filter(|&x| x > 0).collect();
    parts.sort_unstable();
    if parts.is_empty() {
        return "1".into();
    }
    let letter = if pontryagin { "p" } else { "c" };
    let mut out = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        let k = parts[i];
        let e = parts[i..].iter().take_while(|&&x| x == k).count();
        out.push(if e == 1 { format!("{letter}{k}") } else { format!("{letter}{k}^{e}") });
        i += e;
    }
    out.join(" ")
}

fn index_cmd(common: &Common, n: u32, q: &[u32], pontryagin: bool) -> Run {
    let weights = if pontryagin {
        pontryagin_number_index_formula(n, q)?
    } else {
        chern_number_index_formula(n, q)?
    };
    let mut out = format_index_formula(n, q, &weights);
    let Some(_) = common.manifold else { return Ok((out, true)) };
    let m = manifold(common)?;
    if m.dim() != n {
        return Err(Failure::Usage(format!("--n {n} differs from the dimension {} of {}", m.dim(), m.name())));
    }
    let g = q.len() as u32;
    let (iv, want) = if pontryagin {
        (IndexVector::signature(&m, g)?, pontryagin_number_of(&m, q)?)
    } else {
        (IndexVector::todd(&m, g)?, chern_number_of(&m, q)?)
    };
    let got = reconstruct(&weights, &iv)?;
    let ok = got == want;
    let name = monomial_name(q, pontryagin);
    writeln!(out, "reconstructed {name} = {got}").unwrap();
    writeln!(out, "direct {name} = {want}").unwrap();
    writeln!(out, "reconstruction {}", verdict(ok)).unwrap();
    Ok((out, ok))
}

fn context(m: &ManifoldData, twist: &Twist) -> std::result::Result<(BundleSpec, BundleContext), Failure> {
    let d = m.dim();
    let bundle = match twist.bundle_rank {
        None => BundleSpec::Tangent,
        Some(rank) => BundleSpec::Generic { rank },
    };
    let l = bundle.rank(d);
    let ctx = match twist.relations {
        Switch::On => BundleContext::with_relations(d, l)?,
        Switch::Off => BundleContext::new(d, l)?,
    };
    Ok((bundle, ctx))
}

fn context_line(m: &ManifoldData, e: &EllSeries, relations: Switch) -> String {
    let w = match e.bundle {
        BundleSpec::Tangent => "T".to_string(),
        BundleSpec::Generic { rank } => format!("rank {rank}"),
    };
    format!(
        "manifold={} d={} l={} W={w} relations={} q-order={}",
        m.name(),
        e.ctx.d,
        e.ctx.l,
        if relations == Switch::On { "on" } else { "off" },
        e.order
    )
}

fn series_lines(out: &mut String, tag: &str, s: &QYSeries<Form>) {
    for ((q8, y2), c) in s.terms() {
        writeln!(out, "{tag} {} {} {c}", Rat::new(*q8, Q_DEN), Rat::new(*y2, 2)).unwrap();
    }
}

fn elliptic_cmd(common: &Common, twist: &Twist) -> Run {
    let m = manifold(common)?;
    let n = qorder(twist.qorder, COMPUTE_QORDER)?;
    let (bundle, ctx) = context(&m, twist)?;
    let b = ell_bundle(&m, bundle, &ctx, n)?;
    let t = ell_theta(&m, bundle, &ctx, n)?;
    let r = route_agreement(&b, &t);
    let mut out = String::new();
    match common.output {
        Output::Human => {
            writeln!(out, "{}", context_line(&m, &b, twist.relations)).unwrap();
            writeln!(out, "bundle route: {b}").unwrap();
            writeln!(out, "theta route:  {t}").unwrap();
            writeln!(out, "{r}").unwrap();
        }
        Output::Machine => {
            writeln!(out, "elliptic {}", context_line(&m, &b, twist.relations)).unwrap();
            series_lines(&mut out, "bundle", &b.series);
            series_lines(&mut out, "theta", &t.series);
            writeln!(out, "route-agreement {}", verdict(r.passed)).unwrap();
        }
    }
    Ok((out, r.passed))
}

fn modular_cmd(common: &Common, twist: &Twist, u_cap: u32) -> Run {
    let m = manifold(common)?;
    let n = qorder(twist.qorder, COMPUTE_QORDER)?;
    if u_cap == 0 {
        return Err(Failure::Usage("--u-cap must be at least 1".into()));
    }
    let (bundle, ctx) = context(&m, twist)?;
    let e = ell_bundle(&m, bundle, &ctx, n)?;
    let a = modular_coefficients(&e, u_cap)?;
    let certs = certify_coefficients(&e, &a)?;
    let mut out = String::new();
    let machine = common.output == Output::Machine;
    writeln!(out, "{}{}", if machine { "modular-coeffs " } else { "" }, context_line(&m, &e, twist.relations)).unwrap();
    let mut ok = true;
    for (i, (s, c)) in a.iter().zip(&certs).enumerate() {
        ok &= c.passed();
        if machine {
            series_lines(&mut out, &format!("a{i}"), s);
            write!(out, "{}", c.to_string().lines().map(|l| format!("a{i} {l}\n")).collect::<String>()).unwrap();
        } else {
            writeln!(out, "a{i} = {s}").unwrap();
            for l in c.to_string().lines() {
                writeln!(out, "  {l}").unwrap();
            }
        }
    }
    Ok((out, ok))
}

fn verify_cmd(suite: &str, flag: Option<i64>, output: Output) -> Run {
    let ids: Vec<u32> = if suite == "all" {
        CRITERIA.iter().map(|c| c.id).collect()
    } else {
        suite
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .ok()
                    .filter(|id| CRITERIA.iter().any(|c| c.id == *id))
                    .ok_or_else(|| Failure::Usage(format!("unknown criterion '{s}' (expected 1-{})", CRITERIA.len())))
            })
            .collect::<std::result::Result<_, _>>()?
    };
    let opts = SuiteOptions {
        qorder: qorder(flag, VERIFY_QORDER)?,
        ..SuiteOptions::default()
    };
    let outcomes = run_suite(&ids, &opts);
    let ok = suite_passed(&outcomes);
    let mut out = String::new();
    for o in &outcomes {
        match output {
            Output::Human => writeln!(out, "{o}").unwrap(),
            Output::Machine => {
                writeln!(out, "criterion {} {} gating={}", o.id, verdict(o.passed), o.gating).unwrap();
                for l in &o.lines {
                    writeln!(out, "  {l}").unwrap();
                }
            }
        }
    }
    writeln!(out, "suite {}", verdict(ok)).unwrap();
    Ok((out, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ChiY { common } => chi_y_cmd(common),
        Command::Pluri { common, g, q } => pluri_cmd(common, *g, q.as_deref(), false),
        Command::SignaturePluri { common, g, q } => pluri_cmd(common, *g, q.as_deref(), true),
        Command::IndexFormula { common, n, q, pontryagin } => index_cmd(common, *n, q, *pontryagin),
        Command::Elliptic { common, twist } => elliptic_cmd(common, twist),
        Command::ModularCoeffs { common, twist, u_cap } => modular_cmd(common, twist, *u_cap),
        Command::Verify { suite, qorder, output } => verify_cmd(suite, *qorder, *output),
    };
    match result {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
