//! Command-line front end: generators, the convolution engine, Fourier-Bohr
//! and diffraction output, almost-period scans and the verification suite.
//!
//! Exit codes: 0 success, 2 validation error, 3 computation finished but the
//! limit was not certified (outputs are still written, converged=false).

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;

use ebconv::apdiag::{almost_period_scan, NormKind};
use ebconv::eberlein::{finite_twisted, polarisation_combine, twisted_eberlein};
use ebconv::fourier::{character_lemma_residual, fb_coefficient, fb_limit, parse_freq_set};
use ebconv::generators::{site_uniform, GeneratorKind, GeneratorSpec};
use ebconv::measure::{Atom, Measure, Window};
use ebconv::oracle::{brute_fb, brute_twisted};
use ebconv::probe::ProbeSeminorm;
use ebconv::vanhove::VanHoveFamily;
use ebconv::{Error, Measure64, ProbeSeminorm64, Window64};

type C = Complex<f64>;

#[derive(Parser)]
#[command(name = "ebconv", version, about = "Finite-volume Eberlein convolutions and diffraction diagnostics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a measure and write it as JSON
    Gen(GenArgs),
    /// Twisted Eberlein convolution along a van Hove family
    Convolve(ConvolveArgs),
    /// Fourier-Bohr coefficients on a frequency set
    Fbcoeff(FbArgs),
    /// Pure-point diffraction amplitudes of a precomputed autocorrelation
    Diffract(DiffractArgs),
    /// Scan for epsilon-almost periods under a chosen norm
    Apscan(ApscanArgs),
    /// Run the randomized invariant suite against the naive oracles
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// lattice | incommensurate | bernoulli | fibonacci | shrinking_bump | trig_density
    #[arg(long)]
    kind: String,
    /// per-kind parameters, e.g. lattice "1:1", bernoulli "0.5:1:0",
    /// trig_density "0.01:1,1,0:2,0.5,0"
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    params: String,
    /// window LO:HI (half-open)
    #[arg(long, allow_hyphen_values = true)]
    window: String,
    #[arg(long, allow_hyphen_values = true)]
    out: String,
    /// seed for the site-keyed RNG (bernoulli)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ConvolveArgs {
    #[arg(long)]
    mu: String,
    #[arg(long)]
    nu: String,
    /// family spec: "linear:100", "geo:10:2.0", suffix ":uncentered"
    #[arg(long)]
    family: String,
    /// output window LO:HI for the convolution
    #[arg(long, allow_hyphen_values = true)]
    out: String,
    #[arg(long)]
    tol: f64,
    #[arg(long, default_value_t = 16)]
    nmax: u32,
    /// probe spec W:STEP (tent width, center step)
    #[arg(long, default_value = "0.25:0.05")]
    probe: String,
    /// json | csv
    #[arg(long, default_value = "json")]
    emit: String,
    /// output path for the convolution (report goes to a .report.json sibling)
    #[arg(long, default_value = "gamma.json")]
    gamma: String,
}

#[derive(Args)]
struct FbArgs {
    #[arg(long)]
    measure: String,
    /// frequency set: "int:-5..5", "alpha:1.4142135:-5..5", "union(...)" or numbers
    #[arg(long, allow_hyphen_values = true)]
    freqs: String,
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 16)]
    nmax: u32,
    #[arg(long, allow_hyphen_values = true)]
    out: String,
}

#[derive(Args)]
struct DiffractArgs {
    /// precomputed autocorrelation measure (JSON)
    #[arg(long)]
    gamma: String,
    #[arg(long, allow_hyphen_values = true)]
    freqs: String,
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 16)]
    nmax: u32,
    #[arg(long, allow_hyphen_values = true)]
    out: String,
}

#[derive(Args)]
struct ApscanArgs {
    #[arg(long)]
    measure: String,
    #[arg(long)]
    eps: f64,
    /// b1 | b2 | k:LEN | sup:W
    #[arg(long)]
    norm: String,
    /// translation range LO:HI
    #[arg(long, allow_hyphen_values = true)]
    trange: String,
    #[arg(long)]
    tstep: f64,
    #[arg(long, default_value = "linear:100")]
    family: String,
    /// CSV output t,value,isPeriod
    #[arg(long, allow_hyphen_values = true)]
    out: String,
    /// summary JSON (maxGap etc.); defaults to OUT with .summary.json
    #[arg(long)]
    summary: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    cases: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => run_gen(a),
        Cmd::Convolve(a) => run_convolve(a),
        Cmd::Fbcoeff(a) => run_fbcoeff(a),
        Cmd::Diffract(a) => run_diffract(a),
        Cmd::Apscan(a) => run_apscan(a),
        Cmd::Verify(a) => run_verify(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_window(s: &str) -> Result<Window64, Error> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("bad window '{s}', want LO:HI")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad window endpoint '{lo}'")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad window endpoint '{hi}'")))?;
    Window::new(lo, hi)
}

fn parse_probe(s: &str) -> Result<(f64, f64), Error> {
    let (w, step) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("bad probe '{s}', want W:STEP")))?;
    let w: f64 = w
        .parse()
        .map_err(|_| Error::Parse(format!("bad probe width '{w}'")))?;
    let step: f64 = step
        .parse()
        .map_err(|_| Error::Parse(format!("bad probe step '{step}'")))?;
    Ok((w, step))
}

fn read_measure(path: &str) -> Result<Measure64, Error> {
    let text = fs::read_to_string(path)?;
    Measure::from_json_str(&text)
}

fn parse_f64(s: &str, what: &str) -> Result<f64, Error> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
}

fn gen_spec(args: &GenArgs) -> Result<GeneratorSpec, Error> {
    let window = parse_window(&args.window)?;
    let p = &args.params;
    let parts: Vec<&str> = if p.is_empty() { Vec::new() } else { p.split(':').collect() };
    let kind = match args.kind.as_str() {
        "lattice" => {
            if parts.len() < 2 || parts.len() > 3 {
                return Err(Error::Parse(
                    "lattice params: SPACING:WEIGHT_RE[:WEIGHT_IM]".into(),
                ));
            }
            GeneratorKind::Lattice {
                spacing: parse_f64(parts[0], "spacing")?,
                weight_re: parse_f64(parts[1], "weight")?,
                weight_im: if parts.len() == 3 {
                    parse_f64(parts[2], "weight")?
                } else {
                    0.0
                },
            }
        }
        "incommensurate" => {
            if parts.len() != 1 {
                return Err(Error::Parse("incommensurate params: ALPHA".into()));
            }
            GeneratorKind::Incommensurate {
                alpha: parse_f64(parts[0], "alpha")?,
            }
        }
        "bernoulli" => {
            if parts.len() != 3 {
                return Err(Error::Parse("bernoulli params: P:V1:V0".into()));
            }
            GeneratorKind::Bernoulli {
                p: parse_f64(parts[0], "p")?,
                v1: parse_f64(parts[1], "v1")?,
                v0: parse_f64(parts[2], "v0")?,
                seed: args.seed,
            }
        }
        "fibonacci" => GeneratorKind::Fibonacci {
            tile: if p.is_empty() { "both".into() } else { p.clone() },
        },
        "shrinking_bump" | "shrinkingBump" => GeneratorKind::ShrinkingBump,
        "trig_density" | "trigDensity" => {
            if parts.is_empty() {
                return Err(Error::Parse(
                    "trig_density params: STEP:K,RE,IM[:K,RE,IM...]".into(),
                ));
            }
            let step = parse_f64(parts[0], "step")?;
            let mut terms = Vec::new();
            for t in &parts[1..] {
                let c: Vec<&str> = t.split(',').collect();
                if c.len() != 3 {
                    return Err(Error::Parse(format!("bad trig term '{t}', want K,RE,IM")));
                }
                terms.push((
                    parse_f64(c[0], "frequency")?,
                    parse_f64(c[1], "coefficient")?,
                    parse_f64(c[2], "coefficient")?,
                ));
            }
            GeneratorKind::TrigDensity { step, terms }
        }
        other => {
            return Err(Error::Parse(format!("unknown generator kind '{other}'")));
        }
    };
    Ok(GeneratorSpec {
        kind,
        window: (window.lo, window.hi),
    })
}

fn run_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let spec = gen_spec(&args)?;
    let m: Measure64 = spec.generate()?;
    fs::write(&args.out, m.to_json_string())?;
    println!(
        "wrote {} ({} atoms, {} density segments)",
        args.out,
        m.atoms().len(),
        m.density().len()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_convolve(args: ConvolveArgs) -> Result<ExitCode, Error> {
    let mu = read_measure(&args.mu)?;
    let nu = read_measure(&args.nu)?;
    let family = VanHoveFamily::parse(&args.family)?;
    let out = parse_window(&args.out)?;
    let (w, step) = parse_probe(&args.probe)?;
    let probe = ProbeSeminorm::grid(&out, w, step)?;
    let (gamma, report) = twisted_eberlein(&mu, &nu, &family, &out, &probe, args.tol, args.nmax)?;

    match args.emit.as_str() {
        "json" => fs::write(&args.gamma, gamma.to_json_string())?,
        "csv" => fs::write(&args.gamma, gamma.atoms_csv())?,
        other => return Err(Error::Parse(format!("emit must be json|csv, got '{other}'"))),
    }
    let report_path = sibling(&args.gamma, ".report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    println!(
        "wrote {} and {}; converged={} at n={}",
        args.gamma, report_path, report.converged, report.final_n
    );
    Ok(if report.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn sibling(path: &str, suffix: &str) -> String {
    match path.rsplit_once('.') {
        Some((stem, _)) => format!("{stem}{suffix}"),
        None => format!("{path}{suffix}"),
    }
}

fn fb_csv(
    mu: &Measure64,
    freqs: &[f64],
    family: &VanHoveFamily,
    tol: f64,
    nmax: u32,
    amp_floor: Option<f64>,
) -> Result<(String, bool), Error> {
    let mut csv = String::from("k,re,im,defect,converged\n");
    let mut all_converged = true;
    for &k in freqs {
        let (v, rep) = fb_limit(mu, k, family, tol, nmax)?;
        all_converged &= rep.converged;
        if let Some(floor) = amp_floor {
            if v.norm() < floor {
                continue;
            }
        }
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            k,
            v.re,
            v.im,
            rep.last_distance().unwrap_or(f64::NAN),
            rep.converged
        ));
    }
    Ok((csv, all_converged))
}

fn run_fbcoeff(args: FbArgs) -> Result<ExitCode, Error> {
    let mu = read_measure(&args.measure)?;
    let freqs: Vec<f64> = parse_freq_set(&args.freqs)?;
    let family = VanHoveFamily::parse(&args.family)?;
    let (csv, all_converged) = fb_csv(&mu, &freqs, &family, args.tol, args.nmax, None)?;
    fs::write(&args.out, csv)?;
    println!(
        "wrote {} ({} frequencies, all converged: {all_converged})",
        args.out,
        freqs.len()
    );
    Ok(if all_converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn run_diffract(args: DiffractArgs) -> Result<ExitCode, Error> {
    let gamma = read_measure(&args.gamma)?;
    let freqs: Vec<f64> = parse_freq_set(&args.freqs)?;
    let family = VanHoveFamily::parse(&args.family)?;
    // same ladder as fbcoeff but entries below tol in magnitude are dropped
    let (csv, all_converged) =
        fb_csv(&gamma, &freqs, &family, args.tol, args.nmax, Some(args.tol))?;
    fs::write(&args.out, csv)?;
    println!(
        "wrote {} (candidates: {}, all converged: {all_converged})",
        args.out,
        freqs.len()
    );
    Ok(if all_converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn run_apscan(args: ApscanArgs) -> Result<ExitCode, Error> {
    let mu = read_measure(&args.measure)?;
    let norm: NormKind<f64> = NormKind::parse(&args.norm)?;
    let trange = parse_window(&args.trange)?;
    let family = VanHoveFamily::parse(&args.family)?;
    let scan = almost_period_scan(&mu, args.eps, &norm, &trange, args.tstep, &family)?;

    let mut csv = String::from("t,value,isPeriod\n");
    for (t, v, is_p) in &scan.samples {
        csv.push_str(&format!("{t:.16e},{v:.16e},{is_p}\n"));
    }
    fs::write(&args.out, csv)?;
    let summary_path = args
        .summary
        .unwrap_or_else(|| sibling(&args.out, ".summary.json"));
    fs::write(&summary_path, serde_json::to_string_pretty(&scan)?)?;
    println!(
        "wrote {} and {summary_path}; {} periods, maxGap {:.6}",
        args.out,
        scan.periods.len(),
        scan.max_gap
    );
    Ok(ExitCode::SUCCESS)
}

// deterministic stream for the verify suite, keyed off the site-hash RNG
struct Stream {
    seed: u64,
    ctr: i64,
}

impl Stream {
    fn new(seed: u64) -> Self {
        Self { seed, ctr: 0 }
    }
    fn f64(&mut self) -> f64 {
        self.ctr += 1;
        site_uniform(self.seed, self.ctr)
    }
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.f64()
    }
    fn measure(&mut self, max_atoms: usize) -> Measure64 {
        let n = 1 + (self.f64() * max_atoms as f64) as usize;
        let atoms = (0..n)
            .map(|_| {
                Atom::new(
                    self.range(-3.0, 3.0),
                    C::new(self.range(-2.0, 2.0), self.range(-2.0, 2.0)),
                )
            })
            .collect();
        Measure::from_atoms(atoms)
    }
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let a = Window::new(-4.0, 4.0)?;
    let out = Window::new(-8.0, 8.0)?;
    let probe = ProbeSeminorm64::default_over(&out);
    let mut failures = 0u32;
    let mut report = |name: &str, worst: f64, tol: f64| {
        let ok = worst <= tol;
        if !ok {
            failures += 1;
        }
        println!(
            "{:<28} {:>12.3e} (tol {:>8.1e})  {}",
            name,
            worst,
            tol,
            if ok { "pass" } else { "FAIL" }
        );
    };

    let mut s = Stream::new(args.seed);
    let mut worst = 0.0f64;
    for _ in 0..args.cases {
        let (mu, nu) = (s.measure(5), s.measure(5));
        let fast = finite_twisted(&mu, &nu, &a, &out)?;
        let brute = brute_twisted(&mu, &nu, &a, &out)?;
        worst = worst.max(probe.distance(&fast, &brute));
    }
    report("oracle equivalence", worst, 1e-12);

    let mut s = Stream::new(args.seed ^ 0x9e3779b97f4a7c15);
    let mut worst = 0.0f64;
    for _ in 0..args.cases {
        let mu = s.measure(5);
        let k = s.range(-3.0, 3.0);
        worst = worst.max((brute_fb(&mu, k, &a) - fb_coefficient(&mu, k, &a)).norm());
    }
    report("fb oracle equivalence", worst, 1e-9);

    let mut s = Stream::new(args.seed ^ 0xc2b2ae3d27d4eb4f);
    let mut worst = 0.0f64;
    for _ in 0..args.cases {
        let (mu, nu) = (s.measure(5), s.measure(5));
        let lhs = finite_twisted(&nu, &mu, &a, &out)?;
        let rhs = finite_twisted(&mu, &nu, &a, &out.neg())?.reflect_tilde();
        worst = worst.max(probe.distance(&lhs, &rhs));
    }
    report("conjugate symmetry", worst, 1e-12);

    let mut s = Stream::new(args.seed ^ 0x165667b19e3779f9);
    let mut worst = 0.0f64;
    for _ in 0..args.cases {
        let (m1, m2, nu) = (s.measure(4), s.measure(4), s.measure(4));
        let c = C::new(s.range(-2.0, 2.0), s.range(-2.0, 2.0));
        let combo = m1.add_scaled(&m2, C::new(1.0, 0.0), c);
        let lhs = finite_twisted(&combo, &nu, &a, &out)?;
        let g1 = finite_twisted(&m1, &nu, &a, &out)?;
        let g2 = finite_twisted(&m2, &nu, &a, &out)?;
        let rhs = g1.add_scaled(&g2, C::new(1.0, 0.0), c);
        worst = worst.max(probe.distance(&lhs, &rhs));
    }
    report("sesquilinearity", worst, 1e-12);

    let mut s = Stream::new(args.seed ^ 0x27d4eb2f165667c5);
    let mut worst = 0.0f64;
    let one = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    for _ in 0..args.cases {
        let (mu, nu) = (s.measure(4), s.measure(4));
        let auto = |m: &Measure64| finite_twisted(m, m, &a, &out);
        let pp = auto(&mu.add_scaled(&nu, one, one))?;
        let mm = auto(&mu.add_scaled(&nu, one, -one))?;
        let pi = auto(&mu.add_scaled(&nu, one, i))?;
        let mi = auto(&mu.add_scaled(&nu, one, -i))?;
        let lhs = polarisation_combine(&pp, &mm, &pi, &mi);
        let rhs = finite_twisted(&mu, &nu, &a, &out)?;
        worst = worst.max(probe.distance(&lhs, &rhs));
    }
    report("polarisation", worst, 1e-10);

    let mut s = Stream::new(args.seed ^ 0x85ebca77c2b2ae63);
    let mut worst = 0.0f64;
    for _ in 0..args.cases {
        let mu = s.measure(6);
        let t = s.range(-2.0, 2.0);
        worst = worst.max(probe.distance(&mu.reflect_tilde().reflect_tilde(), &mu));
        worst = worst.max(probe.distance(&mu.translate(t).translate(-t), &mu));
        worst = worst.max(probe.distance(&mu.reflect_dagger().reflect_dagger(), &mu));
    }
    report("involution laws", worst, 1e-12);

    let mut s = Stream::new(args.seed ^ 0x94d049bb133111eb);
    let mut worst = 0.0f64;
    let t_grid: Vec<f64> = (0..20).map(|j| -1.9 + 0.2 * j as f64).collect();
    for _ in 0..args.cases {
        let mu = s.measure(6);
        let k = s.range(-3.0, 3.0);
        worst = worst.max(character_lemma_residual(&mu, k, &a, &t_grid));
    }
    report("character lemma", worst, 1e-12);

    if failures == 0 {
        println!("all checks passed ({} cases each)", args.cases);
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{failures} check(s) failed");
        Ok(ExitCode::from(2))
    }
}
