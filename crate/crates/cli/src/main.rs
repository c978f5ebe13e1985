use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use gme_core::xychain::{self, ChainParams, Sector};
use gme_core::{bipartite, boundent, geomopt, mixedhull, protocols, qstate, ree, Error, HartreeConfig};

mod table;

use table::Table;

#[derive(Parser, Debug)]
#[command(name = "gme-lab", version, about = "Geometric measure of entanglement and related quantities")]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Geometric measure of pure and symmetric mixed states.
    #[command(subcommand)]
    Gme(GmeCmd),
    /// Bipartite measures.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Relative entropy of entanglement.
    #[command(subcommand)]
    Ree(ReeCmd),
    /// Bound entangled states.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Bell inequalities.
    #[command(subcommand)]
    Bell(BellCmd),
    /// Protocol demonstrations.
    #[command(subcommand)]
    Proto(ProtoCmd),
    /// Transverse-field XY chain.
    #[command(subcommand)]
    Xy(XyCmd),
}

#[derive(Subcommand, Debug)]
enum GmeCmd {
    /// Λ_max, E_sin² and E_log₂ of a pure state file.
    Pure { file: PathBuf },
    /// Convex-roof E_sin² of the two-term symmetric mixture.
    MixedSym {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = mixedhull::DEFAULT_GRID)]
        grid: usize,
    },
    /// Pure and mixed E_sin² of the GHZ/W/W̃ family at (x, y).
    Ghzw {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MeasureCmd {
    Negativity {
        file: PathBuf,
        /// `a1,a2:rest` or `a1,a2:b1,b2`, 0-based.
        #[arg(long)]
        cut: String,
    },
    Concurrence { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ReeCmd {
    /// Lower bound `−2 log₂ Λ_max` for a pure state.
    Bound { file: PathBuf },
    /// Upper bound from the separable-state search.
    Numeric {
        file: PathBuf,
        /// Minimum number of product states; defaults to rank + dimension.
        #[arg(long)]
        ansatz: Option<usize>,
    },
    /// Convex-hull value for the two-term symmetric mixture.
    Conj {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = mixedhull::DEFAULT_GRID)]
        grid: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BoundCmd {
    /// Cut negativities of the four-qubit Smolin state.
    Smolin {
        /// Random decompositions for the Monte Carlo GME check; 0 skips it.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Negativities and GME of the Dür state.
    Dur {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: f64,
    },
    /// Cut negativities of the three-qubit UPB state.
    Upb {
        /// Random product states for the unextendibility margin.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BellState {
    Ghz,
    Smolin,
    Dur,
}

#[derive(Subcommand, Debug)]
enum BellCmd {
    /// Largest Mermin-Klyshko value over x–y plane settings.
    Mk {
        #[arg(long, value_enum)]
        state: BellState,
        #[arg(long)]
        n: usize,
        /// Mixing parameter of the Dür state.
        #[arg(long, default_value_t = 0.0)]
        x: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ProtoCmd {
    /// Iterated recurrence on Werner pairs.
    Werner {
        #[arg(long)]
        r0: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Pure-state distillation yield for `n` copies.
    Yield {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        n: usize,
    },
    /// Three-letter compression example.
    Schumacher,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SectorArg {
    /// b = 1/2 (even fermion parity).
    Even,
    /// b = 0 (odd fermion parity).
    Odd,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::Even => Sector::Antiperiodic,
            SectorArg::Odd => Sector::Periodic,
        }
    }
}

#[derive(Subcommand, Debug)]
enum XyCmd {
    /// Finite-chain density and slope.
    Finite {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
        #[arg(long, conflicts_with = "h_range")]
        h: Option<f64>,
        /// `lo:hi`, inclusive.
        #[arg(long)]
        h_range: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, value_enum, default_value_t = SectorArg::Even)]
        sector: SectorArg,
    },
    /// Thermodynamic-limit density and slope.
    Thermo {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h_range: String,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Peak slope against ln N.
    Scaling {
        #[arg(long)]
        r: f64,
        /// Comma-separated chain lengths.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
    },
    /// Exact diagonalization against the analytic sector values.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h: f64,
    },
}

/// Finished table plus whether every solve converged.
struct Outcome {
    table: Table,
    converged: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, converged: true }
    }
}

fn load(path: &Path) -> anyhow::Result<qstate::QstState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { line: 0, msg: format!("cannot read {}: {e}", path.display()) })?;
    qstate::parse_qst(&text).with_context(|| format!("reading {}", path.display()))
}

fn load_pure(path: &Path) -> anyhow::Result<gme_core::PureState> {
    match load(path)? {
        qstate::QstState::Pure(p) => Ok(p),
        qstate::QstState::Mixed(_) => Err(Error::Precondition(format!("{} holds a mixed state", path.display())).into()),
    }
}

/// `lo:hi` stepped by `step`, endpoint included.
fn grid(range: &str, step: f64) -> anyhow::Result<Vec<f64>> {
    let bad = || Error::Precondition(format!("range '{range}' must read lo:hi"));
    let (a, b) = range.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo <= hi) {
        bail!(bad());
    }
    if lo == hi {
        return Ok(vec![lo]);
    }
    if !(step > 0.0) {
        bail!(Error::Precondition("step must be positive".into()));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    if count > 1_000_000 {
        bail!(Error::Precondition("range holds more than 10^6 points".into()));
    }
    let mut out: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
    if hi - out[count] > 1e-9 * step {
        out.push(hi);
    }
    Ok(out)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let seed = cli.seed;
    Ok(match &cli.cmd {
        Cmd::Gme(c) => match c {
            GmeCmd::Pure { file } => {
                let psi = load_pure(file)?;
                let rep = geomopt::entanglement_eigenvalue(&psi, &HartreeConfig::with_seed(seed))?;
                let mut t = Table::new(&["lambda_max", "e_sin2", "e_log2"]);
                t.push(row![rep.lambda_max, rep.e_sin2, rep.e_log2]);
                if !rep.converged {
                    t.add_converged(&[false]);
                }
                Outcome { table: t, converged: rep.converged }
            }
            GmeCmd::MixedSym { n, k1, k2, s, grid } => {
                let e = mixedhull::mixed_symmetric_gme(*n, *k1, *k2, *s, *grid)?;
                let mut t = Table::new(&["n", "k1", "k2", "s", "e_sin2"]);
                t.push(row![*n, *k1, *k2, *s, e]);
                t.into()
            }
            GmeCmd::Ghzw { x, y, grid } => {
                let pure = geomopt::ghz_w_lambda(*x, *y)?;
                let surf = mixedhull::GhzWSurface::build(*grid)?;
                let mixed = surf.mixed.eval(*x, *y)?;
                let mut t = Table::new(&["x", "y", "e_sin2_pure", "e_sin2_mixed"]);
                t.push(row![*x, *y, 1.0 - pure * pure, mixed]);
                if let Some(w) = surf.audit.warning() {
                    eprintln!("warning: {w}");
                    t.note(w);
                }
                t.into()
            }
        },
        Cmd::Measure(c) => match c {
            MeasureCmd::Negativity { file, cut } => {
                let rho = load(file)?.to_density();
                let spec = qstate::PartitionSpec::parse(cut, rho.n_parties())?;
                let neg = bipartite::negativity(&rho, &spec)?;
                let min = bipartite::min_pt_eigenvalue(&rho, &spec)?;
                let mut t = Table::new(&["cut", "negativity", "min_pt_eigenvalue"]);
                t.push(row![cut_label(spec.group_a(), spec.group_b()), neg, min]);
                t.into()
            }
            MeasureCmd::Concurrence { file } => {
                let rho = load(file)?.to_density();
                let cc = bipartite::concurrence(&rho)?;
                let mut t = Table::new(&["concurrence", "eof", "e_sin2"]);
                t.push(row![cc, bipartite::eof_from_concurrence(cc), bipartite::gme_from_concurrence(cc)]);
                t.into()
            }
        },
        Cmd::Ree(c) => match c {
            ReeCmd::Bound { file } => {
                let lb = ree::ree_lower_bound(&load_pure(file)?)?;
                let mut t = Table::new(&["ree_lower_bound"]);
                t.push(row![lb.bits]);
                if !lb.converged {
                    t.add_converged(&[false]);
                }
                Outcome { table: t, converged: lb.converged }
            }
            ReeCmd::Numeric { file, ansatz } => {
                let rho = load(file)?.to_density();
                let m = ansatz.unwrap_or_else(|| ree::default_ansatz_size(&rho));
                let cfg = ree::ReeConfig { seed, ..Default::default() };
                let res = ree::numeric_ree(&rho, m, &cfg)?;
                let mut t = Table::new(&["ree_upper_bound", "gap", "components", "iterations"]);
                t.push(row![res.bits, res.gap, res.ansatz.components(), res.iterations]);
                if !res.converged {
                    t.add_converged(&[false]);
                }
                Outcome { table: t, converged: res.converged }
            }
            ReeCmd::Conj { n, k1, k2, s, grid } => {
                let cr = ree::conjectured_ree_two_term(*n, *k1, *k2, *s, *grid)?;
                let mut t = Table::new(&["n", "k1", "k2", "s", "ree", "conjecture", "hull_applied", "closed_form"]);
                t.push(row![*n, *k1, *k2, *s, cr.bits, cr.conjecture, cr.hull_applied, cr.closed_form]);
                t.into()
            }
        },
        Cmd::Bound(c) => match c {
            BoundCmd::Smolin { samples } => {
                let rho = boundent::smolin_state();
                let mut t = cut_table(&rho, &[&[0], &[1], &[2], &[3], &[0, 1], &[0, 2], &[0, 3]])?;
                t.note("e_sin2=0.5 e_log2=1.0");
                if *samples > 0 {
                    let g = boundent::smolin_gme(*samples, seed)?;
                    t.note(format!("sampled_min={} samples={}", table::num(g.sampled_min), g.samples));
                }
                t.into()
            }
            BoundCmd::Dur { n, x } => {
                let g = boundent::dur_gme(*n, *x)?;
                let mut t = Table::new(&[
                    "n",
                    "x",
                    "negativity_one_rest",
                    "negativity_two_rest",
                    "e_sin2",
                    "e_log2",
                    "lambda_deviation",
                ]);
                t.push(row![
                    *n,
                    *x,
                    boundent::dur_negativity_one_rest(*n, *x),
                    boundent::dur_negativity_two_rest(*n, *x),
                    g.e_sin2,
                    g.e_log2,
                    g.lambda_deviation
                ]);
                t.into()
            }
            BoundCmd::Upb { samples } => {
                let rho = boundent::upb_state();
                let mut t = cut_table(&rho, &[&[0], &[1], &[2]])?;
                let margin = boundent::upb_unextendibility_margin(*samples, seed);
                t.note(format!("unextendibility_margin={}", table::num(margin)));
                t.into()
            }
        },
        Cmd::Bell(BellCmd::Mk { state, n, x, restarts }) => {
            let (name, rho) = match state {
                BellState::Ghz => {
                    if !(2..=10).contains(n) {
                        bail!(Error::Precondition("GHZ Bell test needs 2 <= N <= 10".into()));
                    }
                    ("ghz", qstate::PureState::ghz(*n).to_density())
                }
                BellState::Smolin => {
                    if *n != 4 {
                        bail!(Error::Precondition("the Smolin state has four parties".into()));
                    }
                    ("smolin", boundent::smolin_state())
                }
                BellState::Dur => ("dur", boundent::dur_state(*n, *x)?),
            };
            let (val, _) = boundent::optimize_mk_xy(&rho, *restarts, seed)?;
            let mut t = Table::new(&["state", "n", "mk_max", "lhv_bound", "quantum_bound"]);
            t.push(row![name, *n, val, 1.0, 2f64.powf((*n as f64 - 1.0) / 2.0)]);
            t.into()
        }
        Cmd::Proto(c) => match c {
            ProtoCmd::Werner { r0, steps } => {
                let tr = protocols::werner_trace(*r0, *steps)?;
                let mut t = Table::new(&["step", "r", "fidelity"]);
                for &(s, r) in &tr.steps {
                    t.push(row![s, r, (3.0 * r + 1.0) / 4.0]);
                }
                t.into()
            }
            ProtoCmd::Yield { theta, n } => {
                let y = protocols::pure_yield(*theta, *n)?;
                let mut t = Table::new(&["theta", "n", "yield", "entropy_limit"]);
                t.push(row![*theta, *n, y, qstate::binary_entropy(theta.cos().powi(2))]);
                t.into()
            }
            ProtoCmd::Schumacher => {
                let rep = protocols::schumacher_demo();
                let mut t = Table::new(&["quantity", "value"]);
                for (k, v) in [
                    ("entropy", rep.entropy),
                    ("lambda_q", rep.lambda_q),
                    ("p_lambda", rep.p_lambda),
                    ("f1", rep.f1),
                    ("f2", rep.f2),
                    ("fidelity", rep.fidelity),
                    ("baseline", rep.baseline),
                    ("message_average", rep.message_average),
                ] {
                    t.push(row![k, v]);
                }
                t.into()
            }
        },
        Cmd::Xy(c) => run_xy(c)?,
    })
}

fn run_xy(c: &XyCmd) -> anyhow::Result<Outcome> {
    Ok(match c {
        XyCmd::Finite { n, r, h, h_range, step, sector } => {
            let hs = match (h, h_range) {
                (Some(h), None) => vec![*h],
                (None, Some(range)) => grid(range, *step)?,
                _ => bail!(Error::Precondition("give --h or --h-range".into())),
            };
            let rows = xychain::finite_sweep(*n, *r, &hs, (*sector).into())?;
            let mut t = Table::new(&xychain::CSV_HEADER.split(',').collect::<Vec<_>>());
            for d in rows {
                t.push(row![d.r, d.h, d.n, d.density, d.d_e_dh]);
            }
            t.into()
        }
        XyCmd::Thermo { r, h_range, step } => {
            let hs = grid(h_range, *step)?;
            let curve = xychain::thermo_curve(*r, &hs, true)?;
            let mut t = Table::new(&xychain::CSV_HEADER.split(',').collect::<Vec<_>>());
            let ds = curve.derivatives.expect("derivatives requested");
            for ((&(r, h), &e), &d) in curve.grid.iter().zip(&curve.values).zip(&ds) {
                t.push(row![r, h, "inf", e, d]);
            }
            t.into()
        }
        XyCmd::Scaling { r, n_list } => {
            let fit = xychain::scaling_fit(*r, n_list)?;
            let mut t = Table::new(&["N", "h_max", "peak_dE_dh"]);
            for &(n, h, s) in &fit.points {
                t.push(row![n, h, s]);
            }
            t.note(format!(
                "slope={} intercept={} nu={}",
                table::num(fit.slope),
                table::num(fit.intercept),
                table::num(fit.nu_estimate)
            ));
            t.into()
        }
        XyCmd::Oracle { n, r, h } => {
            let rep = xychain::ed_oracle(*n, *r, *h)?;
            let mut t = Table::new(&["sector", "energy_ed", "energy_exact", "lambda_ed", "lambda_exact"]);
            for s in [Sector::Periodic, Sector::Antiperiodic] {
                let p = ChainParams::new(*n, *r, *h, s)?;
                let (e_odd, e_even) = xychain::energies(&p);
                let exact = if s == Sector::Periodic { e_odd } else { e_even };
                let ed = rep.sector(s);
                let name = if s == Sector::Periodic { "odd" } else { "even" };
                let lam = xychain::entanglement_density_n(&p).ln_lambda.exp();
                t.push(row![name, ed.energy, exact, ed.lambda_scan, lam]);
            }
            t.note(format!("ground_energy={}", table::num(rep.ground_energy)));
            t.into()
        }
    })
}

fn cut_label(a: &[usize], b: &[usize]) -> String {
    let letters = |g: &[usize]| g.iter().map(|&p| party_name(p)).collect::<String>();
    format!("{}:{}", letters(a), letters(b))
}

fn party_name(p: usize) -> char {
    (b'A' + p as u8) as char
}

fn cut_table(rho: &gme_core::DensityMatrix, cuts: &[&[usize]]) -> anyhow::Result<Table> {
    let n = rho.n_parties();
    let mut t = Table::new(&["cut", "negativity"]);
    for a in cuts {
        let spec = qstate::PartitionSpec::new(a, n)?;
        let neg = bipartite::negativity(rho, &spec)?;
        // Round-off from the partial-transpose eigensolver, not entanglement.
        let neg = if neg.abs() < 1e-12 { 0.0 } else { neg };
        t.push(row![cut_label(spec.group_a(), spec.group_b()), neg]);
    }
    Ok(t)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Parse { .. }) => 1,
        Some(Error::Numerical(_)) => 3,
        Some(_) => 2,
        None => 2,
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("GME_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Precondition(format!("GME_THREADS must be a non-negative integer, got '{v}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("building thread pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| run(&cli)).and_then(|out| {
        let text = out.table.render(cli.seed);
        match &cli.out {
            Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{text}"),
        }
        Ok(out.converged)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: solver did not converge");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
