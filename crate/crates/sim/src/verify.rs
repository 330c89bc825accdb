//! Quick oracle suite behind `fama verify`: small random instances checked against
//! the brute-force references in `fama_core::oracle`.

use fama_core::channel::{complex_gaussian, trial_stream};
use fama_core::oracle::pair_interlacing_check;
use fama_core::{
    build_pair, correlation_matrix, design_dc, design_geport, eigenvector_eigenvalue_identity_check,
    exhaustive_best_subset, interlacing_check, lemma1_both_sides, sample_channels, sinr_drop_bound, sinr_drop_exact,
    CMatrix, FamaError, GeportOptions, HermitianMatrix, PortTopology, SignalMatrixPair, C64,
};

/// Deliberate defects used to check that the suite can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of the port-removal product form.
    LemmaSign,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const SEED: u64 = 0x0f1a_5eed;

/// Seeded CN(0, 1) source for one test case.
fn rng(case: u64, salt: u64) -> impl FnMut() -> C64 {
    let mut stream = trial_stream(SEED ^ salt, case, 0);
    move || complex_gaussian(&mut stream)
}

fn gaussian(rng: &mut impl FnMut() -> C64, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng())
}

fn hermitian(rng: &mut impl FnMut() -> C64, n: usize) -> HermitianMatrix {
    let g = gaussian(rng, n, n);
    HermitianMatrix::new(g.add(&g.adjoint()).scale(C64::new(0.5, 0.0))).expect("hermitian by construction")
}

fn gram(rng: &mut impl FnMut() -> C64, n: usize, shift: f64) -> HermitianMatrix {
    let g = gaussian(rng, n, n);
    HermitianMatrix::new(g.matmul(&g.adjoint())).expect("gram").add_identity(shift)
}

fn fama_pair(rng: &mut impl FnMut() -> C64, n: usize) -> Result<SignalMatrixPair, FamaError> {
    let a: Vec<C64> = (0..n).map(|_| rng()).collect();
    let g: Vec<Vec<C64>> = (0..3).map(|_| (0..n).map(|_| rng()).collect()).collect();
    SignalMatrixPair::from_columns(a, &g, 10.0)
}

fn rel_err(x: f64, y: f64, scale: f64) -> f64 {
    (x - y).abs() / scale.abs().max(1e-300)
}

struct Tally {
    out: CheckOutcome,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            out: CheckOutcome {
                name,
                cases: 0,
                failures: 0,
                worst: 0.0,
            },
        }
    }

    fn record(&mut self, ok: bool, err: f64) {
        self.out.cases += 1;
        if !ok {
            self.out.failures += 1;
        }
        if err.is_nan() || err > self.out.worst {
            self.out.worst = err;
        }
    }
}

pub fn run_suite(fault: Fault) -> Result<Vec<CheckOutcome>, FamaError> {
    let mut identity = Tally::new("eigenvector-eigenvalue identity");
    let mut interlacing = Tally::new("interlacing of principal minors");
    for case in 0..100 {
        let n = 3 + (case % 6) as usize;
        let c = hermitian(&mut rng(case, 1), n);
        for i in 0..n {
            for l in 0..n {
                let chk = eigenvector_eigenvalue_identity_check(&c, i, l)?;
                if chk.degenerate {
                    continue;
                }
                let e = rel_err(chk.lhs, chk.rhs, chk.lhs.abs().max(chk.rhs.abs()).max(1e-12));
                identity.record(e <= 1e-8, e);
            }
        }
        for l in 0..n {
            interlacing.record(interlacing_check(&c, l)?, 0.0);
        }
    }

    let mut lemma = Tally::new("port-removal drop identity");
    let mut bound = Tally::new("drop lower bound");
    for case in 0..100 {
        let mut r = rng(case, 2);
        let n = 2 + (case % 9) as usize;
        let rank_one = case % 2 == 0;
        let pair = if rank_one {
            fama_pair(&mut r, n)?
        } else {
            SignalMatrixPair::new(gram(&mut r, n, 0.0), gram(&mut r, n, 0.3))?
        };
        for l in 0..n {
            let s = lemma1_both_sides(&pair, l)?;
            let product = match fault {
                Fault::LemmaSign => -s.product_form,
                Fault::None => s.product_form,
            };
            let e = rel_err(product, s.direct_form, s.lambda_top);
            lemma.record(e <= 1e-7, e);
            interlacing.record(pair_interlacing_check(&pair, l)?, 0.0);

            let exact = sinr_drop_exact(&pair, l)?;
            let lb = sinr_drop_bound(&pair, l)?;
            let below = lb <= exact + 1e-9 * exact.abs().max(1.0);
            let tight = !rank_one || rel_err(lb, exact, exact.abs().max(lb.abs())) <= 1e-8 || (lb - exact).abs() < 1e-12;
            bound.record(below && tight, (lb - exact).max(0.0));
        }
    }

    let mut oracle = Tally::new("exhaustive oracle dominance");
    let corr = correlation_matrix(&PortTopology::line(8, 4.0)?)?;
    for trial in 0..20 {
        let h = sample_channels(&corr, 4, 4, SEED, trial)?;
        let pair = build_pair(&h, 0, 31.6)?;
        let best = exhaustive_best_subset(&pair, 2)?.best_sinr;
        let g = design_geport(&pair, 2, &GeportOptions::default())?.achieved_sinr;
        let d = design_dc(&pair, &h, 0, 31.6, 2)?.achieved_sinr;
        let slack = 1e-12 * best;
        oracle.record(best + slack >= g && best + slack >= d, (g.max(d) - best).max(0.0));
    }

    Ok(vec![identity.out, interlacing.out, lemma.out, bound.out, oracle.out])
}
