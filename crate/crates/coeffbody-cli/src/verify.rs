//! Identity and conservation suites behind `coeffbody verify`.
//!
//! Each suite is a list of independent items; items run on a small worker
//! pool capped by `COEFFBODY_THREADS` and the report is assembled in key
//! order, so the output is deterministic for a fixed seed regardless of
//! scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num::complex::Complex;
use num::rational::BigRational;
use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coeffbody::forms::{dual_basis_forms, eta_forms, exterior_derivative, pair, wedge, PolyForm};
use coeffbody::geodesics::{
    closed_form_geodesic3, euler_lagrange_residual, horizontality_check, integrate_geodesic,
    l_dynamics_check, GeodesicState,
};
use coeffbody::integrals::{conservation_drift, first_integrals, poisson_table};
use coeffbody::kirillov::{
    bracket_generating_rank, bracket_table, goluzin_schiffer_variation,
    hausdorff_dimension, hausdorff_dimension_closed_form, kirillov_field, shifted_derivative,
};
use coeffbody::loewner::{
    caratheodory_from_atoms, integrate_trajectory, AdjointState, ConstantDriving,
};
use coeffbody::series::{MultiPoly, TruncatedSeries, C64};
use coeffbody::virasoro::{
    cocycle_alt, complex_structure_j, e_basis_center_term, gelfand_fuchs, neretin_polynomials,
    neretin_recurrence_residual, trig_bracket, virasoro_bracket, TrigVectorField, VirasoroElement,
};

pub struct SuiteConfig {
    pub n: Option<usize>,
    pub max: Option<usize>,
    pub runs: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ItemOutcome {
    pub key: String,
    pub pass: bool,
    pub residual: Option<f64>,
    pub detail: String,
}

impl ItemOutcome {
    fn exact(key: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            pass,
            residual: None,
            detail: detail.into(),
        }
    }

    fn measured(
        key: impl Into<String>,
        residual: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            key: key.into(),
            pass: residual <= tolerance,
            residual: Some(residual),
            detail: detail.into(),
        }
    }
}

pub struct SuiteReport {
    pub suite: String,
    pub items: Vec<ItemOutcome>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.suite,
            "pass": self.pass,
            "items": self.items.iter().map(|i| serde_json::json!({
                "key": i.key,
                "pass": i.pass,
                "residual": i.residual,
                "detail": i.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

type Job = Box<dyn FnOnce() -> ItemOutcome + Send>;

fn thread_cap() -> usize {
    if let Ok(v) = std::env::var("COEFFBODY_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            return k.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1)
}

fn run_items(suite: &str, jobs: Vec<Job>) -> SuiteReport {
    let workers = thread_cap().min(jobs.len().max(1));
    let slots: Vec<Mutex<Option<Job>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<ItemOutcome>> = Mutex::new(Vec::with_capacity(slots.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= slots.len() {
                    break;
                }
                let job = slots[i].lock().unwrap().take().expect("job taken once");
                let outcome = job();
                results.lock().unwrap().push(outcome);
            });
        }
    });
    let mut items = results.into_inner().unwrap();
    items.sort_by(|a, b| a.key.cmp(&b.key));
    let pass = items.iter().all(|i| i.pass);
    SuiteReport {
        suite: suite.to_string(),
        items,
        pass,
    }
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport, String> {
    match name {
        "integrals" => Ok(run_items("integrals", integrals_jobs(config))),
        "brackets" => Ok(run_items("brackets", brackets_jobs(config))),
        "forms" => Ok(run_items("forms", forms_jobs(config))),
        "contact" => Ok(run_items("contact", contact_jobs())),
        "neretin" => Ok(run_items("neretin", neretin_jobs(config))),
        "cocycle" => Ok(run_items("cocycle", cocycle_jobs(config))),
        "geodesic" => Ok(run_items("geodesic", geodesic_jobs(config))),
        "variation" => Ok(run_items("variation", variation_jobs(config))),
        other => Err(format!(
            "unknown suite `{other}` (expected integrals, brackets, forms, contact, neretin, cocycle, geodesic, variation)"
        )),
    }
}

fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------- integrals

fn integrals_jobs(config: &SuiteConfig) -> Vec<Job> {
    let runs = config.runs.unwrap_or(50);
    let seed = config.seed;
    (0..runs)
        .map(|i| {
            let job: Job = Box::new(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                let n = 2 + (i % 5); // n in 2..=6
                let atoms = rng.gen_range(1..=4);
                let weights: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.05..1.0)).collect();
                let angles: Vec<f64> = (0..atoms)
                    .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                    .collect();
                let driving = ConstantDriving::new(caratheodory_from_atoms(&weights, &angles, n));
                let psi0 = AdjointState::new(
                    (0..n)
                        .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                );
                let path = match integrate_trajectory(&driving, 3.0, 1500, None, Some(psi0)) {
                    Ok(p) => p,
                    Err(e) => {
                        return ItemOutcome::exact(
                            format!("conservation-{i:03}"),
                            false,
                            format!("integration failed: {e}"),
                        )
                    }
                };
                let l0 = first_integrals(&path.states[0], &path.adjoints.as_ref().unwrap()[0])
                    .unwrap()
                    .l;
                let scale = 1.0 + l0.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let drift = conservation_drift(&path)
                    .unwrap()
                    .into_iter()
                    .fold(0.0, f64::max)
                    / scale;
                let excess = path.debranges_excess();
                let pass = drift <= 1e-6 && excess < 1e-6;
                ItemOutcome {
                    key: format!("conservation-{i:03}"),
                    pass,
                    residual: Some(drift),
                    detail: format!("n = {n}, relative drift {drift:.3e}, coefficient-bound excess {excess:.3e}"),
                }
            });
            job
        })
        .collect()
}

// ----------------------------------------------------------------- brackets

fn brackets_jobs(config: &SuiteConfig) -> Vec<Job> {
    let nmax = config.n.unwrap_or(8);
    let mut jobs: Vec<Job> = Vec::new();
    for n in 2..=nmax {
        jobs.push(Box::new(move || {
            let table = bracket_table(n).unwrap();
            let pass = table.iter().all(|e| e.exact_match);
            ItemOutcome::exact(
                format!("field-table-n{n}"),
                pass,
                format!("[L_j, L_k] = (j-k) L_(j+k) over {} pairs, exact", table.len()),
            )
        }));
        jobs.push(Box::new(move || {
            let table = poisson_table(n);
            ItemOutcome::exact(
                format!("poisson-table-n{n}"),
                table.all_match,
                format!(
                    "phase-space bracket closes with computed orientation {:+}",
                    table.orientation
                ),
            )
        }));
        jobs.push(Box::new(move || {
            let (fields, rank) = bracket_generating_rank(n).unwrap();
            ItemOutcome::exact(
                format!("generating-n{n}"),
                rank == n,
                format!("iterated brackets of (L_1, L_2): rank {rank}/{n} at the origin from {fields} fields"),
            )
        }));
    }
    for n in 2..=12usize {
        jobs.push(Box::new(move || {
            let weighted = hausdorff_dimension(n).unwrap();
            let closed = hausdorff_dimension_closed_form(n).unwrap();
            let mut pass = weighted == closed;
            if n == 3 {
                pass &= weighted == rat(4);
            }
            if n == 4 {
                pass &= weighted == rat(7);
            }
            ItemOutcome::exact(
                format!("hausdorff-n{n:02}"),
                pass,
                format!("weighted grading sum {weighted} = closed form {closed}"),
            )
        }));
    }
    jobs
}

// -------------------------------------------------------------------- forms

fn forms_jobs(config: &SuiteConfig) -> Vec<Job> {
    let nmax = config.n.unwrap_or(8);
    let seed = config.seed;
    let mut jobs: Vec<Job> = Vec::new();
    for n in 1..=nmax {
        jobs.push(Box::new(move || {
            let omegas = dual_basis_forms(n);
            let mut pass = true;
            for k in 1..=n {
                for j in 1..=n {
                    let value = pair(&omegas[k - 1], &kirillov_field(j, n).unwrap()).unwrap();
                    let want = MultiPoly::constant_int(if j == k { 1 } else { 0 });
                    pass &= value == want;
                }
            }
            ItemOutcome::exact(
                format!("duality-n{n}"),
                pass,
                "omega_k(L_j) = delta_kj, exact",
            )
        }));
    }
    for n in 3..=nmax.max(3) {
        jobs.push(Box::new(move || {
            let etas = eta_forms(n).unwrap();
            let mut pass = true;
            for eta in &etas {
                for j in [1, 2] {
                    pass &= pair(eta, &kirillov_field(j, n).unwrap()).unwrap().is_zero();
                }
            }
            ItemOutcome::exact(
                format!("eta-kernel-n{n}"),
                pass,
                "eta_k(L_1) = eta_k(L_2) = 0, exact",
            )
        }));
    }
    jobs.extend(contact_jobs());
    jobs.push(Box::new(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let mut pass = true;
        for _ in 0..20 {
            let mut form = PolyForm::zero(n, 1);
            for idx in 1..=n {
                let mut p = MultiPoly::constant_int(rng.gen_range(-3..4));
                for _ in 0..rng.gen_range(0..3usize) {
                    p = p.mul(&MultiPoly::var(rng.gen_range(0..n)));
                }
                form.insert(&[idx], p);
            }
            pass &= exterior_derivative(&exterior_derivative(&form).unwrap())
                .unwrap()
                .is_zero();
        }
        ItemOutcome::exact("dd-zero-random", pass, "d(d alpha) = 0 on random 1-forms, exact")
    }));
    jobs
}

fn contact_jobs() -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(|| {
        let etas = eta_forms(3).unwrap();
        let d = exterior_derivative(&etas[0]).unwrap();
        let mut want = PolyForm::zero(3, 2);
        want.insert(&[1, 2], MultiPoly::constant_int(1));
        ItemOutcome::exact("d-eta3", d == want, "d eta_3 = dc_1 ^ dc_2, exact")
    }));
    jobs.push(Box::new(|| {
        let etas = eta_forms(3).unwrap();
        let d = exterior_derivative(&etas[0]).unwrap();
        let contact = wedge(&etas[0], &d).unwrap();
        let mut want = PolyForm::zero(3, 3);
        want.insert(&[1, 2, 3], MultiPoly::constant_int(1));
        ItemOutcome::exact(
            "contact-m3",
            contact == want,
            "eta_3 ^ d eta_3 = dc_1 ^ dc_2 ^ dc_3, exact",
        )
    }));
    jobs
}

// ------------------------------------------------------------------ neretin

fn neretin_jobs(config: &SuiteConfig) -> Vec<Job> {
    let max = config.max.or(config.n).unwrap_or(6).max(4);
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(move || {
        let table = neretin_polynomials(max).unwrap();
        let charge = MultiPoly::var(table.charge_var());
        let c1 = MultiPoly::var(0);
        let c2 = MultiPoly::var(1);
        let c3 = MultiPoly::var(2);
        let c4 = MultiPoly::var(3);
        let half = coeffbody::series::exact_ratio(1, 2);
        let p2 = charge.mul(&c2.sub(&c1.mul(&c1))).scale(&half);
        let p3 = charge
            .mul(
                &c3.sub(&c1.mul(&c2).scale(&coeffbody::series::exact_int(2, 0)))
                    .add(&c1.mul(&c1).mul(&c1)),
            )
            .scale(&coeffbody::series::exact_int(2, 0));
        let p4 = charge.mul(
            &c4.scale(&coeffbody::series::exact_int(5, 0))
                .sub(&c1.mul(&c3).scale(&coeffbody::series::exact_int(10, 0)))
                .sub(&c2.mul(&c2).scale(&coeffbody::series::exact_int(6, 0)))
                .add(&c1.mul(&c1).mul(&c2).scale(&coeffbody::series::exact_int(17, 0)))
                .sub(&c1.mul(&c1).mul(&c1).mul(&c1).scale(&coeffbody::series::exact_int(6, 0))),
        );
        let pass = *table.poly(2) == p2 && *table.poly(3) == p3 && *table.poly(4) == p4;
        ItemOutcome::exact(
            "displays-p2-p3-p4",
            pass,
            "P_2, P_3, P_4 match their closed displays as exact polynomials",
        )
    }));
    for k in 1..=max.min(6) {
        for j in 1..=max.min(6) {
            jobs.push(Box::new(move || {
                let table = neretin_polynomials(6.max(j).max(k)).unwrap();
                let residual = neretin_recurrence_residual(&table, k, j).unwrap();
                ItemOutcome::exact(
                    format!("recurrence-k{k}-j{j}"),
                    residual.is_zero(),
                    if residual.is_zero() {
                        "zero residual polynomial".to_string()
                    } else {
                        format!("nonzero residual: {residual}")
                    },
                )
            }));
        }
    }
    jobs
}

// ------------------------------------------------------------------ cocycle

fn random_trig(rng: &mut ChaCha8Rng, degree: usize) -> TrigVectorField {
    TrigVectorField::from_parts(
        BigRational::zero(),
        (0..degree).map(|_| rat(rng.gen_range(-4..5))).collect(),
        (0..degree).map(|_| rat(rng.gen_range(-4..5))).collect(),
    )
}

fn cocycle_jobs(config: &SuiteConfig) -> Vec<Job> {
    let seed = config.seed;
    let runs = config.runs.unwrap_or(100);
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(Box::new(|| {
        let mut pass = true;
        for (n, m) in [(1usize, 2usize), (2, 2), (3, 5), (4, 1), (2, 6), (5, 5)] {
            let nn = n as i64;
            let mm = m as i64;
            let sin_term = |freq: i64, num: i64, den: i64| -> TrigVectorField {
                if freq == 0 || num == 0 {
                    TrigVectorField::zero()
                } else if freq > 0 {
                    TrigVectorField::sine(freq as usize).scale(&BigRational::new(
                        BigInt::from(num),
                        BigInt::from(den),
                    ))
                } else {
                    TrigVectorField::sine((-freq) as usize).scale(&BigRational::new(
                        BigInt::from(-num),
                        BigInt::from(den),
                    ))
                }
            };
            let want = sin_term(nn + mm, nn - mm, 2).add(&sin_term(nn - mm, nn + mm, 2));
            pass &= trig_bracket(&TrigVectorField::cosine(n), &TrigVectorField::cosine(m)) == want;
        }
        ItemOutcome::exact("trig-displays-cos-cos", pass, "[cos n, cos m] display, exact")
    }));
    jobs.push(Box::new(|| {
        // [sin n, cos n] has constant term -n
        let pass = (1..=6).all(|n| {
            trig_bracket(&TrigVectorField::sine(n), &TrigVectorField::cosine(n)).a0
                == rat(-(n as i64))
        });
        ItemOutcome::exact(
            "trig-matched-frequency-constant",
            pass,
            "[sin n, cos n] constant term -n, exact",
        )
    }));
    jobs.push(Box::new(|| {
        let pass = (1..=10).all(|n| {
            gelfand_fuchs(&TrigVectorField::cosine(n), &TrigVectorField::sine(n))
                == rat((n * n * n) as i64)
        });
        ItemOutcome::exact("gf-diagonal-n3", pass, "gf(cos n, sin n) = n^3 for n <= 10")
    }));
    jobs.push(Box::new(|| {
        let pass = (1..=10).all(|n| {
            let n = n as i64;
            cocycle_alt(
                &TrigVectorField::cosine(n as usize),
                &TrigVectorField::sine(n as usize),
            ) == BigRational::new(BigInt::from(-(n * n * n - n)), BigInt::from(4))
        });
        ItemOutcome::exact(
            "alt-diagonal",
            pass,
            "alt(cos n, sin n) = -(n^3 - n)/4 for n <= 10",
        )
    }));
    jobs.push(Box::new(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a63);
        let mut pass = true;
        for _ in 0..runs {
            let x = random_trig(&mut rng, 4);
            let y = random_trig(&mut rng, 3);
            let z = random_trig(&mut rng, 4);
            let total = trig_bracket(&x, &trig_bracket(&y, &z))
                .add(&trig_bracket(&y, &trig_bracket(&z, &x)))
                .add(&trig_bracket(&z, &trig_bracket(&x, &y)));
            pass &= total.is_zero();
        }
        ItemOutcome::exact(
            "jacobi-random",
            pass,
            format!("Jacobi identity exact on {runs} random triples"),
        )
    }));
    jobs.push(Box::new(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f);
        let mut pass = true;
        for _ in 0..runs {
            let x = random_trig(&mut rng, 4);
            let y = random_trig(&mut rng, 4);
            let z = random_trig(&mut rng, 3);
            for cocycle in [gelfand_fuchs, cocycle_alt] {
                let total = cocycle(&x, &trig_bracket(&y, &z))
                    + cocycle(&y, &trig_bracket(&z, &x))
                    + cocycle(&z, &trig_bracket(&x, &y));
                pass &= total.is_zero();
            }
        }
        ItemOutcome::exact(
            "cocycle-identity-random",
            pass,
            format!("2-cocycle identity exact for both cocycles on {runs} random triples"),
        )
    }));
    jobs.push(Box::new(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4a);
        let mut pass = true;
        for _ in 0..50 {
            let f = random_trig(&mut rng, 8);
            let jj = complex_structure_j(&complex_structure_j(&f).unwrap()).unwrap();
            pass &= jj == f.neg();
        }
        ItemOutcome::exact("j-squared", pass, "J(J(phi)) = -phi on random fields, exact")
    }));
    jobs.push(Box::new(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x62);
        let charge = BigRational::new(BigInt::from(13), BigInt::from(2));
        let mut pass = true;
        for _ in 0..20 {
            let x = VirasoroElement::from_field(random_trig(&mut rng, 4));
            let y = VirasoroElement::from_field(random_trig(&mut rng, 3));
            let z = VirasoroElement::from_field(random_trig(&mut rng, 3));
            let s = rat(rng.gen_range(-3..4));
            let combined = VirasoroElement::from_field(y.field.scale(&s).add(&z.field));
            let lhs = virasoro_bracket(&combined, &x, &charge);
            let ly = virasoro_bracket(&y, &x, &charge);
            let lz = virasoro_bracket(&z, &x, &charge);
            pass &= lhs.field == ly.field.scale(&s).add(&lz.field);
            pass &= lhs.center == ly.center * &s + lz.center;
        }
        ItemOutcome::exact("bilinearity", pass, "extension bracket is bilinear, exact")
    }));
    jobs.push(Box::new(|| {
        let charge = BigRational::new(BigInt::from(5), BigInt::from(3));
        let mut pass = true;
        for n in -6i64..=6 {
            for m in -6i64..=6 {
                if n == 0 || m == 0 {
                    continue;
                }
                let got = e_basis_center_term(n, m, &charge);
                let want_re = if n == -m {
                    &charge * BigRational::new(BigInt::from(n * n * n - n), BigInt::from(12))
                } else {
                    BigRational::zero()
                };
                pass &= got.re == want_re && got.im.is_zero();
            }
        }
        ItemOutcome::exact(
            "e-basis-center",
            pass,
            "central term (charge/12) n (n^2-1) delta_{n,-m} on the exponential basis",
        )
    }));
    jobs
}

// ----------------------------------------------------------------- geodesic

fn geodesic_jobs(config: &SuiteConfig) -> Vec<Job> {
    let runs = config.runs.unwrap_or(20);
    let seed = config.seed;
    (0..runs)
        .map(|i| {
            let job: Job = Box::new(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e0 + i as u64));
                let mut comp = |scale: f64| {
                    c64(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
                };
                let xi1 = comp(0.4);
                let xi2 = comp(0.4);
                let mut xi3 = comp(0.4);
                if xi3.norm() < 0.1 {
                    xi3 += c64(0.25, 0.0);
                }
                let key = format!("geodesic-{i:02}");
                let path = match integrate_geodesic(
                    &GeodesicState::from_xi(vec![xi1, xi2, xi3]),
                    5.0,
                    5000,
                ) {
                    Ok(p) => p,
                    Err(e) => {
                        return ItemOutcome::exact(key, false, format!("integration failed: {e}"))
                    }
                };
                let drift = path.energy_drift();
                let base = path.coefficient_path();
                let horizontality = horizontality_check(&base, 1e-6).unwrap();
                // controls must match l-bar along the flow
                let mut control_gap = 0.0f64;
                for idx in (1..path.times.len() - 1).step_by(97) {
                    let l = path.states[idx].l_all();
                    control_gap = control_gap
                        .max((horizontality.u1[idx - 1] - l[0].conj()).norm())
                        .max((horizontality.u2[idx - 1] - l[1].conj()).norm());
                }
                let closed = closed_form_geodesic3(xi3, xi1, xi2).unwrap();
                let samples = closed.sample(5.0, 5000);
                let mut gap = 0.0f64;
                for (state, (_, want)) in path.states.iter().zip(&samples) {
                    for m in 0..3 {
                        gap = gap.max((state.c[m] - want[m]).norm());
                    }
                }
                let el = euler_lagrange_residual(&base, xi3).unwrap();
                let ldyn = l_dynamics_check(&path).unwrap();
                let xi3_constant = path.states.iter().all(|s| s.xi[2] == xi3);
                let pass = drift <= 1e-8
                    && horizontality.horizontal
                    && control_gap <= 1e-6
                    && gap <= 1e-6
                    && el.max_residual <= 1e-5
                    && ldyn.max_mismatch <= 1e-5
                    && xi3_constant;
                ItemOutcome {
                    key,
                    pass,
                    residual: Some(gap),
                    detail: format!(
                        "energy drift {drift:.2e}; horizontality {:.2e}; controls-vs-l {control_gap:.2e}; closed-form gap {gap:.2e}; Euler-Lagrange {:.2e}; l-dynamics {:.2e}; xi_3 constant: {xi3_constant}",
                        horizontality.max_residual, el.max_residual, ldyn.max_mismatch
                    ),
                }
            });
            job
        })
        .collect()
}

// ---------------------------------------------------------------- variation

fn variation_jobs(config: &SuiteConfig) -> Vec<Job> {
    let seed = config.seed;
    let runs = config.runs.unwrap_or(10);
    (0..runs)
        .map(|i| {
            let job: Job = Box::new(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x6753 + i as u64));
                let degree = rng.gen_range(4..=6);
                let mut f = TruncatedSeries::<C64>::var(degree);
                for m in 2..=degree {
                    f.set_coeff(
                        m,
                        c64(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)) / m as f64,
                    );
                }
                let k = rng.gen_range(1..=3);
                let got = goluzin_schiffer_variation(&f, k, 0.5, 256).unwrap();
                let want = shifted_derivative(&f, k);
                let residual = got.max_coeff_distance(&want);
                ItemOutcome::measured(
                    format!("variation-{i:02}"),
                    residual,
                    1e-8,
                    format!("degree {degree}, k = {k}, 256 quadrature points at radius 0.5"),
                )
            });
            job
        })
        .collect()
}
