//! The subcommands. Each returns a [`Report`] and optionally CSV text.

use std::fmt::Write as _;

use e3lab::dynamics::{divergence, hamiltonian_witness, integrate, witness_residual, Witness};
use e3lab::e3::{casimirs, hamiltonians, structure_matrix};
use e3lab::elliptic::{solve_u_closed_form, verify_isomorphism, Branch};
use e3lab::field::bracket;
use e3lab::hess::{
    ha_admissible_params, ha_separation, integrate_ha, relation_rate, sample_on_surface, verify_ha_equivalence, CouplingCandidate,
    InertiaTriple,
};
use e3lab::lax::{spectral_coefficients, verify_lax, verify_rmatrix, SpectralCoefficients};
use e3lab::reduction::{reconstruct, reduced_constants, reduction_residual, rotate, u_series};
use e3lab::sampling::{self, spectral_parameter, uniform_state, uniform_state_where};
use e3lab::separation::{canonicality_residuals, chart_distance, sep_vars, separation_relation_residuals};
use e3lab::{CaseSelector, E3State, ScalarField, SolverSettings, Trajectory};

use crate::config::{Config, Initial};
use crate::report::Report;

/// Columns of the trajectory CSV.
pub const CSV_HEADER: &str = "t, M1, M2, M3, G1, G2, G3, F1, F2, H1, H2, a_value, div_analytic";

/// Seeded sample states stay at least this far from the separation chart's singular set.
pub const CHART_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Poisson,
    Measure,
    Hamiltonian,
    Lax,
    Rmatrix,
    Spectral,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Poisson,
        Suite::Measure,
        Suite::Hamiltonian,
        Suite::Lax,
        Suite::Rmatrix,
        Suite::Spectral,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Poisson => "poisson",
            Suite::Measure => "measure",
            Suite::Hamiltonian => "hamiltonian",
            Suite::Lax => "lax",
            Suite::Rmatrix => "rmatrix",
            Suite::Spectral => "spectral",
            Suite::All => "all",
        }
    }
}

/// A configuration together with the resolved seed.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: Config,
    pub seed: u64,
}

pub struct Output {
    pub report: Report,
    pub csv: Option<String>,
}

impl Run {
    fn rng(&self, stream: u64) -> sampling::SampleRng {
        sampling::rng(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream))
    }

    pub fn initial_state(&self) -> E3State {
        match self.config.initial {
            Initial::Given(s) => s,
            Initial::Random { range } => uniform_state(&mut sampling::rng(self.seed), range),
        }
    }

    fn header(&self, report: &mut Report) {
        let p = &self.config.params;
        report.info("seed", self.seed);
        report.info("params", format!("I2={} x0={} z0={}", p.i2(), p.x0(), p.z0()));
        report.info("case", self.config.case.tag());
    }

    fn trajectory(&self, state: &E3State, case: &CaseSelector) -> e3lab::Result<Trajectory> {
        let mut traj = integrate(state, &self.config.params, case, &self.config.settings)?;
        traj.seed = Some(self.seed);
        Ok(traj)
    }
}

fn state_text(s: &E3State) -> String {
    format!(
        "{:.16e},{:.16e},{:.16e};{:.16e},{:.16e},{:.16e}",
        s.m.x, s.m.y, s.m.z, s.gamma.x, s.gamma.y, s.gamma.z
    )
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

pub fn simulate(run: &Run) -> e3lab::Result<Output> {
    let p = &run.config.params;
    let case = &run.config.case;
    let s0 = run.initial_state();
    let traj = run.trajectory(&s0, case)?;
    let h2 = ScalarField::h2(p);
    let a = case.field(p);
    let mut csv = String::new();
    writeln!(csv, "{CSV_HEADER}").unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let (f1, f2) = casimirs(s);
        let (eh1, eh2) = hamiltonians(s, p);
        let div = bracket(&a, &h2, s)?;
        let row = [*t, s.m.x, s.m.y, s.m.z, s.gamma.x, s.gamma.y, s.gamma.z, f1, f2, eh1, eh2, a.value(s), div];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(csv, "{}", cells.join(", ")).unwrap();
    }
    let mut report = Report::new();
    run.header(&mut report);
    report.info("initial", state_text(&s0));
    report.info("samples", traj.len());
    for (name, d) in ["F1", "F2", "H1", "H2"].iter().zip(traj.invariant_drift()) {
        report.info(&format!("drift.{name}"), format!("{d:.6e}"));
    }
    Ok(Output { report, csv: Some(csv) })
}

pub fn verify(run: &Run, suite: Suite) -> e3lab::Result<Output> {
    let mut report = Report::new();
    run.header(&mut report);
    report.info("suite", suite.name());
    report.info("samples", run.config.samples);
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        report.extend(match s {
            Suite::Poisson => poisson_suite(run)?,
            Suite::Measure => measure_suite(run)?,
            Suite::Hamiltonian => hamiltonian_suite(run)?,
            Suite::Lax => lax_suite(run)?,
            Suite::Rmatrix => rmatrix_suite(run)?,
            Suite::Spectral => spectral_suite(run)?,
            Suite::All => unreachable!(),
        });
    }
    Ok(Output { report, csv: None })
}

fn samples(run: &Run, stream: u64) -> Vec<E3State> {
    let mut rng = run.rng(stream);
    (0..run.config.samples)
        .map(|_| uniform_state(&mut rng, sampling::DEFAULT_RANGE))
        .collect()
}

fn poisson_suite(run: &Run) -> e3lab::Result<Report> {
    let mut r = Report::new();
    let states = samples(run, 1);
    let coords: Vec<ScalarField> = (0..6).map(ScalarField::coordinate).collect();
    let inner = |j: usize, k: usize| {
        ScalarField::new(format!("{{x{j},x{k}}}"), move |s: &E3State| structure_matrix(s)[(j, k)])
    };
    let (mut anti, mut cas, mut jacobi): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in &states {
        let j = structure_matrix(s);
        anti = anti.max((j + j.transpose()).amax());
        for c in &coords {
            cas = cas.max(bracket(&ScalarField::casimir_f1(), c, s)?.abs());
            cas = cas.max(bracket(&ScalarField::casimir_f2(), c, s)?.abs());
        }
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    let v = bracket(&coords[a], &inner(b, c), s)?
                        + bracket(&coords[b], &inner(c, a), s)?
                        + bracket(&coords[c], &inner(a, b), s)?;
                    jacobi = jacobi.max(v.abs());
                }
            }
        }
    }
    r.check("poisson.antisymmetry", anti, 1e-15);
    r.check("poisson.casimirs", cas, 1e-12);
    r.check("poisson.jacobi", jacobi, 1e-8);
    Ok(r)
}

fn measure_suite(run: &Run) -> e3lab::Result<Report> {
    let mut r = Report::new();
    let p = &run.config.params;
    let states = samples(run, 2);
    let mut cases: Vec<CaseSelector> = CaseSelector::named().to_vec();
    if !run.config.case.is_named() {
        cases.push(run.config.case.clone());
    }
    let mut formula: f64 = 0.0;
    for case in &cases {
        let mut div: f64 = 0.0;
        for s in &states {
            let d = divergence(s, p, case)?;
            div = div.max(d.numeric.abs()).max(d.analytic.abs());
            formula = formula.max((d.numeric - d.analytic).abs());
        }
        r.check(&format!("measure.{}", case.tag()), div, 1e-6);
    }
    r.check("measure.divergence_formula", formula, 1e-6);
    Ok(r)
}

fn hamiltonian_suite(run: &Run) -> e3lab::Result<Report> {
    let mut r = Report::new();
    let p = &run.config.params;
    let states = samples(run, 3);
    let mut cases: Vec<CaseSelector> = CaseSelector::named().to_vec();
    if !run.config.case.is_named() {
        cases.push(run.config.case.clone());
    }
    for case in &cases {
        let name = format!("hamiltonian.{}", case.tag());
        match hamiltonian_witness(case, p) {
            Witness::Hamiltonian(h) => {
                r.info(&format!("{name}.witness"), h.name());
                let mut worst: f64 = 0.0;
                for s in &states {
                    worst = worst.max(witness_residual(&h, s, p, case)?);
                }
                r.check(&name, worst, 1e-12);
            }
            Witness::NotHamiltonian => r.skip(&name, "not_hamiltonian"),
            Witness::Undetermined => r.skip(&name, "undetermined"),
        }
    }
    Ok(r)
}

fn lax_suite(run: &Run) -> e3lab::Result<Report> {
    let mut r = Report::new();
    let p = &run.config.params;
    let mut rng = run.rng(4);
    let lambdas: Vec<_> = (0..5).map(|_| spectral_parameter(&mut rng)).collect();
    let settings = SolverSettings::adaptive(2.0, 0.1);
    for case in CaseSelector::named() {
        let s = uniform_state(&mut rng, sampling::DEFAULT_RANGE);
        let traj = integrate(&s, p, &case, &settings)?;
        r.check(&format!("lax.{}", case.tag()), verify_lax(&traj, &lambdas)?, 1e-10);
    }
    Ok(r)
}

fn rmatrix_suite(run: &Run) -> e3lab::Result<Report> {
    let mut r = Report::new();
    let p = &run.config.params;
    let mut rng = run.rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..run.config.samples {
        let s = uniform_state(&mut rng, sampling::DEFAULT_RANGE);
        let (l, m) = (spectral_parameter(&mut rng), spectral_parameter(&mut rng));
        worst = worst.max(verify_rmatrix(&s, p, l, m)?);
    }
    r.check("rmatrix.identity", worst, 1e-12);
    Ok(r)
}

fn coefficient_gap(a: &SpectralCoefficients, b: &SpectralCoefficients) -> f64 {
    let (a, b) = (a.as_array(), b.as_array());
    max_of((0..5).map(|i| (a[i] - b[i]).abs() / b[i].abs().max(1.0)))
}

fn spectral_suite(run: &Run) -> e3lab::Result<Report> {
    let mut r = Report::new();
    let p = &run.config.params;
    let states = samples(run, 6);
    let worst = max_of(
        states
            .iter()
            .map(|s| coefficient_gap(&spectral_coefficients(s, p), &SpectralCoefficients::from_integrals(s, p))),
    );
    r.check("spectral.coefficients", worst, 1e-12);
    let s0 = run.initial_state();
    let traj = run.trajectory(&s0, &run.config.case)?;
    let c0 = spectral_coefficients(&s0, p);
    let drift = max_of(traj.states.iter().map(|s| coefficient_gap(&spectral_coefficients(s, p), &c0)));
    r.check(&format!("spectral.constancy.{}", run.config.case.tag()), drift, 1e-7);
    Ok(r)
}

pub fn reduce(run: &Run) -> e3lab::Result<Output> {
    let p = &run.config.params;
    let case = &run.config.case;
    let s0 = run.initial_state();
    let k = reduced_constants(&s0, p);
    let mut report = Report::new();
    run.header(&mut report);
    report.info("initial", state_text(&s0));
    for (name, v) in [
        ("c1", k.c1),
        ("c2", k.c2),
        ("d1", k.d1),
        ("d2", k.d2),
        ("A", k.a_shift),
        ("B", k.b),
        ("C", k.c),
        ("D", k.d),
    ] {
        report.info(name, format!("{v:.16e}"));
    }
    let traj = run.trajectory(&s0, case)?;
    report.check("reduction.cubic", reduction_residual(&traj, p), 1e-6);
    let series = u_series(&traj);
    let sigma0 = rotate(&s0, p).polar().sigma;
    let mut csv = String::from("t, u, u_dot, sigma\n");
    match reconstruct(&series, sigma0, &k, p, case) {
        Ok(rec) => {
            if rec.truncated {
                report.info("reduction.truncated_at", format!("{:.16e}", rec.times.last().copied().unwrap_or(0.0)));
            }
            let err = max_of(
                rec.e3_states(p)
                    .iter()
                    .zip(&traj.states)
                    .map(|(a, b)| (a.to_vec6() - b.to_vec6()).amax()),
            );
            report.check("reduction.reconstruction", err, 1e-5);
            report.check("reduction.consistency", rec.consistency, 1e-6);
            for i in 0..rec.times.len() {
                writeln!(
                    csv,
                    "{:.16e}, {:.16e}, {:.16e}, {:.16e}",
                    rec.times[i], series.u[i], series.udot[i], rec.sigma[i]
                )
                .unwrap();
            }
        }
        Err(e @ (e3lab::Error::CouplingNotReducible(_) | e3lab::Error::PolarDegeneracy { .. })) => {
            report.skip("reduction.reconstruction", &e.to_string().replace(' ', "_"));
            for i in 0..series.times.len() {
                writeln!(csv, "{:.16e}, {:.16e}, {:.16e}, NaN", series.times[i], series.u[i], series.udot[i]).unwrap();
            }
        }
        Err(e) => return Err(e),
    }
    Ok(Output { report, csv: Some(csv) })
}

pub fn separate(run: &Run) -> e3lab::Result<Output> {
    let p = &run.config.params;
    let s0 = match run.config.initial {
        Initial::Given(s) => s,
        Initial::Random { range } => {
            uniform_state_where(&mut sampling::rng(run.seed), range, |s| chart_distance(s, p) > CHART_MARGIN)
        }
    };
    let mut report = Report::new();
    run.header(&mut report);
    report.info("initial", state_text(&s0));
    let v = sep_vars(&s0, p)?;
    for (name, z) in [("lambda1", v.lambda1), ("mu1", v.mu1), ("lambda2", v.lambda2), ("mu2", v.mu2)] {
        report.info(name, format!("{:.16e}{:+.16e}i", z.re, z.im));
    }
    report.check(
        "separation.canonicality",
        max_of(canonicality_residuals(&s0, p)?.iter().map(|z| z.norm())),
        1e-6,
    );
    let (r1, r2) = separation_relation_residuals(&s0, p)?;
    report.check("separation.curve", r1, 1e-8);
    report.check("separation.lambda2_mu2", r2, 1e-12);
    let traj = run.trajectory(&s0, &run.config.case)?;
    let c0 = v.lambda2 * v.mu2;
    let mut csv = String::from("t, re_lambda1, im_lambda1, re_mu1, im_mu1, re_lambda2, im_lambda2, re_mu2, im_mu2\n");
    let mut drift: f64 = 0.0;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        match sep_vars(s, p) {
            Ok(w) => {
                drift = drift.max((w.lambda2 * w.mu2 - c0).norm());
                let cells: Vec<String> = [w.lambda1, w.mu1, w.lambda2, w.mu2]
                    .iter()
                    .flat_map(|z| [z.re, z.im])
                    .map(|x| format!("{x:.16e}"))
                    .collect();
                writeln!(csv, "{t:.16e}, {}", cells.join(", ")).unwrap();
            }
            Err(_) => writeln!(csv, "{t:.16e}, NaN, NaN, NaN, NaN, NaN, NaN, NaN, NaN").unwrap(),
        }
    }
    report.check("separation.lambda2_mu2_constancy", drift, 1e-8);
    Ok(Output { report, csv: Some(csv) })
}

pub fn curves(run: &Run) -> e3lab::Result<Output> {
    let p = &run.config.params;
    let s0 = run.initial_state();
    let mut report = Report::new();
    run.header(&mut report);
    report.info("initial", state_text(&s0));
    let k = reduced_constants(&s0, p);
    match verify_isomorphism(&s0, p) {
        Ok(iso) => {
            report.info("j_spectral", format!("{:.16e}", iso.j_spectral));
            report.info("j_reduced", format!("{:.16e}", iso.j_reduced));
            report.check("curves.j_invariant", iso.gap, 1e-8);
        }
        Err(e) => report.skip("curves.j_invariant", &e.to_string().replace(' ', "_")),
    }
    let case = &run.config.case;
    let (u0, udot0) = e3lab::reduction::u_and_udot(&s0, p, case);
    let mut csv = String::from("t, u_closed, u_numeric\n");
    match solve_u_closed_form(&k, p.i2(), u0, udot0.signum()) {
        Ok(sol) => {
            report.info("branch", if sol.branch == Branch::Bounded { "bounded" } else { "unbounded" });
            report.info("period", format!("{:.16e}", sol.period()));
            let traj = run.trajectory(&s0, case)?;
            let series = u_series(&traj);
            let mut gap: f64 = 0.0;
            for (t, u) in series.times.iter().zip(&series.u) {
                let closed = sol.u(*t)?;
                gap = gap.max((closed - u).abs());
                writeln!(csv, "{t:.16e}, {closed:.16e}, {u:.16e}").unwrap();
            }
            report.check("curves.closed_form", gap, 1e-6);
        }
        Err(e) => report.skip("curves.closed_form", &e.to_string().replace(' ', "_")),
    }
    Ok(Output { report, csv: Some(csv) })
}

pub fn hess(run: &Run) -> e3lab::Result<Output> {
    let h = &run.config.hess;
    let [i1, i2, i3] = h.inertia;
    let hp = ha_admissible_params(InertiaTriple::new(i1, i2, i3)?, h.scale)?;
    let mut rng = run.rng(7);
    let s0 = sample_on_surface(&mut rng, &hp, sampling::DEFAULT_RANGE);
    let mut report = Report::new();
    report.info("seed", run.seed);
    report.info("inertia", format!("{i1},{i2},{i3}"));
    report.info("x0", format!("{:.16e}", hp.x0()));
    report.info("z0", format!("{:.16e}", hp.z0()));
    report.info("initial", state_text(&s0));
    let traj = integrate_ha(&s0, &hp, &h.settings)?;
    let d = traj.drift();
    report.check("hess.invariant_relation", d.invariant_relation, 1e-9);
    report.info("hess.log_amplification", format!("{:.6e}", d.log_amplification));
    report.check("hess.energy", d.energy, 1e-7);
    report.info("hess.energy_omega_drift", format!("{:.6e}", d.energy_omega));
    report.check("hess.casimirs", d.f1.max(d.f2), 1e-7);
    let (mut mu2, mut literal, mut index3, mut tangency): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..run.config.samples {
        let s = sample_on_surface(&mut rng, &hp, sampling::DEFAULT_RANGE);
        let eq = verify_ha_equivalence(&s, &hp)?;
        literal = literal.max(eq.literal);
        index3 = index3.max(eq.index3);
        mu2 = mu2.max(ha_separation(&s, &hp)?.mu2_abs);
        tangency = tangency.max(relation_rate(&s, &hp).abs());
    }
    report.check("hess.tangency", tangency, 1e-12);
    report.check("hess.mu2", mu2, 1e-10);
    report.info(CouplingCandidate::Literal.name(), format!("{literal:.6e}"));
    report.info(CouplingCandidate::Index3.name(), format!("{index3:.6e}"));
    let best = if index3 <= literal { CouplingCandidate::Index3 } else { CouplingCandidate::Literal };
    report.info("hess.matched", best.name());
    report.check("hess.equivalence", literal.min(index3), 1e-10);
    let mut csv = String::from("t, M1, M2, M3, G1, G2, G3, relation, a_value\n");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let row = [
            *t,
            s.m.x,
            s.m.y,
            s.m.z,
            s.gamma.x,
            s.gamma.y,
            s.gamma.z,
            e3lab::hess::invariant_relation(s, &hp),
            best.value(s, &hp),
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(csv, "{}", cells.join(", ")).unwrap();
    }
    Ok(Output { report, csv: Some(csv) })
}
