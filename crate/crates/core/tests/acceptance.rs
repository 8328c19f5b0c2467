//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p ising-iom --test acceptance -- --nocapture` to see the
//! lines when everything passes.

use std::time::{Duration, Instant};

use ising_iom::characters::{compare_forms, compare_limit, DiagnosticContext, Sector};
use ising_iom::exact::{int, rat, to_f64};
use ising_iom::iom::{
    continuum_consistency, moment_sum, odd_spectrum_deviation, sin_even_sum_direct,
    sin_even_sum_exact, sin_odd_sum_closed, sin_odd_sum_direct,
};
use ising_iom::operator::{commutator, relative_distance, Operator};
use ising_iom::spectrum::match_spectrum;
use ising_iom::tl::{build_d_all, iom_even_per_site, projectors_with, tl_residuals, IomTower};
use ising_iom::transfer::{
    crossing_residual, extract_involution, transfer_polynomial, verify_inversion_with,
};

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, title: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome {
        id,
        title,
        pass,
        detail,
    }
}

fn c1_tl_relations() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for l in 2..=8 {
        let r = tl_residuals(l).unwrap();
        worst = worst.max(r.square).max(r.braid).max(r.commuting);
    }
    let elapsed = start.elapsed();
    outcome(
        "1",
        "TL relations, L = 2..8",
        worst <= 1e-9 && elapsed <= Duration::from_secs(30),
        format!(
            "max residual {worst:.2e} (tol 1e-9), {:.2} s (limit 30 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_crossing() -> Outcome {
    let r = crossing_residual(20).unwrap();
    outcome(
        "2",
        "crossing relation, 8 spin triples x 20 u",
        r <= 1e-13,
        format!("max residual {r:.2e} (tol 1e-13)"),
    )
}

fn c3_inversion() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for l in 2..=8 {
        let tp = transfer_polynomial(l).unwrap();
        let r = extract_involution(&tp).unwrap();
        let id = Operator::identity(l).unwrap();
        let square = relative_distance(&r.matmul(&r).unwrap(), &id).unwrap();
        worst.1 = worst.1.max(square);
        for x in [0.3, 0.5, 0.7] {
            let rep = verify_inversion_with(&tp, &r, x).unwrap();
            worst.0 = worst.0.max(rep.residual);
            worst.2 = worst.2.max(rep.commutator_residual);
        }
    }
    outcome(
        "3",
        "inversion identity, L = 2..8, x in {0.3, 0.5, 0.7}",
        worst.0 <= 1e-8 && worst.1 <= 1e-8 && worst.2 <= 1e-8,
        format!(
            "identity {:.2e}, R^2 = 1 {:.2e}, [R, T] {:.2e} (tol 1e-8)",
            worst.0, worst.1, worst.2
        ),
    )
}

fn c4_decomposition() -> Outcome {
    let mut worst = 0.0f64;
    let mut at = (0, 0);
    for l in 2..=8 {
        let tp = transfer_polynomial(l).unwrap();
        let tower = IomTower::for_order(l, l).unwrap();
        let ds = build_d_all(&tower, l).unwrap();
        for (n, d) in ds.iter().enumerate() {
            let r = relative_distance(d, tp.coeff(n)).unwrap();
            if r > worst {
                worst = r;
                at = (l, n);
            }
        }
    }
    outcome(
        "4",
        "D_n from Bell polynomials of the IOM, n <= L, L = 2..8",
        worst <= 1e-7,
        format!("max relative distance {worst:.2e} at (L, n) = {at:?} (tol 1e-7)"),
    )
}

fn c5_spectrum() -> Outcome {
    let mut dev = 0.0f64;
    let mut trace = 0.0f64;
    let mut offenders = 0;
    for l in 2..=8 {
        for x in [0.3, 0.7] {
            let rep = match_spectrum(l, x).unwrap();
            dev = dev.max(rep.max_deviation);
            trace = trace.max(rep.trace_discrepancy);
            offenders += rep.offenders.len();
        }
    }
    outcome(
        "5",
        "spectrum factorization, L = 2..8, x in {0.3, 0.7}",
        dev <= 1e-8 && trace <= 1e-8 && offenders == 0,
        format!("max deviation {dev:.2e}, trace {trace:.2e} (tol 1e-8)"),
    )
}

fn c6_iom_eigenvalues() -> Outcome {
    let mut trig = 0.0f64;
    for l in 1..=12 {
        for n in 1..=6 {
            for delta in 0..=1 {
                let direct = sin_odd_sum_direct(l, delta, n);
                let closed = sin_odd_sum_closed(l, delta, n);
                trig = trig.max((direct - closed).abs() / direct.abs().max(1.0));
            }
        }
    }
    let mut spectra = 0.0f64;
    for l in 2..=8 {
        let max_k = l.min(4);
        let tower = IomTower::build(l, max_k).unwrap();
        for k in 1..=max_k {
            spectra = spectra.max(odd_spectrum_deviation(&tower, k).unwrap());
        }
    }
    let table = [-2i64, -36, -2400, -352_800, -91_445_760];
    let mut even_bad = 0;
    let mut even_dev = 0.0f64;
    for (i, &v) in table.iter().enumerate() {
        let n = i + 1;
        even_bad += usize::from(iom_even_per_site(n) != rat(v, 1));
        for l in n + 1..=12 {
            // A_{2n} = -(2n-1)! 2^{2n} sum_k sin^{2n} t_k
            let exact = sin_even_sum_exact(l, n).unwrap();
            let scale = to_f64(&ising_iom::exact::rat_int(
                ising_iom::exact::factorial(2 * n as u64 - 1) << (2 * n),
            ));
            even_bad += usize::from(
                -(ising_iom::exact::rat_int(
                    ising_iom::exact::factorial(2 * n as u64 - 1) << (2 * n),
                )) * exact
                    != rat(v * l as i64, 1),
            );
            for delta in 0..=1 {
                let direct = -scale * sin_even_sum_direct(l, delta, n);
                even_dev = even_dev
                    .max((direct - (v * l as i64) as f64).abs() / (v * l as i64).abs() as f64);
            }
        }
    }
    outcome(
        "6",
        "IOM eigenvalues: trig sums, A_1..A_7 spectra, even values",
        trig <= 1e-10 && spectra <= 1e-8 && even_bad == 0 && even_dev <= 1e-10,
        format!(
            "closed vs direct {trig:.2e} (tol 1e-10), operator spectra {spectra:.2e} (tol 1e-8), \
             even exact mismatches {even_bad}, even trig {even_dev:.2e}"
        ),
    )
}

fn c7_moments() -> Outcome {
    let nonzero: Vec<(usize, usize)> = (1..=8)
        .flat_map(|n| (1..n).map(move |m| (n, m)))
        .filter(|&(n, m)| moment_sum(n, m) != int(0))
        .collect();
    outcome(
        "7",
        "vanishing moments, n <= 8, m < n",
        nonzero.is_empty(),
        format!("non-zero entries {nonzero:?} (exact)"),
    )
}

fn c8_continuum() -> Outcome {
    let c = continuum_consistency(&[], 1, &[32, 64, 128]).unwrap();
    outcome(
        "8",
        "1/L expansion, ground state, n = 1",
        c.relative_error <= 0.01 && c.delta == 1,
        format!(
            "extrapolated {:.8} vs predicted {:.8} (relative {:.2e}, tol 1e-2)",
            c.extrapolated, c.predicted, c.relative_error
        ),
    )
}

fn c9_characters() -> Vec<Outcome> {
    let mut first = None;
    for l in 0..=12 {
        for delta in 0..=1 {
            for sector in Sector::BOTH {
                let c = compare_forms(l, delta, sector, 40).unwrap();
                if c.first_difference.is_some() && first.is_none() {
                    first = Some((l, delta, sector, c.first_difference));
                }
            }
        }
    }
    let mut out = vec![outcome(
        "9a",
        "characters: fermionic = bosonic = brute force, L <= 12",
        first.is_none(),
        format!("first mismatch {first:?}"),
    )];
    let mut mismatches = Vec::new();
    for delta in 0..=1 {
        for sector in Sector::BOTH {
            let c = compare_limit(delta, sector).unwrap();
            if let Some(e) = c.first_difference {
                mismatches.push(format!(
                    "delta={delta} {sector} at doubled exponent {e}: computed {} listed {}",
                    c.computed.coeff(e),
                    c.reference.coeff(e)
                ));
            }
        }
    }
    let q13 = compare_limit(0, Sector::Plus).unwrap().computed.coeff(26);
    out.push(outcome(
        "9b",
        "characters: L = infinity series against the four listed expansions",
        mismatches.is_empty() && q13 == int(9),
        format!("q^13 coefficient (delta=0, plus) = {q13}; mismatches: {mismatches:?}"),
    ));
    out
}

fn c10_projectors() -> Outcome {
    let mut worst = 0.0f64;
    let mut sign_pattern = true;
    for l in 2..=7 {
        let tp = transfer_polynomial(l).unwrap();
        let r = extract_involution(&tp).unwrap();
        let tower = IomTower::for_order(l, l).unwrap();
        let p = projectors_with(&tower, &r).unwrap();
        worst = worst.max(p.bell_residual);
        // Pi_+ + Pi_- = 1 and R Pi_+- = +-Pi_+-
        let sum = p.plus.add(&p.minus).unwrap();
        let id = Operator::identity(l).unwrap();
        sign_pattern &= relative_distance(&sum, &id).unwrap() <= 1e-8;
        sign_pattern &= relative_distance(&r.matmul(&p.plus).unwrap(), &p.plus).unwrap() <= 1e-8;
        sign_pattern &=
            commutator(&r, &p.minus).unwrap().frobenius_norm() <= 1e-8 * p.minus.frobenius_norm();
    }
    outcome(
        "10",
        "projector Bell identity, L = 2..7",
        worst <= 1e-8 && sign_pattern,
        format!("max residual {worst:.2e} (tol 1e-8), sector signs consistent: {sign_pattern}"),
    )
}

fn c11_diagnostic() -> Outcome {
    let ctx = DiagnosticContext::new(4, 0.15).unwrap();
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for m in 1..=8 {
        let rep = ctx.evaluate(m, 8.0).unwrap();
        worst = worst.max(rep.completeness_residual);
        for s in &rep.sectors {
            worst = worst.max(s.relative_deviation);
            if m == 8 {
                ratios.push(format!("{}: {:.4}", s.sector, s.ratio));
            }
        }
    }
    outcome(
        "11",
        "partition-function traces, L = 4, M <= 8",
        worst <= 1e-6,
        format!(
            "max relative deviation {worst:.2e} (tol 1e-6); Z_div chi / Z at M = 8 (not gated): {}",
            ratios.join(", ")
        ),
    )
}

#[test]
fn acceptance() {
    let mut all = vec![
        c1_tl_relations(),
        c2_crossing(),
        c3_inversion(),
        c4_decomposition(),
        c5_spectrum(),
        c6_iom_eigenvalues(),
        c7_moments(),
        c8_continuum(),
    ];
    all.extend(c9_characters());
    all.push(c10_projectors());
    all.push(c11_diagnostic());
    for o in &all {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>3} {mark}  {}: {}", o.id, o.title, o.detail);
    }
    let failed: Vec<&str> = all.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
