use ising_iom::iom::a_odd_eigen;
use ising_iom::operator::{
    commutator, frobenius_distance, multiset_deviation, real_spectrum, Operator,
};
use ising_iom::spectrum::SpectrumState;
use ising_iom::tl::{hamiltonian_tower, tl_generator, IomTower};
use ising_iom::transfer::{build_transfer_x, transfer_polynomial, transfer_polynomial_with_nodes};

fn rel_commutator(a: &Operator, b: &Operator) -> f64 {
    commutator(a, b).unwrap().frobenius_norm() / (a.frobenius_norm() * b.frobenius_norm())
}

#[test]
fn transfer_matrices_commute() {
    for l in 2..=7 {
        let xs = [0.25, 0.6, 0.95];
        let ts: Vec<Operator> = xs
            .iter()
            .map(|&x| build_transfer_x(l, x).unwrap())
            .collect();
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                assert!(rel_commutator(&ts[i], &ts[j]) < 1e-13, "L={l}");
            }
        }
    }
}

#[test]
fn polynomial_reproduces_direct_transfer() {
    for l in 2..=8 {
        let tp = transfer_polynomial(l).unwrap();
        for x in [0.15, 0.4, 0.85, 1.0] {
            let direct = build_transfer_x(l, x).unwrap();
            let r = frobenius_distance(&tp.eval(x).unwrap(), &direct).unwrap()
                / direct.frobenius_norm();
            assert!(r < 1e-10, "L={l} x={x} r={r:.2e}");
        }
    }
}

#[test]
fn coefficients_do_not_depend_on_nodes() {
    let nodes = [0.2, 0.31, 0.44, 0.58, 0.69, 0.77, 0.9];
    let a = transfer_polynomial(6).unwrap();
    let b = transfer_polynomial_with_nodes(6, &nodes).unwrap();
    for n in 0..=6 {
        let d = frobenius_distance(a.coeff(n), b.coeff(n)).unwrap();
        assert!(d <= 1e-7 * a.coeff(n).frobenius_norm().max(1.0), "n={n}");
    }
    // D_0 is the identity
    let id = Operator::identity(6).unwrap();
    assert!(frobenius_distance(a.coeff(0), &id).unwrap() < 1e-9);
}

#[test]
fn iom_tower_commutes_with_itself_and_transfer() {
    let tower = IomTower::build(6, 4).unwrap();
    let t = build_transfer_x(6, 0.45).unwrap();
    for i in 1..=4 {
        assert!(rel_commutator(tower.odd(i), &t) < 1e-12, "A_{}", 2 * i - 1);
        for j in i + 1..=4 {
            assert!(rel_commutator(tower.odd(i), tower.odd(j)) < 1e-12);
        }
    }
}

#[test]
fn hamiltonian_is_sum_of_generators() {
    for l in 2..=6 {
        let mut sum = Operator::zeros(l).unwrap();
        for j in 1..=2 * l as isize {
            sum.add_scaled_mut(std::f64::consts::SQRT_2, &tl_generator(l, j).unwrap())
                .unwrap();
        }
        assert!(frobenius_distance(&hamiltonian_tower(l, 1).unwrap(), &sum).unwrap() < 1e-12);
    }
}

#[test]
fn first_integral_spectrum_from_free_fermions() {
    for l in 2..=7 {
        let tower = IomTower::build(l, 1).unwrap();
        let mut numeric = real_spectrum(tower.odd(1), 1e-9).unwrap();
        let mut analytic: Vec<f64> = (0..1usize << l)
            .map(|mask| a_odd_eigen(&SpectrumState::from_mask(l, mask).unwrap(), 1))
            .collect();
        numeric.sort_by(f64::total_cmp);
        analytic.sort_by(f64::total_cmp);
        assert!(multiset_deviation(&numeric, &analytic) < 1e-9, "L={l}");
    }
}
