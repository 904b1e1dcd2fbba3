mod common;

use common::*;
use dyadic_core::bmo::{bmo2_haar, bmo_norm, bmo_r_norm};
use dyadic_core::haar::{haar_coefficient, haar_function, HaarAnalysis};
use dyadic_core::maximal::{
    maximal, multilinear_maximal, multilinear_maximal_r, sharp_maximal, sharp_maximal_delta,
};
use dyadic_core::norms::{kolmogorov_ratio, weak_lp_norm};
use dyadic_core::operators::{commutator, haar_multiplier, paraproduct, pi_b, slot_value};
use dyadic_core::weights::{
    a1_characteristic, ainf_estimate, ap_characteristic, multilinear_ap_characteristic,
};
use dyadic_core::{
    ExponentVector, MultiIndex, StepFunction, SymbolSequence, Weight, WeightVector, Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alpha(s: &str) -> MultiIndex {
    s.parse().unwrap()
}

fn two_valued(w: Window) -> Vec<f64> {
    (0..w.cell_count())
        .map(|i| {
            let x = w.cell_left(i);
            if (0.0..0.5).contains(&x) {
                2.0
            } else {
                1.0
            }
        })
        .collect()
}

#[test]
fn enumeration_matches_reference() {
    let w = Window::new(0, 1, 0).unwrap();
    assert_eq!(
        w.enumerate(),
        vec![iv(0, -1), iv(0, 0), iv(1, -2), iv(1, -1), iv(1, 0), iv(1, 1)]
    );
    let mut anc = Window::new(0, 0, 1).unwrap().enumerate();
    anc.sort();
    let mut want = vec![iv(0, -1), iv(0, 0), iv(-1, -1), iv(-1, 0)];
    want.sort();
    assert_eq!(anc, want);
    assert_eq!(Window::new(1, 1, 0).unwrap().interval_count(), 14);
    for (k, n, a) in [(0, 0, 0), (1, 3, 2), (2, 2, 16), (-1, 3, 1), (3, -2, 4)] {
        let w = Window::new(k, n, a).unwrap();
        assert_eq!(w.enumerate(), all_intervals(&w), "K={k} N={n} A={a}");
    }
}

#[test]
fn fixture_values() {
    let w = Window::new(0, 3, 4).unwrap();
    let left = StepFunction::indicator(w, &iv(1, 0), 1.0).unwrap();
    assert_eq!(haar_coefficient(&left, &iv(0, 0)).unwrap(), -0.5);
    assert_eq!(slot_value(&left, &iv(0, 0), 0).unwrap(), -0.5);
    assert_eq!(slot_value(&left, &iv(0, 0), 1).unwrap(), 0.5);
    let h = haar_function(&iv(0, 0), &w).unwrap();
    assert_eq!(slot_value(&h, &iv(0, 0), 1).unwrap(), 0.0);
    let one = StepFunction::indicator(w, &iv(0, 0), 1.0).unwrap();
    assert_eq!(dyadic_core::haar::average(&one, &iv(-1, 0)).unwrap(), 0.5);

    // P^(0,1)(h, 1_[0,1)) = h
    let p = paraproduct(&alpha("01"), &[h.clone(), one.clone()]).unwrap();
    assert_cells_close(p.cells(), h.cells(), 1e-15, "paraproduct");
    let swapped = paraproduct(&alpha("10"), &[one.clone(), h.clone()]).unwrap();
    assert_eq!(p, swapped);

    // classical π_b f
    let pb = pi_b(&h, &alpha("1"), &[one.clone()]).unwrap();
    assert_cells_close(pb.cells(), h.cells(), 1e-15, "pi_b");
}

#[test]
fn commutator_matches_definition() {
    let w = Window::new(0, 3, 3).unwrap();
    let b = StepFunction::indicator(w, &iv(1, 0), 1.0).unwrap();
    let eps = SymbolSequence::constant(1.0);
    let got = commutator(&b, &eps, &alpha("0"), 1, &[b.clone()]).unwrap();
    let tb = multilinear_sum(&w, &[0], &[b.cells()], |_| 1.0);
    let bb: Vec<f64> = b.cells().iter().map(|v| v * v).collect();
    let tbb = multilinear_sum(&w, &[0], &[&bb], |_| 1.0);
    let want: Vec<f64> = (0..w.cell_count())
        .map(|c| b.cells()[c] * tb[c] - tbb[c])
        .collect();
    assert_cells_close(got.cells(), &want, 1e-13, "commutator");
}

#[test]
fn operators_match_direct_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let w = random_window(&mut rng);
        let m = rng.random_range(1..=3);
        let fs: Vec<StepFunction> = (0..m).map(|_| step(w, random_cells(&mut rng, &w))).collect();
        let raw: Vec<&[f64]> = fs.iter().map(|f| f.cells()).collect();
        let a = loop {
            let a = MultiIndex::new((0..m).map(|_| rng.random_range(0..2)).collect()).unwrap();
            if a.in_u_m() {
                break a;
            }
        };
        let got = paraproduct(&a, &fs).unwrap();
        let want = multilinear_sum(&w, a.bits(), &raw, |_| 1.0);
        assert_cells_close(got.cells(), &want, 1e-12, &format!("P trial {trial}"));

        let b = step(w, random_cells(&mut rng, &w));
        let got = pi_b(&b, &a, &fs).unwrap();
        let mut with_b = vec![b.cells()];
        with_b.extend(raw.iter().copied());
        let want = multilinear_sum(&w, a.with_leading_zero().bits(), &with_b, |_| 1.0);
        assert_cells_close(got.cells(), &want, 1e-12, &format!("pi_b trial {trial}"));

        let mut eps = SymbolSequence::constant(rng.random_range(-1.0..1.0));
        for i in w.enumerate() {
            if rng.random_bool(0.3) {
                eps.set(i, rng.random_range(-2.0..2.0));
            }
        }
        let got = haar_multiplier(&eps, &a, &fs).unwrap();
        let want = multilinear_sum(&w, a.bits(), &raw, |i| eps.get(i));
        assert_cells_close(got.cells(), &want, 1e-12, &format!("T trial {trial}"));
    }
}

#[test]
fn analysis_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let w = random_window(&mut rng);
        let cells = random_cells(&mut rng, &w);
        let a = HaarAnalysis::new(&step(w, cells.clone()));
        for (idx, i) in all_intervals(&w).iter().enumerate() {
            assert!(close(a.averages()[idx], average(&w, &cells, i), 1e-13));
            assert!(close(a.coefficients()[idx], coefficient(&w, &cells, i), 1e-13));
        }
    }
}

#[test]
fn maximal_operators_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..30 {
        let w = random_window(&mut rng);
        let cells = random_cells(&mut rng, &w);
        let f = step(w, cells.clone());
        let tag = format!("trial {trial}");
        assert_cells_close(maximal(&f).cells(), &common::maximal(&w, &cells), 1e-13, &tag);
        assert_cells_close(
            sharp_maximal(&f).cells(),
            &common::sharp_maximal(&w, &cells),
            1e-13,
            &tag,
        );
        let delta = 0.5;
        let powered: Vec<f64> = cells.iter().map(|v| v.abs().powf(delta)).collect();
        let want: Vec<f64> = common::sharp_maximal(&w, &powered)
            .into_iter()
            .map(|v| v.powf(1.0 / delta))
            .collect();
        assert_cells_close(
            sharp_maximal_delta(&f, delta).unwrap().cells(),
            &want,
            1e-12,
            &tag,
        );
        let g = step(w, random_cells(&mut rng, &w));
        let (fa, ga) = (abs_cells(&cells), abs_cells(g.cells()));
        let want = max_containing(&w, |i| average(&w, &fa, i) * average(&w, &ga, i));
        assert_cells_close(
            multilinear_maximal(&[f.clone(), g.clone()]).unwrap().cells(),
            &want,
            1e-13,
            &tag,
        );
        let (f2, g2): (Vec<f64>, Vec<f64>) = (
            fa.iter().map(|v| v * v).collect(),
            ga.iter().map(|v| v * v).collect(),
        );
        let want = max_containing(&w, |i| {
            average(&w, &f2, i).sqrt() * average(&w, &g2, i).sqrt()
        });
        assert_cells_close(
            multilinear_maximal_r(&[f, g], 2.0).unwrap().cells(),
            &want,
            1e-13,
            &tag,
        );
    }
}

#[test]
fn maximal_fixtures() {
    let w = Window::new(2, 2, 0).unwrap();
    let one = StepFunction::indicator(w, &iv(0, 0), 1.0).unwrap();
    let mm = multilinear_maximal(&[one.clone(), one.clone()]).unwrap();
    let mr = multilinear_maximal_r(&[one.clone(), one.clone()], 2.0).unwrap();
    for c in 0..w.cell_count() {
        if (1.0..2.0).contains(&w.cell_left(c)) {
            assert_eq!(mm.cells()[c], 0.25);
            assert!(close(mr.cells()[c], 0.5, 1e-15));
        }
    }
    let m = maximal(&one);
    assert_eq!(m.cells(), common::maximal(&w, one.cells()).as_slice());

    let h = haar_function(&iv(0, 0), &Window::new(0, 3, 0).unwrap()).unwrap();
    let sd = sharp_maximal_delta(&h, 0.5).unwrap();
    let want = common::sharp_maximal(h.window(), &abs_cells(h.cells()));
    let want: Vec<f64> = want.into_iter().map(|v| v * v).collect();
    assert_cells_close(sd.cells(), &want, 1e-15, "sharp delta of h");
}

#[test]
fn weight_fixtures() {
    let w = Window::new(2, 1, 0).unwrap();
    let cells = two_valued(w);
    let weight = Weight::new(step(w, cells.clone())).unwrap();
    let e = ap_characteristic(&weight, 2.0).unwrap();
    let (oracle, at) = ap(&w, &cells, 2.0);
    assert_eq!(e.value, 1.125);
    assert!(close(oracle, 1.125, 1e-15));
    assert_eq!(e.interval, at);
    assert_eq!(e.interval, iv(0, 0));
    assert!(close(a1_characteristic(&weight).value, a1(&w, &cells), 1e-15));

    let grid = [1.5, 2.0, 4.0, 8.0];
    let est = ainf_estimate(&weight, &grid).unwrap();
    let want = grid
        .iter()
        .map(|&p| ap(&w, &cells, p).0)
        .fold(f64::INFINITY, f64::min);
    assert!(close(est.value, want, 1e-14));

    let wv = WeightVector::new(
        vec![weight.clone(), Weight::uniform(w)],
        ExponentVector::new(vec![2.0, 2.0]).unwrap(),
    )
    .unwrap();
    let ones = vec![1.0; w.cell_count()];
    let got = multilinear_ap_characteristic(&wv).unwrap().value;
    let want = multi_ap(&w, &[&cells, &ones], &[2.0, 2.0]);
    assert!(got.is_finite() && got >= 1.0);
    assert!(close(got, want, 1e-14), "{got} vs {want}");
}

#[test]
fn weights_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..30 {
        let w = random_window(&mut rng);
        let cells = random_weight_cells(&mut rng, &w);
        let weight = Weight::new(step(w, cells.clone())).unwrap();
        for p in [1.25, 2.0, 3.5] {
            let e = ap_characteristic(&weight, p).unwrap();
            let (v, at) = ap(&w, &cells, p);
            assert!(close(e.value, v, 1e-12), "p={p}: {} vs {v}", e.value);
            assert!(close(ap(&w, &cells, p).0, e.value, 1e-12) || e.interval == at);
        }
        assert!(close(a1_characteristic(&weight).value, a1(&w, &cells), 1e-13));
        let other = random_weight_cells(&mut rng, &w);
        for ps in [[2.0, 2.0], [1.0, 3.0], [1.5, 4.0]] {
            let wv = WeightVector::new(
                vec![weight.clone(), Weight::new(step(w, other.clone())).unwrap()],
                ExponentVector::new(ps.to_vec()).unwrap(),
            )
            .unwrap();
            let got = multilinear_ap_characteristic(&wv).unwrap().value;
            let want = multi_ap(&w, &[&cells, &other], &ps);
            assert!(close(got, want, 1e-12), "{ps:?}: {got} vs {want}");
        }
    }
}

#[test]
fn bmo_fixtures_and_reference() {
    let w = Window::new(1, 3, 0).unwrap();
    let h = haar_function(&iv(0, 0), &w).unwrap();
    let e = bmo_norm(&h);
    assert_eq!((e.value, e.interval), (1.0, iv(0, 0)));
    let left = StepFunction::indicator(w, &iv(1, 0), 1.0).unwrap();
    assert_eq!(bmo_norm(&left).value, bmo_r(&w, left.cells(), 1.0));
    assert_eq!(
        common::mean_oscillation_r(&w, left.cells(), &iv(0, 0), 1.0),
        0.5
    );

    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..30 {
        let w = random_window(&mut rng);
        let cells = random_cells(&mut rng, &w);
        let b = step(w, cells.clone());
        assert!(close(bmo_norm(&b).value, bmo_r(&w, &cells, 1.0), 1e-13));
        for r in [0.5, 2.0, 3.0] {
            assert!(close(bmo_r_norm(&b, r).unwrap().value, bmo_r(&w, &cells, r), 1e-12));
        }
        let energy = all_intervals(&w)
            .iter()
            .map(|i| haar_energy(&w, &cells, i))
            .fold(0.0, f64::max)
            .sqrt();
        assert!(close(bmo2_haar(&b).value, energy, 1e-13));
    }
}

#[test]
fn norm_fixtures() {
    let w = Window::new(0, 2, 0).unwrap();
    let f = step(w, vec![0.0, 0.0, 0.0, 0.0, 2.0, 2.0, -1.0, 1.0]);
    assert_eq!(weak_lp_norm(&f, 1.0, &Weight::uniform(w)).unwrap(), 1.0);
    let h = haar_function(&iv(0, 0), &w).unwrap();
    assert_eq!(kolmogorov_ratio(&h, &iv(0, 0), 0.25, 0.5).unwrap(), 1.0);
}
