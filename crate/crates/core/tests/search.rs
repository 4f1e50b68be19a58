use rado_core::search::{
    enumerate_valid_colorings, export_cnf, find_valid_coloring, rado_number, verify_certificate,
    verify_periodic_certificate, DEFAULT_ENUMERATION_LIMIT,
};
use rado_core::{Coloring, ColorSystem, LinearEquation, PeriodicPattern, RadoResult, SearchConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cfg(workers: usize) -> SearchConfig {
    SearchConfig { workers, split_depth: 4, time_budget: None }
}

fn systems() -> Vec<ColorSystem> {
    let eq = |s: &str| s.parse::<LinearEquation>().unwrap();
    vec![
        ColorSystem::uniform(eq("x+y=z"), 2).unwrap(),
        ColorSystem::uniform(eq("x+y=z"), 3).unwrap(),
        ColorSystem::uniform(eq("x1+x2+6*x3=4*x4"), 2).unwrap(),
        ColorSystem::uniform(eq("x1+x2+x3+2*x4=4*x5"), 2).unwrap(),
        ColorSystem::schur_vs_multiple(3).unwrap(),
        ColorSystem::schur_vs_shift(4).unwrap(),
        ColorSystem::pair(eq("x+y=z"), eq("x1+x2+x3=2*x4")),
    ]
}

/// Random equation with arity `2..=5` and coefficients in `1..=6`.
fn random_equation(rng: &mut StdRng) -> LinearEquation {
    let m = rng.gen_range(2..=5usize);
    let left = rng.gen_range(1..m);
    let lhs: Vec<(i64, usize)> = (1..=left).map(|s| (rng.gen_range(1..=6), s)).collect();
    let rhs: Vec<(i64, usize)> = (left + 1..=m).map(|s| (rng.gen_range(1..=6), s)).collect();
    LinearEquation::new(&lhs, &rhs).unwrap()
}

fn random_shifted_equation(rng: &mut StdRng) -> LinearEquation {
    let m = rng.gen_range(2..=3usize);
    let left = rng.gen_range(1..m);
    let lhs: Vec<(i64, usize)> = (1..=left).map(|s| (rng.gen_range(1..=6), s)).collect();
    let rhs: Vec<(i64, usize)> = (left + 1..=m).map(|s| (rng.gen_range(1..=6), s)).collect();
    LinearEquation::with_constants(&lhs, rng.gen_range(1..=6), &rhs, 0).unwrap()
}

#[test]
fn certificates_verify_and_cannot_be_extended() {
    for sys in systems() {
        let res = rado_number(&sys, 200, &cfg(1)).unwrap();
        let RadoResult::Found { value, certificate } = &res else { panic!("{sys} unresolved") };
        assert_eq!(certificate.len() as u32, value - 1);
        assert!(verify_certificate(&sys, certificate).unwrap(), "{sys}");
        assert_eq!(find_valid_coloring(&sys, *value, &cfg(1)).unwrap(), None, "{sys}");
        assert_eq!(find_valid_coloring(&sys, value - 1, &cfg(1)).unwrap().as_ref(), Some(certificate));
    }
}

#[test]
fn prefixes_of_valid_colorings_are_valid() {
    for sys in systems() {
        for n in 2..=12 {
            if let Some(c) = find_valid_coloring(&sys, n, &cfg(1)).unwrap() {
                assert!(verify_certificate(&sys, &c).unwrap());
                assert!(verify_certificate(&sys, &c.prefix(n as usize - 1)).unwrap(), "{sys} n={n}");
            }
        }
    }
}

#[test]
fn permuting_colors_keeps_validity() {
    let sys = ColorSystem::uniform("x+y=z".parse().unwrap(), 3).unwrap();
    let c = find_valid_coloring(&sys, 13, &cfg(1)).unwrap().unwrap();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in perms {
        assert!(verify_certificate(&sys, &c.permuted(&p).unwrap()).unwrap());
    }
    let sys = ColorSystem::uniform("x1+x2+5*x3=4*x4".parse().unwrap(), 2).unwrap();
    for c in enumerate_valid_colorings(&sys, 10, false, DEFAULT_ENUMERATION_LIMIT).unwrap() {
        assert!(verify_certificate(&sys, &c.permuted(&[1, 0]).unwrap()).unwrap());
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    for sys in systems() {
        let base = rado_number(&sys, 200, &cfg(1)).unwrap();
        let value = base.value().unwrap();
        for workers in [2, 4] {
            assert_eq!(rado_number(&sys, 200, &cfg(workers)).unwrap(), base);
            for n in [value / 2, value - 1, value] {
                assert_eq!(
                    find_valid_coloring(&sys, n, &cfg(workers)).unwrap(),
                    find_valid_coloring(&sys, n, &cfg(1)).unwrap(),
                    "{sys} n={n} workers={workers}"
                );
            }
        }
        assert_eq!(rado_number(&sys, 200, &cfg(1)).unwrap(), base);
    }
}

/// DPLL with unit propagation over DIMACS text; variables are `1..=n`.
fn dimacs_satisfiable(text: &str) -> bool {
    let mut vars = 0usize;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    for line in text.lines() {
        if line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            vars = rest.split_whitespace().next().unwrap().parse().unwrap();
            continue;
        }
        let lits: Vec<i64> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
        assert_eq!(lits.last(), Some(&0));
        clauses.push(lits[..lits.len() - 1].to_vec());
    }
    fn solve(clauses: &[Vec<i64>], assign: &mut Vec<i8>) -> bool {
        let value = |a: &Vec<i8>, l: i64| {
            let v = a[l.unsigned_abs() as usize];
            if v == 0 {
                0
            } else if (v > 0) == (l > 0) {
                1
            } else {
                -1
            }
        };
        let mut trail = Vec::new();
        loop {
            let mut unit = None;
            for c in clauses {
                let mut open = Vec::new();
                let mut sat = false;
                for &l in c {
                    match value(assign, l) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => open.push(l),
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                if open.is_empty() {
                    for v in trail {
                        assign[v] = 0;
                    }
                    return false;
                }
                if open.len() == 1 {
                    unit = Some(open[0]);
                    break;
                }
            }
            match unit {
                Some(l) => {
                    let v = l.unsigned_abs() as usize;
                    assign[v] = if l > 0 { 1 } else { -1 };
                    trail.push(v);
                }
                None => break,
            }
        }
        let Some(v) = (1..assign.len()).find(|&v| assign[v] == 0) else { return true };
        for phase in [1i8, -1] {
            assign[v] = phase;
            if solve(clauses, assign) {
                return true;
            }
            assign[v] = 0;
        }
        for v in trail {
            assign[v] = 0;
        }
        false
    }
    solve(&clauses, &mut vec![0; vars + 1])
}

#[test]
fn cnf_satisfiability_matches_search() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut list: Vec<ColorSystem> = systems().into_iter().filter(|s| s.num_colors() == 2).collect();
    for _ in 0..12 {
        list.push(ColorSystem::pair(random_equation(&mut rng), random_equation(&mut rng)));
    }
    for sys in &list {
        for n in 1..=18 {
            let cnf = export_cnf(sys, n).unwrap();
            let found = find_valid_coloring(sys, n, &cfg(1)).unwrap().is_some();
            assert_eq!(dimacs_satisfiable(&cnf), found, "{sys} n={n}");
        }
    }
}

#[test]
fn periodic_certificates_color_long_ranges() {
    let parity = PeriodicPattern::parity();
    for a in [1, 3, 5, 7] {
        let sys = ColorSystem::schur_vs_shift(a).unwrap();
        assert!(verify_periodic_certificate(&sys, &parity).unwrap());
        for n in [20, 200] {
            assert!(find_valid_coloring(&sys, n, &cfg(1)).unwrap().is_some(), "a={a} n={n}");
            assert!(verify_certificate(&sys, &parity.unroll(n as usize)).unwrap());
        }
    }
    // Residue 0 solves every homogeneous equation modulo the period, so the
    // random sample carries constant terms.
    let mut rng = StdRng::seed_from_u64(11);
    let mut hits = 0;
    for _ in 0..400 {
        let sys = ColorSystem::pair(random_shifted_equation(&mut rng), random_shifted_equation(&mut rng));
        let p = rng.gen_range(1..=5usize);
        let pattern = PeriodicPattern::new((0..p).map(|_| rng.gen_range(0..2u8)).collect(), 2).unwrap();
        if verify_periodic_certificate(&sys, &pattern).unwrap() {
            hits += 1;
            for n in [10 * p, 100 * p] {
                assert!(verify_certificate(&sys, &pattern.unroll(n)).unwrap(), "{sys} {pattern:?}");
                assert!(find_valid_coloring(&sys, n as u32, &cfg(1)).unwrap().is_some());
            }
        }
    }
    assert!(hits > 10, "only {hits} periodic certificates in the sample");
}

#[test]
fn unresolved_search_returns_a_witness() {
    let sys = ColorSystem::schur_vs_shift(3).unwrap();
    match rado_number(&sys, 60, &cfg(1)).unwrap() {
        RadoResult::Unresolved { searched_up_to, witness } => {
            assert_eq!(searched_up_to, 60);
            assert_eq!(witness.len(), 60);
            assert!(verify_certificate(&sys, &witness).unwrap());
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn time_budget_is_reported() {
    let sys = ColorSystem::uniform("x+y=z".parse().unwrap(), 5).unwrap();
    let c = SearchConfig::with_budget(std::time::Duration::from_millis(50));
    let err = rado_number(&sys, 300, &c).unwrap_err();
    assert_eq!(err, rado_core::Error::BudgetExceeded);
}

#[test]
fn certificate_text_round_trip() {
    let sys = ColorSystem::uniform("x+y=z".parse().unwrap(), 3).unwrap();
    let c = find_valid_coloring(&sys, 13, &cfg(1)).unwrap().unwrap();
    let back = Coloring::from_certificate(&c.to_certificate()).unwrap();
    assert_eq!(back, c);
}
