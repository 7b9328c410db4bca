#![allow(dead_code)]

use skc_core::election::{CandidateId, DodgsonTriple, Election};

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(m - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, m - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Every election with `n` votes over `m` candidates, `(m!)^n` of them.
pub fn all_profiles(m: usize, n: usize) -> Vec<Election> {
    let perms = permutations(m);
    let mut profiles: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for _ in 0..n {
        profiles = profiles
            .into_iter()
            .flat_map(|p| {
                perms.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    profiles
        .iter()
        .map(|rs| Election::from_rankings(m, rs).unwrap())
        .collect()
}

pub fn all_triples(m: usize, n: usize) -> Vec<DodgsonTriple> {
    all_profiles(m, n)
        .into_iter()
        .flat_map(|e| (0..m).map(move |c| DodgsonTriple::new(e.clone(), CandidateId(c)).unwrap()))
        .collect()
}
