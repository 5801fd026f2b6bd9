//! Acceptance run: one PASS/FAIL line per criterion, with wall-clock limits.
//!
//! Criteria listed in `KNOWN_FAILURES` are expected to print FAIL; the process
//! exits non-zero only when some criterion deviates from its expected outcome.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use fixdim::certify::{apply_mutation, builtin, mutation_sites, Checker};
use fixdim::convex::helly_fuzz;
use fixdim::duplication::{
    circled_beyond, circled_count, circled_formula, circled_scan_bound, family_claims, lemma_count_verify, render_table1_machine,
    table1, Family,
};
use fixdim::group::families::{
    column_conjugate_families, column_product_generators, commutator_relation_holds, conjugation_dihedrals,
    dihedral_product, in_column_product, niel, signed_permutation_generators, torsion_triple, DihedralFactor,
};
use fixdim::group::{
    braid_generator, braid_sigma_m, closure_enumerate, commutes, dihedral_check, normalizes, pairwise_commuting,
    FreeAutomorphism, GroupElement, Membership, NielsenKind,
};
use fixdim::simplicial::{join, reduced_euler_characteristic, z2_homology_ranks, SimplicialComplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose printed claim does not hold as stated.
const KNOWN_FAILURES: &[u32] = &[6];

/// Table 1 as printed, rows n = 3..17, columns k = 2..16; `(v)` marks a circled entry.
const PRINTED_TABLE: [&str; 15] = [
    "1 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "1 2 0 0 0 0 0 0 0 0 0 0 0 0 0",
    "1 2 3 0 0 0 0 0 0 0 0 0 0 0 0",
    "2 2 3 4 0 0 0 0 0 0 0 0 0 0 0",
    "2 2 3 4 5 0 0 0 0 0 0 0 0 0 0",
    "2 4 (3) 4 5 6 0 0 0 0 0 0 0 0 0",
    "3 4 (3) 4 5 6 7 0 0 0 0 0 0 0 0",
    "3 4 6 (4) 5 6 7 8 0 0 0 0 0 0 0",
    "3 4 6 (4) 5 6 7 8 9 0 0 0 0 0 0",
    "4 6 6 8 (5) 6 7 8 9 10 0 0 0 0 0",
    "4 6 6 8 (5) 6 7 8 9 10 11 0 0 0 0",
    "4 6 6 8 10 (6) 7 8 9 10 11 12 0 0 0",
    "5 6 9 (8) 10 (6) 7 8 9 10 11 12 13 0 0",
    "5 8 9 (8) 10 12 (7) 8 9 10 11 12 13 14 0",
    "5 8 9 (8) 10 12 (7) 8 9 10 11 12 13 14 15",
];

/// Orders of `⟨A_i ∪ A_j⟩`, `i ≤ j`, recorded from the first run.
const TORSION_PAIR_ORDERS: [(usize, [usize; 6]); 2] = [(3, [4, 12, 48, 2, 8, 2]), (4, [16, 48, 384, 2, 8, 2])];

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table_reproduction() -> Outcome {
    let ours = render_table1_machine(&table1());
    let mut expected = String::new();
    for (row, n) in PRINTED_TABLE.iter().zip(3u64..) {
        for (cell, k) in row.split_whitespace().zip(2u64..) {
            let circled = cell.starts_with('(');
            let value = cell.trim_matches(|c| c == '(' || c == ')');
            expected.push_str(&format!("{n} {k} {value} {}\n", u8::from(circled)));
        }
    }
    for (a, b) in ours.lines().zip(expected.lines()) {
        ensure(a == b, || format!("computed `{a}`, printed `{b}`"))?;
    }
    ensure(ours.lines().count() == 225 && expected.lines().count() == 225, || "wrong entry count".into())?;
    let circled = expected.lines().filter(|l| l.ends_with(" 1")).count();
    Ok(format!("225 entries match, {circled} circled"))
}

fn lemma_count() -> Outcome {
    let r = lemma_count_verify(200);
    ensure(r.part1_holds(), || format!("part 1 equalities {:?}, violations {:?}", r.part1_equalities, r.part1_violations))?;
    ensure(r.part2_holds(), || format!("part 2 violations {:?}", r.part2_violations))?;
    Ok(format!(
        "part 1 equality set {:?}; part 2 {} equalities, all with k even and n in {{2k, 2k+1}}",
        r.part1_equalities,
        r.part2_equalities.len()
    ))
}

fn circled_counts() -> Outcome {
    let mut counts = Vec::new();
    let mut later = Vec::new();
    for k in 3..=12 {
        let bound = circled_scan_bound(k);
        let c = circled_count(k, bound);
        ensure(c as i64 == circled_formula(k), || format!("k={k}: {c} circled, formula {}", circled_formula(k)))?;
        counts.push(c);
        if let Some(n) = circled_beyond(k, bound, 10 * k * k).first() {
            later.push(format!("k={k} from n={n}"));
        }
    }
    Ok(format!(
        "counts for k=3..12 with n < k(k+2): {counts:?}; further failures past the scan: {}",
        later.join(", ")
    ))
}

fn duplication_suites() -> Outcome {
    let mut checked = 0;
    let suites: [(Family, std::ops::RangeInclusive<u64>); 4] = [
        (Family::Braid, 3..=200),
        (Family::Saut, 3..=200),
        (Family::Mcg, 2..=200),
        (Family::Column, 3..=200),
    ];
    for (family, range) in suites {
        for p in range {
            for c in family_claims(family, p)? {
                ensure(c.agrees(), || format!("{} at {p}: holds={} expected={}", c.claim, c.holds, c.expected))?;
                checked += 1;
            }
        }
    }
    // the stated counterexamples to base 2 at 2⌊m/4⌋-1
    for (m, k) in [(8, 4), (9, 4), (12, 6), (13, 6)] {
        let c = family_claims(Family::Braid, m)?
            .into_iter()
            .find(|c| c.claim == "braid-base2-plus")
            .ok_or("missing braid-base2-plus")?;
        ensure(c.failing_ks.contains(&k), || format!("m={m}: failing k {:?}, expected {k}", c.failing_ks))?;
    }
    // m mod 4 classification: base 2 at 2⌊m/4⌋-1 survives exactly for m ≡ 2, 3 (mod 4), m ≥ 8
    for m in 8..=200u64 {
        let holds = family_claims(Family::Braid, m)?
            .into_iter()
            .find(|c| c.claim == "braid-base2-plus")
            .map(|c| c.holds)
            .unwrap_or(false);
        ensure(holds == matches!(m % 4, 2 | 3), || format!("m={m}: base2-plus holds={holds}"))?;
    }
    Ok(format!("{checked} claim verdicts agree"))
}

fn braid_relations_hold(m: usize) -> Result<bool, String> {
    let s: Vec<FreeAutomorphism> = (1..m)
        .map(|i| braid_generator(i, m))
        .chain(std::iter::once(braid_sigma_m(m)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let braid = |a: &FreeAutomorphism, b: &FreeAutomorphism| {
        a.mul_unchecked(b).mul_unchecked(a) == b.mul_unchecked(a).mul_unchecked(b)
    };
    // circular indexing: s[i] and s[i+1 mod m] are adjacent
    for i in 0..m {
        for j in i + 1..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            let ok = if adjacent {
                braid(&s[i], &s[j])
            } else {
                commutes(&s[i], &s[j]).map_err(|e| e.to_string())?
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn relation_suites() -> Outcome {
    let mut count = 0;
    for n in 3..=6 {
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    ensure(commutator_relation_holds(i, j, k, n).map_err(|e| e.to_string())?, || {
                        format!("[ν_{j}{k}, ν_{i}{j}] ≠ ν_{i}{k} in rank {n}")
                    })?;
                    count += 1;
                }
            }
        }
    }
    for m in 3..=10 {
        ensure(braid_relations_hold(m)?, || format!("braid relations fail for m={m}"))?;
    }
    let mut dihedral = 0;
    for n in 2..=6 {
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                for kind in [NielsenKind::Left, NielsenKind::Right] {
                    let f = DihedralFactor::new(kind, i, j, n).map_err(|e| e.to_string())?;
                    let ok = dihedral_check(&f.nielsen, &f.involution).map_err(|e| e.to_string())?
                        && f.torsion_generators().iter().all(|t| t.mul_unchecked(t).is_identity());
                    ensure(ok, || format!("{} in rank {n} is not dihedral", f.label()))?;
                    dihedral += 1;
                }
            }
        }
    }
    Ok(format!(
        "{count} commutator triples, braid relations m=3..10, {dihedral} dihedral factors; 0 failures"
    ))
}

fn structure_suites() -> Outcome {
    let err = |e: fixdim::group::GroupError| e.to_string();
    for n in [6, 8, 9, 11] {
        let sets: Vec<Vec<_>> = dihedral_product(n)
            .map_err(err)?
            .iter()
            .map(|f| vec![f.nielsen.clone(), f.involution.clone()])
            .collect();
        ensure(pairwise_commuting(&sets).map_err(err)?.is_none(), || {
            format!("dihedral product factors fail to commute at n={n}")
        })?;
    }
    let mut families = 0;
    for n in 2..=10 {
        for m in 1..n {
            let fams = column_conjugate_families(n, m).map_err(err)?;
            ensure(fams.len() == 2 * (n - m), || format!("n={n} m={m}: {} families", fams.len()))?;
            let sets: Vec<_> = fams.iter().map(|f| f.generators.clone()).collect();
            let distinct: BTreeSet<String> = sets.iter().map(|s| format!("{s:?}")).collect();
            ensure(distinct.len() == sets.len(), || format!("n={n} m={m}: repeated family"))?;
            if let Some(v) = pairwise_commuting(&sets).map_err(err)? {
                return Err(format!("n={n} m={m}: families {} and {} do not commute", v.set_a, v.set_b));
            }
            families += fams.len();
        }
    }
    let decide = |a: &FreeAutomorphism| in_column_product(a);
    for n in 2..=8 {
        let inner = column_product_generators(n).map_err(err)?;
        for l in 2..=n {
            let outer = niel(l, n).map_err(err)?.to_vec();
            ensure(normalizes(&outer, &inner, &Membership::Decide(&decide)).map_err(err)?.is_none(), || {
                format!("Niel_{l} does not normalize M in rank {n}")
            })?;
        }
    }
    let mut bad = Vec::new();
    for n in 3..=8 {
        let sets: Vec<Vec<_>> = conjugation_dihedrals(n).map_err(err)?.into_iter().map(|p| p.to_vec()).collect();
        for (i, [c, t]) in conjugation_dihedrals(n).map_err(err)?.iter().enumerate() {
            ensure(dihedral_check(c, t).map_err(err)?, || format!("D_{} is not dihedral in rank {n}", i + 2))?;
        }
        if let Some(v) = pairwise_commuting(&sets).map_err(err)? {
            bad.push(format!("n={n}: D_{} vs D_{}", v.set_a + 2, v.set_b + 2));
        }
    }
    let summary = format!("dihedral products ok; {families} column conjugate families ok; Niel_l normalizes M for n<=8");
    if bad.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; D_i families do not pairwise commute ({})", bad.join(", ")))
    }
}

fn finiteness() -> Outcome {
    let err = |e: fixdim::group::GroupError| e.to_string();
    let mut orders = Vec::new();
    for n in 1..=5usize {
        let gens = signed_permutation_generators(n).map_err(err)?;
        let order = closure_enumerate(&gens, 1_000_000).map_err(err)?.order();
        let expected = (1..=n).product::<usize>() << n;
        ensure(order == Some(expected), || format!("|W_{n}| = {order:?}, expected {expected}"))?;
    }
    for (n, expected) in TORSION_PAIR_ORDERS {
        let sets = torsion_triple(n).map_err(err)?;
        let mut got = Vec::new();
        for i in 0..3 {
            for j in i..3 {
                let mut gens = sets[i].clone();
                gens.extend(sets[j].iter().cloned());
                let order = closure_enumerate(&gens, 1_000_000)
                    .map_err(err)?
                    .order()
                    .ok_or_else(|| format!("n={n}: ⟨A{}, A{}⟩ exceeds the cap", i + 1, j + 1))?;
                got.push(order);
            }
        }
        ensure(got == expected, || format!("n={n}: orders {got:?}, recorded {expected:?}"))?;
        orders.push(format!("n={n} {got:?}"));
    }
    Ok(format!("|W_n| = 2^n n! for n<=5; pair orders (11,12,13,22,23,33) {}", orders.join(", ")))
}

fn corpus() -> Outcome {
    let mut members: Vec<(&str, i64)> = [6, 7, 8, 9, 11, 12].iter().map(|&n| ("aut", n)).collect();
    members.push(("elliptic", 9));
    for n in 3..=7 {
        members.push(("gl", n));
        members.push(("sl", n));
    }
    for n in 1..=6 {
        members.push(("wreath", n));
        members.push(("bieberbach", n));
        members.push(("simplex-of-groups", n));
    }
    let mut mutations = 0;
    for &(family, p) in &members {
        let cert = builtin(family, p).map_err(|e| format!("{family}:{p}: {e}"))?;
        let checker = Checker::new(&cert)?;
        let verdict = checker.check(&cert);
        ensure(verdict.verified, || format!("{family}:{p}: {}", verdict.conclusion()))?;
        for site in mutation_sites(&cert) {
            let mutated = apply_mutation(&cert, &site).ok_or_else(|| format!("{family}:{p}: bad site"))?;
            ensure(!checker.check(&mutated).verified, || {
                format!("{family}:{p}: mutation at {} survives", site.describe())
            })?;
            mutations += 1;
        }
    }
    Ok(format!("{} certificates verify, {mutations} mutations all rejected", members.len()))
}

fn helly() -> Outcome {
    let mut parts = Vec::new();
    for (dim, trials, seed) in [(1usize, 10_000u64, 101u64), (2, 1_000, 102), (3, 500, 103)] {
        let sets = 8;
        let s = helly_fuzz(dim, sets, trials, seed, 0);
        if let Some((i, _)) = s.failures.first() {
            let replay = fixdim::convex::trial_seed(seed, *i);
            return Err(format!(
                "d={dim}: {} violations; replay with `fixdim helly-fuzz --dim {dim} --sets {sets} --replay {replay}`",
                s.failures.len()
            ));
        }
        ensure(s.errors.is_empty(), || format!("d={dim}: {:?}", s.errors.first()))?;
        parts.push(format!("d={dim} {}/{trials}", s.passed));
    }
    Ok(format!("{} pass, 0 violations", parts.join(", ")))
}

fn partitions(total: usize, max_part: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max_part.min(total)).rev() {
        for mut rest in partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn random_complex(rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let v = rng.gen_range(1..=5usize);
    let gens: Vec<u64> = (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(1..1u64 << v)).collect();
    SimplicialComplex::from_maximal(v, &gens).unwrap()
}

fn homology_join() -> Outcome {
    let mut tuples = 0;
    for total in 1..=8 {
        for parts in partitions(total, total) {
            let mut k = SimplicialComplex::boundary_of_simplex(parts[0]).map_err(|e| e.to_string())?;
            for &p in &parts[1..] {
                k = join(&k, &SimplicialComplex::boundary_of_simplex(p).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            }
            let betti = z2_homology_ranks(&k);
            let top = total - 1;
            let mut expected = vec![0; top + 1];
            expected[0] += 1;
            expected[top] += 1;
            ensure(betti == expected, || format!("{parts:?}: betti {betti:?}"))?;
            tuples += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let (a, b) = (random_complex(&mut rng), random_complex(&mut rng));
        let j = join(&a, &b).map_err(|e| e.to_string())?;
        let (x, y, z) = (reduced_euler_characteristic(&a), reduced_euler_characteristic(&b), reduced_euler_characteristic(&j));
        ensure(z == -x * y, || format!("χ̃ = {z} for factors {x}, {y}: {a:?} * {b:?}"))?;
    }
    Ok(format!("{tuples} sphere joins concentrated in degrees 0 and top; 100 random Euler products"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "table1", limit: Duration::from_secs(1), run: table_reproduction },
        Criterion { id: 2, name: "lemma-count", limit: Duration::from_secs(5), run: lemma_count },
        Criterion { id: 3, name: "circled-count", limit: Duration::from_secs(5), run: circled_counts },
        Criterion { id: 4, name: "duplication", limit: Duration::from_secs(10), run: duplication_suites },
        Criterion { id: 5, name: "relations", limit: Duration::from_secs(60), run: relation_suites },
        Criterion { id: 6, name: "structure", limit: Duration::from_secs(60), run: structure_suites },
        Criterion { id: 7, name: "finiteness", limit: Duration::from_secs(120), run: finiteness },
        Criterion { id: 8, name: "corpus", limit: Duration::from_secs(300), run: corpus },
        Criterion { id: 9, name: "helly-fuzz", limit: Duration::from_secs(600), run: helly },
        Criterion { id: 10, name: "homology-join", limit: Duration::from_secs(60), run: homology_join },
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = 0;
    for c in criteria.iter().filter(|c| only.map_or(true, |id| id == c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; took {elapsed:.2?}, limit {:?}", c.limit)),
            other => other,
        };
        let known = KNOWN_FAILURES.contains(&c.id);
        match &outcome {
            Ok(detail) => println!("PASS {:>2} {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(detail) => {
                let tag = if known { " [known]" } else { "" };
                println!("FAIL {:>2} {}{tag} ({elapsed:.2?}): {detail}", c.id, c.name)
            }
        }
        if outcome.is_ok() == known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria deviate from their expected outcome");
        std::process::exit(1);
    }
}
