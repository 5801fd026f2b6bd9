//! Duplication-function arithmetic: `g_n(k)`, Table 1 with its circled
//! monotonicity failures, the two-part counting lemma, condition (2) of
//! ample duplication and the family-specific claims built on it.

use serde::Serialize;

/// `g_n(k) = (k-1)⌊n/(k+1)⌋`.
pub fn g(n: u64, k: u64) -> u64 {
    k.saturating_sub(1) * (n / (k + 1))
}

/// Circled entries: `g_n(k) < g_n(k-1)` with `3 ≤ k ≤ n-1`.
pub fn circled(n: u64, k: u64) -> bool {
    k >= 3 && k < n && g(n, k) < g(n, k - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    pub k: u64,
    pub value: u64,
    pub circled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub n: u64,
    pub entries: Vec<TableEntry>,
}

pub const TABLE1_ROWS: std::ops::RangeInclusive<u64> = 3..=17;
pub const TABLE1_COLUMNS: std::ops::RangeInclusive<u64> = 2..=16;

/// Rows `n = 3..17`, columns `k = 2..16`; entries with `k > n-1` are 0.
pub fn table1() -> Vec<TableRow> {
    TABLE1_ROWS
        .map(|n| TableRow {
            n,
            entries: TABLE1_COLUMNS
                .map(|k| TableEntry {
                    k,
                    value: if k < n { g(n, k) } else { 0 },
                    circled: circled(n, k),
                })
                .collect(),
        })
        .collect()
}

/// Aligned text rendering; circled values are written `(v)`.
pub fn render_table1(rows: &[TableRow]) -> String {
    let mut out = String::from("  n |");
    for k in TABLE1_COLUMNS {
        out.push_str(&format!("{:>5}", format!("k={k}")));
    }
    out.push('\n');
    out.push_str(&"-".repeat(5 + 5 * TABLE1_COLUMNS.count()));
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{:>3} |", row.n));
        for e in &row.entries {
            let cell = if e.circled {
                format!("({})", e.value)
            } else {
                e.value.to_string()
            };
            out.push_str(&format!("{cell:>5}"));
        }
        out.push('\n');
    }
    out
}

/// One line per entry: `n k value circled(0|1)`.
pub fn render_table1_machine(rows: &[TableRow]) -> String {
    let mut out = String::new();
    for row in rows {
        for e in &row.entries {
            out.push_str(&format!("{} {} {} {}\n", row.n, e.k, e.value, u8::from(e.circled)));
        }
    }
    out
}

/// Outcome of one inequality claim for one parameter value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub claim: String,
    pub parameter: u64,
    /// Whether the inequality holds on its whole range.
    pub holds: bool,
    /// What the source statement asserts for this parameter.
    pub expected: bool,
    pub first_failing_k: Option<u64>,
    pub failing_ks: Vec<u64>,
}

impl ClaimReport {
    pub fn agrees(&self) -> bool {
        self.holds == self.expected
    }
}

/// `½(k-1)(k-2) - 1`.
pub fn circled_formula(k: u64) -> i64 {
    ((k - 1) * (k - 2) / 2) as i64 - 1
}

/// Monotonicity failures in column `k` for `k+1 ≤ n ≤ scan_bound`.
pub fn circled_count(k: u64, scan_bound: u64) -> u64 {
    (k + 1..=scan_bound).filter(|&n| circled(n, k)).count() as u64
}

/// `k(k+2) - 1`. Below `(k+1)k` the quotients `⌊n/k⌋` and `⌊n/(k+1)⌋` differ by
/// at most one, which gives exactly `½(k-1)(k-2) - 1` failures; a second run of
/// failures starts at `n = k(k+2)` (e.g. `n = 35` for `k = 5`).
pub fn circled_scan_bound(k: u64) -> u64 {
    k * (k + 2) - 1
}

/// Failures with `n > scan_bound`, listed up to `limit`.
pub fn circled_beyond(k: u64, scan_bound: u64, limit: u64) -> Vec<u64> {
    (scan_bound + 1..=limit).filter(|&n| circled(n, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCountReport {
    pub n_max: u64,
    /// `(n, k)` with `3 ≤ k ≤ n-1` and `g_n(2) = g_n(k)`.
    pub part1_equalities: Vec<(u64, u64)>,
    /// `(n, k)` with `g_n(2) > g_n(k)`.
    pub part1_violations: Vec<(u64, u64)>,
    /// `(n, k)` with `3 ≤ k ≤ n-1` and `g_n(3) = g_n(k) + 1`.
    pub part2_equalities: Vec<(u64, u64)>,
    /// `(n, k)` with `g_n(3) > g_n(k) + 1`.
    pub part2_violations: Vec<(u64, u64)>,
}

impl LemmaCountReport {
    pub fn part1_holds(&self) -> bool {
        self.part1_violations.is_empty() && self.part1_equalities == [(6, 3), (7, 3), (9, 4)]
    }

    /// Equality exactly when `k` is even and `n ∈ {2k, 2k+1}`.
    pub fn part2_holds(&self) -> bool {
        let expected: Vec<(u64, u64)> = (3..=self.n_max)
            .flat_map(|n| (3..n).map(move |k| (n, k)))
            .filter(|&(n, k)| k % 2 == 0 && (n == 2 * k || n == 2 * k + 1))
            .collect();
        self.part2_violations.is_empty() && self.part2_equalities == expected
    }

    pub fn claims(&self) -> Vec<ClaimReport> {
        let first_k = |v: &[(u64, u64)]| v.first().map(|&(_, k)| k);
        vec![
            ClaimReport {
                claim: "count-part1".into(),
                parameter: self.n_max,
                holds: self.part1_holds(),
                expected: true,
                first_failing_k: first_k(&self.part1_violations),
                failing_ks: self.part1_violations.iter().map(|&(_, k)| k).collect(),
            },
            ClaimReport {
                claim: "count-part2".into(),
                parameter: self.n_max,
                holds: self.part2_holds(),
                expected: true,
                first_failing_k: first_k(&self.part2_violations),
                failing_ks: self.part2_violations.iter().map(|&(_, k)| k).collect(),
            },
        ]
    }
}

/// Brute force over `3 ≤ n ≤ n_max`, `3 ≤ k ≤ n-1` (at `k = 2` part (1) is an
/// identity and is skipped).
pub fn lemma_count_verify(n_max: u64) -> LemmaCountReport {
    let mut r = LemmaCountReport {
        n_max,
        part1_equalities: Vec::new(),
        part1_violations: Vec::new(),
        part2_equalities: Vec::new(),
        part2_violations: Vec::new(),
    };
    for n in 3..=n_max {
        for k in 3..n {
            let (g2, g3, gk) = (g(n, 2), g(n, 3), g(n, k));
            if g2 == gk {
                r.part1_equalities.push((n, k));
            } else if g2 > gk {
                r.part1_violations.push((n, k));
            }
            if g3 == gk + 1 {
                r.part2_equalities.push((n, k));
            } else if g3 > gk + 1 {
                r.part2_violations.push((n, k));
            }
        }
    }
    r
}

/// Integer-valued duplication functions appearing in the families below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DuplicationFn {
    /// `⌊m/(k+1)⌋`
    Blocks { m: u64 },
    /// `⌊2g/k⌋` for even `k`, `⌊2(g-1)/(k-1)⌋` for odd `k`
    Lickorish { genus: u64 },
    /// `2(n-k)`
    Column { n: u64 },
    Constant(u64),
    /// Explicit values `f(k)` starting at `k = first`.
    Table { first: u64, values: Vec<u64> },
}

impl DuplicationFn {
    pub fn eval(&self, k: u64) -> Option<u64> {
        match self {
            DuplicationFn::Blocks { m } => Some(m / (k + 1)),
            DuplicationFn::Lickorish { genus } => {
                if k % 2 == 0 {
                    Some(2 * genus / k)
                } else if k > 1 {
                    Some(2 * genus.saturating_sub(1) / (k - 1))
                } else {
                    None
                }
            }
            DuplicationFn::Column { n } => Some(2 * n.saturating_sub(k)),
            DuplicationFn::Constant(c) => Some(*c),
            DuplicationFn::Table { first, values } => {
                k.checked_sub(*first).and_then(|i| values.get(i as usize).copied())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicationSpec {
    pub d: i64,
    pub k0: u64,
    pub generator_count: u64,
    pub f: DuplicationFn,
}

impl DuplicationSpec {
    /// `k0+1 ..= min(d+1, |A|)`.
    pub fn range(&self) -> std::ops::RangeInclusive<u64> {
        let top = if self.d < 0 {
            0
        } else {
            (self.d as u64 + 1).min(self.generator_count)
        };
        self.k0 + 1..=top
    }
}

/// Every `k` in range where `d < (k-1) f(k)` fails (undefined `f` counts as failure).
pub fn condition2_failures(spec: &DuplicationSpec) -> Vec<u64> {
    spec.range()
        .filter(|&k| match spec.f.eval(k) {
            Some(fk) => spec.d >= ((k - 1) * fk) as i64,
            None => true,
        })
        .collect()
}

pub fn condition2(spec: &DuplicationSpec) -> ClaimReport {
    let failing = condition2_failures(spec);
    ClaimReport {
        claim: "condition2".into(),
        parameter: spec.d.max(0) as u64,
        holds: failing.is_empty(),
        expected: true,
        first_failing_k: failing.first().copied(),
        failing_ks: failing,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Braid,
    Saut,
    Mcg,
    Column,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "braid" => Ok(Family::Braid),
            "saut" => Ok(Family::Saut),
            "mcg" => Ok(Family::Mcg),
            "column" => Ok(Family::Column),
            other => Err(format!("unknown family {other:?} (braid|saut|mcg|column)")),
        }
    }
}

/// `δ_m = 0` for `m ≡ 2, 3 mod 4` and `1` otherwise.
pub fn braid_delta(m: u64) -> u64 {
    if matches!(m % 4, 2 | 3) {
        0
    } else {
        1
    }
}

/// Smallest admissible parameter per family.
pub fn family_minimum(family: Family) -> u64 {
    match family {
        Family::Braid | Family::Saut => 3,
        Family::Mcg => 2,
        Family::Column => 3,
    }
}

fn claim(name: &str, p: u64, spec: DuplicationSpec, expected: bool) -> ClaimReport {
    let mut r = condition2(&spec);
    r.claim = name.to_string();
    r.parameter = p;
    r.expected = expected;
    r
}

fn block_claims(prefix: &str, m: u64, generators: u64) -> Vec<ClaimReport> {
    let f = DuplicationFn::Blocks { m };
    let spec = |d: i64, k0| DuplicationSpec {
        d,
        k0,
        generator_count: generators,
        f: f.clone(),
    };
    let q = (m / 4) as i64;
    vec![
        claim(&format!("{prefix}-base1"), m, spec((m / 3) as i64 - 1, 1), true),
        claim(&format!("{prefix}-base2"), m, spec(2 * q - 2, 2), true),
        claim(
            &format!("{prefix}-base2-plus"),
            m,
            spec(2 * q - 1, 2),
            braid_delta(m) == 0 || m <= 7,
        ),
        claim(
            &format!("{prefix}-delta"),
            m,
            spec(2 * q - braid_delta(m) as i64 - 1, 2),
            true,
        ),
    ]
}

/// Evaluates each inequality claim attached to `family` at `param`.
///
/// * braid: base 1 at `⌊m/3⌋-1`, base 2 at `2⌊m/4⌋-2`, base 2 at `2⌊m/4⌋-1`
///   (asserted for `m ≡ 2, 3 mod 4` and `m ≤ 7`), and the `δ_m` dimension.
/// * saut: the same arithmetic with `h_n` and `2n(n-1)` Nielsen generators.
/// * mcg: base 1 at `g-1`, `3g-1` generators.
/// * column: base 1 at `2n-5` with `f(m) = 2(n-m)` and the explicit
///   `2n-4 ≤ 2(m-1)(n-m)` for `m = 2..n-1`.
pub fn family_claims(family: Family, param: u64) -> Result<Vec<ClaimReport>, String> {
    let min = family_minimum(family);
    if param < min {
        return Err(format!("parameter {param} below minimum {min} for {family:?}"));
    }
    Ok(match family {
        Family::Braid => block_claims("braid", param, param),
        Family::Saut => block_claims("saut", param, 2 * param * (param - 1)),
        Family::Mcg => vec![claim(
            "mcg-base1",
            param,
            DuplicationSpec {
                d: param as i64 - 1,
                k0: 1,
                generator_count: 3 * param - 1,
                f: DuplicationFn::Lickorish { genus: param },
            },
            true,
        )],
        Family::Column => {
            let n = param;
            let parabola: Vec<u64> = (2..n)
                .filter(|&m| 2 * n - 4 > 2 * (m - 1) * (n - m))
                .collect();
            vec![
                claim(
                    "column-base1",
                    n,
                    DuplicationSpec {
                        d: 2 * n as i64 - 5,
                        k0: 1,
                        generator_count: n - 1,
                        f: DuplicationFn::Column { n },
                    },
                    true,
                ),
                ClaimReport {
                    claim: "column-parabola".into(),
                    parameter: n,
                    holds: parabola.is_empty(),
                    expected: true,
                    first_failing_k: parabola.first().copied(),
                    failing_ks: parabola,
                },
            ]
        }
    })
}
