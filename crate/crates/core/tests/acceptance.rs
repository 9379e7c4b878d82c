//! Acceptance criteria. Prints one PASS/FAIL line per criterion (with the
//! individual measurements underneath) and exits non-zero if any fails.
//!
//! Thresholds are pinned here rather than read from the library, so a change
//! to a library constant cannot silently relax a criterion.

use std::process::Command;
use std::time::Instant;

use forcenoise::verify::{self, Check, Relation, DEFAULT_SEED};

/// `(name fragment, relation, threshold)`; every check of the criterion must
/// match one row.
type Pinned = &'static [(&'static str, Relation, f64)];

const C1: Pinned = &[
    ("S_f / UQL minimum", Relation::AtLeast, 1.0 - 1e-9),
    ("runtime", Relation::Less, 5.0),
];
const C2: Pinned = &[
    ("standard S_f / SQL minimum", Relation::AtLeast, 1.0 - 1e-9),
    ("SQL gap at balance", Relation::Less, 1e-9),
    ("vm S_f / SQL minimum", Relation::Less, 1.0),
    ("cd S_f / SQL minimum", Relation::Less, 1.0),
];
const C3: Pinned = &[("entrywise relative error", Relation::Less, 1e-10)];
const C4: Pinned = &[
    ("|EX - DY", Relation::Less, 1e-10),
    ("|KL - H^2", Relation::Less, 1e-10),
];
const C5: Pinned = &[
    ("backaction block", Relation::Less, 1e-12),
    ("ancilla limit", Relation::Less, 0.01),
];
const C6: Pinned = &[
    ("gUQL minimum", Relation::AtLeast, 1.0 - 1e-9),
    ("near-attainment", Relation::Less, 1.1),
    ("gUQL / UQL", Relation::Less, 1.0),
];
const C7: Pinned = &[
    ("eta scan", Relation::Less, 1e-8),
    ("100 Omega", Relation::Less, 0.01),
];
const C8: Pinned = &[
    ("min_g S'_f - bound", Relation::AtLeast, -1e-9),
    ("bound - |chi_qq^I|", Relation::AtLeast, -1e-9),
    ("uncertainty slack", Relation::AtLeast, -1e-9),
];
const C9: Pinned = &[("max relative deviation", Relation::Less, 1e-9)];

fn judge(c: &Check, pinned: Pinned) -> bool {
    let Some((_, rel, threshold)) = pinned.iter().find(|(frag, _, _)| c.name.contains(frag)) else {
        println!("      unpinned check `{}`", c.name);
        return false;
    };
    let ok = match rel {
        Relation::Less => c.measured < *threshold,
        Relation::AtLeast => c.measured >= *threshold,
    };
    ok && c.passed && *rel == c.relation && c.threshold == *threshold
}

fn report(n: u8, title: &str, checks: Vec<Check>, pinned: Pinned) -> bool {
    let verdicts: Vec<bool> = checks.iter().map(|c| judge(c, pinned)).collect();
    let ok = !checks.is_empty() && verdicts.iter().all(|&v| v);
    println!(
        "criterion {n:>2} {}: {title}",
        if ok { "PASS" } else { "FAIL" }
    );
    for c in &checks {
        println!("      {c}");
    }
    ok
}

fn criterion_10() -> bool {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_forcenoise"))
        .args(["verify", "all"])
        .output()
        .expect("binary runs");
    let secs = start.elapsed().as_secs_f64();
    let code = out.status.code();
    let ok = code == Some(0) && secs < 60.0;
    println!(
        "criterion 10 {}: `verify all` exit 0 in < 60 s",
        if ok { "PASS" } else { "FAIL" }
    );
    println!("      exit code {code:?}, {secs:.2} s");
    let stdout = String::from_utf8_lossy(&out.stdout);
    for line in stdout.lines().filter(|l| l.starts_with("[FAIL]")) {
        println!("      {line}");
    }
    ok
}

fn main() {
    let seed = DEFAULT_SEED;
    let results = [
        report(
            1,
            "UQL dominance of every fig2a curve",
            verify::uql_dominance(),
            C1,
        ),
        report(
            2,
            "SQL attainment and beating",
            verify::sql_attainment(),
            C2,
        ),
        report(
            3,
            "closed-form transfer equivalence",
            verify::closed_form_equivalence(seed),
            C3,
        ),
        report(
            4,
            "combined-scheme identities",
            verify::corrected_identities(seed),
            C4,
        ),
        report(
            5,
            "ancilla backaction cancellation and limit",
            verify::cqnc_cancellation(),
            C5,
        ),
        report(
            6,
            "toy detector against generalized UQL",
            verify::toy_generalized_uql(),
            C6,
        ),
        report(7, "optimal UQL", verify::optimal_uql(seed), C7),
        report(
            8,
            "linear-response bound chain",
            verify::linear_response_chain(seed),
            C8,
        ),
        report(
            9,
            "feedback invariance",
            verify::feedback_invariance(seed),
            C9,
        ),
        criterion_10(),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!(
        "\nacceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
