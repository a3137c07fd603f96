//! Every acceptance criterion at its stated tolerance and runtime budget,
//! one line per criterion. Runs without the libtest harness so the lines
//! are always shown.

use strategic_labor::verify::{run_all_with, run_criterion, VerifyOptions};

fn acceptance() -> bool {
    let mut lines = Vec::new();
    let summary = run_all_with(&VerifyOptions::default(), |r| {
        let within_budget = r.elapsed.as_secs_f64() <= r.runtime_budget_s;
        let status = if r.pass && within_budget { "PASS" } else { "FAIL" };
        let measured: Vec<String> = r
            .checks
            .iter()
            .map(|c| format!("{} = {:.6e}", c.name, c.measured))
            .collect();
        let line = format!(
            "{status} {} ({:.2}s of {:.0}s): {}",
            r.id,
            r.elapsed.as_secs_f64(),
            r.runtime_budget_s,
            measured.join("; ")
        );
        println!("{line}");
        for n in &r.notes {
            println!("     {n}");
        }
        lines.push((status == "PASS", line));
    });
    lines.iter().all(|l| l.0) && summary.pass
}

fn loose_quadrature_fails_the_gradient_check() -> bool {
    let mut opts = VerifyOptions::default();
    opts.tolerances.quad_tol = 1.0;
    let r = run_criterion("gradient-oracle", &opts).unwrap();
    let status = if r.pass { "FAIL" } else { "PASS" };
    println!("{status} loose quadrature (quad_tol = 1) fails gradient-oracle");
    !r.pass
}

fn main() {
    let ok = [acceptance(), loose_quadrature_fails_the_gradient_check()];
    if ok.contains(&false) {
        println!("acceptance: FAILED");
        std::process::exit(1);
    }
    println!("acceptance: ok");
}
