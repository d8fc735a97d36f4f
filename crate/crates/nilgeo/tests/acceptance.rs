//! Acceptance criteria 1–13. Prints one line per criterion and exits nonzero
//! if any fails.

use std::process::{Command, ExitCode};
use std::thread;
use std::time::Instant;

use nilgeo::suites::{run_criterion, time_limit, title, SuiteParams};

const SEED: u64 = 42;

fn report_body(json: &str) -> &str {
    json.rsplit_once(",\n  \"wall_time\"")
        .map(|(b, _)| b)
        .unwrap_or(json)
}

fn determinism() -> (bool, String) {
    let bin = env!("CARGO_BIN_EXE_nilgeo");
    let run = || {
        thread::spawn(move || {
            Command::new(bin)
                .args(["verify", "--suite", "all", "--seed", "42"])
                .output()
                .expect("spawn nilgeo")
        })
    };
    let (a, b) = (run(), run());
    let (a, b) = (a.join().unwrap(), b.join().unwrap());
    let (sa, sb) = (
        String::from_utf8_lossy(&a.stdout),
        String::from_utf8_lossy(&b.stdout),
    );
    let same = report_body(&sa) == report_body(&sb);
    let ok = same
        && a.status.code() == Some(0)
        && b.status.code() == Some(0)
        && sa.contains("\"wall_time\"");
    (
        ok,
        format!(
            "identical bodies: {same}, exit codes {:?} {:?}, {} bytes",
            a.status.code(),
            b.status.code(),
            sa.len()
        ),
    )
}

fn main() -> ExitCode {
    let params = SuiteParams::new(SEED);
    let mut all = true;
    for id in 1..=12u8 {
        let start = Instant::now();
        let lines = run_criterion(id, &params);
        let secs = start.elapsed().as_secs_f64();
        let checks_ok = !lines.is_empty() && lines.iter().all(|l| l.pass);
        let in_time = secs < time_limit(id);
        let ok = checks_ok && in_time;
        all &= ok;
        println!(
            "criterion {id:>2}: {} {} ({} checks, {:.2}s / limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            title(id),
            lines.len(),
            secs,
            time_limit(id)
        );
        for l in lines.iter().filter(|l| !l.pass) {
            println!("    failed: {} {:?} {}", l.name, l.values, l.note);
        }
    }
    let start = Instant::now();
    let (ok, detail) = determinism();
    all &= ok;
    println!(
        "criterion 13: {} determinism ({detail}, {:.2}s)",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
