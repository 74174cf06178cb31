use std::process::{Command, Output};

fn saddlemg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saddlemg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const HEADER: &str = "example,dim,mesh,level_min,level_max,preconditioner,n_u,n_p,iterations,converged,l2_u,l2_p,h1broken_u,setup_seconds,solve_seconds,error";

#[test]
fn run_writes_one_row_per_preconditioner() {
    let o = saddlemg(&["run", "--example", "1", "--level", "4", "--pc", "schur,spamg-uzawa", "--no-timings"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], HEADER);
    assert!(lines[1].starts_with("1,2,uniform,4,4,schur,544,256,"));
    assert!(lines[2].starts_with("1,2,uniform,4,4,spamg-uzawa,544,256,1,true,"));
}

#[test]
fn non_convergence_exits_with_2() {
    let o = saddlemg(&["run", "--example", "1", "--level", "4", "--pc", "none", "--maxit", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",5,false,"));
}

#[test]
fn usage_errors_exit_with_1() {
    for args in [
        &["run", "--example", "7", "--level", "3"][..],
        &["run", "--example", "1", "--level", "3", "--pc", "ilu"],
        &["run", "--example", "1", "--dim", "4", "--level", "3"],
        &["run", "--example", "1", "--level", "9"],
        &["run", "--example", "1", "--level", "3", "--max-level", "5"],
        &["converge", "--example", "1", "--level", "3", "--to", "4"],
        &["frobnicate"],
    ] {
        let o = saddlemg(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(saddlemg(&["--help"]).status.code(), Some(0));
}

#[test]
fn converge_reports_first_order_rates() {
    let o = saddlemg(&["converge", "--example", "1", "--level", "3", "--to", "6", "--no-timings"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
    let err = String::from_utf8(o.stderr).unwrap();
    let rate = |key: &str| -> f64 {
        let line = err.lines().find(|l| l.starts_with(key)).unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    assert!((0.85..=1.15).contains(&rate("rate l2_u")), "{err}");
    assert!((0.85..=1.15).contains(&rate("rate l2_p")), "{err}");
}

#[test]
fn adaptive_run_to_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = saddlemg(&[
            "run",
            "--example",
            "4",
            "--mesh",
            "adaptive",
            "--level",
            "3",
            "--max-level",
            "5",
            "--pc",
            "all",
            "--no-timings",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(String::from_utf8(ta).unwrap().lines().count(), 7);
}

#[test]
fn dump_system_writes_matrix_market() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sys");
    let o = saddlemg(&[
        "dump-system",
        "--example",
        "2",
        "--level",
        "2",
        "--stats",
        "--dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["A.mtx", "B.mtx", "rhs_u.txt", "rhs_p.txt", "mesh.txt", "hierarchy.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let b = std::fs::read_to_string(out.join("B.mtx")).unwrap();
    assert!(b.starts_with("%%MatrixMarket matrix coordinate real general"));
    // 4x4 cells, Neumann faces on y = 0 and y = 1 eliminated: 40 - 8 fluxes
    let size = b.lines().find(|l| !l.starts_with('%')).unwrap();
    assert!(size.starts_with("16 32 "), "{size}");
}
