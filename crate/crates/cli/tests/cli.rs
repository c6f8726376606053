use std::process::{Command, Output};

use countstable::CountPmf;

fn countstable(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_countstable"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn pmf_doubled_poisson_rows() {
    let o = countstable("pmf --lambda 1 --theta 0 --alpha 2 --max-k 4");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,p");
    assert_eq!(lines.len(), 7);
    let expect = [(-1f64).exp(), 0.0, (-1f64).exp(), 0.0, (-1f64).exp() / 2.0];
    for (k, want) in expect.iter().enumerate() {
        let (idx, val) = lines[k + 1].split_once(',').unwrap();
        assert_eq!(idx.parse::<usize>().unwrap(), k);
        let got: f64 = val.parse().unwrap();
        assert!((got - want).abs() < 1e-15, "k={k}: {got}");
    }
    let (label, tail) = lines[6].split_once(',').unwrap();
    assert_eq!(label, "tail");
    let tail: f64 = tail.parse().unwrap();
    assert!(tail >= 1.0 - (-1f64).exp() * 2.5 - 1e-15);
}

#[test]
fn pmf_json_round_trips() {
    let o = countstable("pmf --alpha 1.5 --delta 1 --gamma -0.2 --max-k 50 --format json");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let pmf: CountPmf = serde_json::from_str(&text).unwrap();
    assert_eq!(pmf.max_k(), 50);
    assert_eq!(serde_json::to_string(&pmf).unwrap(), text.trim_end());
}

#[test]
fn pmf_without_max_k_reaches_tail_target() {
    let o = countstable("pmf --mu 3 --sigma2 1 --format json");
    assert_eq!(o.status.code(), Some(0));
    let pmf: CountPmf = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(pmf.tail_bound() <= 1e-12);
}

#[test]
fn moments_of_hermite() {
    let o = countstable("moments --mu 2 --sigma2 2");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "quantity,value\nmean,2\ndispersion,2\n");
    let o = countstable("moments --mu 2 --sigma2 2 --format json");
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mean"], 2.0);
    assert_eq!(v["dispersion"], 2.0);
}

#[test]
fn infinite_moments_print_inf() {
    let o = countstable("moments --lambda 1 --theta 0.4 --alpha 1.5");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "quantity,value\nmean,2.2\ndispersion,inf\n");
}

#[test]
fn verify_passes_for_alpha_three_halves() {
    let o = countstable("verify --alpha 1.5 --delta 1 --gamma -0.2 --n 2,3,4 --format json");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.len(), 3);
    for (r, n) in v.iter().zip([2, 3, 4]) {
        assert_eq!(r["n"], n);
        assert_eq!(r["verdict"], "pass");
        for field in ["a_n", "b_n", "param_residual", "tv", "form_used"] {
            assert!(r.get(field).is_some(), "missing {field}");
        }
    }
    let csv = countstable("verify --alpha 1.5 --delta 1 --gamma -0.2");
    assert_eq!(csv.status.code(), Some(0));
    assert_eq!(stdout(&csv).lines().count(), 4);
}

#[test]
fn verify_hermite_coefficients() {
    let o = countstable("verify --mu 2 --sigma2 2 --n 4 --format json");
    assert_eq!(o.status.code(), Some(0));
    let v: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["a_n"], 0.5);
    assert_eq!(v[0]["b_n"], 2.0);
}

#[test]
fn verify_failure_exits_three() {
    let o = countstable("verify --alpha 1.5 --delta 1 --gamma -0.2 --n 3 --tol 1e-300");
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn mixed_groups_are_usage_errors() {
    let o = countstable("pmf --mu 2 --sigma2 2 --alpha 0.5");
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("--alpha") && msg.contains("--mu"), "{msg}");
    assert_eq!(countstable("").status.code(), Some(2));
    assert_eq!(
        countstable("pmf --delta 1 --gamma 0").status.code(),
        Some(2)
    );
    assert_eq!(countstable("--help").status.code(), Some(0));
}

#[test]
fn invalid_parameters_exit_one() {
    let o = countstable("apgf --alpha 2.5 --delta 1 --gamma -0.1");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn same_seed_same_samples() {
    let a = countstable("sample --lambda 1 --theta 0.4 --alpha 0.5 --count 500 --seed 7");
    let b = countstable("sample --lambda 1 --theta 0.4 --alpha 0.5 --count 500 --seed 7");
    let c = countstable("sample --lambda 1 --theta 0.4 --alpha 0.5 --count 500 --seed 8");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 500);
    assert!(text.lines().all(|l| l.parse::<u64>().is_ok()));
    let d = countstable("sample --lambda 1 --theta 0.4 --alpha 0.5 --count 500");
    let e = countstable("sample --lambda 1 --theta 0.4 --alpha 0.5 --count 500");
    assert_eq!(d.stdout, e.stdout);
}

#[test]
fn hermite_samples_json() {
    let o = countstable("sample --mu 2 --sigma2 2 --count 100 --format json");
    assert_eq!(o.status.code(), Some(0));
    let draws: Vec<u64> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(draws.len(), 100);
}

#[test]
fn apgf_grid() {
    let o = countstable("apgf --mu 2 --sigma2 2");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (t, psi) = l.split_once(',').unwrap();
            (t.parse().unwrap(), psi.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0], (0.0, 1.0));
    for (t, psi) in rows {
        // Hermite: psi(t) = exp(-mu t + sigma2 t^2 / 2)
        let want = (-2.0 * t + t * t).exp();
        assert!((psi - want).abs() <= 1e-14 * want, "{t}");
    }
    let o = countstable("apgf --mu 2 --sigma2 2 --format json");
    let v: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.len(), 21);
    assert_eq!(v[20]["t"], 2.0);
}
