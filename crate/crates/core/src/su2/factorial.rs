use std::sync::OnceLock;

const TABLE_LEN: usize = 1024;

struct Tables {
    fact: Vec<f64>,
    ln_fact: Vec<f64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut fact = vec![1.0; 171];
        for k in 1..fact.len() {
            fact[k] = fact[k - 1] * k as f64;
        }
        let mut ln_fact = vec![0.0; TABLE_LEN];
        for k in 1..TABLE_LEN {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        Tables { fact, ln_fact }
    })
}

/// `n!` as a float; exact up to 22!, correctly rounded products beyond.
pub(crate) fn factorial(n: usize) -> f64 {
    tables().fact[n]
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    tables().ln_fact[n]
}
