//! Acceptance suite: one line per criterion, nonzero exit if any is red.

use std::time::{Duration, Instant};

use mukai_core::chow::{self, compare_routes, GENERA};
use mukai_core::exactalg::{Field, JetRing, PrimeField};
use mukai_core::groebner::{
    betti_table, hilbert_data, hilbert_numerator, quotient, saturate, HilbertData, IdealHandle,
};
use mukai_core::multipoly::{graded, Monomial, MonomialOrder, MultiPoly, PolyRing};
use mukai_core::par::Exec;
use mukai_core::report::{Report, Status};
use mukai_core::scenario::{self, ScenarioConfig, Scenario};
use mukai_core::varieties::surfaces::{derive_surface_invariants, SurfaceInvariants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    status: Status,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Pass, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Fail, detail: detail.into() }
}

fn from_report(r: &Report) -> Outcome {
    let bad: Vec<String> = r.failures().map(|x| format!("g={:?} {}: {} != {}", x.genus, x.quantity, x.expected, x.computed)).collect();
    if bad.is_empty() {
        Outcome { status: r.status(), detail: format!("{} rows", r.rows.len()) }
    } else {
        fail(bad.join("; "))
    }
}

fn row<'a>(r: &'a Report, genus: u32, quantity: &str) -> Option<&'a str> {
    r.rows
        .iter()
        .find(|x| x.genus == Some(genus) && x.quantity == quantity)
        .map(|x| x.computed.as_str())
}

fn config(s: Scenario) -> ScenarioConfig {
    ScenarioConfig {
        prime: 10007,
        seed: 1,
        ..ScenarioConfig::new(s)
    }
}

fn criterion1() -> Outcome {
    // published table rows, kept apart from the library's copy
    let table: [(u32, [i64; 6], i64); 4] = [
        (7, [-8, -42, -149, 1, 4, 11], 1),
        (8, [-8, -30, -77, 1, 3, 13], 2),
        (9, [-4, -6, -1, 1, 3, 15], 4),
        (10, [-6, -12, -15, 1, 2, 17], 5),
    ];
    let r = match chow::chow_suite(&GENERA) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let mut bad = Vec::new();
    for (g, six, dy) in table {
        for (k, name) in chow::ROW_NAMES.iter().enumerate() {
            if row(&r, g, name) != Some(&six[k].to_string()) {
                bad.push(format!("g={g} {name}"));
            }
        }
        if row(&r, g, "(s*H)^4 = d(Y)") != Some(&dy.to_string()) {
            bad.push(format!("g={g} d(Y)"));
        }
        if row(&r, g, "(s*H)^2.E^2 = -d(F)") != Some(&six[0].to_string()) {
            bad.push(format!("g={g} d(F)"));
        }
        if row(&r, g, "(K+3Lbar).Lbar^3 = 2g-2") != Some(&(2 * g as i64 - 2).to_string()) {
            bad.push(format!("g={g} sectional genus"));
        }
    }
    if !bad.is_empty() {
        return fail(bad.join(", "));
    }
    from_report(&r)
}

/// Surface invariants computed from the constructed surfaces.
fn computed_invariants(g: u32) -> mukai_core::Result<SurfaceInvariants> {
    let f = PrimeField::new(10007)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (ideal, _) = scenario::genus_surface(&f, g, &mut rng, Exec::default())?;
    derive_surface_invariants(&ideal, scenario::genus_ambient(g)?)
}

fn criterion2() -> Outcome {
    let expected = [(7, Some((-7, 19))), (8, None), (9, Some((9, 3))), (10, Some((6, 6)))];
    let mut all = Report::new("two-route");
    for (g, ke) in expected {
        let inv = match computed_invariants(g) {
            Ok(v) => v,
            Err(e) => return fail(format!("g={g}: {e}")),
        };
        if let Some(ke) = ke {
            if (inv.k_squared, inv.euler) != ke {
                return fail(format!("g={g}: (K^2, e) = ({}, {})", inv.k_squared, inv.euler));
            }
        }
        if inv.k_squared + inv.euler != 12 * inv.chi {
            return fail(format!("g={g}: Noether"));
        }
        match compare_routes(g, &inv) {
            Ok(r) => all.extend(r),
            Err(e) => return fail(e.to_string()),
        }
    }
    from_report(&all)
}

fn criterion3() -> Outcome {
    let r = match scenario::linkage_scenario(&config(Scenario::Linkage)) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let want = [(7, "8", "6"), (8, "8", "4"), (9, "4", "0")];
    for (g, d, pi) in want {
        if row(&r, g, "deg F") != Some(d) || row(&r, g, "sectional genus of F") != Some(pi) || row(&r, g, "chi(O_F)") != Some("1") {
            return fail(format!("g={g}: invariants"));
        }
    }
    if row(&r, 7, "forms of degree 3 through F mod Y") != Some("1") || row(&r, 7, "F smooth (Jacobian minors)") != Some("empty") {
        return fail("g=7: cubic or smoothness");
    }
    // g = 8 may be recorded as inconclusive, the others must pass
    for x in &r.rows {
        let ok = x.status == Status::Pass || (x.status == Status::Inconclusive && x.genus == Some(8));
        if !ok {
            return fail(format!("g={:?} {}: {}", x.genus, x.quantity, x.status));
        }
    }
    let betti = r.rows.iter().filter(|x| x.quantity == "Betti table").count();
    if betti != 3 {
        return fail(format!("{betti} Betti rows"));
    }
    from_report(&r)
}

fn criterion4() -> Outcome {
    match scenario::linear_system_scenario(&config(Scenario::LinearSystem)) {
        Ok(r) if row(&r, 7, "dim of degree-7 double-point system") == Some("10")
            && row(&r, 7, "sampled points of F") == Some("50") =>
        {
            from_report(&r)
        }
        Ok(r) => fail(format!("{r}")),
        Err(e) => fail(e.to_string()),
    }
}

fn criterion5() -> Outcome {
    let c = config(Scenario::Cremona);
    let r = match scenario::cremona_scenario(&c) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let o = from_report(&r);
    if o.status == Status::Fail {
        return o;
    }
    // only the reducible cubic is report-only
    let open: Vec<_> = r.rows.iter().filter(|x| x.status == Status::Inconclusive).collect();
    if open.len() != 1 || !open[0].quantity.contains("reducible") {
        return fail(format!("{} inconclusive rows", open.len()));
    }
    let has = |q: &str| r.rows.iter().any(|x| x.quantity == q && x.status == Status::Pass);
    let needed = [
        "inverse ∘ map = factor * id",
        "inverse ∘ map = factor * id over Q",
        "hyperplanes meet in a line",
        "chart round trips (500 x 2)",
        "images of 200 points of W lie on P_W",
        "images of 200 points of Q are one point",
        "images of 200 points of Q' lie on P1",
    ];
    if let Some(q) = needed.iter().find(|q| !has(q)) {
        return fail(format!("missing `{q}`"));
    }
    // closed form: x0 x1 x2 != 0 in P^4, three general lines off P^2
    let p: u64 = 101;
    let count = ((p - 1) * (p - 1) * p * p).to_string();
    let computed = r.rows.iter().find(|x| x.quantity.starts_with("|U(F_101)|")).map(|x| x.computed.clone());
    if computed.as_deref() != Some(count.as_str()) {
        return fail(format!("|U(F_101)| = {computed:?}, closed form {count}"));
    }
    pass(format!("{} rows; reducible cubic report-only", r.rows.len()))
}

fn criterion6() -> Outcome {
    let c = config(Scenario::Covering);
    match scenario::covering_scenario(&c) {
        Ok(r) => {
            let w = row(&r, 7, "emptiness witness degree").map(str::to_string);
            let o = from_report(&r);
            match (o.status, w) {
                (Status::Pass, Some(w)) => pass(format!("{} sections, empty, witness degree {w}", c.points + 1)),
                (s, _) => Outcome { status: s, detail: o.detail },
            }
        }
        Err(e) => fail(e.to_string()),
    }
}

fn random_small(seed: u64) -> (IdealHandle<PrimeField>, IdealHandle<PrimeField>) {
    let r = PolyRing::grevlex(PrimeField::new(32003).unwrap(), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens = |k: usize| -> Vec<MultiPoly<PrimeField>> {
        (0..k).map(|_| {
            let d = rng.gen_range(1..=3);
            graded::random_sparse_form(&r, d, 2, &mut rng)
        }).collect()
    };
    let i = gens(2);
    let j = gens(2);
    (IdealHandle::new(&r, i).unwrap(), IdealHandle::new(&r, j).unwrap())
}

fn property_failures() -> Vec<String> {
    let mut bad = Vec::new();
    let orders = [MonomialOrder::Grevlex, MonomialOrder::Lex, MonomialOrder::Block(1)];
    for seed in 0..100u64 {
        let (i, j) = random_small(seed);
        for o in &orders {
            let gb = i.groebner(o);
            if !gb.satisfies_buchberger_criterion() || !i.gens().iter().all(|g| gb.contains(g)) {
                bad.push(format!("buchberger seed {seed} {o:?}"));
            }
        }
        if j.is_zero_ideal() {
            continue;
        }
        let q = quotient(&i, &j).unwrap();
        let qq = quotient(&q, &j).unwrap();
        let q2 = quotient(&i, &j.power(2).unwrap()).unwrap();
        let s = saturate(&i, &j).unwrap();
        if !q.contains_ideal(&i)
            || !qq.same_ideal(&q2)
            || !i.contains_ideal(&q.product(&j).unwrap())
            || !s.same_ideal(&saturate(&s, &j).unwrap())
            || !s.contains_ideal(&q)
        {
            bad.push(format!("colon identities seed {seed}"));
        }
    }
    let r4 = PolyRing::grevlex(PrimeField::default(), 4);
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<_> = (0..3).map(|k| graded::random_sparse_form(&r4, 1 + k % 3, 3, &mut rng)).collect();
        let i = IdealHandle::new(&r4, gens).unwrap();
        let h = hilbert_data(&i);
        for o in [MonomialOrder::Lex, MonomialOrder::Block(2)] {
            if HilbertData::from_numerator(4, hilbert_numerator(&i.groebner(&o).leads())) != h {
                bad.push(format!("hilbert order seed {seed} {o:?}"));
            }
        }
        if seed < 12 {
            let gens: Vec<_> = (0..3).map(|k| graded::random_sparse_form(&r4, 2 + (k % 2) as u32, 3, &mut rng)).collect();
            let i = IdealHandle::new(&r4, gens).unwrap();
            if betti_table(&i).unwrap().numerator() != hilbert_data(&i).numerator {
                bad.push(format!("betti alternating sum seed {seed}"));
            }
        }
    }
    bad.extend(jet_failures());
    bad
}

/// Jets of `p(a(t))` against the truncated composition of polynomials.
fn jet_failures() -> Vec<String> {
    let f = PrimeField::default();
    let mut bad = Vec::new();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m, order) = (3usize, 2usize, rng.gen_range(1..=4u32));
        let jr = JetRing::new(f, m, order);
        let tr = PolyRing::new(f, m, MonomialOrder::Grevlex).unwrap();
        let src = PolyRing::grevlex(f, n);
        let p = &graded::random_sparse_form(&src, 3, 4, &mut rng) + &graded::random_sparse_form(&src, 2, 3, &mut rng);
        let mut jets = Vec::new();
        let mut polys = Vec::new();
        for _ in 0..n {
            let coeffs: Vec<u32> = (0..jr.dim()).map(|_| f.random(&mut rng)).collect();
            let terms = jr
                .monomials()
                .iter()
                .zip(&coeffs)
                .map(|(e, c)| {
                    let exps: Vec<u32> = e.iter().map(|&x| x as u32).collect();
                    (Monomial::from_exps(&exps).unwrap(), *c)
                })
                .collect();
            polys.push(tr.from_terms(terms));
            jets.push(jr.from_coeffs(coeffs).unwrap());
        }
        let via_jets = p.evaluate_jet(&jets);
        let symbolic = p.compose(&polys).unwrap();
        for (e, c) in jr.monomials().iter().zip(via_jets.coeffs()) {
            let exps: Vec<u32> = e.iter().map(|&x| x as u32).collect();
            if symbolic.coeff(&Monomial::from_exps(&exps).unwrap()) != *c {
                bad.push(format!("jet seed {seed}"));
                break;
            }
        }
    }
    bad
}

fn criterion7() -> Outcome {
    let bad = property_failures();
    if bad.is_empty() {
        pass("S-pairs, colon/saturation on 100 ideals, Hilbert orders, Betti sums, jets")
    } else {
        fail(bad.join(", "))
    }
}

fn criterion8() -> Outcome {
    match scenario::lines_scenario(&config(Scenario::Lines)) {
        Ok(r) => {
            let mut o = from_report(&r);
            if o.status != Status::Fail {
                o.detail = format!("lines through x: {}", row(&r, 7, "lines through x").unwrap_or("?"));
            }
            o
        }
        Err(e) => fail(e.to_string()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration, bool); 8] = [
        ("chow suite", criterion1, Duration::from_secs(1), true),
        ("two-route agreement", criterion2, Duration::from_secs(1), true),
        ("linkage suite", criterion3, Duration::from_secs(120), true),
        ("linear system", criterion4, Duration::from_secs(120), true),
        ("cremona pipeline", criterion5, Duration::from_secs(60), true),
        ("covering check", criterion6, Duration::from_secs(1800), true),
        ("property suites", criterion7, Duration::from_secs(120), true),
        ("lines check", criterion8, Duration::from_secs(600), false),
    ];
    let mut red = 0;
    for (k, (name, run, budget, blocking)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut o = run();
        let el = t.elapsed();
        if el > *budget && o.status == Status::Pass {
            o = fail(format!("took {el:?}, budget {budget:?}"));
        }
        let label = match o.status {
            Status::Pass => "PASS",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        };
        println!("criterion {}: {label:<12} {name:<20} {:>8.2?}  {}", k + 1, el, o.detail);
        let blocks = match o.status {
            Status::Pass => false,
            Status::Inconclusive => *blocking,
            Status::Fail => true,
        };
        if blocks {
            red += 1;
        }
    }
    if red > 0 {
        eprintln!("{red} acceptance criteria not met");
        std::process::exit(1);
    }
}
