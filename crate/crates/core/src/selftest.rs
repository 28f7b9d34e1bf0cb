//! Seeded oracle suites shared by the command line and the acceptance tests.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexes::{cone, ChainMap, Complex};
use crate::decomp::{barcode, cohomology, k_class, scrambled, FormalObject, Size, Summand};
use crate::endofunctors::{check_functorial, check_relations, normalize, CoeffAssignment, LambdaFunctor, Window};
use crate::error::Result;
use crate::homspace::{
    compose_sym, generator_rep, hom_bruteforce, hom_infty, hom_table, truncation_bound, GeneratorRef, Kind, Models,
    SymMorphism,
};
use crate::linalg::{Field, FieldElem};
use crate::stability::{
    act, central_charge, chart, chart_inv, enumerate_hearts, hn_filtration, silting_search, transitivity_witness,
    ClosureBounds, ConeCatalog, GroupElem, HeartCandidate, HeartVerdict, SiltingRejection, StabilityCondition,
};

/// Tolerance for floating-point stability data.
pub const FLOAT_TOL: f64 = 1e-9;

pub const SUITES: [&str; 10] = [
    "hom-table",
    "infinity",
    "composition",
    "cones",
    "endofunctors",
    "exactness",
    "hearts",
    "hn",
    "group-action",
    "silting",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} checks, {} failures)", self.name, self.checks, self.failures.len())
    }
}

/// Runs one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<Result<SuiteReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Some(match name {
        "hom-table" => hom_table_suite(),
        "infinity" => infinity_suite(),
        "composition" => composition_suite(&mut rng, 1000),
        "cones" => cones_suite(&mut rng, 500),
        "endofunctors" => endofunctor_suite(&mut rng, 200),
        "exactness" => exactness_suite(),
        "hearts" => hearts_suite(),
        "hn" => hn_suite(&mut rng, 300),
        "group-action" => group_action_suite(&mut rng, 200),
        "silting" => silting_suite(&mut rng),
        _ => return None,
    })
}

fn fin(i: usize) -> Size {
    Size::Finite(i)
}

/// Brute-force Hom dimensions against the closed-form table.
pub fn hom_table_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("hom-table");
    for k in [Field::Prime(7), Field::Rational] {
        for i in 1..=6 {
            for j in 1..=6 {
                for alpha in -8..=8 {
                    let x = Complex::indecomposable(k, i, 0);
                    let y = Complex::indecomposable(k, j, alpha);
                    let (dim, _) = hom_bruteforce(&x, &y)?;
                    let want = hom_table(fin(i), fin(j), alpha).dim;
                    r.check(dim == want, || format!("{k}: hom(X_{i}, X_{j}[{alpha}]) = {dim}, table {want}"));
                }
            }
        }
    }
    Ok(r)
}

/// Truncated models of `X_∞` stabilize at the bound and match the table.
pub fn infinity_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("infinity");
    let k = Field::Prime(7);
    let sizes: Vec<Size> = (1..=5).map(fin).chain([Size::Inf]).collect();
    for &i in &sizes {
        for &j in &sizes {
            for alpha in -6..=6 {
                let n = truncation_bound(j, alpha);
                let at = hom_infty(k, i, j, alpha, n)?;
                let next = hom_infty(k, i, j, alpha, n + 1)?;
                let want = hom_table(i, j, alpha).dim;
                r.check(at == next && at == want, || {
                    format!("hom(X_{i}, X_{j}[{alpha}]): N={n} gives {at}, N+1 gives {next}, table {want}")
                });
            }
        }
    }
    Ok(r)
}

fn random_generator(rng: &mut impl Rng, sizes: &[Size], source: (Size, i32)) -> GeneratorRef {
    loop {
        let j = *sizes.choose(rng).unwrap();
        let alpha = rng.gen_range(-5..=5);
        let kind = if rng.gen_bool(0.5) { Kind::One } else { Kind::Eps };
        let g = GeneratorRef::new(source, (j, source.1 + alpha), kind);
        if g.exists() {
            return g;
        }
    }
}

/// Random composable generator pairs, composed concretely and symbolically.
pub fn composition_suite(rng: &mut impl Rng, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("composition");
    let k = Field::Prime(7);
    let sizes: Vec<Size> = (1..=5).map(fin).collect();
    let mut eps_eps = 0;
    for _ in 0..trials {
        let start = *sizes.choose(rng).unwrap();
        let f = random_generator(rng, &sizes, (start, 0));
        let g = random_generator(rng, &sizes, f.target);
        let models = Models::around(k, &[f.source, f.target, g.target]);
        let concrete = models.compose_concrete(&f, &g)?;
        let sym = compose_sym(
            &SymMorphism::generator(k, &g, k.one())?,
            &SymMorphism::generator(k, &f, k.one())?,
        )?;
        let symbolic = sym.block(0, 0);
        if f.kind == Kind::Eps && g.kind == Kind::Eps {
            eps_eps += 1;
            r.check(sym.is_zero(), || format!("eps after eps nonzero: {f} then {g}"));
        }
        r.check(concrete == symbolic, || {
            format!("{f} then {g}: concrete {concrete:?}, symbolic {symbolic:?}")
        });
    }
    r.check(eps_eps > 0, || "no eps-eps pairs sampled".into());
    Ok(r)
}

/// A random perfect object whose realization fits in degrees `[-6, 0]` with
/// at most 8 summands.
pub fn random_window_object(rng: &mut impl Rng) -> FormalObject {
    let count = rng.gen_range(1..=8);
    FormalObject::new((0..count).map(|_| {
        let h = rng.gen_range(-1..=4);
        let i = rng.gen_range(1..=(6 - h) as usize);
        Summand { i: fin(i), h, m: 1 }
    }))
}

/// Cone facts and the barcode roundtrip on scrambled sums.
pub fn cones_suite(rng: &mut impl Rng, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("cones");
    let k = Field::Prime(7);
    let eps = generator_rep(k, &GeneratorRef::new((fin(1), 0), (fin(1), 0), Kind::Eps))?;
    let c = barcode(&cone(&eps)?)?;
    r.check(c == FormalObject::indecomposable(fin(2), 0), || format!("cone(eps on X_1) = {c}"));
    for i in 1..=4 {
        let x = Complex::indecomposable(k, i, 0);
        let c = barcode(&cone(&ChainMap::identity(&x)?)?)?;
        r.check(c.is_zero(), || format!("cone(id on X_{i}) = {c}"));
    }
    for t in 0..trials {
        let f = random_window_object(rng);
        let c = scrambled(&f, k, rng)?;
        let got = barcode(&c)?;
        r.check(got == f, || format!("trial {t}: {f} decomposed as {got}"));
    }
    Ok(r)
}

/// λ-functors satisfy functoriality and R1–R5; normalization inverts twists.
pub fn endofunctor_suite(rng: &mut impl Rng, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("endofunctors");
    let gf7 = Field::Prime(7);
    let q = Field::Rational;
    let mut lambdas: Vec<FieldElem> = [1, 2, 3, 5].iter().map(|&n| gf7.from_i64(n)).collect();
    lambdas.extend([q.from_i64(1), q.from_i64(2), q.from_i64(-1), q.ratio(1, 2).unwrap()]);
    for lambda in &lambdas {
        for imax in 2..=8 {
            let c = CoeffAssignment::lambda(lambda, Window { imax, amax: 8 })?;
            let v = check_functorial(&c);
            r.check(v.is_empty(), || format!("λ = {lambda}, I = {imax}: {} violations", v.len()));
            let failed: Vec<_> = check_relations(&c).into_iter().filter(|x| !x.holds()).collect();
            r.check(failed.is_empty(), || format!("λ = {lambda}, I = {imax}: {} relations fail", failed.len()));
        }
    }
    for t in 0..trials {
        let lambda = lambdas.choose(rng).unwrap().clone();
        let k = lambda.field();
        let window = Window {
            imax: rng.gen_range(2..=8),
            amax: rng.gen_range(1..=8),
        };
        let nonzero = |rng: &mut dyn rand::RngCore| loop {
            let x = match k {
                Field::Rational => k.ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9)).unwrap(),
                Field::Prime(_) => k.from_i64(rng.gen_range(1..=6)),
            };
            if !x.is_zero() {
                return x;
            }
        };
        let mu = nonzero(rng);
        let phi: Vec<FieldElem> = (0..window.imax).map(|_| nonzero(rng)).collect();
        let shift = rng.gen_range(-5..=5);
        let twisted = CoeffAssignment::lambda(&lambda, window)?.twist(shift, &mu, &phi)?;
        let n = normalize(&twisted)?;
        let phi_rel: Vec<FieldElem> = phi.iter().map(|x| x * &phi[0].inv().unwrap()).collect();
        r.check(n.shift == shift && n.mu == mu && n.lambda == lambda && n.phi == phi_rel, || {
            format!(
                "trial {t}: twisted (h={shift}, μ={mu}, λ={lambda}) normalized to (h={}, μ={}, λ={})",
                n.shift, n.mu, n.lambda
            )
        });
    }
    Ok(r)
}

/// `F_λ` is exact exactly when `λ = 1`.
pub fn exactness_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("exactness");
    let gf7 = Field::Prime(7);
    let q = Field::Rational;
    let mut lambdas: Vec<FieldElem> = (1..=6).map(|n| gf7.from_i64(n)).collect();
    lambdas.extend([1, 2, -1, 3].iter().map(|&n| q.from_i64(n)));
    lambdas.push(q.ratio(1, 2).unwrap());
    for lambda in lambdas {
        let exact = LambdaFunctor::new(lambda.clone())?.is_exact()?;
        r.check(exact == lambda.is_one(), || format!("λ = {lambda} over {}: is_exact = {exact}", lambda.field()));
    }
    Ok(r)
}

/// Over `i ∈ {1..4, ∞}`, `|h| ≤ 3` only `{X_1[h], X_∞[h]}` is a heart.
pub fn hearts_suite() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("hearts");
    let mut catalog = ConeCatalog::new(Field::Prime(7));
    let all = enumerate_hearts(&mut catalog, 4, 3, &ClosureBounds::default())?;
    let accepted: BTreeSet<HeartCandidate> =
        all.iter().filter(|(_, v)| v.is_accepted()).map(|(c, _)| c.clone()).collect();
    let expected: BTreeSet<HeartCandidate> =
        (-3..=3).map(|h| HeartCandidate::new([(fin(1), h), (Size::Inf, h)])).collect();
    r.check(accepted == expected, || {
        let s: Vec<String> = accepted.iter().map(|c| c.to_string()).collect();
        format!("accepted {}", s.join(" "))
    });
    for h in -3..=3 {
        let verdict = |c: &HeartCandidate| all.iter().find(|(x, _)| x == c).map(|(_, v)| v.clone());
        let x1 = verdict(&HeartCandidate::new([(fin(1), h)]));
        r.check(matches!(x1, Some(HeartVerdict::NotGenerating { .. })), || format!("{{X_1[{h}]}}: {x1:?}"));
        let xinf = verdict(&HeartCandidate::new([(Size::Inf, h)]));
        let ok = match &xinf {
            Some(HeartVerdict::NotExtensionClosed { triangle }) => {
                triangle.left == (Size::Inf, h)
                    && triangle.right == (Size::Inf, h)
                    && triangle.middle == FormalObject::indecomposable(fin(1), h)
            }
            _ => false,
        };
        r.check(ok, || format!("{{X_inf[{h}]}}: {xinf:?}"));
    }
    Ok(r)
}

fn random_sigma(rng: &mut impl Rng) -> StabilityCondition {
    let phi = 1.0 - rng.gen_range(0.0..1.0);
    StabilityCondition::new(rng.gen_range(-4..=4), rng.gen_range(0.05..20.0), phi).unwrap()
}

/// HN filtrations: the triangles for `X_i[-i+1]`, phase order, cohomology and
/// central charges.
pub fn hn_suite(rng: &mut impl Rng, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("hn");
    let k = Field::Prime(7);
    for i in 2..=8usize {
        let s = random_sigma(rng);
        let psi0 = s.phase_of_shift(0);
        let f = hn_filtration(&s, &FormalObject::indecomposable(fin(i), 1 - i as i32));
        let ok = f.len() == 2
            && f[0].object == FormalObject::indecomposable(Size::Inf, 0)
            && f[1].object == FormalObject::indecomposable(Size::Inf, 1 - i as i32)
            && (f[0].phase - psi0).abs() < FLOAT_TOL
            && (f[1].phase - (psi0 - i as f64 + 1.0)).abs() < FLOAT_TOL;
        r.check(ok, || format!("X_{i}[{}]: {f:?}", 1 - i as i32));
    }
    for t in 0..trials {
        let s = random_sigma(rng);
        let mut f = random_window_object(rng);
        if rng.gen_bool(0.3) {
            f = f.direct_sum(&FormalObject::indecomposable(Size::Inf, rng.gen_range(-3..=3)));
        }
        let fac = hn_filtration(&s, &f);
        r.check(fac.windows(2).all(|w| w[0].phase > w[1].phase), || format!("trial {t}: phases not decreasing for {f}"));
        let semistable = fac.iter().all(|x| {
            let shifts: BTreeSet<i32> = x.object.summands().iter().map(|y| y.h).collect();
            shifts.len() == 1 && x.object.summands().iter().all(|y| y.i == fin(1) || y.i == Size::Inf)
        });
        r.check(semistable, || format!("trial {t}: factor of {f} not semistable"));
        let z = central_charge(&s, &f);
        let sign = if s.h.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let from_class = s.v() * (sign * k_class(&f) as f64);
        r.check((z - from_class).norm() <= FLOAT_TOL * (1.0 + z.norm()), || {
            format!("trial {t}: Z({f}) = {z}, class gives {from_class}")
        });
        if f.is_perfect() {
            let h = cohomology(&scrambled(&f, k, rng)?)?;
            let standard = StabilityCondition::new(0, 1.0, 1.0)?;
            let mut from_hn = std::collections::BTreeMap::<i32, (usize, usize)>::new();
            for x in hn_filtration(&standard, &f) {
                for y in x.object.summands() {
                    let e = from_hn.entry(-1 - y.h).or_default();
                    if y.i == fin(1) {
                        e.0 += y.m;
                    } else {
                        e.1 += y.m;
                    }
                }
            }
            r.check(from_hn == h.degrees, || format!("trial {t}: HN factors of {f} disagree with cohomology"));
        }
    }
    for h in -3..=3 {
        let x1 = k_class(&FormalObject::indecomposable(fin(1), h));
        let xinf = k_class(&FormalObject::indecomposable(Size::Inf, h));
        r.check(x1 == 2 * xinf, || format!("[X_1[{h}]] = {x1}, [X_inf[{h}]] = {xinf}"));
    }
    Ok(r)
}

fn near(a: &StabilityCondition, b: &StabilityCondition) -> bool {
    a.h == b.h && (a.phi - b.phi).abs() < FLOAT_TOL && (a.mass - b.mass).abs() < FLOAT_TOL * a.mass.max(1.0)
}

/// The rotation–scaling action is free and transitive and a translation in the chart.
pub fn group_action_suite(rng: &mut impl Rng, trials: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("group-action");
    for t in 0..trials {
        let (a, b) = (random_sigma(rng), random_sigma(rng));
        let g = transitivity_witness(&a, &b);
        let moved = act(&g, &a)?;
        r.check(near(&moved, &b), || format!("pair {t}: act(witness) = {moved}, want {b}"));
        let id = transitivity_witness(&a, &a);
        r.check(id == GroupElem::identity(), || format!("pair {t}: witness(σ, σ) = {id:?}"));
        // Freeness: any other element moves a somewhere else.
        let other = GroupElem::new(g.kappa * rng.gen_range(1.5..3.0), g.theta + rng.gen_range(0.1..1.0))?;
        r.check(!near(&act(&other, &a)?, &b), || format!("pair {t}: witness not unique"));
        let back = chart_inv(chart(&a))?;
        r.check(near(&back, &a), || format!("pair {t}: chart roundtrip {a} -> {back}"));
        let shifted = chart(&act(&g, &a)?);
        let translated = chart(&a) - num_complex::Complex64::new(g.kappa.ln(), std::f64::consts::PI * g.theta);
        r.check((shifted - translated).norm() < FLOAT_TOL, || format!("pair {t}: chart is not a translation"));
    }
    Ok(r)
}

/// No silting subset of the windows generates `D^b`; `{X_1[h]}` is silting in Perf.
pub fn silting_suite(rng: &mut impl Rng) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("silting");
    let mut catalog = ConeCatalog::new(Field::Prime(7));
    for imax in 1..=5 {
        for hmax in 1..=4 {
            let rep = silting_search(&mut catalog, imax, hmax, &ClosureBounds::default())?;
            r.check(rep.certifies_empty(), || format!("window ({imax}, {hmax}): generating silting set found"));
            let singles: Vec<Vec<(Size, i32)>> = (-hmax..=hmax).map(|h| vec![(fin(1), h)]).collect();
            let maximal: Vec<_> = rep.maximal.iter().map(|s| s.members.clone()).collect();
            r.check(maximal == singles, || format!("window ({imax}, {hmax}): maximal silting sets {maximal:?}"));
            let objs = crate::stability::window_objects(imax, hmax);
            for _ in 0..50 {
                let n = rng.gen_range(1..=4.min(objs.len()));
                let subset: Vec<_> = objs.choose_multiple(rng, n).copied().collect();
                let reason = rep.rejection(&subset);
                let valid = match &reason {
                    Some(SiltingRejection::SelfExtension { object, witness }) => {
                        witness.exists() && witness.source == *object && witness.target.0 == object.0 && witness.alpha() > 0
                    }
                    Some(SiltingRejection::Incompatible { witness }) => {
                        witness.exists()
                            && subset.contains(&witness.source)
                            && subset.iter().any(|m| m.0 == witness.target.0 && witness.target.1 > m.1)
                    }
                    Some(SiltingRejection::NotGenerating { reached }) => {
                        !reached.contains(&Size::Inf) && subset.iter().all(|m| !m.0.is_inf())
                    }
                    None => false,
                };
                r.check(valid, || format!("window ({imax}, {hmax}): subset {subset:?} has reason {reason:?}"));
            }
        }
    }
    Ok(r)
}

/// Every suite in order.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|n| run_suite(n, seed).expect("known suite")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 0).is_none());
    }

    #[test]
    fn quick_suites_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for rep in [
            exactness_suite().unwrap(),
            cones_suite(&mut rng, 20).unwrap(),
            group_action_suite(&mut rng, 20).unwrap(),
            hn_suite(&mut rng, 20).unwrap(),
        ] {
            assert!(rep.passed(), "{rep}: {:?}", rep.failures);
        }
    }
}
