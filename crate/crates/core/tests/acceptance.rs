//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits nonzero if any criterion fails.
//!
//! All checks are exact rational equalities; the only numeric bound is the
//! wall-clock budget of criterion 1.

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use gptforge::classicality::{
    all_maximal_classical_sets, classical_effect_quotient, classical_theory_report,
    extend_to_maximal, is_distinguishable_indices, pair_table, ClassicalSet,
};
use gptforge::composition::{
    check_axiom_product_pure, check_information_locality, composite_classical_set, min_tensor,
    min_tensor_many, CompositeSystem,
};
use gptforge::decoherence::{decohered_effect_set, mid};
use gptforge::exactmath::{int, rat, Rational, RationalMatrix, RationalVector};
use gptforge::format::{load_states_file, load_theory_file};
use gptforge::gpt::{GptState, GptSystem, Measurement};
use gptforge::objectivity::{
    build_sbs, canonical_strategy_family, diagonal_game_channel, fixed_point_sbs_check, is_sbs,
    is_srm, play_game, referee_test, scan_canonical_strategies, srm_distinguishability_lemma,
    srm_product, synthesize_winning_strategy, SbsSpec, SbsStep, SbsVerdict, SrmTest,
};
use gptforge::zoo::{
    classical_simplex, find_distinguishable_partner, restricted_trit, same_theory, square_bit,
    unrestricted_completion, TheoryRecipe, DEFAULT_MAX_DIM,
};

/// Wall-clock budget for the 351 pairs of the threefold restricted trit.
const CRITERION_1_BUDGET: Duration = Duration::from_secs(60);
/// Grid points per axis for the parametrized square-bit state.
const GRID_STEPS: i64 = 4;

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn bit() -> GptSystem {
    classical_simplex(2).unwrap()
}

fn trit() -> GptSystem {
    classical_simplex(3).unwrap()
}

fn recipe(text: &str) -> CompositeSystem {
    text.parse::<TheoryRecipe>()
        .unwrap()
        .build_composite(DEFAULT_MAX_DIM)
        .unwrap()
}

fn set(sys: &GptSystem, idx: &[usize]) -> ClassicalSet {
    ClassicalSet::from_indices(sys, idx)
        .unwrap()
        .expect("indices form a classical set")
}

fn greedy(sys: &GptSystem) -> ClassicalSet {
    extend_to_maximal(sys, &[])
        .unwrap()
        .expect("theory has a classical set")
}

fn mixture(sys: &GptSystem, weights: &[(Rational, usize)]) -> GptState {
    GptState::mixture(sys, weights).unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn criterion_1() -> Outcome {
    let rt = restricted_trit();
    let table = ok(pair_table(&rt))?;
    ensure(
        table.len() == 3 && table.iter().all(|p| p.witness.is_none()),
        || "a restricted-trit pair is distinguishable".into(),
    )?;
    ensure(
        ok(is_distinguishable_indices(&rt, &[0, 1, 2]))?.is_none(),
        || "the pure triple is distinguishable".into(),
    )?;
    let mut counts = Vec::new();
    let mut elapsed = Duration::ZERO;
    for (n, expected) in [(2usize, 36usize), (3, 351)] {
        let sys = recipe(&format!("rtrit^{n}")).into_system();
        let start = Instant::now();
        let table = ok(pair_table(&sys))?;
        elapsed = start.elapsed();
        ensure(table.len() == expected, || {
            format!("rtrit^{n}: {} pairs, expected {expected}", table.len())
        })?;
        if let Some(p) = table.iter().find(|p| p.witness.is_some()) {
            return Err(format!(
                "rtrit^{n}: pair ({}, {}) distinguishable",
                p.first, p.second
            ));
        }
        counts.push(table.len());
    }
    ensure(elapsed < CRITERION_1_BUDGET, || {
        format!("rtrit^3 took {elapsed:?}, budget {CRITERION_1_BUDGET:?}")
    })?;
    Ok(format!(
        "3 + {} + {} pairs infeasible, rtrit^3 in {:.2}s",
        counts[0],
        counts[1],
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("completed.json");
    let run = gptforge_bin(&[
        "complete",
        "--theory",
        "rtrit",
        "--out",
        out.to_str().unwrap(),
    ]);
    ensure(run.status.code() == Some(0), || {
        format!("complete exited {:?}", run.status.code())
    })?;
    let loaded = ok(load_theory_file(&out, DEFAULT_MAX_DIM))?;
    let completed = loaded.system();
    let library = ok(unrestricted_completion(&restricted_trit()))?;
    ensure(ok(same_theory(completed, &trit()))?, || {
        "completion is not classical:3".into()
    })?;
    ensure(ok(same_theory(&library, &trit()))?, || {
        "library completion differs".into()
    })?;
    let m = ok(is_distinguishable_indices(completed, &[0, 1, 2]))?
        .ok_or("pure triple still infeasible after completion")?;
    ensure(m.distinguishes(completed.states()), || {
        "witness fails delta_ij".into()
    })?;
    Ok("completed rtrit is cone-equal to classical:3; triple distinguishable".into())
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for sys in [bit(), trit(), classical_simplex(4).unwrap(), square_bit()] {
        for psi in 0..sys.num_states() {
            let p = ok(find_distinguishable_partner(&sys, psi))?;
            let m = &p.measurement;
            let one_zero = vec![int(1), int(0)];
            let zero_one = vec![int(0), int(1)];
            ensure(m.probabilities(&sys.states()[psi]) == one_zero, || {
                format!("{}: psi={psi} not identified", sys.name())
            })?;
            ensure(
                m.probabilities(&sys.states()[p.partner]) == zero_one,
                || format!("{}: partner of {psi} not identified", sys.name()),
            )?;
            ensure(&m.total() == sys.unit(), || {
                "effects do not sum to the unit".into()
            })?;
            for e in m.effects() {
                ensure(ok(sys.in_effect_cone(e))?, || {
                    "partner effect outside the effect cone".into()
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} pure states partnered with exact delta_ij"
    ))
}

fn criterion_4() -> Outcome {
    let sq = square_bit();
    let d = ok(mid(&sq, &set(&sq, &[0, 1])))?;
    let a = sq.states();
    let expected = RationalMatrix::from_int_rows(&[&[0, 0, -1], &[0, 1, 0], &[0, 0, 1]]);
    ensure(d.matrix() == &expected, || {
        format!("matrix is\n{}", d.matrix())
    })?;
    ensure(
        d.apply_vector(&a[0]) == a[0] && d.apply_vector(&a[1]) == a[1],
        || "alpha1 or alpha2 is moved".into(),
    )?;
    let mut points = 0;
    for li in 0..=GRID_STEPS {
        for pi in 0..=GRID_STEPS {
            let (l, p) = (rat(li, GRID_STEPS), rat(pi, GRID_STEPS));
            let one = int(1);
            let rho = mixture(
                &sq,
                &[
                    (&l * &p, 0),
                    (&l * (&one - &p), 1),
                    ((&one - &l) * (&one - &p), 2),
                    (&p * (&one - &l), 3),
                ],
            );
            let target = &a[0].scale(&p) + &a[1].scale(&(&one - &p));
            ensure(d.apply_vector(rho.vector()) == target, || {
                format!("rho(lambda={l}, p={p}) not mapped to p alpha1 + (1-p) alpha2")
            })?;
            points += 1;
        }
    }
    let half = rat(1, 2);
    let m14 = mixture(&sq, &[(half.clone(), 0), (half.clone(), 3)]);
    let m23 = mixture(&sq, &[(half.clone(), 1), (half, 2)]);
    ensure(d.apply_vector(m14.vector()) == a[0], || {
        "(alpha1+alpha4)/2 not sent to alpha1".into()
    })?;
    ensure(d.apply_vector(m23.vector()) == a[1], || {
        "(alpha2+alpha3)/2 not sent to alpha2".into()
    })?;
    Ok(format!(
        "{points} grid points and both edge midpoints exact"
    ))
}

fn criterion_5() -> Outcome {
    let mut sets = 0;
    for sys in [bit(), trit(), classical_simplex(4).unwrap(), square_bit()] {
        for cs in ok(all_maximal_classical_sets(&sys))? {
            let d = ok(mid(&sys, &cs))?;
            ensure(d.matrix().mul(d.matrix()) == *d.matrix(), || {
                format!("{}: D^2 != D for {:?}", sys.name(), cs.pure_states())
            })?;
            for a in cs.measurement().effects() {
                ensure(&d.pull_back(a) == a, || {
                    format!("{}: a o D != a for {:?}", sys.name(), cs.pure_states())
                })?;
            }
            sets += 1;
        }
    }
    Ok(format!(
        "idempotent and effect-preserving on {sets} maximal sets"
    ))
}

fn criterion_6() -> Outcome {
    let sq = square_bit();
    let cs = set(&sq, &[0, 1]);
    let d = ok(mid(&sq, &cs))?;
    let decohered = ok(decohered_effect_set(&sq, &cs))?;
    for (k, e) in sq.effects().iter().enumerate() {
        let image = d.pull_back(e);
        let canonical = ok(classical_effect_quotient(&sq, &cs, e))?;
        ensure(image == canonical && decohered[k] == canonical, || {
            format!("effect {k}: image {image} vs quotient {canonical}")
        })?;
        for &i in cs.pure_states() {
            ensure(image.dot(&sq.states()[i]) == e.dot(&sq.states()[i]), || {
                format!("effect {k} changes value on alpha{}", i + 1)
            })?;
        }
    }
    Ok(format!(
        "{} effect generators match their classical form",
        sq.effects().len()
    ))
}

fn criterion_7() -> Outcome {
    let cases = [
        (bit(), bit()),
        (trit(), trit()),
        (square_bit(), bit()),
        (square_bit(), square_bit()),
    ];
    for (a, b) in &cases {
        let composite = min_tensor(a, b);
        let (sa, sb) = (greedy(a), greedy(b));
        let joint = ok(composite_classical_set(
            &composite,
            &[sa.clone(), sb.clone()],
        ))?;
        let whole = ok(mid(composite.system(), &joint))?;
        let product = ok(mid(a, &sa))?.kron(&ok(mid(b, &sb))?);
        ensure(whole == product, || {
            format!("{}: D_ab != D_a x D_b", composite.system().name())
        })?;
    }
    Ok(format!("{} composites factorize", cases.len()))
}

fn criterion_8() -> Outcome {
    let atoms = [bit(), trit(), classical_simplex(4).unwrap(), square_bit()];
    let mut composites: Vec<CompositeSystem> = Vec::new();
    for a in &atoms {
        for b in &atoms {
            composites.push(min_tensor(a, b));
        }
    }
    composites.push(ok(min_tensor_many(&[bit(), square_bit(), bit()]))?);
    let mut set_tuples = 0;
    for c in &composites {
        let name = c.system().name().to_string();
        ensure(ok(check_axiom_product_pure(c))?, || {
            format!("{name}: product generator not extremal")
        })?;
        let per_factor = c
            .factors()
            .iter()
            .map(all_maximal_classical_sets)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        for choice in cartesian(&per_factor.iter().map(Vec::len).collect::<Vec<_>>()) {
            let sets: Vec<ClassicalSet> = choice
                .iter()
                .enumerate()
                .map(|(k, &i)| per_factor[k][i].clone())
                .collect();
            ensure(ok(check_information_locality(c, &sets))?, || {
                format!("{name}: product of maximal sets {choice:?} is not maximal")
            })?;
            set_tuples += 1;
        }
    }
    Ok(format!(
        "{} composites, {set_tuples} product classical sets maximal",
        composites.len()
    ))
}

fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![Vec::new()], |acc, &n| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect()
    })
}

/// `(system, srm, state, expected live branches)`.
fn srm_fixtures() -> Vec<(GptSystem, SrmTest, GptState, Vec<usize>)> {
    let mut out = Vec::new();
    let third = rat(1, 3);
    let half = rat(1, 2);
    let quarter = rat(1, 4);

    let b = bit();
    let rb = referee_test(&b, &set(&b, &[0, 1])).unwrap();
    out.push((
        b.clone(),
        rb.clone(),
        mixture(&b, &[(half.clone(), 0), (half.clone(), 1)]),
        vec![0, 1],
    ));

    let t = trit();
    let rt = referee_test(&t, &set(&t, &[0, 1, 2])).unwrap();
    let uniform3 = mixture(
        &t,
        &[(third.clone(), 0), (third.clone(), 1), (third.clone(), 2)],
    );
    out.push((t.clone(), rt.clone(), uniform3.clone(), vec![0, 1, 2]));
    // branch 0 vanishes and is folded into branch 1
    out.push((
        t.clone(),
        rt.clone(),
        mixture(&t, &[(half.clone(), 1), (half.clone(), 2)]),
        vec![1, 2],
    ));
    out.push((t.clone(), rt, mixture(&t, &[(int(1), 2)]), vec![2]));

    let sq = square_bit();
    let edge = referee_test(&sq, &set(&sq, &[0, 1])).unwrap();
    let uniform4 = mixture(
        &sq,
        &[
            (quarter.clone(), 0),
            (quarter.clone(), 1),
            (quarter.clone(), 2),
            (quarter.clone(), 3),
        ],
    );
    out.push((sq.clone(), edge.clone(), uniform4, vec![0, 1]));
    let diagonal = referee_test(&sq, &set(&sq, &[0, 2])).unwrap();
    out.push((
        sq.clone(),
        diagonal,
        mixture(&sq, &[(half.clone(), 1), (half.clone(), 3)]),
        vec![0, 1],
    ));

    let bb = min_tensor(&b, &b).into_system();
    let rbb = srm_product(&rb, &rb);
    let uniform_bb = mixture(
        &bb,
        &[
            (quarter.clone(), 0),
            (quarter.clone(), 1),
            (quarter.clone(), 2),
            (quarter, 3),
        ],
    );
    out.push((bb.clone(), rbb.clone(), uniform_bb, vec![0, 1, 2, 3]));
    // correlated: branches 1 and 2 vanish and fold into branch 0
    out.push((
        bb.clone(),
        rbb,
        mixture(&bb, &[(half.clone(), 0), (half.clone(), 3)]),
        vec![0, 3],
    ));

    let sqb = min_tensor(&sq, &b).into_system();
    let rsqb = srm_product(&edge, &rb);
    // alpha4 answers like alpha1, so branch 3 is the one folded in
    out.push((
        sqb.clone(),
        rsqb,
        mixture(
            &sqb,
            &[(third.clone(), 1), (third.clone(), 2), (third.clone(), 6)],
        ),
        vec![0, 1, 2],
    ));

    // coarse measurement on the trit: {e1 + e2, e3} preparing alpha1, alpha3
    let coarse = Measurement::new(
        &t,
        vec![
            RationalVector::from_ints(&[1, 1, 0]),
            RationalVector::from_ints(&[0, 0, 1]),
        ],
    )
    .unwrap();
    let prepared = [t.pure_state(0).unwrap(), t.pure_state(2).unwrap()];
    let srm = SrmTest::measure_prepare(&t, &coarse, &prepared).unwrap();
    out.push((t, srm, uniform3, vec![0, 1]));
    out
}

fn criterion_9() -> Outcome {
    let mut referees = 0;
    for sys in [bit(), trit(), square_bit()] {
        for cs in ok(all_maximal_classical_sets(&sys))? {
            let r = ok(referee_test(&sys, &cs))?;
            ensure(is_srm(r.test()), || {
                format!("{}: referee not sharply repeatable", sys.name())
            })?;
            ensure(is_srm(srm_product(&r, &r).test()), || {
                "product of SRMs is not an SRM".into()
            })?;
            referees += 1;
        }
    }
    let fixtures = srm_fixtures();
    let mut fold_ins = 0;
    for (k, (sys, srm, rho, live)) in fixtures.iter().enumerate() {
        ensure(is_srm(srm.test()), || format!("fixture {k}: not an SRM"))?;
        let lemma = ok(srm_distinguishability_lemma(sys, srm, rho))?;
        ensure(&lemma.branch_indices == live, || {
            format!(
                "fixture {k}: live branches {:?}, expected {live:?}",
                lemma.branch_indices
            )
        })?;
        for (s, &i) in lemma.states.iter().zip(live) {
            let out = srm.branches()[i].apply_vector(rho.vector());
            let norm = sys.unit().dot(&out);
            ensure(
                s.is_normalized() && *s.vector() == out.scale(&(int(1) / norm)),
                || format!("fixture {k}: branch {i} output not renormalized"),
            )?;
        }
        match &lemma.measurement {
            None => ensure(live.len() == 1, || {
                format!("fixture {k}: missing measurement")
            })?,
            Some(m) => {
                let vectors: Vec<RationalVector> =
                    lemma.states.iter().map(|s| s.vector().clone()).collect();
                ensure(m.distinguishes(&vectors), || {
                    format!("fixture {k}: delta_ij fails")
                })?;
                ensure(&m.total() == sys.unit(), || {
                    format!("fixture {k}: effects do not sum to u")
                })?;
                if live.len() < srm.len() {
                    fold_ins += 1;
                }
            }
        }
    }
    Ok(format!(
        "{referees} referee tests and products sharply repeatable; {} lemma fixtures, {fold_ins} with fold-in",
        fixtures.len()
    ))
}

fn sbs_fixtures() -> Vec<(String, CompositeSystem, ClassicalSet, SbsSpec)> {
    let theories = [("bit", bit()), ("trit", trit()), ("sqbit", square_bit())];
    let mut out = Vec::new();
    for (s_name, s) in &theories {
        let cs = greedy(s);
        for (f_name, f) in &theories {
            let fs = greedy(f).vectors(f);
            for n in 1..=2usize {
                for r in 1..=cs.len().min(fs.len()) {
                    let mut parts = vec![s.clone()];
                    parts.extend(std::iter::repeat_n(f.clone(), n));
                    let composite = min_tensor_many(&parts).unwrap();
                    let probs: Vec<Rational> = match r {
                        1 => vec![int(1)],
                        2 => vec![rat(1, 3), rat(2, 3)],
                        _ => vec![rat(1, 6), rat(1, 3), rat(1, 2)],
                    };
                    let pointers: Vec<usize> = (0..r).map(|i| cs.len() - 1 - i).collect();
                    let fragment_states = (0..r)
                        .map(|i| (0..n).map(|k| fs[(i + k) % fs.len()].clone()).collect())
                        .collect();
                    let spec = SbsSpec {
                        probs,
                        pointers,
                        fragment_states,
                        fragment_measurements: vec![None; n],
                    };
                    out.push((
                        format!("{s_name} x {f_name}^{n}, r={r}"),
                        composite,
                        cs.clone(),
                        spec,
                    ));
                }
            }
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let fixtures = sbs_fixtures();
    for (name, composite, cs, spec) in &fixtures {
        let (rho, _) = ok(build_sbs(composite, cs, spec))?;
        let verdict = ok(is_sbs(composite, &rho, cs))?;
        ensure(verdict.is_sbs(), || {
            format!("{name}: built state not detected as SBS")
        })?;
        let players = ok(synthesize_winning_strategy(composite, &rho, cs))?
            .ok_or_else(|| format!("{name}: no strategy synthesized"))?;
        let referee = ok(referee_test(&composite.factors()[0], cs))?;
        let game = ok(play_game(composite, &rho, cs, &referee, &players))?;
        ensure(game.win && game.agreement && game.non_disturbing, || {
            format!("{name}: game lost")
        })?;
        let mut total = int(0);
        for entry in &game.joint_probs {
            let first = entry.outcomes[0];
            let diagonal = entry.outcomes.iter().all(|&o| o == first);
            let expected = match spec.pointers.iter().position(|&p| p == first) {
                Some(b) if diagonal => spec.probs[b].clone(),
                _ => int(0),
            };
            ensure(entry.probability == expected, || {
                format!(
                    "{name}: P{:?} = {}, expected {expected}",
                    entry.outcomes, entry.probability
                )
            })?;
            total += &entry.probability;
        }
        ensure(total == int(1), || format!("{name}: table sums to {total}"))?;
        let t = diagonal_game_channel(&referee, &players);
        ensure(t.apply_vector(rho.vector()) == *rho.vector(), || {
            format!("{name}: T rho != rho")
        })?;
    }
    Ok(format!(
        "{} SBS fixtures won with exact tables",
        fixtures.len()
    ))
}

fn load_state(comp: &CompositeSystem, file: &str) -> Result<GptState, String> {
    let v = ok(load_states_file(&fixtures().join(file)))?;
    ok(GptState::new(comp.system(), v[0].clone()))
}

fn criterion_11() -> Outcome {
    let cases = [
        (
            "classical:2 x classical:2",
            "non_sbs_bit_pair.json",
            SbsStep::Distinguishability,
            6,
        ),
        (
            "classical:2 x classical:2 x classical:2",
            "correlated_fragments.json",
            SbsStep::Factorization,
            36,
        ),
    ];
    let mut details = Vec::new();
    for (theory, file, step, family) in cases {
        let comp = recipe(theory);
        let rho = load_state(&comp, file)?;
        let cs = greedy(&comp.factors()[0]);
        match ok(is_sbs(&comp, &rho, &cs))? {
            SbsVerdict::No { step: got, .. } if got == step => {}
            other => {
                return Err(format!(
                    "{file}: expected failure at step {}, got {other:?}",
                    step.number()
                ))
            }
        }
        let scan = ok(scan_canonical_strategies(&comp, &rho, &cs))?;
        ensure(scan.strategies_tried == family && scan.wins == 0, || {
            format!(
                "{file}: {} strategies, {} wins",
                scan.strategies_tried, scan.wins
            )
        })?;
        details.push(format!(
            "{file} fails step {}, 0/{family} wins",
            step.number()
        ));
    }
    Ok(details.join("; "))
}

fn criterion_12() -> Outcome {
    let mut states = 0;
    let mut channels = 0;
    for (s, f) in [(bit(), bit()), (square_bit(), bit())] {
        let comp = min_tensor(&s, &f);
        let cs = greedy(&s);
        let family = ok(canonical_strategy_family(&f, cs.len()))?;
        for player in family {
            let report = ok(fixed_point_sbs_check(&comp, &cs, &[player]))?;
            ensure(!report.fixed_states.is_empty(), || {
                format!("{}: no fixed state found", comp.system().name())
            })?;
            ensure(report.all_sbs(), || {
                format!(
                    "{}: fixed state {} is not SBS",
                    comp.system().name(),
                    report.fixed_states[report.failures[0]]
                )
            })?;
            states += report.fixed_states.len();
            channels += 1;
        }
    }
    Ok(format!(
        "{states} fixed cone states over {channels} game channels, all SBS"
    ))
}

fn criterion_13() -> Outcome {
    let mut positives = 0;
    for d in 2..=5 {
        let sys = classical_simplex(d).unwrap();
        let rep = ok(classical_theory_report(&sys))?;
        ensure(rep.classical, || format!("classical:{d} not classical"))?;
        ensure(rep.linearly_independent, || {
            format!("classical:{d}: pure states dependent")
        })?;
        ensure(rep.unrestricted, || format!("classical:{d}: restricted"))?;
        ensure(rep.effect_cone_from_measurement, || {
            format!("classical:{d}: effect cone too large")
        })?;
        positives += 1;
    }
    let negatives: Vec<GptSystem> = vec![
        square_bit(),
        restricted_trit(),
        ok(load_theory_file(
            &fixtures().join("sqbit.json"),
            DEFAULT_MAX_DIM,
        ))?
        .system()
        .clone(),
        ok(load_theory_file(
            &fixtures().join("rtrit.json"),
            DEFAULT_MAX_DIM,
        ))?
        .system()
        .clone(),
    ];
    for sys in &negatives {
        ensure(!ok(classical_theory_report(sys))?.classical, || {
            format!("{} reported classical", sys.name())
        })?;
    }
    Ok(format!(
        "{positives} classical simplices affirmed, {} non-classical rejected",
        negatives.len()
    ))
}

fn gptforge_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gptforge"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("GPTFORGE_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn criterion_14() -> Outcome {
    let bb = "classical:2 x classical:2";
    let bbb = "classical:2 x classical:2 x classical:2";
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--theory", "rtrit.json"],
        vec!["validate", "--theory", "sqbit.json", "--json"],
        vec!["validate", "--theory", "trit_bad_unit.json"],
        vec!["validate", "--theory", "malformed_rational.json"],
        vec![
            "distinguish",
            "--theory",
            "classical:3",
            "--state",
            "trit_pair.json",
        ],
        vec![
            "distinguish",
            "--theory",
            "rtrit.json",
            "--all-pairs",
            "--json",
        ],
        vec!["mid", "--theory", "sqbit.json", "--set", "α1,α2"],
        vec![
            "decohere",
            "--theory",
            "sqbit.json",
            "--set",
            "0,2",
            "--json",
        ],
        vec!["sbs-check", "--theory", bb, "--state", "sbs_bit_pair.json"],
        vec![
            "sbs-check",
            "--theory",
            bb,
            "--state",
            "non_sbs_bit_pair.json",
            "--json",
        ],
        vec![
            "sbs-check",
            "--theory",
            bbb,
            "--state",
            "correlated_fragments.json",
        ],
        vec![
            "game",
            "--theory",
            bb,
            "--state",
            "sbs_bit_pair.json",
            "--json",
        ],
        vec!["game", "--theory", bb, "--state", "non_sbs_bit_pair.json"],
        vec!["compose", "--theory", "sqbit x classical:2", "--json"],
    ];
    for args in &runs {
        let (a, b) = (gptforge_bin(args), gptforge_bin(args));
        ensure(
            a.stdout == b.stdout && a.stderr == b.stderr && a.status.code() == b.status.code(),
            || format!("gptforge {} differs between runs", args.join(" ")),
        )?;
        ensure(!a.stdout.is_empty() || !a.stderr.is_empty(), || {
            format!("gptforge {} printed nothing", args.join(" "))
        })?;
    }
    let matrix: Vec<(i32, Vec<&str>)> = vec![
        (0, vec!["validate", "--theory", "sqbit.json"]),
        (1, vec!["validate", "--theory", "trit_bad_unit.json"]),
        (2, vec!["validate", "--theory", "malformed_rational.json"]),
        (
            0,
            vec!["distinguish", "--theory", "classical:3", "--set", "0,1,2"],
        ),
        (
            1,
            vec!["distinguish", "--theory", "rtrit.json", "--set", "0,1"],
        ),
        (
            2,
            vec!["distinguish", "--theory", "sqbit.json", "--set", "0,9"],
        ),
        (0, vec!["mid", "--theory", "sqbit.json", "--set", "α1,α2"]),
        (1, vec!["mid", "--theory", "rtrit.json"]),
        (2, vec!["mid", "--theory", "no_such_theory"]),
        (
            0,
            vec!["sbs-check", "--theory", bb, "--state", "sbs_bit_pair.json"],
        ),
        (
            1,
            vec![
                "sbs-check",
                "--theory",
                bb,
                "--state",
                "non_sbs_bit_pair.json",
            ],
        ),
        (
            2,
            vec![
                "sbs-check",
                "--theory",
                "sqbit.json",
                "--state",
                "sbs_bit_pair.json",
            ],
        ),
    ];
    for (code, args) in &matrix {
        let got = gptforge_bin(args).status.code();
        ensure(got == Some(*code), || {
            format!("gptforge {}: exit {got:?}, expected {code}", args.join(" "))
        })?;
    }
    Ok(format!(
        "{} invocations byte-identical; {}-case exit matrix honored",
        runs.len(),
        matrix.len()
    ))
}

fn main() {
    let criteria: [fn() -> Outcome; 14] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
        criterion_13,
        criterion_14,
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, check) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS ({detail}) [{secs:.2}s]", i + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {}: FAIL ({reason}) [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
