//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

mod oracle;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rexo_core::corpus::write_canonical;
use rexo_core::partition::partition_split;
use rexo_core::retention::run_retention;
use rexo_core::scorer::{evaluate, micro_prf, ner_key, relation_key};
use rexo_core::stats::entity_stats;
use rexo_core::swap::{score_swap, select_swappable, swap_sentence, SwapConfig, SwapOutcome};
use rexo_core::synthetic::{
    news_like_split, random_predictions, random_split, swappable_sentence, SynthConfig,
};
use rexo_core::{
    CaseMode, EvalReport, MatchSetting, Mention, Relation, Sentence, Split, TrainIndex,
};

type Check = Result<String, String>;
type Criterion<'a> = Box<dyn FnOnce() -> Check + 'a>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

const ROUNDS: usize = 200;

fn case_for(round: usize) -> CaseMode {
    if round.is_multiple_of(2) {
        CaseMode::Sensitive
    } else {
        CaseMode::Fold
    }
}

fn within(limit: Duration, started: Instant) -> Check {
    let took = started.elapsed();
    ensure!(took < limit, "took {took:.2?}, limit {limit:?}");
    Ok(format!("{took:.2?}"))
}

fn partition_oracle() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = SynthConfig::default();
    let (mut mentions, mut relations) = (0usize, 0usize);
    for round in 0..ROUNDS {
        let case = case_for(round);
        let train = random_split(&mut rng, "t", &cfg);
        let test = random_split(&mut rng, "e", &cfg);
        let report = partition_split(&TrainIndex::build(&train, case), &test);
        for (s, got) in test.iter().zip(&report.sentences) {
            let want_m = oracle::sentence_mention_labels(&train, s, case);
            let got_m: Vec<_> = got.mentions.iter().map(|p| p.label()).collect();
            ensure!(
                want_m == got_m,
                "round {round}, sentence {}: mentions {got_m:?} != {want_m:?}",
                s.id
            );
            let want_r = oracle::sentence_relation_labels(&train, s, case);
            let got_r: Vec<_> = got.relations.iter().map(|p| p.label()).collect();
            ensure!(
                want_r == got_r,
                "round {round}, sentence {}: relations {got_r:?} != {want_r:?}",
                s.id
            );
            mentions += want_m.len();
            relations += want_r.len();
        }
    }
    let time = within(Duration::from_secs(10), started)?;
    Ok(format!(
        "{ROUNDS} corpora, {mentions} mentions, {relations} relations agree; {time}"
    ))
}

struct Evaluation {
    train: Split,
    gold: Split,
    pred: Split,
    case: CaseMode,
    report: EvalReport,
}

fn evaluation_suite() -> Vec<Evaluation> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = SynthConfig::default();
    (0..ROUNDS)
        .map(|round| {
            let case = case_for(round);
            let train = random_split(&mut rng, "t", &cfg);
            let gold = random_split(&mut rng, "e", &cfg);
            let pred = random_predictions(&mut rng, &gold, &cfg);
            let report = evaluate(
                &TrainIndex::build(&train, case),
                &gold,
                &pred,
                &MatchSetting::ALL,
            )
            .expect("generated predictions align");
            Evaluation {
                train,
                gold,
                pred,
                case,
                report,
            }
        })
        .collect()
}

fn library_key_counts(gold: &Split, pred: &Split, setting: MatchSetting) -> (u64, u64, u64) {
    let c = if setting == MatchSetting::Ner {
        let keys = |s: &Split| -> BTreeSet<_> {
            s.iter()
                .flat_map(|x| x.mentions.iter().map(|m| (x.id.clone(), ner_key(m))))
                .collect()
        };
        micro_prf(&keys(gold), &keys(pred))
    } else {
        let keys = |s: &Split| -> BTreeSet<_> {
            s.iter()
                .flat_map(|x| {
                    x.relations
                        .iter()
                        .map(move |r| (x.id.clone(), relation_key(x, r, setting)))
                })
                .collect()
        };
        micro_prf(&keys(gold), &keys(pred))
    };
    (c.tp, c.fp, c.fn_)
}

fn scoring_oracle(suite: &[Evaluation]) -> Check {
    ensure!(suite.len() == ROUNDS, "evaluation suite failed to generate");
    let started = Instant::now();
    let mut compared = 0usize;
    for (round, e) in suite.iter().enumerate() {
        for sr in &e.report.settings {
            let setting = sr.setting;
            let (want, want_parts) =
                oracle::score(&e.train, &e.gold, &e.pred, setting.label(), e.case);
            let got = (sr.overall.tp, sr.overall.fp, sr.overall.fn_);
            ensure!(
                got == want,
                "round {round}, {}: overall {got:?} != {want:?}",
                setting.label()
            );
            let keyed = library_key_counts(&e.gold, &e.pred, setting);
            ensure!(
                keyed == want,
                "round {round}, {}: micro_prf {keyed:?} != {want:?}",
                setting.label()
            );
            for label in setting.partition_labels() {
                let c = sr.partition(label);
                let want = want_parts.get(label).copied().unwrap_or_default();
                ensure!(
                    (c.tp, c.fp, c.fn_) == want,
                    "round {round}, {}/{label}: {:?} != {want:?}",
                    setting.label(),
                    (c.tp, c.fp, c.fn_)
                );
            }
            let (p, r, f) = oracle::prf(want.0, want.1, want.2);
            let o = &sr.overall;
            ensure!(
                (o.precision() - p).abs() <= 1e-12
                    && (o.recall() - r).abs() <= 1e-12
                    && (o.f1() - f).abs() <= 1e-12,
                "round {round}, {}: metrics differ",
                setting.label()
            );
            compared += 1;
        }
    }
    let time = within(Duration::from_secs(10), started)?;
    Ok(format!(
        "{ROUNDS} gold/pred pairs x 3 settings ({compared} reports) match exactly; {time}"
    ))
}

fn additivity(suite: &[Evaluation]) -> Check {
    ensure!(suite.len() == ROUNDS, "evaluation suite failed to generate");
    let mut checked = 0usize;
    for (round, e) in suite.iter().enumerate() {
        for sr in &e.report.settings {
            let labels = sr.setting.partition_labels();
            ensure!(
                sr.partitions.keys().all(|k| labels.contains(k)),
                "round {round}, {}: unexpected partition {:?}",
                sr.setting.label(),
                sr.partitions.keys().collect::<Vec<_>>()
            );
            let sum = labels.iter().map(|l| sr.partition(l)).sum();
            ensure!(
                sr.overall == sum,
                "round {round}, {}: {:?} != {sum:?}",
                sr.setting.label(),
                sr.overall
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} setting reports, zero violations"))
}

fn econ_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = SynthConfig::default();
    let mut checked = 0usize;
    for round in 0..ROUNDS {
        let case = case_for(round);
        let train = random_split(&mut rng, "t", &cfg);
        let eval = random_split(&mut rng, "e", &cfg);
        let Ok(stats) = entity_stats(&TrainIndex::build(&train, case), &eval) else {
            continue;
        };
        if stats.e_lex == 0.0 {
            continue;
        }
        let star = stats
            .e_con_star
            .ok_or_else(|| format!("round {round}: eConStar missing with eLex > 0"))?;
        ensure!(
            (stats.e_con - star * stats.e_lex).abs() <= 1e-12,
            "round {round}: eCon {} vs eConStar*eLex {}",
            stats.e_con,
            star * stats.e_lex
        );
        let exact =
            oracle::exact_entity_stats(&train, &eval, case).ok_or("oracle saw no mentions")?;
        let exact_star = exact
            .e_con_star
            .clone()
            .ok_or("oracle saw no seen mentions")?;
        ensure!(
            exact.e_con == &exact_star * &exact.e_lex,
            "round {round}: rational identity fails"
        );
        for (name, got, want) in [
            ("eCon", stats.e_con, &exact.e_con),
            ("eConStar", star, &exact_star),
            ("eLex", stats.e_lex, &exact.e_lex),
        ] {
            let want = want.to_f64().unwrap_or(f64::NAN);
            ensure!(
                (got - want).abs() <= 1e-12,
                "round {round}: {name} {got} vs exact {want}"
            );
        }
        checked += 1;
    }
    ensure!(checked > 0, "no corpus had eLex > 0");
    Ok(format!(
        "{checked} corpora with eLex > 0, floating and exact rational checks hold"
    ))
}

/// Mono-typed, mono-predicated, non-nested sentences whose names occur
/// nowhere else.
fn retention_fixture(rng: &mut ChaCha8Rng) -> Split {
    const FILLER: [&str; 6] = ["the", "of", "and", "said", "in", "to"];
    (0..60)
        .map(|i| {
            let mut s = Sentence::new(format!("f{i}"), Vec::<String>::new());
            for j in 0..rng.gen_range(2..=4) {
                for _ in 0..rng.gen_range(0..3) {
                    s.tokens
                        .push(FILLER[rng.gen_range(0..FILLER.len())].to_owned());
                }
                let start = s.tokens.len();
                for k in 0..rng.gen_range(1..=3) {
                    s.tokens.push(format!("N{i}x{j}y{k}"));
                }
                s.mentions.push(Mention::new(start, s.tokens.len(), "E"));
            }
            let n = s.mentions.len();
            for h in 0..n {
                for t in 0..n {
                    if h != t && rng.gen_bool(0.4) {
                        s.relations.push(Relation::new(h, t, "R"));
                    }
                }
            }
            if s.relations.is_empty() {
                s.relations.push(Relation::new(0, 1, "R"));
            }
            s
        })
        .collect()
}

fn retention_sanity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fixture = retention_fixture(&mut rng);
    let mut summary = Vec::new();
    for case in [CaseMode::Sensitive, CaseMode::Fold] {
        let pred = run_retention(&fixture, &fixture, case).map_err(|e| e.to_string())?;
        let report = evaluate(
            &TrainIndex::build(&fixture, case),
            &fixture,
            &pred,
            &[MatchSetting::Ner, MatchSetting::RelStrict],
        )
        .map_err(|e| e.to_string())?;
        for sr in &report.settings {
            let f1 = sr.overall.f1();
            ensure!(
                f1 == 1.0,
                "{case}: {} F1 = {f1} ({:?})",
                sr.setting.label(),
                sr.overall
            );
        }
        summary.push(format!("{case}"));
    }
    Ok(format!(
        "{} sentences, {} mentions, {} relations: NER F1 = 1 and strict F1 = 1 ({})",
        fixture.len(),
        fixture.mention_count(),
        fixture.relation_count(),
        summary.join(", ")
    ))
}

fn swap_involution() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let config = SwapConfig::new("Kill", "Peop");
    for i in 0..100 {
        let original = swappable_sentence(&mut rng, format!("s{i}"), "Kill", "Peop");
        let split = Split::new(vec![original.clone()]);
        let eligible = select_swappable(&split, &config);
        ensure!(
            eligible.len() == 1,
            "{}: {} eligible relations",
            original.id,
            eligible.len()
        );
        let once = swap_sentence(&original, eligible[0].1).map_err(|e| e.to_string())?;
        let twice =
            swap_sentence(&once.swapped, once.target_relation_index).map_err(|e| e.to_string())?;

        let before = write_canonical(&split);
        let after = write_canonical(&Split::new(vec![twice.swapped]));
        ensure!(
            before == after,
            "{}: double swap differs\n{before}\n{after}",
            original.id
        );

        let mut a = original.tokens.clone();
        let mut b = once.swapped.tokens.clone();
        a.sort();
        b.sort();
        ensure!(a == b, "{}: token multiset changed", original.id);

        let gold: BTreeSet<_> = once
            .swapped
            .relations
            .iter()
            .map(|r| relation_key(&once.swapped, r, MatchSetting::RelStrict))
            .collect();
        ensure!(
            !gold.contains(&once.rev_gold.strict_key()),
            "{}: rev_gold is also gold",
            original.id
        );
    }
    Ok("100 sentences, zero violations".to_owned())
}

fn retention_under_swap() -> Check {
    let kill = |id: &str, prefix: &[&str]| {
        let mut tokens: Vec<&str> = prefix.to_vec();
        let a = tokens.len();
        tokens.extend(["Lee", "Harvey", "Oswald"]);
        tokens.extend(["shot", "and", "killed"]);
        let b = tokens.len();
        tokens.extend(["Kennedy", "."]);
        Sentence::new(id, tokens)
            .with_mention(a, a + 3, "Peop")
            .with_mention(b, b + 1, "Peop")
            .with_relation(0, 1, "Kill")
    };
    let train = Split::new(vec![kill("t0", &[])]);
    let test = Split::new(vec![kill("e0", &["Yesterday", ","])]);
    let config = SwapConfig::new("Kill", "Peop");
    let record = swap_sentence(&test.sentences[0], 0).map_err(|e| e.to_string())?;
    let swapped = Split::new(vec![record.swapped.clone()]);
    let pred = run_retention(&train, &swapped, CaseMode::Sensitive).map_err(|e| e.to_string())?;
    let index = TrainIndex::build(&train, CaseMode::Sensitive);
    let report = score_swap(&[record], &pred, &config, Some(&index)).map_err(|e| e.to_string())?;
    let (rev, re) = (report.rev_re.f1(), report.re.f1());
    ensure!(rev == 1.0 && re == 0.0, "revRE F1 = {rev}, RE F1 = {re}");
    ensure!(
        report.outcomes[0].outcome == SwapOutcome::OriginalOnly,
        "outcome {:?}",
        report.outcomes[0].outcome
    );
    Ok(format!(
        "\"{}\": revRE F1 = 1, RE F1 = 0",
        record_text(&swapped.sentences[0])
    ))
}

fn record_text(s: &Sentence) -> String {
    s.tokens.join(" ")
}

fn spert_json(split: &Split) -> String {
    let records: Vec<serde_json::Value> = split
        .iter()
        .enumerate()
        .map(|(i, s)| {
            serde_json::json!({
                "orig_id": 1000 + i,
                "tokens": s.tokens,
                "entities": s.mentions.iter().map(|m| serde_json::json!({
                    "type": m.entity_type, "start": m.start, "end": m.end,
                })).collect::<Vec<_>>(),
                "relations": s.relations.iter().map(|r| serde_json::json!({
                    "type": r.relation_type, "head": r.head, "tail": r.tail,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::to_string(&records).expect("JSON values serialize")
}

/// Train and test files in SpERT JSON: the real corpus when placed under
/// `tests/data/conll04`, a synthetic news-style corpus otherwise.
fn smoke_data(dir: &Path) -> (PathBuf, PathBuf, &'static str) {
    let real = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/conll04");
    let (train, test) = (
        real.join("conll04_train.json"),
        real.join("conll04_test.json"),
    );
    if train.is_file() && test.is_file() {
        return (train, test, "CoNLL04");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let train_split = news_like_split(&mut rng, "train", 900);
    let test_split = news_like_split(&mut rng, "test", 250);
    let (train, test) = (dir.join("train_spert.json"), dir.join("test_spert.json"));
    std::fs::write(&train, spert_json(&train_split)).expect("write train");
    std::fs::write(&test, spert_json(&test_split)).expect("write test");
    (train, test, "synthetic news-style SpERT corpus")
}

fn rexo(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rexo"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "rexo {} exited {}: {}",
        args.join(" "),
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

const SMOKE_OUTPUTS: [&str; 9] = [
    "partition.json",
    "partition.csv",
    "stats.json",
    "pred.json",
    "eval.json",
    "eval.md",
    "swapped.json",
    "map.json",
    "swap_report.json",
];

fn smoke_pipeline(dir: &Path, train: &Path, test: &Path) -> Result<(), String> {
    let (train, test) = (train.to_str().ok_or("path")?, test.to_str().ok_or("path")?);
    let spert = ["--from", "spert"];
    let with = |extra: &[&str]| -> Vec<String> {
        spert.iter().chain(extra).map(|s| s.to_string()).collect()
    };
    let run = |args: Vec<String>| rexo(dir, &args.iter().map(String::as_str).collect::<Vec<_>>());

    run(with(&[
        "partition",
        "--train",
        train,
        "--test",
        test,
        "--out",
        "partition.json",
    ]))?;
    run(with(&[
        "partition",
        "--train",
        train,
        "--test",
        test,
        "--format",
        "csv",
        "--out",
        "partition.csv",
    ]))?;
    run(with(&[
        "stats",
        "--train",
        train,
        "--eval",
        test,
        "--out",
        "stats.json",
    ]))?;
    run(with(&[
        "retention",
        "--train",
        train,
        "--input",
        test,
        "--out",
        "pred.json",
    ]))?;
    run(with(&["convert", "--input", train, "--out", "train.json"]))?;
    run(with(&["convert", "--input", test, "--out", "gold.json"]))?;
    rexo(
        dir,
        &[
            "eval",
            "--train",
            "train.json",
            "--gold",
            "gold.json",
            "--pred",
            "pred.json",
            "--out",
            "eval.json",
        ],
    )?;
    rexo(
        dir,
        &[
            "eval",
            "--train",
            "train.json",
            "--gold",
            "gold.json",
            "--pred",
            "pred.json",
            "--format",
            "md",
            "--out",
            "eval.md",
        ],
    )?;
    run(with(&[
        "swap",
        "--input",
        test,
        "--relation",
        "Kill",
        "--arg-type",
        "Peop",
        "--out",
        "swapped.json",
        "--map",
        "map.json",
    ]))?;
    rexo(
        dir,
        &[
            "retention",
            "--train",
            "train.json",
            "--input",
            "swapped.json",
            "--out",
            "swap_pred.json",
        ],
    )?;
    rexo(
        dir,
        &[
            "score-swap",
            "--swapped",
            "swapped.json",
            "--map",
            "map.json",
            "--pred",
            "swap_pred.json",
            "--relation",
            "Kill",
            "--arg-type",
            "Peop",
            "--train",
            "train.json",
            "--out",
            "swap_report.json",
        ],
    )
}

fn read_json(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn smoke_run() -> Check {
    let data = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (train, test, source) = smoke_data(data.path());
    let started = Instant::now();
    let runs = [tempfile::tempdir(), tempfile::tempdir()];
    for dir in &runs {
        let dir = dir.as_ref().map_err(|e| e.to_string())?;
        smoke_pipeline(dir.path(), &train, &test)?;
    }
    let time = within(Duration::from_secs(60), started)?;

    let dirs: Vec<&Path> = runs
        .iter()
        .map(|d| d.as_ref().expect("created").path())
        .collect();
    for name in SMOKE_OUTPUTS {
        let a = std::fs::read(dirs[0].join(name)).map_err(|e| format!("{name}: {e}"))?;
        let b = std::fs::read(dirs[1].join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(a == b, "{name} differs between runs");
    }

    let partition = read_json(&dirs[0].join("partition.json"))?;
    let props = &partition["summary"]["relations"]["proportions"];
    for label in ["exact", "partial", "new"] {
        ensure!(
            props[label].is_number(),
            "partition report lacks {label} proportion"
        );
    }
    let eval = read_json(&dirs[0].join("eval.json"))?;
    let strict = eval["settings"]
        .as_array()
        .and_then(|s| s.iter().find(|x| x["setting"] == "strict"))
        .ok_or("eval report lacks strict setting")?;
    let swap = read_json(&dirs[0].join("swap_report.json"))?;
    let swapped = swap["sentences"].as_u64().unwrap_or(0);
    ensure!(swapped > 0, "no sentence was swapped");

    Ok(format!(
        "{source}: exact/partial/new = {}/{}/{}, retention strict F1 = {}, {swapped} swaps, revRE F1 = {}, RE F1 = {}; reports byte-identical across 2 runs; {time}",
        props["exact"], props["partial"], props["new"], strict["overall"]["f1"], swap["rev_re"]["f1"], swap["re"]["f1"]
    ))
}

fn guarded(f: impl FnOnce() -> Check) -> Check {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let suite = catch_unwind(evaluation_suite).unwrap_or_default();
    let suite = suite.as_slice();
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("partition oracle", Box::new(partition_oracle)),
        ("scoring oracle", Box::new(|| scoring_oracle(suite))),
        ("count additivity", Box::new(|| additivity(suite))),
        ("eCon identity", Box::new(econ_identity)),
        ("retention sanity", Box::new(retention_sanity)),
        ("swap involution", Box::new(swap_involution)),
        ("retention under swap", Box::new(retention_under_swap)),
        ("smoke run", Box::new(smoke_run)),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.into_iter().enumerate() {
        match guarded(check) {
            Ok(detail) => println!("PASS {} {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
