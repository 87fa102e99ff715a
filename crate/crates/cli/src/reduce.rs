use anyhow::Result;
use clap::{Args, ValueEnum};
use qrom_core::primitives::{
    gmr_clawfree_gen, psf_from_clawfree, table_psf_gen, table_psf_skewed, GmrPair, Psf,
};
use qrom_core::qsim::script::distinguisher_corpus;
use qrom_core::reductions::{
    rand_uniformity_audit, run_games, ClawFreeFdhReduction, FdhPsfReduction, ForgeStrategy, GameTally,
    HistoryFreeReduction, KatzWangReduction, PlantedForger, UniformityReport,
};
use qrom_core::rng::{derive_tag, stream};
use qrom_core::schemes::{ClawFreeFdh, FdhPsf, KatzWang, SignatureScheme};
use serde_json::{json, Value};

use crate::report::{emit, Row};
use crate::Common;

pub const MSG_BITS: u32 = 16;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSel {
    All,
    ClawfreeFdh,
    KatzWang,
    FdhPsf,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long, value_enum, default_value_t = SchemeSel::All)]
    pub scheme: SchemeSel,
    /// Coron's p; defaults to max(2, q_SIGN).
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 20)]
    pub q_sign: usize,
}

type SectionFn = fn(&Setting) -> Result<(Vec<Row>, Value)>;

pub struct Setting {
    pub games: usize,
    pub q_sign: usize,
    pub p: Option<u64>,
    pub seed: u64,
}

fn gmr(seed: u64) -> Result<GmrPair> {
    Ok(gmr_clawfree_gen(16, &mut stream(derive_tag(seed, "gmr")))?)
}

fn tally(
    red: &dyn HistoryFreeReduction,
    signer: &dyn SignatureScheme,
    s: &Setting,
    tag: &str,
) -> Result<GameTally> {
    let forger = PlantedForger {
        signer,
        q_sign: s.q_sign,
        strategy: ForgeStrategy::Trapdoor,
    };
    Ok(run_games(red, &forger, s.games, derive_tag(s.seed, tag))?)
}

fn history_rows(section: &str, t: &GameTally) -> Vec<Row> {
    let p = format!("games={}", t.games);
    vec![
        Row::new(section, "rand-replay-mismatches", format!("{p}, replayed={}", t.rand_queries_replayed))
            .equal(0.0, t.replay_mismatches as f64, t.rand_queries_replayed),
        Row::new(section, "sign-inconsistent", p).equal(0.0, t.sign_inconsistent as f64, t.games),
    ]
}

fn audit_rows(section: &str, rep: &UniformityReport) -> Vec<Row> {
    let mut rows = vec![Row::new(section, "rand-eps-exact", format!("points={}", rep.points)).info(
        0.0,
        rep.eps_exact,
        rep.points,
    )];
    rows.push(
        Row::new(section, "rand-table-tv", "reference = table drawn from the exact law")
            .info(rep.reference_tv, rep.table_tv, rep.points),
    );
    for d in &rep.distinguishers {
        rows.push(
            Row::new(section, "rand-distinguisher-4q2-sqrt-eps", format!("script={}, q={}", d.script, d.queries))
                .at_most(d.bound, d.distance, 1),
        );
    }
    rows
}

pub fn clawfree_rows(s: &Setting) -> Result<(Vec<Row>, Value)> {
    let pair = gmr(s.seed)?;
    let p = s.p.unwrap_or(ClawFreeFdhReduction::<GmrPair>::default_p(s.q_sign));
    let red = ClawFreeFdhReduction::start(ClawFreeFdhReduction::instance(&pair.public()), p, MSG_BITS)?.1;
    let signer = ClawFreeFdh { pair, msg_bits: MSG_BITS };
    let t = tally(&red, &signer, s, "clawfree-fdh")?;
    let b1 = red.b_one_probability();
    let expect = (1.0 - b1).powi(s.q_sign as i32);
    let sec = "clawfree-fdh";
    let params = format!("p={p}, q_sign={}", s.q_sign);
    let mut rows = vec![
        Row::new(sec, "no-abort-vs-(1-1/p)^q", params.clone()).within(
            expect,
            t.no_abort_sign.value(),
            t.no_abort_sign.sigma_at(expect),
            t.games,
        ),
        Row::new(sec, "conversion-vs-1/p", params).within(
            b1,
            t.conversion.value(),
            t.conversion.sigma_at(b1),
            t.conversion.trials,
        ),
    ];
    rows.extend(history_rows(sec, &t));
    rows.extend(audit_rows(sec, &rand_uniformity_audit(&red, derive_tag(s.seed, "audit"), &[])?));
    Ok((rows, json!(t)))
}

pub fn katz_wang_rows(s: &Setting) -> Result<(Vec<Row>, Value)> {
    let pair = gmr(s.seed)?;
    let red = KatzWangReduction::start(KatzWangReduction::instance(&pair.public()), MSG_BITS)?.1;
    let signer = KatzWang { pair, msg_bits: MSG_BITS };
    let t = tally(&red, &signer, s, "katz-wang")?;
    let sec = "katz-wang";
    let params = format!("q_sign={}", s.q_sign);
    let mut rows = vec![
        Row::new(sec, "no-abort", params.clone()).equal(1.0, t.no_abort_sign.value(), t.games),
        Row::new(sec, "claw-rate-vs-1/2", params).within(
            0.5,
            t.accepted.value(),
            t.accepted.sigma_at(0.5),
            t.games,
        ),
    ];
    rows.extend(history_rows(sec, &t));
    rows.extend(audit_rows(sec, &rand_uniformity_audit(&red, derive_tag(s.seed, "audit"), &[])?));
    Ok((rows, json!(t)))
}

pub fn fdh_psf_rows(s: &Setting) -> Result<(Vec<Row>, Value)> {
    let sec = "fdh-psf";
    let params = format!("q_sign={}", s.q_sign);
    let pair = gmr(s.seed)?;
    let psf = psf_from_clawfree(pair.clone());
    let red = FdhPsfReduction::start(psf_from_clawfree(pair.public()), MSG_BITS)?.1;
    let signer = FdhPsf::new(psf, derive_tag(s.seed, "prf"), MSG_BITS);
    let t1 = tally(&red, &signer, s, "fdh-psf-e1")?;
    let mut rows = vec![Row::new(sec, "conversion-vs-1-2^-E", format!("{params}, E=1, claw-free psf")).within(
        0.5,
        t1.conversion.value(),
        t1.conversion.sigma_at(0.5),
        t1.conversion.trials,
    )];
    rows.extend(history_rows(sec, &t1));
    rows.extend(audit_rows(sec, &rand_uniformity_audit(&red, derive_tag(s.seed, "audit"), &[])?));

    let table = table_psf_gen(10, 6, &mut stream(derive_tag(s.seed, "table-psf")))?;
    let e = table.min_entropy();
    let expect = 1.0 - (-(e as f64)).exp2();
    let red = FdhPsfReduction::start(table.public(), 12)?.1;
    let signer = FdhPsf::new(table, derive_tag(s.seed, "prf"), 12);
    let t4 = tally(&red, &signer, s, "fdh-psf-e4")?;
    rows.push(Row::new(sec, "conversion-vs-1-2^-E", format!("{params}, E={e}, table psf 10->6")).within(
        expect,
        t4.conversion.value(),
        t4.conversion.sigma_at(expect),
        t4.conversion.trials,
    ));
    rows.extend(history_rows(sec, &t4));

    // a PSF with planted non-uniformity, small enough for the distinguisher corpus
    let skewed = table_psf_skewed(6, 2, 0.05, &mut stream(derive_tag(s.seed, "skewed")))?;
    let red = FdhPsfReduction::start(skewed, 2)?.1;
    let rep = rand_uniformity_audit(&red, derive_tag(s.seed, "audit-skewed"), &distinguisher_corpus())?;
    rows.extend(audit_rows("fdh-psf-skewed", &rep));
    Ok((rows, json!({"e1": t1, "table": t4})))
}

pub fn rows(sel: SchemeSel, s: &Setting) -> Result<(Vec<Row>, Value)> {
    let mut rows = Vec::new();
    let mut details = serde_json::Map::new();
    let runs: [(SchemeSel, &str, SectionFn); 3] = [
        (SchemeSel::ClawfreeFdh, "clawfree-fdh", clawfree_rows),
        (SchemeSel::KatzWang, "katz-wang", katz_wang_rows),
        (SchemeSel::FdhPsf, "fdh-psf", fdh_psf_rows),
    ];
    for (which, name, f) in runs {
        if sel == SchemeSel::All || sel == which {
            let (r, d) = f(s)?;
            rows.extend(r);
            details.insert(name.into(), d);
        }
    }
    Ok((rows, Value::Object(details)))
}

pub fn run(common: &Common, args: &ReduceArgs) -> Result<bool> {
    let s = Setting {
        games: common.trials.unwrap_or(10_000),
        q_sign: args.q_sign,
        p: args.p,
        seed: common.seed,
    };
    let (rows, details) = rows(args.scheme, &s)?;
    let params = json!({
        "scheme": format!("{:?}", args.scheme),
        "games": s.games,
        "q_sign": s.q_sign,
        "p": s.p,
    });
    emit(common, "reduce", params, &rows, details)
}
