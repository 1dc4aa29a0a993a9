use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use powerdomain::skorohod::SkorohodError;
use powerdomain::text;
use powerdomain::{
    build_schedule, cdf, lower_adjoint, portmanteau_check, pushforward_lebesgue, represent, skorohod, skorohod_sequence,
    skorohod_subprobability, OrderDecision, PipelineError, Poset, RepresentationMap, SimpleValuation, Space,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::workspace::Workspace;
use crate::{Command, Common, Pair};

/// Writes the report to `--out` or standard output.
fn emit(common: &Common, report: &str) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, report).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(report.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_dot(common: &Common, dot: impl FnOnce() -> String) -> Result<()> {
    if let Some(path) = &common.dot {
        fs::write(path, dot()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn load_pair(ws: &mut Workspace, pair: &Pair) -> Result<(Arc<Poset>, SimpleValuation, SimpleValuation)> {
    let p = ws.load_poset(&pair.common.poset)?;
    let mu = ws.load_valuation(&pair.mu, &p)?;
    let nu = ws.load_valuation(&pair.nu, &p)?;
    Ok((p, mu, nu))
}

fn opt(n: Option<usize>) -> String {
    n.map_or_else(|| "none".to_string(), |n| n.to_string())
}

/// Bits of a seeded ChaCha stream, least significant first within each word.
fn bit_stream(seed: u64) -> impl Iterator<Item = bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut word = 0u64;
    let mut left = 0u32;
    std::iter::from_fn(move || {
        if left == 0 {
            word = rng.next_u64();
            left = 64;
        }
        let bit = word & 1 == 1;
        word >>= 1;
        left -= 1;
        Some(bit)
    })
}

/// Runs one command; `Ok(false)` is a negative verdict.
pub fn run(command: Command) -> Result<bool> {
    let mut ws = Workspace::default();
    match command {
        Command::Order(pair) => {
            let (p, mu, nu) = load_pair(&mut ws, &pair)?;
            let mut out = String::new();
            let verdict = match mu.decide_order(&nu)? {
                OrderDecision::Leq(plan) => {
                    out.push_str("LEQ: true\n");
                    out.push_str(&plan.display(&p));
                    true
                }
                OrderDecision::NotLeq(u) => {
                    out.push_str("LEQ: false\n");
                    let _ = writeln!(out, "witness {} mu {} nu {}", u.display(&p), mu.evaluate(&u)?, nu.evaluate(&u)?);
                    false
                }
            };
            emit(&pair.common, &out)?;
            emit_dot(&pair.common, || p.to_dot())?;
            Ok(verdict)
        }
        Command::Waybelow { pair, normalized } => {
            let (_, mu, nu) = load_pair(&mut ws, &pair)?;
            let mut out = String::new();
            let verdict = if normalized {
                let k = mu.way_below_epsilon(&nu)?;
                let _ = writeln!(out, "WAYBELOW: {}\nmode probability", k.is_some());
                if let Some(k) = k {
                    let _ = writeln!(out, "epsilon 1/2^{k}");
                }
                k.is_some()
            } else {
                let wb = mu.way_below(&nu, Space::Subprobability)?;
                let _ = writeln!(out, "WAYBELOW: {wb}\nmode subprobability");
                wb
            };
            emit(&pair.common, &out)?;
            Ok(verdict)
        }
        Command::Transport(pair) => {
            let (p, mu, nu) = load_pair(&mut ws, &pair)?;
            match mu.decide_order(&nu)? {
                OrderDecision::Leq(plan) => {
                    emit(&pair.common, &plan.display(&p))?;
                    Ok(true)
                }
                OrderDecision::NotLeq(u) => {
                    emit(&pair.common, &format!("NOT COMPARABLE\nwitness {}\n", u.display(&p)))?;
                    Ok(false)
                }
            }
        }
        Command::Classify(common) => {
            let p = ws.load_poset(&common.poset)?;
            let c = p.classify();
            let out = format!(
                "elements {}\nchain: {}\nbounded_complete: {}\nlattice: {}\n",
                p.len(),
                c.is_chain,
                c.is_bounded_complete,
                c.is_lattice
            );
            emit(&common, &out)?;
            emit_dot(&common, || p.to_dot())?;
            Ok(true)
        }
        Command::Schedule { common, mu, k } => {
            let p = ws.load_poset(&common.poset)?;
            let target = ws.load_valuation(&mu, &p)?;
            let schedule = build_schedule(&target, k)?;
            let mut out = format!("stages {}\nstrict {}\n", schedule.stages().len(), schedule.is_strict()?);
            for (i, stage) in schedule.stages().iter().enumerate() {
                let _ = writeln!(out, "stage {i}");
                out.push_str(&text::write_valuation(stage));
            }
            emit(&common, &out)?;
            Ok(true)
        }
        Command::Represent { common, mu, k } => {
            let p = ws.load_poset(&common.poset)?;
            let target = ws.load_valuation(&mu, &p)?;
            let map = represent(&build_schedule(&target, k)?)?;
            emit(&common, &text::write_map(&map))?;
            emit_dot(&common, || map.to_dot())?;
            Ok(true)
        }
        Command::Sample { common, map, mu, k, seed, count } => {
            let p = ws.load_poset(&common.poset)?;
            let map: RepresentationMap = match (map, mu, k) {
                (Some(path), _, _) => ws.load_map(&path, &p)?,
                (None, Some(mu), Some(k)) => represent(&build_schedule(&ws.load_valuation(&mu, &p)?, k)?)?,
                _ => bail!("sample needs --map, or --mu together with --K"),
            };
            let mut bits = bit_stream(seed);
            let mut counts = vec![0usize; p.len()];
            for _ in 0..count {
                counts[map.sample(&mut bits)?.index()] += 1;
            }
            let mut out = format!("seed {seed}\ndraws {count}\ndepth {}\n", map.depth());
            for x in p.elements() {
                if counts[x.index()] > 0 {
                    let _ = writeln!(out, "count {} {}", p.name(x), counts[x.index()]);
                }
            }
            emit(&common, &out)?;
            Ok(true)
        }
        Command::Converge { common, seq, mu, k, from } => {
            let p = ws.load_poset(&common.poset)?;
            let targets = ws.load_sequence(&seq, &p)?;
            let limit = ws.load_valuation(&mu, &p)?;
            let result = match skorohod_sequence(&targets, &limit, k, from) {
                Ok(r) => r,
                Err(PipelineError::Skorohod(SkorohodError::NotConvergent(nc))) => {
                    emit(&common, &format!("CONVERGENT: false\nwitness {} index {}\n", nc.set_display, nc.witness.index))?;
                    return Ok(false);
                }
                Err(e) => return Err(e.into()),
            };
            let report = &result.report;
            let mut out = format!("CONVERGENT: true\nprecision {}\n", report.precision);
            for o in &report.convergence.outcomes {
                let equal = if o.maximal { opt(o.eventually_equal) } else { "-".to_string() };
                let _ = writeln!(
                    out,
                    "word {} limit {} maximal {} above {} equal {}",
                    o.word,
                    p.name(o.limit_value),
                    o.maximal,
                    opt(o.eventually_above),
                    equal
                );
            }
            let _ = writeln!(out, "maximal_words {}\nequal_words {}", report.maximal_words(), report.equal_words());
            let _ = writeln!(out, "DICHOTOMY: {}", report.convergence.holds());
            emit(&common, &out)?;
            Ok(report.convergence.holds())
        }
        Command::Skorohod { common, mu, k, subprobability } => {
            let p = ws.load_poset(&common.poset)?;
            let target = ws.load_valuation(&mu, &p)?;
            let witness = if subprobability { skorohod_subprobability(&target, k)? } else { skorohod(&target, k)? };
            let mut out = format!("precision {}\ndriver {}\n", witness.precision, witness.driver());
            for r in witness.records()? {
                let value = r.value.map_or("undefined", |y| witness.map.base().name(y));
                let _ = writeln!(out, "grid {} {} {}", r.point, r.word, value);
            }
            let law = witness.tabulate()?;
            let _ = writeln!(out, "law");
            out.push_str(&text::write_valuation(&law));
            let _ = writeln!(out, "EXACT: {}", law == target);
            emit(&common, &out)?;
            emit_dot(&common, || witness.map.to_dot())?;
            Ok(law == target)
        }
        Command::Cdf { common, mu } => {
            let p = ws.load_poset(&common.poset)?;
            let f = cdf(&ws.load_valuation(&mu, &p)?)?;
            let mut out = String::new();
            for (x, t) in f.values() {
                let _ = writeln!(out, "cdf {} {}", p.name(x), t);
            }
            emit(&common, &out)?;
            Ok(true)
        }
        Command::Quantile { common, mu } => {
            let p = ws.load_poset(&common.poset)?;
            let g = lower_adjoint(&cdf(&ws.load_valuation(&mu, &p)?)?);
            emit(&common, &text::write_quantile(&g))?;
            Ok(true)
        }
        Command::PushforwardLebesgue { common, quantile } => {
            let p = ws.load_poset(&common.poset)?;
            let source = fs::read_to_string(&quantile).with_context(|| format!("cannot read {}", quantile.display()))?;
            let g = text::parse_quantile(&source, &p)?;
            emit(&common, &text::write_valuation(&pushforward_lebesgue(&g)?))?;
            Ok(true)
        }
        Command::Portmanteau { common, seq, mu, from } => {
            let p = ws.load_poset(&common.poset)?;
            let targets = ws.load_sequence(&seq, &p)?;
            let limit = ws.load_valuation(&mu, &p)?;
            let report = portmanteau_check(&targets, &limit, from)?;
            let mut out = String::new();
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "set {} limit {} min {} max {} liminf {} limsup {}",
                    c.set.display(&p),
                    c.limit,
                    c.tail_min,
                    c.tail_max,
                    c.liminf_ok,
                    c.limsup_ok
                );
            }
            let _ = writeln!(out, "PORTMANTEAU: {}", if report.passed() { "pass" } else { "fail" });
            if let Some(w) = &report.witness {
                let _ = writeln!(
                    out,
                    "witness {} index {} {:?} value {} limit {}",
                    w.set.display(&p),
                    w.index,
                    w.condition,
                    w.value,
                    w.limit
                );
            }
            emit(&common, &out)?;
            Ok(report.passed())
        }
    }
}
