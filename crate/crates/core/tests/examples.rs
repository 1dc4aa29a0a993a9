//! End-to-end worked examples on the diamond `bot < a, b < top` and the
//! three-element chain, driven through the text formats.

use std::sync::Arc;

use powerdomain::text;
use powerdomain::{
    build_schedule, cdf, lower_adjoint, pushforward_lebesgue, represent, skorohod, target_from_ratios,
    ApproximationSchedule, Dyadic, DyadicError, PipelineError, Poset, SimpleValuation, SkorohodError, Space,
    ValuationError, Word,
};

const M4: &str = "\
element bot
element a
element b
element top
bottom bot
cover bot a
cover bot b
cover a top
cover b top
";

const C3: &str = "element c0\nelement c1\nelement c2\nbottom c0\ncover c0 c1\ncover c1 c2\n";

fn m4() -> Arc<Poset> {
    Arc::new(text::parse_poset(M4).unwrap())
}

fn val(p: &Arc<Poset>, body: &str) -> SimpleValuation {
    text::parse_valuation(body, p).unwrap()
}

fn d(s: &str) -> Dyadic {
    s.parse().unwrap()
}

#[test]
fn order_and_transport() {
    let p = m4();
    let half = val(&p, "a 1/2^1\nb 1/2^1");
    let top = val(&p, "top 1");
    let bot = val(&p, "bot 1");
    assert!(half.leq(&top).unwrap() && half.leq_oracle(&top).unwrap());
    assert!(bot.leq(&top).unwrap());
    assert!(!top.leq(&val(&p, "top 1/2^1")).unwrap());

    let plan = half.transport_plan(&top).unwrap();
    assert_eq!(plan.display(&p), "transport a top 1/2^1\ntransport b top 1/2^1\n");
    let plan = bot.transport_plan(&half).unwrap();
    assert_eq!(plan.get(p.bottom(), p.id("a").unwrap()), d("1/2^1"));
    assert_eq!(plan.get(p.bottom(), p.id("b").unwrap()), d("1/2^1"));
    assert_eq!(
        val(&p, "a 1").transport_plan(&val(&p, "b 1")).unwrap_err(),
        ValuationError::NotComparable
    );
}

#[test]
fn way_below_in_both_modes() {
    let p = m4();
    let top = val(&p, "top 1");
    assert!(val(&p, "bot 1/2^2").way_below(&top, Space::Subprobability).unwrap());
    assert!(!top.way_below(&top, Space::Subprobability).unwrap());
    let mixed = val(&p, "bot 1/2^1\ntop 1/2^1");
    assert!(mixed.way_below(&top, Space::Probability).unwrap());
    assert_eq!(mixed.way_below_epsilon(&top).unwrap(), Some(1));
}

#[test]
fn integration_and_pushforward() {
    let p = m4();
    let half = val(&p, "a 1/2^1\nb 1/2^1");
    let up_a = p.up_closure([p.id("a").unwrap()]);
    assert_eq!(half.evaluate(&up_a).unwrap(), d("1/2^1"));
    let f = [d("0"), d("1/2^1"), d("1/2^1"), d("1")];
    assert_eq!(val(&p, "top 1").integrate_monotone(&f).unwrap(), d("1"));

    let c3 = Arc::new(text::parse_poset(C3).unwrap());
    let table = ["c0", "c1", "c1", "c2"].map(|n| Some(c3.id(n).unwrap())).to_vec();
    let g = powerdomain::MonotoneMap::new(&p, &c3, table).unwrap();
    assert_eq!(half.pushforward(&g).unwrap(), val(&c3, "c1 1"));
}

#[test]
fn schedule_and_representation() {
    let p = m4();
    let top = val(&p, "top 1");
    let schedule = build_schedule(&top, 2).unwrap();
    assert_eq!(schedule.stages(), &[val(&p, "bot 1"), val(&p, "bot 1/2^1\ntop 1/2^1"), top.clone()]);

    let half = val(&p, "a 1/2^1\nb 1/2^1");
    let stages = vec![val(&p, "bot 1"), half.clone(), top.clone()];
    let map = represent(&ApproximationSchedule::from_stages(stages).unwrap()).unwrap();
    let depths: Vec<u32> = map.layers().iter().map(|l| l.depth()).collect();
    assert_eq!(depths, [0, 1, 2]);
    let (a, b, t) = (p.id("a").unwrap(), p.id("b").unwrap(), p.id("top").unwrap());
    assert_eq!(map.layers()[1].table(), &[a, b]);
    assert_eq!(map.evaluate(&"11".parse::<Word>().unwrap()).unwrap(), (vec![p.bottom(), b, t], t));
    assert_eq!(map.evaluate(&"00".parse::<Word>().unwrap()).unwrap(), (vec![p.bottom(), a, t], t));
    assert_eq!(map.sample(&mut [true, false].into_iter()).unwrap(), t);
    assert!(matches!(
        map.sample(&mut [true].into_iter()),
        Err(SkorohodError::SourceExhausted(_))
    ));

    let written = text::write_map(&map);
    assert_eq!(text::parse_map(&written, &p).unwrap(), map);
}

#[test]
fn skorohod_witnesses() {
    let p = m4();
    let half = val(&p, "a 1/2^1\nb 1/2^1");
    let w = skorohod(&half, 1).unwrap();
    let values: Vec<_> = w.records().unwrap().into_iter().map(|r| r.value.unwrap()).collect();
    let a = values.iter().filter(|&&y| y == p.id("a").unwrap()).count();
    assert_eq!(a * 2, values.len());
    assert_eq!(w.tabulate().unwrap(), half);

    let err = target_from_ratios(&p, &[("a", 1, 3), ("top", 2, 3)]).unwrap_err();
    assert!(matches!(err, PipelineError::Dyadic(DyadicError::NonDyadic { .. })), "{err:?}");
}

#[test]
fn chain_quantiles() {
    let c3 = Arc::new(text::parse_poset(C3).unwrap());
    let v = val(&c3, "c0 1/2^2\nc1 1/2^2\nc2 1/2^1");
    let f = cdf(&v).unwrap();
    let g = lower_adjoint(&f);
    assert_eq!(c3.name(g.at(&d("3/2^3")).unwrap()), "c1");
    assert_eq!(c3.name(g.at(&d("0")).unwrap()), "c0");
    assert_eq!(c3.name(g.at(&d("1")).unwrap()), "c2");
    assert_eq!(pushforward_lebesgue(&g).unwrap(), v);
    let written = text::write_quantile(&g);
    assert_eq!(text::parse_quantile(&written, &c3).unwrap(), g);
}
